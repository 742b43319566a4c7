//! Wave curves built numerically for any EOS and for two-phase mixtures.

use ode_solvers::continuous_output_model::ContinuousOutputModel;

use super::{
    bracketed_newton, integrate, Fan, Medium, MixtureRiemannProblem, PressureIsentrope,
    RiemannProblem, Side, SideSolution, Thermo, Wave, WaveFan, WaveKind,
};
use crate::eos::EosModel;
use crate::error::{Error, Result};
use nalgebra::Vector3;

const ROOT_RTOL: f64 = 1e-14;
/// Growth steps allowed while searching for a bracket.
const BRACKET_STEPS: usize = 80;

/// Hugoniot function `ε(ρ₁, p₁) − ε(ρ₀, p₀) + ½(p₀ + p₁)(1/ρ₁ − 1/ρ₀)` of one
/// material and its size relative to the magnitude of its terms.
pub(crate) fn phase_hugoniot(
    eos: &EosModel,
    rho0: f64,
    p0: f64,
    rho1: f64,
    p1: f64,
) -> Result<(f64, f64)> {
    let eps0 = eos.specific_energy(rho0, p0)?;
    let eps1 = eos.specific_energy(rho1, p1)?;
    let work = 0.5 * (p0 + p1) * (1.0 / rho1 - 1.0 / rho0);
    let h = eps1 - eps0 + work;
    let scale = eps1.abs() + eps0.abs() + work.abs();
    Ok((
        h,
        if scale > 0.0 {
            h.abs() / scale
        } else {
            h.abs()
        },
    ))
}

/// `∂ε/∂ρ` at fixed pressure.
fn specific_energy_density_derivative(eos: &EosModel, rho: f64, p: f64) -> Result<f64> {
    let e = eos.energy_from_pressure(rho, p)?;
    let de = eos.energy_partials(rho, p)?.de_drho;
    Ok((rho * de - e) / (rho * rho))
}

/// Density behind a compressive shock raising the pressure from `p0` to `p1`.
pub(crate) fn shock_density(eos: &EosModel, rho0: f64, p0: f64, p1: f64) -> Result<f64> {
    let h = |r: f64| -> Result<(f64, f64)> {
        let (value, _) = phase_hugoniot(eos, rho0, p0, r, p1)?;
        let slope = specific_energy_density_derivative(eos, r, p1)? - 0.5 * (p0 + p1) / (r * r);
        Ok((value, slope))
    };
    let mut hi = 2.0 * rho0;
    let mut found = false;
    for _ in 0..BRACKET_STEPS {
        if h(hi)?.0 < 0.0 {
            found = true;
            break;
        }
        hi *= 2.0;
    }
    if !found {
        return Err(Error::oracle(format!(
            "no Hugoniot density found for p {p0:e} -> {p1:e} from rho {rho0:e} (searched up to {hi:e})"
        )));
    }
    bracketed_newton(h, rho0, hi, 0.5 * (rho0 + hi), ROOT_RTOL)
}

/// One evaluation of a wave curve: `u* = u_L − f_L(p)` on the left and
/// `u* = u_R + f_R(p)` on the right.
struct CurvePoint {
    f: f64,
    df: f64,
    star: Thermo,
}

fn wave_curve(
    medium: &Medium,
    state: &Thermo,
    p: f64,
    dense: Option<&mut ContinuousOutputModel<f64, Vector3<f64>>>,
) -> Result<CurvePoint> {
    let acoustic =
        || -> Result<f64> { Ok(1.0 / (medium.density(state) * medium.sound_speed(state)?)) };
    if p > state.p {
        let mut star = Thermo { rho: [0.0; 2], p };
        let mut dv_dp = 0.0;
        for j in 0..medium.phases() {
            let eos = medium.eos(j);
            let r1 = shock_density(eos, state.rho[j], state.p, p)?;
            star.rho[j] = r1;
            // slope of the phase Hugoniot v(p) from implicit differentiation
            let eps_p = 1.0 / (r1 * eos.kappa());
            let e1 = eos.energy_from_pressure(r1, p)?;
            let eps_v = e1 - r1 * eos.energy_partials(r1, p)?.de_drho;
            let dv =
                -(eps_p + 0.5 * (1.0 / r1 - 1.0 / state.rho[j])) / (eps_v + 0.5 * (state.p + p));
            dv_dp += medium.mass_fraction(j) * dv;
        }
        let dp = p - state.p;
        let dv = medium.specific_volume(state) - medium.specific_volume(&star);
        let f = (dp * dv).sqrt();
        let df = if f > 0.0 {
            (dv - dp * dv_dp) / (2.0 * f)
        } else {
            acoustic()?
        };
        Ok(CurvePoint { f, df, star })
    } else if p < state.p {
        let system = PressureIsentrope {
            medium: *medium,
            p0: state.p,
        };
        let y = integrate(
            system,
            state.p - p,
            Vector3::new(state.rho[0], state.rho[1], 0.0),
            dense,
        )?;
        let star = Thermo {
            rho: [y[0], y[1]],
            p,
        };
        let df = 1.0 / (medium.density(&star) * medium.sound_speed(&star)?);
        Ok(CurvePoint { f: -y[2], df, star })
    } else {
        Ok(CurvePoint {
            f: 0.0,
            df: acoustic()?,
            star: *state,
        })
    }
}

fn build_side(
    side: Side,
    medium: Medium,
    state: Thermo,
    u: f64,
    p_star: f64,
    u_star: f64,
) -> Result<SideSolution> {
    let sign = side.sign();
    let c = medium.sound_speed(&state)?;
    let mut model = ContinuousOutputModel::default();
    let rarefaction = p_star < state.p;
    let point = wave_curve(&medium, &state, p_star, rarefaction.then_some(&mut model))?;
    let star = point.star;
    let (wave, fan) = if p_star > state.p {
        // mass flux through the shock
        let j = if point.f > 0.0 {
            (p_star - state.p) / point.f
        } else {
            medium.density(&state) * c
        };
        let s = u + sign * j * medium.specific_volume(&state);
        (
            Wave {
                kind: WaveKind::Shock,
                head: s,
                tail: s,
            },
            Fan::None,
        )
    } else {
        let c_star = medium.sound_speed(&star)?;
        let fan = if rarefaction {
            Fan::Numeric(Box::new(model))
        } else {
            Fan::None
        };
        (
            Wave {
                kind: WaveKind::Rarefaction,
                head: u + sign * c,
                tail: u_star + sign * c_star,
            },
            fan,
        )
    };
    Ok(SideSolution {
        side,
        medium,
        state,
        u,
        star,
        wave,
        fan,
    })
}

fn solve_numeric(sides: [(Medium, Thermo, f64); 2], x_d: f64) -> Result<WaveFan> {
    let [(ml, tl, ul), (mr, tr, ur)] = sides;
    if !(tl.p > 0.0 && tr.p > 0.0) {
        return Err(Error::oracle(
            "the general solver needs positive side pressures",
        ));
    }
    let du = ur - ul;
    let pressure_function = |p: f64| -> Result<(f64, f64)> {
        let a = wave_curve(&ml, &tl, p, None)?;
        let b = wave_curve(&mr, &tr, p, None)?;
        Ok((a.f + b.f + du, a.df + b.df))
    };

    let (mut lo, mut hi) = (tl.p.min(tr.p), tl.p.max(tr.p));
    let floor = 1e-12 * hi;
    while pressure_function(lo)?.0 > 0.0 {
        lo *= 0.1;
        if lo < floor {
            return Err(Error::oracle(format!(
                "vacuum: the pressure function stays positive down to p = {lo:e}"
            )));
        }
    }
    let mut steps = 0;
    while pressure_function(hi)?.0 < 0.0 {
        hi *= 2.0;
        steps += 1;
        if steps > BRACKET_STEPS {
            return Err(Error::oracle(format!(
                "no upper bracket for the star pressure below {hi:e}"
            )));
        }
    }
    // acoustic estimate as the starting point
    let zl = ml.density(&tl) * ml.sound_speed(&tl)?;
    let zr = mr.density(&tr) * mr.sound_speed(&tr)?;
    let guess = (zr * tl.p + zl * tr.p - zl * zr * du) / (zl + zr);
    let p_star = bracketed_newton(pressure_function, lo, hi, guess, ROOT_RTOL)?;

    let fl = wave_curve(&ml, &tl, p_star, None)?.f;
    let fr = wave_curve(&mr, &tr, p_star, None)?.f;
    let u_star = 0.5 * (ul + ur) + 0.5 * (fr - fl);
    let left = build_side(Side::Left, ml, tl, ul, p_star, u_star)?;
    let right = build_side(Side::Right, mr, tr, ur, p_star, u_star)?;
    WaveFan::new(left, right, p_star, u_star, x_d)
}

/// Exact solution for arbitrary closed-form EOS, with numerically integrated
/// isentropes and root-solved Hugoniot curves.
pub fn solve_mie_gruneisen(problem: &RiemannProblem) -> Result<WaveFan> {
    solve_numeric(problem.sides()?, problem.x_d)
}

/// Exact solution of the two-phase mixture problem. Each phase follows its
/// own isentrope or Hugoniot curve at the common pressure, and the mass
/// fractions are constant on either side of the contact.
pub fn solve_mixture(problem: &MixtureRiemannProblem) -> Result<WaveFan> {
    solve_numeric(problem.sides()?, problem.x_d)
}
