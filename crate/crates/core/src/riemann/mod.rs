//! Exact Riemann solvers used as reference solutions.
//!
//! Gas-law problems use the closed-form pressure functions. Any other
//! material goes through wave curves built numerically: shocks from a root
//! of the Hugoniot relation, rarefactions by integrating the isentrope in
//! pressure. Two-phase mixtures follow each phase along its own Hugoniot or
//! isentrope at the shared pressure. Every solution is checked before it is
//! returned: Rankine–Hugoniot residuals across shocks, and a second
//! integration of each rarefaction with density as the independent variable.

mod closed;
mod general;
mod roots;

use nalgebra::Vector3;
use ode_solvers::continuous_output_model::ContinuousOutputModel;
use ode_solvers::{Dopri5, OutputType, System};
use serde::{Deserialize, Serialize};

use crate::eos::EosModel;
use crate::error::{Error, Result};
use crate::multiphase::{mixture_sound_speed, PhasePair};

pub use closed::{solve_perfect_gas, solve_stiffened_gas};
pub use general::{solve_mie_gruneisen, solve_mixture};
pub use roots::{bracketed_newton, MAX_ITERATIONS};

/// Largest accepted relative Rankine–Hugoniot residual.
pub const HUGONIOT_TOLERANCE: f64 = 1e-9;
/// Largest accepted relative drift of the rarefaction invariants.
pub const INVARIANT_TOLERANCE: f64 = 1e-8;
/// Relative tolerance of the isentrope integrations.
pub const ODE_RTOL: f64 = 1e-11;
const ODE_ATOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Primitive {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

impl Primitive {
    pub const fn new(rho: f64, u: f64, p: f64) -> Self {
        Self { rho, u, p }
    }
}

/// Two-phase state in mechanical equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixturePrimitive {
    pub alpha1: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub u: f64,
    pub p: f64,
}

impl MixturePrimitive {
    pub fn rho(&self) -> f64 {
        self.alpha1 * self.rho1 + (1.0 - self.alpha1) * self.rho2
    }

    /// Mass fraction of phase 1.
    pub fn y1(&self) -> f64 {
        self.alpha1 * self.rho1 / self.rho()
    }
}

/// Single-material Riemann problem; the two sides may use different EOS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannProblem {
    pub left: Primitive,
    pub right: Primitive,
    pub left_eos: EosModel,
    pub right_eos: EosModel,
    pub x_d: f64,
}

impl RiemannProblem {
    pub fn new(eos: EosModel, left: Primitive, right: Primitive, x_d: f64) -> Self {
        Self {
            left,
            right,
            left_eos: eos,
            right_eos: eos,
            x_d,
        }
    }

    fn sides(&self) -> Result<[(Medium, Thermo, f64); 2]> {
        let side = |eos: EosModel, s: Primitive| -> Result<(Medium, Thermo, f64)> {
            eos.validate()?;
            if !(s.u.is_finite() && s.p.is_finite()) {
                return Err(Error::config(format!("non-finite Riemann state {s:?}")));
            }
            let medium = Medium::Single(eos);
            let th = Thermo {
                rho: [s.rho, 0.0],
                p: s.p,
            };
            medium.sound_speed(&th)?;
            Ok((medium, th, s.u))
        };
        Ok([
            side(self.left_eos, self.left)?,
            side(self.right_eos, self.right)?,
        ])
    }
}

/// Two-phase Riemann problem for the mechanical-equilibrium mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureRiemannProblem {
    pub pair: PhasePair,
    pub left: MixturePrimitive,
    pub right: MixturePrimitive,
    pub x_d: f64,
}

impl MixtureRiemannProblem {
    fn sides(&self) -> Result<[(Medium, Thermo, f64); 2]> {
        self.pair.validate()?;
        let side = |s: MixturePrimitive| -> Result<(Medium, Thermo, f64)> {
            if !(s.alpha1 > 0.0 && s.alpha1 < 1.0) {
                return Err(Error::config(format!(
                    "volume fraction {:e} outside (0, 1)",
                    s.alpha1
                )));
            }
            let medium = Medium::Mixture {
                pair: self.pair,
                y1: s.y1(),
            };
            let th = Thermo {
                rho: [s.rho1, s.rho2],
                p: s.p,
            };
            medium.sound_speed(&th)?;
            Ok((medium, th, s.u))
        };
        Ok([side(self.left)?, side(self.right)?])
    }
}

/// Material crossed by one nonlinear wave. A mixture keeps its mass
/// fractions through the wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Medium {
    Single(EosModel),
    Mixture { pair: PhasePair, y1: f64 },
}

/// Phase densities (the second is unused for a single material) and pressure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Thermo {
    pub rho: [f64; 2],
    pub p: f64,
}

impl Medium {
    pub(crate) fn phases(&self) -> usize {
        match self {
            Medium::Single(_) => 1,
            Medium::Mixture { .. } => 2,
        }
    }

    pub(crate) fn eos(&self, j: usize) -> &EosModel {
        match self {
            Medium::Single(eos) => eos,
            Medium::Mixture { pair, .. } => {
                if j == 0 {
                    &pair.phase1
                } else {
                    &pair.phase2
                }
            }
        }
    }

    pub(crate) fn mass_fraction(&self, j: usize) -> f64 {
        match *self {
            Medium::Single(_) => 1.0,
            Medium::Mixture { y1, .. } => {
                if j == 0 {
                    y1
                } else {
                    1.0 - y1
                }
            }
        }
    }

    pub(crate) fn specific_volume(&self, th: &Thermo) -> f64 {
        (0..self.phases())
            .map(|j| self.mass_fraction(j) / th.rho[j])
            .sum()
    }

    pub(crate) fn density(&self, th: &Thermo) -> f64 {
        1.0 / self.specific_volume(th)
    }

    pub(crate) fn alpha1(&self, th: &Thermo) -> f64 {
        self.mass_fraction(0) * self.density(th) / th.rho[0]
    }

    pub(crate) fn phase_c2(&self, th: &Thermo, j: usize) -> Result<f64> {
        let c2 = self.eos(j).sound_speed_squared(th.rho[j], th.p)?;
        if c2 > 0.0 && c2.is_finite() {
            Ok(c2)
        } else {
            Err(Error::Hyperbolicity {
                rho: th.rho[j],
                p: th.p,
                c2,
            })
        }
    }

    pub(crate) fn sound_speed(&self, th: &Thermo) -> Result<f64> {
        match self {
            Medium::Single(_) => Ok(self.phase_c2(th, 0)?.sqrt()),
            Medium::Mixture { .. } => mixture_sound_speed(
                self.alpha1(th),
                th.rho[0],
                self.phase_c2(th, 0)?,
                th.rho[1],
                self.phase_c2(th, 1)?,
            ),
        }
    }

    pub(crate) fn specific_energy(&self, th: &Thermo) -> Result<f64> {
        let mut eps = 0.0;
        for j in 0..self.phases() {
            eps += self.mass_fraction(j) * self.eos(j).specific_energy(th.rho[j], th.p)?;
        }
        Ok(eps)
    }

    fn sample(&self, th: &Thermo, u: f64) -> Result<FanSample> {
        let rho = self.density(th);
        let e = rho * self.specific_energy(th)?;
        let (alpha1, y1) = match self {
            Medium::Single(_) => (None, None),
            Medium::Mixture { y1, .. } => (Some(self.alpha1(th)), Some(*y1)),
        };
        Ok(FanSample {
            rho,
            u,
            p: th.p,
            e,
            alpha1,
            y1,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveKind {
    Shock,
    Rarefaction,
}

/// A nonlinear wave; a shock has `head == tail`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wave {
    pub kind: WaveKind,
    pub head: f64,
    pub tail: f64,
}

/// Primitive state at a point of the fan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanSample {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
    /// Internal energy per unit volume.
    pub e: f64,
    pub alpha1: Option<f64>,
    pub y1: Option<f64>,
}

/// Largest residuals met while validating a fan.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FanResiduals {
    pub hugoniot: f64,
    pub invariants: f64,
}

/// Whether the wave moves into the left (−1) or the right (+1) state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Side {
    Left,
    Right,
}

impl Side {
    pub(crate) fn sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }
}

/// Dense rarefaction data.
#[derive(Debug, Clone)]
pub(crate) enum Fan {
    /// Zero-width wave or shock.
    None,
    /// Gas-law fan with `P = p + p∞`.
    Stiffened { gamma: f64, p_inf: f64 },
    /// Isentrope integrated in `x = p_K − p`, components `(ρ₁, ρ₂, ∫ dp/(ρc))`.
    Numeric(Box<ContinuousOutputModel<f64, Vector3<f64>>>),
}

#[derive(Debug, Clone)]
pub(crate) struct SideSolution {
    pub side: Side,
    pub medium: Medium,
    pub state: Thermo,
    pub u: f64,
    pub star: Thermo,
    pub wave: Wave,
    pub fan: Fan,
}

impl SideSolution {
    fn fan_state(&self, xi: f64, u_star: f64) -> Result<(Thermo, f64)> {
        let sign = self.side.sign();
        match &self.fan {
            Fan::None => Ok((self.star, u_star)),
            Fan::Stiffened { gamma, p_inf } => {
                let (g, rho_k, u_k) = (*gamma, self.state.rho[0], self.u);
                let big_p = self.state.p + p_inf;
                let c_k = (g * big_p / rho_k).sqrt();
                let c = 2.0 / (g + 1.0) * (c_k - sign * 0.5 * (g - 1.0) * (u_k - xi));
                let u = 2.0 / (g + 1.0) * (-sign * c_k + 0.5 * (g - 1.0) * u_k + xi);
                let ratio = c / c_k;
                let th = Thermo {
                    rho: [rho_k * ratio.powf(2.0 / (g - 1.0)), 0.0],
                    p: big_p * ratio.powf(2.0 * g / (g - 1.0)) - p_inf,
                };
                Ok((th, u))
            }
            Fan::Numeric(model) => {
                let at = |x: f64| -> Result<(Thermo, f64, f64)> {
                    let y = model.evaluate(x).ok_or_else(|| {
                        Error::oracle(format!(
                            "rarefaction table has no entry at p = {:e}",
                            self.state.p - x
                        ))
                    })?;
                    let th = Thermo {
                        rho: [y[0], y[1]],
                        p: self.state.p - x,
                    };
                    let u = self.u - sign * y[2];
                    let lambda = u + sign * self.medium.sound_speed(&th)?;
                    Ok((th, u, lambda))
                };
                // λ increases with x on the left fan and decreases on the right
                let (mut a, mut b) = model.bounds();
                for _ in 0..MAX_ITERATIONS {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    let (_, _, lambda) = at(m)?;
                    if (lambda < xi) == (self.side == Side::Left) {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                let (th, u, _) = at(0.5 * (a + b))?;
                Ok((th, u))
            }
        }
    }

    fn sample(&self, xi: f64, u_star: f64) -> Result<FanSample> {
        let sign = self.side.sign();
        // positive on the undisturbed side of a wave edge
        let beyond = |speed: f64| sign * (xi - speed);
        let (th, u) = if beyond(self.wave.head) > 0.0 {
            (self.state, self.u)
        } else if beyond(self.wave.tail) <= 0.0 {
            (self.star, u_star)
        } else {
            self.fan_state(xi, u_star)?
        };
        self.medium.sample(&th, u)
    }

    fn star_sample(&self, u_star: f64) -> Result<FanSample> {
        self.medium.sample(&self.star, u_star)
    }

    /// Rankine–Hugoniot residual of a shock, relative to the flux magnitudes.
    fn hugoniot_residual(&self, u_star: f64) -> Result<f64> {
        let m = &self.medium;
        let s = self.wave.head;
        let (r0, r1) = (m.density(&self.state), m.density(&self.star));
        let (w0, w1) = (self.u - s, u_star - s);
        let (p0, p1) = (self.state.p, self.star.p);
        let mass = (r0 * w0 - r1 * w1).abs() / (r0 * w0).abs().max(r1 * w1.abs());
        let momentum = (r0 * w0 * w0 + p0 - r1 * w1 * w1 - p1).abs()
            / (r0 * w0 * w0 + p0.abs() + r1 * w1 * w1 + p1.abs());
        let (e0, e1) = (
            m.specific_energy(&self.state)?,
            m.specific_energy(&self.star)?,
        );
        let h0 = [e0, p0 / r0, 0.5 * w0 * w0];
        let h1 = [e1, p1 / r1, 0.5 * w1 * w1];
        let energy = (h0.iter().sum::<f64>() - h1.iter().sum::<f64>()).abs()
            / h0.iter().chain(&h1).map(|v| v.abs()).sum::<f64>();
        let mut worst = mass.max(momentum).max(energy);
        for j in 0..m.phases() {
            if self.star.rho[j] <= self.state.rho[j] {
                return Err(Error::oracle(format!(
                    "expansion shock in phase {}: rho {:e} -> {:e}",
                    j + 1,
                    self.state.rho[j],
                    self.star.rho[j]
                )));
            }
            worst = worst.max(
                general::phase_hugoniot(m.eos(j), self.state.rho[j], p0, self.star.rho[j], p1)?.1,
            );
        }
        Ok(worst)
    }

    /// Integrates the rarefaction again with `ρ₁` as the independent variable
    /// and compares the tail state with the one used by the solver.
    fn invariant_residual(&self, u_star: f64) -> Result<f64> {
        let (rho_a, rho_b) = (self.state.rho[0], self.star.rho[0]);
        if rho_a == rho_b {
            return Ok(0.0);
        }
        let system = DensityIsentrope {
            medium: self.medium,
            rho0: rho_a,
            sign: self.side.sign(),
        };
        let y0 = Vector3::new(self.state.p, self.state.rho[1], self.u);
        let y = integrate(system, rho_a - rho_b, y0, None)?;
        let c = self.medium.sound_speed(&self.star)?;
        let mut worst = ((y[0] - self.star.p) / self.star.p.abs().max(self.state.p.abs())).abs();
        worst = worst.max(((y[2] - u_star) / (c + u_star.abs())).abs());
        if self.medium.phases() == 2 {
            worst = worst.max(((y[1] - self.star.rho[1]) / self.star.rho[1]).abs());
        }
        Ok(worst)
    }
}

/// Complete self-similar solution of a Riemann problem.
#[derive(Debug, Clone)]
pub struct WaveFan {
    pub p_star: f64,
    pub u_star: f64,
    pub x_d: f64,
    pub residuals: FanResiduals,
    pub(crate) left: SideSolution,
    pub(crate) right: SideSolution,
}

impl WaveFan {
    pub(crate) fn new(
        left: SideSolution,
        right: SideSolution,
        p_star: f64,
        u_star: f64,
        x_d: f64,
    ) -> Result<Self> {
        let mut fan = Self {
            p_star,
            u_star,
            x_d,
            residuals: FanResiduals::default(),
            left,
            right,
        };
        fan.residuals = fan.verify()?;
        Ok(fan)
    }

    pub fn left_wave(&self) -> Wave {
        self.left.wave
    }

    pub fn right_wave(&self) -> Wave {
        self.right.wave
    }

    /// States on either side of the contact.
    pub fn star_states(&self) -> Result<(FanSample, FanSample)> {
        Ok((
            self.left.star_sample(self.u_star)?,
            self.right.star_sample(self.u_star)?,
        ))
    }

    /// State at similarity coordinate `ξ = (x − x_d)/t`.
    pub fn sample_xi(&self, xi: f64) -> Result<FanSample> {
        if xi <= self.u_star {
            self.left.sample(xi, self.u_star)
        } else {
            self.right.sample(xi, self.u_star)
        }
    }

    pub fn sample(&self, x: f64, t: f64) -> Result<FanSample> {
        if t.is_nan() || t <= 0.0 {
            return Err(Error::oracle(format!(
                "sampling time must be positive, got {t:e}"
            )));
        }
        self.sample_xi((x - self.x_d) / t)
    }

    /// Positions at time `t` of the left wave, contact and right wave.
    /// Rarefactions are located by the midpoint of head and tail.
    pub fn wave_positions(&self, t: f64) -> [f64; 3] {
        let mid = |w: Wave| 0.5 * (w.head + w.tail);
        [
            self.x_d + mid(self.left.wave) * t,
            self.x_d + self.u_star * t,
            self.x_d + mid(self.right.wave) * t,
        ]
    }

    fn verify(&self) -> Result<FanResiduals> {
        let mut r = FanResiduals::default();
        for side in [&self.left, &self.right] {
            match side.wave.kind {
                WaveKind::Shock => {
                    r.hugoniot = r.hugoniot.max(side.hugoniot_residual(self.u_star)?)
                }
                WaveKind::Rarefaction => {
                    r.invariants = r.invariants.max(side.invariant_residual(self.u_star)?)
                }
            }
        }
        if r.hugoniot > HUGONIOT_TOLERANCE
            || r.invariants > INVARIANT_TOLERANCE
            || !r.hugoniot.is_finite()
        {
            return Err(Error::oracle(format!(
                "fan failed validation: Hugoniot residual {:e}, invariant drift {:e}",
                r.hugoniot, r.invariants
            )));
        }
        Ok(r)
    }
}

/// Isentrope in `x = p₀ − p`: `(ρ₁, ρ₂, I)` with `dρ_j/dp = 1/c_j²` and `dI/dp = −1/(ρc)`.
pub(crate) struct PressureIsentrope {
    pub medium: Medium,
    pub p0: f64,
}

impl System<f64, Vector3<f64>> for PressureIsentrope {
    fn system(&self, x: f64, y: &Vector3<f64>, dy: &mut Vector3<f64>) {
        let th = Thermo {
            rho: [y[0], y[1]],
            p: self.p0 - x,
        };
        let rates = || -> Result<Vector3<f64>> {
            let mut d = Vector3::zeros();
            for j in 0..self.medium.phases() {
                d[j] = -1.0 / self.medium.phase_c2(&th, j)?;
            }
            d[2] = 1.0 / (self.medium.density(&th) * self.medium.sound_speed(&th)?);
            Ok(d)
        };
        *dy = rates().unwrap_or_else(|_| Vector3::repeat(f64::NAN));
    }
}

/// Isentrope in `x = ρ₁⁰ − ρ₁`: `(p, ρ₂, u)`.
struct DensityIsentrope {
    medium: Medium,
    rho0: f64,
    sign: f64,
}

impl System<f64, Vector3<f64>> for DensityIsentrope {
    fn system(&self, x: f64, y: &Vector3<f64>, dy: &mut Vector3<f64>) {
        let th = Thermo {
            rho: [self.rho0 - x, y[1]],
            p: y[0],
        };
        let rates = || -> Result<Vector3<f64>> {
            let c1_sq = self.medium.phase_c2(&th, 0)?;
            let mut d = Vector3::zeros();
            d[0] = -c1_sq;
            if self.medium.phases() == 2 {
                d[1] = -c1_sq / self.medium.phase_c2(&th, 1)?;
            }
            let rc = self.medium.density(&th) * self.medium.sound_speed(&th)?;
            d[2] = -self.sign * c1_sq / rc;
            Ok(d)
        };
        *dy = rates().unwrap_or_else(|_| Vector3::repeat(f64::NAN));
    }
}

/// Dormand–Prince integration from 0 to `x1 > 0`, optionally keeping the dense output.
pub(crate) fn integrate<S>(
    system: S,
    x1: f64,
    y0: Vector3<f64>,
    dense: Option<&mut ContinuousOutputModel<f64, Vector3<f64>>>,
) -> Result<Vector3<f64>>
where
    S: System<f64, Vector3<f64>>,
{
    // the increasing, non-negative independent variable keeps the dense output valid
    let mut solver = Dopri5::new(system, 0.0, x1, x1, y0, ODE_RTOL, ODE_ATOL);
    let outcome = match dense {
        Some(model) => solver.integrate_with_continuous_output_model(model),
        None => {
            solver.set_output(OutputType::Sparse);
            solver.integrate()
        }
    };
    outcome.map_err(|e| Error::oracle(format!("isentrope integration failed: {e}")))?;
    let y = *solver
        .y_out()
        .last()
        .ok_or_else(|| Error::oracle("isentrope integration produced no output"))?;
    if y.iter().all(|v| v.is_finite()) {
        Ok(y)
    } else {
        Err(Error::oracle(format!(
            "isentrope left the EOS domain within {x1:e} of its start"
        )))
    }
}
