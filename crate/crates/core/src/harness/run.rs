//! Running one case: initial data, time loop, audit and reference solution.

use std::time::{Duration, Instant};

use nalgebra::{SVector, Vector3, Vector5};

use super::config::{Problem, RunConfig};
use super::output::write_outputs;
use crate::eos::EosModel;
use crate::error::{Error, Result};
use crate::euler::{self, EulerScheme};
use crate::mesh::{Mesh1D, SolutionState, Variables};
use crate::multiphase::{self, MultiphaseScheme, PhasePair};
use crate::rd::{StageScheme, StepAudit};
use crate::riemann::{
    solve_mie_gruneisen, solve_mixture, solve_stiffened_gas, FanSample, MixturePrimitive,
    MixtureRiemannProblem, Primitive, RiemannProblem, WaveFan,
};
use crate::solver::{advance_partial, Stop};

/// Primitive fields at the DOFs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Profile {
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    /// Internal energy per unit volume.
    pub e: Vec<f64>,
    pub alpha1: Option<Vec<f64>>,
    pub y1: Option<Vec<f64>>,
}

impl Profile {
    fn push(&mut self, x: f64, rho: f64, u: f64, p: f64, e: f64, phase: Option<(f64, f64)>) {
        self.x.push(x);
        self.rho.push(rho);
        self.u.push(u);
        self.p.push(p);
        self.e.push(e);
        if let Some((alpha1, y1)) = phase {
            self.alpha1.get_or_insert_with(Vec::new).push(alpha1);
            self.y1.get_or_insert_with(Vec::new).push(y1);
        }
    }

    fn push_sample(&mut self, x: f64, s: &FanSample) {
        let phase = s.alpha1.zip(s.y1);
        self.push(x, s.rho, s.u, s.p, s.e, phase);
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Per-step conservation audit.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AuditRow {
    pub step: usize,
    pub time: f64,
    pub dt: f64,
    /// Largest element-sum defect of the conserved residuals (mass, momentum).
    pub element_defect: f64,
    /// Largest total-energy defect over elements where the correction applies.
    pub energy_defect: f64,
    /// Largest total-energy defect over elements where the contact switch fired.
    pub switched_energy_defect: f64,
    pub switched_elements: usize,
    pub clipped: usize,
    /// Change of the global masses and momentum not explained by boundary fluxes.
    pub mass_drift: f64,
    /// The same for the total energy.
    pub energy_drift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Errors {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

#[derive(Debug, Clone)]
pub struct CaseResult {
    pub config: RunConfig,
    pub mesh: Mesh1D,
    pub time: f64,
    pub steps: usize,
    pub solution: Profile,
    pub reference: Option<Profile>,
    pub l1: Option<L1Errors>,
    pub audit: Vec<AuditRow>,
    /// Audit maxima over the whole run.
    pub totals: StepAudit,
    pub wall_time: Duration,
}

/// `Σ_σ |C_σ| |a_σ − b_σ|`.
pub fn l1_error(numeric: &[f64], reference: &[f64], mesh: &Mesh1D) -> Result<f64> {
    for len in [numeric.len(), reference.len()] {
        if len != mesh.n_dofs() {
            return Err(Error::Length {
                expected: mesh.n_dofs(),
                got: len,
            });
        }
    }
    Ok(mesh
        .dual_volumes()
        .iter()
        .zip(numeric.iter().zip(reference))
        .map(|(v, (a, b))| v * (a - b).abs())
        .sum())
}

/// Compact `cos⁸` bump of half-width `w` centred at `c`.
pub fn bump(x: f64, c: f64, w: f64) -> f64 {
    let r = (x - c) / w;
    if r.abs() < 1.0 {
        (std::f64::consts::FRAC_PI_2 * r).cos().powi(8)
    } else {
        0.0
    }
}

/// Primitive single-material state at `x` at time zero.
fn initial_primitive(cfg: &RunConfig, x: f64) -> Result<Primitive> {
    let x_d = cfg.domain.x_d;
    Ok(match cfg.problem {
        Problem::Riemann { left, right, .. } => {
            if x < x_d {
                left
            } else if x > x_d {
                right
            } else {
                Primitive::new(
                    0.5 * (left.rho + right.rho),
                    0.5 * (left.u + right.u),
                    0.5 * (left.p + right.p),
                )
            }
        }
        Problem::AcousticPulse {
            eos,
            rho0,
            p0,
            amplitude,
            width,
        } => {
            let c0 = eos.sound_speed(rho0, p0)?;
            let rho = rho0 * (1.0 + amplitude * bump(x, x_d, width));
            Primitive::new(rho, 0.0, p0 + c0 * c0 * (rho - rho0))
        }
        Problem::DensityWave {
            rho0,
            u0,
            p0,
            amplitude,
            width,
            ..
        } => Primitive::new(rho0 * (1.0 + amplitude * bump(x, x_d, width)), u0, p0),
        Problem::Mixture { .. } => {
            return Err(Error::config(
                "mixture problem has no single-material state",
            ))
        }
    })
}

fn initial_mixture(cfg: &RunConfig, x: f64) -> Result<MixturePrimitive> {
    let Problem::Mixture { left, right, .. } = cfg.problem else {
        return Err(Error::config("not a mixture problem"));
    };
    let x_d = cfg.domain.x_d;
    Ok(if x < x_d {
        left
    } else if x > x_d {
        right
    } else {
        let avg = |a: f64, b: f64| 0.5 * (a + b);
        MixturePrimitive {
            alpha1: avg(left.alpha1, right.alpha1),
            rho1: avg(left.rho1, right.rho1),
            rho2: avg(left.rho2, right.rho2),
            u: avg(left.u, right.u),
            p: avg(left.p, right.p),
        }
    })
}

fn oracle(cfg: &RunConfig) -> Result<Option<WaveFan>> {
    let x_d = cfg.domain.x_d;
    match cfg.problem {
        Problem::Riemann { eos, left, right } => {
            let problem = RiemannProblem::new(eos, left, right, x_d);
            let fan = match eos {
                EosModel::PerfectGas { .. } | EosModel::StiffenedGas { .. } => {
                    solve_stiffened_gas(&problem)?
                }
                EosModel::CochranChan { .. } => solve_mie_gruneisen(&problem)?,
            };
            Ok(Some(fan))
        }
        Problem::Mixture {
            phase1,
            phase2,
            left,
            right,
        } => Ok(Some(solve_mixture(&MixtureRiemannProblem {
            pair: PhasePair { phase1, phase2 },
            left,
            right,
            x_d,
        })?)),
        Problem::AcousticPulse { .. } | Problem::DensityWave { .. } => Ok(None),
    }
}

/// Exact solution at time `t` sampled at the DOFs, when one is known.
pub fn reference_profile(cfg: &RunConfig, mesh: &Mesh1D, t: f64) -> Result<Option<Profile>> {
    let mut profile = Profile::default();
    if let Some(fan) = oracle(cfg)? {
        for x in mesh.vertices() {
            profile.push_sample(x, &fan.sample(x, t)?);
        }
        return Ok(Some(profile));
    }
    match cfg.problem {
        Problem::DensityWave {
            eos,
            rho0,
            u0,
            p0,
            amplitude,
            width,
        } => {
            for x in mesh.vertices() {
                let rho = rho0 * (1.0 + amplitude * bump(x - u0 * t, cfg.domain.x_d, width));
                profile.push(x, rho, u0, p0, eos.energy_from_pressure(rho, p0)?, None);
            }
            Ok(Some(profile))
        }
        _ => Ok(None),
    }
}

/// Conserved densities (masses, momentum, total energy last) and their fluxes at one DOF.
type Balance<const N: usize> = dyn Fn(&SVector<f64, N>) -> Result<(Vec<f64>, Vec<f64>)>;

struct Bookkeeping {
    totals: Vec<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
    magnitude: Vec<f64>,
}

fn bookkeeping<const N: usize>(
    mesh: &Mesh1D,
    state: &SolutionState<N>,
    balance: &Balance<N>,
) -> Result<Bookkeeping> {
    let vols = mesh.dual_volumes();
    let mut totals = Vec::new();
    let mut magnitude = Vec::new();
    for (v, vol) in state.values.iter().zip(&vols) {
        let (dens, _) = balance(v)?;
        totals.resize(dens.len(), 0.0);
        magnitude.resize(dens.len(), 0.0);
        for (k, d) in dens.iter().enumerate() {
            totals[k] += vol * d;
            magnitude[k] += vol * d.abs();
        }
    }
    let left = balance(&state.values[0])?.1;
    let right = balance(&state.values[state.values.len() - 1])?.1;
    Ok(Bookkeeping {
        totals,
        left,
        right,
        magnitude,
    })
}

/// Relative global drift of each conserved quantity over one step of length `dt`.
fn drift(old: &Bookkeeping, new: &Bookkeeping, dt: f64) -> Vec<f64> {
    (0..old.totals.len())
        .map(|k| {
            let boundary = 0.5 * (old.right[k] + new.right[k]) - 0.5 * (old.left[k] + new.left[k]);
            let change = new.totals[k] - old.totals[k] + dt * boundary;
            let scale = old.magnitude[k].max(new.magnitude[k])
                + dt * (old.right[k].abs()
                    + old.left[k].abs()
                    + new.right[k].abs()
                    + new.left[k].abs());
            if scale > 0.0 {
                change.abs() / scale
            } else {
                change.abs()
            }
        })
        .collect()
}

struct Simulation<const N: usize> {
    state: SolutionState<N>,
    steps: usize,
    audit: Vec<AuditRow>,
    totals: StepAudit,
    failure: Option<Error>,
}

fn simulate<S, const N: usize>(
    cfg: &RunConfig,
    mesh: &Mesh1D,
    scheme: &S,
    init: SolutionState<N>,
    balance: &Balance<N>,
) -> Result<Simulation<N>>
where
    S: StageScheme<N>,
{
    let stop = match cfg.steps {
        Some(n) => Stop::Steps(n),
        None => Stop::Time(cfg.t_final),
    };
    let mut rows = Vec::new();
    let mut totals = StepAudit::default();
    let mut books = if cfg.audit {
        Some(bookkeeping(mesh, &init, balance)?)
    } else {
        None
    };
    let mut time = init.time;
    let mut book_error = None;
    let outcome = advance_partial(
        scheme,
        mesh,
        init,
        stop,
        cfg.cfl,
        cfg.order()?,
        |step, state, audit| {
            totals.merge(audit);
            let dt = state.time - time;
            time = state.time;
            let Some(old) = books.as_ref() else {
                return;
            };
            let new = match bookkeeping(mesh, state, balance) {
                Ok(b) => b,
                Err(e) => {
                    book_error.get_or_insert(e);
                    return;
                }
            };
            let d = drift(old, &new, dt);
            let (energy, masses) = d.split_last().expect("at least one conserved quantity");
            rows.push(AuditRow {
                step,
                time: state.time,
                dt,
                element_defect: audit.conserved,
                energy_defect: audit.energy,
                switched_energy_defect: audit.switched_energy,
                switched_elements: audit.switched,
                clipped: audit.clipped,
                mass_drift: masses.iter().copied().fold(0.0, f64::max),
                energy_drift: *energy,
            });
            books = Some(new);
        },
    );
    if let Some(e) = book_error {
        return Err(e);
    }
    Ok(Simulation {
        state: outcome.state,
        steps: outcome.steps,
        audit: rows,
        totals,
        failure: outcome.failure,
    })
}

fn single_profile(
    cfg: &RunConfig,
    mesh: &Mesh1D,
    eos: &EosModel,
    state: &SolutionState<3>,
) -> Result<Profile> {
    let mut p = Profile::default();
    for (i, v) in state.values.iter().enumerate() {
        let t = euler::decode(cfg.formulation, eos, v)?;
        p.push(mesh.x(i), t.rho, t.u, t.p, t.e, None);
    }
    Ok(p)
}

fn mixture_profile(pair: &PhasePair, mesh: &Mesh1D, state: &SolutionState<5>) -> Result<Profile> {
    let mut p = Profile::default();
    for (i, v) in state.values.iter().enumerate() {
        let m = multiphase::decode(pair, v)?;
        p.push(mesh.x(i), m.rho(), m.u, m.p, m.e, Some((m.alpha1, m.y1())));
    }
    Ok(p)
}

/// Runs `cfg` from its initial data to `t_final` (or its step count), computes
/// the reference solution and the L¹ errors, and writes the outputs when an
/// output directory is set. A failed run still writes its last good state.
pub fn run_case(cfg: &RunConfig) -> Result<CaseResult> {
    cfg.validate()?;
    let mesh = Mesh1D::new(cfg.domain.x_min, cfg.domain.x_max, cfg.n_cells)?;
    let clock = Instant::now();
    let (sim_steps, audit, totals, failure, time, solution) = match cfg.problem.pair() {
        None => {
            let eos = cfg.problem.eos().expect("single-material problem");
            let f = cfg.formulation;
            let mut scheme = EulerScheme::new(f, eos);
            scheme.limiting = cfg.limiting;
            scheme.correction = cfg.correction;
            scheme.time_split = cfg.time_split;
            scheme.switch = cfg.switch;
            let values = mesh
                .vertices()
                .iter()
                .map(|&x| {
                    let s = initial_primitive(cfg, x)?;
                    euler::encode(f, &eos, s.rho, s.u, s.p)
                })
                .collect::<Result<Vec<Vector3<f64>>>>()?;
            let balance = move |v: &Vector3<f64>| -> Result<(Vec<f64>, Vec<f64>)> {
                let t = euler::decode(f, &eos, v)?;
                let flux = t.flux();
                Ok((
                    vec![t.rho, t.rho * t.u, t.total_energy()],
                    flux.iter().copied().collect(),
                ))
            };
            let sim = simulate(
                cfg,
                &mesh,
                &scheme,
                SolutionState::new(f.variables(), values, 0.0),
                &balance,
            )?;
            let profile = single_profile(cfg, &mesh, &eos, &sim.state)?;
            (
                sim.steps,
                sim.audit,
                sim.totals,
                sim.failure,
                sim.state.time,
                profile,
            )
        }
        Some(pair) => {
            let mut scheme = MultiphaseScheme::new(pair);
            scheme.limiting = cfg.limiting;
            scheme.correction = cfg.correction;
            scheme.time_split = cfg.time_split;
            scheme.switch = cfg.switch;
            let values = mesh
                .vertices()
                .iter()
                .map(|&x| {
                    let s = initial_mixture(cfg, x)?;
                    multiphase::encode(&pair, s.alpha1, s.rho1, s.rho2, s.u, s.p)
                })
                .collect::<Result<Vec<Vector5<f64>>>>()?;
            let balance = move |v: &Vector5<f64>| -> Result<(Vec<f64>, Vec<f64>)> {
                let m = multiphase::decode(&pair, v)?;
                let f = m.flux();
                let dens = vec![m.a1, m.a2, v[multiphase::MOMENTUM], m.total_energy()];
                let flux = vec![
                    f[multiphase::MASS1],
                    f[multiphase::MASS2],
                    f[multiphase::MOMENTUM],
                    m.energy_flux(),
                ];
                Ok((dens, flux))
            };
            let init = SolutionState::new(Variables::Multiphase, values, 0.0);
            let sim = simulate(cfg, &mesh, &scheme, init, &balance)?;
            let profile = mixture_profile(&pair, &mesh, &sim.state)?;
            (
                sim.steps,
                sim.audit,
                sim.totals,
                sim.failure,
                sim.state.time,
                profile,
            )
        }
    };
    let wall_time = clock.elapsed();

    let mut result = CaseResult {
        config: cfg.clone(),
        mesh,
        time,
        steps: sim_steps,
        solution,
        reference: None,
        l1: None,
        audit,
        totals,
        wall_time,
    };
    if let Some(e) = failure {
        if let Some(dir) = &cfg.output {
            write_outputs(&result, dir)?;
        }
        return Err(e);
    }
    result.reference = reference_profile(cfg, &result.mesh, time)?;
    if let Some(r) = &result.reference {
        let s = &result.solution;
        result.l1 = Some(L1Errors {
            rho: l1_error(&s.rho, &r.rho, &result.mesh)?,
            u: l1_error(&s.u, &r.u, &result.mesh)?,
            p: l1_error(&s.p, &r.p, &result.mesh)?,
        });
    }
    if let Some(dir) = &cfg.output {
        write_outputs(&result, dir)?;
    }
    Ok(result)
}
