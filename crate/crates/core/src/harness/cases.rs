//! Built-in cases.

use super::config::{Domain, Problem, RunConfig};
use crate::eos::EosModel;
use crate::error::{Error, Result};
use crate::euler::{ContactSwitch, Formulation};
use crate::rd::TimeSplit;
use crate::riemann::{MixturePrimitive, Primitive};

/// Names accepted by [`builtin`], with a one-line description each.
pub const CASES: [(&str, &str); 9] = [
    (
        "euler_strong_shock",
        "perfect-gas tube, 1e9 | 1e5 Pa, 100 | 1 kg/m3, t = 45 us, N = 5000",
    ),
    (
        "cochran_contact",
        "Cochran-Chan contact moving at 1000 m/s, 20 GPa, 1134 | 500 kg/m3",
    ),
    (
        "cochran_riemann",
        "Cochran-Chan tube, 2e10 | 2e5 Pa, 1134 | 120 kg/m3, t = 50 us",
    ),
    (
        "epoxy_spinel",
        "two-phase stiffened-gas tube, 2e11 | 1e5 Pa, x_d = 0.6 m, t = 29 us",
    ),
    (
        "mixed_eos",
        "epoxy_spinel with Cochran-Chan phase 2 and alpha1 = 0.5954 | 0.2",
    ),
    ("sod", "perfect-gas Sod tube, t = 0.2 s"),
    (
        "contact_perfect_gas",
        "perfect-gas contact, p = 1e5 Pa, u = 100 m/s, density 10:1, 1000 steps",
    ),
    (
        "acoustic_pulse",
        "smooth acoustic bump at rest (convergence studies)",
    ),
    (
        "density_wave",
        "smooth density bump advected at 1 m/s (exact solution known)",
    ),
];

const AIR: EosModel = EosModel::perfect_gas(1.4);
const EPOXY: EosModel = EosModel::stiffened_gas(2.43, 5.3e9);
const SPINEL: EosModel = EosModel::stiffened_gas(1.62, 141e9);

fn base(case: &str, n_cells: usize, t_final: f64, domain: Domain, problem: Problem) -> RunConfig {
    RunConfig {
        case: case.to_string(),
        formulation: Formulation::Pressure,
        n_cells,
        cfl: 0.5,
        t_final,
        steps: None,
        order: 2,
        limiting: true,
        correction: true,
        time_split: TimeSplit::Lumped,
        audit: true,
        output: None,
        domain,
        switch: ContactSwitch::default(),
        problem,
    }
}

fn unit(x_d: f64) -> Domain {
    Domain {
        x_min: 0.0,
        x_max: 1.0,
        x_d,
    }
}

fn mixture_side(alpha1: f64, p: f64) -> MixturePrimitive {
    MixturePrimitive {
        alpha1,
        rho1: 1185.0,
        rho2: 3622.0,
        u: 0.0,
        p,
    }
}

/// Configuration of a built-in case.
pub fn builtin(name: &str) -> Result<RunConfig> {
    let cfg = match name {
        "euler_strong_shock" => base(
            name,
            5000,
            45e-6,
            unit(0.5),
            Problem::Riemann {
                eos: AIR,
                left: Primitive::new(100.0, 0.0, 1e9),
                right: Primitive::new(1.0, 0.0, 1e5),
            },
        ),
        "cochran_contact" => base(
            name,
            1000,
            1e-4,
            unit(0.5),
            Problem::Riemann {
                eos: EosModel::cochran_chan_reference(),
                left: Primitive::new(1134.0, 1000.0, 20e9),
                right: Primitive::new(500.0, 1000.0, 20e9),
            },
        ),
        "cochran_riemann" => base(
            name,
            1000,
            50e-6,
            unit(0.5),
            Problem::Riemann {
                eos: EosModel::cochran_chan_reference(),
                left: Primitive::new(1134.0, 0.0, 2e10),
                right: Primitive::new(120.0, 0.0, 2e5),
            },
        ),
        "epoxy_spinel" => base(
            name,
            1000,
            29e-6,
            unit(0.6),
            Problem::Mixture {
                phase1: EPOXY,
                phase2: SPINEL,
                left: mixture_side(0.5954, 2e11),
                right: mixture_side(0.5954, 1e5),
            },
        ),
        "mixed_eos" => base(
            name,
            1000,
            29e-6,
            unit(0.6),
            Problem::Mixture {
                phase1: EPOXY,
                phase2: EosModel::cochran_chan_reference(),
                left: mixture_side(0.5954, 2e11),
                right: mixture_side(0.2, 1e5),
            },
        ),
        "sod" => base(
            name,
            400,
            0.2,
            unit(0.5),
            Problem::Riemann {
                eos: AIR,
                left: Primitive::new(1.0, 0.0, 1.0),
                right: Primitive::new(0.125, 0.0, 0.1),
            },
        ),
        "contact_perfect_gas" => {
            let mut cfg = base(
                name,
                200,
                1.0,
                unit(0.3),
                Problem::Riemann {
                    eos: AIR,
                    left: Primitive::new(1.0, 100.0, 1e5),
                    right: Primitive::new(0.1, 100.0, 1e5),
                },
            );
            cfg.steps = Some(1000);
            cfg
        }
        "acoustic_pulse" => base(
            name,
            400,
            0.15,
            unit(0.5),
            Problem::AcousticPulse {
                eos: AIR,
                rho0: 1.0,
                p0: 1.0,
                amplitude: 0.01,
                width: 0.3,
            },
        ),
        "density_wave" => base(
            name,
            400,
            0.3,
            unit(0.35),
            Problem::DensityWave {
                eos: AIR,
                rho0: 1.0,
                u0: 1.0,
                p0: 1.0,
                amplitude: 0.2,
                width: 0.3,
            },
        ),
        _ => {
            let known: Vec<&str> = CASES.iter().map(|(n, _)| *n).collect();
            return Err(Error::config(format!(
                "unknown case '{name}', expected one of {}",
                known.join(", ")
            )));
        }
    };
    Ok(cfg)
}
