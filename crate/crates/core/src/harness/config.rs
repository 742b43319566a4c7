//! Run configuration and its TOML representation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::eos::EosModel;
use crate::error::{Error, Result};
use crate::euler::{ContactSwitch, Formulation};
use crate::multiphase::PhasePair;
use crate::rd::{Order, TimeSplit};
use crate::riemann::{MixturePrimitive, Primitive};

/// Spatial extent of a run, in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub x_min: f64,
    pub x_max: f64,
    /// Position of the initial discontinuity or pulse centre.
    pub x_d: f64,
}

/// Initial data. States are primitive: density kg/m³, velocity m/s, pressure Pa.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Problem {
    /// Single-material shock tube.
    Riemann {
        eos: EosModel,
        left: Primitive,
        right: Primitive,
    },
    /// Two-phase shock tube for the five-equation model.
    Mixture {
        phase1: EosModel,
        phase2: EosModel,
        left: MixturePrimitive,
        right: MixturePrimitive,
    },
    /// Acoustic bump at rest: `ρ = ρ₀(1 + A b(x))`, `p − p₀ = c₀²(ρ − ρ₀)`, with
    /// `b` a compact cos⁸ bump of half-width `width` (m) centred on `x_d`.
    AcousticPulse {
        eos: EosModel,
        rho0: f64,
        p0: f64,
        amplitude: f64,
        width: f64,
    },
    /// Density bump `ρ = ρ₀(1 + A b(x))` advected at uniform `u0`, `p0`.
    DensityWave {
        eos: EosModel,
        rho0: f64,
        u0: f64,
        p0: f64,
        amplitude: f64,
        width: f64,
    },
}

impl Problem {
    pub fn is_multiphase(&self) -> bool {
        matches!(self, Problem::Mixture { .. })
    }

    pub fn pair(&self) -> Option<PhasePair> {
        match *self {
            Problem::Mixture { phase1, phase2, .. } => Some(PhasePair { phase1, phase2 }),
            _ => None,
        }
    }

    /// EOS of a single-material problem.
    pub fn eos(&self) -> Option<EosModel> {
        match *self {
            Problem::Riemann { eos, .. }
            | Problem::AcousticPulse { eos, .. }
            | Problem::DensityWave { eos, .. } => Some(eos),
            Problem::Mixture { .. } => None,
        }
    }
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Case name, used for output file names and the plot title.
    pub case: String,
    /// Ignored by multiphase problems, which always evolve the pressure.
    pub formulation: Formulation,
    pub n_cells: usize,
    pub cfl: f64,
    /// Final time in seconds; the last step is shortened to land on it.
    pub t_final: f64,
    /// Run exactly this many steps instead of stopping at `t_final`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    /// 1 or 2.
    pub order: u32,
    /// Characteristic blending of the Rusanov residuals.
    #[serde(default = "default_true")]
    pub limiting: bool,
    /// Energy-conservation correction (energy and pressure formulations).
    #[serde(default = "default_true")]
    pub correction: bool,
    #[serde(default)]
    pub time_split: TimeSplit,
    /// Record the per-step conservation audit.
    #[serde(default = "default_true")]
    pub audit: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub domain: Domain,
    #[serde(default)]
    pub switch: ContactSwitch,
    pub problem: Problem,
}

fn default_true() -> bool {
    true
}

impl RunConfig {
    pub fn order(&self) -> Result<Order> {
        Order::from_int(self.order)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(format!(
                    "{name} must be positive and finite, got {v:e}"
                )))
            }
        };
        positive(self.t_final, "t_final")?;
        positive(self.cfl, "cfl")?;
        if self.cfl > 1.0 {
            return Err(Error::config(format!("cfl {} exceeds 1", self.cfl)));
        }
        if self.n_cells < 2 {
            return Err(Error::config("n_cells must be at least 2"));
        }
        self.order()?;
        let d = &self.domain;
        if !(d.x_min < d.x_max && d.x_d >= d.x_min && d.x_d <= d.x_max) {
            return Err(Error::config(format!("inconsistent domain {d:?}")));
        }
        positive(self.switch.eps, "switch.eps")?;
        positive(self.switch.eps1, "switch.eps1")?;
        let gas = |eos: &EosModel, s: &Primitive| -> Result<()> {
            eos.validate()?;
            positive(s.rho, "density")?;
            eos.sound_speed(s.rho, s.p).map(|_| ())
        };
        match &self.problem {
            Problem::Riemann { eos, left, right } => {
                gas(eos, left)?;
                gas(eos, right)
            }
            Problem::Mixture {
                phase1,
                phase2,
                left,
                right,
            } => {
                let pair = PhasePair {
                    phase1: *phase1,
                    phase2: *phase2,
                };
                pair.validate()?;
                for s in [left, right] {
                    crate::multiphase::encode(&pair, s.alpha1, s.rho1, s.rho2, s.u, s.p)?;
                }
                Ok(())
            }
            Problem::AcousticPulse {
                eos,
                rho0,
                p0,
                amplitude,
                width,
            } => {
                positive(*width, "width")?;
                if amplitude.abs() >= 1.0 {
                    return Err(Error::config("pulse amplitude must stay below 1"));
                }
                gas(eos, &Primitive::new(*rho0, 0.0, *p0))
            }
            Problem::DensityWave {
                eos,
                rho0,
                u0,
                p0,
                amplitude,
                width,
            } => {
                positive(*width, "width")?;
                if amplitude.abs() >= 1.0 {
                    return Err(Error::config("density amplitude must stay below 1"));
                }
                gas(eos, &Primitive::new(*rho0, *u0, *p0))
            }
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(format!("cannot serialise config: {e}")))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self =
            toml::from_str(text).map_err(|e| Error::config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml()?).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }
}
