//! Equations of state in closed form.
//!
//! Internal energy is always per unit volume (`e`, J/m³), so that the total
//! energy reads `E = e + ½ρu²`. Models whose natural variable is the specific
//! energy `ε = e/ρ` (Cochran–Chan) convert at this boundary.
//!
//! Every model here is linear in pressure at fixed density,
//! `e(ρ, p) = p/κ + g(ρ)` with a constant `κ = ∂p/∂e`, which is what makes the
//! divided-difference partials of the pressure formulation explicit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed-form thermodynamics for the supported material families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EosModel {
    /// `p = (γ − 1) e`
    PerfectGas { gamma: f64 },
    /// `p = (γ − 1) e − γ p∞`
    StiffenedGas { gamma: f64, p_inf: f64 },
    /// Mie–Grüneisen form `p = Γρ(ε − ε₀(ρ)) + p₀(ρ)` with the Cochran–Chan
    /// reference curves.
    CochranChan {
        rho0: f64,
        #[serde(rename = "A1")]
        a1: f64,
        #[serde(rename = "E1")]
        e1: f64,
        #[serde(rename = "A2")]
        a2: f64,
        #[serde(rename = "E2")]
        e2: f64,
        #[serde(rename = "Gamma")]
        grueneisen: f64,
    },
}

/// A thermodynamic state with mutually consistent `p` and `e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoPoint {
    pub rho: f64,
    pub p: f64,
    pub e: f64,
}

impl ThermoPoint {
    pub fn from_rho_p(eos: &EosModel, rho: f64, p: f64) -> Result<Self> {
        let e = eos.energy_from_pressure(rho, p)?;
        Ok(Self { rho, p, e })
    }
}

/// `(∂e/∂ρ at fixed p, ∂e/∂p at fixed ρ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyPartials {
    pub de_drho: f64,
    pub de_dp: f64,
}

impl EosModel {
    pub const fn perfect_gas(gamma: f64) -> Self {
        EosModel::PerfectGas { gamma }
    }

    pub const fn stiffened_gas(gamma: f64, p_inf: f64) -> Self {
        EosModel::StiffenedGas { gamma, p_inf }
    }

    /// Cochran–Chan parameters of the reference explosive-product material
    /// (ρ₀ = 1134 kg/m³, A₁ = 0.819181 GPa, E₁ = 4.52969, A₂ = 1.50835 GPa,
    /// E₂ = 1.42144, Γ = 1.19).
    pub const fn cochran_chan_reference() -> Self {
        EosModel::CochranChan {
            rho0: 1134.0,
            a1: 0.819181e9,
            e1: 4.52969,
            a2: 1.50835e9,
            e2: 1.42144,
            grueneisen: 1.19,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |cond: bool, msg: &str| {
            if cond {
                Ok(())
            } else {
                Err(Error::config(format!("{msg} in {self:?}")))
            }
        };
        match *self {
            EosModel::PerfectGas { gamma } => {
                ok(gamma.is_finite() && gamma > 1.0, "gamma must exceed 1")
            }
            EosModel::StiffenedGas { gamma, p_inf } => {
                ok(gamma.is_finite() && gamma > 1.0, "gamma must exceed 1")?;
                ok(
                    p_inf.is_finite() && p_inf >= 0.0,
                    "p_inf must be non-negative",
                )
            }
            EosModel::CochranChan {
                rho0,
                a1,
                e1,
                a2,
                e2,
                grueneisen,
            } => {
                ok(rho0.is_finite() && rho0 > 0.0, "rho0 must be positive")?;
                ok(a1.is_finite() && a2.is_finite(), "A1, A2 must be finite")?;
                ok(e1.is_finite() && e1 != 1.0, "E1 must differ from 1")?;
                ok(e2.is_finite() && e2 != 1.0, "E2 must differ from 1")?;
                ok(
                    grueneisen.is_finite() && grueneisen > 0.0,
                    "Gamma must be positive",
                )
            }
        }
    }

    /// `κ = ∂p/∂e` at fixed density (constant for every supported model).
    pub fn kappa(&self) -> f64 {
        match *self {
            EosModel::PerfectGas { gamma } | EosModel::StiffenedGas { gamma, .. } => gamma - 1.0,
            EosModel::CochranChan { grueneisen, .. } => grueneisen,
        }
    }

    /// Density-only part `g(ρ)` of `e(ρ, p) = p/κ + g(ρ)` and its derivative.
    fn offset(&self, rho: f64) -> (f64, f64) {
        match *self {
            EosModel::PerfectGas { .. } => (0.0, 0.0),
            EosModel::StiffenedGas { gamma, p_inf } => (gamma * p_inf / (gamma - 1.0), 0.0),
            EosModel::CochranChan {
                rho0,
                a1,
                e1,
                a2,
                e2,
                grueneisen,
            } => {
                let x = rho / rho0;
                let x1 = x.powf(e1);
                let x2 = x.powf(e2);
                // ρε₀(ρ) and p₀(ρ)
                let cold_energy = a1 / (e1 - 1.0) * x1 - a2 / (e2 - 1.0) * x2;
                let cold_pressure = a1 * x1 - a2 * x2;
                let d_cold_energy = (a1 * e1 / (e1 - 1.0) * x1 - a2 * e2 / (e2 - 1.0) * x2) / rho;
                let d_cold_pressure = (a1 * e1 * x1 - a2 * e2 * x2) / rho;
                (
                    cold_energy - cold_pressure / grueneisen,
                    d_cold_energy - d_cold_pressure / grueneisen,
                )
            }
        }
    }

    /// Cochran–Chan reference curves `(ε₀(ρ), p₀(ρ))`; `None` for the gas models.
    pub fn reference_curves(&self, rho: f64) -> Option<(f64, f64)> {
        match *self {
            EosModel::CochranChan {
                rho0,
                a1,
                e1,
                a2,
                e2,
                ..
            } => {
                let x = rho / rho0;
                let eps0 = a1 / (rho0 * (e1 - 1.0)) * x.powf(e1 - 1.0)
                    - a2 / (rho0 * (e2 - 1.0)) * x.powf(e2 - 1.0);
                let p0 = a1 * x.powf(e1) - a2 * x.powf(e2);
                Some((eps0, p0))
            }
            _ => None,
        }
    }

    fn check_density(rho: f64) -> Result<()> {
        if rho > 0.0 && rho.is_finite() {
            Ok(())
        } else {
            Err(Error::domain(format!("non-positive density {rho:e}")))
        }
    }

    pub fn pressure_from_energy(&self, rho: f64, e: f64) -> Result<f64> {
        Self::check_density(rho)?;
        match *self {
            EosModel::PerfectGas { gamma } => Ok((gamma - 1.0) * e),
            EosModel::StiffenedGas { gamma, p_inf } => Ok((gamma - 1.0) * e - gamma * p_inf),
            EosModel::CochranChan { grueneisen, .. } => {
                let (eps0, p0) = self.reference_curves(rho).expect("cochran-chan");
                let eps = e / rho;
                Ok(grueneisen * rho * (eps - eps0) + p0)
            }
        }
    }

    pub fn energy_from_pressure(&self, rho: f64, p: f64) -> Result<f64> {
        Self::check_density(rho)?;
        match *self {
            EosModel::PerfectGas { gamma } => Ok(p / (gamma - 1.0)),
            EosModel::StiffenedGas { gamma, p_inf } => Ok((p + gamma * p_inf) / (gamma - 1.0)),
            EosModel::CochranChan { grueneisen, .. } => {
                let (eps0, p0) = self.reference_curves(rho).expect("cochran-chan");
                Ok(rho * ((p - p0) / (grueneisen * rho) + eps0))
            }
        }
    }

    /// Analytic `∂e/∂ρ|_p` and `∂e/∂p|_ρ`.
    pub fn energy_partials(&self, rho: f64, _p: f64) -> Result<EnergyPartials> {
        Self::check_density(rho)?;
        let (_, dg) = self.offset(rho);
        Ok(EnergyPartials {
            de_drho: dg,
            de_dp: 1.0 / self.kappa(),
        })
    }

    /// `∂p/∂ρ` at fixed volumetric energy.
    pub fn chi(&self, rho: f64) -> Result<f64> {
        Self::check_density(rho)?;
        let (_, dg) = self.offset(rho);
        Ok(-self.kappa() * dg)
    }

    /// `c² = χ + κ (e + p)/ρ`; reduces to `κh` when `χ = 0` (the gas models).
    pub fn sound_speed_squared(&self, rho: f64, p: f64) -> Result<f64> {
        let e = self.energy_from_pressure(rho, p)?;
        let c2 = self.chi(rho)? + self.kappa() * (e + p) / rho;
        Ok(c2)
    }

    pub fn sound_speed(&self, rho: f64, p: f64) -> Result<f64> {
        let c2 = self.sound_speed_squared(rho, p)?;
        if c2 > 0.0 && c2.is_finite() {
            Ok(c2.sqrt())
        } else {
            Err(Error::Hyperbolicity { rho, p, c2 })
        }
    }

    /// Specific internal energy `ε = e/ρ`.
    pub fn specific_energy(&self, rho: f64, p: f64) -> Result<f64> {
        Ok(self.energy_from_pressure(rho, p)? / rho)
    }
}

/// Relative size below which an increment is treated as zero.
const DEGENERATE_INCREMENT: f64 = 1e-12;

/// Divided-difference approximations of `∂e/∂ρ` and `∂e/∂p` between two states.
///
/// For every `lambda` the result satisfies
/// `de_dp (p_new − p_old) + de_drho (ρ_new − ρ_old) = e(new) − e(old)`.
/// A vanishing pressure (density) increment falls back to the analytic
/// derivative at `old`.
pub fn divided_difference_partials(
    eos: &EosModel,
    old: &ThermoPoint,
    new: &ThermoPoint,
    lambda: f64,
) -> Result<EnergyPartials> {
    let analytic = eos.energy_partials(old.rho, old.p)?;
    let dp = new.p - old.p;
    let drho = new.rho - old.rho;
    let dp_degenerate = dp.abs() <= DEGENERATE_INCREMENT * (old.p.abs() + new.p.abs() + 1.0);
    let drho_degenerate =
        drho.abs() <= DEGENERATE_INCREMENT * (old.rho.abs() + new.rho.abs() + 1.0);

    let e_nn = eos.energy_from_pressure(new.rho, new.p)?;
    let e_oo = eos.energy_from_pressure(old.rho, old.p)?;
    // corners: pressure at one level, density at the other
    let e_po_rn = eos.energy_from_pressure(new.rho, old.p)?;
    let e_pn_ro = eos.energy_from_pressure(old.rho, new.p)?;

    let de_dp = if dp_degenerate {
        analytic.de_dp
    } else {
        lambda * (e_nn - e_po_rn) / dp + (1.0 - lambda) * (e_pn_ro - e_oo) / dp
    };
    let de_drho = if drho_degenerate {
        analytic.de_drho
    } else {
        lambda * (e_po_rn - e_oo) / drho + (1.0 - lambda) * (e_nn - e_pn_ro) / drho
    };
    Ok(EnergyPartials { de_drho, de_dp })
}
