//! Five-equation two-phase model: volume fraction `α₁`, partial densities
//! `α₁ρ₁`, `α₂ρ₂`, mixture momentum `ρu` and the common pressure `p`.
//!
//! Both phases share `u` and `p`. The volume fraction is advected
//! nonconservatively, `∂α₁/∂t + u ∂α₁/∂x = K ∂u/∂x`, and the pressure equation
//! is closed with the mixture (Wood) sound speed. As in the single-phase
//! pressure formulation, a per-element pressure shift makes the implied
//! mixture total-energy residuals sum to the conservative element total.

use nalgebra::{SVector, Vector5};
use serde::{Deserialize, Serialize};

use crate::eos::EosModel;
use crate::error::{Error, Result};
use crate::euler::{ContactSwitch, StageVelocities};
use crate::mesh::Variables;
use crate::rd::{
    advance_components, assemble, blend_residuals, multiphase_eigensystem, rusanov_residuals,
    ElementResidual, MultiphaseEigenInput, StageAudit, StageContext, StageScheme, TimeSplit,
};

/// Volume fractions are kept in `[ALPHA_CLIP, 1 − ALPHA_CLIP]`.
pub const ALPHA_CLIP: f64 = 1e-8;
/// Excursions of `α₁` outside `[0, 1]` larger than this are a step failure.
pub const ALPHA_TOLERANCE: f64 = 1e-6;

/// Component indices of the multiphase unknowns.
pub const ALPHA1: usize = 0;
pub const MASS1: usize = 1;
pub const MASS2: usize = 2;
pub const MOMENTUM: usize = 3;
pub const PRESSURE: usize = 4;

/// The two materials of the mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePair {
    pub phase1: EosModel,
    pub phase2: EosModel,
}

/// Wood's mixture sound speed, `1/(ρc²) = α₁/(ρ₁c₁²) + α₂/(ρ₂c₂²)`, returned as `ρc²`.
pub fn mixture_stiffness(alpha1: f64, rc2_1: f64, rc2_2: f64) -> f64 {
    1.0 / (alpha1 / rc2_1 + (1.0 - alpha1) / rc2_2)
}

/// Mixture sound speed from phase densities and squared phase sound speeds.
pub fn mixture_sound_speed(
    alpha1: f64,
    rho1: f64,
    c1_sq: f64,
    rho2: f64,
    c2_sq: f64,
) -> Result<f64> {
    if !(c1_sq > 0.0 && c2_sq > 0.0 && rho1 > 0.0 && rho2 > 0.0) {
        return Err(Error::domain(format!(
            "phase states not hyperbolic: rho = ({rho1:e}, {rho2:e}), c^2 = ({c1_sq:e}, {c2_sq:e})"
        )));
    }
    let rho = alpha1 * rho1 + (1.0 - alpha1) * rho2;
    Ok((mixture_stiffness(alpha1, rho1 * c1_sq, rho2 * c2_sq) / rho).sqrt())
}

/// `K = (ρ₂c₂² − ρ₁c₁²) / (ρ₁c₁²/α₁ + ρ₂c₂²/α₂)`.
pub fn kapila_coefficient(alpha1: f64, rc2_1: f64, rc2_2: f64) -> f64 {
    let a1 = alpha1.clamp(ALPHA_CLIP, 1.0 - ALPHA_CLIP);
    (rc2_2 - rc2_1) / (rc2_1 / a1 + rc2_2 / (1.0 - a1))
}

/// Partial derivatives of the mixture pressure at fixed mixture internal energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureDerivatives {
    /// `∂p/∂e` with `1/κ = Σ α_j/κ_j`.
    pub kappa: f64,
    /// `∂p/∂(α₁ρ₁) = χ₁κ/κ₁`.
    pub dp_da1: f64,
    /// `∂p/∂(α₂ρ₂) = χ₂κ/κ₂`.
    pub dp_da2: f64,
    /// `∂p/∂α₁ = −κ(ρ₁c₁²/κ₁ − ρ₂c₂²/κ₂)`.
    pub dp_dalpha1: f64,
}

impl PhasePair {
    pub fn validate(&self) -> Result<()> {
        self.phase1.validate()?;
        self.phase2.validate()
    }

    fn phase_densities(alpha1: f64, a1: f64, a2: f64) -> Result<(f64, f64)> {
        if !(alpha1 > 0.0 && alpha1 < 1.0) {
            return Err(Error::domain(format!(
                "volume fraction {alpha1:e} outside (0, 1)"
            )));
        }
        let (r1, r2) = (a1 / alpha1, a2 / (1.0 - alpha1));
        if !(r1 > 0.0 && r2 > 0.0 && r1.is_finite() && r2.is_finite()) {
            return Err(Error::domain(format!(
                "non-positive phase density ({r1:e}, {r2:e})"
            )));
        }
        Ok((r1, r2))
    }

    /// `1/κ = α₁/κ₁ + α₂/κ₂`.
    pub fn inverse_kappa(&self, alpha1: f64) -> f64 {
        alpha1 / self.phase1.kappa() + (1.0 - alpha1) / self.phase2.kappa()
    }

    /// Mixture internal energy per unit volume `α₁e₁(ρ₁, p) + α₂e₂(ρ₂, p)`.
    pub fn mixture_energy(&self, alpha1: f64, a1: f64, a2: f64, p: f64) -> Result<f64> {
        let (r1, r2) = Self::phase_densities(alpha1, a1, a2)?;
        Ok(alpha1 * self.phase1.energy_from_pressure(r1, p)?
            + (1.0 - alpha1) * self.phase2.energy_from_pressure(r2, p)?)
    }

    /// Pressure at which the phases at equal pressure hold mixture energy `e`.
    pub fn mixture_pressure(&self, alpha1: f64, a1: f64, a2: f64, e: f64) -> Result<f64> {
        // e is affine in p: e = p/κ + e(p = 0)
        let e0 = self.mixture_energy(alpha1, a1, a2, 0.0)?;
        Ok((e - e0) / self.inverse_kappa(alpha1))
    }

    pub fn mixture_pressure_partials(
        &self,
        alpha1: f64,
        a1: f64,
        a2: f64,
        p: f64,
    ) -> Result<MixtureDerivatives> {
        let (r1, r2) = Self::phase_densities(alpha1, a1, a2)?;
        let (k1, k2) = (self.phase1.kappa(), self.phase2.kappa());
        let kappa = 1.0 / self.inverse_kappa(alpha1);
        let rc2_1 = r1 * self.phase1.sound_speed_squared(r1, p)?;
        let rc2_2 = r2 * self.phase2.sound_speed_squared(r2, p)?;
        Ok(MixtureDerivatives {
            kappa,
            dp_da1: self.phase1.chi(r1)? * kappa / k1,
            dp_da2: self.phase2.chi(r2)? * kappa / k2,
            dp_dalpha1: -kappa * (rc2_1 / k1 - rc2_2 / k2),
        })
    }
}

/// Everything known about one DOF of the mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixturePoint {
    pub alpha1: f64,
    pub a1: f64,
    pub a2: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub u: f64,
    pub p: f64,
    /// Mixture internal energy per unit volume.
    pub e: f64,
    pub rc2_1: f64,
    pub rc2_2: f64,
    /// Wood `ρc²`.
    pub rc2: f64,
    pub kapila: f64,
}

impl MixturePoint {
    pub fn rho(&self) -> f64 {
        self.a1 + self.a2
    }

    /// Mass fraction of phase 1.
    pub fn y1(&self) -> f64 {
        self.a1 / self.rho()
    }

    pub fn c(&self) -> f64 {
        (self.rc2 / self.rho()).sqrt()
    }

    pub fn wave_speed(&self) -> f64 {
        self.u.abs() + self.c()
    }

    pub fn total_energy(&self) -> f64 {
        self.e + 0.5 * self.rho() * self.u * self.u
    }

    /// Fluxes of the conserved components `(α₁ρ₁u, α₂ρ₂u, ρu² + p)` in their slots.
    pub fn flux(&self) -> Vector5<f64> {
        let m = self.rho() * self.u;
        Vector5::new(
            0.0,
            self.a1 * self.u,
            self.a2 * self.u,
            m * self.u + self.p,
            0.0,
        )
    }

    pub fn energy_flux(&self) -> f64 {
        (self.total_energy() + self.p) * self.u
    }
}

/// Recovers the mixture state from `(α₁, α₁ρ₁, α₂ρ₂, ρu, p)`.
pub fn decode(pair: &PhasePair, v: &Vector5<f64>) -> Result<MixturePoint> {
    let (alpha1, a1, a2, p) = (v[ALPHA1], v[MASS1], v[MASS2], v[PRESSURE]);
    let (rho1, rho2) = PhasePair::phase_densities(alpha1, a1, a2)?;
    let rho = a1 + a2;
    let u = v[MOMENTUM] / rho;
    let e1 = pair.phase1.energy_from_pressure(rho1, p)?;
    let e2 = pair.phase2.energy_from_pressure(rho2, p)?;
    let c1_sq = pair.phase1.chi(rho1)? + pair.phase1.kappa() * (e1 + p) / rho1;
    let c2_sq = pair.phase2.chi(rho2)? + pair.phase2.kappa() * (e2 + p) / rho2;
    if !(c1_sq > 0.0 && c1_sq.is_finite()) {
        return Err(Error::Hyperbolicity {
            rho: rho1,
            p,
            c2: c1_sq,
        });
    }
    if !(c2_sq > 0.0 && c2_sq.is_finite()) {
        return Err(Error::Hyperbolicity {
            rho: rho2,
            p,
            c2: c2_sq,
        });
    }
    let (rc2_1, rc2_2) = (rho1 * c1_sq, rho2 * c2_sq);
    Ok(MixturePoint {
        alpha1,
        a1,
        a2,
        rho1,
        rho2,
        u,
        p,
        e: alpha1 * e1 + (1.0 - alpha1) * e2,
        rc2_1,
        rc2_2,
        rc2: mixture_stiffness(alpha1, rc2_1, rc2_2),
        kapila: kapila_coefficient(alpha1, rc2_1, rc2_2),
    })
}

/// Unknowns of a mixture at `(α₁, ρ₁, ρ₂, u, p)`.
pub fn encode(
    pair: &PhasePair,
    alpha1: f64,
    rho1: f64,
    rho2: f64,
    u: f64,
    p: f64,
) -> Result<Vector5<f64>> {
    let (a1, a2) = (alpha1 * rho1, (1.0 - alpha1) * rho2);
    let v = Vector5::new(alpha1, a1, a2, (a1 + a2) * u, p);
    decode(pair, &v)?;
    Ok(v)
}

/// `∫_K (u ∂α₁/∂x − K ∂u/∂x)` for P¹ data.
pub fn volume_fraction_space_term(a: &MixturePoint, b: &MixturePoint) -> f64 {
    0.5 * (a.u + b.u) * (b.alpha1 - a.alpha1) - 0.5 * (a.kapila + b.kapila) * (b.u - a.u)
}

/// `∫_K (u ∂p/∂x + ρc² ∂u/∂x)` for P¹ data, with the Wood `ρc²`.
pub fn mixture_pressure_space_term(a: &MixturePoint, b: &MixturePoint) -> f64 {
    0.5 * (a.u + b.u) * (b.p - a.p) + 0.5 * (a.rc2 + b.rc2) * (b.u - a.u)
}

/// Coefficients turning the stage residuals of one DOF into its mixture
/// internal-energy residual.
///
/// They are divided differences of `e(α₁, α₁ρ₁, α₂ρ₂, p)` along the path that
/// changes `α₁ρ₁`, then `α₂ρ₂`, then `α₁` (at the old pressure), then `p`.
/// The last leg is exact with coefficient `1/κ(α₁^new)` because the mixture
/// energy is affine in `p`; the others fall back to the analytic derivative
/// when their increment vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyPathPartials {
    pub de_da1: f64,
    pub de_da2: f64,
    pub de_dalpha1: f64,
    pub de_dp: f64,
}

const DEGENERATE_INCREMENT: f64 = 1e-12;

pub fn energy_path_partials(
    pair: &PhasePair,
    old: &MixturePoint,
    alpha1: f64,
    a1: f64,
    a2: f64,
) -> Result<EnergyPathPartials> {
    let p = old.p;
    let e0 = old.e;
    let e1 = pair.mixture_energy(old.alpha1, a1, old.a2, p)?;
    let e2 = pair.mixture_energy(old.alpha1, a1, a2, p)?;
    let e3 = pair.mixture_energy(alpha1, a1, a2, p)?;
    let small = |d: f64, x: f64, y: f64| d.abs() <= DEGENERATE_INCREMENT * (x.abs() + y.abs());

    let (k1, k2) = (pair.phase1.kappa(), pair.phase2.kappa());
    let de_da1 = if small(a1 - old.a1, a1, old.a1) {
        -pair.phase1.chi(old.rho1)? / k1
    } else {
        (e1 - e0) / (a1 - old.a1)
    };
    let de_da2 = if small(a2 - old.a2, a2, old.a2) {
        -pair.phase2.chi(old.rho2)? / k2
    } else {
        (e2 - e1) / (a2 - old.a2)
    };
    let de_dalpha1 = if small(alpha1 - old.alpha1, alpha1, old.alpha1) {
        let d = pair.mixture_pressure_partials(old.alpha1, a1, a2, p)?;
        -d.dp_dalpha1 / d.kappa
    } else {
        (e3 - e2) / (alpha1 - old.alpha1)
    };
    Ok(EnergyPathPartials {
        de_da1,
        de_da2,
        de_dalpha1,
        de_dp: pair.inverse_kappa(alpha1),
    })
}

impl EnergyPathPartials {
    /// Mixture internal-energy residual implied by one DOF's residual vector.
    pub fn internal(&self, phi: &Vector5<f64>) -> f64 {
        self.de_dalpha1 * phi[ALPHA1]
            + self.de_da1 * phi[MASS1]
            + self.de_da2 * phi[MASS2]
            + self.de_dp * phi[PRESSURE]
    }

    fn internal_magnitude(&self, phi: &Vector5<f64>) -> f64 {
        (self.de_dalpha1 * phi[ALPHA1]).abs()
            + (self.de_da1 * phi[MASS1]).abs()
            + (self.de_da2 * phi[MASS2]).abs()
            + (self.de_dp * phi[PRESSURE]).abs()
    }
}

/// Mixture total-energy residuals implied by multiphase residuals.
pub fn reconstruct_total_energy(
    res: &ElementResidual<5>,
    vel: &[StageVelocities; 2],
    partials: &[EnergyPathPartials; 2],
) -> [f64; 2] {
    [0, 1].map(|s| {
        let d = &res.dofs[s];
        partials[s].internal(d) + vel[s].kinetic(d[MASS1] + d[MASS2], d[MOMENTUM])
    })
}

/// Stage operator for the two-phase model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiphaseScheme {
    pub pair: PhasePair,
    pub limiting: bool,
    pub time_split: TimeSplit,
    pub correction: bool,
    pub switch: ContactSwitch,
}

impl MultiphaseScheme {
    pub fn new(pair: PhasePair) -> Self {
        Self {
            pair,
            limiting: true,
            time_split: TimeSplit::Lumped,
            correction: true,
            switch: ContactSwitch::default(),
        }
    }

    fn decode_all(&self, values: &[Vector5<f64>]) -> Result<Vec<MixturePoint>> {
        values.iter().map(|v| decode(&self.pair, v)).collect()
    }
}

fn relative(defect: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        defect.abs() / scale
    } else {
        defect.abs()
    }
}

impl StageScheme<5> for MultiphaseScheme {
    fn variables(&self) -> Variables {
        Variables::Multiphase
    }

    fn wave_speed(&self, v: &SVector<f64, 5>) -> Result<f64> {
        Ok(decode(&self.pair, v)?.wave_speed())
    }

    fn admissible(&self, v: &SVector<f64, 5>) -> std::result::Result<(), String> {
        if !(ALPHA_CLIP..=1.0 - ALPHA_CLIP).contains(&v[ALPHA1]) {
            return Err(format!(
                "volume fraction {:e} outside the clipping range",
                v[ALPHA1]
            ));
        }
        decode(&self.pair, v).map(|_| ()).map_err(|e| e.to_string())
    }

    fn stage(
        &self,
        ctx: &StageContext<'_, 5>,
        audit: &mut StageAudit,
    ) -> Result<Vec<Vector5<f64>>> {
        let mesh = ctx.mesh;
        let h = mesh.h();
        let dt = ctx.time_step();
        let cur = self.decode_all(ctx.current)?;
        let ini = if ctx.stage == 0 {
            cur.clone()
        } else {
            self.decode_all(ctx.initial)?
        };
        let avg: Vec<Vector5<f64>> = ctx
            .current
            .iter()
            .zip(ctx.initial)
            .map(|(a, b)| (a + b) * 0.5)
            .collect();
        let mid = self.decode_all(&avg)?;

        let mut residuals = Vec::with_capacity(mesh.n_cells());
        let mut energy = Vec::with_capacity(mesh.n_cells());
        for k in 0..mesh.n_cells() {
            let (c, i0) = ctx.element_values(k);
            let cur_k = [cur[k], cur[k + 1]];
            let ini_k = [ini[k], ini[k + 1]];
            let mut space =
                ((ini_k[1].flux() - ini_k[0].flux()) + (cur_k[1].flux() - cur_k[0].flux())) * 0.5;
            space[ALPHA1] = volume_fraction_space_term(&mid[k], &mid[k + 1]);
            space[PRESSURE] = mixture_pressure_space_term(&mid[k], &mid[k + 1]);
            let alpha = cur_k
                .iter()
                .chain(&ini_k)
                .map(MixturePoint::wave_speed)
                .fold(0.0, f64::max);
            let mut res = rusanov_residuals(k, h, &c, &i0, dt, &space, alpha, self.time_split);
            if self.limiting {
                let m = decode(&self.pair, &((avg[k] + avg[k + 1]) * 0.5))?;
                let eig = multiphase_eigensystem(&MultiphaseEigenInput {
                    alpha1: m.alpha1,
                    a1: m.a1,
                    a2: m.a2,
                    u: m.u,
                    p: m.p,
                    c: m.c(),
                    kapila: m.kapila,
                })?;
                res = blend_residuals(&res, &eig);
            }

            // element total of the mixture total energy, and its round-off scale
            let fluxes = [
                ini_k[1].energy_flux(),
                -ini_k[0].energy_flux(),
                cur_k[1].energy_flux(),
                -cur_k[0].energy_flux(),
            ];
            let mut total = 0.5 * fluxes.iter().sum::<f64>();
            let mut magnitude = 0.5 * fluxes.iter().map(|f| f.abs()).sum::<f64>();
            let mut cons_scale = (cur_k[0].flux().abs()
                + cur_k[1].flux().abs()
                + ini_k[0].flux().abs()
                + ini_k[1].flux().abs())
                * 0.5;
            if let Some(dt) = dt {
                let w = 0.5 * h / dt;
                let terms = [
                    cur_k[0].total_energy(),
                    cur_k[1].total_energy(),
                    -ini_k[0].total_energy(),
                    -ini_k[1].total_energy(),
                ];
                total += w * terms.iter().sum::<f64>();
                magnitude += w * terms.iter().map(|t| t.abs()).sum::<f64>();
                cons_scale += (c[0].abs() + c[1].abs() + i0[0].abs() + i0[1].abs()) * w;
            }
            let diss = ((c[0] + i0[0]).abs() + (c[1] + i0[1]).abs()) * (0.25 * alpha);
            for comp in [MASS1, MASS2, MOMENTUM] {
                let s = res.dofs[0][comp] + res.dofs[1][comp];
                let scale = cons_scale[comp]
                    + diss[comp]
                    + res.dofs[0][comp].abs()
                    + res.dofs[1][comp].abs();
                audit.conserved = audit.conserved.max(relative(s - res.total[comp], scale));
            }
            residuals.push(res);
            energy.push((
                total,
                magnitude + diss[PRESSURE] * self.pair.inverse_kappa(cur[k].alpha1),
            ));
        }
        audit.elements += mesh.n_cells();

        // masses, momentum and volume fraction first
        let sums = assemble(mesh, &residuals);
        let mut next = ctx.current.to_vec();
        advance_components(
            mesh,
            ctx.current,
            &sums,
            ctx.dt,
            &[ALPHA1, MASS1, MASS2, MOMENTUM],
            &mut next,
        );
        let mut vel = Vec::with_capacity(mesh.n_dofs());
        let mut partials = Vec::with_capacity(mesh.n_dofs());
        for (dof, v) in next.iter_mut().enumerate() {
            let alpha1 = v[ALPHA1];
            if !(alpha1 > -ALPHA_TOLERANCE && alpha1 < 1.0 + ALPHA_TOLERANCE) {
                return Err(Error::StepFailure {
                    dof,
                    stage: ctx.stage,
                    reason: format!("volume fraction {alpha1:e} left [0, 1]"),
                });
            }
            let clipped = alpha1.clamp(ALPHA_CLIP, 1.0 - ALPHA_CLIP);
            if clipped != alpha1 {
                v[ALPHA1] = clipped;
                audit.clipped += 1;
            }
            if !(v[MASS1] > 0.0 && v[MASS2] > 0.0) {
                return Err(Error::StepFailure {
                    dof,
                    stage: ctx.stage,
                    reason: format!(
                        "non-positive partial density ({:e}, {:e})",
                        v[MASS1], v[MASS2]
                    ),
                });
            }
            vel.push(StageVelocities {
                u_old: cur[dof].u,
                u_new: v[MOMENTUM] / (v[MASS1] + v[MASS2]),
            });
            partials.push(energy_path_partials(
                &self.pair, &cur[dof], v[ALPHA1], v[MASS1], v[MASS2],
            )?);
        }

        for (res, &(total, magnitude)) in residuals.iter_mut().zip(&energy) {
            let k = res.element;
            let v = [vel[k], vel[k + 1]];
            let d = [partials[k], partials[k + 1]];
            let [a, b] = reconstruct_total_energy(res, &v, &d);
            let defect = total - (a + b);
            let switched = self
                .switch
                .fires([v[0].u_new, v[1].u_new], [cur[k].p, cur[k + 1].p]);
            if self.correction && !switched {
                let denom = d[0].de_dp + d[1].de_dp;
                if !(denom > 0.0 && denom.is_finite()) {
                    return Err(Error::Correction {
                        element: k,
                        reason: format!("sum of de/dp partials is {denom:e}"),
                    });
                }
                let r = defect / denom;
                res.dofs[0][PRESSURE] += r;
                res.dofs[1][PRESSURE] += r;
                res.total[PRESSURE] += 2.0 * r;
            }
            let [a, b] = reconstruct_total_energy(res, &v, &d);
            let scale = magnitude
                + (0..2)
                    .map(|s| {
                        let phi = &res.dofs[s];
                        d[s].internal_magnitude(phi)
                            + (v[s].half() * phi[MOMENTUM]).abs()
                            + (0.5 * v[s].prod() * (phi[MASS1] + phi[MASS2])).abs()
                    })
                    .sum::<f64>();
            let err = relative(a + b - total, scale);
            if switched {
                audit.switched += 1;
                audit.switched_energy = audit.switched_energy.max(err);
            } else {
                audit.energy = audit.energy.max(err);
            }
        }
        let sums = assemble(mesh, &residuals);
        advance_components(mesh, ctx.current, &sums, ctx.dt, &[PRESSURE], &mut next);
        Ok(next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn epoxy_spinel() -> PhasePair {
        PhasePair {
            phase1: EosModel::stiffened_gas(2.43, 5.3e9),
            phase2: EosModel::stiffened_gas(1.62, 141e9),
        }
    }

    #[test]
    fn kapila_hand_value() {
        assert_relative_eq!(
            kapila_coefficient(0.5, 1.0, 3.0),
            0.25,
            max_relative = 1e-15
        );
        assert_eq!(kapila_coefficient(0.3, 2.0, 2.0), 0.0);
        assert!(kapila_coefficient(1e-12, 1.0, 3.0).abs() < 1e-7);
    }

    #[test]
    fn wood_speed_limits() {
        let c = mixture_sound_speed(0.3, 1000.0, 4.0e6, 1000.0, 4.0e6).unwrap();
        assert_relative_eq!(c, 2000.0, max_relative = 1e-14);
        let c = mixture_sound_speed(1.0 - 1e-12, 1000.0, 4.0e6, 3000.0, 9.0e6).unwrap();
        assert_relative_eq!(c, 2000.0, max_relative = 1e-9);
    }

    #[test]
    fn epoxy_spinel_left_state_speed() {
        let pair = epoxy_spinel();
        let (alpha, r1, r2, p): (f64, f64, f64, f64) = (0.5954, 1185.0, 3622.0, 2e11);
        let c1_sq = 2.43 * (p + 5.3e9) / r1;
        let c2_sq = 1.62 * (p + 141e9) / r2;
        let rho = alpha * r1 + (1.0 - alpha) * r2;
        let expected = (1.0 / (rho * (alpha / (r1 * c1_sq) + (1.0 - alpha) / (r2 * c2_sq)))).sqrt();
        let v = encode(&pair, alpha, r1, r2, 0.0, p).unwrap();
        let m = decode(&pair, &v).unwrap();
        assert_relative_eq!(m.c(), expected, max_relative = 1e-13);
        assert_relative_eq!(
            mixture_sound_speed(alpha, r1, c1_sq, r2, c2_sq).unwrap(),
            expected,
            max_relative = 1e-13
        );
    }

    #[test]
    fn identical_phases_have_no_volume_fraction_sensitivity() {
        let eos = EosModel::stiffened_gas(4.4, 6e8);
        let pair = PhasePair {
            phase1: eos,
            phase2: eos,
        };
        let d = pair
            .mixture_pressure_partials(0.3, 0.3 * 1000.0, 0.7 * 1000.0, 1e5)
            .unwrap();
        assert!(d.dp_dalpha1.abs() < 1e-6 * 1e5);
        assert_relative_eq!(d.kappa, 3.4, max_relative = 1e-14);
    }

    #[test]
    fn pure_phase_limit_recovers_single_phase_coefficients() {
        let pair = PhasePair {
            phase1: EosModel::cochran_chan_reference(),
            phase2: EosModel::stiffened_gas(1.62, 141e9),
        };
        let alpha = 1.0 - 1e-10;
        let d = pair
            .mixture_pressure_partials(alpha, alpha * 1200.0, (1.0 - alpha) * 3622.0, 1e9)
            .unwrap();
        assert_relative_eq!(d.kappa, 1.19, max_relative = 1e-9);
        assert_relative_eq!(
            d.dp_da1,
            pair.phase1.chi(1200.0).unwrap(),
            max_relative = 1e-8
        );
        assert!(d.dp_dalpha1.is_finite());
    }

    #[test]
    fn pressure_partials_match_finite_differences() {
        let pair = PhasePair {
            phase1: EosModel::stiffened_gas(2.43, 5.3e9),
            phase2: EosModel::cochran_chan_reference(),
        };
        let (alpha, a1, a2, p) = (0.5954, 0.5954 * 1185.0, 0.4046 * 3622.0, 2e11);
        let e = pair.mixture_energy(alpha, a1, a2, p).unwrap();
        let d = pair.mixture_pressure_partials(alpha, a1, a2, p).unwrap();
        let fd = |f: &dyn Fn(f64) -> f64, x: f64| {
            let s = 1e-6 * x.abs();
            (f(x + s) - f(x - s)) / (2.0 * s)
        };
        let dp_dalpha = fd(&|x| pair.mixture_pressure(x, a1, a2, e).unwrap(), alpha);
        let dp_da1 = fd(&|x| pair.mixture_pressure(alpha, x, a2, e).unwrap(), a1);
        let dp_da2 = fd(&|x| pair.mixture_pressure(alpha, a1, x, e).unwrap(), a2);
        let dp_de = fd(&|x| pair.mixture_pressure(alpha, a1, a2, x).unwrap(), e);
        assert_relative_eq!(d.dp_dalpha1, dp_dalpha, max_relative = 1e-6);
        assert_relative_eq!(d.dp_da1, dp_da1, max_relative = 1e-6);
        assert_relative_eq!(d.dp_da2, dp_da2, max_relative = 1e-6);
        assert_relative_eq!(d.kappa, dp_de, max_relative = 1e-6);
    }

    #[test]
    fn mixture_pressure_inverts_mixture_energy() {
        let pair = PhasePair {
            phase1: EosModel::stiffened_gas(2.43, 5.3e9),
            phase2: EosModel::cochran_chan_reference(),
        };
        let e = pair
            .mixture_energy(0.5954, 0.5954 * 1185.0, 0.4046 * 1134.0, 2e11)
            .unwrap();
        let p = pair
            .mixture_pressure(0.5954, 0.5954 * 1185.0, 0.4046 * 1134.0, e)
            .unwrap();
        assert_relative_eq!(p, 2e11, max_relative = 1e-12);
    }

    #[test]
    fn path_partials_reproduce_the_energy_change() {
        let pair = PhasePair {
            phase1: EosModel::stiffened_gas(2.43, 5.3e9),
            phase2: EosModel::cochran_chan_reference(),
        };
        let old = decode(
            &pair,
            &encode(&pair, 0.4, 1185.0, 1300.0, 10.0, 1e9).unwrap(),
        )
        .unwrap();
        let (alpha, a1, a2, p) = (0.41, old.a1 * 1.01, old.a2 * 0.98, 1.05e9);
        let d = energy_path_partials(&pair, &old, alpha, a1, a2).unwrap();
        let de = d.de_da1 * (a1 - old.a1)
            + d.de_da2 * (a2 - old.a2)
            + d.de_dalpha1 * (alpha - old.alpha1)
            + d.de_dp * (p - old.p);
        let exact = pair.mixture_energy(alpha, a1, a2, p).unwrap() - old.e;
        assert_relative_eq!(de, exact, max_relative = 1e-9);
    }
}
