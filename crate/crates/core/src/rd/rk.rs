//! Two-stage residual-distribution time stepping.
//!
//! Stage `l` solves `|C_σ| (U^(l+1) − U^(l)) + Δt Σ_K Φ_σ^K(U^(l), U^(0)) = 0`
//! at every DOF. With the time-increment term inside `Φ^K` the two stages
//! reproduce Heun's method; a single stage without it is forward Euler.

use nalgebra::SVector;

use crate::error::{Error, Result};
use crate::mesh::{Mesh1D, SolutionState, Variables};

use super::ElementResidual;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    First,
    #[default]
    Second,
}

impl Order {
    pub fn stages(self) -> usize {
        match self {
            Order::First => 1,
            Order::Second => 2,
        }
    }

    pub fn from_int(order: u32) -> Result<Self> {
        match order {
            1 => Ok(Order::First),
            2 => Ok(Order::Second),
            _ => Err(Error::config(format!("order must be 1 or 2, got {order}"))),
        }
    }
}

/// Everything a stage needs: the current stage values, the step start values
/// and the step size.
#[derive(Debug, Clone, Copy)]
pub struct StageContext<'a, const N: usize> {
    pub mesh: &'a Mesh1D,
    pub current: &'a [SVector<f64, N>],
    pub initial: &'a [SVector<f64, N>],
    pub dt: f64,
    pub stage: usize,
    pub order: Order,
}

impl<const N: usize> StageContext<'_, N> {
    /// Step size to use in the time-increment term; `None` when it is dropped.
    pub fn time_step(&self) -> Option<f64> {
        match self.order {
            Order::First => None,
            Order::Second => Some(self.dt),
        }
    }

    /// `(U^(l), U^(0))` at the two DOFs of an element.
    pub fn element_values(&self, element: usize) -> ([SVector<f64, N>; 2], [SVector<f64, N>; 2]) {
        (
            [self.current[element], self.current[element + 1]],
            [self.initial[element], self.initial[element + 1]],
        )
    }
}

/// Per-stage conservation diagnostics, maximised over elements.
///
/// Defects are relative to the sum of magnitudes of the terms that make up
/// the element total, so they measure round-off rather than flow features.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageAudit {
    pub elements: usize,
    /// Largest element-sum defect of the conserved components (ρ, m, partial densities).
    pub conserved: f64,
    /// Largest total-energy defect on elements that received the conservation correction.
    pub energy: f64,
    /// Largest total-energy defect on elements where the contact switch suppressed it.
    pub switched_energy: f64,
    pub switched: usize,
    /// Volume-fraction values clipped back into the admissible range.
    pub clipped: usize,
}

/// Diagnostics of a whole step (all stages merged).
pub type StepAudit = StageAudit;

impl StageAudit {
    pub fn merge(&mut self, other: &StageAudit) {
        self.elements += other.elements;
        self.conserved = self.conserved.max(other.conserved);
        self.energy = self.energy.max(other.energy);
        self.switched_energy = self.switched_energy.max(other.switched_energy);
        self.switched += other.switched;
        self.clipped += other.clipped;
    }

    /// Largest energy defect over all elements, switched or not.
    pub fn energy_all(&self) -> f64 {
        self.energy.max(self.switched_energy)
    }
}

/// One formulation's stage update.
pub trait StageScheme<const N: usize> {
    fn variables(&self) -> Variables;

    /// Local spectral radius `|u| + c` at a DOF.
    fn wave_speed(&self, v: &SVector<f64, N>) -> Result<f64>;

    /// Checks that a DOF state is physically admissible.
    fn admissible(&self, v: &SVector<f64, N>) -> std::result::Result<(), String>;

    /// Computes `U^(l+1)` from the context, recording diagnostics in `audit`.
    fn stage(
        &self,
        ctx: &StageContext<'_, N>,
        audit: &mut StageAudit,
    ) -> Result<Vec<SVector<f64, N>>>;
}

/// Sums element residuals into per-DOF totals.
pub fn assemble<const N: usize>(
    mesh: &Mesh1D,
    residuals: &[ElementResidual<N>],
) -> Vec<SVector<f64, N>> {
    let mut sums = vec![SVector::<f64, N>::zeros(); mesh.n_dofs()];
    for r in residuals {
        sums[r.element] += r.dofs[0];
        sums[r.element + 1] += r.dofs[1];
    }
    sums
}

/// `out_σ[k] = base_σ[k] − Δt/|C_σ| · sums_σ[k]` for the listed components.
pub fn advance_components<const N: usize>(
    mesh: &Mesh1D,
    base: &[SVector<f64, N>],
    sums: &[SVector<f64, N>],
    dt: f64,
    components: &[usize],
    out: &mut [SVector<f64, N>],
) {
    for (dof, o) in out.iter_mut().enumerate() {
        let factor = dt / mesh.dual_volume_unchecked(dof);
        for &k in components {
            o[k] = base[dof][k] - factor * sums[dof][k];
        }
    }
}

/// Advances `state` by `dt` with one (first order) or two (second order) stages.
pub fn rk2_step<S, const N: usize>(
    scheme: &S,
    mesh: &Mesh1D,
    state: &SolutionState<N>,
    dt: f64,
    order: Order,
) -> Result<(SolutionState<N>, StepAudit)>
where
    S: StageScheme<N> + ?Sized,
{
    state.check_len(mesh)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::config(format!(
            "time step must be positive, got {dt:e}"
        )));
    }
    let mut current = state.values.clone();
    let mut audit = StepAudit::default();
    for stage in 0..order.stages() {
        let ctx = StageContext {
            mesh,
            current: &current,
            initial: &state.values,
            dt,
            stage,
            order,
        };
        let mut stage_audit = StageAudit::default();
        let next = scheme.stage(&ctx, &mut stage_audit)?;
        if next.len() != mesh.n_dofs() {
            return Err(Error::Length {
                expected: mesh.n_dofs(),
                got: next.len(),
            });
        }
        for (dof, v) in next.iter().enumerate() {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::StepFailure {
                    dof,
                    stage,
                    reason: "non-finite value".into(),
                });
            }
            scheme
                .admissible(v)
                .map_err(|reason| Error::StepFailure { dof, stage, reason })?;
        }
        audit.merge(&stage_audit);
        current = next;
    }
    Ok((
        SolutionState::new(state.variables, current, state.time + dt),
        audit,
    ))
}
