//! Residual distribution on P¹ segments.
//!
//! Every element `K = [x_j, x_{j+1}]` computes a total residual
//! `Φ^K = ∫_K (U^(l) − U^(0))/Δt + ∮_K F·n` and splits it between its two
//! DOFs. The split always sums back to `Φ^K`; this is the discrete
//! conservation the whole crate is built around.

mod eigen;
mod rk;

pub use eigen::{euler_eigensystem, multiphase_eigensystem, Eigensystem, MultiphaseEigenInput};
pub use rk::{
    advance_components, assemble, rk2_step, Order, StageAudit, StageContext, StageScheme, StepAudit,
};

use nalgebra::SVector;

/// Number of DOFs of a P¹ segment.
pub const DOFS_PER_ELEMENT: usize = 2;

/// Residuals sent by one element to its two DOFs, plus the element total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementResidual<const N: usize> {
    pub element: usize,
    pub dofs: [SVector<f64, N>; 2],
    pub total: SVector<f64, N>,
}

impl<const N: usize> ElementResidual<N> {
    pub fn sum(&self) -> SVector<f64, N> {
        self.dofs[0] + self.dofs[1]
    }

    /// Componentwise `|Σ_σ Φ_σ − Φ^K| / (|Φ^K| + 1)`, maximised over components.
    pub fn balance_defect(&self) -> f64 {
        let s = self.sum();
        (0..N)
            .map(|k| (s[k] - self.total[k]).abs() / (self.total[k].abs() + 1.0))
            .fold(0.0, f64::max)
    }
}

/// How the time-increment integral `∫_K (U^(l) − U^(0))/Δt` is shared
/// between the two DOFs of the Rusanov residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeSplit {
    /// Each DOF takes `(h/2)(U_σ^(l) − U_σ^(0))/Δt`, its own increment.
    #[default]
    Lumped,
    /// Each DOF takes half of the element integral.
    Equal,
}

/// Rusanov residuals of one element.
///
/// `space` is the element's spatial term (flux difference for conservative
/// components, quadrature of the quasilinear operator otherwise) and `dt` is
/// `None` in first-order mode, where the time term is dropped. The dissipation
/// acts on the per-DOF time averages `(U^(l) + U^(0))/2` around their element
/// mean; it is antisymmetric between the two DOFs and drops out of the total.
///
/// With [`TimeSplit::Equal`] the neighbour's stage increment enters a DOF's
/// update with weight `(αΔt/h ± λΔt/h − 1)/4`, which is negative at any CFL
/// below one: strong shocks then produce negative pressures within a couple
/// of steps. [`TimeSplit::Lumped`] keeps the same element total and makes
/// the two-stage update a convex combination of first-order Rusanov steps.
#[allow(clippy::too_many_arguments)]
pub fn rusanov_residuals<const N: usize>(
    element: usize,
    h: f64,
    current: &[SVector<f64, N>; 2],
    initial: &[SVector<f64, N>; 2],
    dt: Option<f64>,
    space: &SVector<f64, N>,
    alpha: f64,
    split: TimeSplit,
) -> ElementResidual<N> {
    let time = match dt {
        Some(dt) => {
            let w = 0.5 * h / dt;
            [(current[0] - initial[0]) * w, (current[1] - initial[1]) * w]
        }
        None => [SVector::zeros(); 2],
    };
    let time_total = time[0] + time[1];
    let time = match split {
        TimeSplit::Lumped => time,
        TimeSplit::Equal => [time_total * 0.5, time_total * 0.5],
    };
    // ((U_1^(l) + U_1^(0)) − (U_0^(l) + U_0^(0)))/4 = Ū_1 − Û_K = Û_K − Ū_0
    let d = ((current[1] + initial[1]) - (current[0] + initial[0])) * (0.25 * alpha);
    let half_space = space * 0.5;
    ElementResidual {
        element,
        dofs: [time[0] + half_space - d, time[1] + half_space + d],
        total: time_total + space,
    }
}

/// Limited split of one characteristic field.
///
/// Returns the blended DOF contributions and the blending parameter
/// `Θ = |Σφ| / Σ|φ|`. A field with zero total keeps its Rusanov values.
pub fn blend_field(phi: [f64; 2]) -> ([f64; 2], f64) {
    let total = phi[0] + phi[1];
    let abs_sum = phi[0].abs() + phi[1].abs();
    if total == 0.0 || abs_sum == 0.0 {
        return (phi, 1.0);
    }
    let theta = (total.abs() / abs_sum).min(1.0);
    let pos = [(phi[0] / total).max(0.0), (phi[1] / total).max(0.0)];
    let pos_sum = pos[0] + pos[1];
    let beta = [pos[0] / pos_sum, pos[1] / pos_sum];
    (
        [
            (1.0 - theta) * beta[0] * total + theta * phi[0],
            (1.0 - theta) * beta[1] * total + theta * phi[1],
        ],
        theta,
    )
}

/// Characteristic β-limiting blended with the Rusanov residual, field by field.
///
/// The second DOF closes the element balance so that `Σ_σ Φ_σ = Φ^K` holds
/// to the last bit.
pub fn blend_residuals<const N: usize>(
    res: &ElementResidual<N>,
    eig: &Eigensystem<N>,
) -> ElementResidual<N> {
    let w0 = eig.left * res.dofs[0];
    let w1 = eig.left * res.dofs[1];
    let mut b0 = SVector::<f64, N>::zeros();
    for xi in 0..N {
        let ([first, _], _) = blend_field([w0[xi], w1[xi]]);
        b0[xi] = first;
    }
    let first = eig.right * b0;
    ElementResidual {
        element: res.element,
        dofs: [first, res.total - first],
        total: res.total,
    }
}
