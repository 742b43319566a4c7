//! Right and left eigenvectors of the quasilinear operators, in the unknowns
//! each formulation actually evolves.
//!
//! Eigenvectors are written once in primitive variables and mapped through
//! the Jacobian `∂V/∂W` of the evolved variables `V` with respect to the
//! primitives `W`; this keeps the four variable sets consistent with one
//! another.

use nalgebra::{SMatrix, SVector};

use crate::eos::EosModel;
use crate::error::{Error, Result};
use crate::mesh::Variables;

/// Eigen-decomposition `A = R diag(λ) L` with `L = R⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigensystem<const N: usize> {
    pub eigenvalues: SVector<f64, N>,
    /// Right eigenvectors stored as columns.
    pub right: SMatrix<f64, N, N>,
    /// Left eigenvectors stored as rows.
    pub left: SMatrix<f64, N, N>,
}

impl<const N: usize> Eigensystem<N> {
    pub fn from_right(eigenvalues: SVector<f64, N>, right: SMatrix<f64, N, N>) -> Result<Self> {
        let left = right
            .try_inverse()
            .ok_or_else(|| Error::domain("singular eigenvector matrix"))?;
        if left.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("non-finite left eigenvectors"));
        }
        Ok(Self {
            eigenvalues,
            right,
            left,
        })
    }
}

/// Eigensystem of the single-phase Euler operator at primitive state `(ρ, u, p)`,
/// expressed in the unknowns of `variables` (conservative, energy or pressure).
pub fn euler_eigensystem(
    variables: Variables,
    eos: &EosModel,
    rho: f64,
    u: f64,
    p: f64,
) -> Result<Eigensystem<3>> {
    let c = eos.sound_speed(rho, p)?;
    let c2 = c * c;
    // columns: u − c, u, u + c in (ρ, u, p)
    let r_prim = SMatrix::<f64, 3, 3>::new(
        1.0,
        1.0,
        1.0, //
        -c / rho,
        0.0,
        c / rho, //
        c2,
        0.0,
        c2,
    );
    let third_row = match variables {
        Variables::Conservative => {
            let d = eos.energy_partials(rho, p)?;
            [d.de_drho + 0.5 * u * u, rho * u, d.de_dp]
        }
        Variables::Energy => {
            let d = eos.energy_partials(rho, p)?;
            [d.de_drho, 0.0, d.de_dp]
        }
        Variables::Pressure => [0.0, 0.0, 1.0],
        Variables::Multiphase => {
            return Err(Error::config(
                "multiphase variables need multiphase_eigensystem",
            ));
        }
    };
    let jac = SMatrix::<f64, 3, 3>::new(
        1.0,
        0.0,
        0.0, //
        u,
        rho,
        0.0, //
        third_row[0],
        third_row[1],
        third_row[2],
    );
    Eigensystem::from_right(SVector::<f64, 3>::new(u - c, u, u + c), jac * r_prim)
}

/// Averaged mixture quantities needed by [`multiphase_eigensystem`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiphaseEigenInput {
    pub alpha1: f64,
    /// Partial density `α₁ρ₁`.
    pub a1: f64,
    /// Partial density `α₂ρ₂`.
    pub a2: f64,
    pub u: f64,
    pub p: f64,
    /// Mixture (Wood) sound speed.
    pub c: f64,
    /// Coefficient of `∂u/∂x` in the volume-fraction equation.
    pub kapila: f64,
}

/// Eigensystem of the five-equation two-phase operator in `(α₁, α₁ρ₁, α₂ρ₂, ρu, p)`.
pub fn multiphase_eigensystem(s: &MultiphaseEigenInput) -> Result<Eigensystem<5>> {
    let rho = s.a1 + s.a2;
    if !(rho > 0.0 && s.c > 0.0) {
        return Err(Error::domain(format!(
            "invalid mixture state rho = {rho:e}, c = {:e}",
            s.c
        )));
    }
    let rc2 = rho * s.c * s.c;
    // primitive (α₁, α₁ρ₁, α₂ρ₂, u, p); columns u − c, u, u, u, u + c
    #[rustfmt::skip]
    let r_prim = SMatrix::<f64, 5, 5>::from_row_slice(&[
        -s.kapila, 1.0, 0.0, 0.0, -s.kapila,
        s.a1,      0.0, 1.0, 0.0, s.a1,
        s.a2,      0.0, 0.0, 1.0, s.a2,
        -s.c,      0.0, 0.0, 0.0, s.c,
        rc2,       0.0, 0.0, 0.0, rc2,
    ]);
    let mut jac = SMatrix::<f64, 5, 5>::identity();
    jac[(3, 1)] = s.u;
    jac[(3, 2)] = s.u;
    jac[(3, 3)] = rho;
    Eigensystem::from_right(
        SVector::<f64, 5>::from_column_slice(&[s.u - s.c, s.u, s.u, s.u, s.u + s.c]),
        jac * r_prim,
    )
}
