//! Uniform 1D meshes of linear elements and per-DOF solution storage.

use nalgebra::SVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform mesh of `n_cells` segment elements; the DOFs are the vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    x_min: f64,
    x_max: f64,
    n_cells: usize,
    h: f64,
}

impl Mesh1D {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::config(format!(
                "invalid mesh bounds [{x_min}, {x_max}]"
            )));
        }
        if n_cells < 2 {
            return Err(Error::config(format!(
                "need at least 2 cells, got {n_cells}"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n_cells,
            h: (x_max - x_min) / n_cells as f64,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_dofs(&self) -> usize {
        self.n_cells + 1
    }

    /// Element length.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn x(&self, dof: usize) -> f64 {
        if dof == self.n_cells {
            self.x_max
        } else {
            self.x_min + dof as f64 * self.h
        }
    }

    pub fn vertices(&self) -> Vec<f64> {
        (0..self.n_dofs()).map(|i| self.x(i)).collect()
    }

    /// Measure of the median dual cell around a DOF: `h` inside, `h/2` at the ends.
    pub fn dual_volume(&self, dof: usize) -> Result<f64> {
        if dof > self.n_cells {
            return Err(Error::Length {
                expected: self.n_dofs(),
                got: dof + 1,
            });
        }
        Ok(self.dual_volume_unchecked(dof))
    }

    pub(crate) fn dual_volume_unchecked(&self, dof: usize) -> f64 {
        if dof == 0 || dof == self.n_cells {
            0.5 * self.h
        } else {
            self.h
        }
    }

    pub fn dual_volumes(&self) -> Vec<f64> {
        (0..self.n_dofs())
            .map(|i| self.dual_volume_unchecked(i))
            .collect()
    }
}

/// Which unknowns a [`SolutionState`] carries at each DOF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variables {
    /// (ρ, m, E)
    Conservative,
    /// (ρ, m, e)
    Energy,
    /// (ρ, m, p)
    Pressure,
    /// (α₁, α₁ρ₁, α₂ρ₂, ρu, p)
    Multiphase,
}

impl Variables {
    pub fn name(self) -> &'static str {
        match self {
            Variables::Conservative => "conservative",
            Variables::Energy => "energy",
            Variables::Pressure => "pressure",
            Variables::Multiphase => "multiphase",
        }
    }
}

/// Per-DOF unknowns at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionState<const N: usize> {
    pub variables: Variables,
    pub values: Vec<SVector<f64, N>>,
    pub time: f64,
}

impl<const N: usize> SolutionState<N> {
    pub fn new(variables: Variables, values: Vec<SVector<f64, N>>, time: f64) -> Self {
        Self {
            variables,
            values,
            time,
        }
    }

    pub fn check_len(&self, mesh: &Mesh1D) -> Result<()> {
        if self.values.len() == mesh.n_dofs() {
            Ok(())
        } else {
            Err(Error::Length {
                expected: mesh.n_dofs(),
                got: self.values.len(),
            })
        }
    }

    /// One scalar component at every DOF.
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[k]).collect()
    }
}

/// `Δt = cfl·h / max_σ(|u_σ| + c_σ)`.
pub fn cfl_timestep<const N: usize, F>(
    state: &SolutionState<N>,
    mesh: &Mesh1D,
    wave_speed: F,
    cfl: f64,
) -> Result<f64>
where
    F: Fn(&SVector<f64, N>) -> Result<f64>,
{
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(Error::config(format!("cfl must lie in (0, 1], got {cfl}")));
    }
    state.check_len(mesh)?;
    let mut smax = 0.0f64;
    for v in &state.values {
        smax = smax.max(wave_speed(v)?);
    }
    if smax <= 0.0 || !smax.is_finite() {
        return Err(Error::domain(format!(
            "invalid maximum wave speed {smax:e}"
        )));
    }
    Ok(cfl * mesh.h() / smax)
}
