//! Grid-refinement studies.

use super::config::RunConfig;
use super::run::{run_case, CaseResult, Profile};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub levels: Vec<usize>,
    /// Cell sizes `h` of the levels that carry an error.
    pub h: Vec<f64>,
    /// L¹ density errors per level.
    pub errors: Vec<f64>,
    /// Observed order between consecutive levels.
    pub orders: Vec<f64>,
    /// Least-squares slope of `log e` against `log h`.
    pub slope: f64,
    /// Errors decrease monotonically.
    pub monotone: bool,
    /// Errors were measured against the next finer level instead of an exact solution.
    pub richardson: bool,
}

/// Least-squares slope of `log y` against `log x`.
pub fn lsq_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Length {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 2 || x.iter().chain(y).any(|v| v.is_nan() || *v <= 0.0) {
        return Err(Error::domain(
            "slope fit needs at least two positive points",
        ));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(sxy / sxx)
}

/// Restricts a profile on `2N` cells to the vertices of the `N`-cell mesh.
fn restrict(fine: &Profile) -> Vec<f64> {
    fine.rho.iter().step_by(2).copied().collect()
}

fn l1_density(result: &CaseResult, reference: &[f64]) -> Result<f64> {
    super::run::l1_error(&result.solution.rho, reference, &result.mesh)
}

/// Runs `base` on every level of `levels` (cell counts, increasing) and
/// measures the density error. Cases without an exact solution use the next
/// finer level as reference, which requires each level to double the previous.
pub fn convergence_study(base: &RunConfig, levels: &[usize]) -> Result<ConvergenceReport> {
    if levels.len() < 3 {
        return Err(Error::config(
            "a convergence study needs at least three levels",
        ));
    }
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config("levels must increase"));
    }
    let mut results = Vec::with_capacity(levels.len());
    for &n in levels {
        let mut cfg = base.clone();
        cfg.n_cells = n;
        cfg.output = None;
        cfg.steps = None;
        results.push(run_case(&cfg)?);
    }
    let richardson = results.iter().any(|r| r.reference.is_none());
    let (h, errors) = if richardson {
        if levels.windows(2).any(|w| w[1] != 2 * w[0]) {
            return Err(Error::config(
                "levels must double when no exact solution exists",
            ));
        }
        let mut h = Vec::new();
        let mut errors = Vec::new();
        for pair in results.windows(2) {
            h.push(pair[0].mesh.h());
            errors.push(l1_density(&pair[0], &restrict(&pair[1].solution))?);
        }
        (h, errors)
    } else {
        let h = results.iter().map(|r| r.mesh.h()).collect();
        let errors = results
            .iter()
            .map(|r| Ok(r.l1.expect("reference exists").rho))
            .collect::<Result<Vec<f64>>>()?;
        (h, errors)
    };
    let orders = h
        .windows(2)
        .zip(errors.windows(2))
        .map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect();
    let slope = lsq_slope(&h, &errors)?;
    let monotone = errors.windows(2).all(|e| e[1] < e[0]);
    Ok(ConvergenceReport {
        levels: levels.to_vec(),
        h,
        errors,
        orders,
        slope,
        monotone,
        richardson,
    })
}
