//! Time loop: CFL-limited steps until a final time or a step budget.

use crate::error::{Error, Result};
use crate::mesh::{cfl_timestep, Mesh1D, SolutionState};
use crate::rd::{rk2_step, Order, StageScheme, StepAudit};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop {
    /// Run to this time; the last step is shortened to land on it exactly.
    Time(f64),
    /// Take exactly this many CFL steps.
    Steps(usize),
}

/// Upper bound on the number of steps of any run.
const MAX_STEPS: usize = 10_000_000;

/// Result of a run that may have stopped early.
#[derive(Debug)]
pub struct Outcome<const N: usize> {
    /// Last admissible state.
    pub state: SolutionState<N>,
    pub steps: usize,
    pub failure: Option<Error>,
}

/// Advances `state` until `stop`, calling `on_step(step, state, audit)` after every step.
pub fn advance<S, F, const N: usize>(
    scheme: &S,
    mesh: &Mesh1D,
    state: SolutionState<N>,
    stop: Stop,
    cfl: f64,
    order: Order,
    on_step: F,
) -> Result<SolutionState<N>>
where
    S: StageScheme<N> + ?Sized,
    F: FnMut(usize, &SolutionState<N>, &StepAudit),
{
    let out = advance_partial(scheme, mesh, state, stop, cfl, order, on_step);
    match out.failure {
        Some(e) => Err(e),
        None => Ok(out.state),
    }
}

/// Like [`advance`], but keeps the last good state when a step fails. Step
/// failures are annotated with the step number and time.
pub fn advance_partial<S, F, const N: usize>(
    scheme: &S,
    mesh: &Mesh1D,
    mut state: SolutionState<N>,
    stop: Stop,
    cfl: f64,
    order: Order,
    mut on_step: F,
) -> Outcome<N>
where
    S: StageScheme<N> + ?Sized,
    F: FnMut(usize, &SolutionState<N>, &StepAudit),
{
    let mut step = 0;
    let fail = |state, step, failure| Outcome {
        state,
        steps: step,
        failure: Some(failure),
    };
    if let Stop::Time(t) = stop {
        if !(t > state.time && t.is_finite()) {
            let e = Error::config(format!(
                "final time {t:e} must exceed the start time {:e}",
                state.time
            ));
            return fail(state, step, e);
        }
    }
    loop {
        let mut dt = match cfl_timestep(&state, mesh, |v| scheme.wave_speed(v), cfl) {
            Ok(dt) => dt,
            Err(e) => return fail(state, step, e),
        };
        match stop {
            Stop::Time(t_final) => {
                let remaining = t_final - state.time;
                if remaining <= 1e-14 * t_final.abs() {
                    break;
                }
                if dt >= remaining {
                    dt = remaining;
                }
            }
            Stop::Steps(n) if step >= n => break,
            Stop::Steps(_) => {}
        }
        if step >= MAX_STEPS {
            let e = Error::domain(format!(
                "step budget of {MAX_STEPS} exhausted at t = {:e}",
                state.time
            ));
            return fail(state, step, e);
        }
        let (mut next, audit) = match rk2_step(scheme, mesh, &state, dt, order) {
            Ok(r) => r,
            Err(Error::StepFailure { dof, stage, reason }) => {
                let reason = format!("{reason} (step {}, t = {:e} s)", step + 1, state.time);
                return fail(state, step, Error::StepFailure { dof, stage, reason });
            }
            Err(e) => return fail(state, step, e),
        };
        if let Stop::Time(t_final) = stop {
            if (next.time - t_final).abs() <= 1e-14 * t_final.abs() {
                next.time = t_final;
            }
        }
        step += 1;
        state = next;
        on_step(step, &state, &audit);
    }
    Outcome {
        state,
        steps: step,
        failure: None,
    }
}
