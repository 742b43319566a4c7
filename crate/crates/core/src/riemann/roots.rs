use crate::error::{Error, Result};

/// Iteration cap shared by every root search of the oracle.
pub const MAX_ITERATIONS: usize = 200;

/// Newton iteration safeguarded by bisection on a sign-changing bracket.
///
/// `f` returns the function value and its derivative. The iteration stops
/// when the step, or the bracket, is below `rtol` relative to the iterate.
pub fn bracketed_newton<F>(mut f: F, lo: f64, hi: f64, guess: f64, rtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let (f_lo, _) = f(lo)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let (f_hi, _) = f(hi)?;
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::oracle(format!(
            "no sign change on [{lo:e}, {hi:e}]: f = ({f_lo:e}, {f_hi:e})"
        )));
    }
    // keep f(neg) < 0 < f(pos)
    let (mut neg, mut pos) = if f_lo < 0.0 { (lo, hi) } else { (hi, lo) };
    let inside = |x: f64, a: f64, b: f64| x > a.min(b) && x < a.max(b);
    let mut x = if inside(guess, lo, hi) {
        guess
    } else {
        0.5 * (lo + hi)
    };
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    for _ in 0..MAX_ITERATIONS {
        let (fx, dfx) = f(x)?;
        if !fx.is_finite() {
            return Err(Error::oracle(format!("non-finite function value at {x:e}")));
        }
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            neg = x;
        } else {
            pos = x;
        }
        let newton = x - fx / dfx;
        let next = if newton.is_finite()
            && inside(newton, neg, pos)
            && (2.0 * (newton - x)).abs() <= dx_old.abs()
        {
            newton
        } else {
            0.5 * (neg + pos)
        };
        dx_old = dx;
        dx = next - x;
        x = next;
        let scale = x.abs().max(f64::MIN_POSITIVE);
        if dx.abs() <= rtol * scale || (pos - neg).abs() <= rtol * scale {
            return Ok(x);
        }
    }
    Err(Error::oracle(format!(
        "root search did not converge in {MAX_ITERATIONS} iterations (bracket [{:e}, {:e}])",
        neg.min(pos),
        neg.max(pos)
    )))
}
