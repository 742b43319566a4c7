//! Closed-form pressure functions for perfect and stiffened gases, written in
//! the shifted pressure `P = p + p∞`.

use super::{
    bracketed_newton, Fan, Medium, RiemannProblem, Side, SideSolution, Thermo, Wave, WaveFan,
    WaveKind,
};
use crate::eos::EosModel;
use crate::error::{Error, Result};

const ROOT_RTOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy)]
struct GasSide {
    gamma: f64,
    p_inf: f64,
    rho: f64,
    u: f64,
    p: f64,
}

impl GasSide {
    fn new(eos: &EosModel, rho: f64, u: f64, p: f64) -> Result<Self> {
        eos.validate()?;
        let (gamma, p_inf) = match *eos {
            EosModel::PerfectGas { gamma } => (gamma, 0.0),
            EosModel::StiffenedGas { gamma, p_inf } => (gamma, p_inf),
            _ => {
                return Err(Error::config(format!(
                    "closed-form solver needs a gas-law EOS, got {eos:?}"
                )))
            }
        };
        if !(rho > 0.0 && p + p_inf > 0.0 && u.is_finite()) {
            return Err(Error::config(format!(
                "inadmissible gas state rho = {rho:e}, p = {p:e}"
            )));
        }
        Ok(Self {
            gamma,
            p_inf,
            rho,
            u,
            p,
        })
    }

    fn shifted(&self) -> f64 {
        self.p + self.p_inf
    }

    fn c(&self) -> f64 {
        (self.gamma * self.shifted() / self.rho).sqrt()
    }

    fn curve(&self, p: f64) -> (f64, f64) {
        let g = self.gamma;
        let (big, big_k) = (p + self.p_inf, self.shifted());
        if p > self.p {
            let a = 2.0 / ((g + 1.0) * self.rho);
            let b = (g - 1.0) / (g + 1.0) * big_k;
            let q = (a / (big + b)).sqrt();
            (
                (big - big_k) * q,
                q * (1.0 - 0.5 * (big - big_k) / (b + big)),
            )
        } else {
            let c = self.c();
            let ratio = big / big_k;
            (
                2.0 * c / (g - 1.0) * (ratio.powf(0.5 * (g - 1.0) / g) - 1.0),
                ratio.powf(-0.5 * (g + 1.0) / g) / (self.rho * c),
            )
        }
    }

    fn solution(&self, side: Side, eos: EosModel, p_star: f64, u_star: f64) -> SideSolution {
        let g = self.gamma;
        let sign = side.sign();
        let c = self.c();
        let ratio = (p_star + self.p_inf) / self.shifted();
        let (rho_star, wave, fan) = if p_star > self.p {
            let k = (g - 1.0) / (g + 1.0);
            let rho_star = self.rho * (ratio + k) / (k * ratio + 1.0);
            let s = self.u + sign * c * (0.5 * (g + 1.0) / g * ratio + 0.5 * (g - 1.0) / g).sqrt();
            let wave = Wave {
                kind: WaveKind::Shock,
                head: s,
                tail: s,
            };
            (rho_star, wave, Fan::None)
        } else {
            let c_star = c * ratio.powf(0.5 * (g - 1.0) / g);
            let wave = Wave {
                kind: WaveKind::Rarefaction,
                head: self.u + sign * c,
                tail: u_star + sign * c_star,
            };
            let fan = if p_star < self.p {
                Fan::Stiffened {
                    gamma: g,
                    p_inf: self.p_inf,
                }
            } else {
                Fan::None
            };
            (self.rho * ratio.powf(1.0 / g), wave, fan)
        };
        SideSolution {
            side,
            medium: Medium::Single(eos),
            state: Thermo {
                rho: [self.rho, 0.0],
                p: self.p,
            },
            u: self.u,
            star: Thermo {
                rho: [rho_star, 0.0],
                p: p_star,
            },
            wave,
            fan,
        }
    }
}

fn solve_gas(problem: &RiemannProblem) -> Result<WaveFan> {
    let l = GasSide::new(
        &problem.left_eos,
        problem.left.rho,
        problem.left.u,
        problem.left.p,
    )?;
    let r = GasSide::new(
        &problem.right_eos,
        problem.right.rho,
        problem.right.u,
        problem.right.p,
    )?;
    let du = r.u - l.u;
    let f = |p: f64| {
        let (fl, dl) = l.curve(p);
        let (fr, dr) = r.curve(p);
        Ok((fl + fr + du, dl + dr))
    };
    // lowest pressure at which both sides remain admissible
    let p_min = (-l.p_inf).max(-r.p_inf);
    if f(p_min)?.0 >= 0.0 {
        return Err(Error::oracle(format!(
            "vacuum: the data generate a cavity (velocity jump {du:e} m/s)"
        )));
    }
    let mut hi = l.p.max(r.p);
    let mut steps = 0;
    while f(hi)?.0 < 0.0 {
        hi = p_min + 2.0 * (hi - p_min);
        steps += 1;
        if steps > 200 {
            return Err(Error::oracle("no upper bracket for the star pressure"));
        }
    }
    let (zl, zr) = (l.rho * l.c(), r.rho * r.c());
    let guess = (zr * l.p + zl * r.p - zl * zr * du) / (zl + zr);
    let p_star = bracketed_newton(f, p_min, hi, guess, ROOT_RTOL)?;
    let u_star = 0.5 * (l.u + r.u) + 0.5 * (r.curve(p_star).0 - l.curve(p_star).0);
    WaveFan::new(
        l.solution(Side::Left, problem.left_eos, p_star, u_star),
        r.solution(Side::Right, problem.right_eos, p_star, u_star),
        p_star,
        u_star,
        problem.x_d,
    )
}

/// Exact solution for a γ-law gas on both sides.
pub fn solve_perfect_gas(problem: &RiemannProblem) -> Result<WaveFan> {
    for eos in [problem.left_eos, problem.right_eos] {
        if !matches!(eos, EosModel::PerfectGas { .. }) {
            return Err(Error::config(format!("perfect-gas solver given {eos:?}")));
        }
    }
    solve_gas(problem)
}

/// Exact solution for stiffened gases, with independent `(γ, p∞)` per side.
pub fn solve_stiffened_gas(problem: &RiemannProblem) -> Result<WaveFan> {
    solve_gas(problem)
}
