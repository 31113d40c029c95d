//! Central-cut ellipsoid method over orbit weights.
//!
//! Every objective cut `g . (y - x) <= 0` keeps the minimiser, so
//! `f(x_k) - sqrt(g_k' P_k g_k)` is a lower bound on the optimum for each
//! evaluated centre. The solver stops once the best value found is within
//! `tol` of the best lower bound. Quantum regimes add feasibility cuts that
//! keep every weight non-negative.

use nalgebra::{DMatrix, DVector};

use super::{default_group_names, regime_of, Eval, OptimizationResult, Problem, Regime};
use crate::error::{invalid, Result};
use crate::graphs::{WeightVector, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Certified optimality gap on the SLEM.
    pub tol: f64,
    pub max_iters: usize,
    /// Accepted for interface stability; the method is deterministic.
    pub seed: u64,
    /// Drop the `w >= 0` cuts in the quantum regimes. Classical problems
    /// never impose them.
    pub allow_negative: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iters: 200_000, seed: 0, allow_negative: false }
    }
}

/// Minimises the regime's objective for `N = base.n()` qudits of dimension `d`.
pub fn solve_generic(base: &WeightedGraph, n: usize, d: usize, opts: &SolverOptions) -> Result<OptimizationResult> {
    if n != base.n() {
        return Err(invalid!("N={n} does not match the base graph's {} vertices", base.n()));
    }
    solve_regime(base, regime_of(n, d)?, Some(d), opts)
}

/// Minimises `max(1 - lambda2(L), lambda_max(L) - 1)` with weights of any sign.
pub fn solve_classical(base: &WeightedGraph, opts: &SolverOptions) -> Result<OptimizationResult> {
    solve_regime(base, Regime::Classical, None, opts)
}

/// Solver entry point with the regime given explicitly. `d` is needed only
/// for [`Regime::General`].
pub fn solve_regime(
    base: &WeightedGraph,
    regime: Regime,
    d: Option<usize>,
    opts: &SolverOptions,
) -> Result<OptimizationResult> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(invalid!("tolerance must be positive"));
    }
    let problem = Problem::new(base, regime, d)?;
    Ellipsoid::run(&problem, opts)
}

struct Best {
    x: Vec<f64>,
    eval: Eval,
}

struct Ellipsoid;

impl Ellipsoid {
    fn run(problem: &Problem, opts: &SolverOptions) -> Result<OptimizationResult> {
        let k = problem.groups();
        let nonnegative = problem.regime() != Regime::Classical && !opts.allow_negative;
        let edges = problem.base().edges().len() as f64;
        let mut x = DVector::from_element(k, 1.0 / (2.0 * edges));
        let radius = 2.0 * (k as f64).sqrt() + x.norm();
        let mut p = DMatrix::identity(k, k) * (radius * radius);

        let mut best: Option<Best> = None;
        let mut lower = f64::NEG_INFINITY;
        let mut converged = false;
        let mut iterations = 0;

        while iterations < opts.max_iters {
            iterations += 1;
            let infeasible =
                if nonnegative { (0..k).filter(|&g| x[g] < 0.0).min_by(|&a, &b| x[a].total_cmp(&x[b])) } else { None };
            let cut = match infeasible {
                Some(g) => {
                    let mut a = DVector::zeros(k);
                    a[g] = -1.0;
                    a
                }
                None => {
                    let w = WeightVector(x.iter().copied().collect());
                    let eval = problem.eval(&w)?;
                    let g = DVector::from_vec(eval.grad.clone());
                    let spread = (g.dot(&(&p * &g))).max(0.0).sqrt();
                    lower = lower.max(eval.s - spread);
                    if best.as_ref().is_none_or(|b| eval.s < b.eval.s) {
                        best = Some(Best { x: x.iter().copied().collect(), eval });
                    }
                    let gap = best.as_ref().unwrap().eval.s - lower;
                    if gap <= opts.tol || spread == 0.0 {
                        converged = true;
                        break;
                    }
                    g
                }
            };
            let pa = &p * &cut;
            let denom = cut.dot(&pa);
            if denom.is_nan() || denom <= 0.0 {
                // ellipsoid has collapsed along the cut direction
                break;
            }
            let step = &pa / denom.sqrt();
            let kf = k as f64;
            if k == 1 {
                x -= &step * 0.5;
                p *= 0.25;
            } else {
                x -= &step * (1.0 / (kf + 1.0));
                p = (&p - (&step * step.transpose()) * (2.0 / (kf + 1.0))) * (kf * kf / (kf * kf - 1.0));
                p = (&p + p.transpose()) * 0.5;
            }
        }

        let names = default_group_names(k);
        let Some(best) = best else {
            return Ok(OptimizationResult {
                weights: WeightVector(x.iter().copied().collect()),
                group_names: names,
                slem: f64::NAN,
                regime: problem.regime(),
                lambda2: f64::NAN,
                lambda_max: f64::NAN,
                iterations,
                converged: false,
            });
        };
        Ok(OptimizationResult {
            weights: WeightVector(best.x),
            group_names: names,
            slem: best.eval.s,
            regime: problem.regime(),
            lambda2: best.eval.lambda2,
            lambda_max: best.eval.lambda_max,
            iterations,
            converged,
        })
    }
}
