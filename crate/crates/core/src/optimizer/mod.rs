//! Weight design for the fastest discrete-time consensus problems.
//!
//! The quantum objective is `max(1 - lambda2, lambda_max - 1)` where `lambda2`
//! always comes from the base Laplacian and `lambda_max` depends on which
//! partitions are feasible for `N` qudits of dimension `d` (at most `d^2`
//! rows). The classical objective uses the base Laplacian for both.

mod closed_form;
mod solver;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::combinatorics::{compare_dominance, enumerate_partitions, Dominance, Partition};
use crate::error::{invalid, Error, Result};
use crate::graphs::{laplacian, total_weight, WeightVector, WeightedGraph};
use crate::schreier::induced_graph;
use crate::spectra::{sym_eigen, SymEigen, EIG_TOL};

pub use closed_form::{closed_form, complete_closed_form, cross_validate, CrossValidation};
pub use solver::{solve_classical, solve_generic, solve_regime, SolverOptions};

/// Induced graphs above this size are too large to decompose densely.
pub const MAX_DENSE_INDUCED_VERTICES: usize = 2500;

/// Eigenvalues this close are treated as one cluster for subgradients.
const CLUSTER_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    AtMostDSquared,
    DSquaredPlusOne,
    General,
    Classical,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::AtMostDSquared => "at_most_d_squared",
            Regime::DSquaredPlusOne => "d_squared_plus_one",
            Regime::General => "general",
            Regime::Classical => "classical",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "at_most_d_squared" | "le" => Ok(Regime::AtMostDSquared),
            "d_squared_plus_one" | "eq" => Ok(Regime::DSquaredPlusOne),
            "general" => Ok(Regime::General),
            "classical" => Ok(Regime::Classical),
            _ => Err(invalid!("unknown regime {s:?}")),
        }
    }
}

fn check_nd(n: usize, d: usize) -> Result<()> {
    if n < 2 || d < 2 {
        return Err(invalid!("need N >= 2 and d >= 2, got N={n}, d={d}"));
    }
    Ok(())
}

pub fn regime_of(n: usize, d: usize) -> Result<Regime> {
    check_nd(n, d)?;
    let d2 = d * d;
    Ok(if n <= d2 {
        Regime::AtMostDSquared
    } else if n == d2 + 1 {
        Regime::DSquaredPlusOne
    } else {
        Regime::General
    })
}

/// The partition with at most `d^2` parts dominated by every other such
/// partition. Found by enumeration and checked to be unique.
pub fn least_dominant_feasible(n: usize, d: usize) -> Result<Partition> {
    check_nd(n, d)?;
    let feasible = enumerate_partitions(n, Some(d * d))?;
    let mut found = None;
    for cand in &feasible {
        let mut minimal = true;
        for other in &feasible {
            if !matches!(compare_dominance(other, cand)?, Dominance::Dominates | Dominance::Equal) {
                minimal = false;
                break;
            }
        }
        if minimal {
            if found.is_some() {
                return Err(Error::DegenerateInput(format!("no unique least dominant partition for N={n}, d={d}")));
            }
            found = Some(cand.clone());
        }
    }
    found.ok_or_else(|| Error::DegenerateInput(format!("no least dominant partition for N={n}, d={d}")))
}

/// Result of a weight design, either from the solver or a closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub weights: WeightVector,
    pub group_names: Vec<String>,
    pub slem: f64,
    pub regime: Regime,
    pub lambda2: f64,
    pub lambda_max: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl OptimizationResult {
    pub fn weight(&self, name: &str) -> Option<f64> {
        self.group_names.iter().position(|g| g == name).map(|k| self.weights[k])
    }

    pub fn to_json_value(&self) -> Value {
        let mut weights = Map::new();
        for (name, w) in self.group_names.iter().zip(self.weights.as_slice()) {
            weights.insert(name.clone(), json!(w));
        }
        json!({
            "weights": weights,
            "slem": self.slem,
            "regime": self.regime,
            "lambda2": self.lambda2,
            "lambda_max": self.lambda_max,
            "converged": self.converged,
            "iterations": self.iterations,
        })
    }
}

/// Default names `g0, g1, ...` for graphs without family labels.
pub fn default_group_names(groups: usize) -> Vec<String> {
    (0..groups).map(|k| format!("g{k}")).collect()
}

/// Source of `lambda_max` for a regime.
#[derive(Debug, Clone)]
enum MaxRule {
    TwoW,
    TwoWMinusLambda2,
    Induced(WeightedGraph),
    Base,
}

/// Objective value with one subgradient.
#[derive(Debug, Clone)]
pub(crate) struct Eval {
    pub s: f64,
    pub lambda2: f64,
    pub lambda_max: f64,
    pub grad: Vec<f64>,
}

/// The base graph together with everything the regime needs, built once.
#[derive(Debug, Clone)]
pub(crate) struct Problem {
    base: WeightedGraph,
    regime: Regime,
    rule: MaxRule,
    counts: Vec<usize>,
}

impl Problem {
    pub fn new(base: &WeightedGraph, regime: Regime, d: Option<usize>) -> Result<Self> {
        if base.n() < 2 {
            return Err(invalid!("base graph needs at least two vertices"));
        }
        if !crate::graphs::is_connected(base) {
            return Err(Error::PreconditionViolation("base graph must be connected".into()));
        }
        let rule = match regime {
            Regime::AtMostDSquared => MaxRule::TwoW,
            Regime::DSquaredPlusOne => MaxRule::TwoWMinusLambda2,
            Regime::Classical => MaxRule::Base,
            Regime::General => {
                let d = d.ok_or_else(|| invalid!("general regime needs the qudit dimension d"))?;
                let p = least_dominant_feasible(base.n(), d)?;
                let nu = crate::combinatorics::tabloid_count(&p);
                if nu > MAX_DENSE_INDUCED_VERTICES as u128 {
                    return Err(Error::Resource(format!(
                        "induced graph of {p} has {nu} vertices; dense evaluation is limited to {MAX_DENSE_INDUCED_VERTICES}"
                    )));
                }
                MaxRule::Induced(induced_graph(base, &p)?.graph)
            }
        };
        Ok(Self { base: base.clone(), regime, rule, counts: base.group_sizes() })
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn base(&self) -> &WeightedGraph {
        &self.base
    }

    pub fn groups(&self) -> usize {
        self.base.groups()
    }

    pub fn eval(&self, w: &WeightVector) -> Result<Eval> {
        let eig = deflated_eigen(&self.base, w)?;
        let (l2, g2) = bottom(&self.base, &eig);
        let two_w = 2.0 * total_weight(&self.base, w)?;
        let two_w_grad: Vec<f64> = self.counts.iter().map(|&c| 2.0 * c as f64).collect();
        let (lmax, gmax) = match &self.rule {
            MaxRule::TwoW => (two_w, two_w_grad),
            MaxRule::TwoWMinusLambda2 => (two_w - l2, two_w_grad.iter().zip(&g2).map(|(a, b)| a - b).collect()),
            MaxRule::Base => top(&self.base, &eig),
            MaxRule::Induced(g) => top(g, &deflated_eigen(g, w)?),
        };
        let low = 1.0 - l2;
        let high = lmax - 1.0;
        let (s, grad) = if low >= high { (low, g2.iter().map(|x| -x).collect()) } else { (high, gmax) };
        Ok(Eval { s, lambda2: l2, lambda_max: lmax, grad })
    }
}

/// Eigen-decomposition of `L + beta J / n` with `beta` above every eigenvalue
/// of `L`. The constant mode moves to the top of the spectrum and the rest is
/// the spectrum of `L` on the complement of the constant vector, which stays
/// meaningful when weights are negative.
fn deflated_eigen(graph: &WeightedGraph, w: &WeightVector) -> Result<SymEigen> {
    let mut l = laplacian(graph, w)?;
    let n = graph.n();
    let beta = 1.0 + 4.0 * graph.edge_weights(w)?.iter().map(|x| x.abs()).sum::<f64>();
    l.add_scalar_mut(beta / n as f64);
    sym_eigen(&l, EIG_TOL)
}

/// `sum_{e in g} (v_i - v_j)^2` for a unit vector `v`, per group, averaged
/// over the listed eigenvectors.
fn cluster_gradient(graph: &WeightedGraph, eig: &SymEigen, members: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; graph.groups()];
    let scale = 1.0 / members.len() as f64;
    for &k in members {
        let v = eig.vectors.column(k);
        for e in graph.edges() {
            let diff = v[e.i] - v[e.j];
            out[e.group] += scale * diff * diff;
        }
    }
    out
}

/// Algebraic connectivity and a supergradient of it.
fn bottom(graph: &WeightedGraph, eig: &SymEigen) -> (f64, Vec<f64>) {
    let n = eig.values.len();
    let l2 = eig.values[0];
    let members: Vec<usize> = (0..n - 1).filter(|&k| eig.values[k] <= l2 + CLUSTER_TOL).collect();
    (l2, cluster_gradient(graph, eig, &members))
}

/// Largest eigenvalue off the constant mode and a subgradient of it.
fn top(graph: &WeightedGraph, eig: &SymEigen) -> (f64, Vec<f64>) {
    let n = eig.values.len();
    if n < 2 {
        return (0.0, vec![0.0; graph.groups()]);
    }
    let lmax = eig.values[n - 2];
    let members: Vec<usize> = (0..n - 1).filter(|&k| eig.values[k] >= lmax - CLUSTER_TOL).collect();
    (lmax, cluster_gradient(graph, eig, &members))
}

/// `(s, lambda2, lambda_max)` for `N` qudits of dimension `d` on `base`.
pub fn objective(base: &WeightedGraph, w: &WeightVector, n: usize, d: usize) -> Result<(f64, f64, f64)> {
    if n != base.n() {
        return Err(invalid!("N={n} does not match the base graph's {} vertices", base.n()));
    }
    let regime = regime_of(n, d)?;
    let e = Problem::new(base, regime, Some(d))?.eval(w)?;
    Ok((e.s, e.lambda2, e.lambda_max))
}

/// `(s, lambda2, lambda_max)` under an explicit regime. `d` is needed only for
/// [`Regime::General`].
pub fn objective_in(
    base: &WeightedGraph,
    w: &WeightVector,
    regime: Regime,
    d: Option<usize>,
) -> Result<(f64, f64, f64)> {
    let e = Problem::new(base, regime, d)?.eval(w)?;
    Ok((e.s, e.lambda2, e.lambda_max))
}
