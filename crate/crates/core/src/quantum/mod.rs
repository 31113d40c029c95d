//! Dense density-matrix simulator for the swap consensus map
//! `rho <- rho + sum_e w_e (U_e rho U_e' - rho)`.
//!
//! Basis states of `N` qudits are indexed with qudit 1 as the most
//! significant digit: `|a_1 ... a_N>` sits at `sum_j a_j d^(N-j)`. Swaps are
//! applied as index permutations rather than matrix products.

mod gell_mann;

use itertools::Itertools;
use nalgebra::{Complex, DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::graphs::{WeightVector, WeightedGraph};

pub use gell_mann::{
    component_step, decompose, gell_mann_basis, recompose, verify_component_dynamics, CoeffTensor, ComponentReport,
    GellMannBasis,
};

pub type C64 = Complex<f64>;

/// Largest state dimension `d^N` the dense simulator accepts.
pub const MAX_STATE_DIM: usize = 512;
/// Largest `N` for explicit symmetrisation over `S_N`.
pub const MAX_SYMMETRIZE_N: usize = 7;
/// Distances below this are treated as converged when estimating rates.
pub const DISTANCE_FLOOR: f64 = 1e-13;

const STATE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;
const CPTP_TOL: f64 = 1e-12;

fn state_dim(n: usize, d: usize) -> Result<usize> {
    if n < 1 || d < 2 {
        return Err(invalid!("need N >= 1 and d >= 2, got N={n}, d={d}"));
    }
    let mut dim: usize = 1;
    for _ in 0..n {
        dim = dim.saturating_mul(d);
        if dim > MAX_STATE_DIM {
            return Err(Error::Resource(format!("state dimension {d}^{n} exceeds {MAX_STATE_DIM}")));
        }
    }
    Ok(dim)
}

/// Validated state of `N` qudits of dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    d: usize,
    mat: DMatrix<C64>,
}

/// Deviations of a matrix from the density-matrix conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateCheck {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl DensityMatrix {
    /// Checks Hermiticity and unit trace to 1e-12 and positivity to -1e-10.
    pub fn new(mat: DMatrix<C64>, n: usize, d: usize) -> Result<Self> {
        let rho = Self::unchecked(mat, n, d)?;
        let c = rho.check();
        if c.hermiticity_error > STATE_TOL {
            return Err(invalid!("matrix is not Hermitian (error {:e})", c.hermiticity_error));
        }
        if c.trace_error > STATE_TOL {
            return Err(invalid!("trace differs from 1 by {:e}", c.trace_error));
        }
        if c.min_eigenvalue < -PSD_TOL {
            return Err(invalid!("matrix has eigenvalue {:e}", c.min_eigenvalue));
        }
        Ok(rho)
    }

    /// Only checks dimensions.
    pub(crate) fn unchecked(mat: DMatrix<C64>, n: usize, d: usize) -> Result<Self> {
        let dim = state_dim(n, d)?;
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(invalid!(
                "expected a {dim}x{dim} matrix for N={n}, d={d}, got {}x{}",
                mat.nrows(),
                mat.ncols()
            ));
        }
        Ok(Self { n, d, mat })
    }

    pub fn maximally_mixed(n: usize, d: usize) -> Result<Self> {
        let dim = state_dim(n, d)?;
        Self::unchecked(DMatrix::identity(dim, dim) / C64::from(dim as f64), n, d)
    }

    /// `G G' / tr(G G')` with complex Gaussian `G`.
    pub fn random(n: usize, d: usize, seed: u64) -> Result<Self> {
        let dim = state_dim(n, d)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(dim, dim, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        let mut m = &g * g.adjoint();
        let tr = m.trace();
        m /= tr;
        // exact Hermiticity
        let m = (&m + m.adjoint()) * C64::from(0.5);
        Self::unchecked(m, n, d)
    }

    /// Pure product state `|a_1 ... a_N>`.
    pub fn basis_state(digits: &[usize], d: usize) -> Result<Self> {
        let n = digits.len();
        let dim = state_dim(n, d)?;
        if digits.iter().any(|&a| a >= d) {
            return Err(invalid!("basis digits must be below d={d}"));
        }
        let x = digits.iter().fold(0, |acc, &a| acc * d + a);
        let mut m = DMatrix::zeros(dim, dim);
        m[(x, x)] = C64::from(1.0);
        Self::unchecked(m, n, d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut err: f64 = 0.0;
        for i in 0..dim {
            for j in i..dim {
                err = err.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        err
    }

    /// Eigenvalues of the Hermitian part, ascending. Uses nalgebra's complex
    /// Hermitian solver, independent of the real solver in `spectra`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.mat + self.mat.adjoint()) * C64::from(0.5);
        let mut v: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn check(&self) -> StateCheck {
        StateCheck {
            trace_error: (self.trace() - C64::from(1.0)).norm(),
            hermiticity_error: self.hermiticity_error(),
            min_eigenvalue: self.eigenvalues()[0],
        }
    }

    /// Frobenius distance.
    pub fn distance(&self, other: &DensityMatrix) -> f64 {
        (&self.mat - &other.mat).norm()
    }

    fn same_shape(&self, other: &DensityMatrix) -> Result<()> {
        if self.n != other.n || self.d != other.d {
            return Err(invalid!("states have different shapes"));
        }
        Ok(())
    }

    /// `{"N", "d", "entries": [[[re, im], ...], ...]}`, rows in basis order.
    pub fn to_json_value(&self) -> Value {
        let rows: Vec<Value> = (0..self.dim())
            .map(|i| Value::Array((0..self.dim()).map(|j| json!([self.mat[(i, j)].re, self.mat[(i, j)].im])).collect()))
            .collect();
        json!({ "N": self.n, "d": self.d, "entries": rows })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| invalid!("state JSON: {e}"))?;
        let field = |k: &str| {
            v.get(k)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| invalid!("state JSON needs integer {k:?}"))
        };
        let (n, d) = (field("N")?, field("d")?);
        let dim = state_dim(n, d)?;
        let rows =
            v.get("entries").and_then(Value::as_array).ok_or_else(|| invalid!("state JSON needs \"entries\""))?;
        if rows.len() != dim {
            return Err(invalid!("expected {dim} rows, got {}", rows.len()));
        }
        let mut m = DMatrix::zeros(dim, dim);
        for (i, row) in rows.iter().enumerate() {
            let row =
                row.as_array().filter(|r| r.len() == dim).ok_or_else(|| invalid!("row {i} must have {dim} entries"))?;
            for (j, e) in row.iter().enumerate() {
                let pair = e
                    .as_array()
                    .filter(|p| p.len() == 2)
                    .and_then(|p| Some(C64::new(p[0].as_f64()?, p[1].as_f64()?)))
                    .ok_or_else(|| invalid!("entry ({i},{j}) must be [re, im]"))?;
                m[(i, j)] = pair;
            }
        }
        Self::new(m, n, d)
    }
}

/// Basis permutation `x -> x` with the digits of qudits `j` and `k` (0-based)
/// exchanged. It is an involution.
fn swap_permutation(j: usize, k: usize, d: usize, n: usize, dim: usize) -> Vec<usize> {
    let pj = d.pow((n - 1 - j) as u32);
    let pk = d.pow((n - 1 - k) as u32);
    (0..dim)
        .map(|x| {
            let (aj, ak) = ((x / pj) % d, (x / pk) % d);
            x - aj * pj - ak * pk + ak * pj + aj * pk
        })
        .collect()
}

/// Basis permutation induced by sending qudit `i` to position `sigma[i]`.
fn qudit_permutation(sigma: &[usize], d: usize, dim: usize) -> Vec<usize> {
    let n = sigma.len();
    let mut digits = vec![0; n];
    let mut moved = vec![0; n];
    (0..dim)
        .map(|x| {
            let mut y = x;
            for slot in digits.iter_mut().rev() {
                *slot = y % d;
                y /= d;
            }
            for i in 0..n {
                moved[sigma[i]] = digits[i];
            }
            moved.iter().fold(0, |acc, &a| acc * d + a)
        })
        .collect()
}

/// `P rho P'` for the permutation matrix `P|x> = |perm[x]>`.
fn conjugate(m: &DMatrix<C64>, perm: &[usize]) -> DMatrix<C64> {
    let mut inv = vec![0; perm.len()];
    for (x, &y) in perm.iter().enumerate() {
        inv[y] = x;
    }
    DMatrix::from_fn(m.nrows(), m.ncols(), |x, y| m[(inv[x], inv[y])])
}

/// Unitary exchanging tensor factors `j < k` (1-based) of `N` qudits.
pub fn swap_unitary(j: usize, k: usize, d: usize, n: usize) -> Result<DMatrix<C64>> {
    if !(1 <= j && j < k && k <= n) {
        return Err(invalid!("need 1 <= j < k <= N, got j={j}, k={k}, N={n}"));
    }
    let dim = state_dim(n, d)?;
    let perm = swap_permutation(j - 1, k - 1, d, n, dim);
    let mut u = DMatrix::zeros(dim, dim);
    for (x, &y) in perm.iter().enumerate() {
        u[(y, x)] = C64::from(1.0);
    }
    Ok(u)
}

/// The consensus map for one base graph and weight vector, with the swap
/// permutations precomputed.
#[derive(Debug, Clone)]
pub struct ConsensusMap {
    n: usize,
    d: usize,
    stay: f64,
    swaps: Vec<(f64, Vec<usize>)>,
}

impl ConsensusMap {
    /// Requires `w >= 0` and `W <= 1` so the map is a random-unitary channel.
    pub fn new(base: &WeightedGraph, w: &WeightVector, d: usize) -> Result<Self> {
        Self::build(base, w, d, false)
    }

    /// Skips the CPTP check, for experiments with classical weights.
    pub fn new_unsafe(base: &WeightedGraph, w: &WeightVector, d: usize) -> Result<Self> {
        Self::build(base, w, d, true)
    }

    fn build(base: &WeightedGraph, w: &WeightVector, d: usize, allow_unsafe: bool) -> Result<Self> {
        let n = base.n();
        let dim = state_dim(n, d)?;
        let weights = base.edge_weights(w)?;
        let total: f64 = weights.iter().sum();
        if !allow_unsafe {
            if let Some(x) = weights.iter().find(|&&x| x.is_nan() || x < -CPTP_TOL) {
                return Err(Error::PreconditionViolation(format!(
                    "negative edge weight {x} breaks complete positivity"
                )));
            }
            if total > 1.0 + CPTP_TOL {
                return Err(Error::PreconditionViolation(format!("total weight {total} exceeds 1")));
            }
        }
        let swaps = base
            .edges()
            .iter()
            .zip(&weights)
            .filter(|(_, &x)| x != 0.0)
            .map(|(e, &x)| (x, swap_permutation(e.i, e.j, d, n, dim)))
            .collect();
        Ok(Self { n, d, stay: 1.0 - total, swaps })
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.n != self.n || rho.d != self.d {
            return Err(invalid!("state has N={}, d={}; map expects N={}, d={}", rho.n, rho.d, self.n, self.d));
        }
        let m = &rho.mat;
        let out = DMatrix::from_fn(m.nrows(), m.ncols(), |x, y| {
            let mut acc = m[(x, y)] * self.stay;
            for (w, p) in &self.swaps {
                acc += m[(p[x], p[y])] * *w;
            }
            acc
        });
        Ok(DensityMatrix { n: self.n, d: self.d, mat: out })
    }
}

/// One step of the consensus map with the CPTP precondition enforced.
pub fn step(rho: &DensityMatrix, base: &WeightedGraph, w: &WeightVector) -> Result<DensityMatrix> {
    check_base(rho, base)?;
    ConsensusMap::new(base, w, rho.d)?.apply(rho)
}

/// One step without the CPTP check.
pub fn step_unsafe(rho: &DensityMatrix, base: &WeightedGraph, w: &WeightVector) -> Result<DensityMatrix> {
    check_base(rho, base)?;
    ConsensusMap::new_unsafe(base, w, rho.d)?.apply(rho)
}

fn check_base(rho: &DensityMatrix, base: &WeightedGraph) -> Result<()> {
    if rho.n != base.n() {
        return Err(invalid!("state has N={} qudits but the graph has {} vertices", rho.n, base.n()));
    }
    Ok(())
}

/// `(1/N!) sum_pi U_pi rho U_pi'`.
pub fn consensus_state(rho0: &DensityMatrix) -> Result<DensityMatrix> {
    let (n, d) = (rho0.n, rho0.d);
    if n > MAX_SYMMETRIZE_N {
        return Err(Error::Resource(format!("symmetrising over S_{n} is limited to N <= {MAX_SYMMETRIZE_N}")));
    }
    let dim = rho0.dim();
    let mut acc = DMatrix::<C64>::zeros(dim, dim);
    let mut count = 0usize;
    for sigma in (0..n).permutations(n) {
        let perm = qudit_permutation(&sigma, d, dim);
        acc += conjugate(&rho0.mat, &perm);
        count += 1;
    }
    acc /= C64::from(count as f64);
    Ok(DensityMatrix { n, d, mat: acc })
}

/// Distances to the consensus state along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    /// `||rho_t - rho*||_F` for `t = 0..=T`.
    pub distances: Vec<f64>,
    pub rate_estimate: Option<f64>,
    pub max_trace_drift: f64,
    pub max_hermiticity_error: f64,
}

impl Trajectory {
    pub fn steps(&self) -> usize {
        self.distances.len() - 1
    }

    /// `t,distance` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,distance\n");
        for (t, x) in self.distances.iter().enumerate() {
            s.push_str(&format!("{t},{}\n", crate::fmt_sig(*x)));
        }
        s
    }

    /// Summary against a predicted SLEM; passes when the estimate is within
    /// `rel_tol` of the prediction (relative).
    pub fn summary(&self, slem_predicted: f64, rel_tol: f64) -> Value {
        let pass = self.rate_estimate.map(|r| (r - slem_predicted).abs() <= rel_tol * slem_predicted.abs().max(1e-300));
        json!({
            "steps": self.steps(),
            "initial_distance": self.distances[0],
            "final_distance": self.distances[self.steps()],
            "rate_estimate": self.rate_estimate,
            "slem_predicted": slem_predicted,
            "rel_tol": rel_tol,
            "pass": pass,
            "max_trace_drift": self.max_trace_drift,
            "max_hermiticity_error": self.max_hermiticity_error,
        })
    }
}

/// Geometric mean of `d_t / d_(t-1)` over the last `max(T/2, 1)` steps,
/// skipping ratios that touch a distance below [`DISTANCE_FLOOR`].
pub fn rate_estimate(distances: &[f64]) -> Option<f64> {
    let t = distances.len().checked_sub(1)?;
    if t == 0 {
        return None;
    }
    let window = (t / 2).max(1);
    let logs: Vec<f64> = (t + 1 - window..=t)
        .filter(|&s| distances[s] >= DISTANCE_FLOOR && distances[s - 1] >= DISTANCE_FLOOR)
        .map(|s| (distances[s] / distances[s - 1]).ln())
        .collect();
    if logs.is_empty() {
        return None;
    }
    Some((logs.iter().sum::<f64>() / logs.len() as f64).exp())
}

/// Runs `steps` iterations from `rho0` and records distances to its
/// consensus state.
pub fn simulate(rho0: &DensityMatrix, base: &WeightedGraph, w: &WeightVector, steps: usize) -> Result<Trajectory> {
    check_base(rho0, base)?;
    run(rho0, &ConsensusMap::new(base, w, rho0.d)?, steps)
}

/// As [`simulate`] without the CPTP check.
pub fn simulate_unsafe(
    rho0: &DensityMatrix,
    base: &WeightedGraph,
    w: &WeightVector,
    steps: usize,
) -> Result<Trajectory> {
    check_base(rho0, base)?;
    run(rho0, &ConsensusMap::new_unsafe(base, w, rho0.d)?, steps)
}

fn run(rho0: &DensityMatrix, map: &ConsensusMap, steps: usize) -> Result<Trajectory> {
    let target = consensus_state(rho0)?;
    rho0.same_shape(&target)?;
    let tr0 = rho0.trace();
    let mut rho = rho0.clone();
    let mut distances = Vec::with_capacity(steps + 1);
    distances.push(rho.distance(&target));
    let (mut drift, mut herm): (f64, f64) = (0.0, rho.hermiticity_error());
    for _ in 0..steps {
        rho = map.apply(&rho)?;
        distances.push(rho.distance(&target));
        drift = drift.max((rho.trace() - tr0).norm());
        herm = herm.max(rho.hermiticity_error());
    }
    Ok(Trajectory {
        rate_estimate: rate_estimate(&distances),
        distances,
        max_trace_drift: drift,
        max_hermiticity_error: herm,
    })
}
