//! Generalised Gell-Mann expansion `rho = d^-N sum_mu rho_mu lambda_mu1 x ... x lambda_muN`
//! and the coefficient form of the consensus step.
//!
//! Coefficients are `rho_mu = tr(rho Lambda_mu) (d/2)^(#nonzero mu_j)` so that
//! `rho_0...0 = tr rho = 1` for every `d`.

use nalgebra::DMatrix;
use serde::Serialize;

use super::{ConsensusMap, DensityMatrix, C64};
use crate::error::{invalid, Result};
use crate::exec::Exec;
use crate::graphs::{WeightVector, WeightedGraph};

/// `lambda_0 = I` followed by the `d^2 - 1` traceless generators in the
/// usual order: for each `k`, the symmetric and antisymmetric pairs `(j, k)`
/// with `j < k`, then the diagonal `D_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GellMannBasis {
    d: usize,
    mats: Vec<DMatrix<C64>>,
}

impl GellMannBasis {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn matrices(&self) -> &[DMatrix<C64>] {
        &self.mats
    }

    pub fn get(&self, mu: usize) -> &DMatrix<C64> {
        &self.mats[mu]
    }
}

pub fn gell_mann_basis(d: usize) -> Result<GellMannBasis> {
    if d < 2 {
        return Err(invalid!("Gell-Mann basis needs d >= 2, got {d}"));
    }
    let one = C64::from(1.0);
    let i = C64::new(0.0, 1.0);
    let mut mats = vec![DMatrix::identity(d, d)];
    for k in 1..d {
        for j in 0..k {
            let mut s = DMatrix::zeros(d, d);
            s[(j, k)] = one;
            s[(k, j)] = one;
            mats.push(s);
            let mut a = DMatrix::zeros(d, d);
            a[(j, k)] = -i;
            a[(k, j)] = i;
            mats.push(a);
        }
        let kf = k as f64;
        let scale = (2.0 / (kf * (kf + 1.0))).sqrt();
        let mut diag = DMatrix::zeros(d, d);
        for j in 0..k {
            diag[(j, j)] = C64::from(scale);
        }
        diag[(k, k)] = C64::from(-kf * scale);
        mats.push(diag);
    }
    Ok(GellMannBasis { d, mats })
}

/// Real coefficients `rho_mu`, flattened with `mu_1` most significant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffTensor {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl CoeffTensor {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    fn modes(&self) -> usize {
        self.d * self.d
    }

    pub fn index(&self, mu: &[usize]) -> usize {
        mu.iter().fold(0, |acc, &m| acc * self.modes() + m)
    }

    pub fn get(&self, mu: &[usize]) -> f64 {
        self.data[self.index(mu)]
    }

    /// Digits of a flat index.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let m = self.modes();
        let mut mu = vec![0; self.n];
        for slot in mu.iter_mut().rev() {
            *slot = flat % m;
            flat /= m;
        }
        mu
    }

    /// The tensor with indices `j` and `k` (0-based) interchanged.
    pub fn swap_indices(&self, j: usize, k: usize) -> CoeffTensor {
        let perm = index_swap(self.n, self.modes(), j, k);
        CoeffTensor { n: self.n, d: self.d, data: perm.iter().map(|&x| self.data[x]).collect() }
    }

    pub fn max_abs_diff(&self, other: &CoeffTensor) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// `perm[x]` is `x` with digits `j`, `k` of base `m` exchanged.
fn index_swap(n: usize, m: usize, j: usize, k: usize) -> Vec<usize> {
    let total = m.pow(n as u32);
    let pj = m.pow((n - 1 - j) as u32);
    let pk = m.pow((n - 1 - k) as u32);
    (0..total)
        .map(|x| {
            let (aj, ak) = ((x / pj) % m, (x / pk) % m);
            x - aj * pj - ak * pk + ak * pj + aj * pk
        })
        .collect()
}

/// Applies the `m x m` matrix `t` along every mode of a tensor with `n`
/// modes of size `m`.
fn apply_modes(data: &mut [C64], n: usize, m: usize, t: &DMatrix<C64>) {
    let total = data.len();
    let mut buf = vec![C64::from(0.0); m];
    for mode in 0..n {
        let stride = m.pow((n - 1 - mode) as u32);
        let block = stride * m;
        for start in (0..total).step_by(block) {
            for i in 0..stride {
                for (nu, b) in buf.iter_mut().enumerate() {
                    *b = data[start + nu * stride + i];
                }
                for mu in 0..m {
                    let mut acc = C64::from(0.0);
                    for (nu, b) in buf.iter().enumerate() {
                        acc += t[(mu, nu)] * b;
                    }
                    data[start + mu * stride + i] = acc;
                }
            }
        }
    }
}

/// Position of matrix entry `(x, y)` in the tensor whose mode `j` is the
/// pair `(a_j, b_j)` of digits of `x` and `y`.
fn pair_offsets(n: usize, d: usize) -> (Vec<usize>, Vec<usize>) {
    let m = d * d;
    let dim = d.pow(n as u32);
    let spread = |x: usize, scale: usize| {
        let mut y = x;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..n {
            out += (y % d) * scale * place;
            y /= d;
            place *= m;
        }
        out
    };
    ((0..dim).map(|x| spread(x, d)).collect(), (0..dim).map(|x| spread(x, 1)).collect())
}

fn check_basis(d: usize, basis: &GellMannBasis) -> Result<()> {
    if basis.d != d {
        return Err(invalid!("basis has d={}, state has d={d}", basis.d));
    }
    Ok(())
}

pub(crate) fn decompose_complex(rho: &DensityMatrix, basis: &GellMannBasis) -> Result<Vec<C64>> {
    let (n, d) = (rho.n(), rho.d());
    check_basis(d, basis)?;
    let m = d * d;
    let (ox, oy) = pair_offsets(n, d);
    let mut data = vec![C64::from(0.0); m.pow(n as u32)];
    let mat = rho.matrix();
    for (x, &cx) in ox.iter().enumerate() {
        for (y, &cy) in oy.iter().enumerate() {
            data[cx + cy] = mat[(x, y)];
        }
    }
    // tr(rho Lambda) = sum rho[a,b] Lambda[b,a]
    let half_d = C64::from(d as f64 / 2.0);
    let t = DMatrix::from_fn(m, m, |mu, ab| {
        let (a, b) = (ab / d, ab % d);
        let scale = if mu == 0 { C64::from(1.0) } else { half_d };
        basis.mats[mu][(b, a)] * scale
    });
    apply_modes(&mut data, n, m, &t);
    Ok(data)
}

pub fn decompose(rho: &DensityMatrix, basis: &GellMannBasis) -> Result<CoeffTensor> {
    let data = decompose_complex(rho, basis)?;
    Ok(CoeffTensor { n: rho.n(), d: rho.d(), data: data.iter().map(|c| c.re).collect() })
}

/// Inverse of [`decompose`]; the result is checked to be a density matrix.
pub fn recompose(coeffs: &CoeffTensor, basis: &GellMannBasis) -> Result<DensityMatrix> {
    let (n, d) = (coeffs.n, coeffs.d);
    check_basis(d, basis)?;
    let m = d * d;
    let mut data: Vec<C64> = coeffs.data.iter().map(|&x| C64::from(x)).collect();
    let t = DMatrix::from_fn(m, m, |ab, mu| basis.mats[mu][(ab / d, ab % d)]);
    apply_modes(&mut data, n, m, &t);
    let (ox, oy) = pair_offsets(n, d);
    let scale = 1.0 / (d.pow(n as u32) as f64);
    let dim = ox.len();
    let mat = DMatrix::from_fn(dim, dim, |x, y| data[ox[x] + oy[y]] * scale);
    DensityMatrix::new(mat, n, d)
}

/// The consensus step on coefficients: `rho_mu + sum_e w_e (rho_(mu with
/// mu_j, mu_k exchanged) - rho_mu)`.
pub fn component_step(c: &CoeffTensor, base: &WeightedGraph, w: &WeightVector) -> Result<CoeffTensor> {
    if base.n() != c.n {
        return Err(invalid!("tensor has {} indices but the graph has {} vertices", c.n, base.n()));
    }
    let weights = base.edge_weights(w)?;
    let total: f64 = weights.iter().sum();
    let mut out: Vec<f64> = c.data.iter().map(|x| x * (1.0 - total)).collect();
    for (e, &we) in base.edges().iter().zip(&weights) {
        if we == 0.0 {
            continue;
        }
        let perm = index_swap(c.n, c.modes(), e.i, e.j);
        for (o, &src) in out.iter_mut().zip(&perm) {
            *o += we * c.data[src];
        }
    }
    Ok(CoeffTensor { n: c.n, d: c.d, data: out })
}

/// Per-trial deviation between the decomposed full step and the
/// coefficient step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentReport {
    pub n: usize,
    pub d: usize,
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Compares `decompose(step(rho))` with `component_step(decompose(rho))` on
/// random states seeded `seed, seed + 1, ...`.
pub fn verify_component_dynamics(
    base: &WeightedGraph,
    w: &WeightVector,
    d: usize,
    trials: usize,
    seed: u64,
    exec: Exec,
) -> Result<ComponentReport> {
    let tol = 1e-10;
    let n = base.n();
    let map = ConsensusMap::new(base, w, d)?;
    let basis = gell_mann_basis(d)?;
    let deviations: Vec<f64> = exec
        .map_range(trials, |t| -> Result<f64> {
            let rho = DensityMatrix::random(n, d, seed.wrapping_add(t as u64))?;
            let full = decompose(&map.apply(&rho)?, &basis)?;
            let coeff = component_step(&decompose(&rho, &basis)?, base, w)?;
            Ok(full.max_abs_diff(&coeff))
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let max_deviation = deviations.iter().fold(0.0, |m: f64, &x| m.max(x));
    Ok(ComponentReport { n, d, pass: max_deviation <= tol, deviations, max_deviation, tol })
}
