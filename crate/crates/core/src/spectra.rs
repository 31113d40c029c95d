//! Dense real-symmetric eigenvalues and the spectral functionals used by the
//! optimizer: algebraic connectivity, spectral radius, SLEM, containment.
//!
//! The eigensolver is Householder tridiagonalisation followed by implicit QL
//! with Wilkinson-style shifts.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exec::Exec;

/// Default absolute tolerance on eigenvalue residuals.
pub const EIG_TOL: f64 = 1e-10;
/// Comparison tolerance used by verification checks.
pub const CHECK_TOL: f64 = 1e-8;

/// Eigenvalues sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.0[0]
    }

    pub fn max(&self) -> f64 {
        *self.0.last().expect("non-empty spectrum")
    }

    /// Distinct values, merging neighbours closer than `tol`.
    pub fn distinct(&self, tol: f64) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for &x in &self.0 {
            if out.last().is_none_or(|&y| x - y > tol) {
                out.push(x);
            }
        }
        out
    }
}

/// Eigen-decomposition with eigenvectors as columns, values ascending.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

fn check_symmetric(m: &DMatrix<f64>, tol: f64) -> Result<()> {
    if !m.is_square() {
        return Err(invalid!("matrix is {}x{}, not square", m.nrows(), m.ncols()));
    }
    let scale = max_abs(m).max(1.0);
    let n = m.nrows();
    for i in 0..n {
        for j in i + 1..n {
            if (m[(i, j)] - m[(j, i)]).abs() > tol * scale {
                return Err(invalid!("matrix not symmetric at ({i},{j})"));
            }
        }
    }
    Ok(())
}

/// Eigenvalues of a symmetric matrix.
pub fn sym_eigenvalues(m: &DMatrix<f64>, tol: f64) -> Result<Spectrum> {
    check_symmetric(m, tol)?;
    let (values, _) = decompose(m, false);
    Ok(Spectrum(values))
}

/// Eigenvalues and orthonormal eigenvectors of a symmetric matrix.
pub fn sym_eigen(m: &DMatrix<f64>, tol: f64) -> Result<SymEigen> {
    check_symmetric(m, tol)?;
    let (values, vectors) = decompose(m, true);
    Ok(SymEigen { values, vectors: vectors.expect("vectors requested") })
}

/// Spectra of many matrices, one per work item.
pub fn batch_eigenvalues(ms: &[DMatrix<f64>], tol: f64, exec: Exec) -> Result<Vec<Spectrum>> {
    exec.map(ms, |m| sym_eigenvalues(m, tol)).into_iter().collect()
}

fn decompose(m: &DMatrix<f64>, want_vectors: bool) -> (Vec<f64>, Option<DMatrix<f64>>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), want_vectors.then(|| DMatrix::zeros(0, 0)));
    }
    // row-major working copy, symmetrised
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            v[i * n + j] = 0.5 * (m[(i, j)] + m[(j, i)]);
        }
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(n, &mut v, &mut d, &mut e, want_vectors);
    tridiagonal_ql(n, &mut v, &mut d, &mut e, want_vectors);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = want_vectors.then(|| DMatrix::from_fn(n, n, |i, c| v[i * n + order[c]]));
    (values, vectors)
}

/// Householder reduction to tridiagonal form (diagonal `d`, sub-diagonal `e`).
fn tridiagonalize(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64], vectors: bool) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for x in d[..i].iter_mut() {
                *x /= scale;
                h += *x * *x;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for x in e[..i].iter_mut() {
                *x = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in j + 1..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    if !vectors {
        for j in 0..n {
            d[j] = v[at(j, j)];
        }
        e[0] = 0.0;
        return;
    }

    for i in 0..n - 1 {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL iteration on the tridiagonal matrix; accumulates rotations into
/// `v` when `vectors` is set.
fn tridiagonal_ql(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64], vectors: bool) {
    let at = |i: usize, j: usize| i * n + j;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            loop {
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for x in d[l + 2..].iter_mut() {
                    *x -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if vectors {
                        for k in 0..n {
                            let t = v[at(k, i + 1)];
                            v[at(k, i + 1)] = s * v[at(k, i)] + c * t;
                            v[at(k, i)] = c * v[at(k, i)] - s * t;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

/// Rejects matrices that are not graph Laplacians of a PSD kind.
fn check_laplacian(l: &DMatrix<f64>, tol: f64) -> Result<Spectrum> {
    let spec = sym_eigenvalues(l, tol)?;
    let scale = max_abs(l).max(1.0);
    for (i, row) in l.row_iter().enumerate() {
        if row.sum().abs() > tol * scale * l.ncols() as f64 {
            return Err(invalid!("row {i} of Laplacian does not sum to zero"));
        }
    }
    if !spec.is_empty() && spec.min() < -tol * scale * 10.0 {
        return Err(invalid!("Laplacian has negative eigenvalue {}", spec.min()));
    }
    Ok(spec)
}

/// Algebraic connectivity: the second-smallest eigenvalue.
pub fn lambda2(l: &DMatrix<f64>) -> Result<f64> {
    let spec = check_laplacian(l, EIG_TOL)?;
    if spec.len() < 2 {
        return Err(invalid!("lambda2 needs at least two vertices"));
    }
    Ok(spec.values()[1])
}

/// Laplacian spectral radius.
pub fn lambda_max(l: &DMatrix<f64>) -> Result<f64> {
    Ok(check_laplacian(l, EIG_TOL)?.max())
}

/// Spectral radius of `I - L - J/n` for a connected Laplacian, i.e.
/// `max(1 - lambda2, lambda_max - 1)`.
pub fn slem_of_weight_matrix(l: &DMatrix<f64>) -> Result<f64> {
    let spec = check_laplacian(l, EIG_TOL)?;
    if spec.len() < 2 {
        return Err(Error::DegenerateInput("single vertex has no mixing rate".into()));
    }
    let l2 = spec.values()[1];
    if l2 <= EIG_TOL {
        return Err(Error::DegenerateInput(format!("graph is disconnected (lambda2 = {l2:e})")));
    }
    Ok(slem_from(l2, spec.max()))
}

/// `max(|1 - lambda2|, |1 - lambda_max|)`, the modulus over all non-trivial
/// modes when every non-zero eigenvalue lies in `[lambda2, lambda_max]`.
pub fn slem_from(lambda2: f64, lambda_max: f64) -> f64 {
    (1.0 - lambda2).abs().max((lambda_max - 1.0).abs())
}

/// True when every value of `b` can be matched to a distinct value of `a`
/// within `tol` (multiplicities respected).
pub fn spectrum_contains(a: &Spectrum, b: &Spectrum, tol: f64) -> bool {
    if b.len() > a.len() {
        return false;
    }
    let (av, bv) = (a.values(), b.values());
    let mut i = 0;
    for &x in bv {
        while i < av.len() && av[i] < x - tol {
            i += 1;
        }
        if i == av.len() || (av[i] - x).abs() > tol {
            return false;
        }
        i += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_family, laplacian, FamilySpec, WeightVector};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn lap(spec: FamilySpec, w: &[f64]) -> DMatrix<f64> {
        let t = build_family(&spec).unwrap();
        laplacian(&t.graph, &WeightVector(w.to_vec())).unwrap()
    }

    fn assert_values(s: &Spectrum, expected: &[f64], tol: f64) {
        assert_eq!(s.len(), expected.len());
        for (x, y) in s.values().iter().zip(expected) {
            assert_abs_diff_eq!(*x, *y, epsilon = tol);
        }
    }

    #[test]
    fn identity_and_small_laplacians() {
        assert_values(&sym_eigenvalues(&DMatrix::identity(3, 3), EIG_TOL).unwrap(), &[1., 1., 1.], 1e-14);
        // char. poly of the unit P3 Laplacian: x (x - 1) (x - 3)
        let s = sym_eigenvalues(&lap(FamilySpec::Path { n: 3 }, &[1.0]), EIG_TOL).unwrap();
        assert_values(&s, &[0., 1., 3.], 1e-12);
        for n in 2..=7 {
            let w = 0.37;
            let s = sym_eigenvalues(&lap(FamilySpec::Complete { n }, &[w]), EIG_TOL).unwrap();
            let mut expected = vec![n as f64 * w; n];
            expected[0] = 0.0;
            assert_values(&s, &expected, 1e-12);
        }
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(sym_eigenvalues(&m, EIG_TOL), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn functionals() {
        let l = lap(FamilySpec::Path { n: 3 }, &[0.4]);
        assert_abs_diff_eq!(lambda2(&l).unwrap(), 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(lambda_max(&l).unwrap(), 1.2, epsilon = 1e-12);
        let p2 = lap(FamilySpec::Path { n: 2 }, &[0.5]);
        assert_abs_diff_eq!(slem_of_weight_matrix(&p2).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(slem_of_weight_matrix(&l).unwrap(), 0.6, epsilon = 1e-12);
        let k4 = lap(FamilySpec::Complete { n: 4 }, &[0.125]);
        assert_abs_diff_eq!(slem_of_weight_matrix(&k4).unwrap(), 0.5, epsilon = 1e-12);
        let disconnected = DMatrix::zeros(3, 3);
        assert!(matches!(slem_of_weight_matrix(&disconnected), Err(Error::DegenerateInput(_))));
        let not_laplacian = DMatrix::identity(3, 3);
        assert!(lambda2(&not_laplacian).is_err());
    }

    #[test]
    fn containment() {
        let a = Spectrum::new(vec![0., 1., 1., 3.]);
        assert!(spectrum_contains(&a, &Spectrum::new(vec![0., 1., 3.]), 1e-9));
        assert!(!spectrum_contains(&Spectrum::new(vec![0., 1., 3.]), &Spectrum::new(vec![0., 2.]), 1e-9));
        assert!(!spectrum_contains(&a, &Spectrum::new(vec![1., 1., 1.]), 1e-9));
    }

    #[test]
    fn eigenvectors_diagonalise() {
        let m = DMatrix::from_fn(6, 6, |i, j| ((i * 7 + j * 3) % 5) as f64 + if i == j { 2.0 } else { 0.0 });
        let m = &m + m.transpose();
        let eig = sym_eigen(&m, EIG_TOL).unwrap();
        let v = &eig.vectors;
        let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(eig.values.clone()));
        let recon = v * lambda * v.transpose();
        assert!((recon - &m).abs().max() < 1e-11);
        assert!((v.transpose() * v - DMatrix::identity(6, 6)).abs().max() < 1e-12);
    }

    fn symmetric(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
        proptest::collection::vec(-5.0f64..5.0, n * n).prop_map(move |raw| {
            let m = DMatrix::from_vec(n, n, raw);
            (&m + m.transpose()) * 0.5
        })
    }

    proptest! {
        #[test]
        fn matches_nalgebra_and_trace(m in (1usize..12).prop_flat_map(symmetric)) {
            let ours = sym_eigenvalues(&m, EIG_TOL).unwrap();
            let theirs = Spectrum::new(m.clone().symmetric_eigenvalues().iter().copied().collect());
            let scale = m.abs().max().max(1.0);
            for (x, y) in ours.values().iter().zip(theirs.values()) {
                prop_assert!((x - y).abs() <= 1e-10 * scale);
            }
            let trace: f64 = m.trace();
            let sum: f64 = ours.values().iter().sum();
            prop_assert!((trace - sum).abs() <= 1e-9 * scale * m.nrows() as f64);
        }
    }
}
