//! Spectra of complete-graph Schreier graphs via the conjugacy-class
//! association scheme of the symmetric group.
//!
//! On the complete graph every induced Laplacian block for the irreducible
//! indexed by `n` is the scalar `w (C(N,2) - P(n))`, where `P(n)` is the
//! eigenvalue of the transposition class sum on that irreducible.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::combinatorics::{
    binomial2, compare_dominance, enumerate_partitions, factorial, specht_dimension, Dominance, Partition,
};
use crate::error::{invalid, Error, Result};
use crate::spectra::Spectrum;

/// Size of the conjugacy class with the given cycle type.
pub fn class_size(cycle_type: &Partition) -> u128 {
    let mut multiplicity: BTreeMap<usize, usize> = BTreeMap::new();
    for &part in cycle_type.parts() {
        *multiplicity.entry(part).or_default() += 1;
    }
    let centraliser: u128 = multiplicity.iter().map(|(&j, &m)| (j as u128).pow(m as u32) * factorial(m)).product();
    factorial(cycle_type.n()) / centraliser
}

/// `sum_j C(n_j, 2) - C(n'_j, 2)`.
pub fn transposition_eigenvalue(n: &Partition) -> i64 {
    let rows: i64 = n.parts().iter().map(|&x| binomial2(x)).sum();
    let cols: i64 = n.conjugate().parts().iter().map(|&x| binomial2(x)).sum();
    rows - cols
}

/// A reduced fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Fraction {
    pub num: i128,
    pub den: i128,
}

impl Fraction {
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i128;
        let sign = if den < 0 { -1 } else { 1 };
        Self { num: sign * num / g, den: sign * den / g }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Irreducible character of `n` evaluated on the transposition class.
pub fn character_of_transpositions(n: &Partition) -> Result<Fraction> {
    let total = n.n();
    if total < 2 {
        return Err(invalid!("S_1 has no transpositions"));
    }
    let dim = specht_dimension(n) as i128;
    Ok(Fraction::new(dim * transposition_eigenvalue(n) as i128, binomial2(total) as i128))
}

/// Laplacian eigenvalue contributed by the irreducible `n` on the complete
/// graph with uniform weight `w`.
pub fn complete_block_eigenvalue(n: &Partition, w: f64) -> f64 {
    w * (binomial2(n.n()) - transposition_eigenvalue(n)) as f64
}

/// Spectrum of the complete-graph induced Laplacian for shape `p`.
#[derive(Debug, Clone, Serialize)]
pub struct CompleteInducedSpectrum {
    /// Distinct eigenvalues, ascending.
    pub distinct: Vec<f64>,
    /// Full multiset, available for `(N)`, `(N-1,1)` and `(1,...,1)` only.
    pub multiset: Option<Spectrum>,
}

pub fn complete_induced_spectrum(n_total: usize, p: &Partition, w: f64) -> Result<CompleteInducedSpectrum> {
    if n_total < 2 {
        return Err(invalid!("complete graph spectrum needs N >= 2"));
    }
    if p.n() != n_total {
        return Err(invalid!("{p} is not a partition of {n_total}"));
    }
    let mut blocks = Vec::new();
    for q in enumerate_partitions(n_total, None)? {
        if matches!(compare_dominance(&q, p)?, Dominance::Dominates | Dominance::Equal) {
            blocks.push(q);
        }
    }
    let mut distinct: Vec<f64> = blocks.iter().map(|q| complete_block_eigenvalue(q, w)).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));

    let multiset = if *p == Partition::trivial(n_total) {
        Some(Spectrum::new(vec![0.0]))
    } else if *p == Partition::standard(n_total) {
        let mut v = vec![complete_block_eigenvalue(p, w); n_total - 1];
        v.push(0.0);
        Some(Spectrum::new(v))
    } else if *p == Partition::sign(n_total) {
        let mut v = Vec::new();
        for q in &blocks {
            let m = specht_dimension(q).pow(2) as usize;
            v.extend(std::iter::repeat_n(complete_block_eigenvalue(q, w), m));
        }
        Some(Spectrum::new(v))
    } else {
        None
    };
    Ok(CompleteInducedSpectrum { distinct, multiset })
}

/// Optimal uniform weight and SLEM for the complete graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompleteOptimum {
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    pub w: f64,
    pub slem: f64,
    pub argmin_partition: Partition,
}

/// Searches every partition with at most `d^2` parts for the smallest
/// transposition eigenvalue, then balances `1 - N w = w (C(N,2) - P_min) - 1`.
pub fn complete_graph_optimum(n: usize, d: usize) -> Result<CompleteOptimum> {
    if n < 2 || d < 2 {
        return Err(invalid!("complete_graph_optimum needs N >= 2 and d >= 2"));
    }
    let feasible = enumerate_partitions(n, Some(d * d))?;
    let argmin = feasible.iter().min_by_key(|q| transposition_eigenvalue(q)).expect("at least (N)").clone();
    let p_min = transposition_eigenvalue(&argmin);
    let w = 2.0 / (n as f64 + (binomial2(n) - p_min) as f64);
    Ok(CompleteOptimum { n, d, w, slem: 1.0 - n as f64 * w, argmin_partition: argmin })
}

/// Closed forms for qubits (`d = 2`), by `N mod 4`.
pub fn qubit_category_optimum(n: usize) -> Result<CompleteOptimum> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "qubit closed forms cover N >= 4 (got {n}); use complete_graph_optimum"
        )));
    }
    let nf = n as f64;
    let (w, slem) = match n % 4 {
        0 => (16.0 / (nf * (3.0 * nf + 20.0)), 1.0 - 16.0 / (3.0 * nf + 20.0)),
        2 => {
            let den = 3.0 * nf * nf + 20.0 * nf - 20.0;
            (16.0 / den, 1.0 - 16.0 * nf / den)
        }
        _ => {
            let den = 3.0 * nf * nf + 20.0 * nf - 15.0;
            (16.0 / den, 1.0 - 16.0 * nf / den)
        }
    };
    Ok(CompleteOptimum { n, d: 2, w, slem, argmin_partition: balanced_partition(n, 4) })
}

/// Parts `ceil(n/k)` and `floor(n/k)`, at most `k` of them.
pub fn balanced_partition(n: usize, k: usize) -> Partition {
    let k = k.min(n);
    let (q, r) = (n / k, n % k);
    let parts = (0..k).map(|i| q + usize::from(i < r)).filter(|&x| x > 0).collect();
    Partition::new(parts).expect("balanced parts are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use itertools::Itertools;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    /// Cycle type of a permutation given in one-line notation.
    fn cycle_type(perm: &[usize]) -> Partition {
        let mut seen = vec![false; perm.len()];
        let mut lens = Vec::new();
        for s in 0..perm.len() {
            if seen[s] {
                continue;
            }
            let (mut x, mut len) = (s, 0);
            while !seen[x] {
                seen[x] = true;
                x = perm[x];
                len += 1;
            }
            lens.push(len);
        }
        lens.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(lens).unwrap()
    }

    #[test]
    fn class_sizes() {
        assert_eq!(class_size(&p(&[2, 1, 1])), 6);
        assert_eq!(class_size(&Partition::sign(4)), 1);
        // enumerate S4 and count by cycle type
        let mut counts: BTreeMap<Vec<usize>, u128> = BTreeMap::new();
        for perm in (0..4).permutations(4) {
            *counts.entry(cycle_type(&perm).parts().to_vec()).or_default() += 1;
        }
        assert_eq!(counts[&vec![4]], 6);
        for (ty, count) in counts {
            assert_eq!(class_size(&p(&ty)), count);
        }
        for n in 1..=8 {
            let total: u128 = enumerate_partitions(n, None).unwrap().iter().map(class_size).sum();
            assert_eq!(total, factorial(n));
        }
    }

    #[test]
    fn transposition_eigenvalues() {
        for n in 2..=10 {
            assert_eq!(transposition_eigenvalue(&Partition::trivial(n)), binomial2(n));
            let expected = binomial2(n - 1) - 1;
            assert_eq!(transposition_eigenvalue(&Partition::standard(n)), expected);
            // cross-check W - w P = N w on unit weights
            assert_eq!(binomial2(n) - expected, n as i64);
        }
        for l in 1..=4 {
            let n = 4 * l;
            assert_eq!(transposition_eigenvalue(&p(&[l, l, l, l])) as i128, (n * n) as i128 / 8 - 2 * n as i128);
        }
    }

    #[test]
    fn characters() {
        for n in 2..=7 {
            assert_eq!(character_of_transpositions(&Partition::trivial(n)).unwrap(), Fraction::new(1, 1));
            assert_eq!(character_of_transpositions(&Partition::sign(n)).unwrap(), Fraction::new(-1, 1));
        }
        assert_eq!(character_of_transpositions(&p(&[2, 1])).unwrap().num, 0);
        // (3,1) is the standard representation of S4: character on a transposition is 1
        assert_eq!(character_of_transpositions(&p(&[3, 1])).unwrap(), Fraction::new(1, 1));
    }

    #[test]
    fn conjugate_negates_and_regular_trace_vanishes() {
        for n in 1..=10 {
            for q in enumerate_partitions(n, None).unwrap() {
                assert_eq!(transposition_eigenvalue(&q.conjugate()), -transposition_eigenvalue(&q));
            }
        }
        for n in 2..=7 {
            let trace: i128 = enumerate_partitions(n, None)
                .unwrap()
                .iter()
                .map(|q| (specht_dimension(q) as i128).pow(2) * transposition_eigenvalue(q) as i128)
                .sum();
            assert_eq!(trace, 0);
        }
    }

    #[test]
    fn induced_spectra() {
        let s = complete_induced_spectrum(5, &Partition::standard(5), 0.1).unwrap();
        assert_eq!(s.distinct.len(), 2);
        assert_abs_diff_eq!(s.distinct[1], 0.5, epsilon = 1e-14);
        assert_eq!(s.multiset.unwrap().len(), 5);
        let s = complete_induced_spectrum(4, &Partition::trivial(4), 0.3).unwrap();
        assert_eq!(s.distinct, vec![0.0]);
        let s = complete_induced_spectrum(3, &Partition::sign(3), 1.0).unwrap();
        assert_eq!(s.distinct, vec![0.0, 3.0, 6.0]);
        assert_eq!(s.multiset.unwrap().values(), &[0.0, 3.0, 3.0, 3.0, 3.0, 6.0]);
        assert!(complete_induced_spectrum(3, &p(&[2, 2]), 1.0).is_err());
        assert!(complete_induced_spectrum(4, &p(&[2, 2]), 1.0).unwrap().multiset.is_none());
    }

    #[test]
    fn complete_optima() {
        let o = complete_graph_optimum(4, 2).unwrap();
        assert_abs_diff_eq!(o.w, 0.125, epsilon = 1e-15);
        assert_abs_diff_eq!(o.slem, 0.5, epsilon = 1e-15);
        assert_eq!(o.argmin_partition, Partition::sign(4));
        let o = complete_graph_optimum(2, 3).unwrap();
        assert_abs_diff_eq!(o.w, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(o.slem, 0.0, epsilon = 1e-15);
        let o = complete_graph_optimum(8, 2).unwrap();
        assert_abs_diff_eq!(o.w, 1.0 / 22.0, epsilon = 1e-15);
        assert_abs_diff_eq!(o.slem, 7.0 / 11.0, epsilon = 1e-15);
        assert_eq!(o.argmin_partition, p(&[2, 2, 2, 2]));
        assert_abs_diff_eq!(o.w, 16.0 / 352.0, epsilon = 1e-15);
        assert!(complete_graph_optimum(1, 2).is_err());
    }

    #[test]
    fn qubit_forms() {
        let o = qubit_category_optimum(4).unwrap();
        assert_abs_diff_eq!(o.w, 0.125, epsilon = 1e-15);
        assert_abs_diff_eq!(o.slem, 0.5, epsilon = 1e-15);
        let o = qubit_category_optimum(5).unwrap();
        assert_abs_diff_eq!(o.w, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(o.slem, 0.5, epsilon = 1e-15);
        let o = qubit_category_optimum(6).unwrap();
        assert_abs_diff_eq!(o.w, 16.0 / 208.0, epsilon = 1e-15);
        assert_abs_diff_eq!(o.slem, 1.0 - 96.0 / 208.0, epsilon = 1e-15);
        assert!(qubit_category_optimum(3).is_err());
        for n in 4..=5 {
            let a = complete_graph_optimum(n, 2).unwrap();
            let b = qubit_category_optimum(n).unwrap();
            assert_abs_diff_eq!(a.w, b.w, epsilon = 1e-12);
            assert_abs_diff_eq!(a.slem, b.slem, epsilon = 1e-12);
        }
    }

    #[test]
    fn json_keys() {
        let v = serde_json::to_value(complete_graph_optimum(4, 2).unwrap()).unwrap();
        assert_eq!(v["N"], 4);
        assert_eq!(v["argmin_partition"], serde_json::json!([1, 1, 1, 1]));
    }
}
