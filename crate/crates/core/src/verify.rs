//! Randomised checks of the structural claims behind the partition
//! decomposition: shared spectral gap across partitions, spectrum
//! containment along the dominance order, the bipartite `(1,...,1)` graph,
//! the complete-graph eigenvalues and the conjugation sign flip.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{conjugate, enumerate_partitions, hasse_covers, Partition};
use crate::error::{invalid, Error, Result};
use crate::exec::Exec;
use crate::graphs::{
    build_family, laplacian, random_connected, random_weights, total_weight, FamilySpec, WeightVector, WeightedGraph,
};
use crate::scheme::{complete_induced_spectrum, transposition_eigenvalue};
use crate::schreier::induced_laplacian;
use crate::spectra::{lambda2, spectrum_contains, sym_eigenvalues, Spectrum, CHECK_TOL, EIG_TOL};

/// Largest `N` for the claims that decompose every induced graph densely.
pub const MAX_SPECTRAL_N: usize = 6;
/// Largest `N` for the integer duality check.
pub const MAX_DUALITY_N: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    /// Every partition except `(N)` has the base graph's spectral gap.
    Aldous,
    /// Lower partitions in the dominance order contain the spectra of the
    /// partitions covering them.
    Containment,
    /// The `(1,...,1)` graph is bipartite and its top Laplacian eigenvalue is `2W`.
    Bipartite,
    /// Complete-base induced spectra are `w (C(N,2) - P_n')`, `n'` dominating.
    Scheme,
    /// `P(n') = -P(n)` for conjugate partitions.
    Duality,
}

impl std::fmt::Display for Claim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Claim::Aldous => "aldous",
            Claim::Containment => "containment",
            Claim::Bipartite => "bipartite",
            Claim::Scheme => "scheme",
            Claim::Duality => "duality",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Claim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aldous" => Ok(Claim::Aldous),
            "containment" => Ok(Claim::Containment),
            "bipartite" => Ok(Claim::Bipartite),
            "scheme" => Ok(Claim::Scheme),
            "duality" => Ok(Claim::Duality),
            _ => Err(invalid!("unknown claim {s:?}")),
        }
    }
}

/// One random instance (or, for duality, one partition).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub trial: usize,
    pub label: String,
    pub max_deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimReport {
    pub claim: Claim,
    #[serde(rename = "N")]
    pub n: usize,
    pub seed: u64,
    pub tol: f64,
    pub results: Vec<TrialResult>,
    pub max_deviation: f64,
    pub pass: bool,
}

/// Runs `trials` random instances of `claim` on `N` vertices. Trial `t`
/// uses seed `seed + t`. Duality ignores `trials` and checks every
/// partition of `N`.
pub fn verify_claim(claim: Claim, n: usize, trials: usize, seed: u64, exec: Exec) -> Result<ClaimReport> {
    let tol = CHECK_TOL;
    if n < 2 {
        return Err(invalid!("claims need N >= 2"));
    }
    let limit = if claim == Claim::Duality { MAX_DUALITY_N } else { MAX_SPECTRAL_N };
    if n > limit {
        return Err(Error::Resource(format!("{claim} check is limited to N <= {limit}")));
    }
    let raw: Vec<(String, f64)> = match claim {
        Claim::Duality => enumerate_partitions(n, None)?
            .iter()
            .map(|p| (p.to_string(), (transposition_eigenvalue(&conjugate(p)) + transposition_eigenvalue(p)) as f64))
            .collect(),
        _ => {
            let covers = if claim == Claim::Containment { hasse_covers(n)? } else { Vec::new() };
            exec.map_range(trials, |t| {
                let s = seed.wrapping_add(t as u64);
                let dev = match claim {
                    Claim::Aldous => aldous(n, s),
                    Claim::Containment => containment(n, s, &covers),
                    Claim::Bipartite => bipartite(n, s),
                    Claim::Scheme => scheme(n, s),
                    Claim::Duality => unreachable!(),
                }?;
                Ok((format!("seed {s}"), dev))
            })
            .into_iter()
            .collect::<Result<_>>()?
        }
    };
    let results: Vec<TrialResult> = raw
        .into_iter()
        .enumerate()
        .map(|(trial, (label, dev))| TrialResult { trial, label, max_deviation: dev, pass: dev <= tol })
        .collect();
    let max_deviation = results.iter().fold(0.0, |m: f64, r| m.max(r.max_deviation));
    let pass = results.iter().all(|r| r.pass);
    Ok(ClaimReport { claim, n, seed, tol, results, max_deviation, pass })
}

/// Random connected base with weights in `[0.1, 1)`.
fn instance(n: usize, seed: u64) -> (WeightedGraph, WeightVector) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_connected(n, 0.35, &mut rng);
    let w = random_weights(&g, 0.1, 1.0, &mut rng);
    (g, w)
}

fn spectrum(base: &WeightedGraph, p: &Partition, w: &WeightVector) -> Result<Spectrum> {
    sym_eigenvalues(&induced_laplacian(base, p, w)?, EIG_TOL)
}

/// Largest distance from a value of `xs` to the nearest value of `ys`.
fn one_sided_gap(xs: &[f64], ys: &[f64]) -> f64 {
    xs.iter().map(|x| ys.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
}

fn aldous(n: usize, seed: u64) -> Result<f64> {
    let (g, w) = instance(n, seed);
    let gap = lambda2(&laplacian(&g, &w)?)?;
    let mut dev: f64 = 0.0;
    for p in enumerate_partitions(n, None)? {
        if p.len() == 1 {
            continue;
        }
        dev = dev.max((lambda2(&induced_laplacian(&g, &p, &w)?)? - gap).abs());
    }
    Ok(dev)
}

fn containment(n: usize, seed: u64, covers: &[(Partition, Partition)]) -> Result<f64> {
    let (g, w) = instance(n, seed);
    let mut dev: f64 = 0.0;
    for (upper, lower) in covers {
        let big = spectrum(&g, lower, &w)?;
        let small = spectrum(&g, upper, &w)?;
        if !spectrum_contains(&big, &small, CHECK_TOL) {
            // finite so the report stays valid JSON
            return Ok(f64::MAX);
        }
        dev = dev.max(one_sided_gap(small.values(), big.values()));
    }
    Ok(dev)
}

fn bipartite(n: usize, seed: u64) -> Result<f64> {
    let (g, w) = instance(n, seed);
    let two_w = 2.0 * total_weight(&g, &w)?;
    let spec = spectrum(&g, &Partition::sign(n), &w)?;
    let v = spec.values();
    // A = W I - L here, so a symmetric adjacency spectrum means the Laplacian
    // spectrum is symmetric about W
    let mut dev = (spec.max() - two_w).abs();
    for i in 0..v.len() {
        dev = dev.max((v[i] + v[v.len() - 1 - i] - two_w).abs());
    }
    Ok(dev)
}

fn scheme(n: usize, seed: u64) -> Result<f64> {
    let base = build_family(&FamilySpec::Complete { n })?.graph;
    let w = 0.1 + 0.9 * (seed % 1000) as f64 / 1000.0;
    let wv = WeightVector(vec![w]);
    let mut dev: f64 = 0.0;
    for p in enumerate_partitions(n, None)? {
        let direct = spectrum(&base, &p, &wv)?.distinct(1e-7);
        let allowed = complete_induced_spectrum(n, &p, w)?;
        dev = dev.max(one_sided_gap(&direct, &allowed.distinct)).max(one_sided_gap(&allowed.distinct, &direct));
        if let Some(multi) = allowed.multiset {
            let direct = spectrum(&base, &p, &wv)?;
            for (a, b) in direct.values().iter().zip(multi.values()) {
                dev = dev.max((a - b).abs());
            }
        }
    }
    Ok(dev)
}
