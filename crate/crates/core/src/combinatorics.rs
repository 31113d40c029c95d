//! Integer partitions, dominance order and Young tabloids.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

/// Largest N for which tabloid ranking uses fixed-size stack buffers.
pub const MAX_TABLOID_LEN: usize = 20;

/// A weakly decreasing sequence of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(invalid!("partition must have at least one part"));
        }
        if parts.contains(&0) {
            return Err(invalid!("partition parts must be positive: {parts:?}"));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(invalid!("partition parts must be weakly decreasing: {parts:?}"));
        }
        Ok(Self { parts })
    }

    /// The one-row partition `(n)`.
    pub fn trivial(n: usize) -> Self {
        Self { parts: vec![n] }
    }

    /// The one-column partition `(1, ..., 1)`.
    pub fn sign(n: usize) -> Self {
        Self { parts: vec![1; n] }
    }

    /// `(n - 1, 1)`; requires `n >= 2`.
    pub fn standard(n: usize) -> Self {
        assert!(n >= 2, "(n-1,1) needs n >= 2");
        Self { parts: vec![n - 1, 1] }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn conjugate(&self) -> Partition {
        let width = self.parts[0];
        let parts = (1..=width).map(|c| self.parts.iter().take_while(|&&p| p >= c).count()).collect();
        Partition { parts }
    }

    fn prefix_sums(&self) -> impl Iterator<Item = usize> + '_ {
        self.parts.iter().scan(0, |acc, &p| {
            *acc += p;
            Some(*acc)
        })
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Outcome of comparing two partitions in dominance order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominance {
    Dominates,
    Dominated,
    Equal,
    Incomparable,
}

/// All partitions of `n`, most dominant first (reverse lexicographic).
pub fn enumerate_partitions(n: usize, max_parts: Option<usize>) -> Result<Vec<Partition>> {
    if n == 0 {
        return Err(invalid!("cannot partition zero"));
    }
    if max_parts == Some(0) {
        return Err(invalid!("max_parts must be positive"));
    }
    let limit = max_parts.unwrap_or(n);
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    fill_partitions(n, n, limit, &mut current, &mut out);
    Ok(out)
}

fn fill_partitions(remaining: usize, largest: usize, slots: usize, current: &mut Vec<usize>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition { parts: current.clone() });
        return;
    }
    if slots == 0 {
        return;
    }
    for part in (1..=largest.min(remaining)).rev() {
        // the remaining parts cannot exceed `part` each
        if part * slots < remaining {
            break;
        }
        current.push(part);
        fill_partitions(remaining - part, part, slots - 1, current, out);
        current.pop();
    }
}

pub fn conjugate(p: &Partition) -> Partition {
    p.conjugate()
}

/// Compares by prefix sums. Partitions of different totals are a caller bug.
pub fn compare_dominance(a: &Partition, b: &Partition) -> Result<Dominance> {
    if a.n() != b.n() {
        return Err(invalid!("dominance needs partitions of the same integer, got {} and {}", a.n(), b.n()));
    }
    let len = a.len().max(b.len());
    let pa: Vec<usize> = a.prefix_sums().collect();
    let pb: Vec<usize> = b.prefix_sums().collect();
    let at = |v: &[usize], i: usize| v.get(i).copied().unwrap_or_else(|| *v.last().unwrap());
    let (mut ge, mut le) = (true, true);
    for i in 0..len {
        match at(&pa, i).cmp(&at(&pb, i)) {
            Ordering::Less => ge = false,
            Ordering::Greater => le = false,
            Ordering::Equal => {}
        }
    }
    Ok(match (ge, le) {
        (true, true) => Dominance::Equal,
        (true, false) => Dominance::Dominates,
        (false, true) => Dominance::Dominated,
        (false, false) => Dominance::Incomparable,
    })
}

/// Covering pairs `(upper, lower)` of the dominance order on partitions of `n`.
pub fn hasse_covers(n: usize) -> Result<Vec<(Partition, Partition)>> {
    let all = enumerate_partitions(n, None)?;
    let m = all.len();
    let mut strictly = vec![vec![false; m]; m];
    for i in 0..m {
        for j in 0..m {
            strictly[i][j] = compare_dominance(&all[i], &all[j])? == Dominance::Dominates;
        }
    }
    let mut covers = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if strictly[i][j] && !(0..m).any(|k| strictly[i][k] && strictly[k][j]) {
                covers.push((all[i].clone(), all[j].clone()));
            }
        }
    }
    Ok(covers)
}

/// Number of tabloids of shape `p`, the multinomial `n! / (p_1! ... p_k!)`.
pub fn tabloid_count(p: &Partition) -> u128 {
    let mut result: u128 = 1;
    let mut placed = 0u128;
    for &part in p.parts() {
        for i in 1..=part as u128 {
            placed += 1;
            // running product stays an integer: C(placed, i) style accumulation
            result = result * placed / i;
        }
    }
    result
}

/// Row-assignment word of a tabloid: position `j` holds the row of `j`.
/// Symbols are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tabloid {
    word: Vec<u8>,
}

impl Tabloid {
    pub fn from_word(word: Vec<u8>, shape: &Partition) -> Result<Self> {
        let mut counts = vec![0usize; shape.len()];
        for &s in &word {
            if s == 0 || s as usize > shape.len() {
                return Err(invalid!("symbol {s} out of range for shape {shape}"));
            }
            counts[s as usize - 1] += 1;
        }
        if counts != shape.parts() {
            return Err(invalid!("word {word:?} does not fill shape {shape}"));
        }
        Ok(Self { word })
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    fn max_symbol(&self) -> u8 {
        self.word.iter().copied().max().unwrap_or(0)
    }
}

impl fmt::Display for Tabloid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.max_symbol() <= 9 {
            for s in &self.word {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            write!(f, "{:?}", self.word)
        }
    }
}

impl Serialize for Tabloid {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.max_symbol() <= 9 {
            serializer.serialize_str(&self.to_string())
        } else {
            self.word.serialize(serializer)
        }
    }
}

/// All tabloids of shape `p` in lexicographic order of their words.
pub fn enumerate_tabloids(p: &Partition) -> Vec<Tabloid> {
    let mut counts: Vec<usize> = p.parts().to_vec();
    let n = p.n();
    let mut out = Vec::with_capacity(tabloid_count(p) as usize);
    let mut word = Vec::with_capacity(n);
    fill_tabloids(&mut counts, n, &mut word, &mut out);
    out
}

fn fill_tabloids(counts: &mut [usize], left: usize, word: &mut Vec<u8>, out: &mut Vec<Tabloid>) {
    if left == 0 {
        out.push(Tabloid { word: word.clone() });
        return;
    }
    for s in 0..counts.len() {
        if counts[s] == 0 {
            continue;
        }
        counts[s] -= 1;
        word.push(s as u8 + 1);
        fill_tabloids(counts, left - 1, word, out);
        word.pop();
        counts[s] += 1;
    }
}

/// Lexicographic rank of tabloid words of a fixed shape, computed without a
/// lookup table.
#[derive(Debug, Clone)]
pub struct TabloidRanker {
    parts: Vec<usize>,
    total: u64,
    n: usize,
}

impl TabloidRanker {
    pub fn new(p: &Partition) -> Result<Self> {
        if p.n() > MAX_TABLOID_LEN {
            return Err(Error::Resource(format!("tabloid ranking supports N <= {MAX_TABLOID_LEN}, got {}", p.n())));
        }
        Ok(Self { parts: p.parts().to_vec(), total: tabloid_count(p) as u64, n: p.n() })
    }

    pub fn count(&self) -> usize {
        self.total as usize
    }

    /// Rank of a word of this shape. The word is trusted to be valid.
    pub fn rank(&self, word: &[u8]) -> usize {
        let mut counts = [0u64; MAX_TABLOID_LEN];
        for (c, &p) in counts.iter_mut().zip(&self.parts) {
            *c = p as u64;
        }
        let k = self.parts.len();
        let mut remaining = self.n as u64;
        let mut block = self.total;
        let mut rank = 0u64;
        for &sym in word {
            let s = sym as usize - 1;
            for &c in &counts[..s.min(k)] {
                rank += block * c / remaining;
            }
            block = block * counts[s] / remaining;
            counts[s] -= 1;
            remaining -= 1;
        }
        rank as usize
    }
}

/// Swaps the symbols at 1-based positions `j < k`.
pub fn transpose_tabloid(t: &Tabloid, j: usize, k: usize) -> Result<Tabloid> {
    let n = t.len();
    if j == 0 || j >= k || k > n {
        return Err(invalid!("transposition ({j},{k}) invalid for length {n}"));
    }
    let mut word = t.word.clone();
    word.swap(j - 1, k - 1);
    Ok(Tabloid { word })
}

/// Dimension of the Specht module of shape `p` (hook-length formula).
pub fn specht_dimension(p: &Partition) -> u128 {
    let conj = p.conjugate();
    let mut hooks: u128 = 1;
    for (row, &len) in p.parts().iter().enumerate() {
        for col in 0..len {
            let arm = len - col - 1;
            let leg = conj.parts()[col] - row - 1;
            hooks *= (arm + leg + 1) as u128;
        }
    }
    factorial(p.n()) / hooks
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

pub fn binomial2(n: usize) -> i64 {
    (n as i64) * (n as i64 - 1) / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn enumerate_four() {
        let all = enumerate_partitions(4, None).unwrap();
        let expected = [vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]];
        assert_eq!(all.iter().map(|q| q.parts().to_vec()).collect::<Vec<_>>(), expected);
        let two = enumerate_partitions(4, Some(2)).unwrap();
        assert_eq!(two, vec![p(&[4]), p(&[3, 1]), p(&[2, 2])]);
    }

    #[test]
    fn enumerate_five_capped_matches_brute_force() {
        // brute force: every weakly decreasing tuple of length <= 4 over 1..=5
        let mut brute = Vec::new();
        for len in 1..=4usize {
            let mut idx = vec![1usize; len];
            loop {
                if idx.iter().sum::<usize>() == 5 && idx.windows(2).all(|w| w[0] >= w[1]) {
                    brute.push(idx.clone());
                }
                let mut i = 0;
                while i < len && idx[i] == 5 {
                    idx[i] = 1;
                    i += 1;
                }
                if i == len {
                    break;
                }
                idx[i] += 1;
            }
        }
        let got: Vec<Vec<usize>> = enumerate_partitions(5, Some(4)).unwrap().into_iter().map(Vec::from).collect();
        assert_eq!(got.len(), 6);
        for b in &brute {
            assert!(got.contains(b));
        }
        assert_eq!(brute.len(), got.len());
        assert!(!got.contains(&vec![1, 1, 1, 1, 1]));
    }

    #[test]
    fn zero_arguments_are_rejected() {
        assert!(matches!(enumerate_partitions(0, None), Err(Error::InvalidArgument(_))));
        assert!(matches!(enumerate_partitions(3, Some(0)), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn partition_counts() {
        let expected = [1, 2, 3, 5, 7, 11, 15, 22];
        for (n, &count) in (1..=8).zip(expected.iter()) {
            assert_eq!(enumerate_partitions(n, None).unwrap().len(), count);
        }
    }

    #[test]
    fn conjugates() {
        assert_eq!(p(&[3, 1]).conjugate(), p(&[2, 1, 1]));
        assert_eq!(p(&[5]).conjugate(), Partition::sign(5));
        assert_eq!(p(&[2, 2]).conjugate(), p(&[2, 2]));
    }

    #[test]
    fn dominance_examples() {
        assert_eq!(compare_dominance(&p(&[3, 1]), &p(&[2, 2])).unwrap(), Dominance::Dominates);
        assert_eq!(compare_dominance(&p(&[3, 1, 1]), &p(&[2, 2, 1])).unwrap(), Dominance::Dominates);
        assert_eq!(compare_dominance(&p(&[4, 1, 1]), &p(&[3, 3])).unwrap(), Dominance::Incomparable);
        assert_eq!(compare_dominance(&p(&[2, 2]), &p(&[3, 1])).unwrap(), Dominance::Dominated);
        assert_eq!(compare_dominance(&p(&[2, 2]), &p(&[2, 2])).unwrap(), Dominance::Equal);
        assert!(compare_dominance(&p(&[2, 2]), &p(&[3])).is_err());
    }

    #[test]
    fn hasse_small() {
        let c3 = hasse_covers(3).unwrap();
        assert_eq!(c3, vec![(p(&[3]), p(&[2, 1])), (p(&[2, 1]), p(&[1, 1, 1]))]);
        let c4 = hasse_covers(4).unwrap();
        assert_eq!(c4.len(), 4);
        for (a, b) in &c4 {
            assert_eq!(compare_dominance(a, b).unwrap(), Dominance::Dominates);
        }
        // N = 6 is the first non-chain: (4,1,1) and (3,3) both cover (3,2,1)
        let c6 = hasse_covers(6).unwrap();
        let below = p(&[3, 2, 1]);
        assert_eq!(c6.iter().filter(|(_, b)| *b == below).count(), 2);
    }

    #[test]
    fn tabloids_of_two_one() {
        let ts = enumerate_tabloids(&p(&[2, 1]));
        let words: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
        assert_eq!(words, ["112", "121", "211"]);
        assert_eq!(enumerate_tabloids(&p(&[4])).len(), 1);
        assert_eq!(enumerate_tabloids(&Partition::sign(4)).len(), 24);
    }

    #[test]
    fn ranker_inverts_enumeration() {
        for n in 1..=6 {
            for shape in enumerate_partitions(n, None).unwrap() {
                let ts = enumerate_tabloids(&shape);
                assert_eq!(ts.len() as u128, tabloid_count(&shape));
                let ranker = TabloidRanker::new(&shape).unwrap();
                for (i, t) in ts.iter().enumerate() {
                    assert_eq!(ranker.rank(t.word()), i);
                }
            }
        }
    }

    #[test]
    fn transpositions() {
        let shape = p(&[2, 1]);
        let t = Tabloid::from_word(vec![1, 1, 2], &shape).unwrap();
        let s = transpose_tabloid(&t, 2, 3).unwrap();
        assert_eq!(s.to_string(), "121");
        assert_eq!(transpose_tabloid(&t, 1, 2).unwrap(), t);
        assert_eq!(transpose_tabloid(&s, 2, 3).unwrap(), t);
        assert!(transpose_tabloid(&t, 0, 2).is_err());
        assert!(transpose_tabloid(&t, 2, 4).is_err());
        assert!(transpose_tabloid(&t, 2, 2).is_err());
    }

    #[test]
    fn bad_words_are_rejected() {
        let shape = p(&[2, 1]);
        assert!(Tabloid::from_word(vec![1, 2, 2], &shape).is_err());
        assert!(Tabloid::from_word(vec![1, 1, 3], &shape).is_err());
    }

    #[test]
    fn specht_dimensions() {
        for n in 2..=8 {
            assert_eq!(specht_dimension(&Partition::standard(n)), n as u128 - 1);
            assert_eq!(specht_dimension(&Partition::trivial(n)), 1);
            assert_eq!(specht_dimension(&Partition::sign(n)), 1);
        }
        for n in 1..=6 {
            let total: u128 = enumerate_partitions(n, None).unwrap().iter().map(|q| specht_dimension(q).pow(2)).sum();
            assert_eq!(total, factorial(n));
        }
    }

    #[test]
    fn serde_forms() {
        let q = p(&[3, 1]);
        assert_eq!(serde_json::to_string(&q).unwrap(), "[3,1]");
        let back: Partition = serde_json::from_str("[3,1]").unwrap();
        assert_eq!(back, q);
        assert!(serde_json::from_str::<Partition>("[1,3]").is_err());
        let t = Tabloid::from_word(vec![2, 1, 1], &p(&[2, 1])).unwrap();
        assert_eq!(serde_json::to_string(&t).unwrap(), "\"211\"");
        let wide = Partition::sign(10);
        let w = Tabloid::from_word((1..=10).rev().collect(), &wide).unwrap();
        assert_eq!(serde_json::to_string(&w).unwrap(), "[10,9,8,7,6,5,4,3,2,1]");
    }
}
