//! Weighted simple graphs whose edges carry weight-group labels.
//!
//! A weight group is an edge orbit: every edge in a group shares one weight.
//! Family constructors label groups by symmetry class so optimizers can work
//! with one variable per orbit.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub group: usize,
}

/// Undirected simple graph with grouped edges.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    groups: usize,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    groups: Option<usize>,
}

impl WeightedGraph {
    /// Builds a graph from `(i, j, group)` triples. Endpoints are normalised so
    /// that `i < j`; self-loops, duplicates and gaps in group labels are errors.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, usize)>) -> Result<Self> {
        let (out, max_group) = Self::collect_edges(n, edges)?;
        let groups = max_group.map_or(0, |m| m + 1);
        let used: BTreeSet<usize> = out.iter().map(|e| e.group).collect();
        if used.len() != groups {
            return Err(invalid!("weight groups must be labelled 0..{groups} without gaps"));
        }
        Ok(Self { n, edges: out, groups })
    }

    /// Like [`WeightedGraph::new`] but with a declared group count, some of
    /// which may carry no edge (as in induced graphs inheriting base groups).
    pub(crate) fn with_groups(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, usize)>,
        groups: usize,
    ) -> Result<Self> {
        let (out, max_group) = Self::collect_edges(n, edges)?;
        if max_group.is_some_and(|m| m >= groups) {
            return Err(invalid!("edge group out of range 0..{groups}"));
        }
        Ok(Self { n, edges: out, groups })
    }

    fn collect_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<(Vec<Edge>, Option<usize>)> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut max_group = None::<usize>;
        for (a, b, group) in edges {
            if a == b {
                return Err(invalid!("self-loop at vertex {a}"));
            }
            let (i, j) = (a.min(b), a.max(b));
            if j >= n {
                return Err(invalid!("edge ({a},{b}) out of range for {n} vertices"));
            }
            if !seen.insert((i, j)) {
                return Err(invalid!("duplicate edge ({i},{j})"));
            }
            max_group = Some(max_group.map_or(group, |m| m.max(group)));
            out.push(Edge { i, j, group });
        }
        Ok((out, max_group))
    }

    /// One group per edge, in the given order.
    pub fn ungrouped(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::new(n, edges.into_iter().enumerate().map(|(g, (i, j))| (i, j, g)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn groups(&self) -> usize {
        self.groups
    }

    /// Number of edges in each group.
    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.groups];
        for e in &self.edges {
            sizes[e.group] += 1;
        }
        sizes
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: GraphJson = serde_json::from_str(text).map_err(|e| invalid!("graph JSON: {e}"))?;
        let mut triples = Vec::with_capacity(raw.edges.len());
        let grouped = raw.edges.iter().all(|e| e.len() == 3);
        for (k, e) in raw.edges.iter().enumerate() {
            match (e.len(), grouped) {
                (3, true) => triples.push((e[0], e[1], e[2])),
                (2, false) => triples.push((e[0], e[1], k)),
                _ => return Err(invalid!("edges must all be [i,j] or all be [i,j,group]")),
            }
        }
        let g = Self::new(raw.n, triples)?;
        if let Some(groups) = raw.groups {
            if groups != g.groups {
                return Err(invalid!("declared {groups} groups but edges use {}", g.groups));
            }
        }
        Ok(g)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(GraphJson {
            n: self.n,
            edges: self.edges.iter().map(|e| vec![e.i, e.j, e.group]).collect(),
            groups: Some(self.groups),
        })
        .expect("graph serialises")
    }

    fn check_weights(&self, w: &WeightVector) -> Result<()> {
        if w.len() != self.groups {
            return Err(invalid!("weight vector has {} entries, graph has {} groups", w.len(), self.groups));
        }
        Ok(())
    }

    /// Per-edge weights expanded from group weights.
    pub fn edge_weights(&self, w: &WeightVector) -> Result<Vec<f64>> {
        self.check_weights(w)?;
        Ok(self.edges.iter().map(|e| w[e.group]).collect())
    }
}

/// One weight per group. Negative entries are permitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(pub Vec<f64>);

impl WeightVector {
    pub fn uniform(groups: usize, value: f64) -> Self {
        Self(vec![value; groups])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl std::ops::Index<usize> for WeightVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// `L = D - A` for the weighted graph.
pub fn laplacian(g: &WeightedGraph, w: &WeightVector) -> Result<DMatrix<f64>> {
    g.check_weights(w)?;
    let mut l = DMatrix::zeros(g.n, g.n);
    for e in &g.edges {
        let x = w[e.group];
        l[(e.i, e.j)] -= x;
        l[(e.j, e.i)] -= x;
        l[(e.i, e.i)] += x;
        l[(e.j, e.j)] += x;
    }
    Ok(l)
}

pub fn total_weight(g: &WeightedGraph, w: &WeightVector) -> Result<f64> {
    g.check_weights(w)?;
    Ok(g.edges.iter().map(|e| w[e.group]).sum())
}

pub fn is_connected(g: &WeightedGraph) -> bool {
    if g.n == 0 {
        return false;
    }
    let mut adj = vec![Vec::new(); g.n];
    for e in &g.edges {
        adj[e.i].push(e.j);
        adj[e.j].push(e.i);
    }
    let mut seen = vec![false; g.n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                count += 1;
                stack.push(u);
            }
        }
    }
    count == g.n
}

/// Graph Cartesian product. Vertex `(x, y)` maps to `x * b.n + y`; groups of
/// `b` are shifted past those of `a`.
pub fn cartesian_product(a: &WeightedGraph, b: &WeightedGraph) -> WeightedGraph {
    let mut edges = Vec::with_capacity(a.n * b.edges.len() + b.n * a.edges.len());
    for e in &a.edges {
        for y in 0..b.n {
            edges.push((e.i * b.n + y, e.j * b.n + y, e.group));
        }
    }
    for x in 0..a.n {
        for e in &b.edges {
            edges.push((x * b.n + e.i, x * b.n + e.j, a.groups + e.group));
        }
    }
    WeightedGraph::new(a.n * b.n, edges).expect("product of simple graphs is simple")
}

/// Named topology families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    Path {
        n: usize,
    },
    Cycle {
        n: usize,
    },
    Star {
        n: usize,
    },
    Complete {
        n: usize,
    },
    Paw,
    /// K4 minus one edge.
    Diamond,
    /// Complete graph on `p + 1` vertices with a `q`-vertex tail.
    Lollipop {
        p: usize,
        q: usize,
    },
    /// `p` core vertices forming a clique, each carrying a `q`-vertex branch.
    CcsStar {
        p: usize,
        q: usize,
    },
    /// CCS star where every core vertex carries one branch of each length.
    CcsStar2 {
        p: usize,
        q1: usize,
        q2: usize,
    },
    /// `p` branches of `q` vertices joined at a centre.
    SymmetricStar {
        p: usize,
        q: usize,
    },
    /// Star with `p` leaves plus a `q`-vertex tail on the centre.
    Palm {
        p: usize,
        q: usize,
    },
    Prism {
        n1: usize,
        n2: usize,
    },
    CartesianProduct {
        factors: Vec<FamilySpec>,
    },
    /// Cliques on `n1 + n2` and `n2 + n3` vertices sharing the `n2` middle ones.
    CoupledComplete {
        n1: usize,
        n2: usize,
        n3: usize,
    },
}

/// A family graph with human-readable group names (`w0`, `w-1`, ...).
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub spec: FamilySpec,
    pub graph: WeightedGraph,
    pub group_names: Vec<String>,
}

impl Topology {
    pub fn group_index(&self, name: &str) -> Option<usize> {
        self.group_names.iter().position(|g| g == name)
    }
}

fn need(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidArgument(what.to_string()))
    }
}

/// Collects edges labelled by name, then numbers the names in `order`,
/// dropping names with no edges.
struct Builder {
    n: usize,
    edges: Vec<(usize, usize, String)>,
}

impl Builder {
    fn new(n: usize) -> Self {
        Self { n, edges: Vec::new() }
    }

    fn add(&mut self, i: usize, j: usize, name: impl Into<String>) {
        self.edges.push((i, j, name.into()));
    }

    fn clique(&mut self, vertices: &[usize], name: &str) {
        for (a, &x) in vertices.iter().enumerate() {
            for &y in &vertices[a + 1..] {
                self.add(x, y, name);
            }
        }
    }

    fn finish(self, spec: FamilySpec, order: &[String]) -> Result<Topology> {
        let names: Vec<String> =
            order.iter().filter(|name| self.edges.iter().any(|(_, _, g)| g == *name)).cloned().collect();
        let triples = self.edges.iter().map(|(i, j, g)| {
            let idx = names.iter().position(|x| x == g).expect("edge group listed in order");
            (*i, *j, idx)
        });
        let graph = WeightedGraph::new(self.n, triples)?;
        Ok(Topology { spec, graph, group_names: names })
    }
}

fn wname(j: i64) -> String {
    format!("w{j}")
}

fn wrange(lo: i64, hi: i64) -> Vec<String> {
    (lo..=hi).map(wname).collect()
}

pub fn build_family(spec: &FamilySpec) -> Result<Topology> {
    use FamilySpec::*;
    let spec_out = spec.clone();
    match *spec {
        Path { n } => {
            need(n >= 2, "path needs n >= 2")?;
            let mut b = Builder::new(n);
            let edges = n - 1;
            // distance of edge k from the centre, measured in edge steps
            let orbit = |k: usize| {
                let mirror = edges - 1 - k;
                (edges - 1) / 2 - k.min(mirror)
            };
            let groups = edges.div_ceil(2);
            if groups == 1 {
                for k in 0..edges {
                    b.add(k, k + 1, "w");
                }
                return b.finish(spec_out, &["w".to_string()]);
            }
            for k in 0..edges {
                b.add(k, k + 1, wname(orbit(k) as i64));
            }
            b.finish(spec_out, &wrange(0, groups as i64 - 1))
        }
        Cycle { n } => {
            need(n >= 3, "cycle needs n >= 3")?;
            let mut b = Builder::new(n);
            for k in 0..n {
                b.add(k, (k + 1) % n, "w");
            }
            b.finish(spec_out, &["w".into()])
        }
        Star { n } => {
            need(n >= 2, "star needs n >= 2")?;
            let mut b = Builder::new(n);
            for k in 1..n {
                b.add(0, k, "w");
            }
            b.finish(spec_out, &["w".into()])
        }
        Complete { n } => {
            need(n >= 2, "complete graph needs n >= 2")?;
            let mut b = Builder::new(n);
            b.clique(&(0..n).collect::<Vec<_>>(), "w");
            b.finish(spec_out, &["w".into()])
        }
        Paw => {
            let mut b = Builder::new(4);
            b.add(0, 1, "w-1");
            b.add(0, 2, "w0");
            b.add(1, 2, "w0");
            b.add(2, 3, "w1");
            b.finish(spec_out, &wrange(-1, 1))
        }
        Diamond => {
            let mut b = Builder::new(4);
            b.add(1, 2, "w0");
            for (i, j) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
                b.add(i, j, "w1");
            }
            b.finish(spec_out, &wrange(0, 1))
        }
        Lollipop { p, q } => {
            need(p >= 2 && q >= 1, "lollipop needs p >= 2, q >= 1")?;
            let mut b = Builder::new(p + 1 + q);
            let hub = p;
            b.clique(&(0..p).collect::<Vec<_>>(), "w-1");
            for v in 0..p {
                b.add(v, hub, "w0");
            }
            for j in 1..=q {
                b.add(hub + j - 1, hub + j, wname(j as i64));
            }
            b.finish(spec_out, &wrange(-1, q as i64))
        }
        CcsStar { p, q } => {
            need(p >= 2 && q >= 1, "ccs_star needs p >= 2, q >= 1")?;
            let mut b = Builder::new(p * (q + 1));
            b.clique(&(0..p).collect::<Vec<_>>(), "w0");
            for c in 0..p {
                let base = p + c * q;
                let mut prev = c;
                for j in 1..=q {
                    let v = base + j - 1;
                    b.add(prev, v, wname(j as i64));
                    prev = v;
                }
            }
            b.finish(spec_out, &wrange(0, q as i64))
        }
        CcsStar2 { p, q1, q2 } => {
            need(p >= 2 && q1 >= 1 && q2 >= 1, "ccs_star2 needs p >= 2, q1 >= 1, q2 >= 1")?;
            let arm = q1 + q2;
            let mut b = Builder::new(p * (arm + 1));
            b.clique(&(0..p).collect::<Vec<_>>(), "w0");
            for c in 0..p {
                let base = p + c * arm;
                let mut prev = c;
                for j in 1..=q1 {
                    let v = base + j - 1;
                    b.add(prev, v, wname(-(j as i64)));
                    prev = v;
                }
                prev = c;
                for j in 1..=q2 {
                    let v = base + q1 + j - 1;
                    b.add(prev, v, wname(j as i64));
                    prev = v;
                }
            }
            b.finish(spec_out, &wrange(-(q1 as i64), q2 as i64))
        }
        SymmetricStar { p, q } => {
            need(p >= 1 && q >= 1, "symmetric_star needs p >= 1, q >= 1")?;
            let mut b = Builder::new(p * q + 1);
            for branch in 0..p {
                let mut prev = 0;
                for j in 1..=q {
                    let v = 1 + branch * q + j - 1;
                    b.add(prev, v, wname(j as i64));
                    prev = v;
                }
            }
            b.finish(spec_out, &wrange(1, q as i64))
        }
        Palm { p, q } => {
            need(p >= 1 && q >= 1, "palm needs p >= 1, q >= 1")?;
            let mut b = Builder::new(p + q + 1);
            for leaf in 1..=p {
                b.add(0, leaf, "w0");
            }
            let mut prev = 0;
            for j in 1..=q {
                let v = p + j;
                b.add(prev, v, wname(j as i64));
                prev = v;
            }
            b.finish(spec_out, &wrange(0, q as i64))
        }
        Prism { n1, n2 } => {
            need(n1 >= 2 && n2 >= 2, "prism needs n1, n2 >= 2")?;
            let a = build_family(&Complete { n: n1 })?;
            let c = build_family(&Complete { n: n2 })?;
            Ok(Topology {
                spec: spec_out,
                graph: cartesian_product(&a.graph, &c.graph),
                group_names: vec!["w1".into(), "w2".into()],
            })
        }
        CartesianProduct { ref factors } => {
            need(!factors.is_empty(), "cartesian_product needs at least one factor")?;
            let mut graph: Option<WeightedGraph> = None;
            let mut names = Vec::new();
            for (k, f) in factors.iter().enumerate() {
                let t = build_family(f)?;
                names.extend(t.group_names.iter().map(|g| format!("f{}.{g}", k + 1)));
                graph = Some(match graph {
                    None => t.graph,
                    Some(acc) => cartesian_product(&acc, &t.graph),
                });
            }
            Ok(Topology { spec: spec_out, graph: graph.expect("non-empty"), group_names: names })
        }
        CoupledComplete { n1, n2, n3 } => {
            need(n1 >= 1 && n2 >= 1 && n3 >= 1, "coupled_complete needs n1, n2, n3 >= 1")?;
            let left: Vec<usize> = (0..n1).collect();
            let mid: Vec<usize> = (n1..n1 + n2).collect();
            let right: Vec<usize> = (n1 + n2..n1 + n2 + n3).collect();
            let mut b = Builder::new(n1 + n2 + n3);
            b.clique(&left, "w-2");
            b.clique(&mid, "w0");
            b.clique(&right, "w2");
            for &x in &left {
                for &y in &mid {
                    b.add(x, y, "w-1");
                }
            }
            for &x in &mid {
                for &y in &right {
                    b.add(x, y, "w1");
                }
            }
            b.finish(spec_out, &wrange(-2, 2))
        }
    }
}

/// Random connected graph on `n` vertices: a random spanning tree plus each
/// remaining pair with probability `extra`. One group per edge.
pub fn random_connected<R: Rng>(n: usize, extra: f64, rng: &mut R) -> WeightedGraph {
    let mut pairs = BTreeSet::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        pairs.insert((u, v));
    }
    for i in 0..n {
        for j in i + 1..n {
            if !pairs.contains(&(i, j)) && rng.random_bool(extra) {
                pairs.insert((i, j));
            }
        }
    }
    WeightedGraph::ungrouped(n, pairs).expect("random graph is simple")
}

/// Uniform weights in `[lo, hi)`, one per group.
pub fn random_weights<R: Rng>(g: &WeightedGraph, lo: f64, hi: f64, rng: &mut R) -> WeightVector {
    WeightVector((0..g.groups()).map(|_| rng.random_range(lo..hi)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::sym_eigenvalues;
    use approx::assert_abs_diff_eq;

    fn family(spec: FamilySpec) -> Topology {
        build_family(&spec).unwrap()
    }

    #[test]
    fn path_three_has_one_group() {
        let t = family(FamilySpec::Path { n: 3 });
        assert_eq!(t.graph.n(), 3);
        assert_eq!(t.graph.edges().len(), 2);
        assert_eq!(t.graph.groups(), 1);
    }

    #[test]
    fn path_orbits() {
        let t = family(FamilySpec::Path { n: 4 });
        assert_eq!(t.group_names, ["w0", "w1"]);
        assert_eq!(t.graph.group_sizes(), [1, 2]);
        let middle = t.graph.edges().iter().find(|e| e.i == 1).unwrap();
        assert_eq!(middle.group, 0);
        let t = family(FamilySpec::Path { n: 6 });
        assert_eq!(t.graph.group_sizes(), [1, 2, 2]);
        let t = family(FamilySpec::Path { n: 5 });
        assert_eq!(t.graph.group_sizes(), [2, 2]);
    }

    #[test]
    fn ccs_star_two_one_is_path_four() {
        let t = family(FamilySpec::CcsStar { p: 2, q: 1 });
        let path = family(FamilySpec::Path { n: 4 });
        assert_eq!(t.graph.n(), 4);
        assert_eq!(t.group_names, ["w0", "w1"]);
        let degrees = |g: &WeightedGraph| {
            let mut d = vec![0; g.n()];
            for e in g.edges() {
                d[e.i] += 1;
                d[e.j] += 1;
            }
            d.sort();
            d
        };
        assert_eq!(degrees(&t.graph), degrees(&path.graph));
        assert!(is_connected(&t.graph));
        // spectra agree for the same orbit weights
        let w = WeightVector(vec![0.3, 0.7]);
        let a = sym_eigenvalues(&laplacian(&t.graph, &w).unwrap(), 1e-12).unwrap();
        let b = sym_eigenvalues(&laplacian(&path.graph, &w).unwrap(), 1e-12).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn coupled_complete_one_two_one_is_c4_plus_chord() {
        let t = family(FamilySpec::CoupledComplete { n1: 1, n2: 2, n3: 1 });
        assert_eq!(t.group_names, ["w-1", "w0", "w1"]);
        let w0 = t.group_index("w0").unwrap();
        let mut w = vec![0.2; 3];
        w[w0] = 0.0;
        let a = sym_eigenvalues(&laplacian(&t.graph, &WeightVector(w)).unwrap(), 1e-12).unwrap();
        let c4 = family(FamilySpec::Cycle { n: 4 });
        let b = sym_eigenvalues(&laplacian(&c4.graph, &WeightVector(vec![0.2])).unwrap(), 1e-12).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn laplacian_of_path() {
        let t = family(FamilySpec::Path { n: 3 });
        let l = laplacian(&t.graph, &WeightVector(vec![1.0])).unwrap();
        let expected = DMatrix::from_row_slice(3, 3, &[1., -1., 0., -1., 2., -1., 0., -1., 1.]);
        assert_eq!(l, expected);
        let zero = laplacian(&t.graph, &WeightVector(vec![0.0])).unwrap();
        assert!(zero.iter().all(|&x| x == 0.0));
        assert!(laplacian(&t.graph, &WeightVector(vec![1.0, 2.0])).is_err());
    }

    #[test]
    fn complete_four_spectrum() {
        let t = family(FamilySpec::Complete { n: 4 });
        let l = laplacian(&t.graph, &WeightVector(vec![0.125])).unwrap();
        let s = sym_eigenvalues(&l, 1e-12).unwrap();
        let expected = [0.0, 0.5, 0.5, 0.5];
        for (x, y) in s.values().iter().zip(expected) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn total_weights() {
        let k4 = family(FamilySpec::Complete { n: 4 });
        assert_abs_diff_eq!(total_weight(&k4.graph, &WeightVector(vec![0.125])).unwrap(), 0.75);
        let p3 = family(FamilySpec::Path { n: 3 });
        assert_abs_diff_eq!(total_weight(&p3.graph, &WeightVector(vec![0.4])).unwrap(), 0.8);
        assert_eq!(total_weight(&p3.graph, &WeightVector(vec![0.0])).unwrap(), 0.0);
    }

    #[test]
    fn connectivity() {
        assert!(is_connected(&family(FamilySpec::Path { n: 3 }).graph));
        assert!(!is_connected(&WeightedGraph::new(2, []).unwrap()));
        assert!(is_connected(&family(FamilySpec::Paw).graph));
    }

    #[test]
    fn products() {
        let p2 = family(FamilySpec::Path { n: 2 }).graph;
        let sq = cartesian_product(&p2, &p2);
        assert_eq!(sq.n(), 4);
        assert_eq!(sq.edges().len(), 4);
        let mut deg = [0; 4];
        for e in sq.edges() {
            deg[e.i] += 1;
            deg[e.j] += 1;
        }
        assert!(deg.iter().all(|&d| d == 2) && is_connected(&sq));

        let prism = family(FamilySpec::Prism { n1: 3, n2: 2 });
        let via_product = family(FamilySpec::CartesianProduct {
            factors: vec![FamilySpec::Complete { n: 3 }, FamilySpec::Complete { n: 2 }],
        });
        assert_eq!(prism.graph, via_product.graph);
        let a = family(FamilySpec::Cycle { n: 5 }).graph;
        let b = family(FamilySpec::Star { n: 3 }).graph;
        let ab = cartesian_product(&a, &b);
        assert_eq!(ab.n(), 15);
        assert_eq!(ab.edges().len(), a.n() * b.edges().len() + b.n() * a.edges().len());
        assert_eq!(ab.groups(), 2);
    }

    #[test]
    fn invalid_parameters() {
        assert!(build_family(&FamilySpec::CcsStar { p: 1, q: 1 }).is_err());
        assert!(build_family(&FamilySpec::Cycle { n: 2 }).is_err());
        assert!(build_family(&FamilySpec::Lollipop { p: 1, q: 1 }).is_err());
        assert!(WeightedGraph::new(3, [(0, 0, 0)]).is_err());
        assert!(WeightedGraph::new(3, [(0, 1, 0), (1, 0, 0)]).is_err());
        assert!(WeightedGraph::new(3, [(0, 1, 0), (1, 2, 2)]).is_err());
    }

    #[test]
    fn json_round_trip_and_default_groups() {
        let t = family(FamilySpec::CcsStar { p: 3, q: 2 });
        let text = t.graph.to_json_value().to_string();
        assert_eq!(WeightedGraph::from_json(&text).unwrap(), t.graph);
        let g = WeightedGraph::from_json(r#"{"n":3,"edges":[[0,1],[1,2]]}"#).unwrap();
        assert_eq!(g.groups(), 2);
        assert!(WeightedGraph::from_json(r#"{"n":3,"edges":[[0,1,0],[1,2,0]],"groups":2}"#).is_err());
    }

    #[test]
    fn family_sizes() {
        let cases = [
            (FamilySpec::CcsStar { p: 5, q: 2 }, 15, 3),
            (FamilySpec::CcsStar2 { p: 5, q1: 1, q2: 2 }, 20, 4),
            (FamilySpec::SymmetricStar { p: 5, q: 2 }, 11, 2),
            (FamilySpec::Palm { p: 4, q: 2 }, 7, 3),
            (FamilySpec::Lollipop { p: 4, q: 2 }, 7, 4),
            (FamilySpec::CoupledComplete { n1: 3, n2: 2, n3: 4 }, 9, 5),
        ];
        for (spec, n, groups) in cases {
            let t = family(spec.clone());
            assert_eq!(t.graph.n(), n, "{spec:?}");
            assert_eq!(t.graph.groups(), groups, "{spec:?}");
            assert!(is_connected(&t.graph));
        }
    }

    #[test]
    fn family_serialisation_is_stable() {
        let spec = FamilySpec::Lollipop { p: 4, q: 2 };
        let a = build_family(&spec).unwrap().graph.to_json_value().to_string();
        let b = build_family(&spec).unwrap().graph.to_json_value().to_string();
        assert_eq!(a, b);
    }
}
