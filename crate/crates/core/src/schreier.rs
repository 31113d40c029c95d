//! Schreier coset graphs of Young subgroups, generated by the transpositions
//! along the edges of an underlying network graph.
//!
//! Vertices are the tabloids of a partition; two tabloids are adjacent when a
//! base edge `{j, k}` swaps one into the other. Two distinct tabloids that
//! differ by a transposition differ in exactly two positions, so each induced
//! edge comes from exactly one base edge and the result is a simple graph that
//! reuses the base graph's weight groups.

use nalgebra::DMatrix;
use serde_json::json;

use crate::combinatorics::{enumerate_tabloids, tabloid_count, Partition, Tabloid, TabloidRanker};
use crate::error::{invalid, Error, Result};
use crate::graphs::{is_connected, laplacian, WeightVector, WeightedGraph};

/// Largest induced graph this module will build.
pub const MAX_INDUCED_VERTICES: u128 = 1_000_000;

#[derive(Debug, Clone)]
pub struct InducedGraph {
    pub partition: Partition,
    pub base: WeightedGraph,
    pub graph: WeightedGraph,
    pub vertex_labels: Vec<Tabloid>,
}

impl InducedGraph {
    pub fn to_json_value(&self) -> serde_json::Value {
        let mut v = self.graph.to_json_value();
        v["partition"] = json!(self.partition);
        v["vertex_labels"] = json!(self.vertex_labels);
        v
    }

    pub fn laplacian(&self, w: &WeightVector) -> Result<DMatrix<f64>> {
        laplacian(&self.graph, w)
    }
}

fn check_inputs(base: &WeightedGraph, p: &Partition) -> Result<()> {
    if p.n() != base.n() {
        return Err(invalid!("partition {p} is not a partition of {}", base.n()));
    }
    if !is_connected(base) {
        return Err(Error::PreconditionViolation("base graph must be connected".into()));
    }
    let nu = tabloid_count(p);
    if nu > MAX_INDUCED_VERTICES {
        return Err(Error::Resource(format!(
            "induced graph of {p} would have {nu} vertices (limit {MAX_INDUCED_VERTICES})"
        )));
    }
    Ok(())
}

pub fn induced_graph(base: &WeightedGraph, p: &Partition) -> Result<InducedGraph> {
    check_inputs(base, p)?;
    let labels = enumerate_tabloids(p);
    let ranker = TabloidRanker::new(p)?;
    let mut edges = Vec::new();
    let mut word = Vec::with_capacity(p.n());
    for (a, t) in labels.iter().enumerate() {
        for e in base.edges() {
            let w = t.word();
            if w[e.i] == w[e.j] {
                continue;
            }
            word.clear();
            word.extend_from_slice(w);
            word.swap(e.i, e.j);
            let b = ranker.rank(&word);
            // each unordered pair is met once from either end
            if a < b {
                edges.push((a, b, e.group));
            }
        }
    }
    let graph = WeightedGraph::with_groups(labels.len(), edges, base.groups())?;
    Ok(InducedGraph { partition: p.clone(), base: base.clone(), graph, vertex_labels: labels })
}

/// Laplacian `W I - A` of the induced graph, where transpositions fixing a
/// tabloid contribute to both terms and cancel.
pub fn induced_laplacian(base: &WeightedGraph, p: &Partition, w: &WeightVector) -> Result<DMatrix<f64>> {
    induced_graph(base, p)?.laplacian(w)
}

/// Checks that `tabloid with the lone 2 at position j  ->  vertex j` is a
/// weight-preserving isomorphism between the `(N-1, 1)` induced graph and the
/// base graph.
pub fn canonical_bijection_check(base: &WeightedGraph, p: &Partition) -> Result<bool> {
    let n = base.n();
    if n < 2 || *p != Partition::standard(n) {
        return Err(invalid!("canonical bijection is defined for (N-1,1) only, got {p}"));
    }
    let ind = induced_graph(base, p)?;
    let vertex_of: Vec<usize> =
        ind.vertex_labels.iter().map(|t| t.word().iter().position(|&s| s == 2).expect("one symbol 2")).collect();
    let mut mapped: Vec<(usize, usize, usize)> = ind
        .graph
        .edges()
        .iter()
        .map(|e| {
            let (x, y) = (vertex_of[e.i], vertex_of[e.j]);
            (x.min(y), x.max(y), e.group)
        })
        .collect();
    let mut expected: Vec<(usize, usize, usize)> = base.edges().iter().map(|e| (e.i, e.j, e.group)).collect();
    mapped.sort_unstable();
    expected.sort_unstable();
    Ok(mapped == expected)
}
