//! Oriented-graph machinery: periods, closed-path counting, first-return
//! decomposition, Gurevic entropy, Parry measures, periodic-orbit
//! equidistribution and the convergence checker for graph sequences.
//!
//! All path counts are unbounded integers; logarithms are taken at the end.

mod convergence;
mod counting;
mod parry;
mod scc;

pub use convergence::{check_convergence, ConvergenceReport, TaggedGraph, Violation};
pub use counting::{
    count_closed, count_closed_bounded, count_closed_upto, first_return_counts, gurevic_entropy,
    phi_decompose, spectral_entropy, GurevicEstimate, PhiDecomposition,
};
pub use parry::{bowen_empirical, mass_on, parry_measure, ParryMeasure};
pub use scc::{period, strongly_connected_components, Period};

use crate::error::{Error, Result};
use crate::hofbauer::HofbauerDiagram;
use std::collections::BTreeSet;

/// Finite oriented graph with dense vertex ids and no duplicate edges.
#[derive(Clone, Debug, PartialEq)]
pub struct OrientedGraph {
    adj: Vec<Vec<usize>>,
}

impl OrientedGraph {
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut sets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); vertex_count];
        for (a, b) in edges {
            if a >= vertex_count || b >= vertex_count {
                return Err(Error::InvalidParameter(format!(
                    "edge ({a},{b}) outside vertex range 0..{vertex_count}"
                )));
            }
            sets[a].insert(b);
        }
        Ok(OrientedGraph {
            adj: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn out(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, outs)| outs.iter().map(move |&b| (a, b)))
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Induced subgraph on the given vertices; returns the graph and the
    /// map from old to new ids.
    pub fn induced(&self, keep: &[usize]) -> (OrientedGraph, Vec<Option<usize>>) {
        let mut remap = vec![None; self.vertex_count()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = Some(new);
        }
        let mut edges = Vec::new();
        for (a, b) in self.edges() {
            if let (Some(na), Some(nb)) = (remap[a], remap[b]) {
                edges.push((na, nb));
            }
        }
        (
            OrientedGraph::new(keep.len(), edges).expect("induced edges are in range"),
            remap,
        )
    }

    /// The golden-mean graph {a->a, a->b, b->a}; vertex 0 is `a`.
    pub fn golden_mean() -> Self {
        OrientedGraph::new(2, [(0, 0), (0, 1), (1, 0)]).unwrap()
    }

    /// Complete graph on k vertices including self-loops (row sums k).
    pub fn complete(k: usize) -> Self {
        let mut edges = Vec::new();
        for a in 0..k {
            for b in 0..k {
                edges.push((a, b));
            }
        }
        OrientedGraph::new(k, edges).unwrap()
    }

    /// Single oriented k-cycle.
    pub fn cycle(k: usize) -> Self {
        OrientedGraph::new(k, (0..k).map(|i| (i, (i + 1) % k))).unwrap()
    }
}

impl From<&HofbauerDiagram> for OrientedGraph {
    fn from(d: &HofbauerDiagram) -> Self {
        OrientedGraph::new(d.vertex_count(), d.edges.iter().copied())
            .expect("diagram edges are in range")
    }
}

/// Closed path at a vertex: (u_1, ..., u_{p+1}) with u_1 = u_{p+1}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClosedPath {
    vertices: Vec<usize>,
}

impl ClosedPath {
    pub fn new(graph: &OrientedGraph, vertices: Vec<usize>) -> Result<Self> {
        if vertices.len() < 2 || vertices.first() != vertices.last() {
            return Err(Error::NotClosedAt);
        }
        for w in vertices.windows(2) {
            if !graph.has_edge(w[0], w[1]) {
                return Err(Error::InvalidParameter(format!(
                    "missing edge ({},{})",
                    w[0], w[1]
                )));
            }
        }
        Ok(ClosedPath { vertices })
    }

    /// The trivial length-0 path at a vertex.
    pub fn trivial(u: usize) -> Self {
        ClosedPath { vertices: vec![u] }
    }

    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn base(&self) -> usize {
        self.vertices[0]
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Splits into first returns at the base vertex.
    pub fn first_returns(&self) -> Vec<ClosedPath> {
        let u = self.base();
        let mut out = Vec::new();
        let mut start = 0;
        for (i, &v) in self.vertices.iter().enumerate().skip(1) {
            if v == u {
                out.push(ClosedPath {
                    vertices: self.vertices[start..=i].to_vec(),
                });
                start = i;
            }
        }
        out
    }

    /// Number of visits to the base vertex among positions 1..=len.
    pub fn return_count(&self) -> usize {
        let u = self.base();
        self.vertices[..self.len()].iter().filter(|&&v| v == u).count()
    }
}
