//! Truncated Markov diagrams of a piecewise-monotone map over a natural
//! partition.
//!
//! A vertex is an equivalence class of admissible words; two words are
//! identified when they share their last letter and the image interval of
//! their cylinder. Construction is a breadth-first closure from the depth-1
//! vertices (one per branch, image f(branch)); the extension of a vertex
//! with image D by a branch B exists when interior(D ∩ B) is nonempty and
//! has image f(D ∩ B). Vertices whose shortest word would exceed the
//! truncation depth N are not created and their incoming edges are dropped,
//! so the result is exactly the depth-N sub-diagram.

use crate::error::{Error, Result};
use crate::maps::{NaturalPartition, PiecewiseMonotoneMap};
use crate::scalar::{Interval, Scalar, EPS_GEOM};
use crate::symbolic::Word;
use std::collections::VecDeque;

#[derive(Clone, Debug)]
pub struct DiagramVertex {
    /// Shortest word reaching this class (breadth-first discovery order).
    pub significative_word: Word,
    pub base_letter: usize,
    pub image_interval: Interval,
    /// Length of the significative word.
    pub depth: usize,
}

impl DiagramVertex {
    /// L(α): the length of the image interval.
    pub fn length(&self) -> Scalar {
        self.image_interval.length()
    }
}

#[derive(Clone, Debug)]
pub struct HofbauerDiagram {
    pub vertices: Vec<DiagramVertex>,
    /// Oriented edges (from, to), sorted and deduplicated.
    pub edges: Vec<(usize, usize)>,
    pub truncation_depth: usize,
}

impl HofbauerDiagram {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn out_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .filter(move |(a, _)| *a == v)
            .map(|(_, b)| *b)
    }
}

/// L(α) of a vertex.
pub fn vertex_l(vertex: &DiagramVertex) -> Scalar {
    vertex.length()
}

/// Membership in E_{N,K}: depth at most N and L(α) >= 1/K.
pub fn in_e_nk(vertex: &DiagramVertex, n: usize, k: u32) -> bool {
    vertex.depth <= n && vertex.length() >= Scalar::ratio(1, k as i64)
}

/// P(m): branches on which sup |f'| reaches 1/m.
pub fn partition_subset_pm(
    map: &PiecewiseMonotoneMap,
    partition: &NaturalPartition,
    m: u32,
) -> Vec<usize> {
    let threshold = Scalar::ratio(1, m as i64);
    partition
        .branches
        .iter()
        .enumerate()
        .filter(|(_, b)| map.sup_abs_deriv_over(b) >= threshold)
        .map(|(i, _)| i)
        .collect()
}

/// Breadth-first construction of the depth-N diagram.
pub fn build_diagram(
    map: &PiecewiseMonotoneMap,
    partition: &NaturalPartition,
    n: usize,
) -> Result<HofbauerDiagram> {
    if n == 0 {
        return Err(Error::Diagram("truncation depth must be at least 1".into()));
    }
    if partition.is_empty() {
        return Err(Error::Diagram("empty natural partition".into()));
    }
    let exact = map.is_exact();
    let eps = if exact { 0.0 } else { EPS_GEOM };

    let image_of = |seg: &Interval| -> Result<Interval> {
        let fa = map.eval(&seg.lo)?;
        let fb = map.eval(&seg.hi)?;
        let (lo, hi) = if fa <= fb { (fa, fb) } else { (fb, fa) };
        Ok(Interval::new(lo, hi))
    };

    let mut vertices: Vec<DiagramVertex> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();

    // lookup by (base letter, image interval) up to eps
    let find = |vertices: &[DiagramVertex], base: usize, img: &Interval| -> Option<usize> {
        vertices
            .iter()
            .position(|v| v.base_letter == base && v.image_interval.approx_eq(img, eps))
    };

    for (b, branch) in partition.branches.iter().enumerate() {
        let img = image_of(branch)?;
        if img.is_empty() {
            continue; // constant-image branch never becomes a vertex
        }
        if find(&vertices, b, &img).is_none() {
            vertices.push(DiagramVertex {
                significative_word: Word(vec![b]),
                base_letter: b,
                image_interval: img,
                depth: 1,
            });
            queue.push_back(vertices.len() - 1);
        }
    }

    while let Some(v) = queue.pop_front() {
        let depth = vertices[v].depth;
        let img = vertices[v].image_interval.clone();
        let word = vertices[v].significative_word.clone();
        for (b, branch) in partition.branches.iter().enumerate() {
            let cut = img.intersect(branch);
            if cut.is_empty() {
                continue;
            }
            let next_img = image_of(&cut)?;
            if next_img.is_empty() {
                continue; // degenerate images are never vertices
            }
            match find(&vertices, b, &next_img) {
                Some(w) => edges.push((v, w)),
                None => {
                    if depth + 1 > n {
                        continue; // truncated: vertex not created, edge dropped
                    }
                    vertices.push(DiagramVertex {
                        significative_word: word.extended(b),
                        base_letter: b,
                        image_interval: next_img,
                        depth: depth + 1,
                    });
                    let w = vertices.len() - 1;
                    edges.push((v, w));
                    queue.push_back(w);
                }
            }
        }
    }

    edges.sort_unstable();
    edges.dedup();
    Ok(HofbauerDiagram {
        vertices,
        edges,
        truncation_depth: n,
    })
}
