//! Empirical checker for the graph-sequence convergence notion: every tagged
//! vertex of every graph in the sequence must admit a limit-graph vertex
//! dominating its bounded-return counts at every length up to the horizon.

use super::counting::{count_closed_upto, first_return_counts};
use super::OrientedGraph;
use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, Zero};

/// A graph together with the vertices carrying the current E_L tag.
#[derive(Clone, Debug)]
pub struct TaggedGraph {
    pub graph: OrientedGraph,
    pub tagged: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub graph_index: usize,
    pub vertex: usize,
    /// Limit vertex checked when a matching was supplied.
    pub candidate: Option<usize>,
    /// Smallest p at which the count comparison fails.
    pub p: usize,
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    /// sup over the sequence of the number of tagged vertices.
    pub uniformity_bound: usize,
    pub m: usize,
    pub p_max: usize,
}

fn bounded_counts_upto(graph: &OrientedGraph, u: usize, p_max: usize, m: usize) -> Vec<BigUint> {
    let f = first_return_counts(graph, u, m.min(p_max));
    let mut c = vec![BigUint::zero(); p_max + 1];
    c[0] = BigUint::one();
    for k in 1..=p_max {
        let mut acc = BigUint::zero();
        for q in 1..=k.min(m) {
            if !f[q - 1].is_zero() && !c[k - q].is_zero() {
                acc += &f[q - 1] * &c[k - q];
            }
        }
        c[k] = acc;
    }
    c
}

/// Verifies #Δ_{p,M}^{u_n}(G_n) <= #Δ_p^{u}(G) for all p <= p_max, for every
/// tagged vertex of every sequence element. When `matching` is given it maps
/// each tagged vertex to its limit candidate; otherwise all limit vertices
/// are tried and the vertex passes if any candidate dominates.
pub fn check_convergence(
    sequence: &[TaggedGraph],
    limit: &OrientedGraph,
    matching: Option<&[Vec<usize>]>,
    m: usize,
    p_max: usize,
) -> Result<ConvergenceReport> {
    if m == 0 || p_max == 0 {
        return Err(Error::Convergence("M and p_max must be positive".into()));
    }
    if let Some(mt) = matching {
        if mt.len() != sequence.len() {
            return Err(Error::Convergence(
                "matching length differs from the sequence length".into(),
            ));
        }
        for (i, (tg, row)) in sequence.iter().zip(mt).enumerate() {
            if row.len() != tg.tagged.len() {
                return Err(Error::Convergence(format!(
                    "matching row {i} does not cover the tagged vertices"
                )));
            }
        }
    }

    let limit_counts: Vec<Vec<BigUint>> = (0..limit.vertex_count())
        .map(|u| count_closed_upto(limit, u, p_max))
        .collect();

    let mut violations = Vec::new();
    let mut uniformity_bound = 0usize;
    for (gi, tg) in sequence.iter().enumerate() {
        uniformity_bound = uniformity_bound.max(tg.tagged.len());
        for (ti, &un) in tg.tagged.iter().enumerate() {
            if un >= tg.graph.vertex_count() {
                return Err(Error::Convergence(format!(
                    "tagged vertex {un} outside graph {gi}"
                )));
            }
            let bounded = bounded_counts_upto(&tg.graph, un, p_max, m);
            let dominates = |cand: usize| -> Option<usize> {
                (1..=p_max).find(|&p| bounded[p] > limit_counts[cand][p - 1])
            };
            match matching {
                Some(mt) => {
                    let cand = mt[gi][ti];
                    if cand >= limit.vertex_count() {
                        return Err(Error::Convergence(format!(
                            "matched vertex {cand} outside the limit graph"
                        )));
                    }
                    if let Some(p) = dominates(cand) {
                        violations.push(Violation {
                            graph_index: gi,
                            vertex: un,
                            candidate: Some(cand),
                            p,
                        });
                    }
                }
                None => {
                    let mut best_fail = None;
                    let mut found = false;
                    for cand in 0..limit.vertex_count() {
                        match dominates(cand) {
                            None => {
                                found = true;
                                break;
                            }
                            Some(p) => {
                                best_fail =
                                    Some(best_fail.map_or(p, |b: usize| b.max(p)));
                            }
                        }
                    }
                    if !found {
                        violations.push(Violation {
                            graph_index: gi,
                            vertex: un,
                            candidate: None,
                            p: best_fail.unwrap_or(1),
                        });
                    }
                }
            }
        }
    }
    Ok(ConvergenceReport {
        ok: violations.is_empty(),
        violations,
        uniformity_bound,
        m,
        p_max,
    })
}
