//! Strongly connected components (iterative Kosaraju) and graph periods.
//!
//! The period of a component is computed from breadth-first levels: the gcd
//! of level[a] + 1 - level[b] over its internal edges, which equals the gcd
//! of its closed-path lengths without enumerating cycles.

use super::OrientedGraph;
use crate::error::{Error, Result};
use num_integer::Integer;
use std::collections::VecDeque;

/// Components in reverse topological order of the condensation.
pub fn strongly_connected_components(graph: &OrientedGraph) -> Vec<Vec<usize>> {
    let n = graph.vertex_count();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    // first pass: finish order via explicit stack
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        seen[start] = true;
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < graph.out(v).len() {
                let w = graph.out(v)[*i];
                *i += 1;
                if !seen[w] {
                    seen[w] = true;
                    stack.push((w, 0));
                }
            } else {
                order.push(v);
                stack.pop();
            }
        }
    }
    // transpose
    let mut radj = vec![Vec::new(); n];
    for (a, b) in graph.edges() {
        radj[b].push(a);
    }
    let mut comp = Vec::new();
    let mut assigned = vec![false; n];
    for &start in order.iter().rev() {
        if assigned[start] {
            continue;
        }
        let mut members = Vec::new();
        let mut stack = vec![start];
        assigned[start] = true;
        while let Some(v) = stack.pop() {
            members.push(v);
            for &w in &radj[v] {
                if !assigned[w] {
                    assigned[w] = true;
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        comp.push(members);
    }
    comp
}

/// True when the component supports a closed path.
pub fn component_has_cycle(graph: &OrientedGraph, members: &[usize]) -> bool {
    members.len() > 1 || graph.has_edge(members[0], members[0])
}

/// Period of a strongly connected component with a cycle.
pub fn component_period(graph: &OrientedGraph, members: &[usize]) -> u64 {
    let (sub, _) = graph.induced(members);
    let n = sub.vertex_count();
    let mut level = vec![u64::MAX; n];
    let mut q = VecDeque::new();
    level[0] = 0;
    q.push_back(0usize);
    while let Some(v) = q.pop_front() {
        for &w in sub.out(v) {
            if level[w] == u64::MAX {
                level[w] = level[v] + 1;
                q.push_back(w);
            }
        }
    }
    let mut g: u64 = 0;
    for (a, b) in sub.edges() {
        let d = (level[a] as i64 + 1 - level[b] as i64).unsigned_abs();
        g = g.gcd(&d);
    }
    g.max(1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Period {
    /// gcd of all closed-path lengths.
    Finite(u64),
    /// The graph has no closed path.
    NoCycle,
}

/// Period of the graph: gcd across all components containing cycles.
pub fn period(graph: &OrientedGraph) -> Period {
    let mut g: u64 = 0;
    for comp in strongly_connected_components(graph) {
        if component_has_cycle(graph, &comp) {
            g = g.gcd(&component_period(graph, &comp));
        }
    }
    if g == 0 {
        Period::NoCycle
    } else {
        Period::Finite(g)
    }
}

/// Period of the component containing `u`, or an error when u is on no cycle.
pub fn vertex_period(graph: &OrientedGraph, u: usize) -> Result<u64> {
    for comp in strongly_connected_components(graph) {
        if comp.contains(&u) {
            if component_has_cycle(graph, &comp) {
                return Ok(component_period(graph, &comp));
            }
            return Err(Error::VertexOnNoCycle(u));
        }
    }
    Err(Error::VertexOnNoCycle(u))
}
