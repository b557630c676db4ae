//! Exact closed-path counting kernels and the two entropy routes.
//!
//! Counts live in `BigUint` because they exceed 2^64 quickly; the spectral
//! route takes the log of the Perron root instead of counting.

use super::scc::{component_has_cycle, strongly_connected_components, vertex_period};
use super::{ClosedPath, OrientedGraph};
use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeSet;

fn ln_biguint(n: &BigUint) -> f64 {
    // log via top 64 bits + bit length, exact enough for entropy estimates
    let bits = n.bits();
    if bits <= 64 {
        return n.to_u64().map(|v| (v as f64).ln()).unwrap_or(f64::NEG_INFINITY);
    }
    let shift = bits - 53;
    let top = (n >> shift).to_u64().unwrap() as f64;
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}

/// One adjacency application: out[w] = sum over edges (v,w) of in[v].
fn step(graph: &OrientedGraph, v: &[BigUint]) -> Vec<BigUint> {
    let mut out = vec![BigUint::zero(); graph.vertex_count()];
    for (a, outs) in (0..graph.vertex_count()).map(|a| (a, graph.out(a))) {
        if v[a].is_zero() {
            continue;
        }
        for &b in outs {
            out[b] += &v[a];
        }
    }
    out
}

/// #Δ_p^u: closed paths of length p at u, the (u,u) entry of the p-th
/// adjacency power.
pub fn count_closed(graph: &OrientedGraph, u: usize, p: usize) -> BigUint {
    let mut v = vec![BigUint::zero(); graph.vertex_count()];
    v[u] = BigUint::one();
    for _ in 0..p {
        v = step(graph, &v);
    }
    v[u].clone()
}

/// Closed-path counts at u for every length 1..=p_max in one sweep.
pub fn count_closed_upto(graph: &OrientedGraph, u: usize, p_max: usize) -> Vec<BigUint> {
    let mut v = vec![BigUint::zero(); graph.vertex_count()];
    v[u] = BigUint::one();
    let mut out = Vec::with_capacity(p_max);
    for _ in 0..p_max {
        v = step(graph, &v);
        out.push(v[u].clone());
    }
    out
}

/// First-return counts at u by length 1..=l_max: paths that avoid u strictly
/// between their endpoints, counted with the u-row/column split off.
pub fn first_return_counts(graph: &OrientedGraph, u: usize, l_max: usize) -> Vec<BigUint> {
    let n = graph.vertex_count();
    let mut counts = Vec::with_capacity(l_max);
    if l_max == 0 {
        return counts;
    }
    counts.push(if graph.has_edge(u, u) {
        BigUint::one()
    } else {
        BigUint::zero()
    });
    // x_k[v] = number of u -> v paths of length k avoiding u after the start
    let mut x = vec![BigUint::zero(); n];
    for &w in graph.out(u) {
        if w != u {
            x[w] += BigUint::one();
        }
    }
    for _ in 2..=l_max {
        // close: sum_v x[v] * [v -> u]
        let mut ret = BigUint::zero();
        for v in 0..n {
            if !x[v].is_zero() && graph.has_edge(v, u) {
                ret += &x[v];
            }
        }
        counts.push(ret);
        // advance avoiding u
        let mut nx = vec![BigUint::zero(); n];
        for v in 0..n {
            if x[v].is_zero() {
                continue;
            }
            for &w in graph.out(v) {
                if w != u {
                    nx[w] += &x[v];
                }
            }
        }
        x = nx;
    }
    counts
}

/// #Δ_{p,M}^u: closed paths at u all of whose first returns have length at
/// most M, via the concatenation convolution c(p) = Σ_{q<=min(p,M)} f(q) c(p-q).
pub fn count_closed_bounded(graph: &OrientedGraph, u: usize, p: usize, m: usize) -> BigUint {
    let f = first_return_counts(graph, u, m.min(p));
    let mut c = vec![BigUint::zero(); p + 1];
    c[0] = BigUint::one();
    for k in 1..=p {
        let mut acc = BigUint::zero();
        for q in 1..=k.min(m) {
            if !f[q - 1].is_zero() && !c[k - q].is_zero() {
                acc += &f[q - 1] * &c[k - q];
            }
        }
        c[k] = acc;
    }
    c[p].clone()
}

/// The injective decomposition of a closed path at u relative to the return
/// bound M: the concatenation of its short first returns, the concatenation
/// of its long ones, and the start positions of the long ones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PhiDecomposition {
    pub short: ClosedPath,
    pub long: ClosedPath,
    pub long_starts: BTreeSet<usize>,
}

pub fn phi_decompose(path: &ClosedPath, u: usize, m: usize) -> Result<PhiDecomposition> {
    if path.base() != u {
        return Err(Error::NotClosedAt);
    }
    let mut short = vec![u];
    let mut long = vec![u];
    let mut long_starts = BTreeSet::new();
    let mut pos = 1usize; // 1-based position of the current return's start
    for r in path.first_returns() {
        let verts = r.vertices();
        if r.len() <= m {
            short.extend_from_slice(&verts[1..]);
        } else {
            long.extend_from_slice(&verts[1..]);
            long_starts.insert(pos);
        }
        pos += r.len();
    }
    let mk = |v: Vec<usize>| {
        if v.len() == 1 {
            ClosedPath::trivial(u)
        } else {
            ClosedPath { vertices: v }
        }
    };
    Ok(PhiDecomposition {
        short: mk(short),
        long: mk(long),
        long_starts,
    })
}

/// Estimate of the closed-path growth rate at a vertex.
#[derive(Clone, Debug)]
pub struct GurevicEstimate {
    pub vertex: usize,
    pub component_period: u64,
    /// (p, log(count)/p) over multiples of the component period.
    pub sequence: Vec<(usize, f64)>,
    pub last_value: f64,
    pub accelerated: Option<f64>,
    /// Headline estimate: accelerated when available, else the last value.
    pub value: f64,
    /// False when the graph is not strongly connected, in which case the
    /// estimate is only a lower bound for the whole graph's entropy.
    pub whole_graph: bool,
}

/// Aitken Δ² on a doubling subsequence: for O(1/p) errors the error halves
/// per doubling, which Aitken cancels like a geometric term.
fn aitken_doubling(seq: &[(usize, f64)]) -> Option<f64> {
    let last = seq.last()?.0;
    let pick = |target: usize| -> Option<f64> {
        seq.iter()
            .rev()
            .find(|(p, _)| *p <= target)
            .map(|(_, v)| *v)
    };
    let x2 = pick(last)?;
    let x1 = pick(last / 2)?;
    let x0 = pick(last / 4)?;
    let d2 = x2 - x1;
    let d1 = x1 - x0;
    let denom = d2 - d1;
    if denom.abs() < 1e-300 {
        return Some(x2);
    }
    let acc = x2 - d2 * d2 / denom;
    if acc.is_finite() {
        Some(acc)
    } else {
        None
    }
}

/// Growth rate of #Δ_p^u over multiples of the component period up to p_max.
pub fn gurevic_entropy(graph: &OrientedGraph, u: usize, p_max: usize) -> Result<GurevicEstimate> {
    let per = vertex_period(graph, u)? as usize;
    let counts = count_closed_upto(graph, u, p_max);
    let mut sequence = Vec::new();
    let mut p = per;
    while p <= p_max {
        let c = &counts[p - 1];
        if !c.is_zero() {
            sequence.push((p, ln_biguint(c) / p as f64));
        }
        p += per;
    }
    if sequence.is_empty() {
        return Err(Error::VertexOnNoCycle(u));
    }
    let last_value = sequence.last().unwrap().1;
    let accelerated = aitken_doubling(&sequence);
    let whole_graph = strongly_connected_components(graph).len() == 1;
    Ok(GurevicEstimate {
        vertex: u,
        component_period: per as u64,
        value: accelerated.unwrap_or(last_value),
        sequence,
        last_value,
        accelerated,
        whole_graph,
    })
}

/// Perron root of an irreducible 0/1 adjacency by shifted power iteration:
/// rho(A) = rho(A + I) - 1, and A + I is primitive, so the iteration
/// converges for periodic graphs too.
fn perron_root_scc(graph: &OrientedGraph) -> f64 {
    let n = graph.vertex_count();
    let mut v = vec![1.0_f64; n];
    let mut lambda = 1.0_f64;
    let mut best_residual = f64::INFINITY;
    let mut stall = 0u32;
    for _ in 0..500_000 {
        let mut w = v.clone(); // the +I shift
        for (a, b) in graph.edges() {
            w[b] += v[a];
        }
        let norm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in &mut w {
            *x /= norm;
        }
        let mut aw = w.clone();
        for (a, b) in graph.edges() {
            aw[b] += w[a];
        }
        let num: f64 = w.iter().zip(&aw).map(|(a, b)| a * b).sum();
        let residual = aw
            .iter()
            .zip(&w)
            .map(|(a, b)| (a - num * b).abs())
            .fold(0.0_f64, f64::max);
        lambda = num;
        v = w;
        if residual <= 1e-15 * num.max(1.0) {
            break;
        }
        if residual < best_residual * (1.0 - 1e-6) {
            best_residual = residual;
            stall = 0;
        } else {
            stall += 1;
            if stall > 200 {
                break;
            }
        }
    }
    lambda - 1.0
}

/// log of the adjacency spectral radius: the maximum over strongly connected
/// components with cycles. `None` when the graph is acyclic.
pub fn spectral_entropy(graph: &OrientedGraph) -> Option<f64> {
    let mut best: Option<f64> = None;
    for comp in strongly_connected_components(graph) {
        if !component_has_cycle(graph, &comp) {
            continue;
        }
        let (sub, _) = graph.induced(&comp);
        let rho = perron_root_scc(&sub);
        let h = rho.max(f64::MIN_POSITIVE).ln().max(0.0);
        best = Some(best.map_or(h, |b: f64| b.max(h)));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn golden_mean_counts() {
        let g = OrientedGraph::golden_mean();
        assert_eq!(count_closed(&g, 0, 1), big(1));
        assert_eq!(count_closed(&g, 0, 2), big(2));
        assert_eq!(count_closed(&g, 0, 3), big(3));
        assert_eq!(count_closed(&g, 0, 4), big(5));
    }

    #[test]
    fn selfloop_and_cycle_counts() {
        let loop1 = OrientedGraph::new(1, [(0, 0)]).unwrap();
        for p in 1..8 {
            assert_eq!(count_closed(&loop1, 0, p), big(1));
        }
        let c3 = OrientedGraph::cycle(3);
        assert_eq!(count_closed(&c3, 0, 3), big(1));
        assert_eq!(count_closed(&c3, 0, 4), big(0));
    }

    #[test]
    fn first_returns() {
        let g = OrientedGraph::golden_mean();
        assert_eq!(first_return_counts(&g, 0, 5), vec![big(1), big(1), big(0), big(0), big(0)]);
        let loop1 = OrientedGraph::new(1, [(0, 0)]).unwrap();
        assert_eq!(first_return_counts(&loop1, 0, 3), vec![big(1), big(0), big(0)]);
        let c3 = OrientedGraph::cycle(3);
        assert_eq!(first_return_counts(&c3, 0, 4), vec![big(0), big(0), big(1), big(0)]);
    }

    #[test]
    fn bounded_counts() {
        let g = OrientedGraph::golden_mean();
        for p in 1..9 {
            assert_eq!(count_closed_bounded(&g, 0, p, 1), big(1));
        }
        assert_eq!(count_closed_bounded(&g, 0, 4, 2), big(5));
        let c3 = OrientedGraph::cycle(3);
        assert_eq!(count_closed_bounded(&c3, 0, 3, 2), big(0));
        // M >= any return length reproduces the full count
        for p in 1..10 {
            assert_eq!(
                count_closed_bounded(&g, 0, p, p),
                count_closed(&g, 0, p)
            );
        }
    }

    #[test]
    fn phi_examples() {
        let g = OrientedGraph::golden_mean();
        let path = ClosedPath::new(&g, vec![0, 0, 1, 0]).unwrap();
        let d = phi_decompose(&path, 0, 1).unwrap();
        assert_eq!(d.short.vertices(), &[0, 0]);
        assert_eq!(d.long.vertices(), &[0, 1, 0]);
        assert_eq!(d.long_starts.iter().copied().collect::<Vec<_>>(), vec![2]);

        // all short: M large
        let d = phi_decompose(&path, 0, 5).unwrap();
        assert!(d.long.is_empty());
        assert!(d.long_starts.is_empty());
        assert_eq!(d.short.len(), 3);

        // one long return
        let c3 = OrientedGraph::cycle(3);
        let path = ClosedPath::new(&c3, vec![0, 1, 2, 0]).unwrap();
        let d = phi_decompose(&path, 0, 2).unwrap();
        assert!(d.short.is_empty());
        assert_eq!(d.long.len(), 3);
        assert_eq!(d.long_starts.iter().copied().collect::<Vec<_>>(), vec![1]);

        // wrong basepoint
        assert!(phi_decompose(&path, 1, 2).is_err());
    }

    #[test]
    fn gurevic_limits() {
        let g = OrientedGraph::golden_mean();
        let est = gurevic_entropy(&g, 0, 40).unwrap();
        let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
        assert!((est.value - phi.ln()).abs() <= 0.01, "estimate {}", est.value);
        assert!(est.whole_graph);

        let loop1 = OrientedGraph::new(1, [(0, 0)]).unwrap();
        let est = gurevic_entropy(&loop1, 0, 10).unwrap();
        assert!(est.value.abs() < 1e-12);

        let k3 = OrientedGraph::complete(3);
        let est = gurevic_entropy(&k3, 0, 40).unwrap();
        assert!((est.value - 3.0_f64.ln()).abs() <= 0.005, "estimate {}", est.value);

        // off-cycle vertex errors
        let g = OrientedGraph::new(2, [(0, 0), (0, 1)]).unwrap();
        assert!(gurevic_entropy(&g, 1, 10).is_err());
    }

    #[test]
    fn spectral_values() {
        let g = OrientedGraph::golden_mean();
        let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
        assert!((spectral_entropy(&g).unwrap() - phi.ln()).abs() < 1e-12);
        let k4 = OrientedGraph::complete(4);
        assert!((spectral_entropy(&k4).unwrap() - 4.0_f64.ln()).abs() < 1e-12);
        let c5 = OrientedGraph::cycle(5);
        assert!(spectral_entropy(&c5).unwrap().abs() < 1e-12);
        let acyclic = OrientedGraph::new(2, [(0, 1)]).unwrap();
        assert!(spectral_entropy(&acyclic).is_none());
    }
}
