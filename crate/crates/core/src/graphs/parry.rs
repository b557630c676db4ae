//! The maximal-entropy Markov measure of a finite strongly connected graph
//! and the periodic-orbit empirical distribution it attracts.

use super::counting::count_closed_upto;
use super::scc::{component_has_cycle, strongly_connected_components};
use super::OrientedGraph;
use crate::error::{Error, Result};
use crate::scalar::EPS_EIG;
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// Stationary Markov measure of maximal entropy on a strongly connected
/// graph: vertex probability ∝ l_v r_v from the left/right Perron vectors,
/// transition probability (v→w) = r_w / (λ r_v).
#[derive(Clone, Debug)]
pub struct ParryMeasure {
    pub vertex_probs: Vec<f64>,
    /// Row-stochastic transitions aligned with the adjacency lists.
    pub transitions: Vec<Vec<(usize, f64)>>,
    /// log λ, the measure-theoretic entropy of the chain.
    pub entropy: f64,
}

fn power_vector(graph: &OrientedGraph, transpose: bool) -> (Vec<f64>, f64) {
    let n = graph.vertex_count();
    let mut v = vec![1.0_f64; n];
    let mut lambda = 1.0;
    let mut best_residual = f64::INFINITY;
    let mut stall = 0u32;
    for _ in 0..500_000 {
        let mut w = v.clone(); // +I shift keeps periodic graphs converging
        for (a, b) in graph.edges() {
            let (src, dst) = if transpose { (b, a) } else { (a, b) };
            w[dst] += v[src];
        }
        let norm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in &mut w {
            *x /= norm;
        }
        // Rayleigh quotient and residual of the shifted operator
        let mut aw = w.clone();
        for (a, b) in graph.edges() {
            let (src, dst) = if transpose { (b, a) } else { (a, b) };
            aw[dst] += w[src];
        }
        let num: f64 = w.iter().zip(&aw).map(|(a, b)| a * b).sum();
        let residual = aw
            .iter()
            .zip(&w)
            .map(|(a, b)| (a - num * b).abs())
            .fold(0.0_f64, f64::max);
        lambda = num - 1.0;
        v = w;
        if residual <= EPS_EIG * 1e-2 * num.max(1.0) {
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
    (v, lambda)
}

pub fn parry_measure(graph: &OrientedGraph) -> Result<ParryMeasure> {
    let comps = strongly_connected_components(graph);
    if comps.len() != 1 {
        return Err(Error::NotStronglyConnected);
    }
    if !component_has_cycle(graph, &comps[0]) {
        return Err(Error::NoCycle);
    }
    let (r, lambda) = power_vector(graph, false);
    let (l, _) = power_vector(graph, true);
    let mut probs: Vec<f64> = l.iter().zip(&r).map(|(a, b)| a * b).collect();
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    let transitions: Vec<Vec<(usize, f64)>> = (0..graph.vertex_count())
        .map(|v| {
            graph
                .out(v)
                .iter()
                .map(|&w| (w, r[w] / (lambda * r[v])))
                .collect()
        })
        .collect();
    Ok(ParryMeasure {
        vertex_probs: probs,
        transitions,
        entropy: lambda.ln(),
    })
}

impl ParryMeasure {
    /// Max absolute stationarity defect: ||πP - π||_inf.
    pub fn stationarity_defect(&self) -> f64 {
        let n = self.vertex_probs.len();
        let mut inflow = vec![0.0_f64; n];
        for (v, outs) in self.transitions.iter().enumerate() {
            for &(w, p) in outs {
                inflow[w] += self.vertex_probs[v] * p;
            }
        }
        inflow
            .iter()
            .zip(&self.vertex_probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Shannon entropy rate of the chain: -Σ_v π_v Σ_w P(v,w) log P(v,w).
    pub fn chain_entropy(&self) -> f64 {
        let mut h = 0.0;
        for (v, outs) in self.transitions.iter().enumerate() {
            for &(_, p) in outs {
                if p > 0.0 {
                    h -= self.vertex_probs[v] * p * p.ln();
                }
            }
        }
        h
    }
}

/// Mass a measure puts on the cylinder [F] of a vertex subset.
pub fn mass_on(measure: &ParryMeasure, f_set: &[usize]) -> f64 {
    f_set.iter().map(|&v| measure.vertex_probs[v]).sum()
}

/// Empirical vertex distribution of all closed paths of length p: since
/// rotation maps closed paths with a marked position at v bijectively to
/// closed paths at v, the distribution is the diagonal of A^p normalized by
/// its trace. No path enumeration is needed.
pub fn bowen_empirical(graph: &OrientedGraph, p: usize) -> Result<Vec<f64>> {
    let n = graph.vertex_count();
    let mut diag: Vec<BigUint> = Vec::with_capacity(n);
    for u in 0..n {
        let counts = count_closed_upto(graph, u, p);
        diag.push(counts[p - 1].clone());
    }
    let trace: BigUint = diag.iter().sum();
    if trace.is_zero() {
        return Err(Error::NoPathOfLength(p));
    }
    // counts are exact; the quotient moves to f64 at the end
    Ok(diag
        .iter()
        .map(|d| ratio_to_f64(d, &trace))
        .collect())
}

/// num/den as f64, stable even when both exceed f64 range.
fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if let (Some(n), Some(d)) = (num.to_f64(), den.to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let shift = den.bits().saturating_sub(64);
    let n = (num >> shift).to_f64().unwrap_or(0.0);
    let d = (den >> shift).to_f64().unwrap_or(1.0);
    n / d
}
