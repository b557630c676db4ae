//! Entropy estimators for interval maps and the one-dimensional bound
//! arithmetic built on them: lap growth, diagram spectral entropy, the
//! derivative growth rate R(f), periodic-point Lyapunov exponents, the
//! turning-orbit bound, and assembled upper-bound reports.

use crate::error::{Error, Result};
use crate::graphs::{self, OrientedGraph};
use crate::hofbauer::{build_diagram, HofbauerDiagram};
use crate::maps::PiecewiseMonotoneMap;
use crate::scalar::{Interval, Scalar};
use crate::symbolic;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateMethod {
    Lap,
    Hofbauer,
    Gurevic,
}

/// An entropy estimate with its convergence sequence for display.
#[derive(Clone, Debug)]
pub struct EntropyEstimate {
    pub method: EstimateMethod,
    pub value: f64,
    /// (parameter, running estimate) pairs: n for lap, N for diagrams.
    pub sequence: Vec<(usize, f64)>,
    pub flags: Vec<String>,
}

/// Lap-growth estimate: the slope of log lap(n) over the second half of the
/// computed range kills the multiplicative constant.
pub fn entropy_lap(map: &PiecewiseMonotoneMap, n_max: usize, budget: usize) -> Result<EntropyEstimate> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be positive".into()));
    }
    let mut seq = Vec::new();
    let mut flags = Vec::new();
    let counts = map.lap_counts_upto(n_max, budget)?;
    if counts.len() < n_max {
        flags.push(format!(
            "partial estimate: budget reached after n = {}",
            counts.len()
        ));
    }
    let laps: Vec<(usize, f64)> = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| (i + 1, (c as f64).ln()))
        .collect();
    for &(n, ln) in &laps {
        seq.push((n, ln / n as f64));
    }
    if laps.is_empty() {
        return Err(Error::BudgetExceeded("no lap count fits the budget".into()));
    }
    let (n_hi, l_hi) = *laps.last().unwrap();
    let n_lo = (n_hi / 2).max(1);
    let value = if n_hi == n_lo {
        l_hi / n_hi as f64
    } else {
        let l_lo = laps[n_lo - 1].1;
        ((l_hi - l_lo) / (n_hi - n_lo) as f64).max(0.0)
    };
    Ok(EntropyEstimate {
        method: EstimateMethod::Lap,
        value,
        sequence: seq,
        flags,
    })
}

/// h(D_N) as the best spectral entropy over strongly connected components,
/// with the h(D_n) sequence for n = 1..=N computed from depth restrictions
/// of the one diagram, and a cross-check growth estimate at a max-L vertex.
#[derive(Clone, Debug)]
pub struct HofbauerEntropy {
    pub estimate: EntropyEstimate,
    pub diagram: HofbauerDiagram,
    /// Closed-path growth estimate at a vertex of maximal image length.
    pub gurevic_cross: Option<f64>,
}

pub fn entropy_hofbauer(
    map: &PiecewiseMonotoneMap,
    partition: &crate::maps::NaturalPartition,
    n: usize,
    p_max: usize,
) -> Result<HofbauerEntropy> {
    let diagram = build_diagram(map, partition, n)?;
    let graph = OrientedGraph::from(&diagram);
    let mut sequence = Vec::new();
    for depth in 1..=n {
        let keep: Vec<usize> = (0..diagram.vertex_count())
            .filter(|&v| diagram.vertices[v].depth <= depth)
            .collect();
        let (sub, _) = graph.induced(&keep);
        sequence.push((depth, graphs::spectral_entropy(&sub).unwrap_or(0.0)));
    }
    let mut flags = Vec::new();
    let value = match graphs::spectral_entropy(&graph) {
        Some(h) => h,
        None => {
            flags.push("diagram has no cycle; entropy reported as zero".into());
            0.0
        }
    };
    let gurevic_cross = if p_max > 0 && diagram.vertex_count() > 0 {
        let best = (0..diagram.vertex_count())
            .max_by(|&a, &b| {
                diagram.vertices[a]
                    .length()
                    .partial_cmp(&diagram.vertices[b].length())
                    .unwrap()
            })
            .unwrap();
        graphs::gurevic_entropy(&graph, best, p_max)
            .ok()
            .map(|e| e.value)
    } else {
        None
    };
    Ok(HofbauerEntropy {
        estimate: EntropyEstimate {
            method: EstimateMethod::Hofbauer,
            value,
            sequence,
            flags,
        },
        diagram,
        gurevic_cross,
    })
}

/// R(f) report: the sequence (1/n) log+ ||(f^n)'|| over doubling n and its
/// infimum, which bounds the limit from above by submultiplicativity.
#[derive(Clone, Debug)]
pub struct GrowthRate {
    pub sequence: Vec<(usize, f64)>,
    pub value: f64,
}

pub fn growth_rate_r(map: &PiecewiseMonotoneMap, n_max: usize, budget: usize) -> Result<GrowthRate> {
    let mut ns = vec![1usize];
    while ns.last().unwrap() * 2 <= n_max {
        ns.push(ns.last().unwrap() * 2);
    }
    if *ns.last().unwrap() != n_max {
        ns.push(n_max);
    }
    let mut sequence = Vec::new();
    let mut value = f64::INFINITY;
    for &n in &ns {
        match map.sup_deriv_norm(n, budget) {
            Ok(norm) => {
                let h = (norm.to_f64().ln().max(0.0)) / n as f64;
                sequence.push((n, h));
                value = value.min(h);
            }
            Err(Error::BudgetExceeded(_)) => break,
            Err(e) => return Err(e),
        }
    }
    if sequence.is_empty() {
        return Err(Error::BudgetExceeded("no derivative norm fits the budget".into()));
    }
    Ok(GrowthRate { sequence, value })
}

/// A fixed point of f^T.
#[derive(Clone, Debug)]
pub struct PeriodicPoint {
    pub point: Scalar,
    /// The queried return time (not necessarily the minimal period).
    pub period: usize,
    pub multiplier: Scalar,
    /// |multiplier| within tolerance of 1.
    pub indeterminate: bool,
}

#[derive(Clone, Debug)]
pub struct PeriodicPoints {
    pub points: Vec<PeriodicPoint>,
    /// Maximal intervals on which f^T is the identity.
    pub fixed_intervals: Vec<Interval>,
}

/// Affine representation of f^T on a subinterval (piecewise-linear maps).
#[derive(Clone, Debug)]
struct AffineFrag {
    domain: Interval,
    slope: Scalar,
    intercept: Scalar,
}

fn affine_pieces(map: &PiecewiseMonotoneMap) -> Option<Vec<AffineFrag>> {
    let mut out = Vec::new();
    for p in map.pieces() {
        match &p.f {
            crate::maps::BranchFn::Poly(poly) if poly.degree() <= 1 => {
                let slope = poly.coeffs.get(1).cloned().unwrap_or_else(Scalar::zero);
                out.push(AffineFrag {
                    domain: p.iv.clone(),
                    slope,
                    intercept: poly.coeffs[0].clone(),
                });
            }
            _ => return None,
        }
    }
    Some(out)
}

fn iterate_affine(map: &PiecewiseMonotoneMap, t: usize, budget: usize) -> Result<Vec<AffineFrag>> {
    let pieces = affine_pieces(map).ok_or_else(|| {
        Error::InvalidParameter("affine iteration requires a piecewise-linear map".into())
    })?;
    let mut frags: Vec<AffineFrag> = vec![AffineFrag {
        domain: Interval::unit(),
        slope: Scalar::one(),
        intercept: Scalar::zero(),
    }];
    for _ in 0..t {
        let mut next = Vec::with_capacity(frags.len() * 2);
        for fr in &frags {
            let va = fr.slope.clone() * fr.domain.lo.clone() + fr.intercept.clone();
            let vb = fr.slope.clone() * fr.domain.hi.clone() + fr.intercept.clone();
            let (ilo, ihi) = if va <= vb { (va, vb) } else { (vb, va) };
            let image = Interval::new(ilo, ihi);
            for p in &pieces {
                let cut = image.intersect(&p.domain);
                if cut.is_empty() && !(image.lo == image.hi && p.domain.contains(&image.lo)) {
                    continue;
                }
                // pull the cut back through the affine fragment
                let (dlo, dhi) = if fr.slope.is_zero() {
                    (fr.domain.lo.clone(), fr.domain.hi.clone())
                } else {
                    let a = (cut.lo.clone() - fr.intercept.clone()) / fr.slope.clone();
                    let b = (cut.hi.clone() - fr.intercept.clone()) / fr.slope.clone();
                    if a <= b {
                        (a, b)
                    } else {
                        (b, a)
                    }
                };
                let dom = Interval::new(dlo, dhi).intersect(&fr.domain);
                if dom.is_empty() {
                    continue;
                }
                next.push(AffineFrag {
                    domain: dom,
                    slope: p.slope.clone() * fr.slope.clone(),
                    intercept: p.slope.clone() * fr.intercept.clone() + p.intercept.clone(),
                });
            }
        }
        if next.len() > budget {
            return Err(Error::BudgetExceeded(format!(
                "affine refinement produced {} fragments",
                next.len()
            )));
        }
        frags = next;
    }
    Ok(frags)
}

/// Fixed points of f^T with multipliers: exact fragment solves for
/// piecewise-linear maps, grid + bisection otherwise.
pub fn find_periodic(
    map: &PiecewiseMonotoneMap,
    t: usize,
    tol: f64,
) -> Result<PeriodicPoints> {
    if t == 0 {
        return Err(Error::InvalidParameter("period must be positive".into()));
    }
    let mut points: Vec<PeriodicPoint> = Vec::new();
    let mut fixed_intervals = Vec::new();
    let push_point = |x: Scalar, mult: Scalar, points: &mut Vec<PeriodicPoint>| {
        if points
            .iter()
            .any(|p| p.point.approx_eq(&x, tol.max(1e-12)))
        {
            return;
        }
        let indeterminate = (mult.to_f64().abs() - 1.0).abs() <= tol;
        points.push(PeriodicPoint {
            point: x,
            period: t,
            multiplier: mult,
            indeterminate,
        });
    };

    if let Some(_) = affine_pieces(map) {
        for fr in iterate_affine(map, t, 4_000_000)? {
            let one = Scalar::one();
            if fr.slope == one && fr.intercept.is_zero() {
                fixed_intervals.push(fr.domain.clone());
                continue;
            }
            if fr.slope == one {
                continue; // parallel shift, no fixed point
            }
            let x = fr.intercept.clone() / (one - fr.slope.clone());
            if x >= fr.domain.lo && x <= fr.domain.hi {
                push_point(x, fr.slope.clone(), &mut points);
            }
        }
    } else {
        let grid = 4096 * t;
        let g = |x: f64| -> f64 {
            let mut y = x;
            for _ in 0..t {
                y = map.eval_f64(y).unwrap_or(f64::NAN);
            }
            y - x
        };
        let roots = crate::poly::scan_roots(&g, 0.0, 1.0, grid);
        for x in roots {
            let mut mult = 1.0;
            let mut y = x;
            for _ in 0..t {
                mult *= map.deriv(&Scalar::Float(y), 1)?.to_f64();
                y = map.eval_f64(y)?;
            }
            push_point(Scalar::Float(x), Scalar::Float(mult), &mut points);
        }
        // endpoints are not caught by interior sign changes
        for x in [0.0, 1.0] {
            if (map.iterate(&Scalar::Float(x), t)?.to_f64() - x).abs() <= tol {
                let mut mult = 1.0;
                let mut y = x;
                for _ in 0..t {
                    mult *= map.deriv(&Scalar::Float(y), 1)?.to_f64();
                    y = map.eval_f64(y)?;
                }
                push_point(Scalar::Float(x), Scalar::Float(mult), &mut points);
            }
        }
    }
    // merge adjacent identity fragments
    fixed_intervals.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
    let mut merged: Vec<Interval> = Vec::new();
    for iv in fixed_intervals {
        match merged.last_mut() {
            Some(last) if last.hi >= iv.lo => {
                if iv.hi > last.hi {
                    last.hi = iv.hi;
                }
            }
            _ => merged.push(iv),
        }
    }
    Ok(PeriodicPoints {
        points,
        fixed_intervals: merged,
    })
}

/// (1/T) log |(f^T)'(point)|.
pub fn lyapunov_at_periodic(
    map: &PiecewiseMonotoneMap,
    point: &Scalar,
    t: usize,
) -> Result<f64> {
    if t == 0 {
        return Err(Error::InvalidParameter("period must be positive".into()));
    }
    let mut mult = 1.0_f64;
    let mut y = point.clone();
    for _ in 0..t {
        mult *= map.deriv(&y, 1)?.to_f64();
        y = map.eval(&y)?;
    }
    if mult == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(mult.abs().ln() / t as f64)
}

/// Turning-orbit bound: max over periodic orbits of minimal period q <= q_max
/// of (p/q) log 2 where p counts turning loci on the orbit.
#[derive(Clone, Debug)]
pub struct BetaEstimate {
    pub value: f64,
    pub orbits_examined: usize,
    pub horizon: usize,
    pub flags: Vec<String>,
}

pub fn beta_bound(map: &PiecewiseMonotoneMap, q_max: usize, tol: f64) -> Result<BetaEstimate> {
    let turning = map.turning_loci()?;
    let on_turning = |x: &Scalar| -> bool {
        turning.iter().any(|b| {
            let xf = x.to_f64();
            let (lo, hi) = b.to_f64_pair();
            xf >= lo - tol && xf <= hi + tol
        })
    };
    let mut value = 0.0_f64;
    let mut orbits = 0usize;
    let mut flags = vec![format!("search horizon q <= {q_max}")];
    let mut seen: Vec<Scalar> = Vec::new();
    for q in 1..=q_max {
        let pp = find_periodic(map, q, tol)?;
        if !pp.fixed_intervals.is_empty() && q == 1 {
            flags.push("interval of fixed points".into());
        }
        'points: for p in &pp.points {
            // skip points already seen at a smaller period
            for s in &seen {
                if s.approx_eq(&p.point, tol.max(1e-12)) {
                    continue 'points;
                }
            }
            // minimal period check and orbit collection
            let mut orbit = vec![p.point.clone()];
            let mut y = map.eval(&p.point)?;
            let mut minimal = true;
            for _ in 1..q {
                if y.approx_eq(&p.point, tol.max(1e-12)) {
                    minimal = false;
                    break;
                }
                orbit.push(y.clone());
                y = map.eval(&y)?;
            }
            if !minimal {
                continue;
            }
            orbits += 1;
            let p_count = orbit.iter().filter(|x| on_turning(x)).count();
            seen.extend(orbit);
            if p_count > 0 {
                value = value.max((p_count as f64 / q as f64) * std::f64::consts::LN_2);
            }
        }
    }
    Ok(BetaEstimate {
        value,
        orbits_examined: orbits,
        horizon: q_max,
        flags,
    })
}

/// Parameters for an assembled bounds report.
#[derive(Clone, Debug)]
pub struct BoundsParams {
    pub n_max: usize,
    pub depth: usize,
    pub p_max: usize,
    pub q_max: usize,
    pub periodic_t_scan: usize,
    pub budget: usize,
    pub tol: f64,
}

impl Default for BoundsParams {
    fn default() -> Self {
        BoundsParams {
            n_max: 14,
            depth: 8,
            p_max: 40,
            q_max: 6,
            periodic_t_scan: 3,
            budget: 4_000_000,
            tol: 1e-9,
        }
    }
}

/// All bound arithmetic for one map at smoothness r (d = 1 throughout).
#[derive(Clone, Debug)]
pub struct BoundsReport {
    pub h_lap: Option<EntropyEstimate>,
    pub h_hofbauer: Option<EntropyEstimate>,
    /// Best available entropy estimate.
    pub h: f64,
    pub r_growth: f64,
    pub smoothness: f64,
    /// h + R/r.
    pub yomdin_bound: f64,
    /// max(h, R/r).
    pub main_theorem_bound: f64,
    pub beta: Option<f64>,
    /// (point, T, multiplier, Lyapunov exponent) of detected periodic points.
    pub periodic: Vec<(f64, usize, f64, f64)>,
    pub flags: Vec<String>,
}

pub fn bounds_report(
    map: &PiecewiseMonotoneMap,
    r: f64,
    params: &BoundsParams,
) -> Result<BoundsReport> {
    if !(r >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "smoothness parameter r = {r} must be at least 1"
        )));
    }
    let mut flags = Vec::new();
    let h_lap = match entropy_lap(map, params.n_max, params.budget) {
        Ok(e) => Some(e),
        Err(e) => {
            flags.push(format!("lap estimate failed: {e}"));
            None
        }
    };
    let h_hofbauer = match map
        .natural_partition()
        .and_then(|p| entropy_hofbauer(map, &p, params.depth, params.p_max))
    {
        Ok(e) => Some(e.estimate),
        Err(e) => {
            flags.push(format!("diagram estimate failed: {e}"));
            None
        }
    };
    let h = h_lap
        .iter()
        .chain(h_hofbauer.iter())
        .map(|e| e.value)
        .fold(0.0_f64, f64::max);
    let r_growth = match growth_rate_r(map, params.n_max.min(16), params.budget) {
        Ok(g) => g.value,
        Err(e) => {
            flags.push(format!("growth rate failed: {e}"));
            0.0
        }
    };
    let beta = match beta_bound(map, params.q_max, params.tol) {
        Ok(b) => Some(b.value),
        Err(e) => {
            flags.push(format!("beta bound failed: {e}"));
            None
        }
    };
    let mut periodic = Vec::new();
    for t in 1..=params.periodic_t_scan {
        if let Ok(pp) = find_periodic(map, t, params.tol) {
            for p in pp.points {
                let lyap = lyapunov_at_periodic(map, &p.point, t).unwrap_or(f64::NEG_INFINITY);
                periodic.push((p.point.to_f64(), t, p.multiplier.to_f64(), lyap));
            }
        }
    }
    let ratio = r_growth / r;
    Ok(BoundsReport {
        h_lap,
        h_hofbauer,
        h,
        r_growth,
        smoothness: r,
        yomdin_bound: h + ratio,
        main_theorem_bound: h.max(ratio),
        beta,
        periodic,
        flags,
    })
}

/// One row of the steep-branch count diagnostic.
#[derive(Clone, Debug)]
pub struct BranchCountRow {
    pub threshold: f64,
    pub count: usize,
    /// count / (||f^(r)||_inf * l^(1/(r-1))), when the denominator is nonzero.
    pub ratio: Option<f64>,
}

/// Counts natural-partition branches with sup|f'| > l for each threshold.
pub fn critical_branch_count_check(
    map: &PiecewiseMonotoneMap,
    r: u32,
    l_values: &[f64],
) -> Result<Vec<BranchCountRow>> {
    if r <= 1 {
        return Err(Error::InvalidParameter("the diagnostic needs r > 1".into()));
    }
    let partition = map.natural_partition()?;
    let rth = map.sup_abs_deriv_order(r)?;
    let mut rows = Vec::new();
    for &l in l_values {
        let count = partition
            .branches
            .iter()
            .filter(|b| map.sup_abs_deriv_over(b).to_f64() > l)
            .count();
        let denom = rth * l.powf(1.0 / (r as f64 - 1.0));
        let ratio = if denom > 1e-300 {
            Some(count as f64 / denom)
        } else {
            None
        };
        rows.push(BranchCountRow {
            threshold: l,
            count,
            ratio,
        });
    }
    Ok(rows)
}

/// One orbit's entropy-vs-exponent diagnostic.
#[derive(Clone, Debug)]
pub struct RuelleRow {
    pub start: f64,
    pub lyapunov: f64,
    /// Word-complexity growth of the orbit's itinerary (a separation proxy).
    pub entropy_proxy: f64,
    pub consistent: bool,
    pub resampled: bool,
}

/// Time-averages log|f'| along sample orbits and compares an orbit-complexity
/// proxy against max(lyapunov, 0). Reported, not enforced. Exact starts on
/// exact maps keep the orbit faithful over long horizons (binary doubles fed
/// to expanding maps collapse onto dyadic orbits).
pub fn ruelle_check(
    map: &PiecewiseMonotoneMap,
    starts: &[Scalar],
    orbit_len: usize,
    word_len: usize,
) -> Result<Vec<RuelleRow>> {
    let partition = map.natural_partition()?;
    let nudge = Scalar::ratio(137, 10_000);
    let mut rows = Vec::new();
    for s0 in starts {
        let mut start = s0.clone();
        let mut resampled = false;
        let mut done = false;
        for _attempt in 0..64 {
            let mut x = start.clone();
            let mut acc = 0.0_f64;
            let mut ok = true;
            let mut letters = Vec::with_capacity(orbit_len);
            for _ in 0..orbit_len {
                let d = map.deriv(&x, 1)?.to_f64().abs();
                if d < 1e-300 {
                    ok = false;
                    break;
                }
                match partition.locate(&x) {
                    Some(b) => letters.push(b),
                    None => {
                        ok = false;
                        break;
                    }
                }
                acc += d.ln();
                x = map.eval(&x)?;
            }
            if !ok {
                start = start + nudge.clone();
                if start >= Scalar::one() {
                    start = start - Scalar::one();
                }
                resampled = true;
                continue;
            }
            let lyapunov = acc / orbit_len as f64;
            let w = word_len.min(letters.len());
            let mut words = std::collections::HashSet::new();
            for win in letters.windows(w) {
                words.insert(win.to_vec());
            }
            let entropy_proxy = if w > 0 {
                (words.len() as f64).ln() / w as f64
            } else {
                0.0
            };
            rows.push(RuelleRow {
                start: start.to_f64(),
                lyapunov,
                entropy_proxy,
                consistent: entropy_proxy <= lyapunov.max(0.0) + 0.15,
                resampled,
            });
            done = true;
            break;
        }
        if !done {
            rows.push(RuelleRow {
                start: s0.to_f64(),
                lyapunov: f64::NEG_INFINITY,
                entropy_proxy: 0.0,
                consistent: true,
                resampled: true,
            });
        }
    }
    Ok(rows)
}

/// Orbit word complexity used by `ruelle_check`, exposed for tests.
pub fn orbit_word_complexity(
    map: &PiecewiseMonotoneMap,
    x0: f64,
    orbit_len: usize,
    word_len: usize,
) -> Result<f64> {
    let partition = map.natural_partition()?;
    let w = symbolic::itinerary(map, &partition, &Scalar::Float(x0), orbit_len, 1e-13)?;
    let mut words = std::collections::HashSet::new();
    for win in w.0.windows(word_len) {
        words.insert(win.to_vec());
    }
    Ok((words.len() as f64).ln() / word_len as f64)
}
