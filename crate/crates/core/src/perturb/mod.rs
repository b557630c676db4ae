//! Windowed sinusoidal perturbations near a flat critical connection and
//! certified horseshoe lower bounds for the perturbed map.

mod family;

pub use family::tangency_family;

use crate::error::{Error, Result};
use crate::graphs::{self, OrientedGraph};
use crate::maps::{Blend, BranchFn, PiecewiseMonotoneMap, SineWave};
use crate::poly::{hermite, Poly};
use crate::scalar::{Interval, Scalar};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A critical point flat to some order whose forward orbit lands on a
/// repelling periodic point.
#[derive(Clone, Debug)]
pub struct TangencyData {
    pub critical: Scalar,
    pub critical_value: Scalar,
    pub periodic_point: Scalar,
    pub period: usize,
    pub multiplier: Scalar,
    /// f^connect_k(critical) = periodic_point.
    pub connect_k: usize,
    /// Largest j with derivatives 1..=j vanishing at the critical point.
    pub flat_order: u32,
}

#[derive(Clone, Copy, Debug)]
pub struct TangencySearch {
    pub k_max: usize,
    pub t_max: usize,
    pub tol: f64,
}

impl Default for TangencySearch {
    fn default() -> Self {
        TangencySearch {
            k_max: 12,
            t_max: 6,
            tol: 1e-10,
        }
    }
}

/// Scans isolated critical points for a flat connection onto a repelling
/// periodic orbit. Absence is a valid result, not an error.
pub fn find_tangency(
    map: &PiecewiseMonotoneMap,
    search: &TangencySearch,
) -> Result<Option<TangencyData>> {
    let crit = map.critical_set()?;
    let mut best: Option<TangencyData> = None;
    for c in &crit.points {
        // flat order: one-sided derivatives on both sides must vanish
        let mut flat = 0u32;
        'orders: for j in 1..=map.smoothness_floor() {
            for side in [-1.0, 1.0] {
                let x = Scalar::Float(c.to_f64() + side * 1e-13);
                let x = if c.is_exact() && side > 0.0 { c.clone() } else { x };
                let d = match map.deriv(&x, j) {
                    Ok(d) => d,
                    Err(_) => break 'orders,
                };
                if d.to_f64().abs() > search.tol {
                    break 'orders;
                }
            }
            flat = j;
        }
        if flat == 0 {
            continue;
        }
        // forward orbit onto a periodic point
        let mut x = c.clone();
        for k in 1..=search.k_max {
            x = map.eval(&x)?;
            for t in 1..=search.t_max {
                let back = map.iterate(&x, t)?;
                let hit = if x.is_exact() && back.is_exact() {
                    back == x
                } else {
                    back.approx_eq(&x, search.tol)
                };
                if !hit {
                    continue;
                }
                let mut mult = Scalar::one();
                let mut y = x.clone();
                for _ in 0..t {
                    mult = mult * map.deriv(&y, 1)?;
                    y = map.eval(&y)?;
                }
                if mult.to_f64().abs() <= 1.0 + search.tol {
                    continue;
                }
                let cand = TangencyData {
                    critical: c.clone(),
                    critical_value: map.eval(c)?,
                    periodic_point: x.clone(),
                    period: t,
                    multiplier: mult,
                    connect_k: k,
                    flat_order: flat,
                };
                let better = match &best {
                    None => true,
                    Some(b) => cand.flat_order > b.flat_order,
                };
                if better {
                    best = Some(cand);
                }
                break;
            }
            if best.as_ref().map_or(false, |b| b.critical == *c) {
                break;
            }
        }
    }
    Ok(best)
}

/// Parameters of one windowed perturbation.
#[derive(Clone, Copy, Debug)]
pub struct PerturbationParams {
    /// Window half-width.
    pub delta: f64,
    /// Iteration horizon.
    pub l: u32,
    /// Amplitude constant C in a = C * delta * |multiplier|^{-l}.
    pub amp_const: f64,
    /// Regularity governing the amplitude-frequency tradeoff a N^r = d^r / l.
    pub r: f64,
}

impl PerturbationParams {
    pub fn amplitude(&self, multiplier_abs: f64) -> f64 {
        self.amp_const * self.delta * multiplier_abs.powi(-(self.l as i32))
    }

    /// N from a N^r = delta^r / l, rounded down.
    pub fn n_oscillations(&self, multiplier_abs: f64) -> u64 {
        let a = self.amplitude(multiplier_abs);
        ((self.delta.powf(self.r) / (a * self.l as f64)).powf(1.0 / self.r)).floor() as u64
    }

    /// True when l is small against |log delta| (the asymptotics degrade).
    pub fn horizon_warning(&self) -> bool {
        (self.l as f64) < 5.0 * self.delta.ln().abs()
    }
}

/// Replaces f inside (c - delta, c + delta) by a * sin(N x / delta) + f(c),
/// blended into f over strips of width delta/10 at both window edges so the
/// result stays C^r. Pieces are split at the oscillation's turning points.
pub fn construct_perturbation(
    map: &PiecewiseMonotoneMap,
    tangency: &TangencyData,
    params: &PerturbationParams,
) -> Result<PiecewiseMonotoneMap> {
    if params.l == 0 {
        return Err(Error::InvalidParameter("horizon l must be at least 1".into()));
    }
    if params.delta <= 0.0 {
        return Err(Error::InvalidParameter("delta must be positive".into()));
    }
    let c = tangency.critical.to_f64();
    let delta = params.delta;
    let (wlo, whi) = (c - delta, c + delta);
    if wlo <= 0.0 || whi >= 1.0 {
        return Err(Error::Geometry(format!(
            "window ({wlo}, {whi}) escapes (0,1)"
        )));
    }
    // the window must avoid every critical point except c itself
    let crit = map.critical_set()?;
    for pt in &crit.points {
        let x = pt.to_f64();
        if (x - c).abs() > 1e-12 && x > wlo && x < whi {
            return Err(Error::Geometry(format!(
                "window contains another critical point at {x}"
            )));
        }
    }
    for pl in &crit.plateaus {
        let (a, b) = pl.to_f64_pair();
        if b > wlo && a < whi {
            return Err(Error::Geometry("window touches a plateau".into()));
        }
    }
    // pieces under the window must share one polynomial (the local branch)
    let mut base: Option<Poly> = None;
    for p in map.pieces() {
        let (plo, phi) = p.iv.to_f64_pair();
        if phi <= wlo || plo >= whi {
            continue;
        }
        match &p.f {
            BranchFn::Poly(poly) => match &base {
                None => base = Some(poly.clone()),
                Some(b) if b == poly => {}
                Some(_) => {
                    return Err(Error::Geometry(
                        "window spans pieces with different branch functions".into(),
                    ))
                }
            },
            _ => {
                return Err(Error::Geometry(
                    "window overlaps a non-polynomial piece".into(),
                ))
            }
        }
    }
    let base = base.ok_or_else(|| Error::Geometry("window overlaps no piece".into()))?;

    let mult_abs = tangency.multiplier.to_f64().abs();
    let a = params.amplitude(mult_abs);
    if a < 1e-280 {
        return Err(Error::Precision(a));
    }
    let n_osc = params.n_oscillations(mult_abs);
    if n_osc < 2 {
        return Err(Error::InvalidParameter(format!(
            "oscillation count {n_osc} < 2: no horseshoe claimable; increase l or delta"
        )));
    }
    let sine = SineWave {
        amp: a,
        freq: n_osc as f64 / delta,
        phase: 0.0,
        offset: tangency.critical_value.to_f64(),
    };

    let blend_w = delta / 10.0;
    let r_floor = map.smoothness_floor().min(8) as usize;
    // smoothstep with derivatives 1..r vanishing at both ends, on [0,1];
    // kept in local coordinates (absolute-x expansion cancels catastrophically)
    let left_jet = vec![Scalar::zero(); r_floor + 1];
    let mut right_jet = vec![Scalar::zero(); r_floor + 1];
    right_jet[0] = Scalar::one();
    let step = hermite(&Scalar::zero(), &Scalar::one(), &left_jet, &right_jet);

    let left_blend = BranchFn::SineBlend(Blend {
        step: step.clone(),
        origin: wlo,
        scale: 1.0 / blend_w,
        sine,
        base: base.clone(),
    });
    let right_blend = BranchFn::SineBlend(Blend {
        step,
        origin: whi,
        scale: -1.0 / blend_w,
        sine,
        base: base.clone(),
    });
    let sine_fn = BranchFn::Sine(sine);

    // assemble pieces: originals trimmed to the window complement, then the
    // window interior split at turning points
    let mut pieces: Vec<(Interval, BranchFn)> = Vec::new();
    let wlo_s = Scalar::Float(wlo);
    let whi_s = Scalar::Float(whi);
    for p in map.pieces() {
        let (plo, phi) = p.iv.to_f64_pair();
        if phi <= wlo {
            pieces.push((p.iv.clone(), p.f.clone()));
        } else if plo < wlo {
            pieces.push((Interval::new(p.iv.lo.clone(), wlo_s.clone()), p.f.clone()));
        }
    }
    let mut window_pieces: Vec<(Interval, BranchFn)> = Vec::new();
    // split a window branch at its turning points so every stored piece is
    // monotone; the zero finder is the same one validation will use
    let add_split = |f: &BranchFn, lo: f64, hi: f64, out: &mut Vec<(Interval, BranchFn)>| {
        let mut nodes = vec![lo];
        nodes.extend(
            f.deriv_zeros(&Interval::new(Scalar::Float(lo), Scalar::Float(hi)))
                .into_iter()
                .filter(|z| *z > lo + 1e-12 && *z < hi - 1e-12),
        );
        nodes.push(hi);
        for w in nodes.windows(2) {
            if w[1] - w[0] > 1e-13 {
                out.push((
                    Interval::new(Scalar::Float(w[0]), Scalar::Float(w[1])),
                    f.clone(),
                ));
            }
        }
    };
    add_split(&left_blend, wlo, wlo + blend_w, &mut window_pieces);
    add_split(&sine_fn, wlo + blend_w, whi - blend_w, &mut window_pieces);
    add_split(&right_blend, whi - blend_w, whi, &mut window_pieces);
    pieces.extend(window_pieces);
    for p in map.pieces() {
        let (plo, phi) = p.iv.to_f64_pair();
        if plo >= whi {
            pieces.push((p.iv.clone(), p.f.clone()));
        } else if phi > whi {
            pieces.push((Interval::new(whi_s.clone(), p.iv.hi.clone()), p.f.clone()));
        }
    }
    PiecewiseMonotoneMap::from_pieces(
        pieces,
        map.smoothness_order(),
        format!("{}+sin[{}]", map.name(), params.l),
    )
}

/// Grid-sampled C^r distance: the maximum over derivative orders 0..=floor(r)
/// of sup |f^(k) - g^(k)| over the region where the maps differ.
pub fn cr_distance(
    f: &PiecewiseMonotoneMap,
    g: &PiecewiseMonotoneMap,
    r: f64,
    grid_density: usize,
) -> Result<f64> {
    let orders = r.min(16.0).floor() as u32;
    // locate the differing region by coarse scan
    let coarse = 512;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..=coarse {
        let x = k as f64 / coarse as f64;
        if (f.eval_f64(x)? - g.eval_f64(x)?).abs() > 1e-15
            || (f.deriv(&Scalar::Float(x), 1)?.to_f64()
                - g.deriv(&Scalar::Float(x), 1)?.to_f64())
            .abs()
                > 1e-12
        {
            lo = lo.min(x);
            hi = hi.max(x);
        }
    }
    if !lo.is_finite() {
        return Ok(0.0);
    }
    let pad = 2.0 / coarse as f64;
    lo = (lo - pad).max(0.0);
    hi = (hi + pad).min(1.0);
    // sample densely inside, including the junctions of both maps
    let mut xs: Vec<f64> = Vec::new();
    let n = grid_density.max(256);
    for k in 0..=n {
        xs.push(lo + (hi - lo) * k as f64 / n as f64);
    }
    for m in [f, g] {
        for p in m.pieces() {
            let (a, b) = p.iv.to_f64_pair();
            for x in [a, b] {
                if x >= lo && x <= hi {
                    xs.push(x.clamp(0.0, 1.0 - 1e-15));
                }
            }
        }
    }
    let mut best = 0.0_f64;
    for order in 0..=orders {
        for &x in &xs {
            let df = f.deriv(&Scalar::Float(x), order)?.to_f64();
            let dg = g.deriv(&Scalar::Float(x), order)?.to_f64();
            best = best.max((df - dg).abs());
        }
    }
    Ok(best)
}

/// A verified family of mutually covering intervals for g^l.
#[derive(Clone, Debug)]
pub struct HorseshoeCertificate {
    pub l: u32,
    /// Closed candidate intervals (the monotone oscillation laps used).
    pub intervals: Vec<Interval>,
    /// covering[i][j]: the g^l-image of interval i covers the closure of j.
    pub covering: Vec<Vec<bool>>,
    /// log(spectral radius of the covering matrix) / l; 0 when empty.
    pub entropy_bound: f64,
    /// Per-step evaluation slack used for the float-mode under-approximation.
    pub slack: f64,
}

impl HorseshoeCertificate {
    pub fn branch_count(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() || self.entropy_bound <= 0.0
    }
}

/// One application of g to a closed interval, under-approximated: evaluate at
/// the endpoints and every piece junction inside, take [min, max], and in
/// float mode shrink by the evaluation slack.
fn image_once(g: &PiecewiseMonotoneMap, iv: &Interval, slack: f64) -> Result<Interval> {
    let mut vals: Vec<Scalar> = Vec::with_capacity(8);
    vals.push(g.eval(&iv.lo)?);
    vals.push(g.eval(&iv.hi)?);
    let (lo, hi) = iv.to_f64_pair();
    for p in g.pieces() {
        let (a, b) = p.iv.to_f64_pair();
        for (x, xs) in [(a, &p.iv.lo), (b, &p.iv.hi)] {
            if x > lo && x < hi {
                vals.push(g.eval(xs)?);
            }
        }
    }
    let mut min = vals[0].clone();
    let mut max = vals[0].clone();
    let mut exact = true;
    for v in &vals {
        exact &= v.is_exact();
        if *v < min {
            min = v.clone();
        }
        if *v > max {
            max = v.clone();
        }
    }
    if exact {
        Ok(Interval::new(min, max))
    } else {
        Ok(Interval::new(
            Scalar::Float(min.to_f64() + slack),
            Scalar::Float(max.to_f64() - slack),
        ))
    }
}

/// Under-approximation of g^l(iv).
fn image_iterated(
    g: &PiecewiseMonotoneMap,
    iv: &Interval,
    l: u32,
    slack: f64,
    chunks: usize,
) -> Result<Interval> {
    let run = |start: &Interval| -> Result<Interval> {
        let mut cur = start.clone();
        for _ in 0..l {
            if cur.is_empty() {
                return Ok(cur);
            }
            cur = image_once(g, &cur, slack)?;
        }
        Ok(cur)
    };
    if chunks <= 1 {
        return run(iv);
    }
    // chunked union sharpens the under-approximation: adjacent chunks share
    // endpoints, so the hull of their images is still inside the true image
    let exact = iv.lo.is_exact() && iv.hi.is_exact();
    let mut union: Option<Interval> = None;
    for k in 0..chunks {
        let frac = |num: usize| -> Scalar {
            if exact {
                iv.lo.clone()
                    + (iv.hi.clone() - iv.lo.clone()) * Scalar::ratio(num as i64, chunks as i64)
            } else {
                let (lo, hi) = iv.to_f64_pair();
                Scalar::Float(lo + (hi - lo) * num as f64 / chunks as f64)
            }
        };
        let img = run(&Interval::new(frac(k), frac(k + 1)))?;
        if img.is_empty() {
            continue;
        }
        union = Some(match union {
            None => img,
            Some(u) => Interval::new(
                u.lo.clone().min(img.lo.clone()),
                u.hi.clone().max(img.hi.clone()),
            ),
        });
    }
    Ok(union.unwrap_or_else(|| Interval::new(Scalar::one(), Scalar::zero())))
}

/// Certifies mutual covering of oscillation laps under g^l. Candidates are
/// the pure-oscillation pieces strictly inside the window (or the pieces
/// named by `branch_hint`). Every covering claim comes from an
/// under-approximated interval image, so the certificate is sound up to the
/// reported slack.
pub fn certify_horseshoe(
    g: &PiecewiseMonotoneMap,
    l: u32,
    window: &Interval,
    branch_hint: Option<&[usize]>,
) -> Result<HorseshoeCertificate> {
    if l == 0 {
        return Err(Error::InvalidParameter("horizon l must be at least 1".into()));
    }
    let slack = 1e-12;
    let candidates: Vec<Interval> = match branch_hint {
        Some(idxs) => idxs
            .iter()
            .map(|&i| {
                g.pieces()
                    .get(i)
                    .map(|p| p.iv.clone())
                    .ok_or_else(|| Error::InvalidParameter(format!("piece {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?,
        None => {
            let (wlo, whi) = window.to_f64_pair();
            g.pieces()
                .iter()
                .filter(|p| matches!(p.f, BranchFn::Sine(_)))
                .filter(|p| {
                    let (a, b) = p.iv.to_f64_pair();
                    a > wlo && b < whi
                })
                .filter(|p| {
                    // full-amplitude laps only: endpoints at opposite extremes
                    if let BranchFn::Sine(s) = &p.f {
                        let va = s.eval(p.iv.lo.to_f64());
                        let vb = s.eval(p.iv.hi.to_f64());
                        (va - vb).abs() >= 1.9 * s.amp.abs()
                    } else {
                        false
                    }
                })
                .map(|p| p.iv.clone())
                .collect()
        }
    };
    if candidates.is_empty() {
        return Ok(HorseshoeCertificate {
            l,
            intervals: vec![],
            covering: vec![],
            entropy_bound: 0.0,
            slack,
        });
    }
    // precision guard: iterate each candidate with and without the per-step
    // shrink; if the realized erosion swamps the narrowest candidate, the
    // horizon exceeds what this precision certifies
    let min_width = candidates
        .iter()
        .map(|c| c.length().to_f64())
        .fold(f64::INFINITY, f64::min);
    let mut images = Vec::with_capacity(candidates.len());
    let mut worst_erosion = 0.0_f64;
    for j in &candidates {
        let shrunk = image_iterated(g, j, l, slack, 1)?;
        if !g.is_exact() {
            let hull = image_iterated(g, j, l, 0.0, 1)?;
            let erosion = (shrunk.lo.to_f64() - hull.lo.to_f64())
                .abs()
                .max((shrunk.hi.to_f64() - hull.hi.to_f64()).abs());
            worst_erosion = worst_erosion.max(erosion);
        }
        images.push(shrunk);
    }
    if worst_erosion > 0.05 * min_width {
        let growth = (worst_erosion / slack).max(2.0).powf(1.0 / l as f64);
        let max_l = ((0.05 * min_width / slack).ln() / growth.ln()).floor().max(1.0) as u32;
        return Err(Error::Horizon(worst_erosion, max_l));
    }
    let margin = if g.is_exact() { 0.0 } else { 1e-9 };
    let covers = |img: &Interval, target: &Interval| -> bool {
        !img.is_empty()
            && img.lo.to_f64() <= target.lo.to_f64() - margin
            && img.hi.to_f64() >= target.hi.to_f64() + margin
    };
    let covers_exact = |img: &Interval, target: &Interval| -> bool {
        !img.is_empty() && img.lo <= target.lo && img.hi >= target.hi
    };
    let covering: Vec<Vec<bool>> = images
        .iter()
        .map(|img| {
            candidates
                .iter()
                .map(|j| {
                    if g.is_exact() {
                        covers_exact(img, j)
                    } else {
                        covers(img, j)
                    }
                })
                .collect()
        })
        .collect();
    let edges = covering.iter().enumerate().flat_map(|(i, row)| {
        row.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(j, _)| (i, j))
    });
    let graph = OrientedGraph::new(candidates.len(), edges)?;
    let entropy_bound = graphs::spectral_entropy(&graph)
        .map(|h| h / l as f64)
        .unwrap_or(0.0);
    Ok(HorseshoeCertificate {
        l,
        intervals: candidates,
        covering,
        entropy_bound,
        slack,
    })
}

/// Independent recomputation of every covering claim at a finer resolution:
/// each candidate is subdivided into `resolution` chunks whose images are
/// iterated separately and unioned. Returns false if any claim fails.
pub fn verify_certificate(
    g: &PiecewiseMonotoneMap,
    cert: &HorseshoeCertificate,
    resolution: usize,
) -> Result<bool> {
    let margin = if g.is_exact() { 0.0 } else { 1e-9 };
    for (i, row) in cert.covering.iter().enumerate() {
        if !row.iter().any(|&b| b) {
            continue;
        }
        let img = image_iterated(g, &cert.intervals[i], cert.l, cert.slack, resolution.max(2))?;
        for (j, &claimed) in row.iter().enumerate() {
            if !claimed {
                continue;
            }
            let t = &cert.intervals[j];
            let ok = if g.is_exact() {
                !img.is_empty() && img.lo <= t.lo && img.hi >= t.hi
            } else {
                !img.is_empty()
                    && img.lo.to_f64() <= t.lo.to_f64() - margin
                    && img.hi.to_f64() >= t.hi.to_f64() + margin
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The displayed lower-bound chain value (1/(r l)) log(delta^{r-1} L^l /(C l))
/// where L is the absolute multiplier, evaluated in log space.
pub fn theoretical_chain(delta: f64, multiplier_abs: f64, r: f64, amp_const: f64, l: u32) -> f64 {
    ((r - 1.0) * delta.ln() + l as f64 * multiplier_abs.ln() - (amp_const * l as f64).ln())
        / (r * l as f64)
}

/// One row of the jump experiment.
#[derive(Clone, Debug)]
pub struct JumpRow {
    pub l: u32,
    pub delta: f64,
    pub amplitude: f64,
    pub n_oscillations: u64,
    pub cr_distance: Option<f64>,
    pub certified_entropy: Option<f64>,
    pub theoretical_chain: f64,
    pub lambda_over_r: f64,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct JumpTable {
    pub rows: Vec<JumpRow>,
    pub lambda: f64,
    pub r: f64,
    pub warnings: Vec<String>,
}

/// Runs the perturbation family over a horizon list: per-l parameters,
/// distances, certificates and the theoretical chain. Per-row failures are
/// recorded and the run continues.
pub fn jump_experiment(
    map: &PiecewiseMonotoneMap,
    tangency: &TangencyData,
    r: f64,
    l_list: &[u32],
    delta: f64,
    amp_const: f64,
) -> Result<JumpTable> {
    if l_list.is_empty() {
        return Err(Error::InvalidParameter("empty horizon list".into()));
    }
    let mult = tangency.multiplier.to_f64().abs();
    let lambda = mult.ln();
    let mut warnings = Vec::new();
    let mut rows = Vec::new();
    for &l in l_list {
        let params = PerturbationParams {
            delta,
            l,
            amp_const,
            r,
        };
        if params.horizon_warning() {
            warnings.push(format!("l = {l} is small against |log delta|"));
        }
        let chain = theoretical_chain(delta, mult, r, amp_const, l);
        let mut row = JumpRow {
            l,
            delta,
            amplitude: params.amplitude(mult),
            n_oscillations: params.n_oscillations(mult),
            cr_distance: None,
            certified_entropy: None,
            theoretical_chain: chain,
            lambda_over_r: lambda / r,
            error: None,
        };
        if mult.powi(l as i32) > 1e14 {
            let max_l = (14.0 * std::f64::consts::LN_10 / mult.ln()).floor() as u32;
            row.error = Some(Error::Horizon(mult.powi(l as i32), max_l).to_string());
            rows.push(row);
            continue;
        }
        let attempt = (|| -> Result<(f64, f64)> {
            let g = construct_perturbation(map, tangency, &params)?;
            let d = cr_distance(map, &g, r, 20_000)?;
            let c = tangency.critical.to_f64();
            let window = Interval::new(Scalar::Float(c - delta), Scalar::Float(c + delta));
            let cert = certify_horseshoe(&g, l, &window, None)?;
            Ok((d, cert.entropy_bound))
        })();
        match attempt {
            Ok((d, h)) => {
                row.cr_distance = Some(d);
                row.certified_entropy = Some(h);
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        rows.push(row);
    }
    Ok(JumpTable {
        rows,
        lambda,
        r,
        warnings,
    })
}

/// Seeded C^2-bounded bump perturbations of a piecewise-affine map: one
/// polynomial bump of shape (1-t^2)^3 added inside a randomly chosen piece,
/// scaled so the sampled C^2 distance stays below `max_cr`.
pub fn random_c2_perturbations(
    map: &PiecewiseMonotoneMap,
    count: usize,
    seed: u64,
    max_cr: f64,
) -> Result<Vec<PiecewiseMonotoneMap>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let bump_shape = Poly::from_f64(&[1.0, 0.0, -3.0, 0.0, 3.0, 0.0, -1.0]); // (1-t^2)^3
    let mut guard = 0usize;
    while out.len() < count {
        guard += 1;
        if guard > count * 50 {
            return Err(Error::InvalidParameter(
                "could not generate enough admissible perturbations".into(),
            ));
        }
        let piece_idx = rng.gen_range(0..map.pieces().len());
        let piece = &map.pieces()[piece_idx];
        let (plo, phi) = piece.iv.to_f64_pair();
        let span = phi - plo;
        if span < 0.2 {
            continue;
        }
        let w = rng.gen_range(0.05..0.35) * span / 2.0;
        let x0 = rng.gen_range(plo + 1.2 * w..phi - 1.2 * w);
        // max |d^2/dt^2 (1-t^2)^3| = 6, so s = cr * w^2 / 6 meets the target
        let target = rng.gen_range(0.2..0.9) * max_cr;
        let s = target * w * w / 6.0 * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let base_poly = match &piece.f {
            BranchFn::Poly(p) => p.clone(),
            _ => continue,
        };
        // bump(x) = s * shape((x - x0)/w) supported on [x0-w, x0+w]
        let local = bump_shape.compose_affine(&Scalar::Float(1.0 / w), &Scalar::Float(-x0 / w));
        let mut bumped = base_poly.clone();
        let scaled: Vec<Scalar> = local
            .coeffs
            .iter()
            .map(|c| Scalar::Float(c.to_f64() * s))
            .collect();
        let max_len = bumped.coeffs.len().max(scaled.len());
        let mut coeffs = vec![Scalar::zero(); max_len];
        for (k, c) in bumped.coeffs.iter().enumerate() {
            coeffs[k] = coeffs[k].clone() + c.clone();
        }
        for (k, c) in scaled.iter().enumerate() {
            coeffs[k] = coeffs[k].clone() + c.clone();
        }
        bumped = Poly::new(coeffs);
        // rebuild the map with the piece split at the bump support
        let mut pieces: Vec<(Interval, BranchFn)> = Vec::new();
        for (i, p) in map.pieces().iter().enumerate() {
            if i != piece_idx {
                pieces.push((p.iv.clone(), p.f.clone()));
                continue;
            }
            let a = Scalar::Float(x0 - w);
            let b = Scalar::Float(x0 + w);
            pieces.push((Interval::new(p.iv.lo.clone(), a.clone()), p.f.clone()));
            pieces.push((Interval::new(a, b.clone()), BranchFn::Poly(bumped.clone())));
            pieces.push((Interval::new(b, p.iv.hi.clone()), p.f.clone()));
        }
        let candidate = PiecewiseMonotoneMap::from_pieces(
            pieces,
            map.smoothness_order(),
            format!("{}+bump{}", map.name(), out.len()),
        );
        let g = match candidate {
            Ok(g) => g,
            Err(_) => continue,
        };
        if cr_distance(map, &g, 2.0, 4000)? <= max_cr {
            out.push(g);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{identity, tent};

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::ratio(p, d)
    }

    #[test]
    fn tangency_found_on_family_and_absent_elsewhere() {
        let f = tangency_family(3).unwrap();
        let t = find_tangency(&f, &TangencySearch::default())
            .unwrap()
            .expect("family carries a tangency");
        assert_eq!(t.critical, q(7, 10));
        assert!(t.periodic_point.approx_eq(&q(1, 5), 1e-13));
        assert_eq!(t.connect_k, 1);
        assert_eq!(t.period, 1);
        assert!((t.multiplier.to_f64() - 4.0).abs() < 1e-13);
        assert!(t.flat_order >= 3);

        let t2 = tent(Scalar::from_int(2)).unwrap();
        assert!(find_tangency(&t2, &TangencySearch::default())
            .unwrap()
            .is_none());
        assert!(find_tangency(&identity(), &TangencySearch::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn amplitude_and_oscillation_formulas() {
        let params = PerturbationParams {
            delta: 0.01,
            l: 15,
            amp_const: 1.0,
            r: 3.0,
        };
        let a = params.amplitude(4.0);
        assert!((a - 9.3132e-12).abs() / a < 1e-4, "a = {a:e}");
        assert_eq!(params.n_oscillations(4.0), 19);
    }

    #[test]
    fn construct_rejects_bad_params() {
        let f = tangency_family(3).unwrap();
        let t = find_tangency(&f, &TangencySearch::default())
            .unwrap()
            .unwrap();
        let bad = PerturbationParams {
            delta: 0.1,
            l: 0,
            amp_const: 1.0,
            r: 3.0,
        };
        assert!(construct_perturbation(&f, &t, &bad).is_err());
        // tiny l makes N < 2
        let small = PerturbationParams {
            delta: 0.1,
            l: 2,
            amp_const: 1.0,
            r: 3.0,
        };
        assert!(construct_perturbation(&f, &t, &small).is_err());
        // window swallowing another critical point
        let wide = PerturbationParams {
            delta: 0.35,
            l: 15,
            amp_const: 1.0,
            r: 3.0,
        };
        assert!(matches!(
            construct_perturbation(&f, &t, &wide),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn perturbation_equals_base_outside_window() {
        let f = tangency_family(3).unwrap();
        let t = find_tangency(&f, &TangencySearch::default())
            .unwrap()
            .unwrap();
        let params = PerturbationParams {
            delta: 0.1,
            l: 15,
            amp_const: 25.6,
            r: 3.0,
        };
        let g = construct_perturbation(&f, &t, &params).unwrap();
        for x in [0.05, 0.3, 0.55, 0.59, 0.81, 0.95] {
            assert!(
                (f.eval_f64(x).unwrap() - g.eval_f64(x).unwrap()).abs() < 1e-14,
                "differs at {x}"
            );
        }
        // inside the window the sine band sits at the critical value
        let mid = g.eval_f64(0.7).unwrap();
        assert!((mid - 0.2).abs() <= 1.1 * params.amplitude(4.0) + 1e-12);
    }

    #[test]
    fn cr_distance_basics() {
        let f = tangency_family(3).unwrap();
        assert_eq!(cr_distance(&f, &f, 3.0, 1000).unwrap(), 0.0);
        let t2 = tent(Scalar::from_int(2)).unwrap();
        let t18 = tent(q(9, 5)).unwrap();
        assert!(cr_distance(&t2, &t18, 1.0, 1000).unwrap() > 0.05);
    }

    #[test]
    fn tent_full_shift_certificate() {
        let t2 = tent(Scalar::from_int(2)).unwrap();
        let window = Interval::unit();
        let cert = certify_horseshoe(&t2, 1, &window, Some(&[0, 1])).unwrap();
        assert_eq!(cert.branch_count(), 2);
        assert!(cert.covering.iter().flatten().all(|&b| b));
        assert!((cert.entropy_bound - std::f64::consts::LN_2).abs() < 1e-12);
        assert!(verify_certificate(&t2, &cert, 4).unwrap());
    }

    #[test]
    fn identity_certificate_is_empty() {
        let id = identity();
        let cert = certify_horseshoe(&id, 3, &Interval::unit(), None).unwrap();
        assert!(cert.is_empty());
        assert_eq!(cert.entropy_bound, 0.0);
    }

    #[test]
    fn family_certificate_at_l15() {
        let f = tangency_family(3).unwrap();
        let t = find_tangency(&f, &TangencySearch::default())
            .unwrap()
            .unwrap();
        let params = PerturbationParams {
            delta: 0.1,
            l: 15,
            amp_const: 25.6,
            r: 3.0,
        };
        let g = construct_perturbation(&f, &t, &params).unwrap();
        let window = Interval::new(q(3, 5), q(4, 5));
        let cert = certify_horseshoe(&g, 15, &window, None).unwrap();
        assert!(
            cert.entropy_bound >= 0.15,
            "bound {} with {} branches",
            cert.entropy_bound,
            cert.branch_count()
        );
        assert!(verify_certificate(&g, &cert, 2).unwrap());
    }

    #[test]
    fn chain_value_monotone_and_reaches_target() {
        let mut prev = f64::NEG_INFINITY;
        for l in 1..=300 {
            let v = theoretical_chain(0.01, 4.0, 3.0, 1.0, l);
            assert!(v >= prev, "chain not monotone at l={l}");
            prev = v;
        }
        let target = 4.0_f64.ln() / 3.0;
        assert!(theoretical_chain(0.01, 4.0, 3.0, 1.0, 300) > 0.9 * target);
    }

    #[test]
    fn jump_rows_record_errors_and_values() {
        let f = tangency_family(3).unwrap();
        let t = find_tangency(&f, &TangencySearch::default())
            .unwrap()
            .unwrap();
        let table = jump_experiment(&f, &t, 3.0, &[2, 12, 15, 40], 0.1, 25.6).unwrap();
        assert_eq!(table.rows.len(), 4);
        // l=2: N < 2, recorded as an error
        assert!(table.rows[0].error.is_some());
        // l=40: precision horizon
        assert!(table.rows[3].error.is_some());
        assert!(table.rows[2].certified_entropy.unwrap() >= 0.15);
        // theoretical chain column is monotone regardless of row errors
        let chains: Vec<f64> = table.rows.iter().map(|r| r.theoretical_chain).collect();
        for w in chains.windows(2) {
            assert!(w[1] >= w[0]);
        }
        assert!(jump_experiment(&f, &t, 3.0, &[], 0.1, 1.0).is_err());
    }

    #[test]
    fn random_perturbations_stay_close_and_monotone() {
        let t2 = tent(Scalar::from_int(2)).unwrap();
        let maps = random_c2_perturbations(&t2, 5, 7, 0.01).unwrap();
        assert_eq!(maps.len(), 5);
        for g in &maps {
            let d = cr_distance(&t2, g, 2.0, 4000).unwrap();
            assert!(d <= 0.01, "distance {d}");
        }
    }
}
