//! Piecewise-monotone interval self-maps of [0,1].
//!
//! A map is an ordered list of pieces with pairwise-disjoint interiors
//! covering [0,1]; each piece carries a weakly monotone branch function.
//! Exact-rational data (affine or rational-coefficient polynomial pieces)
//! is evaluated exactly; everything else falls back to f64.

use crate::error::{Error, Result};
use crate::poly::{scan_roots, sup_abs_on, Poly};
use crate::scalar::{Interval, Scalar, EPS_ROOT};

/// Branch function of one monotone piece.
#[derive(Clone, Debug)]
pub enum BranchFn {
    /// Polynomial in ascending-degree coefficients (affine = degree 1).
    Poly(Poly),
    /// amp * sin(freq * x + phase) + offset.
    Sine(SineWave),
    /// base + w(x) * (sine - base): the transition strip of a windowed
    /// sinusoidal perturbation.
    SineBlend(Blend),
}

/// Transition-strip data. The weight polynomial lives in local coordinates
/// t = scale * (x - origin); expanding it into absolute-x monomials would
/// lose every digit to cancellation at these scales.
#[derive(Clone, Debug)]
pub struct Blend {
    pub step: Poly,
    pub origin: f64,
    pub scale: f64,
    pub sine: SineWave,
    pub base: Poly,
}

impl Blend {
    fn weight(&self, x: f64, order: u32) -> f64 {
        let t = self.scale * (x - self.origin);
        self.step.nth_derivative(order).eval_f64(t) * self.scale.powi(order as i32)
    }

    fn eval(&self, x: f64) -> f64 {
        let b = self.base.eval_f64(x);
        b + self.weight(x, 0) * (self.sine.eval(x) - b)
    }

    fn deriv(&self, x: f64, order: u32) -> f64 {
        let mut acc = self.base.nth_derivative(order).eval_f64(x);
        for j in 0..=order {
            let w_j = self.weight(x, j);
            let k = order - j;
            let diff_k = self.sine.deriv(x, k) - self.base.nth_derivative(k).eval_f64(x);
            acc += binom(order, j) * w_j * diff_k;
        }
        acc
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SineWave {
    pub amp: f64,
    pub freq: f64,
    pub phase: f64,
    pub offset: f64,
}

impl SineWave {
    pub fn eval(&self, x: f64) -> f64 {
        self.amp * (self.freq * x + self.phase).sin() + self.offset
    }

    /// k-th derivative: amp * freq^k * sin(freq x + phase + k*pi/2); the
    /// offset survives only at order 0.
    pub fn deriv(&self, x: f64, order: u32) -> f64 {
        if order == 0 {
            return self.eval(x);
        }
        let shift = (order as f64) * std::f64::consts::FRAC_PI_2;
        self.amp * self.freq.powi(order as i32) * (self.freq * x + self.phase + shift).sin()
    }
}

fn binom(n: u32, k: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * ((n - i) as f64) / ((i + 1) as f64);
    }
    acc
}

impl BranchFn {
    pub fn affine(slope: Scalar, intercept: Scalar) -> Self {
        BranchFn::Poly(Poly::new(vec![intercept, slope]))
    }

    /// True when evaluation is exact: affine rational data. Nonlinear
    /// polynomials evaluate in f64 even on exact inputs, because iterating
    /// a degree-d exact polynomial raises point denominators to the d-th
    /// power every step.
    pub fn is_exact(&self) -> bool {
        matches!(self, BranchFn::Poly(p) if p.is_exact() && p.degree() <= 1)
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        match self {
            BranchFn::Poly(p) => {
                if p.is_exact() && p.degree() <= 1 && x.is_exact() {
                    p.eval(x)
                } else {
                    Scalar::Float(p.eval_f64(x.to_f64()))
                }
            }
            BranchFn::Sine(s) => Scalar::Float(s.eval(x.to_f64())),
            BranchFn::SineBlend(b) => Scalar::Float(b.eval(x.to_f64())),
        }
    }

    pub fn deriv(&self, x: &Scalar, order: u32) -> Scalar {
        match self {
            BranchFn::Poly(p) => {
                let d = p.nth_derivative(order);
                if d.is_exact() && d.degree() <= 1 && x.is_exact() {
                    d.eval(x)
                } else {
                    Scalar::Float(d.eval_f64(x.to_f64()))
                }
            }
            BranchFn::Sine(s) => Scalar::Float(s.deriv(x.to_f64(), order)),
            BranchFn::SineBlend(b) => Scalar::Float(b.deriv(x.to_f64(), order)),
        }
    }

    /// Upper bound of |f'| on a closed subinterval.
    pub fn sup_abs_deriv(&self, iv: &Interval) -> Scalar {
        match self {
            BranchFn::Poly(p) => {
                let d = p.derivative();
                if d.degree() == 0 {
                    return d.coeffs[0].abs();
                }
                if d.degree() == 1 && d.is_exact() && iv.lo.is_exact() && iv.hi.is_exact() {
                    return d.eval(&iv.lo).abs().max(d.eval(&iv.hi).abs());
                }
                Scalar::Float(sup_abs_on(&d, iv) * (1.0 + 1e-12))
            }
            BranchFn::Sine(s) => Scalar::Float(s.amp.abs() * s.freq.abs()),
            BranchFn::SineBlend(_) => {
                let (lo, hi) = iv.to_f64_pair();
                let n = 64;
                let mut best = 0.0_f64;
                for k in 0..=n {
                    let x = lo + (hi - lo) * (k as f64) / (n as f64);
                    best = best.max(self.deriv(&Scalar::Float(x), 1).to_f64().abs());
                }
                Scalar::Float(best * (1.0 + 1e-6) + 1e-15)
            }
        }
    }

    /// Zeros of the derivative inside the closed interval. Exact isolation
    /// for exact polynomial data, float bisection otherwise.
    pub(crate) fn deriv_zeros_scalar(&self, iv: &Interval) -> Vec<Scalar> {
        if let BranchFn::Poly(p) = self {
            if p.is_exact() && iv.lo.is_exact() && iv.hi.is_exact() {
                return p.derivative().real_roots_exact(&iv.lo, &iv.hi);
            }
        }
        self.deriv_zeros(iv).into_iter().map(Scalar::Float).collect()
    }

    /// Zeros of the derivative inside the closed interval (float path).
    pub(crate) fn deriv_zeros(&self, iv: &Interval) -> Vec<f64> {
        let (lo, hi) = iv.to_f64_pair();
        match self {
            BranchFn::Poly(p) => p.derivative().real_roots(lo, hi),
            BranchFn::Sine(s) => {
                // cos(freq x + phase) = 0 at x = (pi/2 + k pi - phase)/freq
                let mut out = Vec::new();
                let pi = std::f64::consts::PI;
                let k0 = ((s.freq * lo + s.phase - pi / 2.0) / pi).floor() as i64 - 1;
                let mut k = k0;
                loop {
                    let x = (pi / 2.0 + (k as f64) * pi - s.phase) / s.freq;
                    if x > hi + EPS_ROOT {
                        break;
                    }
                    if x >= lo - EPS_ROOT {
                        out.push(x.clamp(lo, hi));
                    }
                    k += 1;
                }
                out
            }
            BranchFn::SineBlend(b) => {
                // isolate zeros of g' between the extrema of g' (zeros of
                // g''): near-tangential wiggles defeat plain grid scans
                let halfwaves = (b.sine.freq * (hi - lo) / std::f64::consts::PI).abs() + 1.0;
                let samples = (96.0 * halfwaves).ceil() as usize + 32;
                let d2 = |x: f64| self.deriv(&Scalar::Float(x), 2).to_f64();
                let mut nodes = vec![lo];
                nodes.extend(
                    scan_roots(&d2, lo, hi, samples)
                        .into_iter()
                        .filter(|z| *z > lo && *z < hi),
                );
                nodes.push(hi);
                let d1 = |x: f64| self.deriv(&Scalar::Float(x), 1).to_f64();
                let mut out = Vec::new();
                for w in nodes.windows(2) {
                    for z in scan_roots(&d1, w[0], w[1], 8) {
                        if out.last().map_or(true, |p: &f64| (z - p).abs() > 1e-13) {
                            out.push(z);
                        }
                    }
                }
                out
            }
        }
    }

    /// Preimage of y under the branch restricted to `iv` (strictly monotone
    /// there). Exact for affine exact data, bisection otherwise.
    pub fn invert(&self, y: &Scalar, iv: &Interval) -> Scalar {
        if let BranchFn::Poly(p) = self {
            if p.degree() <= 1 && p.is_exact() && y.is_exact() {
                let slope = p.coeffs.get(1).cloned().unwrap_or_else(Scalar::zero);
                if !slope.is_zero() {
                    return (y.clone() - p.coeffs[0].clone()) / slope;
                }
            }
        }
        let (mut a, mut b) = iv.to_f64_pair();
        let yf = y.to_f64();
        let fa = self.eval(&Scalar::Float(a)).to_f64();
        let fb = self.eval(&Scalar::Float(b)).to_f64();
        let increasing = fb >= fa;
        for _ in 0..200 {
            if b - a <= EPS_ROOT {
                break;
            }
            let m = 0.5 * (a + b);
            let fm = self.eval(&Scalar::Float(m)).to_f64();
            if (fm < yf) == increasing {
                a = m;
            } else {
                b = m;
            }
        }
        Scalar::Float(0.5 * (a + b))
    }
}

/// One monotone piece: a subinterval and its branch function.
#[derive(Clone, Debug)]
pub struct Piece {
    pub iv: Interval,
    pub f: BranchFn,
    /// Weak monotone direction: +1, -1, or 0 for a constant piece.
    pub direction: i8,
}

/// Finite sequence of orbit points with running |(f^n)'| products.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub points: Vec<Scalar>,
    pub derivative_products: Vec<Scalar>,
}

/// Disjoint critical monotone branches covering {f' != 0}.
#[derive(Clone, Debug)]
pub struct NaturalPartition {
    pub branches: Vec<Interval>,
}

impl NaturalPartition {
    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// Index of the branch whose interior contains x, if any.
    pub fn locate(&self, x: &Scalar) -> Option<usize> {
        self.branches.iter().position(|b| b.contains(x))
    }
}

/// Zeros of f': isolated points plus plateau intervals.
#[derive(Clone, Debug, Default)]
pub struct CriticalSet {
    pub points: Vec<Scalar>,
    pub plateaus: Vec<Interval>,
}

impl CriticalSet {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.plateaus.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct PiecewiseMonotoneMap {
    pieces: Vec<Piece>,
    smoothness: f64,
    name: String,
    // f64 cache of piece upper endpoints for fast location
    hi_cache: Vec<f64>,
}

impl PiecewiseMonotoneMap {
    /// Builds and validates a map from pieces covering [0,1].
    pub fn from_pieces(
        pieces: Vec<(Interval, BranchFn)>,
        smoothness: f64,
        name: impl Into<String>,
    ) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidParameter("map needs at least one piece".into()));
        }
        if !(smoothness >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "smoothness order {smoothness} must be >= 1"
            )));
        }
        // validation evaluates exact polynomial data exactly (one-shot, so
        // arbitrary degree is fine); dynamics later run in f64 for
        // nonlinear pieces
        let precise = |f: &BranchFn, x: &Scalar| -> Scalar {
            if let BranchFn::Poly(p) = f {
                if p.is_exact() && x.is_exact() {
                    return p.eval(x);
                }
            }
            f.eval(x)
        };
        let mut built = Vec::with_capacity(pieces.len());
        let mut cursor = Scalar::from_int(0);
        for (iv, f) in pieces {
            if !iv.lo.approx_eq(&cursor, 1e-14) {
                return Err(Error::InvalidParameter(format!(
                    "pieces must tile [0,1]; gap or overlap at {}",
                    iv.lo
                )));
            }
            if iv.is_empty() {
                return Err(Error::InvalidParameter("empty piece interval".into()));
            }
            cursor = iv.hi.clone();
            let vlo = precise(&f, &iv.lo);
            let vhi = precise(&f, &iv.hi);
            let direction = match vhi.partial_cmp(&vlo) {
                Some(std::cmp::Ordering::Greater) => 1,
                Some(std::cmp::Ordering::Less) => -1,
                _ => 0,
            };
            for v in [&vlo, &vhi] {
                let x = v.to_f64();
                if !(-1e-9..=1.0 + 1e-9).contains(&x) {
                    return Err(Error::InvalidParameter(format!(
                        "piece value {x} escapes [0,1]"
                    )));
                }
            }
            built.push(Piece { iv, f, direction });
        }
        if !cursor.approx_eq(&Scalar::from_int(1), 1e-14) {
            return Err(Error::InvalidParameter("pieces must end at 1".into()));
        }
        // continuity at junctions
        for w in built.windows(2) {
            let left = precise(&w[0].f, &w[0].iv.hi);
            let right = precise(&w[1].f, &w[1].iv.lo);
            if !left.approx_eq(&right, 1e-9) {
                return Err(Error::InvalidParameter(format!(
                    "discontinuity at {}: {} vs {}",
                    w[0].iv.hi, left, right
                )));
            }
        }
        // weak monotonicity: the derivative may touch zero but not change sign
        for p in &built {
            if p.direction == 0 {
                continue;
            }
            let exact_poly = match &p.f {
                BranchFn::Poly(poly)
                    if poly.is_exact() && p.iv.lo.is_exact() && p.iv.hi.is_exact() =>
                {
                    Some(poly.derivative())
                }
                _ => None,
            };
            if let Some(dpoly) = exact_poly {
                // exact sign checks: monomial coefficients of stiff glue
                // pieces cancel catastrophically in f64 near flat ends
                let width = p.iv.hi.clone() - p.iv.lo.clone();
                let mut samples: Vec<Scalar> = (1..64)
                    .map(|k| {
                        p.iv.lo.clone() + width.clone() * Scalar::ratio(k, 64)
                    })
                    .collect();
                for z in p.f.deriv_zeros(&p.iv) {
                    if let Some(r) = crate::scalar::rat_from_f64(z) {
                        for off in [-1i64, 1] {
                            let s = Scalar::Exact(r.clone())
                                + width.clone() * Scalar::ratio(off, 1024);
                            if s > p.iv.lo && s < p.iv.hi {
                                samples.push(s);
                            }
                        }
                    }
                }
                for s in samples {
                    let sign = dpoly.eval(&s).signum();
                    if sign != 0 && sign != p.direction as i32 {
                        return Err(Error::RepresentationInconsistency(s.to_f64()));
                    }
                }
                continue;
            }
            let zeros = p.f.deriv_zeros(&p.iv);
            let (lo, hi) = p.iv.to_f64_pair();
            let mut nodes = vec![lo];
            nodes.extend(zeros.iter().copied().filter(|z| *z > lo && *z < hi));
            nodes.push(hi);
            for w in nodes.windows(2) {
                let m = 0.5 * (w[0] + w[1]);
                let d = p.f.deriv(&Scalar::Float(m), 1).to_f64();
                if d != 0.0 && (d > 0.0) != (p.direction > 0) && d.abs() > 1e-12 {
                    return Err(Error::RepresentationInconsistency(m));
                }
            }
        }
        let hi_cache = built.iter().map(|p| p.iv.hi.to_f64()).collect();
        Ok(PiecewiseMonotoneMap {
            pieces: built,
            smoothness,
            name: name.into(),
            hi_cache,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn smoothness_order(&self) -> f64 {
        self.smoothness
    }

    pub fn smoothness_floor(&self) -> u32 {
        if self.smoothness.is_infinite() {
            32
        } else {
            self.smoothness.floor() as u32
        }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_exact(&self) -> bool {
        self.pieces
            .iter()
            .all(|p| p.f.is_exact() && p.iv.lo.is_exact() && p.iv.hi.is_exact())
    }

    /// Index of the piece evaluated at x; at shared breakpoints the
    /// right-hand piece wins (right-derivative convention).
    pub fn piece_index(&self, x: &Scalar) -> Result<usize> {
        let xf = x.to_f64();
        if !(0.0..=1.0).contains(&xf) {
            return Err(Error::Domain(xf));
        }
        let mut idx = self.hi_cache.partition_point(|&h| h <= xf);
        if idx >= self.pieces.len() {
            idx = self.pieces.len() - 1;
        }
        // f64 cache may misplace by one near exact junctions
        while idx > 0 && *x < self.pieces[idx].iv.lo {
            idx -= 1;
        }
        while idx + 1 < self.pieces.len() && *x >= self.pieces[idx + 1].iv.lo {
            idx += 1;
        }
        Ok(idx)
    }

    pub fn eval(&self, x: &Scalar) -> Result<Scalar> {
        let idx = self.piece_index(x)?;
        Ok(self.pieces[idx].f.eval(x))
    }

    pub fn eval_f64(&self, x: f64) -> Result<f64> {
        Ok(self.eval(&Scalar::Float(x))?.to_f64())
    }

    /// Derivative of the containing branch (right-hand at breakpoints).
    pub fn deriv(&self, x: &Scalar, order: u32) -> Result<Scalar> {
        if order == 0 {
            return self.eval(x);
        }
        if order > self.smoothness_floor() {
            return Err(Error::UnsupportedOrder {
                order,
                max: self.smoothness_floor(),
            });
        }
        let idx = self.piece_index(x)?;
        Ok(self.pieces[idx].f.deriv(x, order))
    }

    pub fn iterate(&self, x: &Scalar, n: usize) -> Result<Scalar> {
        let mut y = x.clone();
        for _ in 0..n {
            y = self.eval(&y)?;
        }
        Ok(y)
    }

    pub fn orbit(&self, x0: &Scalar, n: usize) -> Result<Orbit> {
        let mut points = vec![x0.clone()];
        let mut derivative_products = vec![Scalar::one()];
        let mut x = x0.clone();
        let mut prod = Scalar::one();
        for _ in 0..n {
            let d = {
                let idx = self.piece_index(&x)?;
                self.pieces[idx].f.deriv(&x, 1)
            };
            prod = prod * d.abs();
            x = self.eval(&x)?;
            points.push(x.clone());
            derivative_products.push(prod.clone());
        }
        Ok(Orbit {
            points,
            derivative_products,
        })
    }

    /// All zeros of f': interior zeros per piece, junctions where the
    /// one-sided derivatives do not share a strict sign, and constant
    /// pieces as plateau intervals.
    pub fn critical_set(&self) -> Result<CriticalSet> {
        let mut points: Vec<Scalar> = Vec::new();
        let mut plateaus: Vec<Interval> = Vec::new();
        for p in &self.pieces {
            if p.direction == 0 {
                plateaus.push(p.iv.clone());
                continue;
            }
            let zeros = p.f.deriv_zeros_scalar(&p.iv);
            if zeros.len() > 10_000 {
                return Err(Error::Resolution(format!(
                    "{} derivative zeros in one piece",
                    zeros.len()
                )));
            }
            for z in zeros {
                let zf = z.to_f64();
                let (lo, hi) = p.iv.to_f64_pair();
                if zf > lo + EPS_ROOT && zf < hi - EPS_ROOT {
                    points.push(z);
                }
            }
        }
        // junction criticality: one-sided derivative signs, exact when the
        // adjacent pieces are exact (float cancellation near flat junctions
        // would otherwise invent critical points)
        for w in self.pieces.windows(2) {
            let x = w[0].iv.hi.clone();
            let dl = w[0].f.deriv(&x, 1);
            let dr = w[1].f.deriv(&x, 1);
            let critical = if dl.is_exact() && dr.is_exact() {
                dl.signum() * dr.signum() <= 0
            } else {
                dl.to_f64() * dr.to_f64() <= 1e-24
            };
            if critical {
                points.push(x);
            }
        }
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        points.dedup_by(|a, b| a.approx_eq(b, EPS_ROOT));
        // drop points swallowed by plateaus
        points.retain(|x| {
            !plateaus
                .iter()
                .any(|pl| *x >= pl.lo && *x <= pl.hi)
        });
        Ok(CriticalSet { points, plateaus })
    }

    /// Connected components of [0,1] minus the critical set: the maximal
    /// natural partition.
    pub fn natural_partition(&self) -> Result<NaturalPartition> {
        let crit = self.critical_set()?;
        let mut cuts: Vec<(Scalar, Scalar)> = Vec::new(); // closed blocks to remove
        for p in &crit.points {
            cuts.push((p.clone(), p.clone()));
        }
        for pl in &crit.plateaus {
            cuts.push((pl.lo.clone(), pl.hi.clone()));
        }
        cuts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut branches = Vec::new();
        let mut lo = Scalar::from_int(0);
        for (a, b) in cuts {
            if a > lo {
                branches.push(Interval::new(lo.clone(), a));
            }
            if b > lo {
                lo = b;
            }
        }
        let one = Scalar::from_int(1);
        if one > lo {
            branches.push(Interval::new(lo, one));
        }
        branches.retain(|b| !b.is_empty());
        Ok(NaturalPartition { branches })
    }

    /// Turning loci: maximal blocks (points or plateaus) across which the
    /// strict monotone direction flips. Lap counting cuts exactly here.
    pub fn turning_loci(&self) -> Result<Vec<Interval>> {
        let crit = self.critical_set()?;
        let mut blocks: Vec<Interval> = crit
            .points
            .iter()
            .map(|p| Interval::new(p.clone(), p.clone()))
            .collect();
        blocks.extend(crit.plateaus.iter().cloned());
        blocks.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
        let dir_at = |x: f64| -> i8 {
            match self.piece_index(&Scalar::Float(x)) {
                Ok(i) => self.pieces[i].direction,
                Err(_) => 0,
            }
        };
        // strict direction just left / right of the block, skipping plateaus
        let mut turning = Vec::new();
        for b in blocks {
            let (lo, hi) = b.to_f64_pair();
            let mut left = 0i8;
            let mut x = lo - 1e-9;
            while x > 0.0 {
                left = dir_at(x);
                if left != 0 {
                    break;
                }
                x -= 0.05;
            }
            let mut right = 0i8;
            let mut y = hi + 1e-9;
            while y < 1.0 {
                right = dir_at(y);
                if right != 0 {
                    break;
                }
                y += 0.05;
            }
            if left != 0 && right != 0 && left != right {
                turning.push(b);
            }
        }
        Ok(turning)
    }

    /// Number of maximal monotone intervals of f^n, by refining lap images
    /// at turning cut points. Work is proportional to sum of lap counts.
    pub fn lap_count(&self, n: usize, budget: usize) -> Result<u64> {
        Ok(self.lap_images(n, budget)?.len() as u64)
    }

    /// Lap counts for every 1..=n_max in a single refinement sweep. On
    /// budget exhaustion the prefix computed so far is returned.
    pub fn lap_counts_upto(&self, n_max: usize, budget: usize) -> Result<Vec<u64>> {
        let cuts: Vec<Scalar> = self
            .turning_loci()?
            .into_iter()
            .map(|b| b.midpoint())
            .collect();
        let mut images = vec![Interval::unit()];
        let mut out = Vec::with_capacity(n_max);
        let mut work: usize = 0;
        for _ in 0..n_max {
            let mut next = Vec::with_capacity(images.len() * 2);
            for img in &images {
                let mut nodes = vec![img.lo.clone()];
                for c in &cuts {
                    if img.contains(c) {
                        nodes.push(c.clone());
                    }
                }
                nodes.push(img.hi.clone());
                for w in nodes.windows(2) {
                    let fa = self.eval(&w[0])?;
                    let fb = self.eval(&w[1])?;
                    let (lo, hi) = if fa <= fb { (fa, fb) } else { (fb, fa) };
                    next.push(Interval::new(lo, hi));
                }
            }
            work += next.len();
            if work > budget {
                return Ok(out);
            }
            out.push(next.len() as u64);
            images = next;
        }
        Ok(out)
    }

    /// Images of the maximal monotone intervals of f^n.
    pub fn lap_images(&self, n: usize, budget: usize) -> Result<Vec<Interval>> {
        if n == 0 {
            return Ok(vec![Interval::unit()]);
        }
        let cuts: Vec<Scalar> = self
            .turning_loci()?
            .into_iter()
            .map(|b| b.midpoint())
            .collect();
        let mut images = vec![Interval::unit()];
        let mut work: usize = 0;
        for _ in 0..n {
            let mut next = Vec::with_capacity(images.len() * 2);
            for img in &images {
                let mut nodes = vec![img.lo.clone()];
                for c in &cuts {
                    if img.contains(c) {
                        nodes.push(c.clone());
                    }
                }
                nodes.push(img.hi.clone());
                for w in nodes.windows(2) {
                    let fa = self.eval(&w[0])?;
                    let fb = self.eval(&w[1])?;
                    let (lo, hi) = if fa <= fb { (fa, fb) } else { (fb, fa) };
                    next.push(Interval::new(lo, hi));
                }
            }
            work += next.len();
            if work > budget {
                return Err(Error::BudgetExceeded(format!(
                    "lap refinement needs more than {budget} intervals"
                )));
            }
            images = next;
        }
        Ok(images)
    }

    /// Upper estimate of ||(f^n)'||_inf: the maximum over monotone laps of
    /// f^n of the product of per-step branch derivative bounds. Exact for
    /// piecewise-affine maps.
    pub fn sup_deriv_norm(&self, n: usize, budget: usize) -> Result<Scalar> {
        if n == 0 {
            return Ok(Scalar::one());
        }
        let cuts: Vec<Scalar> = self
            .turning_loci()?
            .into_iter()
            .map(|b| b.midpoint())
            .collect();
        let oracle = DerivSupOracle::new(self);
        let mut frags = vec![(Interval::unit(), Scalar::one())];
        let mut work: usize = 0;
        for _ in 0..n {
            let mut next = Vec::with_capacity(frags.len() * 2);
            for (img, prod) in &frags {
                let mut nodes = vec![img.lo.clone()];
                for c in &cuts {
                    if img.contains(c) {
                        nodes.push(c.clone());
                    }
                }
                nodes.push(img.hi.clone());
                for w in nodes.windows(2) {
                    let seg = Interval::new(w[0].clone(), w[1].clone());
                    let factor = oracle.sup_abs(self, &seg);
                    let fa = self.eval(&w[0])?;
                    let fb = self.eval(&w[1])?;
                    let (lo, hi) = if fa <= fb { (fa, fb) } else { (fb, fa) };
                    next.push((Interval::new(lo, hi), prod.clone() * factor));
                }
            }
            work += next.len();
            if work > budget {
                return Err(Error::BudgetExceeded(format!(
                    "derivative-norm refinement needs more than {budget} intervals"
                )));
            }
            frags = next;
        }
        let mut best = Scalar::zero();
        for (_, prod) in frags {
            best = best.max(prod);
        }
        Ok(best)
    }

    /// Upper bound of |f'| over an arbitrary subinterval of [0,1]. One-shot;
    /// repeated queries should go through `DerivSupOracle`.
    pub fn sup_abs_deriv_over(&self, seg: &Interval) -> Scalar {
        let mut best = Scalar::zero();
        for p in &self.pieces {
            let overlap = p.iv.intersect(seg);
            if overlap.is_empty() {
                if p.iv.lo <= seg.lo && seg.lo <= p.iv.hi && seg.lo == seg.hi {
                    // degenerate query
                } else {
                    continue;
                }
            }
            let iv = if overlap.is_empty() { seg.clone() } else { overlap };
            best = best.max(p.f.sup_abs_deriv(&iv));
        }
        best
    }

    /// Upper bound of |f^{(order)}| over [0,1] (grid + exact poly extrema).
    pub fn sup_abs_deriv_order(&self, order: u32) -> Result<f64> {
        if order > self.smoothness_floor() {
            return Err(Error::UnsupportedOrder {
                order,
                max: self.smoothness_floor(),
            });
        }
        let mut best = 0.0_f64;
        for p in &self.pieces {
            let (lo, hi) = p.iv.to_f64_pair();
            match &p.f {
                BranchFn::Poly(poly) => {
                    best = best.max(sup_abs_on(&poly.nth_derivative(order), &p.iv));
                }
                _ => {
                    let n = 256;
                    for k in 0..=n {
                        let x = lo + (hi - lo) * (k as f64) / (n as f64);
                        best = best.max(p.f.deriv(&Scalar::Float(x), order).to_f64().abs());
                    }
                }
            }
        }
        Ok(best)
    }
}

/// Precomputed |f'|-extrema per piece for fast repeated segment bounds:
/// affine pieces keep their exact |slope|, nonlinear pieces cache the
/// derivative's stationary points once.
pub struct DerivSupOracle {
    per_piece: Vec<DerivSupPiece>,
}

enum DerivSupPiece {
    Affine(Scalar),
    Sampled(Vec<f64>),
}

impl DerivSupOracle {
    pub fn new(map: &PiecewiseMonotoneMap) -> Self {
        let per_piece = map
            .pieces
            .iter()
            .map(|p| match &p.f {
                BranchFn::Poly(poly) if poly.degree() <= 1 => {
                    DerivSupPiece::Affine(p.f.deriv(&p.iv.lo, 1).abs())
                }
                BranchFn::Poly(poly) => {
                    let (lo, hi) = p.iv.to_f64_pair();
                    let d2 = poly.nth_derivative(2);
                    let mut xs = vec![lo, hi];
                    xs.extend(d2.real_roots(lo, hi));
                    DerivSupPiece::Sampled(xs)
                }
                BranchFn::Sine(s) => {
                    // |derivative| peaks where cos(freq x + phase) = +-1
                    let (lo, hi) = p.iv.to_f64_pair();
                    let pi = std::f64::consts::PI;
                    let mut xs = vec![lo, hi];
                    let mut k = ((s.freq * lo + s.phase) / pi).floor() as i64 - 1;
                    loop {
                        let x = (k as f64 * pi - s.phase) / s.freq;
                        if x > hi {
                            break;
                        }
                        if x >= lo {
                            xs.push(x);
                        }
                        k += 1;
                    }
                    DerivSupPiece::Sampled(xs)
                }
                BranchFn::SineBlend(_) => {
                    let (lo, hi) = p.iv.to_f64_pair();
                    let n = 64;
                    let xs = (0..=n)
                        .map(|k| lo + (hi - lo) * k as f64 / n as f64)
                        .collect();
                    DerivSupPiece::Sampled(xs)
                }
            })
            .collect();
        DerivSupOracle { per_piece }
    }

    pub fn sup_abs(&self, map: &PiecewiseMonotoneMap, seg: &Interval) -> Scalar {
        let mut best = Scalar::zero();
        for (p, cache) in map.pieces.iter().zip(&self.per_piece) {
            let overlap = p.iv.intersect(seg);
            if overlap.is_empty() {
                continue;
            }
            match cache {
                DerivSupPiece::Affine(s) => best = best.max(s.clone()),
                DerivSupPiece::Sampled(xs) => {
                    let (lo, hi) = overlap.to_f64_pair();
                    let mut m = p
                        .f
                        .deriv(&Scalar::Float(lo), 1)
                        .to_f64()
                        .abs()
                        .max(p.f.deriv(&Scalar::Float(hi), 1).to_f64().abs());
                    for &x in xs {
                        if x >= lo && x <= hi {
                            m = m.max(p.f.deriv(&Scalar::Float(x), 1).to_f64().abs());
                        }
                    }
                    best = best.max(Scalar::Float(m * (1.0 + 1e-12)));
                }
            }
        }
        best
    }
}

// ---------------------------------------------------------------------------
// Built-in families
// ---------------------------------------------------------------------------

/// Tent map with slope s: x -> s*x on [0,1/2], s*(1-x) on [1/2,1].
pub fn tent(slope: Scalar) -> Result<PiecewiseMonotoneMap> {
    let s = slope;
    if s.to_f64() <= 0.0 || s.to_f64() > 2.0 {
        return Err(Error::InvalidParameter("tent slope must lie in (0,2]".into()));
    }
    let half = Scalar::ratio(1, 2);
    let one = Scalar::from_int(1);
    let name = format!("tent:{}", s);
    PiecewiseMonotoneMap::from_pieces(
        vec![
            (
                Interval::new(Scalar::from_int(0), half.clone()),
                BranchFn::affine(s.clone(), Scalar::from_int(0)),
            ),
            (
                Interval::new(half, one),
                BranchFn::affine(-s.clone(), s),
            ),
        ],
        f64::INFINITY,
        name,
    )
}

/// Logistic map a*x*(1-x) split at its critical point 1/2.
pub fn logistic(a: Scalar) -> Result<PiecewiseMonotoneMap> {
    if a.to_f64() <= 0.0 || a.to_f64() > 4.0 {
        return Err(Error::InvalidParameter("logistic parameter must lie in (0,4]".into()));
    }
    let poly = Poly::new(vec![Scalar::from_int(0), a.clone(), -a.clone()]);
    let half = Scalar::ratio(1, 2);
    let name = format!("logistic:{}", a);
    PiecewiseMonotoneMap::from_pieces(
        vec![
            (
                Interval::new(Scalar::from_int(0), half.clone()),
                BranchFn::Poly(poly.clone()),
            ),
            (
                Interval::new(half, Scalar::from_int(1)),
                BranchFn::Poly(poly),
            ),
        ],
        f64::INFINITY,
        name,
    )
}

/// The identity map.
pub fn identity() -> PiecewiseMonotoneMap {
    PiecewiseMonotoneMap::from_pieces(
        vec![(
            Interval::unit(),
            BranchFn::affine(Scalar::from_int(1), Scalar::from_int(0)),
        )],
        f64::INFINITY,
        "identity",
    )
    .expect("identity is valid")
}
