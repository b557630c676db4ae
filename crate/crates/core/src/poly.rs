//! Polynomials with `Scalar` coefficients (ascending degree). Root isolation
//! works by recursion on the derivative: between consecutive extrema a
//! polynomial is monotone, so sign-change bisection finds every real root.

use crate::scalar::{Interval, Scalar, EPS_ROOT};

#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(coeffs: Vec<Scalar>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: Scalar) -> Self {
        Poly::new(vec![c])
    }

    pub fn from_f64(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Scalar::Float(c)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(Scalar::zero());
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_exact())
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    /// Compensated Horner evaluation: error-free transformations keep the
    /// result within ~1 ulp even for the stiff glue polynomials whose
    /// monomial coefficients cancel catastrophically under plain Horner.
    pub fn eval_f64(&self, x: f64) -> f64 {
        #[inline]
        fn two_sum(a: f64, b: f64) -> (f64, f64) {
            let s = a + b;
            let bb = s - a;
            (s, (a - (s - bb)) + (b - bb))
        }
        #[inline]
        fn two_prod(a: f64, b: f64) -> (f64, f64) {
            let p = a * b;
            (p, a.mul_add(b, -p))
        }
        let mut iter = self.coeffs.iter().rev();
        let mut s = iter.next().map(|c| c.to_f64()).unwrap_or(0.0);
        let mut comp = 0.0;
        for c in iter {
            let (p, pi) = two_prod(s, x);
            let (s2, sigma) = two_sum(p, c.to_f64());
            comp = comp * x + (pi + sigma);
            s = s2;
        }
        s + comp
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::constant(Scalar::zero());
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| Scalar::from_int(k as i64) * c.clone())
            .collect();
        Poly::new(coeffs)
    }

    pub fn nth_derivative(&self, order: u32) -> Poly {
        let mut p = self.clone();
        for _ in 0..order {
            p = p.derivative();
        }
        p
    }

    /// Composition with an affine change of variable: p(a·x + b).
    pub fn compose_affine(&self, a: &Scalar, b: &Scalar) -> Poly {
        let mut acc = Poly::constant(Scalar::zero());
        for c in self.coeffs.iter().rev() {
            // acc = acc * (a x + b) + c
            let mut next = vec![Scalar::zero(); acc.coeffs.len() + 1];
            for (k, ac) in acc.coeffs.iter().enumerate() {
                next[k + 1] = next[k + 1].clone() + a.clone() * ac.clone();
                next[k] = next[k].clone() + b.clone() * ac.clone();
            }
            next[0] = next[0].clone() + c.clone();
            acc = Poly::new(next);
        }
        acc
    }

    /// All real roots in the closed interval, found by bisection between the
    /// extrema of the polynomial (computed recursively). Tangential zeros are
    /// detected at extrema where |p| falls below `flat_tol`.
    pub fn real_roots(&self, lo: f64, hi: f64) -> Vec<f64> {
        if self.degree() == 0 {
            return Vec::new();
        }
        if self.degree() == 1 {
            let a = self.coeffs[1].to_f64();
            let b = self.coeffs[0].to_f64();
            if a == 0.0 {
                return Vec::new();
            }
            let r = -b / a;
            return if r >= lo - EPS_ROOT && r <= hi + EPS_ROOT {
                vec![r.clamp(lo, hi)]
            } else {
                Vec::new()
            };
        }
        let mut nodes = vec![lo];
        for r in self.derivative().real_roots(lo, hi) {
            if r > lo + EPS_ROOT && r < hi - EPS_ROOT {
                nodes.push(r);
            }
        }
        nodes.push(hi);
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let scale = self
            .coeffs
            .iter()
            .map(|c| c.to_f64().abs())
            .fold(0.0_f64, f64::max)
            .max(1e-300);
        let flat_tol = scale * 1e-13;

        let mut roots: Vec<f64> = Vec::new();
        let push = |r: f64, roots: &mut Vec<f64>| {
            if roots.last().map_or(true, |&p| (r - p).abs() > 10.0 * EPS_ROOT) {
                roots.push(r);
            }
        };
        for w in nodes.windows(2) {
            let (a, b) = (w[0], w[1]);
            let fa = self.eval_f64(a);
            let fb = self.eval_f64(b);
            if fa.abs() <= flat_tol {
                push(a, &mut roots);
            }
            if fa * fb < 0.0 {
                push(bisect(|x| self.eval_f64(x), a, b), &mut roots);
            }
        }
        if self.eval_f64(hi).abs() <= flat_tol {
            push(hi, &mut roots);
        }
        roots
    }
}

impl Poly {
    /// Real roots in [lo, hi] for exact-coefficient polynomials, with exact
    /// sign evaluation: odd-multiplicity roots are isolated by rational
    /// bisection between the (recursively computed) extrema; a node where
    /// the polynomial vanishes exactly is a root regardless of multiplicity.
    /// Even-multiplicity irrational roots are outside this contract.
    pub fn real_roots_exact(&self, lo: &Scalar, hi: &Scalar) -> Vec<Scalar> {
        debug_assert!(self.is_exact());
        if self.degree() == 0 {
            return Vec::new();
        }
        if self.degree() == 1 {
            if self.coeffs[1].is_zero() {
                return Vec::new();
            }
            let r = -(self.coeffs[0].clone() / self.coeffs[1].clone());
            return if r >= *lo && r <= *hi { vec![r] } else { vec![] };
        }
        let mut nodes = vec![lo.clone()];
        for r in self.derivative().real_roots_exact(lo, hi) {
            if r > *lo && r < *hi {
                nodes.push(r);
            }
        }
        nodes.push(hi.clone());
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let width_floor = (hi.clone() - lo.clone()) * Scalar::ratio(1, 1i64 << 50);
        let mut roots: Vec<Scalar> = Vec::new();
        let push = |r: Scalar, roots: &mut Vec<Scalar>| {
            if roots.last().map_or(true, |p: &Scalar| {
                (r.clone() - p.clone()).abs() > width_floor.clone()
            }) {
                roots.push(r);
            }
        };
        for w in nodes.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let sa = self.eval(a).signum();
            let sb = self.eval(b).signum();
            if sa == 0 {
                push(a.clone(), &mut roots);
            }
            if sa != 0 && sb != 0 && sa != sb {
                // exact bisection on a sign change
                let mut x0 = a.clone();
                let mut x1 = b.clone();
                let s0 = sa;
                for _ in 0..60 {
                    if x1.clone() - x0.clone() <= width_floor {
                        break;
                    }
                    let m = x0.midpoint(&x1);
                    let sm = self.eval(&m).signum();
                    if sm == 0 {
                        x0 = m.clone();
                        x1 = m;
                        break;
                    }
                    if sm == s0 {
                        x0 = m;
                    } else {
                        x1 = m;
                    }
                }
                push(x0.midpoint(&x1), &mut roots);
            }
        }
        let s_hi = self.eval(hi).signum();
        if s_hi == 0 {
            push(hi.clone(), &mut roots);
        }
        roots
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        if b - a <= EPS_ROOT {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

/// Sign-change bisection for arbitrary continuous functions, scanning on a
/// grid first. Returns roots in ascending order.
pub fn scan_roots(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let n = samples.max(2);
    let mut roots = Vec::new();
    let mut prev_x = lo;
    let mut prev_f = f(lo);
    for k in 1..=n {
        let x = lo + (hi - lo) * (k as f64) / (n as f64);
        let fx = f(x);
        if prev_f == 0.0 {
            roots.push(prev_x);
        } else if prev_f * fx < 0.0 {
            roots.push(bisect(&f, prev_x, x));
        }
        prev_x = x;
        prev_f = fx;
    }
    if prev_f == 0.0 {
        roots.push(prev_x);
    }
    roots.dedup_by(|a, b| (*a - *b).abs() <= 10.0 * EPS_ROOT);
    roots
}

/// Solves the two-point Hermite interpolation problem matching derivatives
/// 0..=order at both endpoints (degree 2·order+1), exactly when the data is
/// exact. Panics if the data is degenerate (never the case for x0 != x1).
pub fn hermite(x0: &Scalar, x1: &Scalar, left: &[Scalar], right: &[Scalar]) -> Poly {
    assert_eq!(left.len(), right.len());
    let order = left.len();
    let n = 2 * order;
    // Row for derivative j at x: d^j/dx^j sum c_k x^k = sum k!/(k-j)! c_k x^(k-j)
    let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(n);
    let mut rhs: Vec<Scalar> = Vec::with_capacity(n);
    for (x, data) in [(x0, left), (x1, right)] {
        for (j, val) in data.iter().enumerate() {
            let mut row = vec![Scalar::zero(); n];
            for (k, slot) in row.iter_mut().enumerate() {
                if k >= j {
                    let mut fact = Scalar::one();
                    for i in 0..j {
                        fact = fact * Scalar::from_int((k - i) as i64);
                    }
                    let mut pow = Scalar::one();
                    for _ in 0..(k - j) {
                        pow = pow * x.clone();
                    }
                    *slot = fact * pow;
                }
            }
            rows.push(row);
            rhs.push(val.clone());
        }
    }
    let sol = solve_linear(rows, rhs).expect("hermite system is nonsingular");
    Poly::new(sol)
}

/// Gaussian elimination with partial pivoting over `Scalar`.
pub fn solve_linear(mut a: Vec<Vec<Scalar>>, mut b: Vec<Scalar>) -> Option<Vec<Scalar>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].is_zero() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            if a[row][col].is_zero() {
                continue;
            }
            let factor = a[row][col].clone() / a[col][col].clone();
            for k in col..n {
                a[row][k] = a[row][k].clone() - factor.clone() * a[col][k].clone();
            }
            b[row] = b[row].clone() - factor * b[col].clone();
        }
    }
    let mut x = vec![Scalar::zero(); n];
    for col in (0..n).rev() {
        let mut acc = b[col].clone();
        for k in (col + 1)..n {
            acc = acc - a[col][k].clone() * x[k].clone();
        }
        x[col] = acc / a[col][col].clone();
    }
    Some(x)
}

/// Upper bound for |p| on a closed interval via extrema + endpoints.
pub fn sup_abs_on(p: &Poly, iv: &Interval) -> f64 {
    let (lo, hi) = iv.to_f64_pair();
    let mut best = p.eval_f64(lo).abs().max(p.eval_f64(hi).abs());
    for r in p.derivative().real_roots(lo, hi) {
        best = best.max(p.eval_f64(r).abs());
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, q_: i64) -> Scalar {
        Scalar::ratio(p, q_)
    }

    #[test]
    fn eval_and_derivative() {
        // 4x(1-x) = 4x - 4x^2
        let p = Poly::new(vec![q(0, 1), q(4, 1), q(-4, 1)]);
        assert_eq!(p.eval(&q(1, 2)), Scalar::from_int(1));
        let dp = p.derivative();
        assert_eq!(dp.eval(&q(1, 2)), Scalar::zero());
        assert_eq!(dp.eval(&q(1, 4)), Scalar::from_int(2));
        assert_eq!(p.nth_derivative(2).eval(&q(1, 4)), Scalar::from_int(-8));
    }

    #[test]
    fn roots_of_quadratic_and_tangential() {
        let p = Poly::new(vec![q(4, 1), q(-8, 1)]); // 4 - 8x
        let r = p.real_roots(0.0, 1.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.5).abs() < 1e-12);

        // (x - 1/2)^2 touches zero without sign change
        let t = Poly::new(vec![q(1, 4), q(-1, 1), q(1, 1)]);
        let r = t.real_roots(0.0, 1.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn cubic_triple_root() {
        // (x - 1/2)^3: odd multiplicity, sign change
        let p = Poly::new(vec![q(-1, 8), q(3, 4), q(-3, 2), q(1, 1)]);
        let r = p.real_roots(0.0, 1.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.5).abs() < 1e-4);
    }

    #[test]
    fn hermite_matches_endpoint_data() {
        let p = hermite(
            &q(0, 1),
            &q(1, 1),
            &[q(0, 1), q(0, 1)],
            &[q(1, 1), q(0, 1)],
        );
        // cubic smoothstep 3x^2 - 2x^3
        assert_eq!(p.eval(&q(1, 2)), q(1, 2));
        assert_eq!(p.derivative().eval(&q(0, 1)), Scalar::zero());
        assert_eq!(p.derivative().eval(&q(1, 1)), Scalar::zero());
        assert_eq!(p.eval(&q(1, 1)), Scalar::one());
    }

    #[test]
    fn hermite_c3_order() {
        let left = [q(1, 100), q(0, 1), q(0, 1), q(0, 1)];
        let right = [q(1, 10), q(4, 1), q(0, 1), q(0, 1)];
        let p = hermite(&q(1, 20), &q(7, 40), &left, &right);
        assert_eq!(p.degree(), 7);
        for (j, want) in right.iter().enumerate() {
            assert_eq!(&p.nth_derivative(j as u32).eval(&q(7, 40)), want);
        }
    }

    #[test]
    fn affine_composition() {
        let p = Poly::new(vec![q(0, 1), q(0, 1), q(1, 1)]); // x^2
        let shifted = p.compose_affine(&q(1, 1), &q(-1, 2)); // (x - 1/2)^2
        assert_eq!(shifted.eval(&q(1, 2)), Scalar::zero());
        assert_eq!(shifted.eval(&q(1, 1)), q(1, 4));
    }
}
