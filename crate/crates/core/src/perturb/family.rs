//! A concrete interval map carrying a flat homoclinic connection with an
//! exactly known multiplier.
//!
//! Layout on [0,1], all data rational so the defining relations hold exactly:
//! a plateau at height 1/100, a C^r ramp into the linear zone f(x) = 4x - 3/5
//! (fixed point p = 1/5 with slope exactly 4, image reaching 21/25), a C^r
//! cap peaking at 19/20, a descent into an ultra-flat valley
//! f(x) = 1/5 + (x - 7/10)^m / 10^6 whose bottom c = 7/10 maps onto p in one
//! step, and a C^r tail. The valley power m is the smallest even integer
//! exceeding r, so derivatives 1..r vanish at c while c stays an extremum.

use crate::error::{Error, Result};
use crate::maps::{BranchFn, PiecewiseMonotoneMap};
use crate::poly::{hermite, Poly};
use crate::scalar::{Interval, Scalar};

fn q(p: i64, d: i64) -> Scalar {
    Scalar::ratio(p, d)
}

fn pad(vals: &[Scalar], len: usize) -> Vec<Scalar> {
    let mut v = vals.to_vec();
    v.resize(len, Scalar::zero());
    v
}

fn jet(poly: &Poly, x: &Scalar, order: u32) -> Vec<Scalar> {
    (0..=order).map(|j| poly.nth_derivative(j).eval(x)).collect()
}

/// The flat-connection family at smoothness r (supported: 2..=4).
pub fn tangency_family(r: u32) -> Result<PiecewiseMonotoneMap> {
    if !(2..=4).contains(&r) {
        return Err(Error::InvalidParameter(format!(
            "tangency family supports smoothness 2..=4, got {r}"
        )));
    }
    let jets = r as usize + 1;
    // valley power: smallest even integer > r
    let m = if (r + 1) % 2 == 0 { r + 1 } else { r + 2 };

    // ramp end-slope is twice its mean slope; monotone C^r Hermite data
    // tolerates a ratio up to ~2.25 for r <= 4
    let x1 = q(13, 100);
    let x2 = q(7, 40);
    let x3 = q(9, 25);
    let x4 = q(2, 5);
    let x5 = q(1, 2);
    let c = q(7, 10);
    let x6 = q(9, 10);
    let one = Scalar::one();

    let zone = Poly::new(vec![q(-3, 5), q(4, 1)]); // 4x - 3/5
    // valley: 1/5 + (x - c)^m / 10^6
    let mut t_power = Poly::new(vec![Scalar::one()]);
    for _ in 0..m {
        t_power = Poly::new({
            let mut coeffs = vec![Scalar::zero()];
            coeffs.extend(t_power.coeffs.iter().cloned());
            coeffs
        });
    }
    let shifted = t_power.compose_affine(&Scalar::one(), &(-c.clone()));
    let valley = Poly::new(
        shifted
            .coeffs
            .iter()
            .map(|co| co.clone() / Scalar::from_int(1_000_000))
            .collect::<Vec<_>>(),
    );
    let valley = {
        let mut coeffs = valley.coeffs.clone();
        coeffs[0] = coeffs[0].clone() + q(1, 5);
        Poly::new(coeffs)
    };

    let ramp = hermite(
        &x1,
        &x2,
        &pad(&[q(1, 100)], jets),
        &pad(&[q(1, 10), q(4, 1)], jets),
    );
    let cap_up = hermite(
        &x3,
        &x4,
        &pad(&[q(21, 25), q(4, 1)], jets),
        &pad(&[q(19, 20), q(0, 1), q(-20, 1)], jets),
    );
    let cap_down = hermite(
        &x4,
        &x5,
        &pad(&[q(19, 20), q(0, 1), q(-20, 1)], jets),
        &jet(&valley, &x5, r),
    );
    let tail = hermite(
        &x6,
        &one,
        &jet(&valley, &x6, r),
        &pad(&[q(3, 5)], jets),
    );

    PiecewiseMonotoneMap::from_pieces(
        vec![
            (
                Interval::new(Scalar::zero(), x1.clone()),
                BranchFn::Poly(Poly::new(vec![q(1, 100)])),
            ),
            (Interval::new(x1, x2.clone()), BranchFn::Poly(ramp)),
            (Interval::new(x2, x3.clone()), BranchFn::Poly(zone)),
            (Interval::new(x3, x4.clone()), BranchFn::Poly(cap_up)),
            (Interval::new(x4, x5.clone()), BranchFn::Poly(cap_down)),
            (Interval::new(x5, c.clone()), BranchFn::Poly(valley.clone())),
            (Interval::new(c, x6.clone()), BranchFn::Poly(valley)),
            (Interval::new(x6, one), BranchFn::Poly(tail)),
        ],
        r as f64,
        format!("tangency:{r}"),
    )
}
