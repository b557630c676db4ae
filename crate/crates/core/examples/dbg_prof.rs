use entromap_core::analysis::{self, BoundsParams};
use entromap_core::maps::{identity, logistic, tent};
use entromap_core::perturb::tangency_family;
use entromap_core::scalar::Scalar;
use std::time::Instant;

fn main() {
    let maps = vec![
        tent(Scalar::from_int(2)).unwrap(),
        tent(Scalar::ratio(3, 2)).unwrap(),
        tent(Scalar::ratio(9, 5)).unwrap(),
        identity(),
        logistic(Scalar::from_int(4)).unwrap(),
        tangency_family(3).unwrap(),
    ];
    for m in &maps {
        let t0 = Instant::now();
        let rep = analysis::bounds_report(m, 2.0, &BoundsParams::default()).unwrap();
        println!("{}: {:.2}s (h={:.4}, flags={:?})", m.name(), t0.elapsed().as_secs_f64(), rep.h, rep.flags);
    }
}
