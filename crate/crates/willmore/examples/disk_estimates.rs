//! Exercises the two disk estimates on analytic radial test fields: caps
//! (u >= 0, curvature concentrated at the center) against the maximum bound
//! and wells (u <= 0) against the minimum bound. The cap bound requires
//! K_p^+ < 2 pi; the table shows it tightening as that threshold nears.

use std::f64::consts::PI;

use willmore::bounds;
use willmore::generators::{self, DiskProfile};

fn main() {
    let p = 2.0;
    let n = 64;

    println!("caps: max u <= bound while K_2^+ < 2 pi = {:.4}", 2.0 * PI);
    println!("{:>10} {:>10} {:>10} {:>10}", "magnitude", "K_2^+", "max u", "bound");
    for i in 0..8 {
        let magnitude = 0.05 + 0.15 * i as f64;
        let field = generators::disk_test_field(DiskProfile::Cap, magnitude, n).unwrap();
        let (kp_plus, _) = field.curvature_functionals(p).unwrap();
        match bounds::disk_max_bound(kp_plus, p) {
            Ok(bound) => {
                assert!(field.max_u() <= bound + 1e-12, "cap estimate failed");
                println!("{magnitude:>10.2} {kp_plus:>10.4} {:>10.4} {bound:>10.4}", field.max_u());
            }
            Err(_) => {
                println!("{magnitude:>10.2} {kp_plus:>10.4} {:>10} {:>10}", "-", "out of domain");
                break;
            }
        }
    }

    println!();
    println!("wells: min u >= -q K_2^- / 4 pi (no smallness hypothesis)");
    println!("{:>10} {:>10} {:>10} {:>10}", "magnitude", "K_2^-", "min u", "bound");
    // K_2^- grows like e^{2m}, and with it the cost of resolving the
    // curvature integrand, so the sweep stays at moderate depths.
    for i in 0..6 {
        let magnitude = 0.1 + 0.4 * i as f64;
        let field = generators::disk_test_field(DiskProfile::Well, magnitude, n).unwrap();
        let (_, kp_minus) = field.curvature_functionals(p).unwrap();
        let bound = bounds::disk_min_bound(kp_minus, p).unwrap();
        assert!(field.min_u() >= bound - 1e-12, "well estimate failed");
        println!("{magnitude:>10.2} {kp_minus:>10.4} {:>10.4} {bound:>10.4}", field.min_u());
    }
}
