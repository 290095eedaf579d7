//! Measures the oscillation of random conformal factors against the two
//! theorem bounds `S(K_p, p, V(g0))` and `S(K_p, p, V(g))`: the bounds hold
//! whenever the curvature hypothesis `K_p < 4 pi` does.

use std::f64::consts::PI;

use willmore::moduli::ModuliPoint;
use willmore::{bounds, generators, geometry};

fn main() {
    let lattice = ModuliPoint::new(0.25, 1.2, 1.0).expect("in the fundamental domain");
    println!("{:>9} {:>9} {:>11} {:>11} {:>7}", "K_2", "osc u", "S(.,V(g0))", "S(.,V(g))", "holds");
    for i in 0..12 {
        let amplitude = 0.05 + 0.05 * i as f64;
        let metric = generators::random_trig_metric(lattice, 64, 64, 2, amplitude, 100 + i);
        let report = geometry::report(&metric, 2.0).expect("p = 2 is valid");
        if report.kp >= 4.0 * PI {
            println!("{:>9.4} {:>9.4} {:>11} {:>11} {:>7}", report.kp, report.osc_u, "-", "-", "n/a");
            continue;
        }
        let (bound_flat, bound_curved, holds) =
            bounds::osc_bound_check(&report).expect("K_p < 4 pi");
        println!(
            "{:>9.4} {:>9.4} {:>11.4} {:>11.4} {:>7}",
            report.kp, report.osc_u, bound_flat, bound_curved, holds
        );
        assert!(holds, "the oscillation theorem must hold under its hypothesis");
    }
}
