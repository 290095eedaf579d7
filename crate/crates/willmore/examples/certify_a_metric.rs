//! Runs the full certification pipeline on two metrics: a gentle random
//! trigonometric perturbation (certified) and a steep revolution-torus
//! metric (honestly uncertified), printing the measured report and the
//! certificate for each.

use willmore::immersions::ImmersedTorus;
use willmore::moduli::ModuliPoint;
use willmore::{bounds, generators, geometry};

fn show(label: &str, metric: &willmore::geometry::ConformalTorusMetric) {
    let report = geometry::report(metric, 2.0).expect("p = 2 is valid");
    let cert = bounds::certify_report(&report).expect("report is in range");
    println!("== {label} ==");
    println!(
        "  class (x, y) = ({:.4}, {:.4}), V(g) = {:.4}, osc u = {:.4}",
        report.x, report.y, report.v_g, report.osc_u
    );
    println!(
        "  K_1 = {:.4}, K_2 = {:.4} (4 pi = {:.4})",
        report.k1,
        report.kp,
        4.0 * std::f64::consts::PI
    );
    println!(
        "  {:?} by rule {}; established W >= {:.6}",
        cert.status, cert.rule, cert.lower_bound
    );
    for (name, value) in &cert.witnesses {
        println!("    witness {name} = {value:.6}");
    }
    println!();
}

fn main() {
    let lattice = ModuliPoint::new(0.0, 2.0, 1.0).expect("in the fundamental domain");
    let random = generators::random_trig_metric(lattice, 96, 96, 3, 0.05, 42);
    show("random trigonometric metric on (0, 2)", &random);

    // c = R/r = 2 keeps W below the certification rules' reach: large
    // oscillation, K_2 above 4 pi, and V(g) = 2.
    let torus = ImmersedTorus::revolution(1.0, 0.5).expect("embedded revolution torus");
    let induced = torus.induced_metric().expect("conformal chart exists");
    show("induced metric of the c = 2 revolution torus", &induced);
}
