//! Computes the true Willmore energy of every built-in immersion, compares
//! it against closed forms where one exists, and audits the certified lower
//! bounds against the energy. The Clifford torus sits at the conjectured
//! minimum 2 pi^2; everything else must sit strictly above its own bound.

use std::f64::consts::PI;

use willmore::immersions::{self, ImmersedTorus};

fn audit(label: &str, torus: &ImmersedTorus, exact: Option<f64>) {
    let check = immersions::verify_lower_bounds(torus, 2.0).expect("audit succeeds");
    let exact_note = match exact {
        Some(w) => format!("exact {w:.6}, rel err {:.1e}", (check.energy - w).abs() / w),
        None => "no closed form".to_string(),
    };
    println!(
        "{label:<28} W = {:>10.6}  class ({:.3}, {:.3})  status {:?}  slack {:+.4}  [{}]",
        check.energy,
        check.report.x,
        check.report.y,
        check.certificate.status,
        check.min_slack,
        exact_note
    );
    assert!(check.all_bounds_hold, "{label}: a lower bound exceeded the energy");
}

fn main() {
    let two_pi_sq = 2.0 * PI * PI;

    println!("-- energies and audited bounds --");
    audit("clifford", &immersions::clifford(64), Some(two_pi_sq));
    audit(
        "perturbed clifford 3e-5",
        &immersions::perturbed_clifford(3e-5, 9, 64),
        None,
    );
    audit(
        "flat product y = 1.6",
        &immersions::flat_product_embedding(1.6, 1.0, 64, 64).unwrap(),
        Some(PI * PI * (1.6 + 1.0 / 1.6)),
    );
    for c in [2.0_f64.sqrt(), 2.0, 4.0] {
        let torus = ImmersedTorus::revolution(c, 1.0).unwrap();
        audit(
            &format!("revolution c = {c:.4}"),
            &torus,
            Some(immersions::revolution_energy_closed_form(c)),
        );
    }

    println!();
    println!("-- independent discretizations agree --");
    let cl = immersions::clifford(64);
    let w_conf = immersions::willmore_energy_conformal(&cl).unwrap();
    let w_second = immersions::willmore_energy_second_form(&cl, 2).unwrap();
    println!("clifford: conformal-factor {w_conf:.9}, second-form {w_second:.9}");
    assert!((w_conf - w_second).abs() < 1e-6 * two_pi_sq);

    let (a1, a2, quad) = immersions::parseval_area_identities(&cl).unwrap();
    println!("clifford Parseval areas: {a1:.9} / {a2:.9} / quadrature {quad:.9}");
    assert!((a1 - quad).abs() < 1e-8 * quad && (a2 - quad).abs() < 1e-8 * quad);
}
