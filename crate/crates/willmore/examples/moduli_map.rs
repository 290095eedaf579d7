//! Emits a coarse CSV map of the moduli fundamental domain: for each class,
//! the unconditionally certified region it falls in (if any) and the
//! curvature threshold tau the theorem rule would need.

use willmore::moduli::{self, ModuliPoint};
use willmore::bounds;

fn main() {
    println!("x,y,region,tau");
    let steps = 12;
    for i in 0..=steps {
        let x = 0.5 * i as f64 / steps as f64;
        for j in 0..=steps {
            let y = 0.85 + (2.5 - 0.85) * j as f64 / steps as f64;
            // Points inside the unit circle are not reduced classes.
            let Ok(m) = ModuliPoint::new(x, y, 1.0) else {
                continue;
            };
            let region = moduli::classify_region(&m);
            let tau = bounds::tau(y, 2.0)
                .map(|t| format!("{t:.6}"))
                .unwrap_or_default();
            println!("{x:.4},{y:.4},{region},{tau}");
        }
    }
}
