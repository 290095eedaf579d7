//! Tabulates the certification thresholds: tau(y, p) along the imaginary
//! axis of the moduli space and sigma(V, p) over the systole ratio,
//! including the worked value tau(2, 2) = 0.1987553.

use willmore::bounds;

fn main() {
    println!("tau(y, 2): curvature threshold for the conformal-class rule");
    println!("{:>8} {:>12}", "y", "tau");
    for y in [1.001, 1.01, 1.1, 1.5, 2.0, 3.0, 5.0, 10.0, 30.0] {
        let tau = bounds::tau(y, 2.0).expect("y > 1");
        println!("{y:>8} {tau:>12.7}");
    }
    let exact = bounds::tau(2.0, 2.0).expect("y > 1");
    println!("worked example: tau(2, 2) = {exact:.7} (reference 0.1987553)");
    assert!((exact - 0.1987553).abs() < 1e-4);

    println!();
    println!("sigma(V, 2): curvature threshold for the systole-ratio rule");
    println!("{:>8} {:>12} {:>12}", "V", "sigma", "dense check");
    for v in [1.1, 1.5, 2.0, 4.0, 9.0] {
        let sigma = bounds::sigma(v, 2.0).expect("V > 1");
        let dense = bounds::sigma_dense_reference(v, 2.0, 2048).expect("V > 1");
        println!("{v:>8} {sigma:>12.7} {dense:>12.7}");
        assert!(sigma <= dense + 1e-9, "sigma is a minimum over the chain");
    }

    println!();
    println!("below the lines the thresholds are moot:");
    println!("  tau(0.9, 2)  -> {:?}", bounds::tau(0.9, 2.0).unwrap_err().to_string());
    println!("  sigma(0.8, 2) -> {:?}", bounds::sigma(0.8, 2.0).unwrap_err().to_string());
}
