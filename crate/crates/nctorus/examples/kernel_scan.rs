//! Kernel lattice of the logarithmic Cauchy-Riemann equation ∂̄u = fu:
//! for constant f the operator has a kernel exactly when
//! τ(f) ∈ πi(ℤ + iℤ). The scan maps σ_min over a grid of constants.

use num_complex::Complex64;
use std::f64::consts::PI;

use nctorus::element::TorusElement;
use nctorus::linear::cr_kernel_scan;

fn main() -> nctorus::Result<()> {
    let theta = 0.618_033_988_749_894_9_f64;
    let radius = 4i64;

    println!("sigma_min of L_f = ∂̄ - f· over f = πi(x+iy)·1, ball radius {radius}");
    println!("(x, y on a quarter-step grid; lattice points show as zeros)\n");
    print!("      ");
    for j in 0..9 {
        print!("  x={:+.2} ", -1.0 + 0.25 * j as f64);
    }
    println!();
    for k in 0..9 {
        let y = -1.0 + 0.25 * k as f64;
        print!("y={y:+.2}");
        for j in 0..9 {
            let x = -1.0 + 0.25 * j as f64;
            let c = Complex64::new(-PI * y, PI * x); // πi(x + iy)
            let f = TorusElement::scalar(theta, c)?;
            let scan = cr_kernel_scan(&f, radius, 1e-8)?;
            print!(" {:8.4}", scan.sigma_min());
        }
        println!();
    }

    println!("\nexact kernel vectors: U^m V^n solves ∂̄u = fu at f = πi(m+in):");
    for (m, n) in [(0i64, 0i64), (1, 0), (2, 1)] {
        let c = Complex64::new(-PI * n as f64, PI * m as f64);
        let f = TorusElement::scalar(theta, c)?;
        let scan = cr_kernel_scan(&f, radius, 1e-8)?;
        println!(
            "  (m,n) = ({m},{n}): sigma_min = {:.2e}, kernel dim estimate = {}",
            scan.sigma_min(),
            scan.kernel_dim_estimate
        );
    }

    // non-constant f goes through the dense assembled operator
    let f = TorusElement::from_coeffs(
        theta,
        &[
            (0, 0, Complex64::new(0.0, PI)),
            (1, 0, Complex64::new(0.1, 0.0)),
        ],
    )?;
    let scan = cr_kernel_scan(&f, 3, 1e-8)?;
    println!(
        "\nπi + 0.1·U (dense route): sigma_min = {:.4e}, projected mass = {:.3}",
        scan.sigma_min(),
        scan.projected_mass
    );
    Ok(())
}
