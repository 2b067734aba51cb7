//! Inversion in the ℓ¹ algebra: the inverse of an absolutely convergent
//! series is again absolutely convergent, and its coefficient tail decays
//! as the truncation radius grows.

use num_complex::Complex64;

use nctorus::calculus::invert;
use nctorus::element::{TorusElement, TruncationPolicy};
use nctorus::representation::approximant_with_q_at_least;

fn main() -> nctorus::Result<()> {
    let theta = 0.618_033_988_749_894_9_f64;
    let one = TorusElement::identity(theta)?;
    let u = TorusElement::monomial(theta, 1, 0, Complex64::new(1.0, 0.0))?;
    let a = one.add(&u.scale_re(0.5))?; // 1 + U/2, inverse Σ (-1/2)^k U^k
    let approx = approximant_with_q_at_least(theta, 34)?;

    println!("inverting a = 1 + U/2 at growing truncation radius:");
    for max_radius in [12, 24, 40] {
        let policy = TruncationPolicy::grow_exact(max_radius).with_tail_tol(1e-2);
        let out = invert(&a, &approx, &policy, 1e-12)?;
        println!(
            "  R_max = {max_radius:>2}: l1(a⁻¹) = {:.12}  residual l1 = {:.2e}  terms = {}",
            out.inverse.l1_norm(),
            out.residual_l1,
            out.neumann_terms
        );
    }

    let policy = TruncationPolicy::grow_exact(40).with_tail_tol(1e-2);
    let out = invert(&a, &approx, &policy, 1e-12)?;
    println!("\ngeometric-series coefficients of the inverse:");
    for k in 0..6i64 {
        println!(
            "  c_({k},0) = {:+.10}   expected (-1/2)^{k} = {:+.10}",
            out.inverse.coeff(k, 0).re,
            (-0.5f64).powi(k as i32)
        );
    }

    println!("\nl1 mass of the inverse outside radius R (Wiener decay):");
    for r in [5i64, 10, 20, 30] {
        let tail: f64 = out
            .inverse
            .entries()
            .iter()
            .filter(|(m, n, _)| m.abs().max(n.abs()) > r)
            .map(|(_, _, c)| c.norm())
            .sum();
        println!("  R = {r:>2}: {tail:.3e}");
    }

    // a singular element is refused
    let h = u.add(&u.adjoint())?;
    let small = TruncationPolicy::grow_exact(8).with_tail_tol(1e3);
    match invert(&h, &approx, &small, 1e-10) {
        Err(e) => println!("\ninvert(U + U*) correctly fails: {e}"),
        Ok(_) => println!("\nunexpected: U + U* inverted"),
    }
    Ok(())
}
