//! Vector-state Maximum Principle check: at the state maximizing φ(h)
//! over represented top eigenvectors, φ(Δh) ≤ 0 up to finite-q slack —
//! and a nonexistence certificate built from the same positivity.

use num_complex::Complex64;

use nctorus::element::{TorusElement, TruncationPolicy};
use nctorus::nonlinear::nonexistence_certificate_scalar;
use nctorus::random::random_self_adjoint;
use nctorus::representation::{
    approximant_with_q_at_least, max_state_check, representation_slack, spectral_bounds,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

fn main() -> nctorus::Result<()> {
    let theta = 0.618_033_988_749_894_9_f64;
    let approx = approximant_with_q_at_least(theta, 89)?;
    println!("representation: q = {}, p = {}", approx.q, approx.p);

    // h = U + U*: Δh = −4π² h, so φ(Δh) = −4π² φ(h) ≈ −8π²
    let u = TorusElement::monomial(theta, 1, 0, Complex64::new(1.0, 0.0))?;
    let h = u.add(&u.adjoint())?;
    let out = max_state_check(&h, &approx, 8)?;
    println!("\nh = U + U*:");
    println!("  φ(h)  = {:+.6}  (top of spectrum, → 2)", out.phi_h);
    println!("  φ(Δh) = {:+.6}  (→ −8π² = {:+.6})", out.phi_lap_h, -2.0 * TAU * TAU);

    // random smooth self-adjoint elements: φ(Δh) stays ≤ 0 up to slack
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    println!("\nrandom self-adjoint h (radius 6, decay 1/2):");
    for i in 0..4 {
        let h = random_self_adjoint(theta, 6, 0.5, &mut rng)?;
        let out = max_state_check(&h, &approx, 8)?;
        println!(
            "  #{i}: φ(h) = {:+.4}  φ(Δh) = {:+.4e}  degenerate = {}  slack = {:.1e}",
            out.phi_h,
            out.phi_lap_h,
            out.degenerate,
            representation_slack(&h, &approx)
        );
    }

    // the same positivity underlies nonexistence for Δu = −λeᵘ
    let policy = TruncationPolicy::grow_exact(16).with_tail_tol(1.0);
    let raw = random_self_adjoint(theta, 4, 0.5, &mut rng)?;
    let (lo, hi) = spectral_bounds(&raw, &approx, 8)?;
    let u = raw.scale_re(0.9 / lo.abs().max(hi.abs()));
    let cert = nonexistence_certificate_scalar(&u, 2.0, &policy, 1e-12)?;
    println!("\nnonexistence residual τ(Δu + 2eᵘ) for u with spectrum in [−0.9, 0.9]:");
    println!("  certificate = {cert:.6} (floor 2e^{{−0.9}} = {:.6})", 2.0 * (-0.9f64).exp());
    Ok(())
}
