//! The generators and the coefficient algebra: commutation relation,
//! derivations, integration by parts, and the norm family.

use num_complex::Complex64;
use std::f64::consts::TAU;

use nctorus::element::{TorusElement, TruncationPolicy};
use nctorus::random::random_element;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> nctorus::Result<()> {
    let theta = 0.618_033_988_749_894_9_f64; // (√5 − 1)/2
    let policy = TruncationPolicy::grow_exact(16);
    let one = Complex64::new(1.0, 0.0);

    let u = TorusElement::monomial(theta, 1, 0, one)?;
    let v = TorusElement::monomial(theta, 0, 1, one)?;

    // UV = e^{2πiθ} VU
    let uv = u.twisted_mul(&v, &policy)?;
    let vu = v.twisted_mul(&u, &policy)?;
    let defect = uv.lincomb(&vu, -Complex64::from_polar(1.0, TAU * theta))?;
    println!("theta = {theta}");
    println!("UV coefficient at (1,1):            {:?}", uv.coeff(1, 1));
    println!("VU coefficient at (1,1):            {:?}", vu.coeff(1, 1));
    println!("|UV - e^(2πiθ) VU| (l2):            {:.3e}", defect.l2_norm());

    // derivations act as multipliers
    println!("\nδ1(U) = 2πi U:                      {:?}", u.derive(1).coeff(1, 0));
    println!("δ2(U) = 0:                          {}", u.derive(2).is_zero());
    let lap = u
        .twisted_mul(&v, &policy)?
        .laplacian();
    println!("Δ(UV) eigenvalue:                   {:.6}", lap.coeff(1, 1).re);
    println!("expected -8π²:                      {:.6}", -2.0 * TAU * TAU / 2.0 * 2.0);

    // integration by parts on random elements
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = random_element(theta, 4, 0.5, &mut rng)?;
    let b = random_element(theta, 4, 0.5, &mut rng)?;
    for j in [1u8, 2] {
        let lhs = a.derive(j).twisted_mul(&b, &policy)?.trace();
        let rhs = b.derive(j).twisted_mul(&a, &policy)?.trace();
        println!(
            "\nintegration by parts (δ{j}):          |τ(δa·b) + τ(δb·a)| = {:.3e}",
            (lhs + rhs).norm()
        );
    }

    // the norm family on a random element
    println!("\nnorms of a random element (radius 4, decay 1/2):");
    println!("  l1      = {:.6}", a.l1_norm());
    println!("  l2      = {:.6}", a.l2_norm());
    println!("  H1      = {:.6}", a.sobolev_norm(1));
    println!("  H2      = {:.6}", a.sobolev_norm(2));
    println!("  |a|_1   = {:.6}  (bootstrap weight 2+m²+n²)", a.bootstrap_norm(1));
    println!("  |a|_2   = {:.6}  (bootstrap weight 8+(m²+n²)²)", a.bootstrap_norm(2));
    println!("  l2 <= l1: {}", a.l2_norm() <= a.l1_norm());

    // Δ = 4∂∂̄
    let diff = a.dbar().dholo().scale_re(4.0).sub(&a.laplacian())?;
    println!("\n|4∂∂̄a - Δa| (l2):                   {:.3e}", diff.l2_norm());
    Ok(())
}
