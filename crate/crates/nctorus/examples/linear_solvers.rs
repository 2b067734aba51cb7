//! Diagonal solvers: Helmholtz `(−Δ+λ)u = f`, Poisson `Δu = f`, and the
//! inhomogeneous Cauchy-Riemann equation `∂̄u = f` on trace-zero sources.

use nctorus::element::TorusElement;
use nctorus::linear::{
    apply_helmholtz, constant_term_check, solve_dbar, solve_helmholtz, solve_poisson,
};
use nctorus::random::random_element;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> nctorus::Result<()> {
    let theta = 0.618_033_988_749_894_9_f64;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = random_element(theta, 5, 0.5, &mut rng)?;

    // Helmholtz is exactly invertible for λ > 0
    for lambda in [1.0, 10.0] {
        let u = solve_helmholtz(&f, lambda)?;
        let residual = apply_helmholtz(&u, lambda)?.sub(&f)?.l2_norm();
        println!(
            "helmholtz λ = {lambda:>4}: relative residual {:.3e}",
            residual / f.l2_norm()
        );
    }

    // Poisson and ∂̄ need trace-zero data; project the source first
    let f0 = f.sub(&TorusElement::scalar(theta, f.trace())?)?;
    let u = solve_poisson(&f0, 1e-12)?;
    println!(
        "poisson: residual {:.3e}, solution trace = {:?}",
        u.laplacian().sub(&f0)?.l2_norm() / f0.l2_norm(),
        u.trace()
    );

    let w = solve_dbar(&f0, 1e-12)?;
    println!(
        "dbar:    residual {:.3e}, solution trace = {:?}",
        w.dbar().sub(&f0)?.l2_norm() / f0.l2_norm(),
        w.trace()
    );

    // a source with nonzero trace is rejected: the image of Δ is trace-zero
    match solve_poisson(&f, 1e-12) {
        Err(e) => println!("poisson on non-trace-zero source: {e}"),
        Ok(_) => println!("unexpected success"),
    }

    // the constant term of ∂̄(anything) vanishes
    println!(
        "constant term of ∂̄f (residue observable): {:.1e}",
        constant_term_check(&f)
    );
    Ok(())
}
