//! Energy descent on the unitary group: perturb the harmonic unitary U,
//! flow back down, and watch energy, gradient norm, and unitarity defect.

use num_complex::Complex64;
use std::f64::consts::PI;

use nctorus::calculus::exp_element;
use nctorus::element::{TorusElement, TruncationPolicy};
use nctorus::flow::{
    distance_to_monomial, el_residual, energy_unitary, gradient_flow, FlowConfig,
};
use nctorus::random::random_self_adjoint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> nctorus::Result<()> {
    let theta = 0.618_033_988_749_894_9_f64;
    let policy = TruncationPolicy::grow_exact(12).with_tail_tol(1.0);

    // monomials are harmonic: the Euler-Lagrange residual vanishes
    for (m, n) in [(1i64, 0i64), (2, 1), (-3, 2)] {
        let w = TorusElement::monomial(theta, m, n, Complex64::new(1.0, 0.0))?;
        println!(
            "el_residual(U^{m} V^{n}) l2 = {:.1e}   energy = {:.6} (expect {:.6})",
            el_residual(&w, &policy, 1e-6)?.l2_norm(),
            energy_unitary(&w),
            2.0 * PI * PI * ((m * m + n * n) as f64),
        );
    }

    // perturb U inside its connected component and flow back
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let h = random_self_adjoint(theta, 1, 0.5, &mut rng)?;
    let rot = exp_element(&h.scale(Complex64::new(0.0, 0.05)), &policy, 1e-13)?;
    let u = TorusElement::monomial(theta, 1, 0, Complex64::new(1.0, 0.0))?;
    let start = u.twisted_mul(&rot, &policy)?;
    println!(
        "\nstart: energy = {:.8} (harmonic value 2π² = {:.8})",
        energy_unitary(&start),
        2.0 * PI * PI
    );

    let cfg = FlowConfig {
        grad_tol: 1e-5,
        ..FlowConfig::default()
    };
    let trace = gradient_flow(&start, 400, &cfg, &policy)?;
    println!("flow verdict: {:?} after {} steps, {} re-unitarizations", trace.verdict, trace.steps.len(), trace.reunitarizations);
    println!("\n   step     energy        grad norm   unit defect   step size");
    let n = trace.steps.len();
    for s in trace
        .steps
        .iter()
        .enumerate()
        .filter(|(i, _)| *i < 3 || i % 50 == 0 || *i == n - 1)
        .map(|(_, s)| s)
    {
        println!(
            "  {:>5}  {:>12.8}  {:>10.3e}  {:>10.3e}  {:>10.3e}",
            s.step, s.energy, s.grad_norm_l2, s.unitarity_defect, s.step_size
        );
    }
    println!(
        "\nl2 distance of the terminal point to the scalar multiples of U: {:.2e}",
        distance_to_monomial(&trace.terminal, 1, 0)
    );
    Ok(())
}
