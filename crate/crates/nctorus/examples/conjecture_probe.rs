//! Numerical probe of energy minimality of the monomial unitaries:
//! second-variation expansion at U^m V^n and basin-of-attraction trials
//! of the gradient flow from randomized perturbations.

use nctorus::element::TruncationPolicy;
use nctorus::flow::{conjecture_probe, second_variation_check, FlowConfig, ProbeConfig};
use nctorus::random::random_self_adjoint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> nctorus::Result<()> {
    let theta = 0.618_033_988_749_894_9_f64;
    let policy = TruncationPolicy::grow_exact(12).with_tail_tol(1.0);

    // E(U V e^{ith}) = E(UV) + t² E(h) + O(t³)
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    println!("second variation at u = UV (t = 1e-3):");
    for i in 0..3 {
        let h = random_self_adjoint(theta, 3, 0.5, &mut rng)?;
        let (lhs, rhs) = second_variation_check(1, 1, &h, 1e-3, &policy, 1e-13)?;
        println!(
            "  h#{i}: (E(ue^{{ith}})-E(u))/t² = {lhs:.6}   E(h) = {rhs:.6}   rel defect {:.1e}",
            (lhs - rhs).abs() / rhs
        );
    }

    // flow trials from perturbed starts
    let cfg = ProbeConfig {
        magnitude: 0.05,
        radius: 1,
        steps: 250,
        distance_tol: 1e-2,
        flow: FlowConfig {
            grad_tol: 1e-4,
            ..FlowConfig::default()
        },
        ..ProbeConfig::default()
    };
    let summary = conjecture_probe(theta, 1, 0, 4, 123, &cfg, &policy)?;
    println!(
        "\nprobe around U: {} of {} trials returned to a scalar multiple of U",
        summary.converged_to_conjectured_minimum,
        summary.trials.len()
    );
    println!("monomial energy 2π² = {:.6}", summary.monomial_energy);
    for t in &summary.trials {
        println!(
            "  trial {}: E = {:.8}  |grad| = {:.1e}  distance = {:.1e}  {:?} ({} steps)",
            t.trial,
            t.terminal_energy,
            t.terminal_grad_norm,
            t.distance_to_monomial,
            t.verdict,
            t.flow_steps
        );
    }
    Ok(())
}
