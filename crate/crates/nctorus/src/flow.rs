//! Gradient flow on the unitary group of the truncated algebra.
//!
//! The energy `E(u) = ½τ(δ₁(u)*δ₁(u) + δ₂(u)*δ₂(u))` has Euler-Lagrange
//! residual
//!
//! ```text
//! r = u*(Δu) + δ₁(u)*δ₁(u) + δ₂(u)*δ₂(u) = δ₁(u*δ₁u) + δ₂(u*δ₂u),
//! ```
//!
//! skew-adjoint for exactly unitary `u`. The flow moves along the curves
//! `u·e^{iεh}` with the self-adjoint direction `h = −i·r`, for which
//! `dE/dε|₀ = −‖r‖₂²`; ε is chosen by backtracking so energy strictly
//! decreases. Multiplicative updates preserve unitarity exactly in the
//! untruncated algebra; truncation erodes it, so the defect `‖u*u − 𝟙‖₂`
//! is monitored and the Newton-type polish `u ← ½u(3𝟙 − u*u)` is applied
//! whenever it exceeds half the configured ceiling.
//!
//! The residual is computed in the Leibniz form `Σ δⱼ(u*δⱼu)`: on monomials
//! `u*δⱼu` is a scalar, which the outer derivation kills exactly, so
//! harmonicity of the monomial unitaries holds to machine zero.
//! [`el_residual_direct`] evaluates the first form for cross-checking.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::calculus::exp_element;
use crate::element::{TorusElement, TruncationPolicy};
use crate::error::Error;
use crate::random::random_self_adjoint;
use crate::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Step-size and stopping parameters for the gradient flow.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowConfig {
    /// Initial trial step.
    pub step_init: f64,
    /// Growth factor applied to the step after an accepted move.
    pub step_grow: f64,
    /// Shrink factor during backtracking.
    pub backtrack: f64,
    pub max_backtracks: usize,
    /// Terminate when the residual ℓ² norm drops below this.
    pub grad_tol: f64,
    /// Ceiling on the unitarity defect `‖u*u − 𝟙‖₂`.
    pub defect_ceiling: f64,
    /// ℓ¹ tolerance handed to the exponential in the retraction.
    pub exp_tol: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            step_init: 1e-3,
            step_grow: 1.5,
            backtrack: 0.5,
            max_backtracks: 45,
            grad_tol: 1e-6,
            defect_ceiling: 1e-6,
            exp_tol: 1e-12,
        }
    }
}

/// One accepted flow step.
#[derive(Debug, Clone, Serialize)]
pub struct FlowStep {
    pub step: usize,
    pub energy: f64,
    pub grad_norm_l2: f64,
    pub unitarity_defect: f64,
    pub step_size: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowVerdict {
    /// Residual dropped below `grad_tol`.
    Converged,
    /// Step budget exhausted with descent still in progress.
    MaxSteps,
    /// Backtracking hit the machine floor without finding descent.
    Stalled,
}

/// Recorded trajectory of one flow run.
#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub steps: Vec<FlowStep>,
    pub verdict: FlowVerdict,
    pub reunitarizations: usize,
    pub terminal: TorusElement,
}

/// Same Dirichlet energy as for self-adjoint elements, with the adjoints
/// in place so it is ≥ 0 for every element; invariant under `u ↦ λu`,
/// `|λ| = 1`.
pub fn energy_unitary(u: &TorusElement) -> f64 {
    u.dirichlet_energy()
}

/// `‖u*u − 𝟙‖₂`.
pub fn unitarity_defect(u: &TorusElement, policy: &TruncationPolicy) -> Result<f64> {
    let gram = u.adjoint().twisted_mul(u, policy)?;
    let one = TorusElement::identity(u.theta())?;
    Ok(gram.sub(&one)?.l2_norm())
}

/// Euler-Lagrange residual in the Leibniz form
/// `δ₁(u*δ₁u) + δ₂(u*δ₂u)`; errors if the unitarity defect of `u` exceeds
/// `defect_ceiling`.
pub fn el_residual(
    u: &TorusElement,
    policy: &TruncationPolicy,
    defect_ceiling: f64,
) -> Result<TorusElement> {
    let defect = unitarity_defect(u, policy)?;
    if defect > defect_ceiling {
        return Err(Error::UnitarityDefect {
            defect,
            ceiling: defect_ceiling,
        });
    }
    el_residual_unchecked(u, policy)
}

fn el_residual_unchecked(u: &TorusElement, policy: &TruncationPolicy) -> Result<TorusElement> {
    let ustar = u.adjoint();
    let t1 = ustar.twisted_mul(&u.derive(1), policy)?.derive(1);
    let t2 = ustar.twisted_mul(&u.derive(2), policy)?.derive(2);
    t1.add(&t2)
}

/// The same residual in its defining form
/// `u*(Δu) + δ₁(u)*δ₁(u) + δ₂(u)*δ₂(u)` — kept as an independent route for
/// cross-checking the Leibniz evaluation.
pub fn el_residual_direct(u: &TorusElement, policy: &TruncationPolicy) -> Result<TorusElement> {
    let ustar = u.adjoint();
    let mut acc = ustar.twisted_mul(&u.laplacian(), policy)?;
    for j in [1u8, 2] {
        let d = u.derive(j);
        acc = acc.add(&d.adjoint().twisted_mul(&d, policy)?)?;
    }
    Ok(acc)
}

/// Newton-type polar correction `u ← ½u(3𝟙 − u*u)`, iterated while it
/// contracts the unitarity defect. Returns the corrected element and its
/// final defect.
pub fn polar_correct(mut u: TorusElement, policy: &TruncationPolicy) -> Result<(TorusElement, f64)> {
    let one = TorusElement::identity(u.theta())?;
    let mut defect = unitarity_defect(&u, policy)?;
    for _ in 0..12 {
        let gram = u.adjoint().twisted_mul(&u, policy)?;
        let corr = one.scale_re(3.0).sub(&gram)?;
        let next = u.twisted_mul(&corr, policy)?.scale_re(0.5);
        let next_defect = unitarity_defect(&next, policy)?;
        if next_defect >= defect {
            break;
        }
        u = next;
        defect = next_defect;
        if defect < 1e-15 {
            break;
        }
    }
    Ok((u, defect))
}

/// Energy-descent flow `u ← u·e^{iεh}`, `h = −i·el_residual(u)`, with
/// backtracking line search and periodic re-unitarization. Returns the
/// trace with a verdict; a backtracking failure is a `Stalled` verdict,
/// and a breached defect ceiling after re-unitarization is an error
/// advising a larger `max_radius`.
pub fn gradient_flow(
    u0: &TorusElement,
    max_steps: usize,
    cfg: &FlowConfig,
    policy: &TruncationPolicy,
) -> Result<FlowTrace> {
    let mut u = u0.clone();
    let mut steps: Vec<FlowStep> = Vec::new();
    let mut reunitarizations = 0usize;
    let mut step_size = cfg.step_init;
    let initial_defect = unitarity_defect(&u, policy)?;
    if initial_defect > cfg.defect_ceiling {
        return Err(Error::UnitarityDefect {
            defect: initial_defect,
            ceiling: cfg.defect_ceiling,
        });
    }

    for step in 0..max_steps {
        let r = el_residual(&u, policy, cfg.defect_ceiling)?;
        let grad = r.l2_norm();
        let e = energy_unitary(&u);
        let defect = unitarity_defect(&u, policy)?;
        steps.push(FlowStep {
            step,
            energy: e,
            grad_norm_l2: grad,
            unitarity_defect: defect,
            step_size,
        });
        if grad < cfg.grad_tol {
            return Ok(FlowTrace {
                steps,
                verdict: FlowVerdict::Converged,
                reunitarizations,
                terminal: u,
            });
        }
        // h = −i r, symmetrized against rounding-level drift
        let h = r.scale(Complex64::new(0.0, -1.0)).symmetrize()?;
        let mut eps = step_size;
        let mut accepted = None;
        for _ in 0..cfg.max_backtracks {
            let rot = exp_element(&h.scale(Complex64::new(0.0, eps)), policy, cfg.exp_tol)?;
            let trial = u.twisted_mul(&rot, policy)?;
            let e_trial = energy_unitary(&trial);
            if e_trial <= e - 0.1 * eps * grad * grad {
                accepted = Some((trial, eps));
                break;
            }
            eps *= cfg.backtrack;
            if eps < 1e-18 {
                break;
            }
        }
        let Some((mut next, eps)) = accepted else {
            return Ok(FlowTrace {
                steps,
                verdict: FlowVerdict::Stalled,
                reunitarizations,
                terminal: u,
            });
        };
        next.set_tail_mass(0.0);
        step_size = (eps * cfg.step_grow).min(1.0);
        if unitarity_defect(&next, policy)? > 0.5 * cfg.defect_ceiling {
            let (polished, defect) = polar_correct(next, policy)?;
            reunitarizations += 1;
            if defect > cfg.defect_ceiling {
                return Err(Error::UnitarityDefect {
                    defect,
                    ceiling: cfg.defect_ceiling,
                });
            }
            next = polished;
            next.set_tail_mass(0.0);
        }
        u = next;
    }

    let grad = el_residual(&u, policy, cfg.defect_ceiling)?.l2_norm();
    let defect = unitarity_defect(&u, policy)?;
    steps.push(FlowStep {
        step: max_steps,
        energy: energy_unitary(&u),
        grad_norm_l2: grad,
        unitarity_defect: defect,
        step_size,
    });
    Ok(FlowTrace {
        steps,
        verdict: FlowVerdict::MaxSteps,
        reunitarizations,
        terminal: u,
    })
}

/// Second-variation check at the monomial `u = U^m V^n`:
/// `lhs = (E(u·e^{ith}) − E(u))/t²` against `rhs = E(h)`, with
/// `|lhs − rhs| = O(t)` for self-adjoint `h`.
pub fn second_variation_check(
    m: i64,
    n: i64,
    h: &TorusElement,
    t: f64,
    policy: &TruncationPolicy,
    tol: f64,
) -> Result<(f64, f64)> {
    if t == 0.0 {
        return Err(Error::InvalidParameter("t must be nonzero".into()));
    }
    let defect = h.self_adjoint_defect();
    if defect > 1e-10 * h.l2_norm().max(1.0) {
        return Err(Error::NotSelfAdjoint { defect });
    }
    let u = TorusElement::monomial(h.theta(), m, n, Complex64::new(1.0, 0.0))?;
    let rot = exp_element(&h.scale(Complex64::new(0.0, t)), policy, tol)?;
    let perturbed = u.twisted_mul(&rot, policy)?;
    let lhs = (energy_unitary(&perturbed) - energy_unitary(&u)) / (t * t);
    let rhs = crate::nonlinear::energy(h);
    Ok((lhs, rhs))
}

/// Probe parameters: perturbation profile and the flow budget per trial.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeConfig {
    /// Size of the random perturbation exponent.
    pub magnitude: f64,
    /// Decay ratio of the random self-adjoint direction.
    pub rho: f64,
    /// Support radius of the random direction.
    pub radius: i64,
    /// Flow step budget per trial.
    pub steps: usize,
    /// ℓ² distance below which a terminal point counts as the conjectured
    /// minimizer (nearest scalar multiple of the monomial).
    pub distance_tol: f64,
    pub flow: FlowConfig,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            magnitude: 0.1,
            rho: 0.5,
            radius: 4,
            steps: 400,
            distance_tol: 1e-3,
            flow: FlowConfig::default(),
        }
    }
}

/// One probe trial outcome.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeTrial {
    pub trial: usize,
    pub terminal_energy: f64,
    pub terminal_grad_norm: f64,
    /// ℓ² distance of the terminal point to the nearest scalar multiple of
    /// `U^m V^n`, minimized over the unit-modulus scalar.
    pub distance_to_monomial: f64,
    pub verdict: FlowVerdict,
    pub flow_steps: usize,
}

/// Aggregate of a conjecture probe run.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeSummary {
    pub m: i64,
    pub n: i64,
    pub monomial_energy: f64,
    pub trials: Vec<ProbeTrial>,
    pub converged_to_conjectured_minimum: usize,
    pub elsewhere: usize,
}

/// `min_{|λ|=1} ‖a − λ U^m V^n‖₂`
pub fn distance_to_monomial(a: &TorusElement, m: i64, n: i64) -> f64 {
    let mut off = 0.0;
    let mut pivot = Complex64::new(0.0, 0.0);
    for (k, l, c) in a.entries() {
        if (k, l) == (m, n) {
            pivot = c;
        } else {
            off += c.norm_sqr();
        }
    }
    (off + (pivot.norm() - 1.0).powi(2)).sqrt()
}

/// Perturbs `U^m V^n` by `e^{i·magnitude·h}` with seeded random
/// self-adjoint `h`, flows each start, and tallies how many trials end at
/// the conjectured minimizer (a scalar multiple of the monomial).
pub fn conjecture_probe(
    theta: f64,
    m: i64,
    n: i64,
    trials: usize,
    seed: u64,
    cfg: &ProbeConfig,
    policy: &TruncationPolicy,
) -> Result<ProbeSummary> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let base = TorusElement::monomial(theta, m, n, Complex64::new(1.0, 0.0))?;
    let results: Result<Vec<ProbeTrial>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(
                seed.wrapping_add(trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
            );
            let h = random_self_adjoint(theta, cfg.radius, cfg.rho, &mut rng)?;
            let rot = exp_element(
                &h.scale(Complex64::new(0.0, cfg.magnitude)),
                policy,
                cfg.flow.exp_tol,
            )?;
            let start = base.twisted_mul(&rot, policy)?;
            let trace = gradient_flow(&start, cfg.steps, &cfg.flow, policy)?;
            let last = trace.steps.last().expect("flow records at least one step");
            Ok(ProbeTrial {
                trial,
                terminal_energy: last.energy,
                terminal_grad_norm: last.grad_norm_l2,
                distance_to_monomial: distance_to_monomial(&trace.terminal, m, n),
                verdict: trace.verdict,
                flow_steps: trace.steps.len(),
            })
        })
        .collect();
    let trials_vec = results?;
    let converged = trials_vec
        .iter()
        .filter(|t| t.distance_to_monomial < cfg.distance_tol)
        .count();
    Ok(ProbeSummary {
        m,
        n,
        monomial_energy: 2.0 * PI * PI * ((m * m + n * n) as f64),
        converged_to_conjectured_minimum: converged,
        elsewhere: trials_vec.len() - converged,
        trials: trials_vec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const THETA: f64 = 0.618_033_988_749_894_9;

    fn monomial(m: i64, n: i64) -> TorusElement {
        TorusElement::monomial(THETA, m, n, Complex64::new(1.0, 0.0)).unwrap()
    }

    fn policy() -> TruncationPolicy {
        TruncationPolicy::grow_exact(12).with_tail_tol(1.0)
    }

    fn perturbed_u_radius(magnitude: f64, seed: u64, radius: i64) -> TorusElement {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_self_adjoint(THETA, radius, 0.5, &mut rng).unwrap();
        let rot =
            exp_element(&h.scale(Complex64::new(0.0, magnitude)), &policy(), 1e-13).unwrap();
        monomial(1, 0).twisted_mul(&rot, &policy()).unwrap()
    }

    fn perturbed_u(magnitude: f64, seed: u64) -> TorusElement {
        perturbed_u_radius(magnitude, seed, 2)
    }

    #[test]
    fn monomials_are_harmonic_to_machine_zero() {
        for m in -3..=3i64 {
            for n in -3..=3i64 {
                let r = el_residual(&monomial(m, n), &policy(), 1e-6).unwrap();
                assert!(r.l2_norm() < 1e-12, "({m},{n}): {}", r.l2_norm());
            }
        }
        assert!(el_residual(&TorusElement::identity(THETA).unwrap(), &policy(), 1e-6)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn energy_unitary_examples() {
        for (m, n) in [(1i64, 0i64), (2, -1), (3, 3)] {
            let expect = 2.0 * PI * PI * ((m * m + n * n) as f64);
            assert_abs_diff_eq!(
                energy_unitary(&monomial(m, n)),
                expect,
                epsilon = 1e-12 * expect
            );
        }
        assert_eq!(energy_unitary(&TorusElement::identity(THETA).unwrap()), 0.0);
        // scalar gauge invariance
        let u = perturbed_u(0.1, 3);
        let lam = Complex64::from_polar(1.0, 0.9);
        assert_abs_diff_eq!(
            energy_unitary(&u.scale(lam)),
            energy_unitary(&u),
            epsilon = 1e-11 * energy_unitary(&u)
        );
    }

    #[test]
    fn residual_is_skew_adjoint_for_unitaries() {
        let wide = TruncationPolicy::grow_exact(16).with_tail_tol(1.0);
        let (u, defect) = polar_correct(perturbed_u(0.1, 4), &wide).unwrap();
        assert!(defect < 1e-11, "unitarity defect {defect}");
        let r = el_residual(&u, &wide, 1e-6).unwrap();
        let skew = r.add(&r.adjoint()).unwrap().l2_norm();
        assert!(skew < 1e-10, "skew defect {skew}");
    }

    #[test]
    fn leibniz_and_direct_forms_agree() {
        let u = perturbed_u(0.15, 5);
        let a = el_residual(&u, &policy(), 1e-4).unwrap();
        let b = el_residual_direct(&u, &policy()).unwrap();
        let gap = a.sub(&b).unwrap().l2_norm();
        assert!(gap < 1e-11 * (1.0 + a.l2_norm()), "gap {gap}");
    }

    #[test]
    fn defect_ceiling_is_enforced() {
        let too_big = monomial(1, 0).scale_re(3.0);
        assert!(matches!(
            el_residual(&too_big, &policy(), 1e-6),
            Err(Error::UnitarityDefect { .. })
        ));
        assert!(matches!(
            gradient_flow(&too_big, 5, &FlowConfig::default(), &policy()),
            Err(Error::UnitarityDefect { .. })
        ));
    }

    #[test]
    fn flow_from_monomial_is_a_no_op() {
        let trace =
            gradient_flow(&monomial(2, 1), 50, &FlowConfig::default(), &policy()).unwrap();
        assert_eq!(trace.verdict, FlowVerdict::Converged);
        assert_eq!(trace.steps.len(), 1);
        let expect = 2.0 * PI * PI * 5.0;
        assert_abs_diff_eq!(trace.steps[0].energy, expect, epsilon = 1e-10);
    }

    #[test]
    fn flow_descends_to_monomial_energy() {
        let start = perturbed_u_radius(0.05, 6, 1);
        let cfg = FlowConfig {
            grad_tol: 2e-5,
            step_init: 1e-3,
            ..FlowConfig::default()
        };
        let trace = gradient_flow(&start, 400, &cfg, &policy()).unwrap();
        // energy is non-increasing across accepted steps
        for w in trace.steps.windows(2) {
            assert!(w[1].energy <= w[0].energy + 1e-12);
        }
        let e_final = trace.steps.last().unwrap().energy;
        let expect = 2.0 * PI * PI;
        assert!(
            (e_final - expect).abs() < 1e-6,
            "terminal energy {e_final} vs {expect} ({:?}, {} steps)",
            trace.verdict,
            trace.steps.len()
        );
        // terminal point is a scalar multiple of U
        assert!(distance_to_monomial(&trace.terminal, 1, 0) < 1e-2);
    }

    #[test]
    fn flow_descent_direction_matches_finite_differences() {
        let u = perturbed_u(0.1, 7);
        let r = el_residual(&u, &policy(), 1e-4).unwrap();
        let grad_sq = r.l2_norm().powi(2);
        let h = r.scale(Complex64::new(0.0, -1.0)).symmetrize().unwrap();
        let e_at = |eps: f64| -> f64 {
            let rot =
                exp_element(&h.scale(Complex64::new(0.0, eps)), &policy(), 1e-13).unwrap();
            energy_unitary(&u.twisted_mul(&rot, &policy()).unwrap())
        };
        let eps = 1e-5;
        let fd = (e_at(eps) - e_at(-eps)) / (2.0 * eps);
        assert_abs_diff_eq!(fd, -grad_sq, epsilon = 1e-4 * grad_sq.max(1e-6));
    }

    #[test]
    fn second_variation_examples() {
        // constant h: both sides vanish
        let c = TorusElement::scalar(THETA, Complex64::new(0.4, 0.0)).unwrap();
        let (lhs, rhs) = second_variation_check(1, 1, &c, 1e-2, &policy(), 1e-13).unwrap();
        assert_eq!(rhs, 0.0);
        assert!(lhs.abs() < 1e-6, "lhs {lhs}");

        // h = U + U*: E(h) = 4π²
        let h = monomial(1, 0).add(&monomial(1, 0).adjoint()).unwrap();
        let (lhs, rhs) = second_variation_check(1, 1, &h, 1e-3, &policy(), 1e-13).unwrap();
        assert_abs_diff_eq!(rhs, 4.0 * PI * PI, epsilon = 1e-10);
        assert!((lhs - rhs).abs() / rhs < 1e-2, "lhs {lhs} rhs {rhs}");

        // halving t roughly halves the defect (generic direction)
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let g = random_self_adjoint(THETA, 2, 0.5, &mut rng).unwrap();
        let d = |t: f64| {
            let (l, r) = second_variation_check(1, 1, &g, t, &policy(), 1e-13).unwrap();
            (l - r).abs()
        };
        let ratio = d(2e-2) / d(1e-2);
        assert!(ratio > 1.4, "ratio {ratio}");
        assert!(d(1e-2) / (4.0 * PI * PI) < 1e-2);
    }

    #[test]
    fn probe_with_zero_magnitude_stays_put() {
        let cfg = ProbeConfig {
            magnitude: 0.0,
            steps: 10,
            ..ProbeConfig::default()
        };
        let summary = conjecture_probe(THETA, 1, 0, 3, 11, &cfg, &policy()).unwrap();
        assert_eq!(summary.converged_to_conjectured_minimum, 3);
        for t in &summary.trials {
            assert!(t.distance_to_monomial < 1e-12);
            assert_abs_diff_eq!(t.terminal_energy, 2.0 * PI * PI, epsilon = 1e-10);
        }
    }

    #[test]
    fn probe_small_perturbations_return_to_monomial() {
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
        let summary = conjecture_probe(THETA, 1, 0, 2, 19, &cfg, &policy()).unwrap();
        assert_eq!(
            summary.converged_to_conjectured_minimum, 2,
            "{:#?}",
            summary.trials
        );
        for t in &summary.trials {
            assert!((t.terminal_energy - 2.0 * PI * PI).abs() < 1e-4);
        }
    }

    #[test]
    fn flow_trajectory_invariant_under_scalar_gauge() {
        let u0 = perturbed_u(0.1, 31);
        let lam = Complex64::from_polar(1.0, 1.234);
        let cfg = FlowConfig::default();
        let a = gradient_flow(&u0, 12, &cfg, &policy()).unwrap();
        let b = gradient_flow(&u0.scale(lam), 12, &cfg, &policy()).unwrap();
        assert_eq!(a.steps.len(), b.steps.len());
        for (x, y) in a.steps.iter().zip(&b.steps) {
            assert!((x.energy - y.energy).abs() < 1e-9 * (1.0 + x.energy));
            assert!((x.grad_norm_l2 - y.grad_norm_l2).abs() < 1e-8 * (1.0 + x.grad_norm_l2));
        }
        // terminal points agree up to the global scalar
        let realigned = b.terminal.scale(lam.conj());
        assert!(realigned.sub(&a.terminal).unwrap().l2_norm() < 1e-7);
    }

    #[test]
    fn probe_identity_component_flows_to_scalars() {
        let cfg = ProbeConfig {
            magnitude: 0.05,
            radius: 1,
            steps: 400,
            distance_tol: 5e-2,
            flow: FlowConfig {
                grad_tol: 1e-6,
                ..FlowConfig::default()
            },
            ..ProbeConfig::default()
        };
        let summary = conjecture_probe(THETA, 0, 0, 2, 23, &cfg, &policy()).unwrap();
        for t in &summary.trials {
            assert!(t.terminal_energy < 1e-5, "energy {}", t.terminal_energy);
            assert!(t.distance_to_monomial < 5e-2);
        }
    }
}
