//! Solvers and certificates for the Liouville-type equations
//! `Δu = μeᵘ − λ𝟙` and `Δu = μeᵘ − a`.
//!
//! Existence comes from walking the homotopy
//!
//! ```text
//! Δu = (1−t)u + t eᵘ − a,   0 ≤ t ≤ 1,
//! ```
//!
//! whose `t = 0` member is solved exactly by `(−Δ+1)⁻¹a`. Each step is a
//! damped fixed-point iteration of `u ← (−Δ+1)⁻¹(a + tu − teᵘ)` warm-started
//! from the previous step, with a Newton polish at `t = 1` using the
//! linearization `Δ − μ·dexp(u)[·] − (1−t)` behind a `(−Δ+1)⁻¹`
//! preconditioner. The report carries the trace-conservation identity
//! `τ(eᵘ) = τ(a)/μ` and the spectral a priori check
//! `−ln‖a⁻¹‖ ≤ u ≤ ‖a‖`, both of which a genuine solution must satisfy.
//!
//! The scalar problem `Δu = μeᵘ − λ𝟙` stays scalar along the whole path and
//! converges to the closed-form solution `ln(λ/μ)·𝟙`, which makes it the
//! sharpest end-to-end test of the machinery.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::calculus::{dexp, exp_element};
use crate::element::{TorusElement, TruncationPolicy};
use crate::error::Error;
use crate::linear::solve_helmholtz;
use crate::representation::{approximant_with_q_at_least, representation_slack, spectral_bounds};
use crate::Result;

/// Spectral-evidence settings used by the solver preconditions and reports.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectralCheckConfig {
    /// Smallest representation denominator to certify with.
    pub min_q: i64,
    /// Phase-grid resolution per axis.
    pub grid: usize,
}

impl Default for SpectralCheckConfig {
    fn default() -> Self {
        Self { min_q: 89, grid: 8 }
    }
}

/// Continuation and refinement parameters for the homotopy walk.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContinuationConfig {
    /// Uniform partition count of the homotopy interval [0,1].
    pub t_steps: usize,
    /// PDE residual (ℓ²) target of the inner fixed-point iteration.
    pub inner_tol: f64,
    pub inner_max_iter: usize,
    /// PDE residual target of the Newton polish at t = 1.
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Damping of the fixed-point map, in (0, 1].
    pub damping: f64,
    /// ℓ¹ remainder tolerance handed to the exponential.
    pub exp_tol: f64,
    pub spectral: SpectralCheckConfig,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self {
            t_steps: 10,
            inner_tol: 1e-10,
            inner_max_iter: 400,
            newton_tol: 1e-10,
            newton_max_iter: 25,
            damping: 0.5,
            exp_tol: 1e-13,
            spectral: SpectralCheckConfig::default(),
        }
    }
}

impl ContinuationConfig {
    fn validate(&self) -> Result<()> {
        if self.t_steps == 0 {
            return Err(Error::InvalidParameter("t_steps must be >= 1".into()));
        }
        for (name, v) in [
            ("inner_tol", self.inner_tol),
            ("newton_tol", self.newton_tol),
            ("exp_tol", self.exp_tol),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be > 0, got {v}"
                )));
            }
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "damping must be in (0,1], got {}",
                self.damping
            )));
        }
        Ok(())
    }
}

/// One accepted continuation step: homotopy parameter, inner iterations
/// spent, terminal PDE residual, and the Lagrangian value at the iterate.
#[derive(Debug, Clone, Serialize)]
pub struct ContinuationStep {
    pub t: f64,
    pub inner_iterations: usize,
    pub residual_l2: f64,
    pub lagrangian: f64,
}

/// Convergence verdict and audit data for a Liouville solve.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    /// `residual_l2 < newton_tol + tail_mass_total`.
    pub converged: bool,
    /// ℓ² residual of `Δu − μeᵘ + a` at the returned element.
    pub residual_l2: f64,
    /// Accepted continuation path with per-step iteration counts.
    pub steps: Vec<ContinuationStep>,
    pub newton_iterations: usize,
    /// Discarded-mass ledger of the final residual evaluation.
    pub tail_mass_total: f64,
    /// `|τ(eᵘ) − τ(a)/μ|` — a conserved quantity of the equation.
    pub trace_conservation_gap: f64,
    /// Represented spectral bounds of the solution.
    pub spectral_bound_check: (f64, f64),
    /// `[−ln‖a⁻¹‖ − ln μ, ‖a‖ − ln μ]` from the represented source bounds.
    pub apriori_interval: (f64, f64),
    /// θ-vs-p/q substitution slack of the representation used.
    pub representation_slack: f64,
}

/// Dirichlet energy `E(a) = ½τ(δ₁(a)*δ₁(a) + δ₂(a)*δ₂(a))`
/// `= ½ Σ 4π²(m²+n²)|c_{m,n}|²`; zero exactly on scalars.
pub fn energy(a: &TorusElement) -> f64 {
    a.dirichlet_energy()
}

fn check_self_adjoint(u: &TorusElement, tol: f64) -> Result<()> {
    let defect = u.self_adjoint_defect();
    if defect > tol * u.l2_norm().max(1.0) {
        return Err(Error::NotSelfAdjoint { defect });
    }
    Ok(())
}

/// `τ(a·b)` by direct summation over supports (no product element built).
fn trace_product(a: &TorusElement, b: &TorusElement) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, n, ca) in a.entries() {
        let cb = b.coeff(-m, -n);
        if cb != Complex64::new(0.0, 0.0) {
            acc += ca * cb * crate::element::phase_unit(a.theta(), m * n);
        }
    }
    acc
}

/// The Lagrangian `ℒ(u) = E(u) + τ(μeᵘ − u·a)` whose critical points solve
/// `Δu = μeᵘ − a`. A scalar source `λ` is the element `λ𝟙`; the
/// symmetrized pairing `τ(a^{1/2}ua^{1/2})` equals `τ(ua)` by the trace
/// property, and `τ(ua)` is what is computed.
pub fn lagrangian(
    u: &TorusElement,
    mu: f64,
    source: &TorusElement,
    policy: &TruncationPolicy,
    tol: f64,
) -> Result<f64> {
    check_self_adjoint(u, 1e-10)?;
    let e_u = exp_element(u, policy, tol)?;
    Ok(energy(u) + mu * e_u.trace().re - trace_product(u, source).re)
}

/// Directional derivative of ℒ: `−τ(h·(Δu + a − μeᵘ))`.
pub fn lagrangian_gradient(
    u: &TorusElement,
    h: &TorusElement,
    mu: f64,
    source: &TorusElement,
    policy: &TruncationPolicy,
    tol: f64,
) -> Result<f64> {
    let e_u = exp_element(u, policy, tol)?;
    let inner = u.laplacian().add(source)?.sub(&e_u.scale_re(mu))?;
    Ok(-trace_product(h, &inner).re)
}

/// `Δw − (1−t)w − t·e_w + a`
fn homotopy_residual(
    w: &TorusElement,
    e_w: &TorusElement,
    a: &TorusElement,
    t: f64,
) -> Result<TorusElement> {
    w.laplacian()
        .sub(&w.scale_re(1.0 - t))?
        .sub(&e_w.scale_re(t))?
        .add(a)
}

struct InnerOutcome {
    w: TorusElement,
    iterations: usize,
    residual: f64,
}

/// Damped fixed-point iteration of `w ← (−Δ+1)⁻¹(a + tw − t e^w)` at fixed t.
fn fixed_point_at(
    mut w: TorusElement,
    a: &TorusElement,
    t: f64,
    cfg: &ContinuationConfig,
    policy: &TruncationPolicy,
) -> Result<Option<InnerOutcome>> {
    for it in 0..=cfg.inner_max_iter {
        let e_w = exp_element(&w, policy, cfg.exp_tol)?;
        let residual = homotopy_residual(&w, &e_w, a, t)?;
        let res_l2 = residual.l2_norm();
        if res_l2 < cfg.inner_tol {
            return Ok(Some(InnerOutcome {
                w,
                iterations: it,
                residual: res_l2,
            }));
        }
        if it == cfg.inner_max_iter {
            break;
        }
        let rhs = a.add(&w.sub(&e_w)?.scale_re(t))?;
        let mapped = solve_helmholtz(&rhs, 1.0)?;
        let mut next = w
            .scale_re(1.0 - cfg.damping)
            .add(&mapped.scale_re(cfg.damping))?
            .symmetrize()?;
        // iterates are values, not computation paths: the per-evaluation
        // discard ledger is tracked by the final audit instead
        next.set_tail_mass(0.0);
        w = next;
    }
    Ok(None)
}

/// Newton polish at t = 1: solve `(−Δ + μ·dexp_w)[h] = F` by a damped
/// `(−Δ+1)⁻¹`-preconditioned stationary iteration, then take the largest
/// residual-decreasing fraction of the step `w ← w + h`.
fn newton_refine(
    mut w: TorusElement,
    a: &TorusElement,
    cfg: &ContinuationConfig,
    policy: &TruncationPolicy,
) -> Result<(TorusElement, usize)> {
    let mut e_w = exp_element(&w, policy, cfg.exp_tol)?;
    let mut res = homotopy_residual(&w, &e_w, a, 1.0)?;
    let mut res_l2 = res.l2_norm();
    for iter in 0..cfg.newton_max_iter {
        if res_l2 < cfg.newton_tol {
            return Ok((w, iter));
        }
        // the preconditioned operator (−Δ+1)⁻¹(−Δ + dexp_w) has spectrum
        // within (0, max(1, ‖e^w‖₁)]; damp accordingly
        let omega = 1.0 / e_w.l1_norm().max(1.0);
        let mut h = solve_helmholtz(&res, 1.0)?.scale_re(omega);
        for _ in 0..16 {
            let applied = h
                .laplacian()
                .scale_re(-1.0)
                .add(&dexp(&w, &h, policy, cfg.exp_tol)?)?;
            let lin_res = res.sub(&applied)?;
            if lin_res.l2_norm() < 0.05 * cfg.newton_tol {
                break;
            }
            h = h.add(&solve_helmholtz(&lin_res, 1.0)?.scale_re(omega))?;
        }
        // residual-monotone acceptance
        let mut fraction = 1.0f64;
        let mut improved = false;
        for _ in 0..8 {
            let mut cand = w.add(&h.scale_re(fraction))?.symmetrize()?;
            cand.set_tail_mass(0.0);
            let cand_exp = exp_element(&cand, policy, cfg.exp_tol)?;
            let cand_res = homotopy_residual(&cand, &cand_exp, a, 1.0)?;
            let cand_l2 = cand_res.l2_norm();
            if cand_l2 < res_l2 {
                w = cand;
                e_w = cand_exp;
                res = cand_res;
                res_l2 = cand_l2;
                improved = true;
                break;
            }
            fraction *= 0.5;
        }
        if !improved {
            return Ok((w, iter));
        }
    }
    Ok((w, cfg.newton_max_iter))
}

/// Solve `Δu = μeᵘ − a` for positive invertible self-adjoint `a` (scalar
/// sources are radius-zero elements `λ𝟙`). Returns the solution together
/// with the convergence report; the continuation path bisects stalled
/// steps up to six times before giving up.
pub fn solve_liouville(
    a: &TorusElement,
    mu: f64,
    cfg: &ContinuationConfig,
    policy: &TruncationPolicy,
) -> Result<(TorusElement, SolveReport)> {
    cfg.validate()?;
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!("mu must be > 0, got {mu}")));
    }
    check_self_adjoint(a, 1e-10)?;
    let theta = a.theta();
    let approx = approximant_with_q_at_least(theta, cfg.spectral.min_q)?;
    let (a_min, a_max) = spectral_bounds(a, &approx, cfg.spectral.grid)?;
    if a_min <= 1e-10 * a.l1_norm().max(1.0) {
        return Err(Error::NotPositive {
            min_eigenvalue: a_min,
        });
    }
    // a priori interval −ln‖a⁻¹‖ ≤ w ≤ ‖a‖ for the μ-normalized unknown
    let apriori = (a_min.ln(), a_max);

    // normalize μ = 1 by the shift u = w − ln μ; solve Δw = e^w − a
    let mut steps: Vec<ContinuationStep> = Vec::new();
    let mut w = solve_helmholtz(a, 1.0)?.symmetrize()?;
    let mut current_t = 0.0f64;
    {
        let e_w = exp_element(&w, policy, cfg.exp_tol)?;
        let res0 = homotopy_residual(&w, &e_w, a, 0.0)?.l2_norm();
        steps.push(ContinuationStep {
            t: 0.0,
            inner_iterations: 0,
            residual_l2: res0,
            lagrangian: energy(&w) + e_w.trace().re - trace_product(&w, a).re,
        });
    }

    let mut stack: Vec<f64> = (1..=cfg.t_steps)
        .rev()
        .map(|k| k as f64 / cfg.t_steps as f64)
        .collect();
    let mut bisections = 0usize;
    while let Some(t) = stack.pop() {
        match fixed_point_at(w.clone(), a, t, cfg, policy)? {
            Some(out) => {
                w = out.w;
                current_t = t;
                bisections = 0;
                let e_w = exp_element(&w, policy, cfg.exp_tol)?;
                steps.push(ContinuationStep {
                    t,
                    inner_iterations: out.iterations,
                    residual_l2: out.residual,
                    lagrangian: energy(&w) + e_w.trace().re - trace_product(&w, a).re,
                });
            }
            None => {
                if bisections >= 6 {
                    return Err(Error::ContinuationStall {
                        t,
                        max_iter: cfg.inner_max_iter,
                        partial: steps,
                    });
                }
                bisections += 1;
                stack.push(t);
                stack.push((current_t + t) / 2.0);
            }
        }
    }

    let (w, newton_iterations) = newton_refine(w, a, cfg, policy)?;

    // undo the normalization: u = w − ln μ
    let u = w.sub(&TorusElement::scalar(theta, Complex64::new(mu.ln(), 0.0))?)?;

    // final audit against the original equation Δu = μeᵘ − a
    let mut u_clean = u.clone();
    u_clean.set_tail_mass(0.0);
    let e_u = exp_element(&u_clean, policy, cfg.exp_tol)?;
    let residual = u_clean.laplacian().sub(&e_u.scale_re(mu))?.add(a)?;
    let residual_l2 = residual.l2_norm();
    let tail_mass_total = residual.tail_mass();
    let trace_conservation_gap = (e_u.trace().re - a.trace().re / mu).abs();
    let spectral_bound_check = spectral_bounds(&u_clean, &approx, cfg.spectral.grid)?;
    let report = SolveReport {
        converged: residual_l2 < cfg.newton_tol + tail_mass_total,
        residual_l2,
        steps,
        newton_iterations,
        tail_mass_total,
        trace_conservation_gap,
        spectral_bound_check,
        apriori_interval: (apriori.0 - mu.ln(), apriori.1 - mu.ln()),
        representation_slack: representation_slack(&u_clean, &approx),
    };
    Ok((u_clean, report))
}

/// Both sides of the uniqueness identity for the scalar equation.
#[derive(Debug, Clone, Serialize)]
pub struct UniquenessGap {
    /// `−2E(v)`, always ≤ 0.
    pub lhs: f64,
    /// `τ(vΔv)`, equal to `lhs` by integration by parts.
    pub quadratic: f64,
    /// `λτ(v(eᵛ−1))`, always ≥ 0 for self-adjoint v.
    pub rhs: f64,
    /// `rhs − lhs ≥ 0`; zero exactly when `v = u1 − u2` vanishes.
    pub defect: f64,
}

/// Evaluates `−2E(v) = τ(vΔv) = λτ(v(eᵛ−1))` for `v = u1 − u2`. For two
/// true solutions of the same scalar equation every quantity vanishes,
/// certifying uniqueness.
pub fn uniqueness_gap(
    u1: &TorusElement,
    u2: &TorusElement,
    lambda: f64,
    policy: &TruncationPolicy,
    tol: f64,
) -> Result<UniquenessGap> {
    check_self_adjoint(u1, 1e-10)?;
    check_self_adjoint(u2, 1e-10)?;
    let v = u1.sub(u2)?;
    let lhs = -2.0 * energy(&v);
    let quadratic = trace_product(&v, &v.laplacian()).re;
    let e_v = exp_element(&v, policy, tol)?;
    let one = TorusElement::identity(v.theta())?;
    let rhs = lambda * trace_product(&v, &e_v.sub(&one)?).re;
    Ok(UniquenessGap {
        lhs,
        quadratic,
        rhs,
        defect: rhs - lhs,
    })
}

/// Residual floor for `Δu = −λeᵘ`: returns `τ(Δu + λeᵘ) = λτ(eᵘ)`, whose
/// magnitude is at least `|λ|e^{min σ(u)} > 0` — no self-adjoint solution
/// exists for `λ ≠ 0`.
pub fn nonexistence_certificate_scalar(
    u: &TorusElement,
    lambda: f64,
    policy: &TruncationPolicy,
    tol: f64,
) -> Result<f64> {
    if lambda == 0.0 {
        return Err(Error::InvalidParameter(
            "scalar nonexistence certificate needs lambda != 0".into(),
        ));
    }
    check_self_adjoint(u, 1e-10)?;
    let e_u = exp_element(u, policy, tol)?;
    Ok(u.laplacian().trace().re + lambda * e_u.trace().re)
}

/// Residual trace for the symmetrized equation `Δu = −½(heᵘ + eᵘh)`:
/// returns `τ(Δu + ½(heᵘ+eᵘh)) = τ(heᵘ)`, nonzero unless `h = 0`.
/// Requires sign-definite self-adjoint `h`, certified by represented
/// spectral bounds.
pub fn nonexistence_certificate_symmetrized(
    u: &TorusElement,
    h: &TorusElement,
    cfg: &SpectralCheckConfig,
    policy: &TruncationPolicy,
    tol: f64,
) -> Result<f64> {
    check_self_adjoint(u, 1e-10)?;
    check_self_adjoint(h, 1e-10)?;
    if !h.is_zero() {
        let approx = approximant_with_q_at_least(h.theta(), cfg.min_q)?;
        let (lo, hi) = spectral_bounds(h, &approx, cfg.grid)?;
        let slack = 1e-10 * h.l1_norm().max(1.0);
        if lo < -slack && hi > slack {
            return Err(Error::SignIndefinite { min: lo, max: hi });
        }
    }
    let e_u = exp_element(u, policy, tol)?;
    Ok(trace_product(h, &e_u).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_element, random_self_adjoint};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const THETA: f64 = 0.618_033_988_749_894_9;

    fn one() -> TorusElement {
        TorusElement::identity(THETA).unwrap()
    }

    fn u_gen() -> TorusElement {
        TorusElement::monomial(THETA, 1, 0, Complex64::new(1.0, 0.0)).unwrap()
    }

    fn policy() -> TruncationPolicy {
        TruncationPolicy::grow_exact(16).with_tail_tol(1e-2)
    }

    fn fast_cfg() -> ContinuationConfig {
        ContinuationConfig {
            t_steps: 8,
            inner_tol: 1e-10,
            inner_max_iter: 300,
            newton_tol: 1e-10,
            newton_max_iter: 12,
            damping: 0.5,
            exp_tol: 1e-13,
            spectral: SpectralCheckConfig { min_q: 34, grid: 4 },
        }
    }

    #[test]
    fn energy_examples() {
        assert_eq!(energy(&one()), 0.0);
        for (m, n) in [(1i64, 0i64), (2, 3), (-8, 8)] {
            let w = TorusElement::monomial(THETA, m, n, Complex64::new(1.0, 0.0)).unwrap();
            let expect =
                2.0 * std::f64::consts::PI * std::f64::consts::PI * ((m * m + n * n) as f64);
            assert_abs_diff_eq!(energy(&w), expect, epsilon = 1e-12 * expect.max(1.0));
        }
        // E(a) = 0 exactly when a is scalar
        assert_eq!(energy(&one().scale_re(3.7)), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let a = random_element(THETA, 3, 0.5, &mut rng).unwrap();
        assert!(energy(&a) > 0.0);
    }

    #[test]
    fn energy_matches_trace_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let a = random_element(THETA, 3, 0.5, &mut rng).unwrap();
        let wide = TruncationPolicy::grow_exact(16);
        let mut total = 0.0;
        for j in [1u8, 2] {
            let d = a.derive(j);
            total += d.adjoint().twisted_mul(&d, &wide).unwrap().trace().re;
        }
        let oracle = 0.5 * total;
        assert_abs_diff_eq!(energy(&a), oracle, epsilon = 1e-11 * oracle.max(1.0));
    }

    #[test]
    fn lagrangian_scalar_profile() {
        let (lambda, mu) = (2.0f64, 1.0f64);
        let source = one().scale_re(lambda);
        let lag =
            |t: f64| lagrangian(&one().scale_re(t), mu, &source, &policy(), 1e-13).unwrap();
        let t0 = (lambda / mu).ln();
        for t in [-0.5, 0.3, t0, 1.2] {
            assert_abs_diff_eq!(lag(t), mu * t.exp() - lambda * t, epsilon = 1e-11);
        }
        assert!(lag(t0) < lag(t0 + 0.1));
        assert!(lag(t0) < lag(t0 - 0.1));
    }

    #[test]
    fn lagrangian_lower_bound() {
        // μ = 1: ℒ(u) ≥ λ(1 − ln λ)
        let lambda = 2.5f64;
        let source = one().scale_re(lambda);
        let floor = lambda * (1.0 - lambda.ln());
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        for _ in 0..5 {
            let u = random_self_adjoint(THETA, 2, 0.5, &mut rng).unwrap();
            let l = lagrangian(&u, 1.0, &source, &policy(), 1e-12).unwrap();
            assert!(l >= floor - 1e-8, "{l} < {floor}");
        }
        assert!(lagrangian(&u_gen(), 1.0, &source, &policy(), 1e-12).is_err());
    }

    #[test]
    fn lagrangian_gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let u = random_self_adjoint(THETA, 2, 0.5, &mut rng).unwrap();
        let h = random_self_adjoint(THETA, 2, 0.5, &mut rng).unwrap();
        let source = one().scale_re(1.5);
        let mu = 1.0;
        let exact = lagrangian_gradient(&u, &h, mu, &source, &policy(), 1e-13).unwrap();
        let mut errs = Vec::new();
        for eps in [1e-2f64, 5e-3] {
            let plus =
                lagrangian(&u.add(&h.scale_re(eps)).unwrap(), mu, &source, &policy(), 1e-13)
                    .unwrap();
            let minus =
                lagrangian(&u.sub(&h.scale_re(eps)).unwrap(), mu, &source, &policy(), 1e-13)
                    .unwrap();
            errs.push(((plus - minus) / (2.0 * eps) - exact).abs());
        }
        let order = (errs[0] / errs[1]).log2();
        assert!(order > 1.8, "observed order {order}");
    }

    #[test]
    fn solve_scalar_source_recovers_logarithm() {
        // a = e·𝟙, μ = 1 → u = 𝟙
        let e_scalar = one().scale_re(std::f64::consts::E);
        let (u, report) = solve_liouville(&e_scalar, 1.0, &fast_cfg(), &policy()).unwrap();
        assert!(report.converged);
        assert!(u.sub(&one()).unwrap().l1_norm() < 1e-8);
        // a = λ𝟙, general μ → ln(λ/μ)𝟙
        let (lambda, mu) = (3.5f64, 2.0f64);
        let (u, report) =
            solve_liouville(&one().scale_re(lambda), mu, &fast_cfg(), &policy()).unwrap();
        assert!(report.converged);
        let expected = one().scale_re((lambda / mu).ln());
        assert!(u.sub(&expected).unwrap().l1_norm() < 1e-8);
        assert!(report.trace_conservation_gap < 1e-8);
    }

    #[test]
    fn solve_element_source_conserves_trace_and_bounds() {
        let h = u_gen().add(&u_gen().adjoint()).unwrap();
        let a = one().scale_re(2.0).add(&h.scale_re(0.5)).unwrap();
        let (u, report) = solve_liouville(&a, 1.0, &fast_cfg(), &policy()).unwrap();
        assert!(report.converged, "residual {}", report.residual_l2);
        assert!(report.residual_l2 < 1e-8);
        assert!(
            report.trace_conservation_gap < 1e-6,
            "gap {}",
            report.trace_conservation_gap
        );
        let (lo, hi) = report.spectral_bound_check;
        let (alo, ahi) = report.apriori_interval;
        let slack = 10.0 * report.residual_l2 + 0.01;
        assert!(lo >= alo - slack, "{lo} < {alo}");
        assert!(hi <= ahi + slack, "{hi} > {ahi}");
        assert!(u.self_adjoint_defect() < 1e-10);
    }

    #[test]
    fn solve_rejects_bad_sources() {
        // not self-adjoint
        assert!(matches!(
            solve_liouville(&u_gen(), 1.0, &fast_cfg(), &policy()),
            Err(Error::NotSelfAdjoint { .. })
        ));
        // self-adjoint but not positive
        let h = u_gen().add(&u_gen().adjoint()).unwrap();
        assert!(matches!(
            solve_liouville(&h, 1.0, &fast_cfg(), &policy()),
            Err(Error::NotPositive { .. })
        ));
        // bad mu
        assert!(solve_liouville(&one(), 0.0, &fast_cfg(), &policy()).is_err());
    }

    #[test]
    fn solve_stall_reports_partial_path() {
        let h = u_gen().add(&u_gen().adjoint()).unwrap();
        let a = one().scale_re(2.0).add(&h.scale_re(0.5)).unwrap();
        let mut cfg = fast_cfg();
        cfg.inner_max_iter = 1;
        cfg.t_steps = 2;
        match solve_liouville(&a, 1.0, &cfg, &policy()) {
            Err(Error::ContinuationStall { partial, .. }) => {
                assert!(!partial.is_empty());
            }
            other => panic!("expected stall, got {other:?}"),
        }
    }

    #[test]
    fn uniqueness_gap_examples() {
        let zero_gap = uniqueness_gap(&one(), &one(), 2.0, &policy(), 1e-13).unwrap();
        assert_eq!(zero_gap.lhs, 0.0);
        assert_eq!(zero_gap.rhs, 0.0);
        assert_eq!(zero_gap.defect, 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(54);
        for _ in 0..4 {
            let v = random_self_adjoint(THETA, 2, 0.5, &mut rng).unwrap();
            let g =
                uniqueness_gap(&v, &TorusElement::zero(THETA).unwrap(), 1.7, &policy(), 1e-13)
                    .unwrap();
            assert!(g.lhs <= 0.0);
            assert!(g.rhs >= -1e-12);
            assert!(g.defect >= -1e-12);
            // −2E(v) = τ(vΔv) by integration by parts
            let scale = g.lhs.abs().max(1.0);
            assert!(
                (g.lhs - g.quadratic).abs() < 1e-11 * scale,
                "{} vs {}",
                g.lhs,
                g.quadratic
            );
        }
    }

    #[test]
    fn nonexistence_scalar_examples() {
        let z = TorusElement::zero(THETA).unwrap();
        let cert = nonexistence_certificate_scalar(&z, 1.0, &policy(), 1e-13).unwrap();
        assert_abs_diff_eq!(cert, 1.0, epsilon = 1e-12);
        assert!(nonexistence_certificate_scalar(&z, 0.0, &policy(), 1e-13).is_err());

        // u with represented spectrum inside [−1,1], λ = 2: floor 2e^{−1}
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let raw = random_self_adjoint(THETA, 3, 0.5, &mut rng).unwrap();
        let approx = approximant_with_q_at_least(THETA, 34).unwrap();
        let (lo, hi) = spectral_bounds(&raw, &approx, 4).unwrap();
        let u = raw.scale_re(0.98 / lo.abs().max(hi.abs()));
        let cert = nonexistence_certificate_scalar(&u, 2.0, &policy(), 1e-13).unwrap();
        assert!(cert >= 2.0 * (-1.0f64).exp() - 1e-6, "{cert}");
    }

    #[test]
    fn nonexistence_symmetrized_examples() {
        let z = TorusElement::zero(THETA).unwrap();
        let spectral = SpectralCheckConfig { min_q: 34, grid: 4 };
        let cert =
            nonexistence_certificate_symmetrized(&z, &z, &spectral, &policy(), 1e-13).unwrap();
        assert_eq!(cert, 0.0);
        let cert =
            nonexistence_certificate_symmetrized(&z, &one(), &spectral, &policy(), 1e-13)
                .unwrap();
        assert_abs_diff_eq!(cert, 1.0, epsilon = 1e-12);
        // sign-indefinite h rejected
        let h = u_gen().add(&u_gen().adjoint()).unwrap();
        assert!(matches!(
            nonexistence_certificate_symmetrized(&z, &h, &spectral, &policy(), 1e-13),
            Err(Error::SignIndefinite { .. })
        ));
    }

    #[test]
    fn lagrangian_monitored_along_path() {
        // variational consistency: ℒ at the path end does not exceed the
        // t = 0 value (monitored, not asserted as a theorem)
        let h = u_gen().add(&u_gen().adjoint()).unwrap();
        let a = one().scale_re(2.0).add(&h.scale_re(0.5)).unwrap();
        let (_, report) = solve_liouville(&a, 1.0, &fast_cfg(), &policy()).unwrap();
        let last = report.steps.last().unwrap();
        assert!((last.t - 1.0).abs() < 1e-12);
        let first = report.steps.first().unwrap();
        assert!(last.lagrangian <= first.lagrangian + 1e-6);
    }
}
