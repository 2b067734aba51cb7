//! Exponentials, their directional derivatives, and inverses in the
//! truncated ℓ¹ algebra.
//!
//! All remainder control here is done in the ℓ¹ norm, which is
//! submultiplicative for the twisted product and computable exactly from
//! coefficients. Inversion follows the reduction `a⁻¹ = x⁻¹ a*` with
//! `x = a*a`, which needs only a Neumann series on a positive element.

use rayon::prelude::*;

use crate::element::{TorusElement, TruncationPolicy};
use crate::error::Error;
use crate::representation::{phase_grid, represent, RationalApproximant};
use crate::Result;

fn ensure_same_theta(a: &TorusElement, b: &TorusElement) -> Result<()> {
    if a.theta().to_bits() == b.theta().to_bits() {
        Ok(())
    } else {
        Err(Error::ThetaMismatch {
            lhs: a.theta(),
            rhs: b.theta(),
        })
    }
}

/// `Σ_{j>k} x^j/j! ≤ x^{k+1}/(k+1)! · (1 − x/(k+2))⁻¹` for `x < k+2`.
fn exp_tail_bound(x: f64, k: usize) -> f64 {
    let mut t = 1.0;
    for j in 1..=(k + 1) {
        t *= x / j as f64;
    }
    t / (1.0 - x / (k + 2) as f64)
}

/// Exponential by scaling and squaring: with `s = ⌈log₂ max(1, ‖a‖₁)⌉`,
/// the Taylor series of `a/2^s` is summed until the rigorous ℓ¹ remainder
/// drops below `tol·2^{−s}`, then squared `s` times. The series remainder
/// and any truncation discards both land in the result's tail ledger.
pub fn exp_element(a: &TorusElement, policy: &TruncationPolicy, tol: f64) -> Result<TorusElement> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be > 0, got {tol}")));
    }
    let l1 = a.l1_norm();
    let s = if l1 <= 1.0 { 0 } else { l1.log2().ceil() as i32 };
    let b = a.scale_re(0.5f64.powi(s));
    let x = b.l1_norm();
    let threshold = tol * 0.5f64.powi(s);
    let mut sum = TorusElement::identity(a.theta())?;
    let mut term = sum.clone();
    let mut k = 0usize;
    let remainder = loop {
        k += 1;
        term = term.twisted_mul(&b, policy)?.scale_re(1.0 / k as f64);
        sum = sum.add(&term)?;
        let rem = exp_tail_bound(x, k);
        if rem < threshold {
            break rem;
        }
        if k > 1000 {
            return Err(Error::InvalidParameter(format!(
                "exponential series did not reach tolerance {tol}"
            )));
        }
    };
    sum.add_tail_mass(remainder);
    let mut result = sum;
    for _ in 0..s {
        result = result.twisted_mul(&result, policy)?;
    }
    Ok(result)
}

/// Directional derivative of the exponential,
/// `dexp_u(h) = Σ_{n≥1} (1/n!) Σ_{k=0}^{n−1} u^k h u^{n−1−k}`.
///
/// Computed by scaling and squaring on the pair `(E, D)`:
/// `E ← E²`, `D ← ED + DE` doubles the base point, mirroring the block
/// identity `exp([[u,h],[0,u]]) = [[eᵘ, dexp_u(h)],[0, eᵘ]]`.
pub fn dexp(
    u: &TorusElement,
    h: &TorusElement,
    policy: &TruncationPolicy,
    tol: f64,
) -> Result<TorusElement> {
    ensure_same_theta(u, h)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be > 0, got {tol}")));
    }
    let l1 = u.l1_norm();
    let s = if l1 <= 1.0 { 0 } else { l1.log2().ceil() as i32 };
    let half = 0.5f64.powi(s);
    let b = u.scale_re(half);
    let dir = h.scale_re(half);
    let x = b.l1_norm();
    let l1h = dir.l1_norm();
    // conservative threshold: series errors are amplified by the doublings
    let threshold = tol * 0.25f64.powi(s) / (1.0 + l1h);

    let mut exp_sum = TorusElement::identity(u.theta())?;
    let mut exp_term = exp_sum.clone(); // bⁿ/n!, currently n = 0
    let mut d_sum = dir.clone(); // Σ l_n, starting at l_1 = h
    let mut d_term = dir.clone(); // l_n = T_n/n!
    let mut n = 1usize;
    loop {
        // l_{n+1} = (b·l_n + h·(bⁿ/n!)) / (n+1)
        exp_term = exp_term.twisted_mul(&b, policy)?.scale_re(1.0 / n as f64); // now bⁿ/n!
        let next_d = b
            .twisted_mul(&d_term, policy)?
            .add(&dir.twisted_mul(&exp_term, policy)?)?
            .scale_re(1.0 / (n + 1) as f64);
        exp_sum = exp_sum.add(&exp_term)?;
        d_sum = d_sum.add(&next_d)?;
        d_term = next_d;
        n += 1;
        // exp_sum covers k <= n-1 and d_sum covers l_1..l_n
        let exp_rem = exp_tail_bound(x, n - 1);
        let d_rem = l1h * exp_tail_bound(x, n - 1);
        if exp_rem < threshold && d_rem < threshold {
            exp_sum.add_tail_mass(exp_rem);
            d_sum.add_tail_mass(d_rem);
            break;
        }
        if n > 1000 {
            return Err(Error::InvalidParameter(format!(
                "dexp series did not reach tolerance {tol}"
            )));
        }
    }
    let mut e = exp_sum;
    let mut d = d_sum;
    for _ in 0..s {
        d = e.twisted_mul(&d, policy)?.add(&d.twisted_mul(&e, policy)?)?;
        e = e.twisted_mul(&e, policy)?;
    }
    Ok(d)
}

/// Everything `invert` reports alongside the inverse itself.
#[derive(Debug, Clone)]
pub struct InvertOutcome {
    pub inverse: TorusElement,
    /// `‖a·a⁻¹ − 𝟙‖₁` of the computed inverse.
    pub residual_l1: f64,
    /// Neumann series terms consumed.
    pub neumann_terms: usize,
    /// Spectral invertibility margin: min singular value of the
    /// represented element over the phase grid.
    pub min_singular_value: f64,
}

const INVERT_GRID: usize = 8;
const INVERT_MAX_TERMS: usize = 20_000;

/// Inverse via `x = a*a`, `x⁻¹ = (1/c) Σ (𝟙 − x/c)^k` with `c = ‖x‖₁`,
/// and `a⁻¹ = x⁻¹ a*`. The spectral margin over the phase grid is checked
/// first; a persistently non-contracting ℓ¹ series is reported as a
/// conditioning failure (retry with a larger `max_radius`).
pub fn invert(
    a: &TorusElement,
    approx: &RationalApproximant,
    policy: &TruncationPolicy,
    tol: f64,
) -> Result<InvertOutcome> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be > 0, got {tol}")));
    }
    let pts = phase_grid(INVERT_GRID);
    let mins: Vec<f64> = pts
        .par_iter()
        .map(|&(z1, z2)| {
            let mat = represent(a, approx, z1, z2).expect("validated inputs");
            let sv = mat.singular_values();
            sv.iter().copied().fold(f64::INFINITY, f64::min)
        })
        .collect();
    let min_singular_value = mins.into_iter().fold(f64::INFINITY, f64::min);
    let margin = 1e-10 * a.l1_norm().max(1.0);
    if !(min_singular_value > margin) {
        return Err(Error::NotInvertible { min_singular_value });
    }

    let x = a.adjoint().twisted_mul(a, policy)?;
    let c = x.l1_norm();
    let one = TorusElement::identity(a.theta())?;
    let g = one.sub(&x.scale_re(1.0 / c))?;

    let mut sum = one.clone();
    let mut term = one.clone();
    let mut terms = 0usize;
    let mut prev_l1 = 1.0f64;
    let mut slow_streak = 0usize;
    let mut recent_ratio_max = 0.0f64;
    loop {
        term = term.twisted_mul(&g, policy)?;
        terms += 1;
        let t_l1 = term.l1_norm();
        let ratio = if prev_l1 > 0.0 { t_l1 / prev_l1 } else { 0.0 };
        prev_l1 = t_l1;
        sum = sum.add(&term)?;
        recent_ratio_max = if terms % 8 == 1 {
            ratio
        } else {
            recent_ratio_max.max(ratio)
        };
        if terms > 32 && ratio >= 0.9995 {
            slow_streak += 1;
            if slow_streak > 64 {
                return Err(Error::Conditioning { ratio });
            }
        } else {
            slow_streak = 0;
        }
        let contraction = (1.0 - recent_ratio_max.min(0.999)).max(1e-3);
        if t_l1 <= tol * contraction {
            break;
        }
        if terms > INVERT_MAX_TERMS {
            return Err(Error::Conditioning { ratio });
        }
    }
    let x_inv = sum.scale_re(1.0 / c);
    let inverse = x_inv.twisted_mul(&a.adjoint(), policy)?;
    let residual_l1 = a.twisted_mul(&inverse, policy)?.sub(&one)?.l1_norm();
    Ok(InvertOutcome {
        inverse,
        residual_l1,
        neumann_terms: terms,
        min_singular_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_self_adjoint;
    use num_complex::Complex64;
    use crate::representation::approximant_with_q_at_least;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const THETA: f64 = 0.618_033_988_749_894_9;

    fn one() -> TorusElement {
        TorusElement::identity(THETA).unwrap()
    }

    fn u() -> TorusElement {
        TorusElement::monomial(THETA, 1, 0, Complex64::new(1.0, 0.0)).unwrap()
    }

    fn policy() -> TruncationPolicy {
        TruncationPolicy::grow_exact(48).with_tail_tol(1e-3)
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z = TorusElement::zero(THETA).unwrap();
        let e = exp_element(&z, &policy(), 1e-14).unwrap();
        assert!(e.sub(&one()).unwrap().l2_norm() < 1e-15);
    }

    #[test]
    fn exp_of_scalar_log_recovers_ratio() {
        let (lambda, mu) = (3.0f64, 1.7f64);
        let t0 = one().scale_re((lambda / mu).ln());
        let e = exp_element(&t0, &policy(), 1e-13).unwrap();
        assert_abs_diff_eq!(e.coeff(0, 0).re, lambda / mu, epsilon = 1e-12);
        assert!(e.coeff(0, 0).im.abs() < 1e-14);
    }

    /// Term-by-term series on the commutative subalgebra generated by U.
    fn exp_tu_oracle(t: f64, terms: usize) -> TorusElement {
        let mut entries = Vec::new();
        let mut coef = 1.0f64;
        for k in 0..terms {
            if k > 0 {
                coef *= t / k as f64;
            }
            entries.push((k as i64, 0i64, Complex64::new(coef, 0.0)));
        }
        TorusElement::from_coeffs(THETA, &entries).unwrap()
    }

    #[test]
    fn exp_of_monomial_matches_series_oracle() {
        for t in [0.7f64, 3.3] {
            let e = exp_element(&u().scale_re(t), &policy(), 1e-13).unwrap();
            let oracle = exp_tu_oracle(t, 45);
            let defect = e.sub(&oracle).unwrap().l1_norm();
            assert!(defect < 1e-11, "t={t}: defect {defect}");
        }
    }

    #[test]
    fn exp_scalar_homomorphism() {
        let (s, t) = (0.83, -1.4);
        let es = exp_element(&one().scale_re(s), &policy(), 1e-13).unwrap();
        let et = exp_element(&one().scale_re(t), &policy(), 1e-13).unwrap();
        let both = exp_element(&one().scale_re(s + t), &policy(), 1e-13).unwrap();
        let prod = es.twisted_mul(&et, &policy()).unwrap();
        assert!(prod.sub(&both).unwrap().l1_norm() < 1e-12);
    }

    #[test]
    fn exp_preserves_self_adjointness() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let h = random_self_adjoint(THETA, 3, 0.5, &mut rng).unwrap();
        let e = exp_element(&h, &policy(), 1e-12).unwrap();
        assert!(e.self_adjoint_defect() < 1e-12 * e.l2_norm().max(1.0));
    }

    #[test]
    fn dexp_at_zero_is_identity_map() {
        let z = TorusElement::zero(THETA).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let h = random_self_adjoint(THETA, 3, 0.5, &mut rng).unwrap();
        let d = dexp(&z, &h, &policy(), 1e-13).unwrap();
        assert!(d.sub(&h).unwrap().l1_norm() < 1e-13);
    }

    #[test]
    fn dexp_trace_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let u = random_self_adjoint(THETA, 3, 0.5, &mut rng).unwrap();
        let h = random_self_adjoint(THETA, 3, 0.5, &mut rng).unwrap();
        let tol = 1e-12;
        let d = dexp(&u, &h, &policy(), tol).unwrap();
        let eu = exp_element(&u, &policy(), tol).unwrap();
        let rhs = h.twisted_mul(&eu, &policy()).unwrap().trace();
        let gap = (d.trace() - rhs).norm();
        assert!(gap < 1e-10, "gap {gap}");
    }

    #[test]
    fn dexp_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let u = random_self_adjoint(THETA, 2, 0.5, &mut rng).unwrap();
        let h = random_self_adjoint(THETA, 2, 0.5, &mut rng).unwrap();
        let d = dexp(&u, &h, &policy(), 1e-13).unwrap();
        let mut defects = Vec::new();
        for eps in [1e-2, 5e-3] {
            let plus = exp_element(&u.add(&h.scale_re(eps)).unwrap(), &policy(), 1e-13).unwrap();
            let minus = exp_element(&u.sub(&h.scale_re(eps)).unwrap(), &policy(), 1e-13).unwrap();
            let fd = plus.sub(&minus).unwrap().scale_re(0.5 / eps);
            defects.push(fd.sub(&d).unwrap().l2_norm());
        }
        // O(ε²): halving ε divides the defect by about 4
        let order = (defects[0] / defects[1]).log2();
        assert!(order > 1.8, "observed order {order}");
    }

    #[test]
    fn invert_geometric_series_example() {
        let a = one().add(&u().scale_re(0.5)).unwrap();
        let approx = approximant_with_q_at_least(THETA, 34).unwrap();
        let out = invert(&a, &approx, &policy(), 1e-12).unwrap();
        assert_abs_diff_eq!(out.inverse.l1_norm(), 2.0, epsilon = 1e-10);
        assert!(out.residual_l1 < 1e-10);
        // independent geometric oracle Σ (−1/2)^k U^k
        for k in 0..10i64 {
            let expect = (-0.5f64).powi(k as i32);
            assert_abs_diff_eq!(out.inverse.coeff(k, 0).re, expect, epsilon = 1e-11);
            assert!(out.inverse.coeff(k, 0).im.abs() < 1e-12);
        }
    }

    #[test]
    fn invert_scalar_and_unitary() {
        let approx = approximant_with_q_at_least(THETA, 21).unwrap();
        let c = one().scale_re(4.0);
        let out = invert(&c, &approx, &policy(), 1e-13).unwrap();
        assert_abs_diff_eq!(out.inverse.coeff(0, 0).re, 0.25, epsilon = 1e-13);
        let out = invert(&u(), &approx, &policy(), 1e-13).unwrap();
        assert_abs_diff_eq!(out.inverse.coeff(-1, 0).re, 1.0, epsilon = 1e-13);
        assert!(out.residual_l1 < 1e-12);
    }

    #[test]
    fn invert_wiener_tail_decays_with_radius() {
        let a = one().add(&u().scale_re(0.5)).unwrap();
        let approx = approximant_with_q_at_least(THETA, 34).unwrap();
        let wide = TruncationPolicy::grow_exact(40).with_tail_tol(1e-3);
        let out = invert(&a, &approx, &wide, 1e-12).unwrap();
        let tail_outside = |r: i64| -> f64 {
            out.inverse
                .entries()
                .iter()
                .filter(|(m, n, _)| m.abs().max(n.abs()) > r)
                .map(|(_, _, c)| c.norm())
                .sum()
        };
        assert!(tail_outside(20) < 1e-5);
        assert!(tail_outside(30) < 1e-8);
        assert!(tail_outside(8) > tail_outside(16));
    }

    #[test]
    fn invert_rejects_singular_element() {
        // U + U* has 0 in its spectrum; either the margin check or the
        // stagnating Neumann series must refuse it
        let h = u().add(&u().adjoint()).unwrap();
        let approx = approximant_with_q_at_least(THETA, 89).unwrap();
        let small = TruncationPolicy::grow_exact(8).with_tail_tol(1e3);
        let err = invert(&h, &approx, &small, 1e-10).unwrap_err();
        assert!(matches!(
            err,
            Error::Conditioning { .. } | Error::NotInvertible { .. }
        ));
    }

    #[test]
    fn invert_residual_contract_on_random_perturbation() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let bump = random_self_adjoint(THETA, 2, 0.4, &mut rng).unwrap();
        let a = one()
            .scale_re(2.0)
            .add(&bump.scale_re(0.2 / bump.l1_norm().max(1.0)))
            .unwrap();
        let approx = approximant_with_q_at_least(THETA, 34).unwrap();
        let tol = 1e-11;
        let out = invert(&a, &approx, &policy(), tol).unwrap();
        assert!(
            out.residual_l1 < 10.0 * tol + out.inverse.tail_mass(),
            "residual {} vs contract {}",
            out.residual_l1,
            10.0 * tol + out.inverse.tail_mass()
        );
    }
}
