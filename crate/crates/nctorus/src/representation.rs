//! Finite clock-and-shift representations at rational approximants of θ.
//!
//! At `θ ≈ p/q` the generators map to the q×q clock matrix
//! `U ↦ z1·diag(1, ω, …, ω^{q−1})` and cyclic shift `V ↦ z2·S`,
//! `ω = e^{2πip/q}`, which satisfy `UV = ω VU` exactly. Sweeping the
//! unimodular pair `(z1, z2)` over a phase grid samples the bundle of
//! matrix algebras sitting over the rational torus; eigenvalue extrema over
//! the sweep bracket spectra, operator norms, and positivity margins.
//!
//! Elements keep their stored coefficients when represented; only the
//! phases internal to the matrix model are evaluated at `p/q`. The
//! θ-vs-p/q discrepancy this introduces scales like `|θ − p/q|` per
//! coefficient phase and is exposed via [`representation_slack`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

use crate::element::TorusElement;
use crate::error::Error;
use crate::Result;

/// Default cap on the representation dimension for dense eigensolves.
pub const DEFAULT_Q_CAP: i64 = 4096;

/// A continued-fraction convergent `p/q` of θ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RationalApproximant {
    pub p: i64,
    pub q: i64,
    /// Continued-fraction depth at which this convergent appeared.
    pub depth: usize,
}

impl RationalApproximant {
    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

/// The first `depth` continued-fraction convergents of `theta ∈ (0,1)`,
/// skipping the trivial zeroth convergent `0/1`. For a θ that is rational
/// at machine precision the expansion terminates early with the exact
/// fraction as the last entry.
pub fn convergents(theta: f64, depth: usize) -> Result<Vec<RationalApproximant>> {
    if !(theta.is_finite() && theta > 0.0 && theta < 1.0) {
        return Err(Error::ThetaOutOfRange(theta));
    }
    let mut out = Vec::with_capacity(depth);
    // p_k = a_k p_{k-1} + p_{k-2}, likewise for q
    let (mut p_prev, mut p_curr) = (1i64, 0i64);
    let (mut q_prev, mut q_curr) = (0i64, 1i64);
    let mut x = theta;
    let mut k = 0usize;
    while out.len() < depth {
        k += 1;
        let inv = 1.0 / x;
        if !inv.is_finite() || q_curr > (1i64 << 31) {
            break;
        }
        let a = inv.floor();
        let rem = inv - a;
        let a = a as i64;
        let p_next = a * p_curr + p_prev;
        let q_next = a * q_curr + q_prev;
        p_prev = p_curr;
        p_curr = p_next;
        q_prev = q_curr;
        q_curr = q_next;
        out.push(RationalApproximant {
            p: p_curr,
            q: q_curr,
            depth: k,
        });
        if rem < 1e-12 {
            break;
        }
        x = rem;
    }
    Ok(out)
}

/// First convergent with denominator at least `min_q`.
pub fn approximant_with_q_at_least(theta: f64, min_q: i64) -> Result<RationalApproximant> {
    for depth in 1..64 {
        let list = convergents(theta, depth)?;
        if let Some(last) = list.last() {
            if last.q >= min_q {
                return Ok(*last);
            }
            if list.len() < depth {
                // expansion terminated (rational θ); take the exact fraction
                return Ok(*last);
            }
        }
    }
    Err(Error::InvalidParameter(format!(
        "no convergent of {theta} reaches q >= {min_q}"
    )))
}

/// Uniform `g × g` grid of unimodular phase pairs on the torus.
pub fn phase_grid(g: usize) -> Vec<(Complex64, Complex64)> {
    let mut pts = Vec::with_capacity(g * g);
    for j in 0..g {
        for k in 0..g {
            pts.push((
                Complex64::from_polar(1.0, TAU * j as f64 / g as f64),
                Complex64::from_polar(1.0, TAU * k as f64 / g as f64),
            ));
        }
    }
    pts
}

fn roots_of_unity(q: i64) -> Vec<Complex64> {
    (0..q)
        .map(|t| Complex64::from_polar(1.0, TAU * t as f64 / q as f64))
        .collect()
}

/// `z1 · diag(1, ω, ω², …)` with `ω = e^{2πip/q}`.
pub fn clock_matrix(approx: &RationalApproximant, z1: Complex64) -> DMatrix<Complex64> {
    let q = approx.q;
    let roots = roots_of_unity(q);
    DMatrix::from_fn(q as usize, q as usize, |j, k| {
        if j == k {
            z1 * roots[((j as i64 * approx.p).rem_euclid(q)) as usize]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `z2 ·` cyclic shift, chosen so `UV = e^{2πip/q} VU` holds exactly.
pub fn shift_matrix(approx: &RationalApproximant, z2: Complex64) -> DMatrix<Complex64> {
    let q = approx.q as usize;
    DMatrix::from_fn(q, q, |j, k| {
        if j == (k + 1) % q {
            z2
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `Σ c_{m,n} (z1 U_q)^m (z2 V_q)^n` in the normal ordering of the twisted
/// product. Entry pattern of `U^m V^n`: column `k` holds `ω^{jm}` at row
/// `j = (k+n) mod q`.
pub fn represent(
    a: &TorusElement,
    approx: &RationalApproximant,
    z1: Complex64,
    z2: Complex64,
) -> Result<DMatrix<Complex64>> {
    let q = approx.q;
    if q > DEFAULT_Q_CAP {
        return Err(Error::RepresentationTooLarge {
            q,
            cap: DEFAULT_Q_CAP,
        });
    }
    for z in [z1, z2] {
        if (z.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnimodular(z.norm()));
        }
    }
    let (a1, a2) = (z1.arg(), z2.arg());
    let roots = roots_of_unity(q);
    let mut mat = DMatrix::from_element(q as usize, q as usize, Complex64::new(0.0, 0.0));
    for (m, n, c) in a.entries() {
        let scale = c * Complex64::from_polar(1.0, m as f64 * a1 + n as f64 * a2);
        for k in 0..q {
            let j = (k + n).rem_euclid(q);
            let e = (j * m * approx.p).rem_euclid(q);
            mat[(j as usize, k as usize)] += scale * roots[e as usize];
        }
    }
    Ok(mat)
}

/// Heuristic size of the θ-vs-p/q phase substitution: `|θ − p/q|` times the
/// number of represented coefficients.
pub fn representation_slack(a: &TorusElement, approx: &RationalApproximant) -> f64 {
    (a.theta() - approx.value()).abs() * a.entries().len() as f64
}

fn hermitian_part(mat: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (mat + mat.adjoint()).scale(0.5)
}

fn check_self_adjoint(h: &TorusElement) -> Result<()> {
    let defect = h.self_adjoint_defect();
    if defect > 1e-12 * h.l2_norm().max(1.0) {
        return Err(Error::NotSelfAdjoint { defect });
    }
    Ok(())
}

fn sorted_eigenvalues(mat: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitian_part(mat)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Smallest interval containing all eigenvalues of the represented element
/// over the `grid × grid` phase sweep — a finite-dimensional bracket for
/// the spectrum of a self-adjoint element.
pub fn spectral_bounds(
    h: &TorusElement,
    approx: &RationalApproximant,
    grid: usize,
) -> Result<(f64, f64)> {
    check_self_adjoint(h)?;
    let pts = phase_grid(grid);
    let extrema: Vec<(f64, f64)> = pts
        .par_iter()
        .map(|&(z1, z2)| {
            let ev = sorted_eigenvalues(&represent(h, approx, z1, z2).expect("validated inputs"));
            (ev[0], ev[ev.len() - 1])
        })
        .collect();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (a, b) in extrema {
        lo = lo.min(a);
        hi = hi.max(b);
    }
    Ok((lo, hi))
}

/// Result of the vector-state Maximum Principle check.
#[derive(Debug, Clone, Serialize)]
pub struct MaxStateCheck {
    /// Largest vector-state value of `h` over the sweep (`φ(h) = t₁`).
    pub phi_h: f64,
    /// The same state applied to `Δh`; the Maximum Principle predicts ≤ 0
    /// up to finite-q slack.
    pub phi_lap_h: f64,
    /// Set when the top eigenspace was degenerate; `phi_lap_h` is then the
    /// max over an orthonormal basis of that eigenspace.
    pub degenerate: bool,
    pub z1_angle: f64,
    pub z2_angle: f64,
}

/// Finds the phase point and top eigenvector `v` maximizing `⟨v, rep(h)v⟩`,
/// then evaluates `⟨v, rep(Δh)v⟩` in the same representation.
pub fn max_state_check(
    h: &TorusElement,
    approx: &RationalApproximant,
    grid: usize,
) -> Result<MaxStateCheck> {
    check_self_adjoint(h)?;
    let lap = h.laplacian();
    let pts = phase_grid(grid);
    // eigenvalue-only sweep first; eigenvectors only at the winner
    let tops: Vec<f64> = pts
        .par_iter()
        .map(|&(z1, z2)| {
            let ev = sorted_eigenvalues(&represent(h, approx, z1, z2).expect("validated inputs"));
            ev[ev.len() - 1]
        })
        .collect();
    let (best, _) = tops
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .expect("grid is nonempty");
    let (z1, z2) = pts[best];
    let mat = hermitian_part(&represent(h, approx, z1, z2)?);
    let eig = nalgebra::SymmetricEigen::new(mat);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let top_index = *order.last().unwrap();
    let phi_h = eig.eigenvalues[top_index];
    let degeneracy_tol = 1e-8 * (1.0 + phi_h.abs());
    let lap_mat = hermitian_part(&represent(&lap, approx, z1, z2)?);
    let mut phi_lap_h = f64::NEG_INFINITY;
    let mut count = 0usize;
    for &i in order.iter().rev() {
        if (phi_h - eig.eigenvalues[i]).abs() > degeneracy_tol {
            break;
        }
        let v: DVector<Complex64> = eig.eigenvectors.column(i).into();
        let value = v.dotc(&(&lap_mat * &v)).re;
        phi_lap_h = phi_lap_h.max(value);
        count += 1;
    }
    Ok(MaxStateCheck {
        phi_h,
        phi_lap_h,
        degenerate: count > 1,
        z1_angle: z1.arg(),
        z2_angle: z2.arg(),
    })
}

/// Bracket for the operator norm: the largest represented singular value
/// from below, the ℓ¹ norm of the coefficients from above.
pub fn opnorm_bracket(
    a: &TorusElement,
    approx: &RationalApproximant,
    grid: usize,
) -> Result<(f64, f64)> {
    let pts = phase_grid(grid);
    let tops: Vec<f64> = pts
        .par_iter()
        .map(|&(z1, z2)| {
            let mat = represent(a, approx, z1, z2).expect("validated inputs");
            let gram = mat.adjoint() * &mat;
            let ev = sorted_eigenvalues(&gram);
            ev[ev.len() - 1].max(0.0).sqrt()
        })
        .collect();
    let lower = tops.into_iter().fold(0.0f64, f64::max);
    Ok((lower, a.l1_norm()))
}

/// Minimum represented eigenvalue over the phase sweep: positivity evidence
/// for `h ≥ 0` claims, and an invertibility margin `1/‖h⁻¹‖` when positive.
pub fn positive_part_bounds(
    h: &TorusElement,
    approx: &RationalApproximant,
    grid: usize,
) -> Result<f64> {
    Ok(spectral_bounds(h, approx, grid)?.0)
}

/// One spectral CSV row: `q, p, z1_angle, z2_angle, eigenvalue_index, eigenvalue`.
#[derive(Debug, Clone, Serialize)]
pub struct SpectraRow {
    pub q: i64,
    pub p: i64,
    pub z1_angle: f64,
    pub z2_angle: f64,
    pub eigenvalue_index: usize,
    pub eigenvalue: f64,
}

/// All represented eigenvalues over the sweep, in deterministic row order.
pub fn spectra_rows(
    h: &TorusElement,
    approx: &RationalApproximant,
    grid: usize,
) -> Result<Vec<SpectraRow>> {
    check_self_adjoint(h)?;
    let pts = phase_grid(grid);
    let per_point: Vec<Vec<f64>> = pts
        .par_iter()
        .map(|&(z1, z2)| {
            sorted_eigenvalues(&represent(h, approx, z1, z2).expect("validated inputs"))
        })
        .collect();
    let mut rows = Vec::new();
    for ((z1, z2), evs) in pts.iter().zip(per_point) {
        for (i, ev) in evs.iter().enumerate() {
            rows.push(SpectraRow {
                q: approx.q,
                p: approx.p,
                z1_angle: z1.arg(),
                z2_angle: z2.arg(),
                eigenvalue_index: i,
                eigenvalue: *ev,
            });
        }
    }
    Ok(rows)
}
