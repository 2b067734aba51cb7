//! Diagonal Fourier-multiplier solvers and the Cauchy-Riemann kernel scanner.
//!
//! `−Δ+λ`, Δ, and ∂̄ are diagonal on monomials, so the Helmholtz, Poisson
//! and inhomogeneous ∂̄ problems reduce to coefficientwise division. Δ and
//! ∂̄ kill the `(0,0)` mode: their images are trace-zero, and the solvers
//! gauge-fix the additive constant by returning the trace-zero solution.
//!
//! The kernel scanner assembles `L_f : u ↦ ∂̄u − f·u` on the coefficient
//! ball of a given radius and looks for near-kernel directions through its
//! smallest singular values. For constant `f = c𝟙` the operator is
//! diagonal with entries `πi(k+il) − c`, and singular values are taken as
//! the moduli of those entries; the dense SVD route handles everything else.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::element::TorusElement;
use crate::error::Error;
use crate::Result;

/// Solve `(−Δ + λ)u = f` for `λ > 0` by dividing each coefficient by
/// `4π²(m²+n²) + λ`. Exact inverse on the truncated space.
pub fn solve_helmholtz(f: &TorusElement, lambda: f64) -> Result<TorusElement> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "helmholtz shift must be > 0, got {lambda}"
        )));
    }
    let entries: Vec<_> = f
        .entries()
        .into_iter()
        .map(|(m, n, c)| {
            let w = (TAU * TAU) * ((m * m + n * n) as f64) + lambda;
            (m, n, c / w)
        })
        .collect();
    let mut out = TorusElement::from_coeffs(f.theta(), &entries)?;
    out.add_tail_mass(f.tail_mass());
    Ok(out)
}

/// Apply `−Δ + λ`.
pub fn apply_helmholtz(u: &TorusElement, lambda: f64) -> Result<TorusElement> {
    u.laplacian().scale_re(-1.0).add(&u.scale_re(lambda))
}

/// Solve `Δu = f` on the trace-zero domain: coefficientwise division by
/// `−4π²(m²+n²)` away from `(0,0)`; the returned solution has trace zero.
pub fn solve_poisson(f: &TorusElement, trace_tol: f64) -> Result<TorusElement> {
    let tr = f.trace().norm();
    if tr >= trace_tol {
        return Err(Error::NoSolution {
            trace_magnitude: tr,
        });
    }
    let entries: Vec<_> = f
        .entries()
        .into_iter()
        .filter(|&(m, n, _)| (m, n) != (0, 0))
        .map(|(m, n, c)| {
            let w = -(TAU * TAU) * ((m * m + n * n) as f64);
            (m, n, c / w)
        })
        .collect();
    let mut out = TorusElement::from_coeffs(f.theta(), &entries)?;
    out.add_tail_mass(f.tail_mass());
    Ok(out)
}

/// Solve `∂̄u = f` on the trace-zero domain: division by `πi(m+in)` away
/// from `(0,0)`; the returned solution has trace zero.
pub fn solve_dbar(f: &TorusElement, trace_tol: f64) -> Result<TorusElement> {
    let tr = f.trace().norm();
    if tr >= trace_tol {
        return Err(Error::NoSolution {
            trace_magnitude: tr,
        });
    }
    let entries: Vec<_> = f
        .entries()
        .into_iter()
        .filter(|&(m, n, _)| (m, n) != (0, 0))
        .map(|(m, n, c)| {
            let w = Complex64::new(-PI * n as f64, PI * m as f64);
            (m, n, c / w)
        })
        .collect();
    let mut out = TorusElement::from_coeffs(f.theta(), &entries)?;
    out.add_tail_mass(f.tail_mass());
    Ok(out)
}

/// `|τ(∂̄f)|` — zero for every element, since the ∂̄ multiplier kills the
/// constant term. The formal-Fourier-series residue observable.
pub fn constant_term_check(f: &TorusElement) -> f64 {
    f.dbar().trace().norm()
}

/// Outcome of a kernel scan of `L_f : u ↦ ∂̄u − f·u`.
#[derive(Debug, Clone)]
pub struct KernelScan {
    /// All singular values of the assembled operator, ascending.
    pub singular_values: Vec<f64>,
    /// Count of singular values below `threshold` — an estimate, since
    /// finite-ball truncation perturbs near-kernel vectors.
    pub kernel_dim_estimate: usize,
    /// Absolute threshold used: `rel_threshold · σ_max`.
    pub threshold: f64,
    /// ℓ¹ mass of multiplication entries that left the coefficient ball
    /// and were projected out.
    pub projected_mass: f64,
}

impl KernelScan {
    pub fn sigma_min(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }
}

#[inline]
fn ball_index(radius: i64, m: i64, n: i64) -> usize {
    let s = (2 * radius + 1) as usize;
    ((m + radius) as usize) * s + ((n + radius) as usize)
}

/// Dense matrix of `L_f = ∂̄ − M_f` on the coefficient ball
/// `max(|m|,|n|) ≤ radius`, plus the ℓ¹ mass of projected-out entries.
pub fn assemble_cr_operator(f: &TorusElement, radius: i64) -> (DMatrix<Complex64>, f64) {
    let s = (2 * radius + 1) as usize;
    let dim = s * s;
    let mut mat = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for k in -radius..=radius {
        for l in -radius..=radius {
            let col = ball_index(radius, k, l);
            mat[(col, col)] = Complex64::new(-PI * l as f64, PI * k as f64);
        }
    }
    let mut projected = 0.0;
    for (m, n, fc) in f.entries() {
        for k in -radius..=radius {
            let phase = crate::element::phase_unit(f.theta(), -k * n);
            for l in -radius..=radius {
                let (p, q) = (m + k, n + l);
                let w = fc * phase;
                if p.abs() <= radius && q.abs() <= radius {
                    let row = ball_index(radius, p, q);
                    let col = ball_index(radius, k, l);
                    mat[(row, col)] -= w;
                } else {
                    projected += w.norm();
                }
            }
        }
    }
    (mat, projected)
}

/// Smallest singular values of `L_f` on the radius-`radius` ball and the
/// count below `rel_threshold · σ_max`.
///
/// Constant `f` makes `L_f` exactly diagonal, where the singular values
/// are the moduli `|πi(k+il) − c|`; non-constant `f` goes through a dense
/// SVD of the assembled operator.
pub fn cr_kernel_scan(f: &TorusElement, radius: i64, rel_threshold: f64) -> Result<KernelScan> {
    if radius < 1 {
        return Err(Error::InvalidParameter(format!(
            "scan radius must be >= 1, got {radius}"
        )));
    }
    let (singular_values, projected_mass) = if f.support_radius() == 0 {
        let c = f.trace();
        let mut sv = Vec::with_capacity(((2 * radius + 1) * (2 * radius + 1)) as usize);
        for k in -radius..=radius {
            for l in -radius..=radius {
                sv.push((Complex64::new(-PI * l as f64, PI * k as f64) - c).norm());
            }
        }
        sv.sort_by(|a, b| a.partial_cmp(b).unwrap());
        (sv, 0.0)
    } else {
        let (mat, projected) = assemble_cr_operator(f, radius);
        let mut sv: Vec<f64> = mat.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| a.partial_cmp(b).unwrap());
        (sv, projected)
    };
    let sigma_max = singular_values.last().copied().unwrap_or(0.0);
    let threshold = rel_threshold * sigma_max;
    let kernel_dim_estimate = singular_values
        .iter()
        .take_while(|&&s| s < threshold)
        .count();
    Ok(KernelScan {
        singular_values,
        kernel_dim_estimate,
        threshold,
        projected_mass,
    })
}
