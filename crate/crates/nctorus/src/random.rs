//! Deterministic random elements with a smooth decay profile.
//!
//! Coefficients are drawn with `|c_{m,n}| ∝ ρ^{max(|m|,|n|)}`, which keeps
//! samples in the rapidly-decaying regime the algebra operations expect.
//! All draws go through a caller-supplied [`rand::Rng`]; experiments seed a
//! `ChaCha8Rng` from a 64-bit seed so runs are reproducible bit for bit.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::element::TorusElement;
use crate::Result;

/// Random element with complex Gaussian coefficients damped by `rho^{max(|m|,|n|)}`.
pub fn random_element<R: Rng + ?Sized>(
    theta: f64,
    radius: i64,
    rho: f64,
    rng: &mut R,
) -> Result<TorusElement> {
    let mut entries = Vec::new();
    for m in -radius..=radius {
        for n in -radius..=radius {
            let damp = rho.powi(m.abs().max(n.abs()) as i32);
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            entries.push((m, n, Complex64::new(re, im).scale(damp / f64::sqrt(2.0))));
        }
    }
    TorusElement::from_coeffs(theta, &entries)
}

/// Random self-adjoint element: a decayed Gaussian draw symmetrized as `(x + x*)/2`.
pub fn random_self_adjoint<R: Rng + ?Sized>(
    theta: f64,
    radius: i64,
    rho: f64,
    rng: &mut R,
) -> Result<TorusElement> {
    random_element(theta, radius, rho, rng)?.symmetrize()
}
