//! The truncated smooth noncommutative torus.
//!
//! A [`TorusElement`] is a finitely supported Fourier series
//! `a = Σ c_{m,n} U^m V^n` over the lattice ℤ², together with the
//! deformation parameter θ of the commutation relation `UV = e^{2πiθ} VU`.
//! Products follow the twisted convolution
//!
//! ```text
//! (ab)_{p,q} = Σ_{m,n} a_{m,n} b_{p−m,q−n} e^{−2πi(p−m)nθ}
//! ```
//!
//! induced by normal ordering `U^m V^n U^k V^l = e^{−2πiknθ} U^{m+k} V^{n+l}`.
//! The adjoint, trace, derivations δ₁, δ₂, Laplacian Δ = δ₁²+δ₂², the
//! Cauchy-Riemann multipliers, and all norms act coefficientwise.
//!
//! Coefficients are stored densely on the square `[−R, R]²`; elements are
//! kept trimmed so `R` is the radius of the actual support. Every operation
//! that discards coefficient mass (products under a [`TruncationPolicy`])
//! adds the discarded ℓ¹ mass to the element's `tail_mass` ledger, so
//! approximation error stays auditable. The ledger is additive bookkeeping
//! of discarded mass, not a rigorous error bound.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::TAU;

use crate::error::Error;
use crate::Result;

/// How products treat support growth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrowthMode {
    /// Products expand support up to `max_radius`.
    #[serde(rename = "grow-exact")]
    GrowExact,
    /// Products are projected back to the larger input radius.
    #[serde(rename = "project")]
    Project,
}

/// Support-radius cap and tail tolerance governing approximate operations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationPolicy {
    /// Hard cap on support growth.
    pub max_radius: i64,
    /// Maximum ℓ¹ mass a single truncation may discard before erroring.
    pub tail_tol: f64,
    pub growth_mode: GrowthMode,
}

impl TruncationPolicy {
    pub fn new(max_radius: i64, tail_tol: f64, growth_mode: GrowthMode) -> Result<Self> {
        if max_radius < 1 {
            return Err(Error::InvalidParameter(format!(
                "max_radius must be >= 1, got {max_radius}"
            )));
        }
        if !(tail_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tail_tol must be > 0, got {tail_tol}"
            )));
        }
        Ok(Self {
            max_radius,
            tail_tol,
            growth_mode,
        })
    }

    /// Grow-exact with the given radius cap and a loose default tail tolerance.
    pub fn grow_exact(max_radius: i64) -> Self {
        Self {
            max_radius,
            tail_tol: 1e-6,
            growth_mode: GrowthMode::GrowExact,
        }
    }

    pub fn with_tail_tol(mut self, tail_tol: f64) -> Self {
        self.tail_tol = tail_tol;
        self
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self::grow_exact(32)
    }
}

/// `e^{2πi k θ}` with the argument `kθ` reduced mod 1 before calling trig.
///
/// The product `kθ` is split exactly via an FMA two-product, so the reduced
/// angle is accurate to one rounding even for `|k|` of order `R_max²`.
/// Negative `k` conjugates the positive-`k` value, so
/// `phase_unit(θ, −k) == conj(phase_unit(θ, k))` holds exactly.
pub(crate) fn phase_unit(theta: f64, k: i64) -> Complex64 {
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let kf = k.unsigned_abs() as f64;
    let hi = kf * theta;
    let lo = kf.mul_add(theta, -hi);
    let frac = hi.fract() + lo;
    let (s, c) = (TAU * frac).sin_cos();
    if k < 0 {
        Complex64::new(c, -s)
    } else {
        Complex64::new(c, s)
    }
}

/// Lookup table for `e^{−2πi t θ}`, `t ∈ [−kmax, kmax]`.
struct PhaseTable {
    kmax: i64,
    values: Vec<Complex64>,
}

impl PhaseTable {
    fn new(theta: f64, kmax: i64) -> Self {
        let mut values = vec![Complex64::new(1.0, 0.0); (2 * kmax + 1) as usize];
        for t in 0..=kmax {
            let p = phase_unit(theta, t);
            values[(kmax - t) as usize] = p;
            values[(kmax + t) as usize] = p.conj();
        }
        Self { kmax, values }
    }

    /// `e^{−2πi t θ}`
    #[inline]
    fn e_neg(&self, t: i64) -> Complex64 {
        self.values[(t + self.kmax) as usize]
    }
}

/// A finitely supported element `Σ c_{m,n} U^m V^n` of the twisted algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusElement {
    theta: f64,
    radius: i64,
    coeffs: Vec<Complex64>,
    tail_mass: f64,
}

#[inline]
fn side(radius: i64) -> usize {
    (2 * radius + 1) as usize
}

fn check_theta(theta: f64) -> Result<f64> {
    if theta.is_finite() && theta > 0.0 && theta < 1.0 {
        Ok(theta)
    } else {
        Err(Error::ThetaOutOfRange(theta))
    }
}

impl TorusElement {
    /// The zero element.
    pub fn zero(theta: f64) -> Result<Self> {
        Ok(Self {
            theta: check_theta(theta)?,
            radius: 0,
            coeffs: vec![Complex64::new(0.0, 0.0)],
            tail_mass: 0.0,
        })
    }

    /// The unit 𝟙 = U⁰V⁰.
    pub fn identity(theta: f64) -> Result<Self> {
        Self::monomial(theta, 0, 0, Complex64::new(1.0, 0.0))
    }

    /// `c·𝟙`.
    pub fn scalar(theta: f64, c: Complex64) -> Result<Self> {
        Self::monomial(theta, 0, 0, c)
    }

    /// The single-coefficient element `c·U^m V^n`.
    pub fn monomial(theta: f64, m: i64, n: i64, c: Complex64) -> Result<Self> {
        Self::from_coeffs(theta, &[(m, n, c)])
    }

    /// Builds an element from sparse entries; repeated indices accumulate.
    pub fn from_coeffs(theta: f64, entries: &[(i64, i64, Complex64)]) -> Result<Self> {
        let theta = check_theta(theta)?;
        let radius = entries
            .iter()
            .map(|&(m, n, _)| m.abs().max(n.abs()))
            .max()
            .unwrap_or(0);
        let s = side(radius);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); s * s];
        for &(m, n, c) in entries {
            coeffs[(((m + radius) as usize) * s) + ((n + radius) as usize)] += c;
        }
        Ok(Self::from_dense(theta, radius, coeffs, 0.0))
    }

    /// Canonical constructor: trims the dense buffer to the actual support.
    fn from_dense(theta: f64, radius: i64, coeffs: Vec<Complex64>, tail_mass: f64) -> Self {
        let s = side(radius);
        debug_assert_eq!(coeffs.len(), s * s);
        let mut eff = 0i64;
        for m in -radius..=radius {
            for n in -radius..=radius {
                let c = coeffs[(((m + radius) as usize) * s) + ((n + radius) as usize)];
                if c != Complex64::new(0.0, 0.0) {
                    eff = eff.max(m.abs().max(n.abs()));
                }
            }
        }
        if eff == radius {
            return Self {
                theta,
                radius,
                coeffs,
                tail_mass,
            };
        }
        let new_side = side(eff);
        let mut trimmed = vec![Complex64::new(0.0, 0.0); new_side * new_side];
        for m in -eff..=eff {
            for n in -eff..=eff {
                trimmed[(((m + eff) as usize) * new_side) + ((n + eff) as usize)] =
                    coeffs[(((m + radius) as usize) * s) + ((n + radius) as usize)];
            }
        }
        Self {
            theta,
            radius: eff,
            coeffs: trimmed,
            tail_mass,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Radius of the stored support: all coefficients with
    /// `max(|m|,|n|) > support_radius` vanish.
    pub fn support_radius(&self) -> i64 {
        self.radius
    }

    /// Accumulated ℓ¹ mass discarded by truncating operations.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub(crate) fn add_tail_mass(&mut self, extra: f64) {
        self.tail_mass += extra;
    }

    pub(crate) fn set_tail_mass(&mut self, value: f64) {
        self.tail_mass = value;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    /// Coefficient at `(m, n)`; zero outside the stored support.
    pub fn coeff(&self, m: i64, n: i64) -> Complex64 {
        if m.abs() > self.radius || n.abs() > self.radius {
            return Complex64::new(0.0, 0.0);
        }
        let s = side(self.radius);
        self.coeffs[(((m + self.radius) as usize) * s) + ((n + self.radius) as usize)]
    }

    /// Nonzero coefficients in lexicographic `(m, n)` order.
    pub fn entries(&self) -> Vec<(i64, i64, Complex64)> {
        let mut out = Vec::new();
        let s = side(self.radius);
        for m in -self.radius..=self.radius {
            for n in -self.radius..=self.radius {
                let c = self.coeffs[(((m + self.radius) as usize) * s) + ((n + self.radius) as usize)];
                if c != Complex64::new(0.0, 0.0) {
                    out.push((m, n, c));
                }
            }
        }
        out
    }

    fn check_same_theta(&self, rhs: &Self) -> Result<()> {
        if self.theta.to_bits() == rhs.theta.to_bits() {
            Ok(())
        } else {
            Err(Error::ThetaMismatch {
                lhs: self.theta,
                rhs: rhs.theta,
            })
        }
    }

    /// Twisted product `self · rhs`, truncated per `policy`.
    pub fn twisted_mul(&self, rhs: &Self, policy: &TruncationPolicy) -> Result<Self> {
        self.check_same_theta(rhs)?;
        let allowed = match policy.growth_mode {
            GrowthMode::GrowExact => (self.radius + rhs.radius).min(policy.max_radius),
            GrowthMode::Project => self.radius.max(rhs.radius).min(policy.max_radius),
        };
        let a_nz = self.entries();
        let b_nz = rhs.entries();
        let table = PhaseTable::new(self.theta, self.radius * rhs.radius);
        let s = side(allowed);
        let mut acc = vec![Complex64::new(0.0, 0.0); s * s];
        let mut outside: HashMap<(i64, i64), Complex64> = HashMap::new();
        for &(ma, na, ca) in &a_nz {
            for &(mb, nb, cb) in &b_nz {
                let m = ma + mb;
                let n = na + nb;
                let w = ca * cb * table.e_neg(mb * na);
                if m.abs() <= allowed && n.abs() <= allowed {
                    acc[(((m + allowed) as usize) * s) + ((n + allowed) as usize)] += w;
                } else {
                    *outside.entry((m, n)).or_insert(Complex64::new(0.0, 0.0)) += w;
                }
            }
        }
        let discarded: f64 = outside.values().map(|c| c.norm()).sum();
        if discarded > policy.tail_tol {
            return Err(Error::TruncationOverflow {
                discarded,
                tail_tol: policy.tail_tol,
            });
        }
        Ok(Self::from_dense(
            self.theta,
            allowed,
            acc,
            self.tail_mass + rhs.tail_mass + discarded,
        ))
    }

    /// Adjoint: coefficient at `(−m,−n)` is `conj(c_{m,n}) e^{−2πimnθ}`.
    pub fn adjoint(&self) -> Self {
        let r = self.radius;
        let s = side(r);
        let mut out = vec![Complex64::new(0.0, 0.0); s * s];
        for (m, n, c) in self.entries() {
            out[(((-m + r) as usize) * s) + ((-n + r) as usize)] =
                c.conj() * phase_unit(self.theta, -m * n);
        }
        Self::from_dense(self.theta, r, out, self.tail_mass)
    }

    /// The tracial state: extraction of the `(0,0)` coefficient.
    pub fn trace(&self) -> Complex64 {
        self.coeff(0, 0)
    }

    fn map_multiplier(&self, f: impl Fn(i64, i64) -> Complex64) -> Self {
        let r = self.radius;
        let s = side(r);
        let mut out = vec![Complex64::new(0.0, 0.0); s * s];
        for (m, n, c) in self.entries() {
            out[(((m + r) as usize) * s) + ((n + r) as usize)] = c * f(m, n);
        }
        Self::from_dense(self.theta, r, out, self.tail_mass)
    }

    /// Derivation δⱼ, `j ∈ {1, 2}`: multiplies `c_{m,n}` by `2πi·m` (j = 1)
    /// or `2πi·n` (j = 2).
    pub fn derive(&self, j: u8) -> Self {
        match j {
            1 => self.map_multiplier(|m, _| Complex64::new(0.0, TAU * m as f64)),
            2 => self.map_multiplier(|_, n| Complex64::new(0.0, TAU * n as f64)),
            _ => panic!("derivation index must be 1 or 2, got {j}"),
        }
    }

    /// Δ = δ₁² + δ₂²: multiplies `c_{m,n}` by `−4π²(m²+n²)`.
    pub fn laplacian(&self) -> Self {
        self.map_multiplier(|m, n| Complex64::new(-(TAU * TAU) * ((m * m + n * n) as f64), 0.0))
    }

    /// ∂̄ = ½(δ₁ + iδ₂): multiplies `c_{m,n}` by `πi(m+in)`.
    pub fn dbar(&self) -> Self {
        let pi = std::f64::consts::PI;
        self.map_multiplier(|m, n| Complex64::new(-pi * n as f64, pi * m as f64))
    }

    /// ∂ = ½(δ₁ − iδ₂): multiplies `c_{m,n}` by `πi(m−in)`.
    pub fn dholo(&self) -> Self {
        let pi = std::f64::consts::PI;
        self.map_multiplier(|m, n| Complex64::new(pi * n as f64, pi * m as f64))
    }

    /// Gauge action `α_{(z1,z2)}`: `c_{m,n} ↦ z1^m z2^n c_{m,n}` for
    /// unimodular `z1`, `z2`.
    pub fn gauge_act(&self, z1: Complex64, z2: Complex64) -> Result<Self> {
        for z in [z1, z2] {
            if (z.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::NotUnimodular(z.norm()));
            }
        }
        let (a1, a2) = (z1.arg(), z2.arg());
        Ok(self.map_multiplier(|m, n| Complex64::from_polar(1.0, m as f64 * a1 + n as f64 * a2)))
    }

    /// Sum; exact, tails add.
    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.lincomb(rhs, Complex64::new(1.0, 0.0))
    }

    /// Difference; exact, tails add.
    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.lincomb(rhs, Complex64::new(-1.0, 0.0))
    }

    /// `self + w·rhs`.
    pub fn lincomb(&self, rhs: &Self, w: Complex64) -> Result<Self> {
        self.check_same_theta(rhs)?;
        let r = self.radius.max(rhs.radius);
        let s = side(r);
        let mut out = vec![Complex64::new(0.0, 0.0); s * s];
        for (m, n, c) in self.entries() {
            out[(((m + r) as usize) * s) + ((n + r) as usize)] += c;
        }
        for (m, n, c) in rhs.entries() {
            out[(((m + r) as usize) * s) + ((n + r) as usize)] += w * c;
        }
        Ok(Self::from_dense(
            self.theta,
            r,
            out,
            self.tail_mass + w.norm() * rhs.tail_mass,
        ))
    }

    /// Scalar multiple `c·self`.
    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.map_multiplier(|_, _| c);
        out.tail_mass = self.tail_mass * c.norm();
        out
    }

    /// Real scalar multiple.
    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// `(a + a*)/2`.
    pub fn symmetrize(&self) -> Result<Self> {
        Ok(self.add(&self.adjoint())?.scale_re(0.5))
    }

    /// ℓ² norm of `a − a*`.
    pub fn self_adjoint_defect(&self) -> f64 {
        match self.sub(&self.adjoint()) {
            Ok(d) => d.l2_norm(),
            Err(_) => unreachable!("same theta by construction"),
        }
    }

    /// ℓ¹ norm `Σ |c_{m,n}|` of the coefficients.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// ℓ² norm `(Σ |c_{m,n}|²)^{1/2}`, equal to `τ(a*a)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Sobolev norm `H^n`: `(Σ w_n(m,k) |c_{m,k}|²)^{1/2}` with
    /// `w_n = Σ_{ℓ=0}^{n} (4π²(m²+k²))^ℓ`, the diagonal form of the
    /// multi-index definition `Σ_{0≤|β|≤n} ‖δ_β(a)‖²`.
    pub fn sobolev_norm(&self, n: u32) -> f64 {
        let mut sum = 0.0;
        for (m, k, c) in self.entries() {
            let x = (TAU * TAU) * ((m * m + k * k) as f64);
            let mut weight = 1.0;
            let mut pow = 1.0;
            for _ in 0..n {
                pow *= x;
                weight += pow;
            }
            sum += weight * c.norm_sqr();
        }
        sum.sqrt()
    }

    /// Weighted ℓ¹ norms from the elliptic bootstrap:
    /// `k = 1` uses weight `2+m²+n²`, `k = 2` uses `8+(m²+n²)²`.
    /// Both are submultiplicative for the twisted product.
    pub fn bootstrap_norm(&self, k: u8) -> f64 {
        let mut sum = 0.0;
        for (m, n, c) in self.entries() {
            let q = m * m + n * n;
            let w = match k {
                1 => (2 + q) as f64,
                2 => (8 + q * q) as f64,
                _ => panic!("bootstrap norm order must be 1 or 2, got {k}"),
            };
            sum += w * c.norm();
        }
        sum
    }

    /// `½ Σ 4π²(m²+n²) |c_{m,n}|²`, the Dirichlet energy
    /// `½ τ(δ₁(a)*δ₁(a) + δ₂(a)*δ₂(a))` in coefficient form.
    pub(crate) fn dirichlet_energy(&self) -> f64 {
        let mut sum = 0.0;
        for (m, n, c) in self.entries() {
            sum += (TAU * TAU) * ((m * m + n * n) as f64) * c.norm_sqr();
        }
        0.5 * sum
    }
}
