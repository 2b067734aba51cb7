//! Clock-and-shift spectra at continued-fraction approximants of θ:
//! spectral bounds and operator-norm brackets for self-adjoint elements.

use num_complex::Complex64;

use nctorus::element::TorusElement;
use nctorus::representation::{
    convergents, opnorm_bracket, spectral_bounds, spectra_rows,
};

fn main() -> nctorus::Result<()> {
    let theta = 0.618_033_988_749_894_9_f64;
    println!("continued-fraction convergents of theta = {theta}:");
    for a in convergents(theta, 10)? {
        println!(
            "  depth {:>2}: {:>3}/{:<3}  |theta - p/q| = {:.3e}",
            a.depth,
            a.p,
            a.q,
            (theta - a.value()).abs()
        );
    }

    let one = Complex64::new(1.0, 0.0);
    let u = TorusElement::monomial(theta, 1, 0, one)?;
    let h = u.add(&u.adjoint())?; // U + U*, spectrum [-2, 2]

    println!("\nspectral bounds of U + U* as q grows (8x8 phase grid):");
    for min_q in [8, 21, 55, 144] {
        let approx = nctorus::representation::approximant_with_q_at_least(theta, min_q)?;
        let (lo, hi) = spectral_bounds(&h, &approx, 8)?;
        println!("  q = {:>3}: [{lo:+.6}, {hi:+.6}]", approx.q);
    }

    let approx = nctorus::representation::approximant_with_q_at_least(theta, 55)?;
    let shifted = TorusElement::identity(theta)?
        .scale_re(2.0)
        .add(&h.scale_re(0.5))?;
    let (lo, hi) = spectral_bounds(&shifted, &approx, 8)?;
    println!("\n2 + (U+U*)/2 at q = {}: spectrum in [{lo:.4}, {hi:.4}] (positive, margin {lo:.4})", approx.q);

    let (lower, upper) = opnorm_bracket(&TorusElement::identity(theta)?.add(&u)?, &approx, 8)?;
    println!("opnorm bracket of 1 + U: [{lower:.6}, {upper:.6}]");

    let rows = spectra_rows(&h, &approx, 2)?;
    println!("\nfirst spectra CSV rows (q,p,z1_angle,z2_angle,index,eigenvalue):");
    for r in rows.iter().take(4) {
        println!(
            "  {},{},{:.4},{:.4},{},{:.6}",
            r.q, r.p, r.z1_angle, r.z2_angle, r.eigenvalue_index, r.eigenvalue
        );
    }
    println!("  ... {} rows total", rows.len());
    Ok(())
}
