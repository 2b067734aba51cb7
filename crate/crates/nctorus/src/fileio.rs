//! Element files and CSV emission.
//!
//! An element file is JSON-shaped structured text:
//!
//! ```json
//! {"theta": "0.6180339887498949", "coeffs": [[m, n, re, im], ...]}
//! ```
//!
//! θ is a decimal string parsed to the nearest float; writers emit the
//! shortest round-trip decimal of the stored value so write→read is
//! bit-exact. Coefficients may arrive in any order but duplicates are
//! rejected; writers emit them sorted lexicographically by `(m, n)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::element::TorusElement;
use crate::error::Error;
use crate::Result;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementFile {
    theta: String,
    coeffs: Vec<(i64, i64, f64, f64)>,
}

/// Serialize an element to the file format (coefficients sorted by `(m,n)`).
pub fn element_to_json(a: &TorusElement) -> String {
    let file = ElementFile {
        theta: format!("{}", a.theta()),
        coeffs: a
            .entries()
            .into_iter()
            .map(|(m, n, c)| (m, n, c.re, c.im))
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("element file serialization is infallible")
}

/// Parse an element from file-format JSON, rejecting duplicate indices and
/// malformed θ with an itemized error list.
pub fn element_from_json(text: &str) -> Result<TorusElement> {
    let file: ElementFile = serde_json::from_str(text)
        .map_err(|e| Error::ElementFile(vec![format!("schema: {e}")]))?;
    let mut errors = Vec::new();
    let theta: f64 = match file.theta.trim().parse() {
        Ok(t) => t,
        Err(e) => {
            errors.push(format!("theta {:?} does not parse: {e}", file.theta));
            f64::NAN
        }
    };
    if !errors.is_empty() || !(theta > 0.0 && theta < 1.0) {
        if errors.is_empty() {
            errors.push(format!("theta {theta} outside the open interval (0,1)"));
        }
        return Err(Error::ElementFile(errors));
    }
    let mut seen = HashSet::new();
    let mut entries = Vec::with_capacity(file.coeffs.len());
    for (i, &(m, n, re, im)) in file.coeffs.iter().enumerate() {
        if !seen.insert((m, n)) {
            errors.push(format!("duplicate index ({m}, {n}) at position {i}"));
        }
        if !re.is_finite() || !im.is_finite() {
            errors.push(format!("non-finite coefficient at ({m}, {n})"));
        }
        entries.push((m, n, Complex64::new(re, im)));
    }
    if !errors.is_empty() {
        return Err(Error::ElementFile(errors));
    }
    TorusElement::from_coeffs(theta, &entries)
}

pub fn write_element(path: &Path, a: &TorusElement) -> Result<()> {
    std::fs::write(path, element_to_json(a) + "\n")?;
    Ok(())
}

pub fn read_element(path: &Path) -> Result<TorusElement> {
    let text = std::fs::read_to_string(path)?;
    element_from_json(&text)
}

/// Norms and defects printed by `nctorus validate`.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub theta: f64,
    pub support_radius: i64,
    pub coefficients: usize,
    pub l1_norm: f64,
    pub l2_norm: f64,
    pub h1_norm: f64,
    pub self_adjoint_defect: f64,
}

/// Read, schema-check, and summarize an element file.
pub fn validate_element_file(path: &Path) -> Result<ValidationReport> {
    let a = read_element(path)?;
    Ok(ValidationReport {
        theta: a.theta(),
        support_radius: a.support_radius(),
        coefficients: a.entries().len(),
        l1_norm: a.l1_norm(),
        l2_norm: a.l2_norm(),
        h1_norm: a.sobolev_norm(1),
        self_adjoint_defect: a.self_adjoint_defect(),
    })
}

/// Write a CSV file with the given header and pre-formatted rows.
pub fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<()> {
    let mut text = String::with_capacity(rows.len() * 32 + header.len() + 1);
    writeln!(text, "{header}").expect("string writes are infallible");
    for row in rows {
        writeln!(text, "{row}").expect("string writes are infallible");
    }
    std::fs::write(path, text)?;
    Ok(())
}
