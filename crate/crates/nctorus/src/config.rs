//! Experiment configuration: versioned, strict, reproducible.
//!
//! Configs are JSON with `"schema_version": 1`; unknown keys are rejected
//! everywhere so a config is a faithful record of what ran. θ enters as a
//! decimal string and the parsed value is echoed back in reports, keeping
//! phase-sensitive runs auditable.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::element::TruncationPolicy;
use crate::error::Error;
use crate::flow::{FlowConfig, ProbeConfig};
use crate::nonlinear::ContinuationConfig;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Helmholtz,
    Poisson,
    Dbar,
    Liouville,
    Flow,
    Probe,
    Scan,
    Spectra,
    Identities,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HelmholtzSection {
    pub input: PathBuf,
    pub lambda: f64,
}

fn default_trace_tol() -> f64 {
    1e-12
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceZeroSection {
    pub input: PathBuf,
    #[serde(default = "default_trace_tol")]
    pub trace_tol: f64,
}

/// Scalar `λ𝟙` or an element loaded from a file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, untagged)]
pub enum SourceSpec {
    Scalar { scalar: f64 },
    Path { path: PathBuf },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiouvilleSection {
    pub mu: f64,
    pub source: SourceSpec,
    #[serde(default)]
    pub continuation: ContinuationConfig,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    pub magnitude: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_perturbation_radius")]
    pub radius: i64,
}

fn default_rho() -> f64 {
    0.5
}

fn default_perturbation_radius() -> i64 {
    4
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSection {
    /// Element file to start from; mutually exclusive with `monomial`.
    #[serde(default)]
    pub input: Option<PathBuf>,
    /// Monomial start `U^m V^n` as `[m, n]`.
    #[serde(default)]
    pub monomial: Option<(i64, i64)>,
    /// Optional seeded perturbation of the start by `e^{i·magnitude·h}`.
    #[serde(default)]
    pub perturbation: Option<PerturbationSpec>,
    pub steps: usize,
    #[serde(default)]
    pub flow: FlowConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    pub m: i64,
    pub n: i64,
    pub trials: usize,
    #[serde(default)]
    pub probe: ProbeConfig,
}

fn default_kernel_threshold_rel() -> f64 {
    1e-8
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    /// Coefficient-ball radius of the assembled operator.
    pub radius: i64,
    pub x_min: f64,
    pub x_max: f64,
    pub x_steps: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub y_steps: usize,
    /// When set, the scanned constant is `c = πi(x + iy)` so integer grid
    /// points sit on the kernel lattice; otherwise `c = x + iy`.
    #[serde(default = "default_true")]
    pub lattice_units: bool,
    #[serde(default = "default_kernel_threshold_rel")]
    pub kernel_threshold_rel: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectraSection {
    pub input: PathBuf,
    #[serde(default = "default_min_q")]
    pub min_q: i64,
    #[serde(default = "default_grid")]
    pub grid: usize,
}

fn default_min_q() -> i64 {
    89
}

fn default_grid() -> usize {
    8
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IdentitiesSection {
    pub pairs: usize,
    pub radius: i64,
    pub rho: f64,
    pub defect_threshold: f64,
}

impl Default for IdentitiesSection {
    fn default() -> Self {
        Self {
            pairs: 100,
            radius: 8,
            rho: 0.5,
            defect_threshold: 1e-11,
        }
    }
}

fn default_policy() -> TruncationPolicy {
    TruncationPolicy::default()
}

/// Top-level experiment description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    /// Deformation parameter as a decimal string.
    pub theta: String,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default = "default_policy")]
    pub policy: TruncationPolicy,
    #[serde(default)]
    pub helmholtz: Option<HelmholtzSection>,
    #[serde(default)]
    pub poisson: Option<TraceZeroSection>,
    #[serde(default)]
    pub dbar: Option<TraceZeroSection>,
    #[serde(default)]
    pub liouville: Option<LiouvilleSection>,
    #[serde(default)]
    pub flow: Option<FlowSection>,
    #[serde(default)]
    pub probe: Option<ProbeSection>,
    #[serde(default)]
    pub scan: Option<ScanSection>,
    #[serde(default)]
    pub spectra: Option<SpectraSection>,
    #[serde(default)]
    pub identities: Option<IdentitiesSection>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: Self = serde_json::from_str(&text)
            .map_err(|e| Error::Config(vec![format!("parse: {e}")]))?;
        config.validate()?;
        Ok(config)
    }

    /// The parsed θ; `validate` guarantees it lies in (0,1).
    pub fn theta_value(&self) -> f64 {
        self.theta.trim().parse().unwrap_or(f64::NAN)
    }

    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        if self.schema_version != 1 {
            errors.push(format!(
                "unsupported schema_version {} (expected 1)",
                self.schema_version
            ));
        }
        match self.theta.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t < 1.0 => {}
            Ok(t) => errors.push(format!("theta {t} outside the open interval (0,1)")),
            Err(e) => errors.push(format!("theta {:?} does not parse: {e}", self.theta)),
        }
        if let Err(e) = TruncationPolicy::new(
            self.policy.max_radius,
            self.policy.tail_tol,
            self.policy.growth_mode,
        ) {
            errors.push(format!("policy: {e}"));
        }
        let section_missing = |name: &str| format!("kind {name:?} requires a {name:?} section");
        match self.kind {
            ExperimentKind::Helmholtz => {
                if let Some(s) = &self.helmholtz {
                    if !(s.lambda > 0.0) {
                        errors.push(format!("helmholtz.lambda must be > 0, got {}", s.lambda));
                    }
                } else {
                    errors.push(section_missing("helmholtz"));
                }
            }
            ExperimentKind::Poisson => {
                if self.poisson.is_none() {
                    errors.push(section_missing("poisson"));
                }
            }
            ExperimentKind::Dbar => {
                if self.dbar.is_none() {
                    errors.push(section_missing("dbar"));
                }
            }
            ExperimentKind::Liouville => {
                if let Some(s) = &self.liouville {
                    if !(s.mu > 0.0) {
                        errors.push(format!("liouville.mu must be > 0, got {}", s.mu));
                    }
                } else {
                    errors.push(section_missing("liouville"));
                }
            }
            ExperimentKind::Flow => {
                if let Some(s) = &self.flow {
                    match (&s.input, &s.monomial) {
                        (Some(_), Some(_)) => {
                            errors.push("flow: give either input or monomial, not both".into())
                        }
                        (None, None) => {
                            errors.push("flow: one of input or monomial is required".into())
                        }
                        _ => {}
                    }
                    if s.perturbation.is_some() && self.seed.is_none() {
                        errors.push("flow: perturbation requires a seed".into());
                    }
                    if s.steps == 0 {
                        errors.push("flow.steps must be >= 1".into());
                    }
                } else {
                    errors.push(section_missing("flow"));
                }
            }
            ExperimentKind::Probe => {
                if let Some(s) = &self.probe {
                    if s.trials == 0 {
                        errors.push("probe.trials must be >= 1".into());
                    }
                    if self.seed.is_none() {
                        errors.push("probe: a seed is required".into());
                    }
                } else {
                    errors.push(section_missing("probe"));
                }
            }
            ExperimentKind::Scan => {
                if let Some(s) = &self.scan {
                    if s.radius < 1 {
                        errors.push(format!("scan.radius must be >= 1, got {}", s.radius));
                    }
                    if s.x_steps < 1 || s.y_steps < 1 {
                        errors.push("scan grid needs at least one step per axis".into());
                    }
                } else {
                    errors.push(section_missing("scan"));
                }
            }
            ExperimentKind::Spectra => {
                if self.spectra.is_none() {
                    errors.push(section_missing("spectra"));
                }
            }
            ExperimentKind::Identities => {
                if let Some(s) = &self.identities {
                    if s.pairs == 0 {
                        errors.push("identities.pairs must be >= 1".into());
                    }
                } else {
                    errors.push(section_missing("identities"));
                }
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errors))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(kind: &str, section: &str) -> String {
        format!(
            r#"{{
  "schema_version": 1,
  "kind": "{kind}",
  "theta": "0.6180339887498949",
  "output_dir": "out",
  {section}
}}"#
        )
    }

    #[test]
    fn parses_liouville_config() {
        let text = minimal(
            "liouville",
            r#""liouville": {"mu": 1.0, "source": {"scalar": 2.718281828459045}}"#,
        );
        let config: ExperimentConfig = serde_json::from_str(&text).unwrap();
        config.validate().unwrap();
        assert!((config.theta_value() - 0.618_033_988_749_894_9).abs() < 1e-16);
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = minimal(
            "liouville",
            r#""liouville": {"mu": 1.0, "source": {"scalar": 1.0}}, "surprise": 1"#,
        );
        assert!(serde_json::from_str::<ExperimentConfig>(&text).is_err());
    }

    #[test]
    fn rejects_missing_section_and_bad_theta() {
        let text = minimal("poisson", r#""seed": 1"#);
        let config: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert!(matches!(config.validate(), Err(Error::Config(_))));

        let mut config: ExperimentConfig = serde_json::from_str(&minimal(
            "identities",
            r#""identities": {}"#,
        ))
        .unwrap();
        config.theta = "1.25".into();
        assert!(config.validate().is_err());
    }

    #[test]
    fn rejects_wrong_schema_version() {
        let text = minimal("identities", r#""identities": {}"#).replace(
            "\"schema_version\": 1",
            "\"schema_version\": 2",
        );
        let config: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert!(config.validate().is_err());
    }

    #[test]
    fn flow_requires_exactly_one_start() {
        let text = minimal(
            "flow",
            r#""flow": {"monomial": [1, 0], "input": "u.json", "steps": 10}"#,
        );
        let config: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert!(config.validate().is_err());
    }
}
