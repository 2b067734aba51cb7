//! Experiment orchestration behind the `nctorus` CLI.
//!
//! `run` executes one validated [`ExperimentConfig`], writing a
//! `report.json` plus kind-specific CSV traces and element files into the
//! output directory, and maps outcomes onto the exit-code contract:
//! 0 for success/convergence, 2 for solver stalls, with validation and
//! domain errors surfacing as `Err` (exit 1 at the CLI). Reports carry no
//! timestamps or timings, so identical config + seed reproduce artifacts
//! bit for bit.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};

use crate::calculus::exp_element;
use crate::config::{ExperimentConfig, ExperimentKind, SourceSpec};
use crate::element::{TorusElement, TruncationPolicy};
use crate::error::Error;
use crate::fileio::{read_element, write_csv, write_element};
use crate::flow::{conjecture_probe, gradient_flow, FlowVerdict};
use crate::linear::{apply_helmholtz, cr_kernel_scan, solve_dbar, solve_helmholtz, solve_poisson};
use crate::nonlinear::solve_liouville;
use crate::random::{random_element, random_self_adjoint};
use crate::representation::{approximant_with_q_at_least, spectra_rows};
use crate::Result;

/// What `run` hands back to the CLI.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub report_path: PathBuf,
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn write_report(dir: &Path, value: &serde_json::Value) -> Result<PathBuf> {
    let path = dir.join("report.json");
    std::fs::write(&path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(path)
}

fn load_input(path: &Path, theta: f64) -> Result<TorusElement> {
    let a = read_element(path)?;
    if a.theta().to_bits() != theta.to_bits() {
        return Err(Error::Config(vec![format!(
            "element file {} has theta {} but the config says {}",
            path.display(),
            a.theta(),
            theta
        )]));
    }
    Ok(a)
}

/// Execute one experiment; artifacts land in the resolved output directory.
pub fn run(
    config: &ExperimentConfig,
    out_override: Option<PathBuf>,
    seed_override: Option<u64>,
) -> Result<RunOutcome> {
    config.validate()?;
    let out_dir = out_override.unwrap_or_else(|| config.output_dir.clone());
    std::fs::create_dir_all(&out_dir)?;
    let seed = seed_override.or(config.seed).unwrap_or(0);
    let theta = config.theta_value();
    let policy = config.policy;

    match config.kind {
        ExperimentKind::Helmholtz => {
            let section = config.helmholtz.as_ref().expect("validated");
            let f = load_input(&section.input, theta)?;
            let solution = solve_helmholtz(&f, section.lambda)?;
            let residual = apply_helmholtz(&solution, section.lambda)?
                .sub(&f)?
                .l2_norm();
            write_element(&out_dir.join("solution.json"), &solution)?;
            let report = json!({
                "kind": "helmholtz",
                "theta": theta,
                "theta_string": config.theta,
                "lambda": section.lambda,
                "residual_l2": residual,
                "relative_residual": residual / f.l2_norm().max(f64::MIN_POSITIVE),
                "solution_l1": solution.l1_norm(),
            });
            Ok(RunOutcome {
                exit_code: 0,
                report_path: write_report(&out_dir, &report)?,
            })
        }
        ExperimentKind::Poisson | ExperimentKind::Dbar => {
            let (name, section) = match config.kind {
                ExperimentKind::Poisson => ("poisson", config.poisson.as_ref().expect("validated")),
                _ => ("dbar", config.dbar.as_ref().expect("validated")),
            };
            let f = load_input(&section.input, theta)?;
            let solution = match config.kind {
                ExperimentKind::Poisson => solve_poisson(&f, section.trace_tol)?,
                _ => solve_dbar(&f, section.trace_tol)?,
            };
            let back = match config.kind {
                ExperimentKind::Poisson => solution.laplacian(),
                _ => solution.dbar(),
            };
            let residual = back.sub(&f)?.l2_norm();
            write_element(&out_dir.join("solution.json"), &solution)?;
            let report = json!({
                "kind": name,
                "theta": theta,
                "theta_string": config.theta,
                "trace_tol": section.trace_tol,
                "input_trace": [f.trace().re, f.trace().im],
                "residual_l2": residual,
                "solution_trace_zero": solution.trace() == Complex64::new(0.0, 0.0),
            });
            Ok(RunOutcome {
                exit_code: 0,
                report_path: write_report(&out_dir, &report)?,
            })
        }
        ExperimentKind::Liouville => run_liouville(config, &out_dir, theta, &policy),
        ExperimentKind::Flow => run_flow(config, &out_dir, theta, seed, &policy),
        ExperimentKind::Probe => {
            let section = config.probe.as_ref().expect("validated");
            let summary = conjecture_probe(
                theta,
                section.m,
                section.n,
                section.trials,
                seed,
                &section.probe,
                &policy,
            )?;
            let report = json!({
                "kind": "probe",
                "theta": theta,
                "theta_string": config.theta,
                "seed": seed,
                "summary": summary,
            });
            Ok(RunOutcome {
                exit_code: 0,
                report_path: write_report(&out_dir, &report)?,
            })
        }
        ExperimentKind::Scan => run_scan(config, &out_dir, theta),
        ExperimentKind::Spectra => {
            let section = config.spectra.as_ref().expect("validated");
            let h = load_input(&section.input, theta)?;
            let approx = approximant_with_q_at_least(theta, section.min_q)?;
            let rows = spectra_rows(&h, &approx, section.grid)?;
            let lines: Vec<String> = rows
                .iter()
                .map(|r| {
                    format!(
                        "{},{},{},{},{},{}",
                        r.q,
                        r.p,
                        fmt(r.z1_angle),
                        fmt(r.z2_angle),
                        r.eigenvalue_index,
                        fmt(r.eigenvalue)
                    )
                })
                .collect();
            write_csv(
                &out_dir.join("spectra.csv"),
                "q,p,z1_angle,z2_angle,eigenvalue_index,eigenvalue",
                &lines,
            )?;
            let (lo, hi) = rows
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                    (lo.min(r.eigenvalue), hi.max(r.eigenvalue))
                });
            let report = json!({
                "kind": "spectra",
                "theta": theta,
                "theta_string": config.theta,
                "q": approx.q,
                "p": approx.p,
                "grid": section.grid,
                "rows": rows.len(),
                "min_eigenvalue": lo,
                "max_eigenvalue": hi,
            });
            Ok(RunOutcome {
                exit_code: 0,
                report_path: write_report(&out_dir, &report)?,
            })
        }
        ExperimentKind::Identities => {
            let section = config.identities.as_ref().expect("validated");
            let report = identity_suite(
                theta,
                section.pairs,
                section.radius,
                section.rho,
                seed,
                &TruncationPolicy::grow_exact(2 * section.radius).with_tail_tol(1.0),
            )?;
            let pass = report.max_defect < section.defect_threshold;
            let value = json!({
                "kind": "identities",
                "theta": theta,
                "theta_string": config.theta,
                "seed": seed,
                "defect_threshold": section.defect_threshold,
                "pass": pass,
                "report": report,
            });
            Ok(RunOutcome {
                exit_code: if pass { 0 } else { 2 },
                report_path: write_report(&out_dir, &value)?,
            })
        }
    }
}

fn run_liouville(
    config: &ExperimentConfig,
    out_dir: &Path,
    theta: f64,
    policy: &TruncationPolicy,
) -> Result<RunOutcome> {
    let section = config.liouville.as_ref().expect("validated");
    let source = match &section.source {
        SourceSpec::Scalar { scalar } => {
            TorusElement::scalar(theta, Complex64::new(*scalar, 0.0))?
        }
        SourceSpec::Path { path } => load_input(path, theta)?,
    };
    match solve_liouville(&source, section.mu, &section.continuation, policy) {
        Ok((solution, report)) => {
            write_element(&out_dir.join("solution.json"), &solution)?;
            let lines: Vec<String> = report
                .steps
                .iter()
                .map(|s| {
                    format!(
                        "{},{},{},{}",
                        fmt(s.t),
                        s.inner_iterations,
                        fmt(s.residual_l2),
                        fmt(s.lagrangian)
                    )
                })
                .collect();
            write_csv(
                &out_dir.join("continuation.csv"),
                "t,inner_iterations,residual_l2,lagrangian",
                &lines,
            )?;
            let value = json!({
                "kind": "liouville",
                "theta": theta,
                "theta_string": config.theta,
                "mu": section.mu,
                "report": report,
            });
            let exit_code = if report.converged { 0 } else { 2 };
            Ok(RunOutcome {
                exit_code,
                report_path: write_report(out_dir, &value)?,
            })
        }
        Err(Error::ContinuationStall { t, max_iter, partial }) => {
            let lines: Vec<String> = partial
                .iter()
                .map(|s| {
                    format!(
                        "{},{},{},{}",
                        fmt(s.t),
                        s.inner_iterations,
                        fmt(s.residual_l2),
                        fmt(s.lagrangian)
                    )
                })
                .collect();
            write_csv(
                &out_dir.join("continuation.csv"),
                "t,inner_iterations,residual_l2,lagrangian",
                &lines,
            )?;
            let value = json!({
                "kind": "liouville",
                "theta": theta,
                "theta_string": config.theta,
                "mu": section.mu,
                "stalled_at_t": t,
                "inner_max_iter": max_iter,
                "partial_steps": partial,
            });
            Ok(RunOutcome {
                exit_code: 2,
                report_path: write_report(out_dir, &value)?,
            })
        }
        Err(other) => Err(other),
    }
}

fn run_flow(
    config: &ExperimentConfig,
    out_dir: &Path,
    theta: f64,
    seed: u64,
    policy: &TruncationPolicy,
) -> Result<RunOutcome> {
    let section = config.flow.as_ref().expect("validated");
    let mut start = match (&section.input, &section.monomial) {
        (Some(path), None) => load_input(path, theta)?,
        (None, Some((m, n))) => TorusElement::monomial(theta, *m, *n, Complex64::new(1.0, 0.0))?,
        _ => unreachable!("validated"),
    };
    if let Some(p) = &section.perturbation {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_self_adjoint(theta, p.radius, p.rho, &mut rng)?;
        let rot = exp_element(
            &h.scale(Complex64::new(0.0, p.magnitude)),
            policy,
            section.flow.exp_tol,
        )?;
        start = start.twisted_mul(&rot, policy)?;
    }
    let trace = gradient_flow(&start, section.steps, &section.flow, policy)?;
    let lines: Vec<String> = trace
        .steps
        .iter()
        .map(|s| {
            format!(
                "{},{},{},{},{}",
                s.step,
                fmt(s.energy),
                fmt(s.grad_norm_l2),
                fmt(s.unitarity_defect),
                fmt(s.step_size)
            )
        })
        .collect();
    write_csv(
        &out_dir.join("flow.csv"),
        "step,energy,grad_norm,unitarity_defect,step_size",
        &lines,
    )?;
    write_element(&out_dir.join("terminal.json"), &trace.terminal)?;
    let last = trace.steps.last().expect("flow records at least one step");
    let value = json!({
        "kind": "flow",
        "theta": theta,
        "theta_string": config.theta,
        "seed": seed,
        "verdict": trace.verdict,
        "steps": trace.steps.len(),
        "reunitarizations": trace.reunitarizations,
        "terminal_energy": last.energy,
        "terminal_grad_norm": last.grad_norm_l2,
        "terminal_unitarity_defect": last.unitarity_defect,
    });
    let exit_code = match trace.verdict {
        FlowVerdict::Stalled => 2,
        _ => 0,
    };
    Ok(RunOutcome {
        exit_code,
        report_path: write_report(out_dir, &value)?,
    })
}

fn run_scan(config: &ExperimentConfig, out_dir: &Path, theta: f64) -> Result<RunOutcome> {
    let section = config.scan.as_ref().expect("validated");
    let xs: Vec<f64> = grid_points(section.x_min, section.x_max, section.x_steps);
    let ys: Vec<f64> = grid_points(section.y_min, section.y_max, section.y_steps);
    let mut points = Vec::with_capacity(xs.len() * ys.len());
    for &x in &xs {
        for &y in &ys {
            points.push((x, y));
        }
    }
    let rows: Result<Vec<(f64, f64, f64, usize)>> = points
        .par_iter()
        .map(|&(x, y)| {
            let c = if section.lattice_units {
                // πi(x + iy) = π(−y + ix)
                Complex64::new(-PI * y, PI * x)
            } else {
                Complex64::new(x, y)
            };
            let f = TorusElement::scalar(theta, c)?;
            let scan = cr_kernel_scan(&f, section.radius, section.kernel_threshold_rel)?;
            Ok((c.re, c.im, scan.sigma_min(), scan.kernel_dim_estimate))
        })
        .collect();
    let rows = rows?;
    let lines: Vec<String> = rows
        .iter()
        .map(|(re, im, sigma, dim)| format!("{},{},{},{dim}", fmt(*re), fmt(*im), fmt(*sigma)))
        .collect();
    write_csv(
        &out_dir.join("scan.csv"),
        "re_tau_f,im_tau_f,sigma_min,kernel_dim_estimate",
        &lines,
    )?;
    let kernel_hits = rows.iter().filter(|r| r.3 > 0).count();
    let report = json!({
        "kind": "scan",
        "theta": theta,
        "theta_string": config.theta,
        "radius": section.radius,
        "grid_points": rows.len(),
        "kernel_hits": kernel_hits,
        "sigma_min_overall": rows.iter().map(|r| r.2).fold(f64::INFINITY, f64::min),
    });
    Ok(RunOutcome {
        exit_code: 0,
        report_path: write_report(out_dir, &report)?,
    })
}

fn grid_points(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps)
        .map(|i| lo + (hi - lo) * (i as f64) / ((steps - 1) as f64))
        .collect()
}

/// Largest normalized defect of each algebraic identity over seeded random
/// element pairs.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub pairs: usize,
    pub radius: i64,
    /// `UV − e^{2πiθ}VU`, max coefficient modulus.
    pub commutation: f64,
    /// `|τ(δⱼ(a)b) + τ(δⱼ(b)a)| / (‖a‖₁‖b‖₁(1+R)·2π)`.
    pub integration_by_parts: f64,
    /// `|τ(ab) − τ(ba)| / (‖a‖₁‖b‖₁)`.
    pub trace_property: f64,
    /// `‖4∂∂̄a − Δa‖₂ / max(1, ‖Δa‖₂)`.
    pub dbar_factorization: f64,
    /// `max |τ(∂̄a)|`.
    pub constant_term: f64,
    /// Relative excess of `‖ab‖` over `‖a‖‖b‖` in the bootstrap norms.
    pub bootstrap_submultiplicativity: f64,
    pub max_defect: f64,
}

/// Runs the identity suite: commutation, integration by parts, the trace
/// property, `Δ = 4∂∂̄`, the vanishing constant term of ∂̄, and bootstrap
/// norm submultiplicativity, over `pairs` seeded random element pairs.
pub fn identity_suite(
    theta: f64,
    pairs: usize,
    radius: i64,
    rho: f64,
    seed: u64,
    policy: &TruncationPolicy,
) -> Result<IdentityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = TorusElement::monomial(theta, 1, 0, Complex64::new(1.0, 0.0))?;
    let v = TorusElement::monomial(theta, 0, 1, Complex64::new(1.0, 0.0))?;
    let uv = u.twisted_mul(&v, policy)?;
    let vu = v.twisted_mul(&u, policy)?;
    let comm = uv.lincomb(&vu, -Complex64::from_polar(1.0, TAU * theta))?;
    let commutation = comm
        .entries()
        .iter()
        .map(|(_, _, c)| c.norm())
        .fold(0.0, f64::max);

    let mut integration_by_parts = 0.0f64;
    let mut trace_property = 0.0f64;
    let mut dbar_factorization = 0.0f64;
    let mut constant_term = 0.0f64;
    let mut bootstrap = 0.0f64;
    for _ in 0..pairs {
        let a = random_element(theta, radius, rho, &mut rng)?;
        let b = random_element(theta, radius, rho, &mut rng)?;
        let scale_l1 = a.l1_norm() * b.l1_norm();
        let r = 1 + a.support_radius().max(b.support_radius());
        for j in [1u8, 2] {
            let t1 = a.derive(j).twisted_mul(&b, policy)?.trace();
            let t2 = b.derive(j).twisted_mul(&a, policy)?.trace();
            integration_by_parts = integration_by_parts
                .max((t1 + t2).norm() / (scale_l1 * (r as f64) * TAU));
        }
        let ab = a.twisted_mul(&b, policy)?;
        let ba = b.twisted_mul(&a, policy)?;
        trace_property = trace_property.max((ab.trace() - ba.trace()).norm() / scale_l1);

        let lap = a.laplacian();
        let diff = a.dbar().dholo().scale_re(4.0).sub(&lap)?;
        dbar_factorization =
            dbar_factorization.max(diff.l2_norm() / lap.l2_norm().max(1.0));

        constant_term = constant_term.max(a.dbar().trace().norm());

        for k in [1u8, 2] {
            let lhs = ab.bootstrap_norm(k);
            let rhs = a.bootstrap_norm(k) * b.bootstrap_norm(k);
            bootstrap = bootstrap.max((lhs - rhs).max(0.0) / rhs);
        }
    }
    let max_defect = [
        commutation,
        integration_by_parts,
        trace_property,
        dbar_factorization,
        constant_term,
        bootstrap,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(IdentityReport {
        pairs,
        radius,
        commutation,
        integration_by_parts,
        trace_property,
        dbar_factorization,
        constant_term,
        bootstrap_submultiplicativity: bootstrap,
        max_defect,
    })
}
