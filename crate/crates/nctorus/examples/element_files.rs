//! The element file format and the config-driven harness, used as a
//! library: write an element, validate it, run an experiment end to end.

use num_complex::Complex64;

use nctorus::config::ExperimentConfig;
use nctorus::element::TorusElement;
use nctorus::fileio::{element_to_json, validate_element_file, write_element};
use nctorus::harness::run;

fn main() -> nctorus::Result<()> {
    let theta = 0.618_033_988_749_894_9_f64;
    let dir = std::env::temp_dir().join("nctorus-element-files-example");
    std::fs::create_dir_all(&dir)?;

    // an element file is JSON-shaped text with θ as a decimal string
    let u = TorusElement::monomial(theta, 1, 0, Complex64::new(1.0, 0.0))?;
    let h = u.add(&u.adjoint())?;
    println!("element file for U + U*:\n{}", element_to_json(&h));

    let h_path = dir.join("h.json");
    write_element(&h_path, &h)?;
    let report = validate_element_file(&h_path)?;
    println!(
        "validation: radius {}, {} coefficients, l1 {}, H1 {:.6}, self-adjoint defect {}",
        report.support_radius,
        report.coefficients,
        report.l1_norm,
        report.h1_norm,
        report.self_adjoint_defect
    );

    // drive the harness directly with a spectra experiment
    let out_dir = dir.join("out");
    let config_text = format!(
        r#"{{
  "schema_version": 1,
  "kind": "spectra",
  "theta": "0.6180339887498949",
  "output_dir": {:?},
  "spectra": {{"input": {:?}, "min_q": 21, "grid": 4}}
}}"#,
        out_dir.to_str().unwrap(),
        h_path.to_str().unwrap()
    );
    let config_path = dir.join("spectra.json");
    std::fs::write(&config_path, config_text)?;
    let config = ExperimentConfig::from_file(&config_path)?;
    let outcome = run(&config, None, None)?;
    println!(
        "\nspectra run: exit {}, report at {}",
        outcome.exit_code,
        outcome.report_path.display()
    );
    let csv = std::fs::read_to_string(out_dir.join("spectra.csv"))?;
    println!("spectra.csv: {} rows", csv.lines().count() - 1);
    for line in csv.lines().take(4) {
        println!("  {line}");
    }
    Ok(())
}
