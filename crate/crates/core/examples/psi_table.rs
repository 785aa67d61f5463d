//! Splitting-ratio table along a built tower, as the `psi` command prints it.

use ntheight::experiments::{run_psi_report, to_json, ExperimentConfig, ReportMeta, Tabular};

fn main() -> ntheight::Result<()> {
    let cfg = ExperimentConfig::from_json(
        r#"{"schema": 1, "tower_build": {"p": 5, "degrees": [2, 4]}, "q": [5, 7, 25], "seed": 1}"#,
    )?;
    let report = run_psi_report(&cfg)?;
    print!("{}", report.table().to_csv());
    println!("{}", to_json(&ReportMeta::new("psi", &cfg), &report));
    Ok(())
}
