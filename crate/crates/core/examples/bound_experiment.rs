//! Minimum canonical height along a 7-adic tower against ψ log p / p².

use ntheight::experiments::{run_bound_experiment, ExperimentConfig, Tabular};

fn main() -> ntheight::Result<()> {
    let cfg = ExperimentConfig::from_json(
        r#"{"schema": 1, "curve": {"a": 0, "b": -2}, "p": 7,
            "tower_build": {"p": 7, "degrees": [2]},
            "search": {"naive_cap": 1.5, "hhat_cap": 3.0}, "amplify": true}"#,
    )?;
    let r = run_bound_experiment(&cfg)?;
    print!("{}", r.table().to_csv());
    println!("ψ_p = {}  shape ψ log p / p² = {:.6}", r.psi_p, r.epsilon_shape.value);
    match (r.min_nonzero_hhat, r.ratio) {
        (Some(h), Some(ratio)) => println!("min ĥ = {:.6}  ratio to shape = {:.3}", h.value, ratio.value),
        _ => println!("no certified nonzero point found"),
    }
    if let Some(e) = r.first_error() {
        println!("level error (exit code {}): {}", e.exit_code, e.message);
    }
    Ok(())
}
