//! Counts small residually trivial points and compares #S · Tf with L².

use ntheight::experiments::{point_cell, run_zero_count, ExperimentConfig};

fn main() -> ntheight::Result<()> {
    let cfg = ExperimentConfig::from_json(
        r#"{"schema": 1, "curve": {"a": 0, "b": -2}, "q": [7],
            "aux": {"L": 3, "N": 2, "T0": 8},
            "search": {"naive_cap": 2.3, "hhat_cap": 3.0, "tol": 1e-6}}"#,
    )?;
    let r = run_zero_count(&cfg)?;
    for c in &r.candidates {
        println!("{}: ĥ = {:.6}  identity places {}  in S {}", point_cell(&c.point), c.hhat.value, c.identity_places, c.in_s);
    }
    println!("#S = {}  Tf = {}  #S·Tf = {}  L² = {}  violation {}", r.s_count, r.tf, r.lhs, r.rhs, r.violation);
    Ok(())
}
