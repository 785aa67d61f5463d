//! In Q(√2), where 7 splits, compares the amplified point's identity places with the primed sum over
//! places of small norm.

use ntheight::experiments::{point_cell, run_multiplace_experiment, ExperimentConfig};

fn main() -> ntheight::Result<()> {
    let cfg = ExperimentConfig::from_json(
        r#"{"schema": 1, "curve": {"a": 0, "b": -2}, "p": 7, "norm_cap": 30,
            "fields": [[-2, 0, 1]], "points": ["O", ["3", "5"]], "amplify": true}"#,
    )?;
    let r = run_multiplace_experiment(&cfg)?;
    for k in &r.fields {
        println!("field {:?}: primed sum {:.4}  bound shape {:.4}", k.poly, k.primed_sum.value, k.bound_shape.value);
        for pt in &k.points {
            let m = pt.amplified_by.unwrap_or(1);
            let fraction = pt.fraction.map_or(f64::NAN, |f| f.value);
            println!("  [{m}]{}: φ = {:.4}  fraction {fraction:.3}", point_cell(&pt.point), pt.phi.value);
        }
    }
    Ok(())
}
