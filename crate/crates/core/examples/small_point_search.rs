//! Searches Q(i) for points of small naive height on y² = x³ − 2 and
//! prints the certified canonical heights.

use ntheight::arith::nf_create;
use ntheight::elliptic::CurveSpec;
use ntheight::experiments::point_cell;
use ntheight::heights::{search_small_points, SearchOptions};

fn main() -> ntheight::Result<()> {
    let k = nf_create(&[1, 0, 1], 64)?;
    let spec: CurveSpec = serde_json::from_str(r#"{"a": 0, "b": -2}"#).expect("curve spec");
    let e = spec.build_over(&k)?;
    let opts = SearchOptions { naive_cap: 5f64.ln(), hhat_cap: 3.0, ..SearchOptions::default() };
    let rec = search_small_points(&e, &k, &opts)?;
    println!("{} candidates in a box of {}; {} points", rec.candidates, rec.box_bound, rec.points_found);
    for sp in &rec.points {
        println!("  {}  h = {:.4}  ĥ = {:.6}  torsion {}", point_cell(&sp.point), sp.naive_height, sp.hhat.value, sp.torsion);
    }
    if let Some(h) = rec.min_nonzero_hhat {
        println!("smallest nonzero ĥ = {:.6}", h.value);
    }
    Ok(())
}
