//! Builds the auxiliary section for L = 3, N = 2 on y² = x³ − 2 and shows
//! the parameter calibration behind a default T0.

use ntheight::auxiliary::{build_aux_section, choose_parameters};
use ntheight::elliptic::Curve;

fn main() -> ntheight::Result<()> {
    let choice = choose_parameters(1.0, 5, 10)?;
    println!("psi = 1, q = 5, L = 10: rho = {:.5}, T0 = {}, Tf cap = {}", choice.rho, choice.t0, choice.tf_cap);

    let e = Curve::over_q(0, -2)?;
    let f = build_aux_section(&e, 2, 3, 8)?;
    let nonzero: Vec<(usize, String)> =
        f.coeffs.iter().enumerate().filter(|(_, c)| **c != 0.into()).map(|(i, c)| (i, c.to_string())).collect();
    println!("L = {}, N = {}, T0 = {}: {} coefficients, nonzero {:?}", f.l, f.n, f.t0, f.coeffs.len(), nonzero);
    println!("vanishing order at the origin: {}", f.tf_origin);
    // The saved form is what `ntheight aux verify-drop --aux` reads back.
    let text = serde_json::to_string(&f).expect("section serializes");
    println!("{} bytes of JSON", text.len());
    Ok(())
}
