//! Builds a tower of fields in which 5 splits completely at every level,
//! then prints the defining polynomials and the density of small primes.

use ntheight::splitting::{build_totally_padic_tower, count_primes_norm, psi_estimate, DEFAULT_TOWER_BUDGET};

fn main() -> ntheight::Result<()> {
    let tower = build_totally_padic_tower(5, &[2, 4], 0, DEFAULT_TOWER_BUDGET)?;
    for (i, k) in tower.levels().iter().enumerate() {
        let poly: Vec<String> = k.poly().iter().map(|c| c.to_string()).collect();
        let n5 = count_primes_norm(k, 5)?;
        println!("level {i}: degree {} poly [{}]  N_5 = {n5}", k.degree(), poly.join(", "));
    }
    for q in [5, 7, 11] {
        let est = psi_estimate(&tower, q)?;
        let ratios: Vec<String> = est.ratios.iter().map(|r| r.to_string()).collect();
        println!("q = {q}: ratios {}", ratios.join(" "));
    }
    // The spec of a tower is plain JSON and reloads with `ntheight psi --tower`.
    println!("{}", serde_json::to_string(&tower.to_spec()?).expect("tower serializes"));
    Ok(())
}
