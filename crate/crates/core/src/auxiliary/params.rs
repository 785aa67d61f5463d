use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters meeting both auxiliary constraints for a given `ψ_q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamChoice {
    pub psi: f64,
    pub q: u64,
    #[serde(rename = "L")]
    pub l: u32,
    /// `ψ · ln q`.
    pub psi_term: f64,
    pub rho: f64,
    #[serde(rename = "T0")]
    pub t0: u32,
    /// Upper bound on the vanishing order forced at the far point.
    #[serde(rename = "Tf_cap")]
    pub tf_cap: f64,
}

/// Largest `ρ` with `ρ ln L ≤ ψ ln q` (found by bisection), provided
/// `1/L ≤ ψ ln q`.
pub fn choose_parameters(psi: f64, q: u64, l: u32) -> Result<ParamChoice> {
    if l < 3 {
        return Err(Error::Precondition("L must be at least 3".into()));
    }
    if q < 2 {
        return Err(Error::Precondition("q must be at least 2".into()));
    }
    let psi_term = psi * (q as f64).ln();
    if !(psi_term > 0.0) {
        return Err(Error::Infeasible(format!("ψ ln q = {psi_term} is not positive")));
    }
    let lf = l as f64;
    if 1.0 / lf > psi_term {
        return Err(Error::Infeasible(format!("1/L = {} exceeds ψ ln q = {psi_term}", 1.0 / lf)));
    }
    let ok = |rho: f64| rho * lf.ln() <= psi_term;
    let (mut lo, mut hi) = (0.0f64, 2.0f64);
    if ok(hi) {
        lo = hi;
    }
    while hi - lo > 1e-7 && !ok(hi) {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rho = lo;
    let t0 = ((rho * lf * lf).floor() as u32).min(2 * l * l - 1);
    let tf_cap = (t0 as f64 / 2.0).min(rho * lf * lf * psi_term / lf.ln());
    Ok(ParamChoice { psi, q, l, psi_term, rho, t0, tf_cap })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        let c = choose_parameters(1.0, 5, 10).unwrap();
        assert!((c.rho - 0.69897).abs() < 1e-5, "{}", c.rho);
        assert_eq!(c.t0, 69);
        assert!((c.tf_cap - 34.5).abs() < 1e-12);
    }

    #[test]
    fn infeasible() {
        assert!(matches!(choose_parameters(0.0, 5, 10), Err(Error::Infeasible(_))));
        assert!(matches!(choose_parameters(0.001, 5, 10), Err(Error::Infeasible(_))));
        assert!(matches!(choose_parameters(1.0, 5, 2), Err(Error::Precondition(_))));
    }
}
