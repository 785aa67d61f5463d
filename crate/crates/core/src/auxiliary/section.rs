use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::basis::{normalized_pullback, pullback_via_chord, vanishing_system};
use super::siegel::siegel_solve;
use crate::elliptic::{Curve, CurveSpec};
use crate::error::{Error, Result};

pub const AUX_SCHEMA: u32 = 1;

/// A section `F = Σ b_j u_j ⊗ v_j` vanishing to order `T0` along the image of
/// `P ↦ (P, [N]P)`, with the order actually attained at the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxSection {
    pub schema: u32,
    pub curve: CurveSpec,
    #[serde(rename = "L")]
    pub l: u32,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "T0")]
    pub t0: u32,
    #[serde(with = "super::bigint_strings")]
    pub coeffs: Vec<BigInt>,
    /// Common denominator cleared from the vanishing conditions.
    #[serde(with = "super::bigint_string")]
    pub denominator: BigInt,
    #[serde(rename = "height_of_F")]
    pub height_of_f: f64,
    pub bound: f64,
    pub rank: usize,
    pub kernel_margin: i64,
    pub tf_origin: u32,
}

impl AuxSection {
    pub fn curve(&self) -> Result<crate::elliptic::CurveRef> {
        self.curve.build()
    }
}

pub fn build_aux_section(e: &Curve, n: u64, l: u32, t0: u32) -> Result<AuxSection> {
    let unknowns = 4 * l as usize * l as usize;
    let conditions = t0 as usize + 1;
    if conditions >= unknowns {
        return Err(Error::DimensionError(format!("{conditions} conditions for {unknowns} unknowns")));
    }
    if conditions > 2 * (l * l) as usize {
        return Err(Error::Precondition(format!("T0 + 1 = {conditions} exceeds 2L² = {}", 2 * l * l)));
    }
    let sys = vanishing_system(e, n, l, t0)?;
    let sol = siegel_solve(&sys.integer)?;
    let check = pullback_via_chord(e, n, l, &sol.vector, conditions)?;
    if let Some(k) = check.order() {
        return Err(Error::Precondition(format!("solution fails independent check at z^{k}")));
    }
    let cap = 4 * l as usize + unknowns + t0 as usize;
    let full = normalized_pullback(e, n, l, &sol.vector, cap + 1)?;
    let tf_origin = full.order().ok_or(Error::IdenticallyZeroOnImage(cap))? as u32;
    Ok(AuxSection {
        schema: AUX_SCHEMA,
        curve: e.to_spec(),
        l,
        n,
        t0,
        coeffs: sol.vector,
        denominator: sys.denominator,
        height_of_f: sol.height,
        bound: sol.bound,
        rank: sol.rank,
        kernel_margin: unknowns as i64 - conditions as i64,
        tf_origin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mordell_fixture() {
        let e = Curve::over_q(0, -2).unwrap();
        let s = build_aux_section(&e, 2, 3, 8).unwrap();
        assert_eq!(s.coeffs.len(), 36);
        assert_eq!(s.kernel_margin, 27);
        assert!(s.tf_origin > 8);
        assert!(s.height_of_f <= s.bound, "{} > {}", s.height_of_f, s.bound);
        let json = serde_json::to_string(&s).unwrap();
        let back: AuxSection = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        eprintln!("{json}");
    }

    #[test]
    fn parameter_errors() {
        let e = Curve::over_q(0, -2).unwrap();
        assert!(matches!(build_aux_section(&e, 2, 2, 15), Err(Error::DimensionError(_))));
        assert!(matches!(build_aux_section(&e, 2, 3, 18), Err(Error::Precondition(_))));
    }
}
