//! Auxiliary sections on `E × E` vanishing along `P ↦ (P, [N]P)`.
//!
//! Local expansions use the formal-group parameter `z = -x/y`. A section
//! `F = Σ b_j u_j ⊗ v_j` is trivialized near the origin by `z^{2L}` in each
//! factor, so its pullback is a power series whose first `T0 + 1`
//! coefficients are the linear conditions solved by the Siegel solver.

mod basis;
mod formal;
mod jet;
mod params;
mod ring;
mod section;
mod series;
mod siegel;

pub use basis::{
    normalized_pullback, pullback_via_chord, vanishing_system, EMonomial, SectionBasis, VanishingSystem,
};
pub use formal::{
    formal_add, formal_group_law, formal_w, formal_xy, mult_series, rational_coefficients, w_coefficients, BiSeries,
    MAX_FORMAL_PRECISION, MAX_LAW_PRECISION,
};
pub use jet::{jet_evaluate, product_formula_ledger, verify_drop, DropReport, JetReport, ProductFormulaLedger};
pub use params::{choose_parameters, ParamChoice};
pub use ring::Ring;
pub use section::{build_aux_section, AuxSection, AUX_SCHEMA};
pub use series::{FormalSeries, Series};
pub use siegel::{independent_rows, integer_kernel, lll_reduce, siegel_solve, SiegelSolution};

/// Serializes big integers as decimal strings.
pub(crate) mod bigint_strings {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|c| c.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<String>::deserialize(d)?.iter().map(|t| t.parse().map_err(D::Error::custom)).collect()
    }
}

/// A single big integer as a decimal string.
pub(crate) mod bigint_string {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}
