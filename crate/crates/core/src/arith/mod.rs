//! Exact arithmetic: integers, polynomials, number fields, archimedean and
//! p-adic completions, and global heights.

pub mod complex;
pub mod factor;
pub mod fp;
pub mod height;
pub mod integer;
pub mod numfield;
pub mod padic;
pub mod place;
pub mod poly;

pub use height::{liouville_check, product_formula_defect, weil_height, Enclosed, LiouvilleReport};
pub use numfield::{Field, FieldSpec, NfElement, NumberField};
pub use padic::{padic_hensel_root, PadicCtx, PadicField, PadicNumber};
pub use place::{Place, PrimeIdeal};

/// Builds `Q[x]/(f)` from integer coefficients (constant term first).
pub fn nf_create(f: &[i64], precision: u32) -> crate::error::Result<Field> {
    NumberField::new(poly::zpoly(f), precision)
}
