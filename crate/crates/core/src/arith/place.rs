//! Places of a number field: primes of `Z[θ]` and archimedean embeddings,
//! together with the local maps `K -> K_w`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::fp::{self, FpPoly};
use super::integer::valuation_rat;
use super::numfield::{NfElement, NumberField};
use super::padic::{hensel_lift, PadicCtx, PadicField, PadicNumber};
use crate::error::{Error, Result};

/// A prime of `K` above `p`, described by an irreducible factor of the
/// defining polynomial modulo `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimeIdeal {
    pub p: u64,
    pub residue_degree: u32,
    pub ramification: u32,
    pub factor_poly: FpPoly,
    pub norm: BigUint,
}

impl PrimeIdeal {
    pub fn new(p: u64, factor_poly: FpPoly, ramification: u32) -> Self {
        let f = (factor_poly.len() - 1) as u32;
        PrimeIdeal { p, residue_degree: f, ramification, factor_poly, norm: BigUint::from(p).pow(f) }
    }

    /// The unique prime of `Q` above `p`.
    pub fn rational(p: u64) -> Self {
        Self::new(p, vec![0, 1], 1)
    }

    pub fn norm_u64(&self) -> Option<u64> {
        u64::try_from(&self.norm).ok()
    }

    /// Local field `K_w` (unramified by construction).
    pub fn local_field(&self) -> Result<PadicCtx> {
        if self.ramification != 1 {
            return Err(Error::BadPrime(self.p));
        }
        PadicField::new(self.p, &self.factor_poly)
    }

    /// Image of `θ` in `K_w` to absolute precision `k`.
    pub fn theta(&self, field: &NumberField, k: i64) -> Result<PadicNumber> {
        let ctx = self.local_field()?;
        let start = if self.residue_degree == 1 {
            let r = (self.p - self.factor_poly[0] % self.p) % self.p;
            PadicNumber::from_i64(&ctx, r as i64, k)
        } else {
            PadicNumber::generator(&ctx, k)
        };
        hensel_lift(field.poly(), &start, k.max(1))
    }

    /// `α` in `K_w`, with absolute precision at least `k` on the integral part.
    pub fn embed(&self, alpha: &NfElement, k: i64) -> Result<PadicNumber> {
        let ctx = self.local_field()?;
        let den = alpha.denominator();
        let vd = valuation_rat(&num_rational::BigRational::from_integer(den.clone()), self.p);
        let k = k + vd.max(0);
        let theta = self.theta(alpha.field(), k)?;
        let num = alpha.numerator_poly();
        let mut acc = PadicNumber::zero(&ctx, k);
        for c in num.iter().rev() {
            acc = acc.mul(&theta).add(&PadicNumber::from_int(&ctx, c, k));
        }
        let inv_den = PadicNumber::from_rational(&ctx, &num_rational::BigRational::new(BigInt::one(), den), k);
        Ok(acc.mul(&inv_den))
    }

    /// Exact `v_w(α)` for `α ≠ 0`.
    pub fn valuation(&self, alpha: &NfElement) -> Result<i64> {
        if alpha.is_zero() {
            return Err(Error::ZeroElement);
        }
        if let Some(r) = alpha.as_rational() {
            return Ok(valuation_rat(r, self.p) * self.ramification as i64);
        }
        // v_w(a) <= v_p(N(a)) for integral a, so that many digits separate it from zero
        let den = alpha.denominator();
        let num = alpha.scale(&num_rational::BigRational::from_integer(den.clone()));
        let bound = valuation_rat(&num.norm(), self.p);
        let x = self.embed(&num, bound + 1)?;
        let vn = x.valuation().ok_or_else(|| {
            Error::PrecisionExhausted("p-adic embedding lost the element".into())
        })?;
        let vd = valuation_rat(&num_rational::BigRational::from_integer(den), self.p);
        Ok(vn - vd)
    }

    /// Residue class of `α` in `F_{q}` (a polynomial in the residue generator).
    pub fn residue(&self, alpha: &NfElement) -> Result<FpPoly> {
        self.embed(alpha, 1)?.residue()
    }
}

impl fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g: Vec<String> = self.factor_poly.iter().map(|c| c.to_string()).collect();
        write!(f, "({}, [{}]) e={} f={}", self.p, g.join(","), self.ramification, self.residue_degree)
    }
}

/// A place of a number field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Place {
    /// Index into the field's archimedean places (reals first).
    Infinite(usize),
    Finite(PrimeIdeal),
}

impl Place {
    /// Local degree `d_w = [K_w : Q_p]` (or `[K_w : R]`).
    pub fn local_degree(&self, field: &NumberField) -> u32 {
        match self {
            Place::Infinite(i) => field.embeddings().local_degree(*i),
            Place::Finite(w) => w.residue_degree * w.ramification,
        }
    }
}

/// Residue map helper: `g` evaluated at a residue-field element.
pub fn residue_eval(g: &[u64], x: &[u64], modulus: &[u64], p: u64) -> FpPoly {
    let mut acc: FpPoly = Vec::new();
    for c in g.iter().rev() {
        acc = fp::add(&fp::mulmod(&acc, x, modulus, p), &[*c], p);
    }
    let mut acc = fp::rem(&acc, modulus, p);
    fp::trim(&mut acc);
    acc
}
