use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{NfElement, PadicNumber};
use crate::error::{Error, Result};

/// Coefficient ring for truncated series. Elements carry their own context
/// (field, p-adic precision), so constants are built from a template.
pub trait Ring: Clone + Debug + PartialEq + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn embed(&self, r: &BigRational) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn inverse(&self) -> Result<Self>;

    fn embed_i64(&self, n: i64) -> Self {
        self.embed(&BigRational::from_integer(n.into()))
    }
}

impl Ring for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn embed(&self, r: &BigRational) -> Self {
        r.clone()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroElement);
        }
        Ok(self.recip())
    }
}

impl Ring for NfElement {
    fn zero_like(&self) -> Self {
        self.field().zero()
    }
    fn one_like(&self) -> Self {
        self.field().one()
    }
    fn embed(&self, r: &BigRational) -> Self {
        self.field().from_rational(r.clone())
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn inverse(&self) -> Result<Self> {
        self.inv()
    }
}

impl Ring for PadicNumber {
    fn zero_like(&self) -> Self {
        PadicNumber::zero(self.ctx(), self.precision().max(0))
    }
    fn one_like(&self) -> Self {
        PadicNumber::one(self.ctx(), self.precision().max(0))
    }
    fn embed(&self, r: &BigRational) -> Self {
        PadicNumber::from_rational(self.ctx(), r, self.precision().max(0))
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        PadicNumber::add(self, o)
    }
    fn minus(&self, o: &Self) -> Self {
        PadicNumber::sub(self, o)
    }
    fn negated(&self) -> Self {
        PadicNumber::neg(self)
    }
    fn times(&self, o: &Self) -> Self {
        PadicNumber::mul(self, o)
    }
    fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::PrecisionExhausted("p-adic unit expected, found zero to working precision".into()));
        }
        self.inv()
    }
}
