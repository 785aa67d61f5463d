//! Unramified p-adic fields `Q_p[t]/(G)` with truncated-precision arithmetic.
//!
//! A nonzero number is stored as `p^val * u` where `u` is a unit known
//! modulo `p^(prec - val)`; `prec` is the absolute precision. Zero carries
//! only an absolute precision: it means "divisible by `p^prec`".

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::fp::{self, FpPoly};
use super::integer::{is_prime_u64, valuation_int};
use crate::error::{Error, Result};

/// The unramified extension of `Q_p` of degree `f`, given by a monic integer
/// lift `G` of an irreducible `g` in `F_p[t]`.
#[derive(Debug, PartialEq, Eq)]
pub struct PadicField {
    p: u64,
    modulus: Vec<BigInt>,
    residue: FpPoly,
}

pub type PadicCtx = Arc<PadicField>;

impl PadicField {
    /// `Q_p` itself.
    pub fn rational(p: u64) -> PadicCtx {
        Arc::new(PadicField { p, modulus: vec![BigInt::zero(), BigInt::one()], residue: vec![0, 1] })
    }

    /// Extension defined by the monic irreducible `g` mod `p`.
    pub fn new(p: u64, g: &[u64]) -> Result<PadicCtx> {
        if !is_prime_u64(p) {
            return Err(Error::Precondition(format!("{p} is not prime")));
        }
        let g = fp::monic(g, p);
        if g.len() <= 2 {
            return Ok(Self::rational(p));
        }
        if !fp::is_irreducible(&g, p) {
            return Err(Error::InvalidPolynomial("residue modulus is reducible".into()));
        }
        Ok(Arc::new(PadicField { p, modulus: fp::to_z(&g), residue: g }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Residue degree `f`.
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// Residue field size `q = p^f`.
    pub fn q(&self) -> BigInt {
        BigInt::from(self.p).pow(self.degree() as u32)
    }

    pub fn residue_modulus(&self) -> &[u64] {
        &self.residue
    }

    fn pk(&self, k: i64) -> BigInt {
        BigInt::from(self.p).pow(k.max(0) as u32)
    }

    /// Reduce an integer polynomial modulo `(G, m)` to `f` coefficients.
    fn reduce(&self, mut a: Vec<BigInt>, m: &BigInt) -> Vec<BigInt> {
        let f = self.degree();
        if a.len() > f {
            for k in (f..a.len()).rev() {
                let c = std::mem::take(&mut a[k]);
                if c.is_zero() {
                    continue;
                }
                for i in 0..f {
                    if !self.modulus[i].is_zero() {
                        let t = &c * &self.modulus[i];
                        a[k - f + i] -= t;
                    }
                }
            }
        }
        a.resize(f, BigInt::zero());
        for c in a.iter_mut() {
            *c = c.mod_floor(m);
        }
        a
    }
}

/// Element of an unramified p-adic field at finite precision.
#[derive(Clone)]
pub struct PadicNumber {
    ctx: PadicCtx,
    val: i64,
    prec: i64,
    unit: Vec<BigInt>,
}

impl PartialEq for PadicNumber {
    fn eq(&self, o: &Self) -> bool {
        self.ctx == o.ctx && self.val == o.val && self.prec == o.prec && self.unit == o.unit
    }
}

impl fmt::Debug for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "O({}^{})", self.ctx.p, self.prec);
        }
        let digits: Vec<String> = self.unit.iter().map(|c| c.to_string()).collect();
        write!(f, "{}^{} * [{}] + O({}^{})", self.ctx.p, self.val, digits.join(", "), self.ctx.p, self.prec)
    }
}

impl PadicNumber {
    pub fn ctx(&self) -> &PadicCtx {
        &self.ctx
    }

    pub fn zero(ctx: &PadicCtx, prec: i64) -> Self {
        PadicNumber { ctx: ctx.clone(), val: prec, prec, unit: Vec::new() }
    }

    pub fn one(ctx: &PadicCtx, prec: i64) -> Self {
        Self::from_int(ctx, &BigInt::one(), prec)
    }

    /// Builds `digits` (known modulo `p^(prec - base_val)`) times `p^base_val`,
    /// pulling out any further powers of `p`.
    fn make(ctx: &PadicCtx, base_val: i64, prec: i64, digits: Vec<BigInt>) -> Self {
        if prec <= base_val {
            return Self::zero(ctx, prec);
        }
        let rel = prec - base_val;
        let m = ctx.pk(rel);
        let digits: Vec<BigInt> = digits.into_iter().map(|c| c.mod_floor(&m)).collect();
        let shift = digits
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| valuation_int(c, ctx.p) as i64)
            .min();
        let Some(shift) = shift else {
            return Self::zero(ctx, prec);
        };
        let val = base_val + shift;
        if val >= prec {
            return Self::zero(ctx, prec);
        }
        let d = ctx.pk(shift);
        let m2 = ctx.pk(prec - val);
        let unit = digits.into_iter().map(|c| (c / &d).mod_floor(&m2)).collect();
        PadicNumber { ctx: ctx.clone(), val, prec, unit }
    }

    pub fn from_int(ctx: &PadicCtx, n: &BigInt, prec: i64) -> Self {
        let mut digits = vec![BigInt::zero(); ctx.degree()];
        digits[0] = n.clone();
        Self::make(ctx, 0, prec, digits)
    }

    pub fn from_i64(ctx: &PadicCtx, n: i64, prec: i64) -> Self {
        Self::from_int(ctx, &BigInt::from(n), prec)
    }

    pub fn from_rational(ctx: &PadicCtx, r: &BigRational, prec: i64) -> Self {
        if r.is_zero() {
            return Self::zero(ctx, prec);
        }
        let vd = valuation_int(r.denom(), ctx.p) as i64;
        let d_unit = r.denom() / ctx.pk(vd);
        if prec + vd <= 0 {
            return Self::zero(ctx, prec);
        }
        // numerator known exactly; shift the window so the result has abs precision prec
        let m = ctx.pk(prec + vd);
        let inv = mod_inverse(&d_unit, &m);
        let mut digits = vec![BigInt::zero(); ctx.degree()];
        digits[0] = r.numer() * inv;
        Self::make(ctx, -vd, prec, digits)
    }

    /// The class of the generator `t` of the residue extension (or `0` when `f = 1`).
    pub fn generator(ctx: &PadicCtx, prec: i64) -> Self {
        let mut digits = vec![BigInt::zero(); ctx.degree()];
        if ctx.degree() > 1 {
            digits[1] = BigInt::one();
        }
        Self::make(ctx, 0, prec, digits)
    }

    /// Element `sum c_i t^i` for integer coefficients.
    pub fn from_digits(ctx: &PadicCtx, coeffs: &[BigInt], prec: i64) -> Self {
        let m = ctx.pk(prec.max(1));
        let red = ctx.reduce(coeffs.to_vec(), &m);
        Self::make(ctx, 0, prec, red)
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_empty()
    }

    /// Exact valuation, or `None` for a zero known only to precision `prec`.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.val)
    }

    /// Valuation lower bound: `val` for nonzero, `prec` for zero.
    pub fn valuation_floor(&self) -> i64 {
        self.val
    }

    /// Absolute precision.
    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn relative_precision(&self) -> i64 {
        if self.is_zero() {
            0
        } else {
            self.prec - self.val
        }
    }

    pub fn unit_digits(&self) -> &[BigInt] {
        &self.unit
    }

    /// Reduce the absolute precision.
    pub fn with_precision(&self, prec: i64) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        if self.is_zero() {
            return Self::zero(&self.ctx, prec);
        }
        Self::make(&self.ctx, self.val, prec, self.unit.clone())
    }

    /// Integer representative of `p^val * u` when `val ≥ 0` and `f = 1`.
    pub fn to_integer(&self) -> Option<BigInt> {
        if self.ctx.degree() != 1 || self.val < 0 {
            return None;
        }
        if self.is_zero() {
            return Some(BigInt::zero());
        }
        Some(&self.unit[0] * self.ctx.pk(self.val))
    }

    /// Residue class in `F_q` as a polynomial in `t` mod `p`.
    pub fn residue(&self) -> Result<FpPoly> {
        if self.val < 0 {
            return Err(Error::Precondition("negative valuation has no residue".into()));
        }
        if self.is_zero() || self.val > 0 {
            return Ok(Vec::new());
        }
        let mut r: FpPoly = self.unit.iter().map(|c| fp::reduce_int(c, self.ctx.p)).collect();
        fp::trim(&mut r);
        Ok(r)
    }

    fn check(&self, o: &Self) {
        assert!(Arc::ptr_eq(&self.ctx, &o.ctx) || self.ctx == o.ctx, "p-adic fields differ");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        let prec = self.prec.min(o.prec);
        let v = self.val.min(o.val);
        if v >= prec {
            return Self::zero(&self.ctx, prec);
        }
        let f = self.ctx.degree();
        let mut digits = vec![BigInt::zero(); f];
        for x in [self, o] {
            if x.is_zero() {
                continue;
            }
            let s = self.ctx.pk(x.val - v);
            for (d, c) in digits.iter_mut().zip(&x.unit) {
                *d += c * &s;
            }
        }
        Self::make(&self.ctx, v, prec, digits)
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let m = self.ctx.pk(self.prec - self.val);
        let unit = self.unit.iter().map(|c| (-c).mod_floor(&m)).collect();
        PadicNumber { ctx: self.ctx.clone(), val: self.val, prec: self.prec, unit }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let val = self.val + o.val;
        if self.is_zero() || o.is_zero() {
            // x * O(p^k) = O(p^(k + v(x)))
            let prec = match (self.is_zero(), o.is_zero()) {
                (true, true) => self.prec + o.prec,
                (true, false) => self.prec + o.val,
                _ => o.prec + self.val,
            };
            return Self::zero(&self.ctx, prec);
        }
        let rel = (self.prec - self.val).min(o.prec - o.val);
        let m = self.ctx.pk(rel);
        let f = self.ctx.degree();
        let mut prod = vec![BigInt::zero(); 2 * f - 1];
        for (i, a) in self.unit.iter().enumerate() {
            for (j, b) in o.unit.iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        let unit = self.ctx.reduce(prod, &m);
        Self::make(&self.ctx, val, val + rel, unit)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroElement);
        }
        let rel = self.prec - self.val;
        let p = self.ctx.p;
        let m = self.ctx.pk(rel);
        let u_res: FpPoly = {
            let mut r: FpPoly = self.unit.iter().map(|c| fp::reduce_int(c, p)).collect();
            fp::trim(&mut r);
            r
        };
        let x0 = if self.ctx.degree() == 1 {
            vec![BigInt::from(fp::inv_mod(u_res[0], p))]
        } else {
            let (g, s) = fp::ext_gcd_left(&u_res, &self.ctx.residue, p);
            debug_assert_eq!(g, vec![1]);
            let mut s = fp::to_z(&s);
            s.resize(self.ctx.degree(), BigInt::zero());
            s
        };
        // Newton: x <- x (2 - u x), doubling correct digits
        let u = PadicNumber { ctx: self.ctx.clone(), val: 0, prec: rel, unit: self.unit.clone() };
        let mut x = Self::make(&self.ctx, 0, rel, x0);
        let two = Self::from_i64(&self.ctx, 2, rel);
        let mut correct = 1i64;
        while correct < rel {
            x = x.mul(&two.sub(&u.mul(&x)));
            correct *= 2;
        }
        let unit = x.unit.iter().map(|c| c.mod_floor(&m)).collect();
        Ok(PadicNumber { ctx: self.ctx.clone(), val: -self.val, prec: rel - self.val, unit })
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        if e == 0 {
            return Self::one(&self.ctx, self.prec.max(1));
        }
        let mut acc: Option<Self> = None;
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc.unwrap()
    }

    /// Evaluates an integer polynomial at this number.
    pub fn eval_zpoly(&self, g: &[BigInt]) -> Self {
        let prec = self.prec.max(0) + self.val.min(0).abs() * g.len() as i64;
        let mut acc = Self::zero(&self.ctx, prec);
        for c in g.iter().rev() {
            acc = acc.mul(self).add(&Self::from_int(&self.ctx, c, prec));
        }
        acc
    }
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    if m.is_one() {
        return BigInt::zero();
    }
    let e = a.mod_floor(m).extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

/// Newton iteration for a root of `g` starting from `start`, to absolute
/// precision `k`. `g'` must be a unit at the start value.
pub fn hensel_lift(g: &[BigInt], start: &PadicNumber, k: i64) -> Result<PadicNumber> {
    let dg = super::poly::z_derivative(g);
    let mut x = start.with_precision(k);
    if x.precision() < k {
        // start values are exact lifts, so re-embed at the requested precision
        x = PadicNumber::from_digits(start.ctx(), &padded_digits(start), k);
    }
    for _ in 0..128 {
        let gx = x.eval_zpoly(g).with_precision(k);
        if gx.is_zero() {
            return Ok(x);
        }
        let d = x.eval_zpoly(&dg).with_precision(k);
        if d.valuation() != Some(0) {
            return Err(Error::NoSimpleRoot(x.ctx.p));
        }
        x = x.sub(&gx.div(&d)?).with_precision(k);
    }
    Err(Error::PrecisionExhausted("Hensel iteration did not converge".into()))
}

fn padded_digits(x: &PadicNumber) -> Vec<BigInt> {
    if x.is_zero() {
        return vec![BigInt::zero()];
    }
    let s = x.ctx.pk(x.val.max(0));
    x.unit.iter().map(|c| c * &s).collect()
}

/// Hensel lift of a simple root of `g` modulo `p` to precision `k`.
///
/// Roots in `F_p` are preferred (smallest residue first); otherwise the
/// lowest-degree simple irreducible factor of `g mod p` defines the
/// unramified field in which the root lives.
pub fn padic_hensel_root(g: &[BigInt], p: u64, k: u32) -> Result<PadicNumber> {
    if !is_prime_u64(p) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    let gp = fp::from_z(g, p);
    if fp::deg(&gp).unwrap_or(0) == 0 {
        return Err(Error::NoSimpleRoot(p));
    }
    let mut simple: Vec<FpPoly> =
        fp::factor(&gp, p).into_iter().filter(|(_, e)| *e == 1).map(|(h, _)| h).collect();
    // smallest degree first; among linear factors, smallest root first
    simple.sort_by_key(|h| (h.len(), (p - h[0] % p) % p));
    let Some(h) = simple.first() else {
        return Err(Error::NoSimpleRoot(p));
    };
    let k = k as i64;
    if h.len() == 2 {
        let ctx = PadicField::rational(p);
        let r = (p - h[0] % p) % p;
        let start = PadicNumber::from_i64(&ctx, r as i64, k);
        hensel_lift(g, &start, k)
    } else {
        let ctx = PadicField::new(p, h)?;
        hensel_lift(g, &PadicNumber::generator(&ctx, k), k)
    }
}

/// Smallest nonnegative integer congruent to `x` modulo `p^prec` (f = 1, val ≥ 0).
pub fn to_u64_digits(x: &PadicNumber) -> Option<u64> {
    x.to_integer().and_then(|n| n.abs().to_u64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::poly::zpoly;

    #[test]
    fn sqrt_two_mod_343() {
        let r = padic_hensel_root(&zpoly(&[-2, 0, 1]), 7, 3).unwrap();
        assert_eq!(r.to_integer().unwrap(), BigInt::from(108));
    }

    #[test]
    fn root_of_x_is_zero() {
        let r = padic_hensel_root(&zpoly(&[0, 1]), 11, 5).unwrap();
        assert!(r.is_zero());
        assert_eq!(r.precision(), 5);
    }

    #[test]
    fn double_root_refused() {
        assert_eq!(padic_hensel_root(&zpoly(&[-2, 0, 1]), 2, 4), Err(Error::NoSimpleRoot(2)));
    }

    #[test]
    fn root_in_extension() {
        // x^2 + 1 has no root mod 3, so the lift lives in Q_9
        let g = zpoly(&[1, 0, 1]);
        let r = padic_hensel_root(&g, 3, 6).unwrap();
        assert_eq!(r.ctx().degree(), 2);
        let v = r.eval_zpoly(&g);
        assert!(v.valuation_floor() >= 6);
    }

    #[test]
    fn rational_embedding_and_inverse() {
        let ctx = PadicField::rational(5);
        let x = PadicNumber::from_rational(&ctx, &BigRational::new(3.into(), 50.into()), 10);
        assert_eq!(x.valuation(), Some(-2));
        let y = x.inv().unwrap();
        assert_eq!(y.valuation(), Some(2));
        let one = x.mul(&y);
        assert_eq!(one.valuation(), Some(0));
        assert_eq!(one.unit_digits()[0], BigInt::one());
    }

    #[test]
    fn cancellation_raises_valuation() {
        let ctx = PadicField::rational(3);
        let a = PadicNumber::from_i64(&ctx, 10, 8);
        let b = PadicNumber::from_i64(&ctx, 1, 8);
        assert_eq!(a.sub(&b).valuation(), Some(2));
    }
}
