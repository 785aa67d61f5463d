//! Number fields `Q[x]/(f)` in the power basis and their elements.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::complex::{root_enclosures, Embeddings};
use super::factor;
use super::poly::{self, degree, QPoly, ZPoly};
use crate::error::{Error, Result};

/// Default working precision, in bits, for archimedean enclosures.
pub const DEFAULT_PRECISION: u32 = 128;
/// Ceiling for on-demand precision doubling.
pub const MAX_PRECISION: u32 = 4096;

/// A number field `K = Q(θ)` with `θ` a root of the monic irreducible `f`.
pub struct NumberField {
    poly: ZPoly,
    degree: usize,
    disc: BigInt,
    embeddings: Arc<Embeddings>,
    cache: RwLock<BTreeMap<u32, Arc<Embeddings>>>,
}

pub type Field = Arc<NumberField>;

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumberField")
            .field("poly", &self.poly)
            .field("degree", &self.degree)
            .field("disc", &self.disc)
            .finish()
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.poly == other.poly
    }
}

impl NumberField {
    /// Builds `Q[x]/(f)` after verifying that `f` is monic and irreducible.
    pub fn new(f: ZPoly, precision: u32) -> Result<Field> {
        let mut f = f;
        poly::z_trim(&mut f);
        let n = degree(&f).ok_or_else(|| Error::InvalidPolynomial("zero polynomial".into()))?;
        if n == 0 {
            return Err(Error::InvalidPolynomial("constant polynomial".into()));
        }
        if !poly::z_is_monic(&f) {
            return Err(Error::NotMonic);
        }
        if n > factor::MAX_DEGREE {
            return Err(Error::InvalidPolynomial(format!(
                "degree {n} exceeds the cap {}",
                factor::MAX_DEGREE
            )));
        }
        if let Some(g) = factor::find_factor(&f) {
            return Err(Error::ReduciblePolynomial(format!("factor {:?}", to_i64s(&g))));
        }
        let disc = poly::discriminant_monic(&f);
        let precision = precision.clamp(16, MAX_PRECISION);
        let embeddings = Arc::new(root_enclosures(&f, precision)?);
        let mut cache = BTreeMap::new();
        cache.insert(precision, embeddings.clone());
        Ok(Arc::new(NumberField { poly: f, degree: n, disc, embeddings, cache: RwLock::new(cache) }))
    }

    /// The rational field `Q = Q[x]/(x)`.
    pub fn rationals() -> Field {
        NumberField::new(vec![BigInt::zero(), BigInt::one()], DEFAULT_PRECISION)
            .expect("x is irreducible")
    }

    pub fn from_coeffs(coeffs: &[i64]) -> Result<Field> {
        NumberField::new(poly::zpoly(coeffs), DEFAULT_PRECISION)
    }

    pub fn poly(&self) -> &[BigInt] {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    pub fn is_rational(&self) -> bool {
        self.degree == 1
    }

    pub fn embeddings(&self) -> &Arc<Embeddings> {
        &self.embeddings
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.embeddings.r1, self.embeddings.r2)
    }

    /// Enclosures at (at least) the requested precision, computed on demand.
    pub fn embeddings_at(&self, precision: u32) -> Result<Arc<Embeddings>> {
        if precision <= self.embeddings.precision {
            return Ok(self.embeddings.clone());
        }
        if precision > MAX_PRECISION {
            return Err(Error::PrecisionExhausted(format!(
                "requested {precision} bits exceeds the {MAX_PRECISION}-bit cap"
            )));
        }
        if let Some(e) = self.cache.read().unwrap().range(precision..).next() {
            return Ok(e.1.clone());
        }
        let e = Arc::new(root_enclosures(&self.poly, precision)?);
        self.cache.write().unwrap().insert(precision, e.clone());
        Ok(e)
    }

    pub fn zero(self: &Arc<Self>) -> NfElement {
        NfElement { field: self.clone(), coords: vec![BigRational::zero(); self.degree] }
    }

    pub fn one(self: &Arc<Self>) -> NfElement {
        self.from_rational(BigRational::one())
    }

    pub fn from_int(self: &Arc<Self>, n: i64) -> NfElement {
        self.from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(self: &Arc<Self>, r: BigRational) -> NfElement {
        let mut coords = vec![BigRational::zero(); self.degree];
        coords[0] = r;
        NfElement { field: self.clone(), coords }
    }

    /// The generator `θ` (equal to the root `0` when `K = Q`).
    pub fn generator(self: &Arc<Self>) -> NfElement {
        self.from_poly(&[BigRational::zero(), BigRational::one()])
    }

    /// Image of a rational polynomial evaluated at `θ`.
    pub fn from_poly(self: &Arc<Self>, p: &[BigRational]) -> NfElement {
        let f = poly::z_to_q(&self.poly);
        let (_, r) = poly::q_divrem(p, &f);
        let mut coords = r;
        coords.resize(self.degree, BigRational::zero());
        NfElement { field: self.clone(), coords }
    }

    pub fn element(self: &Arc<Self>, coords: Vec<BigRational>) -> Result<NfElement> {
        if coords.len() != self.degree {
            return Err(Error::Precondition(format!(
                "expected {} coordinates, got {}",
                self.degree,
                coords.len()
            )));
        }
        Ok(NfElement { field: self.clone(), coords })
    }
}

fn to_i64s(p: &[BigInt]) -> Vec<String> {
    p.iter().map(|c| c.to_string()).collect()
}

/// Element of a number field in power-basis coordinates.
#[derive(Clone)]
pub struct NfElement {
    field: Field,
    coords: Vec<BigRational>,
}

impl fmt::Debug for NfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for NfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.degree == 1 {
            return write!(f, "{}", self.coords[0]);
        }
        let terms: Vec<String> = self
            .coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})*t"),
                _ => format!("({c})*t^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl PartialEq for NfElement {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords && Arc::ptr_eq(&self.field, &other.field)
            || (self.coords == other.coords && *self.field == *other.field)
    }
}

impl Eq for NfElement {}

impl NfElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(|c| c.is_zero())
    }

    /// `Some(r)` when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.coords[1..].iter().all(|c| c.is_zero()).then_some(&self.coords[0])
    }

    pub fn denominator(&self) -> BigInt {
        super::integer::common_denominator(&self.coords)
    }

    /// Integer numerator polynomial `a` with `self = a(θ) / denominator`.
    pub fn numerator_poly(&self) -> ZPoly {
        let d = BigRational::from_integer(self.denominator());
        self.coords.iter().map(|c| (c * &d).to_integer()).collect()
    }

    fn check(&self, other: &NfElement) {
        assert!(
            Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field,
            "elements of different number fields"
        );
    }

    pub fn inv(&self) -> Result<NfElement> {
        if self.is_zero() {
            return Err(Error::ZeroElement);
        }
        if let Some(r) = self.as_rational() {
            return Ok(self.field.from_rational(r.recip()));
        }
        let f = poly::z_to_q(self.field.poly());
        let mut a: QPoly = self.coords.clone();
        poly::q_trim(&mut a);
        let (g, s, _) = poly::q_ext_gcd(&a, &f);
        debug_assert_eq!(degree(&g), Some(0));
        Ok(self.field.from_poly(&s))
    }

    pub fn div(&self, other: &NfElement) -> Result<NfElement> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, mut e: u64) -> NfElement {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, s: &BigRational) -> NfElement {
        NfElement { field: self.field.clone(), coords: self.coords.iter().map(|c| c * s).collect() }
    }

    /// Matrix of multiplication by `self` in the power basis
    /// (column `j` holds the coordinates of `self * θ^j`).
    pub fn mult_matrix(&self) -> Vec<Vec<BigRational>> {
        let n = self.field.degree;
        let theta = self.field.generator();
        let mut cols = Vec::with_capacity(n);
        let mut cur = self.clone();
        for _ in 0..n {
            cols.push(cur.coords.clone());
            cur = &cur * &theta;
        }
        (0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect()
    }

    /// Characteristic polynomial of multiplication by `self` (monic, degree `[K:Q]`).
    pub fn charpoly(&self) -> QPoly {
        if let Some(r) = self.as_rational() {
            // (x - r)^n
            let lin = vec![-r.clone(), BigRational::one()];
            let mut acc = vec![BigRational::one()];
            for _ in 0..self.field.degree {
                acc = poly::q_mul(&acc, &lin);
            }
            return acc;
        }
        poly::charpoly(&self.mult_matrix())
    }

    /// `N_{K/Q}(self)`.
    pub fn norm(&self) -> BigRational {
        let cp = self.charpoly();
        if self.field.degree % 2 == 0 {
            cp[0].clone()
        } else {
            -cp[0].clone()
        }
    }

    pub fn trace(&self) -> BigRational {
        let cp = self.charpoly();
        -cp[self.field.degree - 1].clone()
    }

    /// Evaluates a rational polynomial at this element.
    pub fn eval_poly(&self, p: &[BigRational]) -> NfElement {
        let mut acc = self.field.zero();
        for c in p.iter().rev() {
            acc = &(&acc * self) + &self.field.from_rational(c.clone());
        }
        acc
    }

    pub fn to_json_coords(&self) -> Vec<String> {
        self.coords.iter().map(rational_to_string).collect()
    }
}

pub fn rational_to_string(r: &BigRational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Config(format!("cannot parse rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl Add for &NfElement {
    type Output = NfElement;
    fn add(self, rhs: &NfElement) -> NfElement {
        self.check(rhs);
        NfElement {
            field: self.field.clone(),
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &NfElement {
    type Output = NfElement;
    fn sub(self, rhs: &NfElement) -> NfElement {
        self.check(rhs);
        NfElement {
            field: self.field.clone(),
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &NfElement {
    type Output = NfElement;
    fn neg(self) -> NfElement {
        NfElement { field: self.field.clone(), coords: self.coords.iter().map(|a| -a).collect() }
    }
}

impl Mul for &NfElement {
    type Output = NfElement;
    fn mul(self, rhs: &NfElement) -> NfElement {
        self.check(rhs);
        let n = self.field.degree;
        if n == 1 {
            return NfElement { field: self.field.clone(), coords: vec![&self.coords[0] * &rhs.coords[0]] };
        }
        let mut prod = vec![BigRational::zero(); 2 * n - 1];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coords.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        // reduce modulo the monic f: θ^n = -sum f_i θ^i
        let f = &self.field.poly;
        for k in (n..2 * n - 1).rev() {
            let c = std::mem::replace(&mut prod[k], BigRational::zero());
            if c.is_zero() {
                continue;
            }
            for i in 0..n {
                if !f[i].is_zero() {
                    prod[k - n + i] -= &c * BigRational::from_integer(f[i].clone());
                }
            }
        }
        prod.truncate(n);
        NfElement { field: self.field.clone(), coords: prod }
    }
}

/// JSON form of a number field: its defining polynomial, constant term first.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FieldSpec(pub Vec<i64>);

impl FieldSpec {
    pub fn build(&self, precision: u32) -> Result<Field> {
        NumberField::new(poly::zpoly(&self.0), precision)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::integer::rat;

    #[test]
    fn create_examples() {
        let q = NumberField::rationals();
        assert_eq!(q.degree(), 1);
        assert_eq!(q.signature(), (1, 0));
        let qi = NumberField::from_coeffs(&[1, 0, 1]).unwrap();
        assert_eq!(qi.signature(), (0, 1));
        assert_eq!(*qi.disc(), BigInt::from(-4));
        let q2 = NumberField::from_coeffs(&[-2, 0, 1]).unwrap();
        assert_eq!(q2.signature(), (2, 0));
        assert_eq!(*q2.disc(), BigInt::from(8));
    }

    #[test]
    fn create_errors() {
        assert_eq!(NumberField::from_coeffs(&[-1, 0, 1]).unwrap_err().to_string().starts_with("polynomial is reducible"), true);
        assert_eq!(NumberField::from_coeffs(&[1, 0, 2]).unwrap_err(), Error::NotMonic);
    }

    #[test]
    fn arithmetic_in_cubic_field() {
        let k = NumberField::from_coeffs(&[-2, 0, 0, 1]).unwrap();
        let t = k.generator();
        assert_eq!(t.pow(3), k.from_int(2));
        let a = &t + &k.from_int(1);
        let b = a.inv().unwrap();
        assert!((&a * &b).is_one());
        assert_eq!(t.norm(), rat(2, 1));
        assert_eq!(a.norm(), rat(3, 1));
    }
}
