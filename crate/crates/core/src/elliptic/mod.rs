//! Short Weierstrass curves `y² = x³ + ax + b` over number fields.

mod fq;
mod reduction;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::integer::factorize;
use crate::arith::numfield::{parse_rational, rational_to_string, Field, NfElement, DEFAULT_PRECISION};
use crate::arith::poly;
use crate::arith::NumberField;
use crate::error::{Error, Result};

pub use fq::SmallField;
pub use reduction::{
    amplify, count_identity_places, count_points, phi_x, reduce_point, PhiReport, Reduction, ReducedCurve,
    ReducedPoint, COUNT_CAP,
};

/// `y² = x³ + ax + b` over a number field, with its bad set `𝒫`.
pub struct Curve {
    base: Field,
    a: NfElement,
    b: NfElement,
    disc: NfElement,
    bad_primes: BTreeSet<u64>,
}

pub type CurveRef = Arc<Curve>;

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = x^3 + ({})x + ({}) over {:?}", self.a, self.b, self.base.poly())
    }
}

impl PartialEq for Curve {
    fn eq(&self, o: &Self) -> bool {
        self.a == o.a && self.b == o.b
    }
}

impl Curve {
    pub fn new(a: NfElement, b: NfElement) -> Result<CurveRef> {
        let base = a.field().clone();
        if b.field().as_ref() != base.as_ref() {
            return Err(Error::Mismatch);
        }
        let k = |n: i64| base.from_int(n);
        // Δ = -16(4a³ + 27b²)
        let inner = &(&k(4) * &a.pow(3)) + &(&k(27) * &b.pow(2));
        let disc = &k(-16) * &inner;
        if disc.is_zero() {
            return Err(Error::SingularCurve);
        }
        let mut bad: BTreeSet<u64> = [2u64, 3].into_iter().collect();
        let mut absorb = |n: &BigInt| -> Result<()> {
            if n.is_zero() {
                return Ok(());
            }
            for (p, _) in factorize(n) {
                let p = p.to_u64().ok_or_else(|| Error::CapExceeded("bad prime exceeds 64 bits".into()))?;
                bad.insert(p);
            }
            Ok(())
        };
        absorb(base.disc())?;
        absorb(&a.denominator())?;
        absorb(&b.denominator())?;
        let nd = disc.norm();
        absorb(nd.numer())?;
        absorb(nd.denom())?;
        Ok(Arc::new(Curve { base, a, b, disc, bad_primes: bad }))
    }

    /// Curve over `Q` from integer coefficients.
    pub fn over_q(a: i64, b: i64) -> Result<CurveRef> {
        let q = NumberField::rationals();
        Curve::new(q.from_int(a), q.from_int(b))
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn a(&self) -> &NfElement {
        &self.a
    }

    pub fn b(&self) -> &NfElement {
        &self.b
    }

    pub fn disc(&self) -> &NfElement {
        &self.disc
    }

    pub fn bad_primes(&self) -> &BTreeSet<u64> {
        &self.bad_primes
    }

    pub fn is_good(&self, p: u64) -> bool {
        !self.bad_primes.contains(&p)
    }

    /// The same curve with coefficients pushed into a larger field along
    /// the inclusion sending the base generator to `gen_image`.
    pub fn base_change(&self, gen_image: &NfElement) -> Result<CurveRef> {
        Curve::new(gen_image.eval_poly(self.a.coords()), gen_image.eval_poly(self.b.coords()))
    }

    pub fn rhs(&self, x: &NfElement) -> NfElement {
        &(&x.pow(3) + &(&self.a * x)) + &self.b
    }

    pub fn is_on_curve(&self, x: &NfElement, y: &NfElement) -> bool {
        y.pow(2) == self.rhs(x)
    }

    pub fn infinity(self: &Arc<Self>) -> CurvePoint {
        CurvePoint { curve: self.clone(), xy: None }
    }

    pub fn point(self: &Arc<Self>, x: NfElement, y: NfElement) -> Result<CurvePoint> {
        if x.field().as_ref() != self.base.as_ref() || y.field().as_ref() != self.base.as_ref() {
            return Err(Error::Mismatch);
        }
        if !self.is_on_curve(&x, &y) {
            return Err(Error::NotOnCurve);
        }
        Ok(CurvePoint { curve: self.clone(), xy: Some((x, y)) })
    }

    /// Rational point from `(num/den)` strings or integers.
    pub fn point_q(self: &Arc<Self>, x: (i64, i64), y: (i64, i64)) -> Result<CurvePoint> {
        let k = &self.base;
        let r = |(n, d): (i64, i64)| k.from_rational(crate::arith::integer::rat(n, d));
        self.point(r(x), r(y))
    }

    pub fn to_spec(&self) -> CurveSpec {
        CurveSpec {
            field: self.base.poly().iter().map(|c| c.to_i64().unwrap_or(i64::MAX)).collect(),
            a: CoordSpec::from_element(&self.a),
            b: CoordSpec::from_element(&self.b),
        }
    }
}

/// A point on a curve: the identity `O` or an affine pair.
#[derive(Clone)]
pub struct CurvePoint {
    curve: CurveRef,
    xy: Option<(NfElement, NfElement)>,
}

impl PartialEq for CurvePoint {
    fn eq(&self, o: &Self) -> bool {
        self.xy == o.xy
    }
}

impl Eq for CurvePoint {}

impl fmt::Debug for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.xy {
            None => write!(f, "O"),
            Some((x, y)) => write!(f, "({x}, {y})"),
        }
    }
}

impl CurvePoint {
    pub fn curve(&self) -> &CurveRef {
        &self.curve
    }

    pub fn is_infinity(&self) -> bool {
        self.xy.is_none()
    }

    pub fn xy(&self) -> Option<(&NfElement, &NfElement)> {
        self.xy.as_ref().map(|(x, y)| (x, y))
    }

    pub fn x(&self) -> Option<&NfElement> {
        self.xy.as_ref().map(|(x, _)| x)
    }

    pub fn neg(&self) -> CurvePoint {
        CurvePoint { curve: self.curve.clone(), xy: self.xy.as_ref().map(|(x, y)| (x.clone(), -y)) }
    }

    pub fn add(&self, o: &CurvePoint) -> Result<CurvePoint> {
        point_add(self, o)
    }

    pub fn double(&self) -> CurvePoint {
        point_add(self, self).expect("same curve")
    }

    pub fn mul(&self, n: i64) -> CurvePoint {
        point_mul(n, self)
    }

    /// Size in bytes of the coordinate numerators and denominators.
    pub fn coordinate_bytes(&self) -> usize {
        self.xy
            .as_ref()
            .map(|(x, y)| {
                x.coords()
                    .iter()
                    .chain(y.coords())
                    .map(|c| ((c.numer().bits() + c.denom().bits()) / 8) as usize)
                    .sum()
            })
            .unwrap_or(0)
    }

    pub fn to_spec(&self) -> PointSpec {
        match &self.xy {
            None => PointSpec::Infinity("O".into()),
            Some((x, y)) => PointSpec::Affine([CoordSpec::from_element(x), CoordSpec::from_element(y)]),
        }
    }
}

/// Chord-and-tangent addition.
pub fn point_add(p: &CurvePoint, q: &CurvePoint) -> Result<CurvePoint> {
    if !Arc::ptr_eq(&p.curve, &q.curve) && *p.curve != *q.curve {
        return Err(Error::Mismatch);
    }
    let (x1, y1) = match &p.xy {
        None => return Ok(q.clone()),
        Some(v) => v,
    };
    let (x2, y2) = match &q.xy {
        None => return Ok(p.clone()),
        Some(v) => v,
    };
    let e = &p.curve;
    let lambda = if x1 == x2 {
        if (y1 + y2).is_zero() {
            return Ok(e.infinity());
        }
        let k = e.base();
        let num = &(&k.from_int(3) * &x1.pow(2)) + e.a();
        num.div(&(&k.from_int(2) * y1))?
    } else {
        (y2 - y1).div(&(x2 - x1))?
    };
    let x3 = &(&lambda.pow(2) - x1) - x2;
    let y3 = &(&lambda * &(x1 - &x3)) - y1;
    Ok(CurvePoint { curve: e.clone(), xy: Some((x3, y3)) })
}

/// `[n]P` by double-and-add (negative `n` allowed).
pub fn point_mul(n: i64, p: &CurvePoint) -> CurvePoint {
    let base = if n < 0 { p.neg() } else { p.clone() };
    let mut k = n.unsigned_abs();
    let mut acc = p.curve.infinity();
    let mut cur = base;
    while k > 0 {
        if k & 1 == 1 {
            acc = point_add(&acc, &cur).expect("same curve");
        }
        k >>= 1;
        if k > 0 {
            cur = cur.double();
        }
    }
    acc
}

/// A field element in JSON: an integer, a `"num/den"` string, or a list of
/// power-basis coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoordSpec {
    Int(i64),
    Str(String),
    List(Vec<String>),
}

impl CoordSpec {
    pub fn from_element(x: &NfElement) -> Self {
        if let Some(r) = x.as_rational() {
            if r.is_integer() {
                if let Some(v) = r.numer().to_i64() {
                    return CoordSpec::Int(v);
                }
            }
            if x.field().degree() == 1 {
                return CoordSpec::Str(rational_to_string(r));
            }
        }
        CoordSpec::List(x.coords().iter().map(rational_to_string).collect())
    }

    pub fn build(&self, k: &Field) -> Result<NfElement> {
        match self {
            CoordSpec::Int(n) => Ok(k.from_int(*n)),
            CoordSpec::Str(s) => Ok(k.from_rational(parse_rational(s)?)),
            CoordSpec::List(v) => {
                let coords = v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
                let mut coords = coords;
                if coords.len() > k.degree() {
                    return Err(Error::Config(format!(
                        "{} coordinates given for a degree-{} field",
                        coords.len(),
                        k.degree()
                    )));
                }
                coords.resize(k.degree(), num_rational::BigRational::zero());
                k.element(coords)
            }
        }
    }
}

/// JSON curve: `{field, a, b}` with `field` the defining polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    #[serde(default = "rational_field")]
    pub field: Vec<i64>,
    pub a: CoordSpec,
    pub b: CoordSpec,
}

fn rational_field() -> Vec<i64> {
    vec![0, 1]
}

impl CurveSpec {
    pub fn build(&self) -> Result<CurveRef> {
        let k = NumberField::new(poly::zpoly(&self.field), DEFAULT_PRECISION)?;
        self.build_over(&k)
    }

    pub fn build_over(&self, k: &Field) -> Result<CurveRef> {
        Curve::new(self.a.build(k)?, self.b.build(k)?)
    }
}

/// JSON point: `"O"` or `[x, y]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Infinity(String),
    Affine([CoordSpec; 2]),
}

impl PointSpec {
    pub fn build(&self, e: &CurveRef) -> Result<CurvePoint> {
        match self {
            PointSpec::Infinity(s) if s == "O" => Ok(e.infinity()),
            PointSpec::Infinity(s) => Err(Error::Config(format!("unknown point literal {s:?}"))),
            PointSpec::Affine([x, y]) => e.point(x.build(e.base())?, y.build(e.base())?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::integer::rat;

    #[test]
    fn doubling_on_mordell_curve() {
        let e = Curve::over_q(0, -2).unwrap();
        let p = e.point_q((3, 1), (5, 1)).unwrap();
        let q = p.double();
        let (x, y) = q.xy().unwrap();
        assert_eq!(x.as_rational().unwrap(), &rat(129, 100));
        assert_eq!(y.as_rational().unwrap(), &rat(-383, 1000));
        assert_eq!(p.add(&e.infinity()).unwrap(), p);
        assert!(p.add(&p.neg()).unwrap().is_infinity());
    }

    #[test]
    fn bad_set() {
        let e = Curve::over_q(0, -2).unwrap();
        assert_eq!(e.bad_primes().iter().copied().collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(Curve::over_q(0, 0).unwrap_err(), Error::SingularCurve);
    }

    #[test]
    fn json_roundtrip() {
        let e = Curve::over_q(-1, 0).unwrap();
        let s = serde_json::to_string(&e.to_spec()).unwrap();
        let back: CurveSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(*back.build().unwrap(), *e);
        let p = e.point_q((0, 1), (0, 1)).unwrap();
        let ps = serde_json::to_string(&p.to_spec()).unwrap();
        let pb: PointSpec = serde_json::from_str(&ps).unwrap();
        assert_eq!(pb.build(&e).unwrap(), p);
    }
}
