use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use super::fq::SmallField;
use super::{CurvePoint, CurveRef};
use crate::arith::fp::FpPoly;
use crate::arith::integer::{factorize, primes_up_to};
use crate::arith::place::PrimeIdeal;
use crate::error::{Error, Result};
use crate::splitting::dedekind_factor;

/// Largest residue field size accepted by the exhaustive point count.
pub const COUNT_CAP: u64 = 1_000_000;

/// Image of a point under reduction modulo `w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Reduction {
    /// Reduces to the identity; `m = v_w(-x/y)` (absent for `P = O`).
    Identity { m: Option<i64> },
    Affine { x: FpPoly, y: FpPoly },
}

impl Reduction {
    pub fn is_identity(&self) -> bool {
        matches!(self, Reduction::Identity { .. })
    }
}

fn check_good(e: &CurveRef, w: &PrimeIdeal) -> Result<()> {
    if !e.is_good(w.p) || w.ramification != 1 {
        return Err(Error::BadPrime(w.p));
    }
    Ok(())
}

pub fn reduce_point(pt: &CurvePoint, w: &PrimeIdeal) -> Result<Reduction> {
    check_good(pt.curve(), w)?;
    let Some((x, y)) = pt.xy() else {
        return Ok(Reduction::Identity { m: None });
    };
    let vx = if x.is_zero() { 0 } else { w.valuation(x)? };
    if vx < 0 {
        let vy = w.valuation(y)?;
        let m = -vx / 2;
        assert!(vx == -2 * m && vy == -3 * m, "valuations {vx}, {vy} are not (-2m, -3m)");
        return Ok(Reduction::Identity { m: Some(m) });
    }
    Ok(Reduction::Affine { x: w.residue(x)?, y: w.residue(y)? })
}

/// A point of `E(F_q)`: `None` is the identity.
pub type ReducedPoint = Option<(u64, u64)>;

/// The reduction of a curve at a good place, with its exact point count.
#[derive(Clone, Debug, Serialize)]
pub struct ReducedCurve {
    pub p: u64,
    pub f: u32,
    pub q: u64,
    pub a_bar: FpPoly,
    pub b_bar: FpPoly,
    pub order: u64,
    #[serde(skip)]
    field: SmallField,
}

fn residue_field(w: &PrimeIdeal) -> Result<SmallField> {
    let modulus: Vec<u64> = if w.residue_degree == 1 { vec![0, 1] } else { w.factor_poly.clone() };
    SmallField::new(w.p, &modulus).ok_or_else(|| Error::CapExceeded("residue field too large".into()))
}

/// `#E(F_q)` by a sweep over `x` with a table of square counts.
pub fn count_points(e: &CurveRef, w: &PrimeIdeal) -> Result<ReducedCurve> {
    check_good(e, w)?;
    let q = w.norm_u64().filter(|&q| q <= COUNT_CAP).ok_or_else(|| {
        Error::CapExceeded(format!("residue field of size {} exceeds {COUNT_CAP}", w.norm))
    })?;
    let k = residue_field(w)?;
    let a_bar = w.residue(e.a())?;
    let b_bar = w.residue(e.b())?;
    let (a, b) = (k.encode(&a_bar), k.encode(&b_bar));
    let mut roots = vec![0u8; q as usize];
    for y in 0..q {
        roots[k.mul(y, y) as usize] += 1;
    }
    let affine: u64 = (0..q)
        .into_par_iter()
        .map(|x| {
            let rhs = k.add(k.mul(k.add(k.mul(x, x), a), x), b);
            roots[rhs as usize] as u64
        })
        .sum();
    let order = affine + 1;
    let t = order as i128 - q as i128 - 1;
    assert!(t * t <= 4 * q as i128, "Hasse bound violated: #E = {order}, q = {q}");
    Ok(ReducedCurve { p: w.p, f: w.residue_degree, q, a_bar, b_bar, order, field: k })
}

impl ReducedCurve {
    pub fn field(&self) -> &SmallField {
        &self.field
    }

    fn a(&self) -> u64 {
        self.field.encode(&self.a_bar)
    }

    pub fn is_on_curve(&self, pt: ReducedPoint) -> bool {
        let k = &self.field;
        match pt {
            None => true,
            Some((x, y)) => {
                let b = k.encode(&self.b_bar);
                k.mul(y, y) == k.add(k.mul(k.add(k.mul(x, x), self.a()), x), b)
            }
        }
    }

    pub fn from_reduction(&self, r: &Reduction) -> ReducedPoint {
        match r {
            Reduction::Identity { .. } => None,
            Reduction::Affine { x, y } => Some((self.field.encode(x), self.field.encode(y))),
        }
    }

    pub fn neg(&self, pt: ReducedPoint) -> ReducedPoint {
        pt.map(|(x, y)| (x, self.field.neg(y)))
    }

    pub fn add(&self, p1: ReducedPoint, p2: ReducedPoint) -> ReducedPoint {
        let k = &self.field;
        let (x1, y1) = match p1 {
            None => return p2,
            Some(v) => v,
        };
        let (x2, y2) = match p2 {
            None => return p1,
            Some(v) => v,
        };
        let lambda = if x1 == x2 {
            if k.add(y1, y2) == 0 {
                return None;
            }
            let num = k.add(k.mul(3 % k.p(), k.mul(x1, x1)), self.a());
            k.mul(num, k.inv(k.mul(2 % k.p(), y1)))
        } else {
            k.mul(k.sub(y2, y1), k.inv(k.sub(x2, x1)))
        };
        let x3 = k.sub(k.sub(k.mul(lambda, lambda), x1), x2);
        let y3 = k.sub(k.mul(lambda, k.sub(x1, x3)), y1);
        Some((x3, y3))
    }

    pub fn mul(&self, mut n: u64, pt: ReducedPoint) -> ReducedPoint {
        let mut acc = None;
        let mut cur = pt;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add(acc, cur);
            }
            n >>= 1;
            if n > 0 {
                cur = self.add(cur, cur);
            }
        }
        acc
    }

    /// Exact order of a point, from the factorization of `#E(F_q)`.
    pub fn point_order(&self, pt: ReducedPoint) -> u64 {
        let mut order = self.order;
        for (l, _) in factorize(&self.order.into()) {
            let l = u64::try_from(&l).expect("factor of a u64");
            while order % l == 0 && self.mul(order / l, pt).is_none() {
                order /= l;
            }
        }
        order
    }
}

/// `m = #E(F_q)` and `Q = [m]P`, which reduces to the identity at `w`.
pub fn amplify(pt: &CurvePoint, w: &PrimeIdeal) -> Result<(u64, CurvePoint)> {
    let red = count_points(pt.curve(), w)?;
    let m = red.order;
    let m_i64 = i64::try_from(m).map_err(|_| Error::CapExceeded("group order exceeds i64".into()))?;
    let q = pt.mul(m_i64);
    let r = reduce_point(&q, w)?;
    assert!(r.is_identity(), "[#E(F_q)]P must reduce to the identity");
    Ok((m, q))
}

/// `φ_X(P) = Σ' f_w log p` over places `w` of norm `≤ X` outside the bad
/// set where `P` reduces to the identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiReport {
    /// `(p, Σ f_w)` over identity places above `p`.
    pub terms: Vec<(u64, u32)>,
    pub value: f64,
    pub places_checked: usize,
}

pub fn phi_x(pt: &CurvePoint, x_cap: f64, extra_bad: &BTreeSet<u64>) -> Result<PhiReport> {
    let e = pt.curve();
    let limit = x_cap.floor().max(0.0) as u64;
    let primes: Vec<u64> = primes_up_to(limit)
        .into_iter()
        .filter(|p| e.is_good(*p) && !extra_bad.contains(p))
        .collect();
    let per_prime: Vec<Result<(u64, u32, usize)>> = primes
        .par_iter()
        .map(|&p| {
            let mut mult = 0u32;
            let mut checked = 0usize;
            for w in dedekind_factor(e.base(), p)? {
                if w.norm_u64().map_or(true, |n| n > limit) {
                    continue;
                }
                checked += 1;
                if reduce_point(pt, &w)?.is_identity() {
                    mult += w.residue_degree;
                }
            }
            Ok((p, mult, checked))
        })
        .collect();
    let mut terms = Vec::new();
    let mut places_checked = 0;
    for r in per_prime {
        let (p, mult, checked) = r?;
        places_checked += checked;
        if mult > 0 {
            terms.push((p, mult));
        }
    }
    let value = terms.iter().map(|&(p, m)| m as f64 * (p as f64).ln()).sum();
    Ok(PhiReport { terms, value, places_checked })
}

/// `(#{w of norm q : P ≡ O mod w}, N_q)` for a good prime power `q`.
pub fn count_identity_places(pt: &CurvePoint, q: u64) -> Result<(usize, usize)> {
    let (p, f) = crate::arith::integer::prime_power(q)
        .ok_or_else(|| Error::Precondition(format!("{q} is not a prime power")))?;
    if !pt.curve().is_good(p) {
        return Err(Error::BadPrime(p));
    }
    let mut hits = 0;
    let mut total = 0;
    for w in dedekind_factor(pt.curve().base(), p)? {
        if w.residue_degree != f {
            continue;
        }
        total += 1;
        if reduce_point(pt, &w)?.is_identity() {
            hits += 1;
        }
    }
    Ok((hits, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::Curve;

    #[test]
    fn small_counts() {
        let w5 = PrimeIdeal::rational(5);
        // 2 and 3 are always bad, so use curves good at 5
        assert_eq!(count_points(&Curve::over_q(1, 0).unwrap(), &w5).unwrap().order, 4);
        assert_eq!(count_points(&Curve::over_q(0, 1).unwrap(), &w5).unwrap().order, 6);
        assert_eq!(count_points(&Curve::over_q(0, -2).unwrap(), &PrimeIdeal::rational(7)).unwrap().order, 7);
    }

    #[test]
    fn reduction_examples() {
        let e = Curve::over_q(0, -2).unwrap();
        let p = e.point_q((3, 1), (5, 1)).unwrap();
        let w7 = PrimeIdeal::rational(7);
        assert_eq!(reduce_point(&p, &w7).unwrap(), Reduction::Affine { x: vec![3], y: vec![5] });
        let q = p.double();
        assert_eq!(reduce_point(&q, &PrimeIdeal::rational(5)).unwrap(), Reduction::Identity { m: Some(1) });
        assert_eq!(reduce_point(&p, &PrimeIdeal::rational(3)).unwrap_err(), Error::BadPrime(3));
    }

    #[test]
    fn amplification_at_seven() {
        let e = Curve::over_q(0, -2).unwrap();
        let p = e.point_q((3, 1), (5, 1)).unwrap();
        let w7 = PrimeIdeal::rational(7);
        let (m, q) = amplify(&p, &w7).unwrap();
        assert_eq!(m, 7);
        assert!(reduce_point(&q, &w7).unwrap().is_identity());
        let phi = phi_x(&q, 10.0, &BTreeSet::new()).unwrap();
        assert!(phi.terms.contains(&(7, 1)));
        assert_eq!(phi_x(&p, 50.0, &BTreeSet::new()).unwrap().value, 0.0);
    }

    #[test]
    fn identity_counts_everything() {
        let e = Curve::over_q(0, -2).unwrap();
        let phi = phi_x(&e.infinity(), 20.0, &BTreeSet::new()).unwrap();
        let expected: f64 = [5f64, 7., 11., 13., 17., 19.].iter().map(|p| p.ln()).sum();
        assert!((phi.value - expected).abs() < 1e-12);
    }
}
