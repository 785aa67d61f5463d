//! Naive and canonical heights, torsion certificates and small-point search.

mod search;
mod nfsplit;
mod split;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::height::{weil_height, DEFAULT_HEIGHT_ERROR};
use crate::arith::integer::{factorize, is_prime_u64};
use crate::arith::numfield::NfElement;
use crate::elliptic::{count_points, reduce_point, CurvePoint, CurveRef, COUNT_CAP};
use crate::error::{Error, Result};
use crate::splitting::dedekind_factor;

pub use search::{search_small_points, SearchOptions, SearchRecord, SearchedPoint};
pub use split::{split_tate_iterate, SplitIterate};

/// Default byte cap for exact coordinates during doubling.
pub const DEFAULT_BYTE_CAP: usize = 8 << 20;

/// A canonical height with certified error after `iterations` doublings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightValue {
    pub value: f64,
    pub error: f64,
    pub iterations: u32,
    /// Set when the point was shown to be torsion exactly.
    pub exact_zero: bool,
}

impl HeightValue {
    pub fn zero() -> Self {
        HeightValue { value: 0.0, error: 0.0, iterations: 0, exact_zero: true }
    }

    /// Value certified away from zero with the given safety factor.
    pub fn is_certified_nonzero(&self, factor: f64) -> bool {
        !self.exact_zero && self.value > factor * self.error
    }
}

/// `h(x(P))`, the height attached to the divisor `2(O)`.
pub fn naive_height(p: &CurvePoint) -> Result<f64> {
    let x = p.x().ok_or(Error::InfinityPoint)?;
    Ok(weil_height(x, DEFAULT_HEIGHT_ERROR)?.value)
}

/// `δ_E = 8 + 4 max(h(a), h(b), 1)`, bounding `|h(x(2P)) - 4h(x(P))|`.
pub fn duplication_defect(e: &CurveRef) -> Result<f64> {
    let ha = weil_height(e.a(), DEFAULT_HEIGHT_ERROR)?;
    let hb = weil_height(e.b(), DEFAULT_HEIGHT_ERROR)?;
    let m = (ha.value + ha.error).max(hb.value + hb.error).max(1.0);
    Ok(8.0 + 4.0 * m)
}

/// `x(2P)` from `x(P)` alone; `None` when `2P = O`.
pub fn double_x(e: &CurveRef, x: &NfElement) -> Result<Option<NfElement>> {
    let k = e.base();
    let (a, b) = (e.a(), e.b());
    let x2 = x.pow(2);
    let den = &k.from_int(4) * &e.rhs(x);
    if den.is_zero() {
        return Ok(None);
    }
    let num = &(&(&x2.pow(2) - &(&(&k.from_int(2) * a) * &x2)) - &(&(&k.from_int(8) * b) * x)) + &a.pow(2);
    Ok(Some(num.div(&den)?))
}

fn element_bytes(x: &NfElement) -> usize {
    x.coords().iter().map(|c| ((c.numer().bits() + c.denom().bits()) / 8) as usize).sum()
}

/// Outcome of the exact doubling phase.
enum ExactPhase {
    Torsion,
    Undecided,
}

/// Doubles exactly while coordinates stay small, detecting torsion by a
/// repeated x-coordinate or by reaching `O`.
fn exact_phase(e: &CurveRef, x0: &NfElement, max_steps: u32, byte_cap: usize) -> Result<ExactPhase> {
    let mut orbit = vec![x0.clone()];
    for _ in 0..max_steps {
        let cur = orbit.last().unwrap();
        if element_bytes(cur) > byte_cap {
            break;
        }
        match double_x(e, cur)? {
            None => return Ok(ExactPhase::Torsion),
            Some(nx) => {
                if orbit.contains(&nx) {
                    return Ok(ExactPhase::Torsion);
                }
                orbit.push(nx);
            }
        }
    }
    Ok(ExactPhase::Undecided)
}

/// Number of doublings needed for a truncation error `δ/(3·4^N) ≤ budget`.
pub fn iterations_for(delta: f64, budget: f64) -> u32 {
    let n = ((delta / (3.0 * budget)).ln() / 4f64.ln()).ceil();
    n.max(1.0) as u32
}

/// `ĥ(P)` by Tate's limit `h(x(2^N P))/4^N`, with `N` chosen so the
/// certified error is at most `tol`.
pub fn canonical_height(p: &CurvePoint, tol: f64) -> Result<HeightValue> {
    canonical_height_with_cap(p, tol, DEFAULT_BYTE_CAP)
}

pub fn canonical_height_with_cap(p: &CurvePoint, tol: f64, byte_cap: usize) -> Result<HeightValue> {
    if !(tol > 0.0) {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    let Some(x) = p.x() else {
        return Ok(HeightValue::zero());
    };
    let e = p.curve();
    if let ExactPhase::Torsion = exact_phase(e, x, 12, 512)? {
        return Ok(HeightValue::zero());
    }
    let delta = duplication_defect(e)?;
    let n = iterations_for(delta, tol / 2.0);
    let truncation = delta / (3.0 * 4f64.powi(n as i32));
    if let Some(xq) = x.as_rational() {
        let a = e.a().as_rational().cloned();
        let b = e.b().as_rational().cloned();
        if let (Some(a), Some(b)) = (a, b) {
            let it = split_tate_iterate(xq, &a, &b, n, tol / 2.0)?;
            return Ok(HeightValue {
                value: it.value.max(0.0),
                error: truncation + it.error,
                iterations: n,
                exact_zero: false,
            });
        }
    }
    if x.field().degree() > 1 {
        match nfsplit::nf_split_tate_iterate(e, x, n, tol / 2.0) {
            Ok(it) => {
                return Ok(HeightValue {
                    value: it.value.max(0.0),
                    error: truncation + it.error,
                    iterations: n,
                    exact_zero: false,
                })
            }
            // Z[θ] not maximal at some prime: exact doubling below
            Err(Error::IndexPrime { .. }) => {}
            Err(err) => return Err(err),
        }
    }
    let mut cur = x.clone();
    for _ in 0..n {
        if element_bytes(&cur) > byte_cap {
            return Err(Error::CoordinateBlowup(format!(
                "x(2^k P) exceeds {byte_cap} bytes before {n} doublings; retry with a larger tolerance"
            )));
        }
        cur = match double_x(e, &cur)? {
            Some(v) => v,
            None => return Ok(HeightValue::zero()),
        };
    }
    let scale = 4f64.powi(n as i32);
    let h = weil_height(&cur, tol * scale / 4.0)?;
    Ok(HeightValue {
        value: (h.value / scale).max(0.0),
        error: truncation + h.error / scale,
        iterations: n,
        exact_zero: false,
    })
}

/// `h(x(2^N P))/4^N` computed with exact doubling, without any shortcut.
pub fn exact_tate_iterate(p: &CurvePoint, n: u32) -> Result<f64> {
    let Some(x) = p.x() else { return Ok(0.0) };
    let mut cur = x.clone();
    for _ in 0..n {
        cur = match double_x(p.curve(), &cur)? {
            Some(v) => v,
            None => return Ok(0.0),
        };
    }
    Ok(weil_height(&cur, 1e-12)?.value / 4f64.powi(n as i32))
}

/// Exact torsion certificate from two reductions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorsionCertificate {
    pub is_torsion: bool,
    /// Exact order when torsion.
    pub order: Option<u64>,
    /// `(p, residue degree, order of the reduced point)` at the two places.
    pub places: Vec<(u64, u32, u64)>,
    pub gcd: u64,
}

/// Largest residue characteristic tried when looking for reduction places.
pub const TORSION_PRIME_CAP: u64 = 5000;

/// Torsion iff some divisor of `gcd(ord_{w1}(P̄), ord_{w2}(P̄))` kills `P`.
pub fn is_torsion(p: &CurvePoint) -> Result<TorsionCertificate> {
    if p.is_infinity() {
        return Ok(TorsionCertificate { is_torsion: true, order: Some(1), places: Vec::new(), gcd: 1 });
    }
    let e = p.curve();
    let mut places = Vec::new();
    let mut cand = 5u64;
    while places.len() < 2 && cand <= TORSION_PRIME_CAP {
        let pr = cand;
        cand += 1;
        if !is_prime_u64(pr) || !e.is_good(pr) {
            continue;
        }
        let Ok(primes) = dedekind_factor(e.base(), pr) else { continue };
        let Some(w) = primes
            .into_iter()
            .filter(|w| w.ramification == 1 && w.norm_u64().map_or(false, |q| q <= COUNT_CAP))
            .min_by_key(|w| w.residue_degree)
        else {
            continue;
        };
        let red = count_points(e, &w)?;
        let r = red.from_reduction(&reduce_point(p, &w)?);
        let ord = red.point_order(r);
        places.push((pr, w.residue_degree, ord));
    }
    if places.len() < 2 {
        return Err(Error::InsufficientPrimes(TORSION_PRIME_CAP));
    }
    let d = places[0].2.gcd(&places[1].2);
    let mut divisors: Vec<u64> = (1..=d).filter(|k| d % k == 0).collect();
    divisors.sort_unstable();
    for k in divisors {
        if p.mul(k as i64).is_infinity() {
            return Ok(TorsionCertificate { is_torsion: true, order: Some(k), places, gcd: d });
        }
    }
    Ok(TorsionCertificate { is_torsion: false, order: None, places, gcd: d })
}

/// Minimal `u > 0` with `u⁴a, u⁶b` integral.
pub(crate) fn integral_scaling(a: &BigRational, b: &BigRational) -> BigInt {
    let mut u = BigInt::one();
    let den = a.denom().lcm(b.denom());
    for (p, _) in factorize(&den) {
        let p = BigInt::from(p);
        let (mut va, mut vb) = (0u32, 0u32);
        let mut t = a.denom().clone();
        while (&t % &p).is_zero() {
            t /= &p;
            va += 1;
        }
        let mut t = b.denom().clone();
        while (&t % &p).is_zero() {
            t /= &p;
            vb += 1;
        }
        let e = va.div_ceil(4).max(vb.div_ceil(6));
        u *= p.pow(e);
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::Curve;

    #[test]
    fn naive_examples() {
        let e = Curve::over_q(0, -2).unwrap();
        let p = e.point_q((3, 1), (5, 1)).unwrap();
        assert!((naive_height(&p).unwrap() - 3f64.ln()).abs() < 1e-14);
        assert!((naive_height(&p.double()).unwrap() - 129f64.ln()).abs() < 1e-13);
        assert_eq!(naive_height(&e.infinity()).unwrap_err(), Error::InfinityPoint);
        let e2 = Curve::over_q(0, 4).unwrap();
        assert_eq!(naive_height(&e2.point_q((0, 1), (2, 1)).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn torsion_zero() {
        let e = Curve::over_q(-4, 0).unwrap();
        let t = e.point_q((2, 1), (0, 1)).unwrap();
        let h = canonical_height(&t, 1e-6).unwrap();
        assert!(h.exact_zero && h.value <= 1e-6);
        let cert = is_torsion(&t).unwrap();
        assert!(cert.is_torsion && cert.order == Some(2));
    }

    #[test]
    fn generator_is_not_torsion() {
        let e = Curve::over_q(0, -2).unwrap();
        let p = e.point_q((3, 1), (5, 1)).unwrap();
        let cert = is_torsion(&p).unwrap();
        assert!(!cert.is_torsion);
        assert_eq!(cert.places[0], (5, 1, cert.places[0].2));
    }

    #[test]
    fn split_path_matches_exact_path() {
        use crate::arith::integer::rat;
        let e = Curve::over_q(0, -2).unwrap();
        let p = e.point_q((3, 1), (5, 1)).unwrap();
        for n in 1..=5 {
            let exact = exact_tate_iterate(&p, n).unwrap();
            let split = split_tate_iterate(&rat(3, 1), &rat(0, 1), &rat(-2, 1), n, 1e-12)
                .unwrap();
            assert!((exact - split.value).abs() < 1e-11, "n = {n}: {exact} vs {}", split.value);
        }
    }

    #[test]
    fn scaling_for_rational_models() {
        use crate::arith::integer::rat;
        assert_eq!(integral_scaling(&rat(1, 16), &rat(1, 1)), BigInt::from(2));
        assert_eq!(integral_scaling(&rat(1, 1), &rat(1, 64)), BigInt::from(2));
        assert_eq!(integral_scaling(&rat(1, 1), &rat(1, 1)), BigInt::from(1));
    }
}

#[cfg(test)]
mod quadratic_form {
    use super::*;
    use crate::elliptic::Curve;

    fn hh(p: &CurvePoint) -> HeightValue {
        canonical_height(p, 1e-9).unwrap()
    }

    #[test]
    fn parallelogram_on_rank_two_curve() {
        let e = Curve::over_q(0, 17).unwrap();
        let p = e.point_q((-2, 1), (3, 1)).unwrap();
        let q = e.point_q((-1, 1), (4, 1)).unwrap();
        let s = p.add(&q).unwrap();
        let d = p.add(&q.neg()).unwrap();
        let lhs = hh(&s).value + hh(&d).value;
        let rhs = 2.0 * hh(&p).value + 2.0 * hh(&q).value;
        eprintln!("h(P) = {:?}, h(Q) = {:?}", hh(&p), hh(&q));
        assert!((lhs - rhs).abs() < 1e-7, "{lhs} vs {rhs}");
        let p3 = p.mul(3);
        assert!((hh(&p3).value - 9.0 * hh(&p).value).abs() < 1e-7);
    }
}
