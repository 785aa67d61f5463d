//! Absolute logarithmic Weil height, the product formula and Liouville's
//! inequality.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::complex::{eval_on_enclosure, ln_abs_interval, Embeddings};
use super::integer::{factorize, ln_abs, valuation_rat};
use super::numfield::{NfElement, MAX_PRECISION};
use super::place::Place;
use crate::error::{Error, Result};
use crate::splitting::dedekind_factor;

/// A real number with a certified absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enclosed {
    pub value: f64,
    pub error: f64,
}

impl Enclosed {
    pub fn exact(value: f64) -> Self {
        Enclosed { value, error: f64_ulps(value) }
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.value - x).abs() <= self.error
    }
}

fn f64_ulps(v: f64) -> f64 {
    8.0 * f64::EPSILON * v.abs().max(f64::MIN_POSITIVE)
}

/// Default target error for heights.
pub const DEFAULT_HEIGHT_ERROR: f64 = 1e-12;

/// `log max(1, |σ(α)|)` summed over archimedean places with weights `d_v`.
fn archimedean_sum(
    alpha: &NfElement,
    emb: &Embeddings,
    f: impl Fn(f64) -> f64,
    allow_small: bool,
) -> Option<(f64, f64)> {
    let mut total = 0.0;
    let mut err = 0.0;
    for (i, root) in emb.places().iter().enumerate() {
        let d = emb.local_degree(i) as f64;
        let (c, e) = eval_on_enclosure(alpha.coords(), root);
        match ln_abs_interval(&c, &e) {
            Some((v, ev)) => {
                total += d * f(v);
                err += d * ev;
            }
            None => {
                // disk may reach zero: only acceptable when it lies inside the unit disk
                if !allow_small {
                    return None;
                }
                let bound = c.norm_sq() + &e * &e * BigRational::from_integer(4.into());
                if bound >= BigRational::one() / BigRational::from_integer(4.into()) {
                    return None;
                }
            }
        }
    }
    Some((total, err))
}

fn primitive_leading(cp: &[BigRational]) -> BigInt {
    let den = cp.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = cp.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    (&den / content).abs()
}

/// `h(α) = (1/[K:Q]) Σ_v d_v log max(1, |α|_v)` with a certified error.
///
/// The finite part is the log of the leading coefficient of the primitive
/// integer characteristic polynomial; the archimedean part uses the root
/// enclosures, refined until the error is below `max_error`.
pub fn weil_height(alpha: &NfElement, max_error: f64) -> Result<Enclosed> {
    let field = alpha.field();
    let n = field.degree() as f64;
    if let Some(r) = alpha.as_rational() {
        if r.is_zero() {
            return Ok(Enclosed { value: 0.0, error: 0.0 });
        }
        let v = ln_abs(r.numer()).max(ln_abs(r.denom()));
        return Ok(Enclosed::exact(v));
    }
    let lead = primitive_leading(&alpha.charpoly());
    let finite = ln_abs(&lead);
    let mut prec = field.embeddings().precision;
    loop {
        let emb = field.embeddings_at(prec)?;
        if let Some((arch, err)) = archimedean_sum(alpha, &emb, |v| v.max(0.0), true) {
            let value = (finite + arch) / n;
            let error = err / n + f64_ulps(finite) + f64_ulps(arch);
            if error <= max_error.max(f64_ulps(value) * 4.0) {
                return Ok(Enclosed { value, error });
            }
        }
        if prec >= MAX_PRECISION {
            return Err(Error::PrecisionExhausted(format!(
                "height of {alpha} not certified at {MAX_PRECISION} bits"
            )));
        }
        prec = (prec * 2).min(MAX_PRECISION);
    }
}

/// Local contribution `d_w log|α|_w` at a finite place (`e = 1`).
pub fn finite_log_abs(alpha: &NfElement, w: &Place) -> Result<f64> {
    match w {
        Place::Finite(w) => {
            let v = w.valuation(alpha)?;
            Ok(-(v as f64) * w.residue_degree as f64 * (w.p as f64).ln())
        }
        Place::Infinite(_) => Err(Error::Precondition("expected a finite place".into())),
    }
}

/// `Σ_v d_v log|α|_v` over all places; the enclosure must contain 0.
///
/// At primes not dividing the discriminant the finite part is assembled
/// place by place from exact valuations; at the remaining primes it is
/// `-v_p(N(α)) log p`, which is the same sum grouped by `p`.
pub fn product_formula_defect(alpha: &NfElement) -> Result<Enclosed> {
    if alpha.is_zero() {
        return Err(Error::ZeroElement);
    }
    let field = alpha.field();
    let norm = alpha.norm();
    let mut primes: Vec<u64> = Vec::new();
    for part in [norm.numer(), norm.denom()] {
        for (p, _) in factorize(part) {
            let p: u64 = u64::try_from(&p)
                .map_err(|_| Error::CapExceeded("prime factor exceeds 64 bits".into()))?;
            primes.push(p);
        }
    }
    primes.sort_unstable();
    primes.dedup();
    let mut finite = 0.0;
    for &p in &primes {
        let vp_norm = valuation_rat(&norm, p);
        let disc_divisible = (field.disc() % BigInt::from(p)).is_zero();
        let total_v = if field.is_rational() || disc_divisible {
            vp_norm
        } else {
            let mut s = 0i64;
            for w in dedekind_factor(field, p)? {
                s += w.valuation(alpha)? * w.residue_degree as i64;
            }
            debug_assert_eq!(s, vp_norm);
            s
        };
        finite -= total_v as f64 * (p as f64).ln();
    }
    let mut prec = field.embeddings().precision;
    loop {
        let emb = field.embeddings_at(prec)?;
        if let Some((arch, err)) = archimedean_sum(alpha, &emb, |v| v, false) {
            let value = finite + arch;
            let error = err + f64_ulps(finite) * (primes.len() as f64 + 1.0) + f64_ulps(arch) * field.degree() as f64;
            return Ok(Enclosed { value, error });
        }
        if prec >= MAX_PRECISION {
            return Err(Error::PrecisionExhausted("archimedean values not separated from 0".into()));
        }
        prec = (prec * 2).min(MAX_PRECISION);
    }
}

/// Outcome of Liouville's inequality on a set of places, in log form.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LiouvilleReport {
    pub log_lower: f64,
    pub log_value: f64,
    pub log_upper: f64,
    pub error: f64,
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
}

/// Checks `(2H(α)H(β))^{-[L:K]} ≤ Π_{w∈S} ‖α−β‖_{w,K} ≤ (2H(α)H(β))^{[L:K]}`
/// with `‖x‖_{w,K} = |x|_w^{d_w/d_v}`.
///
/// `alpha` lives in `L`; `beta` lives in `K`, and `gen_image` is the image
/// of the generator of `K` in `L`, which fixes the embedding `K ⊆ L`.
pub fn liouville_check(
    alpha: &NfElement,
    beta: &NfElement,
    gen_image: &NfElement,
    places: &[Place],
) -> Result<LiouvilleReport> {
    let l = alpha.field();
    let k = beta.field();
    if !gen_image.field().as_ref().eq(l.as_ref()) {
        return Err(Error::Mismatch);
    }
    let kpoly: Vec<BigRational> = k.poly().iter().map(|c| BigRational::from_integer(c.clone())).collect();
    if !gen_image.eval_poly(&kpoly).is_zero() {
        return Err(Error::Precondition("generator image is not a root of the subfield polynomial".into()));
    }
    let beta_l = gen_image.eval_poly(beta.coords());
    if *alpha == beta_l {
        return Err(Error::EqualInputs);
    }
    let diff = alpha - &beta_l;
    let rel_degree = (l.degree() / k.degree()) as f64;
    let mut log_value = 0.0;
    let mut error = 0.0;
    for w in places {
        let dw = w.local_degree(l) as f64;
        let dv = below_local_degree(gen_image, w)? as f64;
        let lv = match w {
            Place::Finite(_) => finite_log_abs(&diff, w)? / dw,
            Place::Infinite(i) => {
                let emb = l.embeddings();
                let (c, e) = eval_on_enclosure(diff.coords(), &emb.places()[*i]);
                let (v, ev) = ln_abs_interval(&c, &e)
                    .ok_or_else(|| Error::PrecisionExhausted("|α−β| not separated from 0".into()))?;
                error += ev * dw / dv;
                v
            }
        };
        log_value += lv * dw / dv;
    }
    let ha = weil_height(alpha, DEFAULT_HEIGHT_ERROR)?;
    let hb = weil_height(beta, DEFAULT_HEIGHT_ERROR)?;
    let log_bound = rel_degree * (2f64.ln() + ha.value + hb.value);
    error += rel_degree * (ha.error + hb.error) + f64_ulps(log_value);
    let rep = LiouvilleReport {
        log_lower: -log_bound,
        log_value,
        log_upper: log_bound,
        error,
        lower: (-log_bound).exp(),
        value: log_value.exp(),
        upper: log_bound.exp(),
    };
    if rep.log_value < rep.log_lower - error || rep.log_value > rep.log_upper + error {
        return Err(Error::Precondition(format!(
            "Liouville bounds violated: {} not in [{}, {}]",
            rep.log_value, rep.log_lower, rep.log_upper
        )));
    }
    Ok(rep)
}

/// Local degree `d_v` of the place of the subfield below `w`.
fn below_local_degree(gen_image: &NfElement, w: &Place) -> Result<u32> {
    let l = gen_image.field();
    match w {
        Place::Infinite(i) => {
            let emb = l.embeddings();
            if *i < emb.r1 {
                return Ok(1);
            }
            // complex place of L: below it a real place iff the image is real there
            let (c, e) = eval_on_enclosure(gen_image.coords(), &emb.places()[*i]);
            let im = c.im.abs();
            if im <= e {
                Ok(1)
            } else {
                Ok(2)
            }
        }
        Place::Finite(wp) => {
            if gen_image.as_rational().is_some() {
                return Ok(1);
            }
            // residue degree of the prime below: degree of the residue of the image over F_p
            let x = wp.residue(gen_image)?;
            let modulus = wp.local_field()?.residue_modulus().to_vec();
            let p = wp.p;
            let mut cur = x.clone();
            for d in 1..=wp.residue_degree {
                // Frobenius orbit length of the residue class
                cur = super::fp::powmod(&cur, &p.into(), &modulus, p);
                let mut a = cur.clone();
                super::fp::trim(&mut a);
                let mut b = x.clone();
                super::fp::trim(&mut b);
                if a == b {
                    return Ok(d);
                }
            }
            Ok(wp.residue_degree)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::integer::rat;
    use crate::arith::numfield::NumberField;
    use crate::arith::place::PrimeIdeal;

    #[test]
    fn rational_heights() {
        let q = NumberField::rationals();
        assert_eq!(weil_height(&q.one(), 1e-12).unwrap().value, 0.0);
        let h = weil_height(&q.from_rational(rat(3, 2)), 1e-12).unwrap();
        assert!((h.value - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn sqrt_two_height() {
        let k = NumberField::from_coeffs(&[-2, 0, 1]).unwrap();
        let h = weil_height(&k.generator(), 1e-12).unwrap();
        assert!((h.value - 0.5 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn product_formula_examples() {
        let q = NumberField::rationals();
        let d = product_formula_defect(&q.from_int(7)).unwrap();
        assert!(d.contains(0.0) && d.error <= 1e-12);
        let qi = NumberField::from_coeffs(&[1, 0, 1]).unwrap();
        let a = (&qi.generator() + &qi.one()).scale(&rat(1, 3));
        assert!(product_formula_defect(&a).unwrap().contains(0.0));
        let q2 = NumberField::from_coeffs(&[-2, 0, 1]).unwrap();
        assert!(product_formula_defect(&q2.generator()).unwrap().contains(0.0));
    }

    #[test]
    fn liouville_over_q() {
        let q = NumberField::rationals();
        let v3 = [Place::Finite(PrimeIdeal::rational(3))];
        let g = q.generator();
        let r = liouville_check(&q.from_int(2), &q.from_int(1), &g, &v3).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!((r.lower - 0.25).abs() < 1e-12 && (r.upper - 4.0).abs() < 1e-12);
        let r = liouville_check(&q.from_rational(rat(1, 3)), &q.zero(), &g, &v3).unwrap();
        assert!((r.value - 3.0).abs() < 1e-12);
        assert!((r.upper - 6.0).abs() < 1e-12);
        assert_eq!(
            liouville_check(&q.from_int(5), &q.from_int(5), &g, &v3).unwrap_err(),
            Error::EqualInputs
        );
    }
}
