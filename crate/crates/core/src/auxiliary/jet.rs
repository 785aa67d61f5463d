use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::basis::{normalized_factors, SectionBasis};
use super::formal::{formal_add, formal_w, formal_xy, mult_series, rational_coefficients, w_coefficients};
use super::ring::Ring;
use super::section::AuxSection;
use super::series::{FormalSeries, Series};
use crate::arith::integer::{ln_abs, ln_abs_rat, primes_up_to};
use crate::arith::{NfElement, PadicNumber, PrimeIdeal};
use crate::elliptic::{reduce_point, CurvePoint, Reduction};
use crate::error::{Error, Result};

/// Taylor coefficients of the normalized section along `ε ↦ (P ⊞ ε, [N](P ⊞ ε))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JetReport {
    /// First index with a nonzero coefficient.
    pub tf: usize,
    /// `v_w` of coefficients `0..=order`; `None` marks a coefficient that
    /// vanishes to working precision (exactly, below `tf`).
    pub valuations: Vec<Option<i64>>,
    /// `v_w(z(P))` when `P` reduces to the identity at `w`.
    pub m: Option<i64>,
    /// p-adic digits used for the local evaluation.
    pub padic_digits: i64,
    /// The coefficient at `tf`, exactly, as a field element.
    #[serde(serialize_with = "display")]
    pub coefficient: NfElement,
}

fn display<S: serde::Serializer>(c: &NfElement, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&c.to_string())
}

/// Where a factor of the jet point sits relative to `w`.
enum Anchor<R> {
    Origin,
    /// Reduces to the identity at `w`; `z` is `-x/y`.
    Near { x: R, y: R, z: R },
    Affine { x: R, y: R },
}

/// Rational data shared by both evaluation rings.
struct Local {
    basis: SectionBasis,
    u: Vec<FormalSeries>,
    x: FormalSeries,
    y: FormalSeries,
    mult: FormalSeries,
    a: BigRational,
    b: BigRational,
}

fn local_data(f: &AuxSection, prec: usize, terms: usize) -> Result<Local> {
    let e = f.curve()?;
    let (a, b) = rational_coefficients(&e)?;
    let basis = SectionBasis::new(f.l)?;
    let u = normalized_factors(&e, &basis, terms.max(prec))?;
    let w = formal_w(&e, prec + 4 * f.l as usize + 12)?;
    let (x, y) = formal_xy(&w)?;
    let mult = mult_series(&e, f.n, prec + 6)?;
    Ok(Local { basis, u, x, y, mult, a, b })
}

/// `Q ⊞ (x_η, y_η)` by the chord through `Q` and the moving point.
fn chord<R: Ring>(xq: &R, yq: &R, xe: &Series<R>, ye: &Series<R>, prec: i64) -> Result<(Series<R>, Series<R>)> {
    let work = xe.precision().max(ye.precision()) + 8;
    let cx = Series::constant(xq, work);
    let cy = Series::constant(yq, work);
    let lam = ye.sub(&cy).div(&xe.sub(&cx))?;
    let x3 = lam.square().sub(xe).sub(&cx);
    let y3 = lam.mul(&cx.sub(&x3)).sub(&cy);
    let clean = |s: Series<R>| -> Result<Series<R>> {
        let v = s.valuation_bound();
        if (v..0.min(s.precision())).any(|k| !s.coeff(k).is_zero_elem()) {
            return Err(Error::PrecisionExhausted("pole of a translated point did not cancel".into()));
        }
        let s = s.drop_negative();
        if s.precision() < prec {
            return Err(Error::PrecisionExhausted(format!("translated point known to order {} of {prec}", s.precision())));
        }
        Ok(s.truncate(prec))
    };
    Ok((clean(x3)?, clean(y3)?))
}

/// Normalized factor values `e(Q ⊞ η)` for each basis function `e`.
fn factor_values<R: Ring>(
    loc: &Local,
    anchor: &Anchor<R>,
    eta: &Series<R>,
    zero: &R,
    prec: usize,
    terms: usize,
    exact: bool,
) -> Result<Vec<Series<R>>> {
    let p = prec as i64;
    let embed = |s: &FormalSeries| s.embed_into(zero);
    let a = zero.embed(&loc.a);
    let b = zero.embed(&loc.b);
    match anchor {
        Anchor::Origin => loc.u.iter().map(|u| Ok(embed(u).compose(eta)?.truncate(p))).collect(),
        Anchor::Near { z, .. } if !exact => {
            let wc = w_coefficients(&a, &b, terms + 1);
            let s = formal_add(&a, &b, &wc, &Series::constant(z, p), eta)?;
            Ok(loc.u.iter().map(|u| embed(u).compose_with_constant(&s, terms).truncate(p)).collect())
        }
        Anchor::Near { x, y, .. } | Anchor::Affine { x, y } => {
            let xe = embed(&loc.x).compose(eta)?;
            let ye = embed(&loc.y).compose(eta)?;
            let (xs, ys) = chord(x, y, &xe, &ye, p)?;
            let scale = match anchor {
                Anchor::Near { .. } => Some(xs.neg().div(&ys)?.pow(2 * loc.basis.l).truncate(p)),
                _ => None,
            };
            Ok(loc
                .basis
                .factor
                .iter()
                .map(|m| {
                    let v = m.eval(&xs, &ys).truncate(p);
                    match &scale {
                        Some(s) => v.mul(s),
                        None => v,
                    }
                })
                .collect())
        }
    }
}

fn combine<R: Ring>(first: &[Series<R>], second: &[Series<R>], coeffs: &[BigInt], zero: &R, prec: i64) -> Series<R> {
    let k = first.len();
    let mut acc = Series::zero(zero, prec);
    for (iu, u) in first.iter().enumerate() {
        let mut inner = Series::zero(zero, prec);
        for (iv, v) in second.iter().enumerate() {
            let b = &coeffs[iu * k + iv];
            if !b.is_zero() {
                inner = inner.add(&v.scale(&zero.embed(&BigRational::from_integer(b.clone()))));
            }
        }
        acc = acc.add(&u.mul(&inner));
    }
    acc
}

/// The pulled-back section over an evaluation ring, given both anchors.
fn evaluate<R: Ring>(
    f: &AuxSection,
    loc: &Local,
    anchors: [&Anchor<R>; 2],
    zero: &R,
    prec: usize,
    terms: usize,
    exact: bool,
) -> Result<Series<R>> {
    // the pole of x(η) costs three orders of precision in the chord path
    let slack = prec as i64 + 6;
    let eps = Series::variable(zero, slack);
    let eta2 = loc.mult.embed_into(zero).truncate(slack);
    let first = factor_values(loc, anchors[0], &eps, zero, prec, terms, exact)?;
    let second = factor_values(loc, anchors[1], &eta2, zero, prec, terms, exact)?;
    Ok(combine(&first, &second, &f.coeffs, zero, prec as i64))
}

fn exact_anchor(q: &CurvePoint, w: &PrimeIdeal) -> Result<(Anchor<NfElement>, Option<i64>)> {
    let Some((x, y)) = q.xy() else {
        return Ok((Anchor::Origin, None));
    };
    match reduce_point(q, w)? {
        Reduction::Identity { m } => {
            let z = -&(x * &y.inv()?);
            Ok((Anchor::Near { x: x.clone(), y: y.clone(), z }, m))
        }
        Reduction::Affine { .. } => Ok((Anchor::Affine { x: x.clone(), y: y.clone() }, None)),
    }
}

fn padic_anchor(a: &Anchor<NfElement>, w: &PrimeIdeal, k: i64) -> Result<Anchor<PadicNumber>> {
    Ok(match a {
        Anchor::Origin => Anchor::Origin,
        Anchor::Near { x, y, z } => Anchor::Near { x: w.embed(x, k)?, y: w.embed(y, k)?, z: w.embed(z, k)? },
        Anchor::Affine { x, y } => Anchor::Affine { x: w.embed(x, k)?, y: w.embed(y, k)? },
    })
}

fn check_curve(f: &AuxSection, p: &CurvePoint) -> Result<()> {
    let e = f.curve()?;
    let (a, b) = rational_coefficients(&e)?;
    let pc = p.curve();
    if pc.a().as_rational() != Some(&a) || pc.b().as_rational() != Some(&b) {
        return Err(Error::Mismatch);
    }
    Ok(())
}

/// Jet of the section at `P` through `ε^order`.
///
/// The coefficients are computed over the completion at `w`. A coefficient
/// that is nonzero there is nonzero, so the first such index bounds `Tf`;
/// coefficients below it that vanish to working precision are settled by an
/// exact pass over the field of definition of `P`, run only that far. The
/// digit count is doubled once before giving up.
pub fn jet_evaluate(f: &AuxSection, p: &CurvePoint, w: &PrimeIdeal, order: usize) -> Result<JetReport> {
    check_curve(f, p)?;
    let prec = order + 1;
    let (a1, m) = exact_anchor(p, w)?;
    let (a2, _) = exact_anchor(&p.mul(f.n as i64), w)?;
    let step = m.unwrap_or(1).max(1);
    let digits0 = (f.t0 as i64 + order as i64 + 10) * step;
    let terms_for = |k: i64| prec + (k as usize).div_ceil(step as usize) + 2;
    let loc = local_data(f, prec, terms_for(2 * digits0))?;
    let ctx = w.local_field()?;
    let mut digits = digits0;
    loop {
        let pzero = PadicNumber::zero(&ctx, digits);
        let anchors = [padic_anchor(&a1, w, digits)?, padic_anchor(&a2, w, digits)?];
        let local = evaluate(f, &loc, [&anchors[0], &anchors[1]], &pzero, prec, terms_for(digits), false)?;
        let valuations: Vec<Option<i64>> = (0..prec as i64).map(|t| local.coeff(t).valuation()).collect();
        let bound = valuations.iter().position(|v| v.is_some());
        let settle = bound.map_or(prec, |b| b + 1);
        let exact = evaluate(f, &loc, [&a1, &a2], &p.curve().base().zero(), settle, settle, true)?;
        let tf = (0..settle).find(|&t| !exact.coeff(t as i64).is_zero());
        match tf {
            Some(tf) if valuations[tf].is_some() => {
                let coefficient = exact.coeff(tf as i64);
                if w.valuation(&coefficient)? != valuations[tf].unwrap() {
                    return Err(Error::Mismatch);
                }
                return Ok(JetReport { tf, valuations, m, padic_digits: digits, coefficient });
            }
            None => return Err(Error::AllZero(order)),
            Some(_) if digits > digits0 => {
                return Err(Error::PrecisionExhausted(format!("jet coefficient not separated at {digits} digits")))
            }
            Some(_) => digits *= 2,
        }
    }
}

/// Every place's contribution to `Σ_v log |c|_v` for a rational `c ≠ 0`.
///
/// Primes below [`LEDGER_TRIAL_BOUND`] are listed one by one. What is left
/// of the numerator and denominator is kept as two cofactors whose primes
/// are not separated; their logarithms are the summed contributions of all
/// places dividing them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductFormulaLedger {
    pub archimedean: f64,
    /// `(p, v_p(c), -v_p(c) log p)`.
    pub finite: Vec<(u64, i64, f64)>,
    /// `log d' - log n'` for the unfactored cofactors `n'`, `d'`.
    pub unfactored: f64,
    pub unfactored_digits: (usize, usize),
    pub sum: f64,
}

pub const LEDGER_TRIAL_BOUND: u64 = 10_000;

pub fn product_formula_ledger(c: &BigRational) -> Result<ProductFormulaLedger> {
    if c.is_zero() {
        return Err(Error::ZeroElement);
    }
    let mut finite = Vec::new();
    let mut num = c.numer().abs();
    let mut den = c.denom().clone();
    for p in primes_up_to(LEDGER_TRIAL_BOUND) {
        let bp = BigInt::from(p);
        let mut v = 0i64;
        while (&num % &bp).is_zero() {
            num /= &bp;
            v += 1;
        }
        while (&den % &bp).is_zero() {
            den /= &bp;
            v -= 1;
        }
        if v != 0 {
            finite.push((p, v, -(v as f64) * (p as f64).ln()));
        }
    }
    let archimedean = ln_abs_rat(c);
    let unfactored = ln_abs(&den) - ln_abs(&num);
    let digits = |n: &BigInt| if n.is_one() { 0 } else { n.to_string().len() };
    let sum = archimedean + finite.iter().map(|t| t.2).sum::<f64>() + unfactored;
    Ok(ProductFormulaLedger { archimedean, finite, unfactored, unfactored_digits: (digits(&num), digits(&den)), sum })
}

/// Both sides of the ultrametric drop at a place where `P` reduces to `O`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DropReport {
    pub p: u64,
    pub residue_degree: u32,
    #[serde(rename = "T0")]
    pub t0: u32,
    pub tf: usize,
    /// `v_w(c_Tf)`.
    pub valuation: i64,
    pub m: Option<i64>,
    /// `f · v_w(c_Tf)`, in units of `log p`.
    pub lhs: i64,
    /// `f · (T0 - Tf)`.
    pub rhs: i64,
    /// `f · m · (T0 - Tf)`.
    pub rhs_strengthened: i64,
    pub holds: bool,
    pub holds_strengthened: bool,
    pub jet: JetReport,
    /// Present when the coefficient is rational.
    pub ledger: Option<ProductFormulaLedger>,
}

pub fn verify_drop(f: &AuxSection, p: &CurvePoint, w: &PrimeIdeal) -> Result<DropReport> {
    check_curve(f, p)?;
    if !reduce_point(p, w)?.is_identity() {
        return Err(Error::Precondition(format!("point does not reduce to the identity at {w}")));
    }
    let order = (f.t0 as usize + 4 * f.l as usize + 2).max(f.tf_origin as usize + 2);
    let jet = jet_evaluate(f, p, w, order)?;
    let valuation = jet.valuations[jet.tf].expect("coefficient at tf is nonzero");
    let fdeg = w.residue_degree as i64;
    let gap = f.t0 as i64 - jet.tf as i64;
    let lhs = valuation * fdeg;
    let rhs = gap * fdeg;
    let rhs_strengthened = rhs * jet.m.unwrap_or(1);
    let ledger = jet.coefficient.as_rational().map(product_formula_ledger).transpose()?;
    Ok(DropReport {
        p: w.p,
        residue_degree: w.residue_degree,
        t0: f.t0,
        tf: jet.tf,
        valuation,
        m: jet.m,
        lhs,
        rhs,
        rhs_strengthened,
        holds: lhs >= rhs,
        holds_strengthened: lhs >= rhs_strengthened,
        jet,
        ledger,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auxiliary::build_aux_section;
    use crate::elliptic::{amplify, Curve};

    fn fixture() -> AuxSection {
        let e = Curve::over_q(0, -2).unwrap();
        build_aux_section(&e, 2, 3, 8).unwrap()
    }

    #[test]
    fn drop_at_amplified_point() {
        let f = fixture();
        let e = f.curve().unwrap();
        let w = PrimeIdeal::rational(7);
        let (m, q) = amplify(&e.point_q((3, 1), (5, 1)).unwrap(), &w).unwrap();
        assert_eq!(m, 7);
        let r = verify_drop(&f, &q, &w).unwrap();
        assert!(r.holds && r.holds_strengthened, "{r:?}");
        let ledger = r.ledger.unwrap();
        assert!(ledger.sum.abs() < 1e-9, "{}", ledger.sum);
    }

    #[test]
    fn affine_point_has_value_as_first_coefficient() {
        let f = fixture();
        let e = f.curve().unwrap();
        let p = e.point_q((3, 1), (5, 1)).unwrap();
        let w = PrimeIdeal::rational(7);
        let j = jet_evaluate(&f, &p, &w, 4).unwrap();
        assert_eq!(j.tf, 0);
        assert!(matches!(verify_drop(&f, &p, &w), Err(Error::Precondition(_))));
    }

    #[test]
    fn origin_jet_matches_section_order() {
        let f = fixture();
        let e = f.curve().unwrap();
        let w = PrimeIdeal::rational(11);
        let j = jet_evaluate(&f, &e.infinity(), &w, f.tf_origin as usize).unwrap();
        assert_eq!(j.tf, f.tf_origin as usize);
        assert!(matches!(jet_evaluate(&f, &e.infinity(), &w, f.t0 as usize), Err(Error::AllZero(8))));
    }

    #[test]
    fn local_and_exact_valuations_agree() {
        let f = fixture();
        let e = f.curve().unwrap();
        let p = e.point_q((3, 1), (5, 1)).unwrap();
        for (pt, w) in [(p.clone(), PrimeIdeal::rational(5)), (p.mul(7), PrimeIdeal::rational(7))] {
            let order = 5;
            let j = jet_evaluate(&f, &pt, &w, order).unwrap();
            let (a1, _) = exact_anchor(&pt, &w).unwrap();
            let (a2, _) = exact_anchor(&pt.mul(2), &w).unwrap();
            let loc = local_data(&f, order + 1, order + 1).unwrap();
            let exact = evaluate(&f, &loc, [&a1, &a2], &e.base().zero(), order + 1, order + 1, true).unwrap();
            for t in 0..=order {
                let c = exact.coeff(t as i64);
                let v = if c.is_zero() { None } else { Some(w.valuation(&c).unwrap()) };
                assert_eq!(v, j.valuations[t], "coefficient {t} at {w}");
            }
        }
    }

    #[test]
    fn ledger_balances() {
        let c = BigRational::new(BigInt::from(-98), BigInt::from(45));
        let l = product_formula_ledger(&c).unwrap();
        assert!(l.sum.abs() < 1e-12);
        assert_eq!(l.finite.iter().map(|t| (t.0, t.1)).collect::<Vec<_>>(), vec![(2, 1), (3, -2), (5, -1), (7, 2)]);
    }
}
