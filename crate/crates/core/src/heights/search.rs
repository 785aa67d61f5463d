use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{canonical_height, is_torsion, naive_height, HeightValue};
use crate::arith::integer::{common_denominator, rational_sqrt};
use crate::arith::numfield::{Field, NfElement};
use crate::elliptic::{Curve, CurvePoint, CurveRef, CurveSpec, PointSpec};
use crate::error::{Error, Result};

/// Largest field degree the coefficient box search accepts.
pub const MAX_SEARCH_DEGREE: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Box bound is `B = floor(exp(naive_cap))`.
    pub naive_cap: f64,
    /// Points with `ĥ < hhat_cap` are reported.
    pub hhat_cap: f64,
    /// Maximum number of candidate x-coordinates.
    pub budget: u64,
    /// Requested certified error on each `ĥ`.
    pub tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { naive_cap: 10f64.ln(), hhat_cap: 2.0, budget: 2_000_000, tol: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchedPoint {
    pub point: PointSpec,
    pub naive_height: f64,
    pub hhat: HeightValue,
    pub torsion: bool,
    pub torsion_order: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub curve: CurveSpec,
    pub field: Vec<String>,
    pub options: SearchOptions,
    pub box_bound: u64,
    pub candidates: u64,
    /// Affine points found in the box, before the `ĥ` filter.
    pub points_found: usize,
    /// Points with `ĥ < hhat_cap`, torsion included, in search order.
    pub points: Vec<SearchedPoint>,
    pub torsion_found: Vec<PointSpec>,
    pub min_nonzero_hhat: Option<HeightValue>,
    pub min_nonzero_point: Option<PointSpec>,
}

impl SearchRecord {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,naive_height,hhat,hhat_error,torsion\n");
        for p in &self.points {
            let (x, y) = match &p.point {
                PointSpec::Affine([x, y]) => (coord_text(x), coord_text(y)),
                PointSpec::Infinity(s) => (s.clone(), s.clone()),
            };
            out.push_str(&format!(
                "{x},{y},{:.12},{:.12},{:.3e},{}\n",
                p.naive_height, p.hhat.value, p.hhat.error, p.torsion
            ));
        }
        out
    }
}

fn coord_text(c: &crate::elliptic::CoordSpec) -> String {
    match serde_json::to_value(c).expect("serializable") {
        serde_json::Value::String(s) => s,
        serde_json::Value::Array(v) => {
            let parts: Vec<String> = v.iter().map(|s| s.as_str().unwrap_or_default().to_string()).collect();
            format!("\"[{}]\"", parts.join(" "))
        }
        other => other.to_string(),
    }
}

/// `E` over `field`, base-changing when `E` has rational coefficients.
fn curve_over(e: &CurveRef, field: &Field) -> Result<CurveRef> {
    if e.base().poly() == field.poly() {
        return Ok(e.clone());
    }
    match (e.a().as_rational(), e.b().as_rational()) {
        (Some(a), Some(b)) => Curve::new(field.from_rational(a.clone()), field.from_rational(b.clone())),
        _ => Err(Error::Precondition("curve is not defined over the search field".into())),
    }
}

/// Square roots of `c` in `K` (`y` and `-y`, or one root for zero).
pub fn nf_sqrt(c: &NfElement) -> Option<NfElement> {
    if c.is_zero() {
        return Some(c.clone());
    }
    let k = c.field();
    if let Some(r) = c.as_rational() {
        if let Some(s) = rational_sqrt(r) {
            return Some(k.from_rational(s));
        }
        if k.degree() == 1 {
            return None;
        }
    }
    // N(c) = N(y)^2
    rational_sqrt(&c.norm())?;
    let emb = k.embeddings();
    let mut roots: Vec<Complex64> = Vec::new();
    let mut pair_of: Vec<usize> = Vec::new();
    for (i, r) in emb.places().iter().enumerate() {
        let z = r.center.to_c64();
        roots.push(z);
        pair_of.push(i);
        if !r.is_real {
            roots.push(z.conj());
            pair_of.push(i);
        }
    }
    let n = roots.len();
    let coords: Vec<f64> = c.coords().iter().map(crate::arith::integer::rat_to_f64).collect();
    let values: Vec<Complex64> = roots
        .iter()
        .map(|z| coords.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a))
        .collect();
    let places = emb.places().len();
    let den = common_denominator(c.coords()) * k.disc().abs();
    let den_f = den.to_f64()?;
    // first place's sign is fixed; -y is the other root
    for mask in 0u32..(1 << (places - 1)) {
        let target: Vec<Complex64> = (0..n)
            .map(|j| {
                let place = pair_of[j];
                let s = if place > 0 && (mask >> (place - 1)) & 1 == 1 { -1.0 } else { 1.0 };
                let is_conj = j > 0 && pair_of[j - 1] == place;
                let root = if is_conj { values[j - 1].sqrt().conj() } else { values[j].sqrt() };
                root * s
            })
            .collect();
        let Some(y) = solve_vandermonde(&roots, &target) else { continue };
        let mut cand = Vec::with_capacity(n);
        let mut ok = true;
        for v in y {
            let scaled = v.re * den_f;
            if !scaled.is_finite() || (scaled - scaled.round()).abs() > 0.25 || v.im.abs() * den_f > 0.25 {
                ok = false;
                break;
            }
            cand.push(BigRational::new(BigInt::from(scaled.round() as i128), den.clone()));
        }
        if !ok {
            continue;
        }
        let Ok(y) = k.element(cand) else { continue };
        if &(&y * &y) == c {
            return Some(y);
        }
    }
    None
}

fn solve_vandermonde(roots: &[Complex64], rhs: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = roots.len();
    let mut m: Vec<Vec<Complex64>> = roots
        .iter()
        .zip(rhs)
        .map(|(z, r)| {
            let mut row: Vec<Complex64> = (0..n).map(|k| z.powu(k as u32)).collect();
            row.push(*r);
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))?;
        if m[piv][col].norm() == 0.0 {
            return None;
        }
        m.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                for c in col..=n {
                    let t = m[col][c];
                    m[r][c] -= f * t;
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

/// Height of a found point, loosening the tolerance if exact coordinates
/// grow too large.
fn robust_height(p: &CurvePoint, tol: f64) -> Result<HeightValue> {
    let mut t = tol;
    loop {
        match canonical_height(p, t) {
            Err(Error::CoordinateBlowup(msg)) => {
                if t >= 0.1 {
                    return Err(Error::CoordinateBlowup(msg));
                }
                t *= 10.0;
            }
            other => return other,
        }
    }
}

/// All points of `E(K)` with x-coordinate `(c_0 + ... + c_{n-1}θ^{n-1})/d`,
/// `1 ≤ d ≤ B`, `|c_i| ≤ B`, together with their canonical heights.
pub fn search_small_points(e: &CurveRef, field: &Field, opts: &SearchOptions) -> Result<SearchRecord> {
    if field.degree() > MAX_SEARCH_DEGREE {
        return Err(Error::CapExceeded(format!("field degree {} above {MAX_SEARCH_DEGREE}", field.degree())));
    }
    let e = curve_over(e, field)?;
    let bound = (opts.naive_cap.exp() + 1e-9).floor().max(1.0) as u64;
    let n = field.degree() as u32;
    let per_den = (2 * bound + 1).checked_pow(n);
    let total = per_den.and_then(|m| m.checked_mul(bound));
    let (Some(per_den), Some(total)) = (per_den, total) else {
        return Err(Error::CapExceeded("candidate count overflows".into()));
    };
    if total > opts.budget {
        return Err(Error::CapExceeded(format!("{total} candidates exceed the budget {}", opts.budget)));
    }
    let width = 2 * bound as i64 + 1;
    let mut found: Vec<CurvePoint> = Vec::new();
    for d in 1..=bound as i64 {
        let batch: Vec<Vec<CurvePoint>> = (0..per_den)
            .into_par_iter()
            .map(|idx| -> Result<Vec<CurvePoint>> {
                let mut rem = idx as i64;
                let mut coeffs = vec![0i64; n as usize];
                for slot in coeffs.iter_mut().rev() {
                    *slot = rem % width - bound as i64;
                    rem /= width;
                }
                let g = coeffs.iter().fold(d, |g, c| g.gcd(c));
                if g != 1 {
                    return Ok(Vec::new());
                }
                let x = field.element(coeffs.iter().map(|&c| BigRational::new(c.into(), d.into())).collect())?;
                let rhs = e.rhs(&x);
                Ok(match nf_sqrt(&rhs) {
                    None => Vec::new(),
                    Some(y) if y.is_zero() => vec![e.point(x, y)?],
                    Some(y) => {
                        let p = e.point(x.clone(), y)?;
                        vec![p.clone(), p.neg()]
                    }
                })
            })
            .collect::<Result<_>>()?;
        found.extend(batch.into_iter().flatten());
    }
    let points_found = found.len();
    let rows: Vec<SearchedPoint> = found
        .par_iter()
        .map(|p| -> Result<SearchedPoint> {
            let cert = is_torsion(p)?;
            let hhat = if cert.is_torsion { HeightValue::zero() } else { robust_height(p, opts.tol)? };
            Ok(SearchedPoint {
                point: p.to_spec(),
                naive_height: naive_height(p)?,
                hhat,
                torsion: cert.is_torsion,
                torsion_order: cert.order,
            })
        })
        .collect::<Result<_>>()?;
    let torsion_found: Vec<PointSpec> = rows.iter().filter(|r| r.torsion).map(|r| r.point.clone()).collect();
    let points: Vec<SearchedPoint> =
        rows.into_iter().filter(|r| r.torsion || r.hhat.value < opts.hhat_cap).collect();
    let min = points
        .iter()
        .filter(|r| !r.torsion)
        .min_by(|a, b| a.hhat.value.total_cmp(&b.hhat.value));
    Ok(SearchRecord {
        curve: e.to_spec(),
        field: field.poly().iter().map(|c| c.to_string()).collect(),
        options: *opts,
        box_bound: bound,
        candidates: total,
        points_found,
        min_nonzero_hhat: min.map(|r| r.hhat),
        min_nonzero_point: min.map(|r| r.point.clone()),
        torsion_found,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::NumberField;

    #[test]
    fn sqrt_in_quadratic_field() {
        let k = NumberField::from_coeffs(&[-2, 0, 1]).unwrap();
        let t = k.generator();
        let y = &(&t * &k.from_int(3)) + &k.from_int(1);
        let c = &y * &y;
        let s = nf_sqrt(&c).unwrap();
        assert!(s == y || s == -&y);
        assert!(nf_sqrt(&t).is_none());
        let k3 = NumberField::from_coeffs(&[-2, 0, 0, 1]).unwrap();
        let y3 = k3.from_poly(&[crate::arith::integer::rat(1, 2), crate::arith::integer::rat(-1, 1), crate::arith::integer::rat(3, 1)]);
        let s3 = nf_sqrt(&(&y3 * &y3)).unwrap();
        assert!(s3 == y3 || s3 == -&y3);
    }

    #[test]
    fn finds_the_generator() {
        let e = Curve::over_q(0, -2).unwrap();
        let opts = SearchOptions { naive_cap: 10f64.ln(), hhat_cap: 5.0, budget: 10_000, tol: 1e-8 };
        let rec = search_small_points(&e, e.base(), &opts).unwrap();
        assert_eq!(rec.box_bound, 10);
        assert_eq!(rec.points_found, 2);
        let p = rec.min_nonzero_point.clone().unwrap();
        assert!(matches!(&p, PointSpec::Affine([crate::elliptic::CoordSpec::Int(3), _])));
        assert!(rec.torsion_found.is_empty());
        assert!(rec.to_csv().lines().count() == 3);
    }

    #[test]
    fn torsion_only_curve() {
        let e = Curve::over_q(-1, 0).unwrap();
        let opts = SearchOptions { naive_cap: 3f64.ln(), hhat_cap: 0.0, budget: 10_000, tol: 1e-6 };
        let rec = search_small_points(&e, e.base(), &opts).unwrap();
        assert_eq!(rec.torsion_found.len(), 3);
        assert!(rec.min_nonzero_hhat.is_none());
    }
}
