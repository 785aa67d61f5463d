use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::formal::{formal_w, formal_xy, mult_series, rational_coefficients};
use super::ring::Ring;
use super::series::{FormalSeries, Series};
use crate::elliptic::Curve;
use crate::error::{Error, Result};

/// `x^i` or `x^i y`, a function on `E` with a pole only at `O`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EMonomial {
    pub x_power: u32,
    pub with_y: bool,
}

impl EMonomial {
    pub fn pole_order(&self) -> u32 {
        2 * self.x_power + if self.with_y { 3 } else { 0 }
    }

    /// `X^i Y^e` on series coordinates.
    pub fn eval<R: Ring>(&self, x: &Series<R>, y: &Series<R>) -> Series<R> {
        let base = if self.x_power == 0 { None } else { Some(x.pow(self.x_power)) };
        match (base, self.with_y) {
            (Some(b), true) => b.mul(y),
            (Some(b), false) => b,
            (None, true) => y.clone(),
            (None, false) => Series::constant(&x.template().one_like(), x.precision().max(y.precision()) + 8),
        }
    }
}

/// Products `u ⊗ v` spanning the sections of `O(2L·O) ⊠ O(2L·O)` on `E × E`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionBasis {
    #[serde(rename = "L")]
    pub l: u32,
    /// The `2L` functions on one factor, in column order.
    pub factor: Vec<EMonomial>,
    /// `(u, v)` pairs; column `j` is `factor[j / 2L] ⊗ factor[j % 2L]`.
    pub monomials: Vec<(EMonomial, EMonomial)>,
}

impl SectionBasis {
    pub fn new(l: u32) -> Result<Self> {
        if l < 2 {
            return Err(Error::Precondition("L must be at least 2".into()));
        }
        let mut factor: Vec<EMonomial> = (0..=l).map(|i| EMonomial { x_power: i, with_y: false }).collect();
        factor.extend((0..=l - 2).map(|i| EMonomial { x_power: i, with_y: true }));
        let monomials = factor.iter().flat_map(|&u| factor.iter().map(move |&v| (u, v))).collect();
        Ok(SectionBasis { l, factor, monomials })
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn factor_len(&self) -> usize {
        self.factor.len()
    }
}

/// `z^{2L} m(x(z), y(z))` for each factor monomial, as power series mod `z^prec`.
pub(crate) fn normalized_factors(e: &Curve, basis: &SectionBasis, prec: usize) -> Result<Vec<FormalSeries>> {
    let w = formal_w(e, prec + 6)?;
    let (x, y) = formal_xy(&w)?;
    let shift = 2 * basis.l as i64;
    Ok(basis
        .factor
        .iter()
        .map(|m| {
            let s = m.eval(&x, &y).shift(shift).truncate(prec as i64);
            debug_assert!(s.valuation_bound() >= 0 && s.precision() == prec as i64);
            s
        })
        .collect())
}

/// Normalized pullbacks of the two factors along `z ↦ (z, [N](z))`.
pub(crate) fn factor_pullbacks(
    e: &Curve,
    basis: &SectionBasis,
    n: u64,
    prec: usize,
) -> Result<(Vec<FormalSeries>, Vec<FormalSeries>)> {
    let first = normalized_factors(e, basis, prec)?;
    let mult = mult_series(e, n, prec)?;
    let second = first
        .par_iter()
        .map(|u| Ok(u.compose(&mult)?.truncate(prec as i64)))
        .collect::<Result<Vec<_>>>()?;
    Ok((first, second))
}

/// The linear conditions for vanishing to order `T0` along the image of
/// `P ↦ (P, [N]P)`, with denominators cleared.
#[derive(Clone, Debug, PartialEq)]
pub struct VanishingSystem {
    pub n: u64,
    pub l: u32,
    pub t0: u32,
    pub basis: SectionBasis,
    pub rational: Vec<Vec<BigRational>>,
    pub integer: Vec<Vec<BigInt>>,
    pub denominator: BigInt,
}

impl VanishingSystem {
    pub fn rows(&self) -> usize {
        self.rational.len()
    }

    pub fn cols(&self) -> usize {
        self.basis.len()
    }
}

/// Row `k` holds the coefficient of `z^k` in each normalized basis pullback.
pub fn vanishing_system(e: &Curve, n: u64, l: u32, t0: u32) -> Result<VanishingSystem> {
    if n < 2 {
        return Err(Error::Precondition("N must be at least 2".into()));
    }
    rational_coefficients(e)?;
    let basis = SectionBasis::new(l)?;
    let rows = t0 as usize + 1;
    if rows >= basis.len() {
        return Err(Error::DimensionError(format!("{rows} conditions for {} unknowns", basis.len())));
    }
    let (first, second) = factor_pullbacks(e, &basis, n, rows)?;
    let k = basis.factor_len();
    let columns: Vec<Vec<BigRational>> = (0..basis.len())
        .into_par_iter()
        .map(|j| {
            let s = first[j / k].mul(&second[j % k]);
            (0..rows as i64).map(|r| s.coeff(r)).collect()
        })
        .collect();
    let rational: Vec<Vec<BigRational>> = (0..rows).map(|r| columns.iter().map(|c| c[r].clone()).collect()).collect();
    let denominator = rational.iter().flatten().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let integer = rational
        .iter()
        .map(|row| row.iter().map(|c| (c * BigRational::from_integer(denominator.clone())).to_integer()).collect())
        .collect();
    Ok(VanishingSystem { n, l, t0, basis, rational, integer, denominator })
}

/// `Σ b_j (z^{2L}u_j)(z) · (t^{2L}v_j)([N](z)) mod z^prec`.
pub fn normalized_pullback(e: &Curve, n: u64, l: u32, coeffs: &[BigInt], prec: usize) -> Result<FormalSeries> {
    let basis = SectionBasis::new(l)?;
    if coeffs.len() != basis.len() {
        return Err(Error::DimensionError(format!("{} coefficients for {} basis elements", coeffs.len(), basis.len())));
    }
    let (first, second) = factor_pullbacks(e, &basis, n, prec)?;
    Ok(combine(&first, &second, coeffs, prec))
}

fn combine(first: &[FormalSeries], second: &[FormalSeries], coeffs: &[BigInt], prec: usize) -> FormalSeries {
    let k = first.len();
    let zero = BigRational::zero();
    let mut acc = Series::zero(&zero, prec as i64);
    for (iu, u) in first.iter().enumerate() {
        let mut inner = Series::zero(&zero, prec as i64);
        for (iv, v) in second.iter().enumerate() {
            let b = &coeffs[iu * k + iv];
            if !b.is_zero() {
                inner = inner.add(&v.scale(&BigRational::from_integer(b.clone())));
            }
        }
        acc = acc.add(&u.mul(&inner));
    }
    acc
}

/// The same pullback computed without the formal group law: `[N]` is
/// applied to the Laurent point `(x(z), y(z))` with the chord construction,
/// and the trivializer uses `t = -x_N/y_N`.
pub fn pullback_via_chord(e: &Curve, n: u64, l: u32, coeffs: &[BigInt], prec: usize) -> Result<FormalSeries> {
    let basis = SectionBasis::new(l)?;
    let (a, _) = rational_coefficients(e)?;
    let work = prec + 4 * l as usize + 8;
    let w = formal_w(e, work)?;
    let (x, y) = formal_xy(&w)?;
    let a_s = Series::constant(&a, work as i64);
    let double = |x1: &FormalSeries, y1: &FormalSeries| -> Result<(FormalSeries, FormalSeries)> {
        let lam = x1.square().scale(&BigRational::from_integer(3.into())).add(&a_s).div(&y1.scale(&BigRational::from_integer(2.into())))?;
        let x3 = lam.square().sub(&x1.scale(&BigRational::from_integer(2.into())));
        let y3 = lam.mul(&x1.sub(&x3)).sub(y1);
        Ok((x3, y3))
    };
    let add = |p: &(FormalSeries, FormalSeries), q: &(FormalSeries, FormalSeries)| -> Result<(FormalSeries, FormalSeries)> {
        let lam = q.1.sub(&p.1).div(&q.0.sub(&p.0))?;
        let x3 = lam.square().sub(&p.0).sub(&q.0);
        let y3 = lam.mul(&p.0.sub(&x3)).sub(&p.1);
        Ok((x3, y3))
    };
    // left-to-right: [k]Q then [k+1]Q by adding Q
    let mut cur = (x.clone(), y.clone());
    for _ in 1..n {
        cur = if cur.0 == x { double(&x, &y)? } else { add(&cur, &(x.clone(), y.clone()))? };
    }
    let (xn, yn) = cur;
    let t = xn.neg().div(&yn)?;
    let shift = 2 * l as i64;
    let t_pow = t.pow(2 * l);
    let k = basis.factor_len();
    let zero = BigRational::zero();
    let mut acc = Series::zero(&zero, prec as i64);
    for (iu, u) in basis.factor.iter().enumerate() {
        let fu = u.eval(&x, &y).shift(shift);
        for (iv, v) in basis.factor.iter().enumerate() {
            let b = &coeffs[iu * k + iv];
            if b.is_zero() {
                continue;
            }
            let fv = v.eval(&xn, &yn).mul(&t_pow);
            acc = acc.add(&fu.mul(&fv).scale(&BigRational::from_integer(b.clone())).truncate(prec as i64));
        }
    }
    if acc.precision() < prec as i64 {
        return Err(Error::PrecisionExhausted(format!(
            "chord pullback reached only order {} of {prec}",
            acc.precision()
        )));
    }
    Ok(acc)
}
