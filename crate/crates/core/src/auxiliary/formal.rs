//! The formal group of `y² = x³ + ax + b` in the parameter `z = -x/y`.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::ring::Ring;
use super::series::{FormalSeries, Series};
use crate::elliptic::Curve;
use crate::error::{Error, Result};

/// Largest truncation order accepted for univariate formal series.
pub const MAX_FORMAL_PRECISION: usize = 400;
/// Largest total degree for the bivariate group law.
pub const MAX_LAW_PRECISION: usize = 60;

/// `(a, b)` of a curve whose coefficients are rational.
pub fn rational_coefficients(e: &Curve) -> Result<(BigRational, BigRational)> {
    match (e.a().as_rational(), e.b().as_rational()) {
        (Some(a), Some(b)) => Ok((a.clone(), b.clone())),
        _ => Err(Error::Precondition("auxiliary constructions need a curve with rational coefficients".into())),
    }
}

/// Coefficients `A_0..A_{prec-1}` of `w(z) = z³ + a z w² + b w³`.
pub fn w_coefficients<R: Ring>(a: &R, b: &R, prec: usize) -> Vec<R> {
    let zero = a.zero_like();
    let mut w = vec![zero.clone(); prec.max(4)];
    let mut w2 = vec![zero.clone(); prec.max(4)];
    if prec > 3 {
        w[3] = a.one_like();
    }
    for n in 4..prec {
        // w2[m] = Σ A_i A_{m-i}; only indices ≤ n-1 are needed and all use A_{≤ n-4}
        let m = n - 1;
        let mut s = zero.clone();
        for i in 3..=m.saturating_sub(3) {
            if !w[i].is_zero_elem() && !w[m - i].is_zero_elem() {
                s = s.plus(&w[i].times(&w[m - i]));
            }
        }
        w2[m] = s;
        let mut w3 = zero.clone();
        for i in 3..=n.saturating_sub(6) {
            if !w[i].is_zero_elem() && !w2[n - i].is_zero_elem() {
                w3 = w3.plus(&w[i].times(&w2[n - i]));
            }
        }
        w[n] = a.times(&w2[n - 1]).plus(&b.times(&w3));
    }
    w.truncate(prec);
    w
}

/// `w(z) + O(z^prec)` for the curve.
pub fn formal_w(e: &Curve, prec: usize) -> Result<FormalSeries> {
    if prec > MAX_FORMAL_PRECISION {
        return Err(Error::CapExceeded(format!("formal precision {prec} above {MAX_FORMAL_PRECISION}")));
    }
    let (a, b) = rational_coefficients(e)?;
    let coeffs = w_coefficients(&a, &b, prec);
    Ok(Series::new(0, coeffs, &BigRational::zero()))
}

/// `x(z) = z/w` and `y(z) = -1/w` from `w`.
pub fn formal_xy<R: Ring>(w: &Series<R>) -> Result<(Series<R>, Series<R>)> {
    let winv = w.inv()?;
    Ok((winv.shift(1), winv.neg()))
}

/// `z₁ ⊕ z₂` on univariate series: the third intersection of the line
/// `w = λz + ν` through the two points, negated.
///
/// `wc` holds `A_0..A_{n-1}`; terms beyond are dropped, which is harmless
/// when both inputs vanish at 0 and `wc.len()` exceeds the target order,
/// or when the caller bounds the p-adic size of the tail.
pub fn formal_add<R: Ring>(a: &R, b: &R, wc: &[R], z1: &Series<R>, z2: &Series<R>) -> Result<Series<R>> {
    let prec = z1.precision().min(z2.precision());
    let zero = a.zero_like();
    let one = Series::constant(&a.one_like(), prec);
    let mut lambda = Series::zero(&zero, prec);
    let mut wz1 = Series::zero(&zero, prec);
    // h_n = Σ_{i<n} z1^i z2^{n-1-i};  z1p = z1^n
    let mut h = one.clone();
    let mut z2p = one.clone();
    let mut z1p = z1.clone();
    for (n, an) in wc.iter().enumerate().skip(1) {
        if n > 1 {
            z2p = z2p.mul(z2);
            h = z1.mul(&h).add(&z2p);
            z1p = z1p.mul(z1);
        }
        if !an.is_zero_elem() {
            lambda = lambda.add(&h.scale(an));
            wz1 = wz1.add(&z1p.scale(an));
        }
    }
    let nu = wz1.sub(&lambda.mul(z1));
    let l2 = lambda.square();
    let num = lambda.mul(&nu).scale(&a.embed_i64(2).times(a)).add(&l2.mul(&nu).scale(&b.embed_i64(3).times(b)));
    let den = one.add(&l2.scale(a)).add(&l2.mul(&lambda).scale(b));
    Ok(z1.add(z2).add(&num.div(&den)?).truncate(prec))
}

/// `[N](z) + O(z^prec)` by double-and-add in the formal group.
pub fn mult_series(e: &Curve, n: u64, prec: usize) -> Result<FormalSeries> {
    if n == 0 {
        return Err(Error::Precondition("multiplier must be at least 1".into()));
    }
    if prec > MAX_FORMAL_PRECISION {
        return Err(Error::CapExceeded(format!("formal precision {prec} above {MAX_FORMAL_PRECISION}")));
    }
    let (a, b) = rational_coefficients(e)?;
    mult_series_generic(&a, &b, n, prec)
}

pub(crate) fn mult_series_generic<R: Ring>(a: &R, b: &R, n: u64, prec: usize) -> Result<Series<R>> {
    let wc = w_coefficients(a, b, prec + 2);
    let z = Series::variable(&a.zero_like(), prec as i64);
    let mut acc: Option<Series<R>> = None;
    let mut base = z;
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(s) => formal_add(a, b, &wc, &s, &base)?,
            });
        }
        k >>= 1;
        if k > 0 {
            base = formal_add(a, b, &wc, &base, &base)?;
        }
    }
    Ok(acc.expect("n >= 1"))
}

/// Truncated bivariate series `Σ c_{ij} z₁^i z₂^j` with `i + j < prec`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries {
    prec: usize,
    c: Vec<Vec<BigRational>>,
}

impl BiSeries {
    fn zero(prec: usize) -> Self {
        BiSeries { prec, c: (0..prec).map(|i| vec![BigRational::zero(); prec - i]).collect() }
    }

    fn monomial(prec: usize, i: usize, j: usize, c: BigRational) -> Self {
        let mut s = Self::zero(prec);
        if i + j < prec {
            s.c[i][j] = c;
        }
        s
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    /// Coefficient of `z₁^i z₂^j`.
    pub fn coeff(&self, i: usize, j: usize) -> BigRational {
        assert!(i + j < self.prec, "degree {} beyond precision {}", i + j, self.prec);
        self.c[i][j].clone()
    }

    fn add(&self, o: &Self) -> Self {
        let mut s = self.clone();
        for i in 0..self.prec {
            for j in 0..self.prec - i {
                s.c[i][j] += &o.c[i][j];
            }
        }
        s
    }

    fn scale(&self, k: &BigRational) -> Self {
        let mut s = self.clone();
        s.c.iter_mut().flatten().for_each(|c| *c *= k);
        s
    }

    fn mul(&self, o: &Self) -> Self {
        let mut s = Self::zero(self.prec);
        for i1 in 0..self.prec {
            for j1 in 0..self.prec - i1 {
                let a = &self.c[i1][j1];
                if a.is_zero() {
                    continue;
                }
                for i2 in 0..self.prec - i1 - j1 {
                    for j2 in 0..self.prec - i1 - j1 - i2 {
                        let b = &o.c[i2][j2];
                        if !b.is_zero() {
                            s.c[i1 + i2][j1 + j2] += a * b;
                        }
                    }
                }
            }
        }
        s
    }

    /// `1/(1 + d)` for `d` without constant term.
    fn one_plus_inv(d: &Self) -> Self {
        let one = Self::monomial(d.prec, 0, 0, BigRational::one());
        let neg = d.scale(&-BigRational::one());
        let mut acc = one.clone();
        let mut term = one;
        // d has no terms below degree 4
        for _ in 0..d.prec / 4 + 1 {
            term = term.mul(&neg);
            acc = acc.add(&term);
        }
        acc
    }

    /// `F(s₁, s₂)` for univariate series vanishing at 0.
    pub fn eval(&self, s1: &FormalSeries, s2: &FormalSeries) -> FormalSeries {
        let prec = s1.precision().min(s2.precision()).min(self.prec as i64);
        let zero = BigRational::zero();
        let one = Series::constant(&BigRational::one(), prec);
        let mut p1 = vec![one.clone()];
        let mut p2 = vec![one];
        for k in 1..self.prec {
            p1.push(p1[k - 1].mul(s1).truncate(prec));
            p2.push(p2[k - 1].mul(s2).truncate(prec));
        }
        let mut acc = Series::zero(&zero, prec);
        for i in 0..self.prec {
            for j in 0..self.prec - i {
                if !self.c[i][j].is_zero() {
                    acc = acc.add(&p1[i].mul(&p2[j]).scale(&self.c[i][j]));
                }
            }
        }
        acc.truncate(prec)
    }
}

/// `F(z₁, z₂)` modulo total degree `prec`.
pub fn formal_group_law(e: &Curve, prec: usize) -> Result<BiSeries> {
    if prec > MAX_LAW_PRECISION {
        return Err(Error::CapExceeded(format!("group-law precision {prec} above {MAX_LAW_PRECISION}")));
    }
    let (a, b) = rational_coefficients(e)?;
    let wc = w_coefficients(&a, &b, prec + 1);
    let mut lambda = BiSeries::zero(prec);
    let mut wz1 = BiSeries::zero(prec);
    for (n, an) in wc.iter().enumerate() {
        if an.is_zero() {
            continue;
        }
        for i in 0..n {
            if n - 1 < prec {
                lambda.c[i][n - 1 - i] += an;
            }
        }
        if n < prec {
            wz1.c[n][0] += an;
        }
    }
    let z1 = BiSeries::monomial(prec, 1, 0, BigRational::one());
    let z2 = BiSeries::monomial(prec, 0, 1, BigRational::one());
    let nu = wz1.add(&lambda.mul(&z1).scale(&-BigRational::one()));
    let l2 = lambda.mul(&lambda);
    let two = BigRational::from_integer(2.into());
    let three = BigRational::from_integer(3.into());
    let num = lambda.mul(&nu).scale(&(&two * &a)).add(&l2.mul(&nu).scale(&(&three * &b)));
    let den = l2.scale(&a).add(&l2.mul(&lambda).scale(&b));
    Ok(z1.add(&z2).add(&num.mul(&BiSeries::one_plus_inv(&den))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::integer::rat;

    fn curve() -> crate::elliptic::CurveRef {
        Curve::over_q(0, -2).unwrap()
    }

    #[test]
    fn w_leading_terms() {
        let e = Curve::over_q(5, 7).unwrap();
        let w = formal_w(&e, 10).unwrap();
        let expect = [0, 0, 0, 1, 0, 0, 0, 5, 0, 7];
        for (n, c) in expect.iter().enumerate() {
            assert_eq!(w.coeff(n as i64), rat(*c, 1), "z^{n}");
        }
        // w satisfies its defining equation
        let w = formal_w(&e, 30).unwrap();
        let z = Series::variable(&rat(0, 1), 30);
        let rhs = z.pow(3).add(&z.mul(&w.square()).scale(&rat(5, 1))).add(&w.pow(3).scale(&rat(7, 1)));
        assert_eq!(w, rhs.truncate(30));
    }

    #[test]
    fn x_and_y_satisfy_the_curve() {
        let e = Curve::over_q(-3, 5).unwrap();
        let w = formal_w(&e, 24).unwrap();
        let (x, y) = formal_xy(&w).unwrap();
        assert_eq!(x.valuation_bound(), -2);
        assert_eq!(y.valuation_bound(), -3);
        let lhs = y.square();
        let rhs = x.pow(3).add(&x.scale(&rat(-3, 1))).add(&Series::constant(&rat(5, 1), 20));
        let top = lhs.precision().min(rhs.precision());
        for n in -6..top {
            assert_eq!(lhs.coeff(n), rhs.coeff(n), "z^{n}");
        }
    }

    #[test]
    fn group_law_axioms() {
        let e = curve();
        let f = formal_group_law(&e, 10).unwrap();
        assert_eq!(f.coeff(1, 0), rat(1, 1));
        assert_eq!(f.coeff(0, 1), rat(1, 1));
        assert_eq!(f.coeff(1, 1), rat(0, 1));
        for i in 0..10 {
            for j in 0..10 - i {
                assert_eq!(f.coeff(i, j), f.coeff(j, i));
                if j == 0 && i != 1 {
                    assert_eq!(f.coeff(i, 0), rat(0, 1));
                }
            }
        }
    }

    #[test]
    fn mult_matches_law_and_duplication() {
        let e = Curve::over_q(2, -3).unwrap();
        let z = Series::variable(&rat(0, 1), 12);
        let f = formal_group_law(&e, 12).unwrap();
        let two = mult_series(&e, 2, 12).unwrap();
        assert_eq!(two, f.eval(&z, &z));
        let three = mult_series(&e, 3, 12).unwrap();
        assert_eq!(three, f.eval(&two, &z));
        assert_eq!(three.coeff(1), rat(3, 1));
        // duplication on x(z), y(z)
        let w = formal_w(&e, 20).unwrap();
        let (x, y) = formal_xy(&w).unwrap();
        let lam = x.square().scale(&rat(3, 1)).add(&Series::constant(&rat(2, 1), 20)).div(&y.scale(&rat(2, 1))).unwrap();
        let x2 = lam.square().sub(&x.scale(&rat(2, 1)));
        let y2 = lam.mul(&x.sub(&x2)).sub(&y);
        let z2 = x2.neg().div(&y2).unwrap();
        for n in 0..5 {
            assert_eq!(z2.coeff(n), two.coeff(n), "z^{n}");
        }
    }

    #[test]
    fn composition_of_multiplications() {
        let e = curve();
        let m2 = mult_series(&e, 2, 14).unwrap();
        let m3 = mult_series(&e, 3, 14).unwrap();
        let m6 = mult_series(&e, 6, 14).unwrap();
        assert_eq!(m2.compose(&m3).unwrap().truncate(14), m6);
        assert_eq!(mult_series(&e, 1, 8).unwrap(), Series::variable(&rat(0, 1), 8));
    }
}
