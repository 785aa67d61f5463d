use num_rational::BigRational;

use super::ring::Ring;
use crate::error::Result;

/// Truncated Laurent series `z^val (c_0 + c_1 z + ...) + O(z^{val + len})`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<R: Ring> {
    val: i64,
    coeffs: Vec<R>,
    zero: R,
}

/// A series with exact rational coefficients.
pub type FormalSeries = Series<BigRational>;

impl<R: Ring> Series<R> {
    /// `Σ coeffs[i] z^{val+i} + O(z^{val + coeffs.len()})`.
    pub fn new(val: i64, coeffs: Vec<R>, zero: &R) -> Self {
        Series { val, coeffs, zero: zero.zero_like() }
    }

    /// `O(z^prec)`.
    pub fn zero(zero: &R, prec: i64) -> Self {
        Series { val: prec, coeffs: Vec::new(), zero: zero.zero_like() }
    }

    pub fn constant(c: &R, prec: i64) -> Self {
        let mut coeffs = vec![c.zero_like(); prec.max(0) as usize];
        if prec > 0 {
            coeffs[0] = c.clone();
        }
        Series { val: 0, coeffs, zero: c.zero_like() }
    }

    /// `z + O(z^prec)`.
    pub fn variable(zero: &R, prec: i64) -> Self {
        let mut coeffs = vec![zero.zero_like(); (prec - 1).max(0) as usize];
        if prec > 1 {
            coeffs[0] = zero.one_like();
        }
        Series { val: 1, coeffs, zero: zero.zero_like() }
    }

    pub fn template(&self) -> &R {
        &self.zero
    }

    pub fn valuation_bound(&self) -> i64 {
        self.val
    }

    /// Absolute precision: the series is known modulo `z^precision`.
    pub fn precision(&self) -> i64 {
        self.val + self.coeffs.len() as i64
    }

    /// Coefficient of `z^n` (`n` below the precision).
    pub fn coeff(&self, n: i64) -> R {
        assert!(n < self.precision(), "coefficient z^{n} beyond precision {}", self.precision());
        if n < self.val {
            return self.zero.clone();
        }
        self.coeffs[(n - self.val) as usize].clone()
    }

    /// Index of the first coefficient that is not zero, if any.
    pub fn order(&self) -> Option<i64> {
        self.coeffs.iter().position(|c| !c.is_zero_elem()).map(|i| self.val + i as i64)
    }

    /// Drops leading zero coefficients.
    pub fn normalized(&self) -> Self {
        let skip = self.coeffs.iter().take_while(|c| c.is_zero_elem()).count();
        Series { val: self.val + skip as i64, coeffs: self.coeffs[skip..].to_vec(), zero: self.zero.clone() }
    }

    pub fn truncate(&self, prec: i64) -> Self {
        if prec >= self.precision() {
            return self.clone();
        }
        if prec <= self.val {
            return Series::zero(&self.zero, prec);
        }
        Series { val: self.val, coeffs: self.coeffs[..(prec - self.val) as usize].to_vec(), zero: self.zero.clone() }
    }

    /// Drops all terms of negative exponent (used where they are known to cancel).
    pub fn drop_negative(&self) -> Self {
        if self.val >= 0 {
            return self.clone();
        }
        let skip = ((-self.val) as usize).min(self.coeffs.len());
        Series { val: 0, coeffs: self.coeffs[skip..].to_vec(), zero: self.zero.clone() }
    }

    pub fn shift(&self, k: i64) -> Self {
        Series { val: self.val + k, coeffs: self.coeffs.clone(), zero: self.zero.clone() }
    }

    pub fn coefficients(&self) -> &[R] {
        &self.coeffs
    }

    fn combine(&self, o: &Self, sub: bool) -> Self {
        let lo = self.val.min(o.val);
        let hi = self.precision().min(o.precision());
        if hi <= lo {
            return Series::zero(&self.zero, hi);
        }
        let coeffs = (lo..hi)
            .map(|n| {
                let a = if n >= self.val { Some(&self.coeffs[(n - self.val) as usize]) } else { None };
                let b = if n >= o.val { Some(&o.coeffs[(n - o.val) as usize]) } else { None };
                match (a, b, sub) {
                    (Some(x), Some(y), false) => x.plus(y),
                    (Some(x), Some(y), true) => x.minus(y),
                    (Some(x), None, _) => x.clone(),
                    (None, Some(y), false) => y.clone(),
                    (None, Some(y), true) => y.negated(),
                    (None, None, _) => self.zero.clone(),
                }
            })
            .collect();
        Series { val: lo, coeffs, zero: self.zero.clone() }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.combine(o, false)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.combine(o, true)
    }

    pub fn neg(&self) -> Self {
        Series { val: self.val, coeffs: self.coeffs.iter().map(|c| c.negated()).collect(), zero: self.zero.clone() }
    }

    pub fn scale(&self, s: &R) -> Self {
        Series { val: self.val, coeffs: self.coeffs.iter().map(|c| c.times(s)).collect(), zero: self.zero.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let len = self.coeffs.len().min(o.coeffs.len());
        let mut coeffs = Vec::with_capacity(len);
        for n in 0..len {
            let mut acc = self.zero.clone();
            for i in 0..=n {
                let (a, b) = (&self.coeffs[i], &o.coeffs[n - i]);
                if !a.is_zero_elem() && !b.is_zero_elem() {
                    acc = acc.plus(&a.times(b));
                }
            }
            coeffs.push(acc);
        }
        Series { val: self.val + o.val, coeffs, zero: self.zero.clone() }
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc: Option<Self> = None;
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc.unwrap_or_else(|| Series::constant(&self.zero.one_like(), self.coeffs.len() as i64))
    }

    /// Multiplicative inverse; the leading coefficient must be a unit.
    pub fn inv(&self) -> Result<Self> {
        let s = self.normalized();
        if s.coeffs.is_empty() {
            return Err(crate::error::Error::PrecisionExhausted("series vanishes to its precision".into()));
        }
        let b0 = s.coeffs[0].inverse()?;
        let mut out = vec![b0.clone()];
        for n in 1..s.coeffs.len() {
            let mut acc = self.zero.clone();
            for i in 1..=n {
                if !s.coeffs[i].is_zero_elem() {
                    acc = acc.plus(&s.coeffs[i].times(&out[n - i]));
                }
            }
            out.push(acc.times(&b0).negated());
        }
        Ok(Series { val: -s.val, coeffs: out, zero: self.zero.clone() })
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    /// `self(g)` for `g` with positive valuation; Laurent `self` allowed.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        let g = g.normalized();
        assert!(g.val >= 1, "inner series must vanish at 0");
        let tail = self.precision() * g.val;
        let body = self.coeffs.len() as i64 * g.val;
        let mut acc = Series::zero(&self.zero, body);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&g).add(&Series::constant(c, body));
        }
        let lead = if self.val >= 0 { g.pow(self.val as u32) } else { g.inv()?.pow((-self.val) as u32) };
        let out = if self.val == 0 { acc } else { acc.mul(&lead) };
        Ok(out.truncate(tail))
    }

    /// `Σ_{n < terms} c_n s^n` for a power series `self` and an `s` whose
    /// constant term is topologically nilpotent; the caller bounds the tail.
    pub fn compose_with_constant(&self, s: &Self, terms: usize) -> Self {
        assert!(self.val >= 0);
        let prec = s.precision();
        let mut acc = Series::zero(&self.zero, prec);
        let top = (self.val as usize + self.coeffs.len()).min(terms);
        for n in (0..top).rev() {
            let c = if (n as i64) < self.val { self.zero.clone() } else { self.coeffs[n - self.val as usize].clone() };
            acc = acc.mul(s).add(&Series::constant(&c, prec));
        }
        acc
    }

    /// Coefficientwise image under a ring map.
    pub fn map<S: Ring>(&self, zero: &S, f: impl Fn(&R) -> S) -> Series<S> {
        Series { val: self.val, coeffs: self.coeffs.iter().map(f).collect(), zero: zero.zero_like() }
    }
}

impl FormalSeries {
    /// Embeds rational coefficients into another ring.
    pub fn embed_into<S: Ring>(&self, template: &S) -> Series<S> {
        self.map(template, |c| template.embed(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::integer::rat;

    fn s(val: i64, c: &[i64]) -> FormalSeries {
        Series::new(val, c.iter().map(|&x| rat(x, 1)).collect(), &rat(0, 1))
    }

    #[test]
    fn inverse_of_one_minus_z() {
        let a = s(0, &[1, -1, 0, 0, 0]);
        let b = a.inv().unwrap();
        assert_eq!(b, s(0, &[1, 1, 1, 1, 1]));
        assert_eq!(a.mul(&b), s(0, &[1, 0, 0, 0, 0]));
    }

    #[test]
    fn laurent_inverse_and_precision() {
        let a = s(2, &[2, 0, 2]);
        let b = a.inv().unwrap();
        assert_eq!(b.valuation_bound(), -2);
        assert_eq!(b.precision(), 1);
        assert_eq!(b.coeff(-2), rat(1, 2));
        assert_eq!(b.coeff(0), rat(-1, 2));
    }

    #[test]
    fn compose_geometric() {
        // 1/(1-z) at z = 2t: 1 + 2t + 4t^2 + ...
        let f = s(0, &[1, 1, 1, 1, 1, 1]);
        let g = s(1, &[2, 0, 0, 0, 0]);
        let h = f.compose(&g).unwrap();
        for n in 0..6 {
            assert_eq!(h.coeff(n), rat(1 << n, 1));
        }
        // Laurent outer series: z^-1 at z = t + t^2
        let inv = s(-1, &[1, 0, 0, 0]);
        let h = inv.compose(&s(1, &[1, 1, 0, 0, 0])).unwrap();
        assert_eq!(h.coeff(-1), rat(1, 1));
        assert_eq!(h.coeff(0), rat(-1, 1));
        assert_eq!(h.coeff(1), rat(1, 1));
    }
}
