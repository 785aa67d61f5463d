//! Certified complex root enclosures of integer polynomials.
//!
//! Approximations come from an Aberth iteration in `f64`, are polished by
//! Newton steps over dyadic rationals, and certified with the classical
//! bound: for `f` of degree `n` some root lies within `n|f(z)/f'(z)|` of `z`.
//! Pairwise disjoint disks then hold exactly one root each.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::integer::{ln_abs_rat, rat_to_f64};
use crate::error::{Error, Result};

/// Exact complex number with rational parts.
#[derive(Clone, Debug, PartialEq)]
pub struct CRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl CRat {
    pub fn zero() -> Self {
        CRat { re: BigRational::zero(), im: BigRational::zero() }
    }
    pub fn real(re: BigRational) -> Self {
        CRat { re, im: BigRational::zero() }
    }
    pub fn add(&self, o: &CRat) -> CRat {
        CRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }
    pub fn sub(&self, o: &CRat) -> CRat {
        CRat { re: &self.re - &o.re, im: &self.im - &o.im }
    }
    pub fn mul(&self, o: &CRat) -> CRat {
        CRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
    pub fn scale(&self, s: &BigRational) -> CRat {
        CRat { re: &self.re * s, im: &self.im * s }
    }
    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
    pub fn conj(&self) -> CRat {
        CRat { re: self.re.clone(), im: -self.im.clone() }
    }
    pub fn div(&self, o: &CRat) -> CRat {
        let d = o.norm_sq();
        let num = self.mul(&o.conj());
        CRat { re: num.re / &d, im: num.im / d }
    }
    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
    pub fn round(&self, bits: u32) -> CRat {
        CRat { re: round_dyadic(&self.re, bits), im: round_dyadic(&self.im, bits) }
    }
}

/// Nearest dyadic rational with denominator `2^bits`.
pub fn round_dyadic(x: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits;
    let scaled = x * BigRational::from_integer(scale.clone());
    BigRational::new(scaled.round().to_integer(), scale)
}

pub fn f64_to_rat(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

/// Dyadic upper bound on `sqrt(q)` for `q >= 0`.
pub fn sqrt_upper(q: &BigRational, bits: u32) -> BigRational {
    if q.is_zero() {
        return BigRational::zero();
    }
    // sqrt(n/d) <= ceil(sqrt(n * d * 4^bits)) / (d * 2^bits)
    let n = q.numer();
    let d = q.denom();
    let s = (n * d) << (2 * bits);
    let mut r = s.sqrt();
    if &r * &r < s {
        r += 1;
    }
    BigRational::new(r, d << bits)
}

/// Dyadic lower bound on `sqrt(q)` for `q >= 0`.
pub fn sqrt_lower(q: &BigRational, bits: u32) -> BigRational {
    if q.is_zero() {
        return BigRational::zero();
    }
    let n = q.numer();
    let d = q.denom();
    let s = (n * d) << (2 * bits);
    BigRational::new(s.sqrt(), d << bits)
}

/// Upper bound of a positive rational as `f64` (rounded away from zero).
pub fn rat_upper_f64(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let v = rat_to_f64(q).abs();
    if v == 0.0 {
        return f64::MIN_POSITIVE;
    }
    v * (1.0 + 1e-12)
}

fn horner(f: &[BigInt], z: &CRat) -> (CRat, CRat) {
    let mut val = CRat::zero();
    let mut der = CRat::zero();
    for c in f.iter().rev() {
        der = der.mul(z).add(&val);
        val = val.mul(z).add(&CRat::real(BigRational::from_integer(c.clone())));
    }
    (val, der)
}

/// Closed disk certified to contain exactly one root of the defining polynomial.
#[derive(Clone, Debug)]
pub struct RootEnclosure {
    pub center: CRat,
    pub radius: BigRational,
    pub is_real: bool,
}

/// All complex roots of a squarefree integer polynomial, with the real
/// roots first and one representative (positive imaginary part) per pair of
/// complex-conjugate roots afterwards.
#[derive(Clone, Debug)]
pub struct Embeddings {
    pub precision: u32,
    pub roots: Vec<RootEnclosure>,
    pub r1: usize,
    pub r2: usize,
}

impl Embeddings {
    /// Archimedean places: real roots followed by complex representatives.
    pub fn places(&self) -> &[RootEnclosure] {
        &self.roots[..self.r1 + self.r2]
    }

    /// Local degree `d_v` of the `i`-th archimedean place.
    pub fn local_degree(&self, i: usize) -> u32 {
        if i < self.r1 {
            1
        } else {
            2
        }
    }

    pub fn max_radius(&self) -> BigRational {
        self.roots
            .iter()
            .map(|r| r.radius.clone())
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

fn aberth(f: &[BigInt]) -> Vec<Complex64> {
    let n = f.len() - 1;
    let fc: Vec<f64> = f.iter().map(|c| c.to_f64().unwrap_or(f64::MAX)).collect();
    let lead = fc[n];
    let cauchy = 1.0 + fc[..n].iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::from_polar(cauchy * 0.5 + 0.1, ang)
        })
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for &c in fc.iter().rev() {
            d = d * x + v;
            v = v * x + c;
        }
        (v, d)
    };
    for _ in 0..2000 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (v, d) = eval(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += Complex64::new(1.0, 0.0) / (z[i] - z[j]);
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                max_step = max_step.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

/// Certified enclosures for every root of the squarefree integer polynomial
/// `f`, with radii at most `2^{-precision/2}`.
pub fn root_enclosures(f: &[BigInt], precision: u32) -> Result<Embeddings> {
    let n = f.len() - 1;
    assert!(n >= 1);
    let target = BigRational::new(BigInt::one(), BigInt::one() << (precision / 2).max(1));
    let nq = BigRational::from_integer(BigInt::from(n));
    let approx = aberth(f);
    let work_bits = precision + 16;
    let mut centers: Vec<CRat> = Vec::with_capacity(n);
    let mut radii: Vec<BigRational> = Vec::with_capacity(n);
    for z0 in approx {
        let mut z = CRat { re: f64_to_rat(z0.re), im: f64_to_rat(z0.im) }.round(work_bits);
        let mut radius = None;
        for _ in 0..(precision.max(64).ilog2() + 12) {
            let (v, d) = horner(f, &z);
            if d.norm_sq().is_zero() {
                break;
            }
            if v.norm_sq().is_zero() {
                radius = Some(BigRational::zero());
                break;
            }
            let step = v.div(&d);
            let r_sq = &nq * &nq * step.norm_sq();
            let r = sqrt_upper(&r_sq, work_bits);
            if r <= target {
                radius = Some(r);
                break;
            }
            z = z.sub(&step).round(work_bits);
        }
        let Some(r) = radius else {
            return Err(Error::PrecisionExhausted(format!(
                "root refinement did not converge at {precision} bits"
            )));
        };
        centers.push(z);
        radii.push(r);
    }
    let disjoint = |a: &CRat, ra: &BigRational, b: &CRat, rb: &BigRational| -> bool {
        let s = ra + rb;
        a.sub(b).norm_sq() > &s * &s
    };
    for i in 0..n {
        for j in i + 1..n {
            if !disjoint(&centers[i], &radii[i], &centers[j], &radii[j]) {
                return Err(Error::PrecisionExhausted(
                    "root enclosures overlap; approximations did not separate".into(),
                ));
            }
        }
    }
    let mut real = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for i in 0..n {
        let conj = centers[i].conj();
        let partners: Vec<usize> = (0..n)
            .filter(|&j| j != i && !disjoint(&conj, &radii[i], &centers[j], &radii[j]))
            .collect();
        match partners.len() {
            0 => real.push(i),
            1 => {
                if centers[i].im.is_positive() {
                    upper.push(i);
                } else {
                    lower.push(i);
                }
            }
            _ => {
                return Err(Error::PrecisionExhausted(
                    "conjugate enclosure is ambiguous".into(),
                ))
            }
        }
    }
    if real.len() + 2 * upper.len() != n || upper.len() != lower.len() {
        return Err(Error::PrecisionExhausted("could not classify real roots".into()));
    }
    let key = |c: &CRat| (rat_to_f64(&c.re), rat_to_f64(&c.im));
    real.sort_by(|&a, &b| key(&centers[a]).partial_cmp(&key(&centers[b])).unwrap());
    upper.sort_by(|&a, &b| key(&centers[a]).partial_cmp(&key(&centers[b])).unwrap());
    let mut roots = Vec::with_capacity(n);
    for &i in &real {
        roots.push(RootEnclosure {
            center: CRat::real(centers[i].re.clone()),
            radius: radii[i].clone(),
            is_real: true,
        });
    }
    for &i in &upper {
        roots.push(RootEnclosure { center: centers[i].clone(), radius: radii[i].clone(), is_real: false });
    }
    for &i in &upper {
        roots.push(RootEnclosure {
            center: centers[i].conj(),
            radius: radii[i].clone(),
            is_real: false,
        });
    }
    Ok(Embeddings { precision, roots, r1: real.len(), r2: upper.len() })
}

/// Value of a rational-coefficient polynomial on a root enclosure: the
/// exact value at the center together with a rational bound on the
/// deviation over the whole disk.
pub fn eval_on_enclosure(coeffs: &[BigRational], root: &RootEnclosure) -> (CRat, BigRational) {
    let mut val = CRat::zero();
    for c in coeffs.iter().rev() {
        val = val.mul(&root.center).add(&CRat::real(c.clone()));
    }
    if root.radius.is_zero() {
        return (val, BigRational::zero());
    }
    // |a(z) - a(c)| <= r * sum_i i |a_i| (|c| + r)^(i-1)
    let abs_c = sqrt_upper(&root.center.norm_sq(), 64);
    let rho = &abs_c + &root.radius;
    let mut deriv_bound = BigRational::zero();
    let mut pow = BigRational::one();
    for (i, c) in coeffs.iter().enumerate().skip(1) {
        deriv_bound += c.abs() * BigRational::from_integer(BigInt::from(i)) * &pow;
        pow = &pow * &rho;
    }
    (val, deriv_bound * &root.radius)
}

/// Interval for `ln|value|` given a center value and a deviation bound.
/// Returns `(estimate, error)` or `None` if the disk may contain zero.
pub fn ln_abs_interval(center: &CRat, err: &BigRational) -> Option<(f64, f64)> {
    let nsq = center.norm_sq();
    if nsq.is_zero() {
        return None;
    }
    let value = ln_abs_rat(&nsq) / 2.0;
    let rounding = 4.0 * f64::EPSILON * (1.0 + value.abs());
    if err.is_zero() {
        return Some((value, rounding));
    }
    // relative deviation eps = err / |center|
    let eps_sq = err * err / &nsq;
    let eps = rat_upper_f64(&sqrt_upper(&eps_sq, 64));
    if eps >= 0.5 {
        return None;
    }
    Some((value, 2.0 * eps + rounding))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::poly::zpoly;

    #[test]
    fn gaussian_integers() {
        let e = root_enclosures(&zpoly(&[1, 0, 1]), 128).unwrap();
        assert_eq!((e.r1, e.r2), (0, 1));
        let c = e.roots[0].center.to_c64();
        assert!((c - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn sqrt_two() {
        let e = root_enclosures(&zpoly(&[-2, 0, 1]), 256).unwrap();
        assert_eq!((e.r1, e.r2), (2, 0));
        let target = BigRational::new(BigInt::one(), BigInt::one() << 128);
        assert!(e.max_radius() <= target);
        assert!((rat_to_f64(&e.roots[1].center.re) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn mixed_signature_degree_five() {
        // x^5 - x - 1: one real root, two complex pairs
        let e = root_enclosures(&zpoly(&[-1, -1, 0, 0, 0, 1]), 200).unwrap();
        assert_eq!((e.r1, e.r2), (1, 2));
    }

    #[test]
    fn sqrt_bounds_bracket() {
        let q = BigRational::from_integer(BigInt::from(2));
        let lo = sqrt_lower(&q, 60);
        let hi = sqrt_upper(&q, 60);
        assert!(&lo * &lo <= q && &hi * &hi >= q);
    }
}
