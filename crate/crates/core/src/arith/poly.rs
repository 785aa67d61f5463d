//! Dense univariate polynomials over `Z` and `Q`, stored constant term first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type ZPoly = Vec<BigInt>;
pub type QPoly = Vec<BigRational>;

pub fn zpoly(coeffs: &[i64]) -> ZPoly {
    let mut p: ZPoly = coeffs.iter().map(|&c| BigInt::from(c)).collect();
    z_trim(&mut p);
    p
}

pub fn z_trim(p: &mut ZPoly) {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

pub fn q_trim(p: &mut QPoly) {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

/// Degree, with the zero polynomial reported as `None`.
pub fn degree<T: Zero>(p: &[T]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn z_to_q(p: &[BigInt]) -> QPoly {
    p.iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

pub fn z_eval(p: &[BigInt], x: &BigInt) -> BigInt {
    p.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

pub fn q_eval(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

pub fn z_mul(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    z_trim(&mut out);
    out
}

pub fn z_add(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let n = a.len().max(b.len());
    let mut out: ZPoly = (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default())
        .collect();
    z_trim(&mut out);
    out
}

pub fn z_scale(a: &[BigInt], s: &BigInt) -> ZPoly {
    let mut out: ZPoly = a.iter().map(|c| c * s).collect();
    z_trim(&mut out);
    out
}

pub fn z_derivative(p: &[BigInt]) -> ZPoly {
    let mut out: ZPoly = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect();
    z_trim(&mut out);
    out
}

/// `f(g(x))` by Horner's rule.
pub fn z_compose(f: &[BigInt], g: &[BigInt]) -> ZPoly {
    let mut acc: ZPoly = Vec::new();
    for c in f.iter().rev() {
        acc = z_mul(&acc, g);
        acc = z_add(&acc, &[c.clone()]);
    }
    acc
}

pub fn z_content(p: &[BigInt]) -> BigInt {
    p.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
}

/// Exact division of integer polynomials, `None` if `b` does not divide `a` in `Z[x]`.
pub fn z_div_exact(a: &[BigInt], b: &[BigInt]) -> Option<ZPoly> {
    let db = degree(b)?;
    let mut r: ZPoly = a.to_vec();
    z_trim(&mut r);
    let Some(da) = degree(&r) else {
        return Some(Vec::new());
    };
    if da < db {
        return None;
    }
    let lead = &b[db];
    let mut q = vec![BigInt::zero(); da - db + 1];
    for i in (0..=da - db).rev() {
        let c = &r[i + db];
        if c.is_zero() {
            continue;
        }
        let (qi, rem) = c.div_rem(lead);
        if !rem.is_zero() {
            return None;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i + j] -= &qi * bj;
        }
        q[i] = qi;
    }
    z_trim(&mut r);
    if r.is_empty() {
        z_trim(&mut q);
        Some(q)
    } else {
        None
    }
}

pub fn q_add(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let n = a.len().max(b.len());
    let mut out: QPoly = (0..n)
        .map(|i| {
            a.get(i).cloned().unwrap_or_else(BigRational::zero)
                + b.get(i).cloned().unwrap_or_else(BigRational::zero)
        })
        .collect();
    q_trim(&mut out);
    out
}

pub fn q_sub(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let n = a.len().max(b.len());
    let mut out: QPoly = (0..n)
        .map(|i| {
            a.get(i).cloned().unwrap_or_else(BigRational::zero)
                - b.get(i).cloned().unwrap_or_else(BigRational::zero)
        })
        .collect();
    q_trim(&mut out);
    out
}

pub fn q_mul(a: &[BigRational], b: &[BigRational]) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    q_trim(&mut out);
    out
}

pub fn q_scale(a: &[BigRational], s: &BigRational) -> QPoly {
    let mut out: QPoly = a.iter().map(|c| c * s).collect();
    q_trim(&mut out);
    out
}

/// Euclidean division `a = q*b + r` over `Q`.
pub fn q_divrem(a: &[BigRational], b: &[BigRational]) -> (QPoly, QPoly) {
    let db = degree(b).expect("division by zero polynomial");
    let mut r: QPoly = a.to_vec();
    q_trim(&mut r);
    let Some(da) = degree(&r) else {
        return (Vec::new(), Vec::new());
    };
    if da < db {
        return (Vec::new(), r);
    }
    let inv_lead = b[db].recip();
    let mut q = vec![BigRational::zero(); da - db + 1];
    for i in (0..=da - db).rev() {
        let c = &r[i + db] * &inv_lead;
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i + j] -= &c * bj;
        }
        q[i] = c;
    }
    q_trim(&mut q);
    q_trim(&mut r);
    (q, r)
}

pub fn q_monic(a: &[BigRational]) -> QPoly {
    match degree(a) {
        None => Vec::new(),
        Some(d) => {
            let inv = a[d].recip();
            q_scale(a, &inv)
        }
    }
}

pub fn q_gcd(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let mut x: QPoly = a.to_vec();
    let mut y: QPoly = b.to_vec();
    q_trim(&mut x);
    q_trim(&mut y);
    while !y.is_empty() {
        let (_, r) = q_divrem(&x, &y);
        x = y;
        y = r;
    }
    q_monic(&x)
}

/// Extended gcd: returns `(g, s, t)` with `s*a + t*b = g`, `g` monic.
pub fn q_ext_gcd(a: &[BigRational], b: &[BigRational]) -> (QPoly, QPoly, QPoly) {
    let mut r0: QPoly = a.to_vec();
    let mut r1: QPoly = b.to_vec();
    q_trim(&mut r0);
    q_trim(&mut r1);
    let (mut s0, mut s1): (QPoly, QPoly) = (vec![BigRational::one()], Vec::new());
    let (mut t0, mut t1): (QPoly, QPoly) = (Vec::new(), vec![BigRational::one()]);
    while !r1.is_empty() {
        let (q, r) = q_divrem(&r0, &r1);
        let s2 = q_sub(&s0, &q_mul(&q, &s1));
        let t2 = q_sub(&t0, &q_mul(&q, &t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    match degree(&r0) {
        None => (r0, s0, t0),
        Some(d) => {
            let inv = r0[d].recip();
            (q_scale(&r0, &inv), q_scale(&s0, &inv), q_scale(&t0, &inv))
        }
    }
}

pub fn q_derivative(p: &[BigRational]) -> QPoly {
    let mut out: QPoly = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect();
    q_trim(&mut out);
    out
}

/// Determinant of a square integer matrix by fraction-free Bareiss elimination.
pub fn det_bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Resultant of two nonzero integer polynomials via the Sylvester matrix.
pub fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let m = degree(f).expect("zero polynomial");
    let n = degree(g).expect("zero polynomial");
    if m == 0 && n == 0 {
        return BigInt::one();
    }
    let size = m + n;
    let mut s = vec![vec![BigInt::zero(); size]; size];
    for i in 0..n {
        for j in 0..=m {
            s[i][i + j] = f[m - j].clone();
        }
    }
    for i in 0..m {
        for j in 0..=n {
            s[n + i][i + j] = g[n - j].clone();
        }
    }
    det_bareiss(s)
}

/// Discriminant of a monic integer polynomial.
pub fn discriminant_monic(f: &[BigInt]) -> BigInt {
    let n = degree(f).expect("zero polynomial");
    if n == 0 {
        return BigInt::one();
    }
    if n == 1 {
        return BigInt::one();
    }
    let r = resultant(f, &z_derivative(f));
    if (n * (n - 1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

/// Characteristic polynomial `det(xI - A)` of a rational matrix
/// (Faddeev-LeVerrier), monic, constant term first.
pub fn charpoly(a: &[Vec<BigRational>]) -> QPoly {
    let n = a.len();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut m: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for l in 0..n {
                if a[i][l].is_zero() {
                    continue;
                }
                for j in 0..n {
                    if !m[l][j].is_zero() {
                        next[i][j] += &a[i][l] * &m[l][j];
                    }
                }
            }
            next[i][i] += &coeffs[n - k + 1];
        }
        m = next;
        let mut trace = BigRational::zero();
        for i in 0..n {
            for l in 0..n {
                if !a[i][l].is_zero() && !m[l][i].is_zero() {
                    trace += &a[i][l] * &m[l][i];
                }
            }
        }
        coeffs[n - k] = -trace / BigRational::from_integer(BigInt::from(k));
    }
    coeffs
}

/// Landau-Mignotte style bound on coefficients of any factor of `f`:
/// `2^deg * ||f||_2`, rounded up to an integer.
pub fn factor_coefficient_bound(f: &[BigInt]) -> BigInt {
    let norm_sq: BigInt = f.iter().map(|c| c * c).sum();
    let norm = norm_sq.sqrt() + BigInt::one();
    let d = degree(f).unwrap_or(0);
    norm << d
}

pub fn z_is_monic(f: &[BigInt]) -> bool {
    degree(f).map_or(false, |d| f[d].is_one())
}

pub fn z_abs_max(f: &[BigInt]) -> BigInt {
    f.iter().map(|c| c.abs()).max().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discriminants() {
        assert_eq!(discriminant_monic(&zpoly(&[1, 0, 1])), BigInt::from(-4));
        assert_eq!(discriminant_monic(&zpoly(&[-2, 0, 1])), BigInt::from(8));
        // x^3 - 2: disc = -27 * 4 = -108
        assert_eq!(discriminant_monic(&zpoly(&[-2, 0, 0, 1])), BigInt::from(-108));
    }

    #[test]
    fn charpoly_companion() {
        // companion matrix of x^2 - 2 (multiplication by theta in Q(sqrt 2))
        let r = |n: i64| BigRational::from_integer(BigInt::from(n));
        let a = vec![vec![r(0), r(2)], vec![r(1), r(0)]];
        assert_eq!(charpoly(&a), vec![r(-2), r(0), r(1)]);
    }

    #[test]
    fn exact_division() {
        let a = z_mul(&zpoly(&[1, 1]), &zpoly(&[-3, 0, 2]));
        assert_eq!(z_div_exact(&a, &zpoly(&[1, 1])), Some(zpoly(&[-3, 0, 2])));
        assert_eq!(z_div_exact(&a, &zpoly(&[1, 2])), None);
    }

    #[test]
    fn ext_gcd_inverts_mod_f() {
        let f = z_to_q(&zpoly(&[-2, 0, 1]));
        let a = z_to_q(&zpoly(&[1, 1]));
        let (g, s, _) = q_ext_gcd(&a, &f);
        assert_eq!(degree(&g), Some(0));
        let (_, r) = q_divrem(&q_mul(&s, &a), &f);
        assert_eq!(r, vec![BigRational::one()]);
    }
}
