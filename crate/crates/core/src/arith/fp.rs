//! Polynomials over prime fields `F_p` and their factorization
//! (square-free, distinct-degree, Cantor-Zassenhaus).

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::integer::{mul_mod, pow_mod};

/// Polynomial over `F_p`, constant term first, no trailing zeros.
pub type FpPoly = Vec<u64>;

pub fn trim(p: &mut FpPoly) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

pub fn deg(p: &[u64]) -> Option<usize> {
    p.iter().rposition(|&c| c != 0)
}

pub fn reduce_int(c: &BigInt, p: u64) -> u64 {
    c.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

pub fn from_z(f: &[BigInt], p: u64) -> FpPoly {
    let mut out: FpPoly = f.iter().map(|c| reduce_int(c, p)).collect();
    trim(&mut out);
    out
}

pub fn to_z(f: &[u64]) -> Vec<BigInt> {
    f.iter().map(|&c| BigInt::from(c)).collect()
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(a % p != 0, "inverse of zero mod {p}");
    pow_mod(a, p - 2, p)
}

pub fn add(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    let mut out: FpPoly = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            ((x as u128 + y as u128) % p as u128) as u64
        })
        .collect();
    trim(&mut out);
    out
}

pub fn sub(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    let mut out: FpPoly = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            ((x as u128 + p as u128 - y as u128) % p as u128) as u64
        })
        .collect();
    trim(&mut out);
    out
}

pub fn scale(a: &[u64], s: u64, p: u64) -> FpPoly {
    let mut out: FpPoly = a.iter().map(|&c| mul_mod(c, s, p)).collect();
    trim(&mut out);
    out
}

pub fn mul(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut acc = vec![0u128; a.len() + b.len() - 1];
    let pm = p as u128;
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            acc[i + j] = (acc[i + j] + x as u128 * y as u128) % pm;
        }
    }
    let mut out: FpPoly = acc.into_iter().map(|c| c as u64).collect();
    trim(&mut out);
    out
}

pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (FpPoly, FpPoly) {
    let db = deg(b).expect("division by zero polynomial");
    let mut r: FpPoly = a.to_vec();
    trim(&mut r);
    let Some(da) = deg(&r) else {
        return (Vec::new(), Vec::new());
    };
    if da < db {
        return (Vec::new(), r);
    }
    let inv = inv_mod(b[db], p);
    let mut q = vec![0u64; da - db + 1];
    for i in (0..=da - db).rev() {
        let c = mul_mod(r[i + db], inv, p);
        if c == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            let t = mul_mod(c, bj, p);
            r[i + j] = (r[i + j] + p - t) % p;
        }
        q[i] = c;
    }
    trim(&mut q);
    trim(&mut r);
    (q, r)
}

pub fn rem(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    divrem(a, b, p).1
}

pub fn monic(a: &[u64], p: u64) -> FpPoly {
    match deg(a) {
        None => Vec::new(),
        Some(d) => scale(a, inv_mod(a[d], p), p),
    }
}

pub fn gcd(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let mut x: FpPoly = a.to_vec();
    let mut y: FpPoly = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    monic(&x, p)
}

/// Extended gcd returning `(g, s)` with `s*a ≡ g (mod b)`.
pub fn ext_gcd_left(a: &[u64], b: &[u64], p: u64) -> (FpPoly, FpPoly) {
    let mut r0: FpPoly = a.to_vec();
    let mut r1: FpPoly = b.to_vec();
    trim(&mut r0);
    trim(&mut r1);
    let mut s0: FpPoly = vec![1];
    let mut s1: FpPoly = Vec::new();
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, p);
        let s2 = sub(&s0, &mul(&q, &s1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    match deg(&r0) {
        None => (r0, s0),
        Some(d) => {
            let inv = inv_mod(r0[d], p);
            (scale(&r0, inv, p), scale(&s0, inv, p))
        }
    }
}

pub fn derivative(a: &[u64], p: u64) -> FpPoly {
    let mut out: FpPoly = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| mul_mod(c, i as u64 % p, p))
        .collect();
    trim(&mut out);
    out
}

pub fn eval(a: &[u64], x: u64, p: u64) -> u64 {
    a.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, p) + c) % p)
}

pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> FpPoly {
    rem(&mul(a, b, p), m, p)
}

pub fn powmod(base: &[u64], exp: &BigUint, m: &[u64], p: u64) -> FpPoly {
    let mut result: FpPoly = rem(&[1], m, p);
    let mut b = rem(base, m, p);
    let bits = exp.bits();
    for i in 0..bits {
        if exp.bit(i) {
            result = mulmod(&result, &b, m, p);
        }
        if i + 1 < bits {
            b = mulmod(&b, &b, m, p);
        }
    }
    result
}

/// Square-free decomposition: pairs `(g, e)` with `f = lc * prod g^e`,
/// each `g` monic square-free and pairwise coprime.
pub fn squarefree_factorization(f: &[u64], p: u64) -> Vec<(FpPoly, u32)> {
    let f = monic(f, p);
    let mut out = Vec::new();
    if deg(&f).unwrap_or(0) == 0 {
        return out;
    }
    let df = derivative(&f, p);
    let mut c = gcd(&f, &df, p);
    let mut w = divrem(&f, &c, p).0;
    let mut i = 1u32;
    while deg(&w).unwrap_or(0) > 0 {
        let y = gcd(&w, &c, p);
        let z = divrem(&w, &y, p).0;
        if deg(&z).unwrap_or(0) > 0 {
            out.push((z, i));
        }
        i += 1;
        w = y.clone();
        c = divrem(&c, &y, p).0;
    }
    if deg(&c).unwrap_or(0) > 0 {
        // c is a p-th power
        let d = deg(&c).unwrap();
        let root: FpPoly = (0..=d / p as usize).map(|k| c[k * p as usize]).collect();
        for (g, e) in squarefree_factorization(&root, p) {
            out.push((g, e * p as u32));
        }
    }
    out
}

/// Distinct-degree factorization of a monic square-free polynomial.
pub fn distinct_degree_factorization(f: &[u64], p: u64) -> Vec<(FpPoly, usize)> {
    let mut out = Vec::new();
    let mut g = monic(f, p);
    let x: FpPoly = vec![0, 1];
    let mut h = rem(&x, &g, p);
    let pb = BigUint::from(p);
    let mut d = 1usize;
    while deg(&g).unwrap_or(0) >= 2 * d {
        h = powmod(&h, &pb, &g, p);
        let fac = gcd(&sub(&h, &x, p), &g, p);
        if deg(&fac).unwrap_or(0) > 0 {
            g = divrem(&g, &fac, p).0;
            h = rem(&h, &g, p);
            out.push((fac, d));
        }
        d += 1;
    }
    if deg(&g).unwrap_or(0) > 0 {
        let dg = deg(&g).unwrap();
        out.push((g, dg));
    }
    out
}

fn random_poly(rng: &mut ChaCha8Rng, n: usize, p: u64) -> FpPoly {
    let mut a: FpPoly = (0..n).map(|_| rng.gen_range(0..p)).collect();
    trim(&mut a);
    a
}

/// Equal-degree splitting of a product of irreducibles of degree `d`.
pub fn equal_degree_factorization(f: &[u64], d: usize, p: u64) -> Vec<FpPoly> {
    let n = deg(f).unwrap_or(0);
    if n == d {
        return vec![monic(f, p)];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p ^ ((n as u64) << 40) ^ ((d as u64) << 20));
    loop {
        let a = random_poly(&mut rng, n, p);
        if deg(&a).unwrap_or(0) == 0 {
            continue;
        }
        let b = if p == 2 {
            // trace map a + a^2 + ... + a^(2^(d-1))
            let mut t = rem(&a, f, p);
            let mut acc = t.clone();
            for _ in 1..d {
                t = mulmod(&t, &t, f, p);
                acc = add(&acc, &t, p);
            }
            acc
        } else {
            let e: BigUint = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
            sub(&powmod(&a, &e, f, p), &[1], p)
        };
        let g = gcd(&b, f, p);
        let dg = deg(&g).unwrap_or(0);
        if dg > 0 && dg < n {
            let other = divrem(f, &g, p).0;
            let mut out = equal_degree_factorization(&g, d, p);
            out.extend(equal_degree_factorization(&other, d, p));
            return out;
        }
    }
}

fn sort_key(g: &FpPoly) -> (usize, Vec<u64>) {
    (g.len(), g.iter().rev().copied().collect())
}

/// Complete factorization of `f` over `F_p` into monic irreducibles with
/// multiplicities, sorted by degree and then by coefficients.
pub fn factor(f: &[u64], p: u64) -> Vec<(FpPoly, u32)> {
    let mut out = Vec::new();
    for (sq, e) in squarefree_factorization(f, p) {
        for (part, d) in distinct_degree_factorization(&sq, p) {
            for g in equal_degree_factorization(&part, d, p) {
                out.push((g, e));
            }
        }
    }
    out.sort_by(|a, b| sort_key(&a.0).cmp(&sort_key(&b.0)).then(a.1.cmp(&b.1)));
    out
}

/// Roots of `f` in `F_p` (distinct, sorted).
pub fn roots(f: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = factor(f, p)
        .into_iter()
        .filter(|(g, _)| g.len() == 2)
        .map(|(g, _)| (p - g[0]) % p)
        .collect();
    r.sort();
    r
}

pub fn is_irreducible(f: &[u64], p: u64) -> bool {
    let fac = factor(f, p);
    fac.len() == 1 && fac[0].1 == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_x2_plus_1() {
        assert_eq!(factor(&[1, 0, 1], 5), vec![(vec![2, 1], 1), (vec![3, 1], 1)]);
        assert_eq!(factor(&[1, 0, 1], 3), vec![(vec![1, 0, 1], 1)]);
        assert_eq!(factor(&[1, 0, 1], 2), vec![(vec![1, 1], 2)]);
    }

    #[test]
    fn factor_reconstructs() {
        let p = 13;
        let f = mul(&mul(&[1, 0, 1], &[3, 1], p), &mul(&[3, 1], &[2, 1, 0, 1], p), p);
        let fac = factor(&f, p);
        let mut prod: FpPoly = vec![1];
        for (g, e) in &fac {
            for _ in 0..*e {
                prod = mul(&prod, g, p);
            }
        }
        assert_eq!(prod, monic(&f, p));
    }

    #[test]
    fn p_th_powers_in_char_p() {
        // (x+1)^3 * x over F_3 has zero derivative component
        let p = 3;
        let cube = mul(&mul(&[1, 1], &[1, 1], p), &[1, 1], p);
        let f = mul(&cube, &[0, 1], p);
        assert_eq!(factor(&f, p), vec![(vec![0, 1], 1), (vec![1, 1], 3)]);
    }

    #[test]
    fn roots_mod_7() {
        assert_eq!(roots(&[5, 0, 1], 7), vec![3, 4]);
    }
}
