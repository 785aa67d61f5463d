//! Rational-integer helpers: primality, factorization, p-adic valuations and
//! accurate logarithms of big integers.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

const SMALL_PRIME_BOUND: u64 = 1 << 16;

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i as u64))
        .collect()
}

/// Returns `Some((p, f))` when `q = p^f` with `p` prime and `f >= 1`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    for f in (1..=63u32).rev() {
        let root = (q as f64).powf(1.0 / f as f64).round() as u64;
        for cand in root.saturating_sub(1)..=root + 1 {
            if cand >= 2 && cand.checked_pow(f) == Some(q) && is_prime_u64(cand) {
                return Some((cand, f));
            }
        }
    }
    None
}

fn is_probable_prime_big(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let one = BigUint::one();
    let two = &one + &one;
    if n.is_even() {
        return false;
    }
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigUint, seed: u64) -> Option<BigUint> {
    let one = BigUint::one();
    let c = BigUint::from(seed);
    let f = |x: &BigUint| (x * x + &c) % n;
    let mut y = BigUint::from(2u32 + seed as u32);
    let m = 128u64;
    let mut g = one.clone();
    let mut r = 1u64;
    let mut q = one.clone();
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut iterations = 0u64;
    while g == one {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g == one {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = (q * diff) % n;
            }
            g = q.gcd(n);
            k += m;
        }
        r *= 2;
        iterations += r;
        if iterations > 1 << 22 {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            let diff = if x > ys { &x - &ys } else { &ys - &x };
            g = diff.gcd(n);
            if g != one {
                break;
            }
        }
    }
    (g != *n).then_some(g)
}

fn factor_big_into(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if is_probable_prime_big(&n) {
        out.push(n);
        return;
    }
    for seed in 1..64u64 {
        if let Some(d) = pollard_brent(&n, seed) {
            let other = &n / &d;
            factor_big_into(d, out);
            factor_big_into(other, out);
            return;
        }
    }
    // Unfactored composite; callers only see it as a "prime" when rho fails,
    // which does not happen at the sizes used here.
    out.push(n);
}

/// Prime factorization of `|n|` as sorted `(prime, exponent)` pairs.
/// Zero and units return an empty list.
pub fn factorize(n: &BigInt) -> Vec<(BigUint, u32)> {
    let mut m = n.magnitude().clone();
    let mut result: Vec<(BigUint, u32)> = Vec::new();
    if m.is_zero() {
        return result;
    }
    let mut p = 2u64;
    while p < SMALL_PRIME_BOUND {
        let bp = BigUint::from(p);
        if (&bp * &bp) > m {
            break;
        }
        let mut e = 0;
        while (&m % &bp).is_zero() {
            m /= &bp;
            e += 1;
        }
        if e > 0 {
            result.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !m.is_one() {
        let mut large = Vec::new();
        factor_big_into(m, &mut large);
        large.sort();
        for q in large {
            match result.last_mut() {
                Some((last, e)) if *last == q => *e += 1,
                _ => result.push((q, 1)),
            }
        }
    }
    result.sort();
    result
}

/// Sorted list of the distinct primes dividing `n` that fit in 64 bits.
pub fn prime_divisors_u64(n: &BigInt) -> Vec<u64> {
    factorize(n)
        .into_iter()
        .filter_map(|(p, _)| p.to_u64())
        .collect()
}

/// `v_p(n)` for a nonzero integer `n`.
pub fn valuation_int(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let bp = BigInt::from(p);
    let mut m = n.clone();
    let mut e = 0;
    loop {
        let (q, r) = m.div_rem(&bp);
        if !r.is_zero() {
            return e;
        }
        m = q;
        e += 1;
    }
}

/// `v_p(r)` for a nonzero rational.
pub fn valuation_rat(r: &BigRational, p: u64) -> i64 {
    valuation_int(r.numer(), p) as i64 - valuation_int(r.denom(), p) as i64
}

/// Natural logarithm of `|n|`, accurate to a few ulps for any size.
pub fn ln_abs(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        return n.abs().to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: u64 = (n.magnitude() >> shift).to_u64().unwrap();
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural logarithm of `|r|`.
pub fn ln_abs_rat(r: &BigRational) -> f64 {
    ln_abs(r.numer()) - ln_abs(r.denom())
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if let Some(v) = r.to_f64().filter(|v| v.is_finite() && *v != 0.0) {
        return v;
    }
    let s = if r.is_negative() { -1.0 } else { 1.0 };
    s * ln_abs_rat(r).exp()
}

/// Exact `floor(sqrt(n))` test for perfect squares; returns the root.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.sign() == Sign::Minus {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Square root of a rational if it is a perfect square in `Q`.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    let n = exact_sqrt(r.numer())?;
    let d = exact_sqrt(r.denom())?;
    Some(BigRational::new(n, d))
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Least common multiple of the denominators of a slice of rationals.
pub fn common_denominator(values: &[BigRational]) -> BigInt {
    values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1_000_000_007 * 3));
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(25), Some((5, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(1024), Some((2, 10)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn factorization_with_large_cofactor() {
        let p = BigInt::from(1_000_000_007u64);
        let q = BigInt::from(998_244_353u64);
        let n = &p * &q * BigInt::from(12);
        let f = factorize(&n);
        let primes: Vec<u64> = f.iter().map(|(p, _)| p.to_u64().unwrap()).collect();
        assert_eq!(primes, vec![2, 3, 998_244_353, 1_000_000_007]);
        assert_eq!(f[0].1, 2);
    }

    #[test]
    fn logs_of_huge_integers() {
        let n = BigInt::from(3).pow(5000u32);
        let expected = 5000.0 * 3f64.ln();
        assert!((ln_abs(&n) - expected).abs() < 1e-9);
        assert_eq!(valuation_int(&n, 3), 5000);
    }
}
