//! Irreducibility of monic integer polynomials over `Q` via modular
//! factorization, Hensel lifting and factor recombination (Zassenhaus).

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::fp;
use super::integer::primes_up_to;
use super::poly::{self, degree, ZPoly};

/// Maximal degree accepted by the irreducibility test.
pub const MAX_DEGREE: usize = 24;

fn subset_sums(degrees: &[usize]) -> BTreeSet<usize> {
    let mut sums = BTreeSet::from([0usize]);
    for &d in degrees {
        let next: Vec<usize> = sums.iter().map(|s| s + d).collect();
        sums.extend(next);
    }
    sums
}

fn sym_mod(c: &BigInt, m: &BigInt) -> BigInt {
    let r = c.mod_floor(m);
    if &r + &r > *m {
        r - m
    } else {
        r
    }
}

fn poly_mod(f: &[BigInt], m: &BigInt) -> ZPoly {
    let mut out: ZPoly = f.iter().map(|c| c.mod_floor(m)).collect();
    poly::z_trim(&mut out);
    out
}

/// Lift `f ≡ g*h (mod p)` (g, h monic and coprime mod p) to `mod p^k`.
fn hensel_lift_pair(f: &[BigInt], g: &[u64], h: &[u64], p: u64, k: u32) -> (ZPoly, ZPoly) {
    let (gcd, s) = fp::ext_gcd_left(g, h, p);
    debug_assert_eq!(gcd, vec![1]);
    // t with s*g + t*h = 1
    let t = fp::divrem(&fp::sub(&[1], &fp::mul(&s, g, p), p), h, p).0;
    let mut gl = fp::to_z(g);
    let mut hl = fp::to_z(h);
    let bp = BigInt::from(p);
    let mut pj = bp.clone();
    for _ in 1..k {
        let prod = poly::z_mul(&gl, &hl);
        let diff: ZPoly = (0..f.len().max(prod.len()))
            .map(|i| {
                f.get(i).cloned().unwrap_or_default() - prod.get(i).cloned().unwrap_or_default()
            })
            .collect();
        let e: ZPoly = diff.iter().map(|c| c / &pj).collect();
        let e_p = fp::from_z(&e, p);
        let dg = fp::rem(&fp::mul(&e_p, &t, p), g, p);
        let dh = fp::rem(&fp::mul(&e_p, &s, p), h, p);
        for (i, c) in dg.iter().enumerate() {
            gl[i] += &pj * BigInt::from(*c);
        }
        for (i, c) in dh.iter().enumerate() {
            hl[i] += &pj * BigInt::from(*c);
        }
        pj *= &bp;
        gl = poly_mod(&gl, &pj);
        hl = poly_mod(&hl, &pj);
    }
    (gl, hl)
}

/// Lift a full factorization of `f` modulo `p` to modulo `p^k`.
fn hensel_lift_all(f: &[BigInt], factors: &[fp::FpPoly], p: u64, k: u32) -> Vec<ZPoly> {
    let mut out = Vec::new();
    let mut target: ZPoly = f.to_vec();
    let mut rest: Vec<fp::FpPoly> = factors.to_vec();
    while rest.len() > 1 {
        let g = rest.remove(0);
        let h = rest
            .iter()
            .fold(vec![1u64], |acc, r| fp::mul(&acc, r, p));
        let (gl, hl) = hensel_lift_pair(&target, &g, &h, p, k);
        out.push(gl);
        target = hl;
    }
    out.push(target);
    out
}

/// Returns a nontrivial monic factor of the monic polynomial `f` over `Z`,
/// or `None` when `f` is irreducible over `Q`.
pub fn find_factor(f: &[BigInt]) -> Option<ZPoly> {
    let n = degree(f)?;
    if n <= 1 {
        return None;
    }
    if f[0].is_zero() {
        return Some(poly::zpoly(&[0, 1]));
    }
    // square-freeness over Q
    let fq = poly::z_to_q(f);
    let g = poly::q_gcd(&fq, &poly::q_derivative(&fq));
    if degree(&g).unwrap_or(0) > 0 {
        let den = g.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let gz: ZPoly = g.iter().map(|c| (c * BigInt::from(den.clone())).to_integer()).collect();
        let content = poly::z_content(&gz);
        return Some(gz.iter().map(|c| c / &content).collect());
    }
    let disc = poly::discriminant_monic(f);
    let mut allowed: Option<BTreeSet<usize>> = None;
    let mut best: Option<(u64, Vec<fp::FpPoly>)> = None;
    let mut tried = 0;
    for p in primes_up_to(2000) {
        if (&disc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp_f = fp::from_z(f, p);
        let fac: Vec<fp::FpPoly> = fp::factor(&fp_f, p).into_iter().map(|(g, _)| g).collect();
        let degs: Vec<usize> = fac.iter().map(|g| g.len() - 1).collect();
        let sums = subset_sums(&degs);
        allowed = Some(match allowed {
            None => sums,
            Some(prev) => prev.intersection(&sums).copied().collect(),
        });
        if best.as_ref().map_or(true, |(_, b)| fac.len() < b.len()) {
            best = Some((p, fac));
        }
        tried += 1;
        if allowed.as_ref().unwrap().len() == 2 || tried >= 8 {
            break;
        }
    }
    let allowed = allowed?;
    if allowed.len() == 2 {
        return None;
    }
    let (p, factors) = best?;
    let bound = poly::factor_coefficient_bound(f);
    let bp = BigInt::from(p);
    let mut k = 1u32;
    let mut pk = bp.clone();
    while pk <= &bound * 2 {
        pk *= &bp;
        k += 1;
    }
    let lifted = hensel_lift_all(f, &factors, p, k);
    let r = lifted.len();
    for size in 1..=r / 2 {
        for subset in combinations(r, size) {
            let d: usize = subset.iter().map(|&i| lifted[i].len() - 1).sum();
            if !allowed.contains(&d) || d == 0 || d == n {
                continue;
            }
            let prod = subset
                .iter()
                .fold(vec![BigInt::one()], |acc, &i| poly_mod(&poly::z_mul(&acc, &lifted[i]), &pk));
            let cand: ZPoly = prod.iter().map(|c| sym_mod(c, &pk)).collect();
            if poly::z_div_exact(f, &cand).is_some() {
                return Some(cand);
            }
        }
    }
    None
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub fn is_irreducible(f: &[BigInt]) -> bool {
    find_factor(f).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::poly::zpoly;

    #[test]
    fn detects_swinnerton_dyer_style_reducible() {
        // (x^2 - 2)(x^2 - 3) splits mod every prime into small pieces
        let f = poly::z_mul(&zpoly(&[-2, 0, 1]), &zpoly(&[-3, 0, 1]));
        let g = find_factor(&f).expect("reducible");
        assert!(poly::z_div_exact(&f, &g).is_some());
    }

    #[test]
    fn swinnerton_dyer_quartic_is_irreducible() {
        // x^4 - 10x^2 + 1, minimal polynomial of sqrt2 + sqrt3
        assert!(is_irreducible(&zpoly(&[1, 0, -10, 0, 1])));
    }

    #[test]
    fn simple_cases() {
        assert!(is_irreducible(&zpoly(&[1, 0, 1])));
        assert!(is_irreducible(&zpoly(&[-2, 0, 0, 1])));
        assert!(!is_irreducible(&zpoly(&[-1, 0, 1])));
        assert!(!is_irreducible(&zpoly(&[1, 2, 1])));
        assert!(!is_irreducible(&zpoly(&[0, 0, 1])));
    }

    #[test]
    fn cubic_times_cubic() {
        let f = poly::z_mul(&zpoly(&[-2, 0, 0, 1]), &zpoly(&[1, 1, 0, 1]));
        assert!(!is_irreducible(&f));
    }
}
