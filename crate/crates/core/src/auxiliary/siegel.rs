use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::integer::ln_abs;
use crate::error::{Error, Result};

/// A small nonzero integer solution of `M x = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiegelSolution {
    #[serde(with = "super::bigint_strings")]
    pub vector: Vec<BigInt>,
    /// `log max |x_i|`.
    pub height: f64,
    /// The Bombieri–Vaaler guarantee for this system.
    pub bound: f64,
    pub rank: usize,
    pub kernel_dimension: usize,
}

const LLL_DELTA: f64 = 0.99;
const LLL_SWAP_CAP: usize = 200_000;
const PAIR_POOL: usize = 64;

/// Exact integer kernel by unimodular column operations, LLL reduction,
/// then the shortest sup-norm vector among reduced vectors and their
/// pairwise sums and differences.
pub fn siegel_solve(m: &[Vec<BigInt>]) -> Result<SiegelSolution> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    if cols == 0 || rows >= cols {
        return Err(Error::DimensionError(format!("{rows} equations in {cols} unknowns")));
    }
    if m.iter().any(|r| r.len() != cols) {
        return Err(Error::DimensionError("ragged matrix".into()));
    }
    let mut kernel = integer_kernel(m);
    if kernel.is_empty() {
        return Err(Error::NoKernel);
    }
    lll_reduce(&mut kernel);
    let vector = select_shortest(&kernel);
    assert!(m.iter().all(|row| dot(row, &vector).is_zero()), "selected vector is not in the kernel");
    let independent = independent_rows(m);
    let rank = independent.len();
    let bound = if rank == 0 {
        0.0
    } else {
        independent.iter().map(|&i| 0.5 * ln_abs(&dot(&m[i], &m[i]))).sum::<f64>() / (cols - rank) as f64
    };
    let height = vector.iter().map(|c| ln_abs(c)).fold(f64::NEG_INFINITY, f64::max);
    Ok(SiegelSolution { vector, height, bound, rank, kernel_dimension: kernel.len() })
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
}

/// A basis of `{x ∈ Z^n : M x = 0}`: reduce `M` to column echelon form with
/// a unimodular `U`; the columns of `U` past the pivots span the kernel.
pub fn integer_kernel(m: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let cols = m.first().map_or(0, |r| r.len());
    // work on columns: a[c] is column c of M, u[c] is column c of U
    let mut a: Vec<Vec<BigInt>> = (0..cols).map(|c| m.iter().map(|r| r[c].clone()).collect()).collect();
    let mut u: Vec<Vec<BigInt>> =
        (0..cols).map(|c| (0..cols).map(|i| BigInt::from((i == c) as i64)).collect()).collect();
    let mut pivot = 0;
    for i in 0..m.len() {
        if pivot == cols {
            break;
        }
        for j in pivot + 1..cols {
            if a[j][i].is_zero() {
                continue;
            }
            if a[pivot][i].is_zero() {
                a.swap(pivot, j);
                u.swap(pivot, j);
                continue;
            }
            let (x, y) = (a[pivot][i].clone(), a[j][i].clone());
            let eg = x.extended_gcd(&y);
            let (s, t, g) = (eg.x, eg.y, eg.gcd);
            let (p, q) = (&x / &g, &y / &g);
            // [c_p, c_j] <- [s c_p + t c_j, -q c_p + p c_j], determinant s p + t q = 1
            let mix = |v: &mut Vec<Vec<BigInt>>| {
                let (cp, cj) = (v[pivot].clone(), v[j].clone());
                v[pivot] = cp.iter().zip(&cj).map(|(a, b)| &s * a + &t * b).collect();
                v[j] = cp.iter().zip(&cj).map(|(a, b)| &p * b - &q * a).collect();
            };
            mix(&mut a);
            mix(&mut u);
        }
        if !a[pivot][i].is_zero() {
            pivot += 1;
        }
    }
    u.drain(..pivot);
    u.into_iter().map(primitive).collect()
}

fn primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if g.is_zero() || g == BigInt::from(1) {
        return v;
    }
    v.into_iter().map(|c| c / &g).collect()
}

fn to_f64_vec(v: &[BigInt]) -> Option<Vec<f64>> {
    v.iter().map(|c| c.to_f64().filter(|x| x.is_finite())).collect()
}

/// LLL with floating Gram–Schmidt data and exact integer basis updates.
/// Entries too large for `f64` leave the basis untouched; the result is a
/// basis of the same lattice either way.
pub fn lll_reduce(basis: &mut [Vec<BigInt>]) {
    let n = basis.len();
    if n < 2 {
        return;
    }
    let d = basis[0].len();
    let mut fb: Vec<Vec<f64>> = match basis.iter().map(|v| to_f64_vec(v)).collect::<Option<Vec<_>>>() {
        Some(f) => f,
        None => return,
    };
    let mut mu = vec![vec![0.0f64; n]; n];
    let mut bstar = vec![vec![0.0f64; d]; n];
    let mut bnorm = vec![0.0f64; n];
    let gso_row = |k: usize, fb: &[Vec<f64>], bstar: &mut [Vec<f64>], mu: &mut [Vec<f64>], bnorm: &mut [f64]| {
        let mut v = fb[k].clone();
        for j in 0..k {
            let m = if bnorm[j] > 0.0 {
                fb[k].iter().zip(&bstar[j]).map(|(a, b)| a * b).sum::<f64>() / bnorm[j]
            } else {
                0.0
            };
            mu[k][j] = m;
            for (x, b) in v.iter_mut().zip(&bstar[j]) {
                *x -= m * b;
            }
        }
        bnorm[k] = v.iter().map(|x| x * x).sum();
        bstar[k] = v;
    };
    gso_row(0, &fb, &mut bstar, &mut mu, &mut bnorm);
    let (mut k, mut kmax, mut swaps) = (1usize, 0usize, 0usize);
    while k < n && swaps < LLL_SWAP_CAP {
        if k > kmax {
            kmax = k;
            gso_row(k, &fb, &mut bstar, &mut mu, &mut bnorm);
        }
        let mut changed = false;
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q == 0.0 || !q.is_finite() {
                continue;
            }
            let qi = match BigInt::from_f64(q) {
                Some(v) => v,
                None => continue,
            };
            let (lo, hi) = basis.split_at_mut(k);
            for (x, y) in hi[0].iter_mut().zip(&lo[j]) {
                *x -= &qi * y;
            }
            for i in 0..j {
                mu[k][i] -= q * mu[j][i];
            }
            mu[k][j] -= q;
            changed = true;
        }
        if changed {
            match to_f64_vec(&basis[k]) {
                Some(f) => fb[k] = f,
                None => return,
            }
            gso_row(k, &fb, &mut bstar, &mut mu, &mut bnorm);
        }
        if bnorm[k] < (LLL_DELTA - mu[k][k - 1] * mu[k][k - 1]) * bnorm[k - 1] {
            basis.swap(k, k - 1);
            fb.swap(k, k - 1);
            gso_row(k - 1, &fb, &mut bstar, &mut mu, &mut bnorm);
            gso_row(k, &fb, &mut bstar, &mut mu, &mut bnorm);
            kmax = k;
            k = (k - 1).max(1);
            swaps += 1;
        } else {
            k += 1;
        }
    }
}

fn sup_norm(v: &[BigInt]) -> BigInt {
    v.iter().map(|c| c.abs()).max().unwrap_or_default()
}

fn sign_normalize(v: Vec<BigInt>) -> Vec<BigInt> {
    match v.iter().find(|c| !c.is_zero()) {
        Some(c) if c.is_negative() => v.into_iter().map(|c| -c).collect(),
        _ => v,
    }
}

fn cmp_candidates(a: &(BigInt, Vec<BigInt>), b: &(BigInt, Vec<BigInt>)) -> Ordering {
    a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1))
}

fn select_shortest(kernel: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut pool: Vec<(BigInt, Vec<BigInt>)> =
        kernel.iter().map(|v| sign_normalize(v.clone())).map(|v| (sup_norm(&v), v)).collect();
    pool.sort_by(cmp_candidates);
    let top = pool.len().min(PAIR_POOL);
    let mut best = pool[0].clone();
    for i in 0..top {
        for j in i + 1..top {
            for sign in [1, -1] {
                let v: Vec<BigInt> = pool[i].1.iter().zip(&pool[j].1).map(|(a, b)| a + b * sign).collect();
                if v.iter().all(|c| c.is_zero()) {
                    continue;
                }
                let v = sign_normalize(v);
                let cand = (sup_norm(&v), v);
                if cmp_candidates(&cand, &best) == Ordering::Less {
                    best = cand;
                }
            }
        }
    }
    best.1
}

/// Indices of a maximal set of linearly independent rows, chosen greedily.
pub fn independent_rows(m: &[Vec<BigInt>]) -> Vec<usize> {
    let mut echelon: Vec<(usize, Vec<BigRational>)> = Vec::new();
    let mut out = Vec::new();
    for (i, row) in m.iter().enumerate() {
        let mut v: Vec<BigRational> = row.iter().map(|c| BigRational::from_integer(c.clone())).collect();
        for (p, e) in &echelon {
            if !v[*p].is_zero() {
                let f = &v[*p] / &e[*p];
                for (x, y) in v.iter_mut().zip(e) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        if let Some(p) = v.iter().position(|c| !c.is_zero()) {
            echelon.push((p, v));
            out.push(i);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn kernel_is_saturated() {
        // x + 2y + 4z = 0 with kernel lattice containing (2, -1, 0) and (0, 2, -1)
        let m = ints(&[&[1, 2, 4]]);
        let k = integer_kernel(&m);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(dot(&m[0], v).is_zero());
        }
        // determinant of the Gram matrix equals that of the saturated lattice (|n|^2 = 21)
        let g = |a: &Vec<BigInt>, b: &Vec<BigInt>| dot(a, b);
        let det = g(&k[0], &k[0]) * g(&k[1], &k[1]) - g(&k[0], &k[1]).pow(2);
        assert_eq!(det, BigInt::from(21));
    }

    #[test]
    fn solves_and_respects_bound() {
        let m = ints(&[&[3, -7, 11, 2, 5, 0], &[1, 1, -4, 9, 0, 6]]);
        let s = siegel_solve(&m).unwrap();
        assert_eq!(s.rank, 2);
        assert_eq!(s.kernel_dimension, 4);
        assert!(s.height <= s.bound + 1e-12, "{} > {}", s.height, s.bound);
        assert!(s.vector.iter().find(|c| !c.is_zero()).unwrap().is_positive());
    }

    #[test]
    fn errors() {
        assert!(matches!(siegel_solve(&ints(&[&[1, 2], &[3, 4]])), Err(Error::DimensionError(_))));
        let zero = ints(&[&[0, 0, 0]]);
        let s = siegel_solve(&zero).unwrap();
        assert_eq!((s.rank, s.bound, s.height), (0, 0.0, 0.0));
    }

    #[test]
    fn dependent_rows_are_skipped() {
        let m = ints(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 0, 1]]);
        assert_eq!(independent_rows(&m), vec![0, 2]);
    }
}
