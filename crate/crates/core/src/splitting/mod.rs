//! Prime decomposition in `Z[θ]`, counts of primes by norm, and splitting
//! densities along towers of number fields.

mod tower;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::fp;
use crate::arith::integer::{is_prime_u64, prime_power};
use crate::arith::numfield::{rational_to_string, NumberField};
use crate::arith::place::PrimeIdeal;
use crate::error::{Error, Result};

pub use tower::{build_totally_padic_tower, Tower, TowerSpec, DEFAULT_TOWER_BUDGET};

/// Primes of `K` above `p` via Dedekind's criterion on `f mod p`.
pub fn dedekind_factor(k: &NumberField, p: u64) -> Result<Vec<PrimeIdeal>> {
    if !is_prime_u64(p) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    if (k.disc() % BigInt::from(p)).is_zero() {
        return Err(Error::IndexPrime { p, level: None });
    }
    let fp_f = fp::from_z(k.poly(), p);
    Ok(fp::factor(&fp_f, p).into_iter().map(|(g, e)| PrimeIdeal::new(p, g, e)).collect())
}

/// `N_q(K)`: the number of primes of `K` of norm `q`.
pub fn count_primes_norm(k: &NumberField, q: u64) -> Result<u64> {
    let (p, f) = prime_power(q).ok_or_else(|| Error::Precondition(format!("{q} is not a prime power")))?;
    Ok(dedekind_factor(k, p)?.iter().filter(|w| w.residue_degree == f).count() as u64)
}

pub fn is_totally_split(k: &NumberField, p: u64) -> Result<bool> {
    let primes = dedekind_factor(k, p)?;
    Ok(primes.len() == k.degree() && primes.iter().all(|w| w.ramification == 1 && w.residue_degree == 1))
}

/// Exact ratios `N_q(K_i)/[K_i:Q]` along a tower.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiEstimate {
    pub q: u64,
    #[serde(with = "rational_vec")]
    pub ratios: Vec<BigRational>,
    #[serde(with = "rational_one")]
    pub limit_guess: BigRational,
}

pub fn psi_estimate(t: &Tower, q: u64) -> Result<PsiEstimate> {
    let (p, _) = prime_power(q).ok_or_else(|| Error::Precondition(format!("{q} is not a prime power")))?;
    let ratios: Vec<Result<BigRational>> = t
        .levels()
        .par_iter()
        .enumerate()
        .map(|(i, k)| {
            let n = count_primes_norm(k, q).map_err(|e| match e {
                Error::IndexPrime { .. } => Error::IndexPrime { p, level: Some(i) },
                e => e,
            })?;
            Ok(BigRational::new(BigInt::from(n), BigInt::from(k.degree())))
        })
        .collect();
    let ratios = ratios.into_iter().collect::<Result<Vec<_>>>()?;
    let limit_guess = ratios.last().cloned().unwrap_or_else(BigRational::zero);
    Ok(PsiEstimate { q, ratios, limit_guess })
}

mod rational_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(rational_to_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigRational>, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        v.iter()
            .map(|s| crate::arith::numfield::parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

mod rational_one {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rational_to_string(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let v = String::deserialize(d)?;
        crate::arith::numfield::parse_rational(&v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::integer::rat;

    #[test]
    fn gaussian_primes() {
        let k = NumberField::from_coeffs(&[1, 0, 1]).unwrap();
        let at5 = dedekind_factor(&k, 5).unwrap();
        assert_eq!(at5.len(), 2);
        assert!(at5.iter().all(|w| w.ramification == 1 && w.residue_degree == 1));
        let at3 = dedekind_factor(&k, 3).unwrap();
        assert_eq!((at3.len(), at3[0].residue_degree), (1, 2));
        assert_eq!(dedekind_factor(&k, 2).unwrap_err(), Error::IndexPrime { p: 2, level: None });
        assert_eq!(count_primes_norm(&k, 5).unwrap(), 2);
        assert_eq!(count_primes_norm(&k, 9).unwrap(), 1);
        assert_eq!(count_primes_norm(&k, 3).unwrap(), 0);
    }

    #[test]
    fn rationals_have_one_prime_each() {
        let q = NumberField::rationals();
        for p in [2, 3, 5, 7, 11, 97] {
            assert_eq!(count_primes_norm(&q, p).unwrap(), 1);
            assert!(is_totally_split(&q, p).unwrap());
        }
    }

    #[test]
    fn sqrt_two_splitting() {
        let k = NumberField::from_coeffs(&[-2, 0, 1]).unwrap();
        assert!(is_totally_split(&k, 7).unwrap());
        assert!(!is_totally_split(&k, 5).unwrap());
    }

    #[test]
    fn trivial_tower_ratio() {
        let t = Tower::rationals();
        let est = psi_estimate(&t, 5).unwrap();
        assert_eq!(est.ratios, vec![rat(1, 1)]);
    }
}
