use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::is_totally_split;
use crate::arith::factor;
use crate::arith::fp;
use crate::arith::integer::is_prime_u64;
use crate::arith::numfield::{parse_rational, rational_to_string, Field, NfElement, NumberField, DEFAULT_PRECISION};
use crate::arith::poly::{self, ZPoly};
use crate::error::{Error, Result};

/// Attempts per level before giving up.
pub const DEFAULT_TOWER_BUDGET: usize = 20_000;

/// Attempts at one level before re-picking the level below it.
const LEVEL_RETRIES: usize = 200;

/// A chain `Q = K_0 ⊂ K_1 ⊂ ...` with explicit inclusions: `witnesses[i]`
/// is the image of the generator of `K_i` inside `K_{i+1}`.
#[derive(Clone, Debug)]
pub struct Tower {
    levels: Vec<Field>,
    witnesses: Vec<NfElement>,
}

impl Tower {
    pub fn rationals() -> Self {
        Tower { levels: vec![NumberField::rationals()], witnesses: Vec::new() }
    }

    /// Validates degrees and witnesses.
    pub fn new(levels: Vec<Field>, witnesses: Vec<NfElement>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Config("tower has no levels".into()));
        }
        if levels[0].degree() != 1 {
            return Err(Error::Config("tower level 0 must be Q".into()));
        }
        if witnesses.len() + 1 != levels.len() {
            return Err(Error::Config("expected one witness per consecutive pair of levels".into()));
        }
        for (i, w) in witnesses.iter().enumerate() {
            let (lo, hi) = (&levels[i], &levels[i + 1]);
            if hi.degree() <= lo.degree() || hi.degree() % lo.degree() != 0 {
                return Err(Error::Config(format!("level {} degree does not extend level {i}", i + 1)));
            }
            if w.field().as_ref() != hi.as_ref() {
                return Err(Error::Config(format!("witness {i} is not in level {}", i + 1)));
            }
            let f = poly::z_to_q(lo.poly());
            if !w.eval_poly(&f).is_zero() {
                return Err(Error::Config(format!("witness {i} is not a root of level {i}")));
            }
        }
        Ok(Tower { levels, witnesses })
    }

    pub fn levels(&self) -> &[Field] {
        &self.levels
    }

    pub fn witnesses(&self) -> &[NfElement] {
        &self.witnesses
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.levels.iter().map(|k| k.degree()).collect()
    }

    pub fn to_spec(&self) -> Result<TowerSpec> {
        let levels = self
            .levels
            .iter()
            .map(|k| {
                k.poly()
                    .iter()
                    .map(|c| c.to_i64().ok_or_else(|| Error::CapExceeded("coefficient exceeds 64 bits".into())))
                    .collect::<Result<Vec<i64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let witnesses = self.witnesses.iter().map(|w| w.coords().iter().map(rational_to_string).collect()).collect();
        Ok(TowerSpec { levels, witnesses })
    }
}

/// JSON form: defining polynomials (constant term first) and witness
/// coordinates as `"num/den"` strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerSpec {
    pub levels: Vec<Vec<i64>>,
    #[serde(default)]
    pub witnesses: Vec<Vec<String>>,
}

impl TowerSpec {
    pub fn build(&self) -> Result<Tower> {
        let levels = self
            .levels
            .iter()
            .map(|f| NumberField::new(poly::zpoly(f), DEFAULT_PRECISION))
            .collect::<Result<Vec<_>>>()?;
        if self.witnesses.len() + 1 != levels.len() {
            return Err(Error::Config("expected one witness per consecutive pair of levels".into()));
        }
        let witnesses = self
            .witnesses
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let coords = w.iter().map(|s| parse_rational(s)).collect::<Result<Vec<BigRational>>>()?;
                levels[i + 1].element(coords).map_err(|e| Error::Config(e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Tower::new(levels, witnesses)
    }
}

/// Monic `g` of degree `d` over `F_p` such that `g(x) = r` has `d` distinct
/// roots for every `r` in `roots`.
fn random_split_map(rng: &mut ChaCha8Rng, p: u64, d: usize, roots: &[u64]) -> Option<Vec<u64>> {
    for _ in 0..2000 {
        let mut g: Vec<u64> = (0..d).map(|_| rng.gen_range(0..p)).collect();
        g.push(1);
        let ok = roots.iter().all(|&r| {
            let mut h = g.clone();
            h[0] = (h[0] + p - r % p) % p;
            fp::roots(&h, p).len() == d
        });
        if ok {
            return Some(g);
        }
    }
    None
}

/// Builds `Q ⊂ K_1 ⊂ ... ⊂ K_m` with every level totally split at `p`.
///
/// Each step uses `f_{i+1}(x) = f_i(g(x))` for a monic `g` that separates
/// every residue root of `f_i` into `deg g` distinct roots mod `p`; the
/// lift of `g` is perturbed by multiples of `p²` until `f_{i+1}` is
/// irreducible over `Q`. The inclusion witness is `θ_i = g(θ_{i+1})`.
pub fn build_totally_padic_tower(p: u64, target_degrees: &[usize], seed: u64, budget: usize) -> Result<Tower> {
    if p < 5 || !is_prime_u64(p) {
        return Err(Error::Precondition(format!("tower prime must be a prime ≥ 5, got {p}")));
    }
    let mut degrees: Vec<usize> = vec![1];
    for &d in target_degrees {
        if d == 1 && degrees == [1] {
            continue;
        }
        if d <= *degrees.last().unwrap() {
            return Err(Error::Precondition("degrees must be strictly increasing".into()));
        }
        if d > 12 {
            return Err(Error::Precondition(format!("degree {d} exceeds the desk cap 12")));
        }
        if d as u64 > p {
            return Err(Error::Precondition(format!("degree {d} exceeds p = {p}; Z[θ] cannot split totally")));
        }
        if d % degrees.last().unwrap() != 0 {
            return Err(Error::Precondition(format!("degree {d} is not a multiple of the previous level")));
        }
        degrees.push(d);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut levels = vec![NumberField::rationals()];
    let mut witnesses = Vec::new();
    let p2 = BigInt::from(p * p);
    let mut attempts = 0usize;
    while levels.len() < degrees.len() {
        let i = levels.len() - 1;
        let d = degrees[i + 1] / degrees[i];
        let prev = levels[i].clone();
        let roots = fp::roots(&fp::from_z(prev.poly(), p), p);
        let mut found = None;
        let mut local = 0;
        while attempts < budget && local < LEVEL_RETRIES {
            attempts += 1;
            local += 1;
            // No split map usually means the residue roots of this level
            // admit none (p = 5, roots differing by ±1); re-pick the level.
            let Some(gp) = random_split_map(&mut rng, p, d, &roots) else { break };
            let half = (p / 2) as i64;
            let mut g: ZPoly = gp
                .iter()
                .map(|&c| {
                    let c = c as i64;
                    BigInt::from(if c > half { c - p as i64 } else { c })
                })
                .collect();
            for c in g.iter_mut().take(d) {
                *c += &p2 * BigInt::from(rng.gen_range(-1i64..=1));
            }
            let f = poly::z_compose(prev.poly(), &g);
            if !factor::is_irreducible(&f) {
                continue;
            }
            let field = NumberField::new(f, DEFAULT_PRECISION)?;
            if (field.disc() % BigInt::from(p)).is_zero() || !is_totally_split(&field, p)? {
                continue;
            }
            let gq = poly::z_to_q(&g);
            let witness = field.from_poly(&gq);
            found = Some((field, witness));
            break;
        }
        match found {
            Some((field, witness)) => {
                levels.push(field);
                witnesses.push(witness);
            }
            None if attempts < budget && i > 0 => {
                levels.pop();
                witnesses.pop();
            }
            None => {
                return Err(Error::SearchExhausted(format!(
                    "no degree-{} level found within {budget} attempts",
                    degrees[i + 1]
                )))
            }
        }
    }
    Tower::new(levels, witnesses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splitting::psi_estimate;

    #[test]
    fn quadratic_level_splits() {
        let t = build_totally_padic_tower(5, &[2], 1, DEFAULT_TOWER_BUDGET).unwrap();
        assert_eq!(t.degrees(), vec![1, 2]);
        assert!(is_totally_split(&t.levels()[1], 5).unwrap());
    }

    #[test]
    fn degree_one_is_q() {
        let t = build_totally_padic_tower(5, &[1], 1, 10).unwrap();
        assert_eq!(t.degrees(), vec![1]);
    }

    #[test]
    fn small_prime_refused() {
        assert!(matches!(build_totally_padic_tower(2, &[2], 1, 10), Err(Error::Precondition(_))));
    }

    #[test]
    fn spec_roundtrip() {
        let t = build_totally_padic_tower(7, &[2, 4], 3, DEFAULT_TOWER_BUDGET).unwrap();
        let s = t.to_spec().unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let back: TowerSpec = serde_json::from_str(&json).unwrap();
        let t2 = back.build().unwrap();
        assert_eq!(t2.degrees(), vec![1, 2, 4]);
        let est = psi_estimate(&t2, 7).unwrap();
        assert!(est.ratios.iter().all(|r| *r == BigRational::from_integer(1.into())));
    }
}
