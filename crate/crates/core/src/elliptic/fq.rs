use crate::arith::fp::{self, FpPoly};
use crate::arith::integer::{mul_mod, pow_mod};

/// `F_q = F_p[t]/(g)` with elements packed as base-`p` integers in `[0, q)`.
#[derive(Clone, Debug)]
pub struct SmallField {
    p: u64,
    f: usize,
    modulus: FpPoly,
    q: u64,
}

impl SmallField {
    pub fn new(p: u64, modulus: &[u64]) -> Option<Self> {
        let f = modulus.len() - 1;
        let q = p.checked_pow(f as u32)?;
        Some(SmallField { p, f, modulus: modulus.to_vec(), q })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.f
    }

    pub fn encode(&self, x: &[u64]) -> u64 {
        let r = if x.len() > self.f { fp::rem(x, &self.modulus, self.p) } else { x.to_vec() };
        r.iter().rev().fold(0u64, |acc, &c| acc * self.p + c % self.p)
    }

    pub fn decode(&self, mut x: u64) -> FpPoly {
        let mut out = Vec::with_capacity(self.f);
        for _ in 0..self.f {
            out.push(x % self.p);
            x /= self.p;
        }
        fp::trim(&mut out);
        out
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.f == 1 {
            return (a + b) % self.p;
        }
        self.encode(&fp::add(&self.decode(a), &self.decode(b), self.p))
    }

    pub fn neg(&self, a: u64) -> u64 {
        if self.f == 1 {
            return (self.p - a % self.p) % self.p;
        }
        self.encode(&fp::sub(&[], &self.decode(a), self.p))
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.f == 1 {
            return mul_mod(a, b, self.p);
        }
        self.encode(&fp::mulmod(&self.decode(a), &self.decode(b), &self.modulus, self.p))
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        if self.f == 1 {
            return pow_mod(a, e, self.p);
        }
        let mut acc = 1u64;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a != 0);
        self.pow(a, self.q - 2)
    }

    pub fn from_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
}
