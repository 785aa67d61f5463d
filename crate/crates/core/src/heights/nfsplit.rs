//! Tate iteration over a number field, split into archimedean and finite
//! parts.
//!
//! Write `x = X_0/Z_0` with `X_0 ∈ Z[θ]` and `Z_0 ∈ Z`, and let
//! `(X_N, Z_N) = F^N(X_0, Z_0)` be the unreduced iterate of the duplication
//! forms. Then
//!
//! `[K:Q] h(X_N/Z_N) = Σ_σ log max(|σX_N|, |σZ_N|) - log N(X_N O_K + Z_N O_K)`.
//!
//! The archimedean sum is tracked on a normalized projective point in every
//! embedding. The content ideal is supported above the primes dividing
//! `2 N(4a³ + 27b²) Z_0`; at each place `w` there the pair is followed in
//! `Z_p[θ]/(F_w)`, where `F_w` is the Hensel-lifted local factor of the
//! defining polynomial. This needs `Z[θ]` to be maximal at `p`; otherwise the
//! result is `IndexPrime` and the caller falls back to exact doubling.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::integral_scaling;
use super::split::SplitIterate;
use crate::arith::complex::{eval_on_enclosure, rat_upper_f64, CRat, RootEnclosure};
use crate::arith::fp::{self, FpPoly};
use crate::arith::integer::{factorize, ln_abs_rat, rat_to_f64, valuation_int};
use crate::arith::numfield::{NfElement, MAX_PRECISION};
use crate::arith::poly::{det_bareiss, z_mul};
use crate::elliptic::CurveRef;
use crate::error::{Error, Result};

/// `Σ_i c_i X^i Z^{4-i}`, coefficients indexed by the power of `X`.
type Form<T> = [T; 5];

fn forms_of<T: Clone>(a: &T, b: &T, mul: impl Fn(&T, &T) -> T, scale: impl Fn(&T, i64) -> T, zero: T, one: T) -> (Form<T>, Form<T>) {
    let dx = [mul(a, a), scale(b, -8), scale(a, -2), zero.clone(), one.clone()];
    let dz = [scale(b, 4), scale(a, 4), zero.clone(), scale(&one, 4), zero];
    (dx, dz)
}

// ---------- finite places ----------

/// `Z_p[θ]/(F_w)` modulo `p^k`.
struct LocalRing {
    p: BigInt,
    f: u32,
    e: u32,
    /// Monic local factor, lifted modulo `p^k0` with `k0` the starting precision.
    modulus: Vec<BigInt>,
}

impl LocalRing {
    fn dim(&self) -> usize {
        self.modulus.len() - 1
    }

    fn reduce(&self, a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
        let d = self.dim();
        let mut r: Vec<BigInt> = a.iter().map(|c| c.mod_floor(m)).collect();
        while r.len() > d {
            let top = r.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let off = r.len() - d;
            for (i, c) in self.modulus[..d].iter().enumerate() {
                r[off + i] = (&r[off + i] - &top * c).mod_floor(m);
            }
        }
        r.resize(d, BigInt::zero());
        r
    }

    fn mul(&self, a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
        self.reduce(&z_mul(a, b), m)
    }

    fn add(&self, a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
        a.iter().zip(b).map(|(x, y)| (x + y).mod_floor(m)).collect()
    }

    fn scale(&self, a: &[BigInt], s: i64, m: &BigInt) -> Vec<BigInt> {
        a.iter().map(|x| (x * s).mod_floor(m)).collect()
    }

    fn constant(&self, c: &BigInt, m: &BigInt) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.dim()];
        v[0] = c.mod_floor(m);
        v
    }

    /// `v_w(α)` with `v_w(π) = 1`, or `None` when `α ≡ 0` to the working precision.
    fn valuation(&self, a: &[BigInt], m: &BigInt, k: u32) -> Option<u32> {
        let d = self.dim();
        let mut cols = Vec::with_capacity(d);
        let mut cur = a.to_vec();
        for _ in 0..d {
            cols.push(cur.clone());
            let mut shifted = vec![BigInt::zero()];
            shifted.extend(cur.iter().cloned());
            cur = self.reduce(&shifted, m);
        }
        let rows: Vec<Vec<BigInt>> = (0..d).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
        let det = det_bareiss(rows).mod_floor(m);
        if det.is_zero() {
            return None;
        }
        let v = valuation_int(&det, u64::try_from(&self.p).ok()?);
        (v < k).then(|| v / self.f)
    }
}

/// Lifts `f ≡ g h (mod p)` to `f ≡ G H (mod p^k)`; `g`, `h` monic and coprime mod `p`.
fn lift_pair(f: &[BigInt], g: &FpPoly, h: &FpPoly, p: u64, k: u32) -> (Vec<BigInt>, Vec<BigInt>) {
    let (one, s) = fp::ext_gcd_left(g, h, p);
    debug_assert_eq!(one, vec![1]);
    // s g ≡ 1 (mod h); t = (1 - s g)/h
    let t = fp::divrem(&fp::sub(&[1], &fp::mul(&s, g, p), p), h, p).0;
    let pb = BigInt::from(p);
    let mut big_g = fp::to_z(g);
    let mut big_h = fp::to_z(h);
    let mut pj = pb.clone();
    for _ in 1..k {
        let gh = z_mul(&big_g, &big_h);
        let diff: Vec<BigInt> = (0..f.len()).map(|i| &f[i] - gh.get(i).cloned().unwrap_or_default()).collect();
        let c: Vec<BigInt> = diff.iter().map(|x| x / &pj).collect();
        let c = fp::from_z(&c, p);
        let dg = fp::rem(&fp::mul(&t, &c, p), g, p);
        let dh = fp::rem(&fp::mul(&s, &c, p), h, p);
        for (i, v) in dg.iter().enumerate() {
            big_g[i] += &pj * BigInt::from(*v);
        }
        for (i, v) in dh.iter().enumerate() {
            big_h[i] += &pj * BigInt::from(*v);
        }
        pj *= &pb;
    }
    (big_g, big_h)
}

/// Local rings above `p`, or `IndexPrime` when `Z[θ]` is not maximal at `p`.
fn local_rings(poly: &[BigInt], p: u64, k: u32) -> Result<Vec<LocalRing>> {
    let fbar = fp::from_z(poly, p);
    let fac = fp::factor(&fbar, p);
    // Dedekind: with f = Π ĝ^e + p t, maximal iff no repeated g divides t mod p
    let mut prod = vec![BigInt::one()];
    for (g, e) in &fac {
        for _ in 0..*e {
            prod = z_mul(&prod, &fp::to_z(g));
        }
    }
    let pb = BigInt::from(p);
    let t: Vec<BigInt> = (0..poly.len()).map(|i| (&poly[i] - prod.get(i).cloned().unwrap_or_default()) / &pb).collect();
    let tbar = fp::from_z(&t, p);
    for (g, e) in &fac {
        if *e >= 2 && fp::rem(&tbar, g, p).is_empty() {
            return Err(Error::IndexPrime { p, level: None });
        }
    }
    let powers: Vec<FpPoly> = fac
        .iter()
        .map(|(g, e)| (1..*e).fold(g.clone(), |acc, _| fp::mul(&acc, g, p)))
        .collect();
    let mut rest_z = poly.to_vec();
    let mut rest_bar = fbar;
    let mut out = Vec::new();
    for (i, (g, e)) in fac.iter().enumerate() {
        let local = if i + 1 == fac.len() {
            rest_z.clone()
        } else {
            let h = fp::divrem(&rest_bar, &powers[i], p).0;
            let (big_g, big_h) = lift_pair(&rest_z, &powers[i], &h, p, k);
            rest_z = big_h;
            rest_bar = h;
            big_g
        };
        out.push(LocalRing { p: pb.clone(), f: (g.len() - 1) as u32, e: *e, modulus: local });
    }
    Ok(out)
}

/// `m_N / 4^N` at one place, where `m_N = min(v_w(X_N), v_w(Z_N))`.
/// The last step measures `(X_N, u2 Z_N)`, undoing the integral rescaling.
#[allow(clippy::too_many_arguments)]
fn content_at(
    ring: &LocalRing,
    x0: &[BigInt],
    z0: &BigInt,
    a: &[BigInt],
    b: &[BigInt],
    u2: &BigInt,
    n: u32,
    k0: u32,
) -> Result<BigRational> {
    let mut k = k0;
    let mut m = ring.p.pow(k);
    let lost = || Error::PrecisionExhausted(format!("{}-adic duplication lost all digits", ring.p));
    let mut x = ring.reduce(x0, &m);
    let mut z = ring.constant(z0, &m);
    let a = ring.reduce(a, &m);
    let b = ring.reduce(b, &m);
    let e = ring.e;
    let mut total = BigRational::zero();
    let mut weight = BigRational::one();
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));

    let min_val = |x: &[BigInt], z: &[BigInt], m: &BigInt, k: u32| -> Result<u32> {
        match (ring.valuation(x, m, k), ring.valuation(z, m, k)) {
            (None, None) => Err(lost()),
            (Some(u), None) | (None, Some(u)) => Ok(u),
            (Some(u), Some(v)) => Ok(u.min(v)),
        }
    };
    let normalize = |x: &mut Vec<BigInt>, z: &mut Vec<BigInt>, k: &mut u32, m: &mut BigInt| -> Result<u32> {
        let t = min_val(x, z, m, *k)?;
        let s = t / e;
        if s >= *k {
            return Err(lost());
        }
        if s > 0 {
            let ps = ring.p.pow(s);
            for c in x.iter_mut().chain(z.iter_mut()) {
                debug_assert!((&*c % &ps).is_zero());
                *c = &*c / &ps;
            }
            *k -= s;
            *m = ring.p.pow(*k);
        }
        Ok(s * e)
    };

    total += BigRational::from_integer(normalize(&mut x, &mut z, &mut k, &mut m)?.into());
    for _ in 0..n {
        weight *= &quarter;
        let a = ring.reduce(&a, &m);
        let b = ring.reduce(&b, &m);
        let x2 = ring.mul(&x, &x, &m);
        let z2 = ring.mul(&z, &z, &m);
        let xz = ring.mul(&x, &z, &m);
        let z3 = ring.mul(&z2, &z, &m);
        // X⁴ - 2aX²Z² - 8bXZ³ + a²Z⁴
        let mut dx = ring.mul(&x2, &x2, &m);
        dx = ring.add(&dx, &ring.scale(&ring.mul(&a, &ring.mul(&x2, &z2, &m), &m), -2, &m), &m);
        dx = ring.add(&dx, &ring.scale(&ring.mul(&b, &ring.mul(&xz, &z2, &m), &m), -8, &m), &m);
        dx = ring.add(&dx, &ring.mul(&ring.mul(&a, &a, &m), &ring.mul(&z2, &z2, &m), &m), &m);
        // 4Z(X³ + aXZ² + bZ³)
        let mut inner = ring.mul(&x2, &x, &m);
        inner = ring.add(&inner, &ring.mul(&a, &ring.mul(&x, &z2, &m), &m), &m);
        inner = ring.add(&inner, &ring.mul(&b, &z3, &m), &m);
        let dz = ring.scale(&ring.mul(&z, &inner, &m), 4, &m);
        x = dx;
        z = dz;
        let c = normalize(&mut x, &mut z, &mut k, &mut m)?;
        total += BigRational::from_integer(c.into()) * &weight;
    }
    let vu = e * valuation_int(u2, u64::try_from(&ring.p).map_err(|_| lost())?);
    let r = match (ring.valuation(&x, &m, k), ring.valuation(&z, &m, k)) {
        (None, None) => return Err(lost()),
        (Some(u), None) => u,
        (None, Some(v)) => v + vu,
        (Some(u), Some(v)) => u.min(v + vu),
    };
    total += BigRational::from_integer(r.into()) * &weight;
    Ok(total)
}

// ---------- archimedean places ----------

fn modulus_lower(c: &CRat) -> f64 {
    rat_to_f64(&c.norm_sq()).sqrt() * (1.0 - 1e-12)
}

fn modulus_upper(c: &CRat) -> f64 {
    rat_upper_f64(&c.norm_sq()).sqrt() * (1.0 + 1e-12)
}

fn ln_modulus(c: &CRat) -> f64 {
    0.5 * ln_abs_rat(&c.norm_sq())
}

fn eval_form(f: &Form<CRat>, x: &CRat, z: &CRat) -> CRat {
    let mut xp = vec![CRat::real(BigRational::one())];
    let mut zp = vec![CRat::real(BigRational::one())];
    for i in 1..=4 {
        xp.push(xp[i - 1].mul(x));
        zp.push(zp[i - 1].mul(z));
    }
    let mut acc = CRat::zero();
    for (i, c) in f.iter().enumerate() {
        if !(c.re.is_zero() && c.im.is_zero()) {
            acc = acc.add(&c.mul(&xp[i]).mul(&zp[4 - i]));
        }
    }
    acc
}

/// `(log max(|σX_N|, |σZ_N|))/4^N` in one embedding, with an error bound.
#[allow(clippy::too_many_arguments)]
fn archimedean_at(
    root: &RootEnclosure,
    x0: &[BigRational],
    z0: &BigInt,
    a: &[BigRational],
    b: &[BigRational],
    u2: &BigInt,
    n: u32,
    bits: u32,
) -> Option<(f64, f64)> {
    let (ac, ar) = eval_on_enclosure(a, root);
    let (bc, br) = eval_on_enclosure(b, root);
    let (ra, rb) = (rat_upper_f64(&ar), rat_upper_f64(&br));
    let (ma, mb) = (modulus_upper(&ac) + ra, modulus_upper(&bc) + rb);
    let (dx, dz) = forms_of(
        &ac.round(bits + 8),
        &bc.round(bits + 8),
        |u, v| u.mul(v),
        |u, s| u.scale(&BigRational::from_integer(s.into())),
        CRat::zero(),
        CRat::real(BigRational::one()),
    );
    let ulp = 2f64.powi(-(bits as i32));
    // centres were rounded to bits + 8 above
    let (ra, rb) = (ra + ulp / 128.0, rb + ulp / 128.0);
    let coef_err = (ra * (2.0 * ma + ra) + 8.0 * rb + 2.0 * ra).max(4.0 * rb + 4.0 * ra) * (1.0 + 1e-12);
    let l1x = ma * ma + 8.0 * mb + 2.0 * ma + 1.0;
    let l1z = 4.0 * mb + 4.0 * ma + 4.0;
    let lip = 4.0 * l1x.max(l1z) * (1.0 + 1e-12);

    let (xc, xr) = eval_on_enclosure(x0, root);
    let xr = rat_upper_f64(&xr);
    let zc = CRat::real(BigRational::from_integer(z0.clone()));
    let big_x = modulus_lower(&xc) > modulus_upper(&zc);
    let lambda0 = if big_x { xc.clone() } else { zc.clone() };
    let m0 = modulus_lower(&lambda0);
    if !(m0 > 0.0) || (big_x && xr >= m0 / 2.0) {
        return None;
    }
    let l0 = ln_modulus(&lambda0);
    let mut sum = l0;
    let mut err = l0.abs() * 4e-16;
    let one = CRat::real(BigRational::one());
    let (mut cx, mut cz) = if big_x { (one.clone(), zc.div(&lambda0).round(bits)) } else { (xc.div(&lambda0).round(bits), one.clone()) };
    let mut r = xr / m0 * (1.0 + 1e-12) + ulp;
    let mut weight = 1.0f64;
    for _ in 0..n {
        weight /= 4.0;
        let fx = eval_form(&dx, &cx, &cz);
        let fz = eval_form(&dz, &cx, &cz);
        let e = (lip * (1.0 + r).powi(3) * r + coef_err * (1.0 + r).powi(4)) * (1.0 + 1e-12);
        let take_x = fx.norm_sq() >= fz.norm_sq();
        let lambda = if take_x { fx.clone() } else { fz.clone() };
        let m = modulus_lower(&lambda);
        if !(m > 0.0) || e >= m / 2.0 {
            return None;
        }
        let l = ln_modulus(&lambda);
        sum += l * weight;
        err += l.abs() * 4e-16 * weight;
        (cx, cz) = if take_x { (one.clone(), fz.div(&lambda).round(bits)) } else { (fx.div(&lambda).round(bits), one.clone()) };
        r = e / m * (1.0 + 1e-12) + ulp;
        if r >= 0.25 {
            return None;
        }
    }
    // undo the rescaling: measure (c_x, u² c_z), whose max-norm is at least 1
    let u2 = BigRational::from_integer(u2.clone());
    let cz = cz.scale(&u2);
    let last = if cx.norm_sq() >= cz.norm_sq() { cx } else { cz };
    let u2f = rat_upper_f64(&u2);
    let rel = u2f * (r + ulp) * (1.0 + 1e-12);
    if rel >= 0.25 {
        return None;
    }
    let l = ln_modulus(&last);
    sum += l * weight;
    err += (2.0 * rel + l.abs() * 4e-16) * weight;
    Some((sum, err))
}

// ---------- driver ----------

fn integral_coords(x: &NfElement) -> Vec<BigInt> {
    x.numerator_poly()
}

fn rat_coords(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

/// `h(x(2^n P))/4^n` for `x(P) = x` on `e`, over any number field.
pub fn nf_split_tate_iterate(e: &CurveRef, x: &NfElement, n: u32, max_error: f64) -> Result<SplitIterate> {
    let field = e.base().clone();
    let deg = field.degree();
    let (a, b) = (e.a(), e.b());
    let u = integral_scaling(
        &BigRational::new(BigInt::one(), a.denominator()),
        &BigRational::new(BigInt::one(), b.denominator()),
    );
    let uq = BigRational::from_integer(&u * &u);
    let a = a.scale(&uq.pow(2));
    let b = b.scale(&uq.pow(3));
    let x = x.scale(&uq);
    debug_assert!(a.denominator().is_one() && b.denominator().is_one());
    let (ai, bi) = (integral_coords(&a), integral_coords(&b));
    let z0 = x.denominator();
    let x0 = integral_coords(&x);
    let u2 = &u * &u;

    // 4a³ + 27b² as an element; its norm carries the odd part of the resultant support.
    let disc = &(&a.pow(3) * &field.from_int(4)) + &(&b.pow(2) * &field.from_int(27));
    let norm = disc.norm();
    let mut primes: Vec<u64> = vec![2];
    for part in [norm.numer().clone(), z0.clone(), u.clone()] {
        for (p, _) in factorize(&part) {
            primes.push(u64::try_from(&p).map_err(|_| Error::CapExceeded("prime factor exceeds 64 bits".into()))?);
        }
    }
    primes.sort_unstable();
    primes.dedup();

    let mut finite = 0.0;
    for &p in &primes {
        let d = deg as u32;
        let vres = if p == 2 { 8 * d } else { 0 } + 2 * valuation_int(norm.numer(), p);
        let vz = valuation_int(&z0, p);
        let vu = valuation_int(&u2, p);
        let k = (n + 2) * (4 + vres) + (d + 1) * vz + d * (4 + vres + 2 * vu) + 8;
        for ring in local_rings(field.poly(), p, k)? {
            let c = content_at(&ring, &x0, &z0, &ai, &bi, &u2, n, k)?;
            finite += rat_to_f64(&c) * ring.f as f64 * (p as f64).ln();
        }
    }

    let (x0q, aq, bq) = (rat_coords(&x0), rat_coords(&ai), rat_coords(&bi));
    let mut bits = 128u32;
    loop {
        let emb = field.embeddings_at((2 * bits).min(MAX_PRECISION))?;
        let mut arch = 0.0;
        let mut err = 0.0;
        let mut ok = true;
        for (i, root) in emb.places().iter().enumerate() {
            let dv = emb.local_degree(i) as f64;
            match archimedean_at(root, &x0q, &z0, &aq, &bq, &u2, n, bits) {
                Some((s, e)) => {
                    arch += dv * s;
                    err += dv * e;
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let value = (arch - finite) / deg as f64;
            let error = (err + finite.abs() * 1e-15) / deg as f64;
            if error <= max_error {
                return Ok(SplitIterate { value, error, archimedean: arch / deg as f64, finite: finite / deg as f64 });
            }
        }
        if bits >= MAX_PRECISION / 2 {
            return Err(Error::PrecisionExhausted(format!("archimedean tracking short of {max_error:e} at {bits} bits")));
        }
        bits *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::nf_create;
    use crate::elliptic::CurveSpec;
    use crate::heights::exact_tate_iterate;

    fn curve_over(k: &[i64], a: &str, b: &str) -> (crate::arith::Field, CurveRef) {
        let k = nf_create(k, 64).unwrap();
        let spec: CurveSpec = serde_json::from_str(&format!(r#"{{"a": {a}, "b": {b}}}"#)).unwrap();
        let e = spec.build_over(&k).unwrap();
        (k, e)
    }

    fn elt(k: &crate::arith::Field, c: &[(i64, i64)]) -> NfElement {
        k.element(c.iter().map(|&(n, d)| crate::arith::integer::rat(n, d)).collect()).unwrap()
    }

    #[test]
    fn agrees_with_exact_doubling() {
        // (-1 - i, 1 - i) on y² = x³ - 2 over Q(i); 2 is ramified
        let (k, e) = curve_over(&[1, 0, 1], "0", "-2");
        let p = e.point(elt(&k, &[(-1, 1), (-1, 1)]), elt(&k, &[(1, 1), (-1, 1)])).unwrap();
        for n in 1..=4 {
            let exact = exact_tate_iterate(&p, n).unwrap();
            let split = nf_split_tate_iterate(&e, p.x().unwrap(), n, 1e-10).unwrap();
            assert!((exact - split.value).abs() < 1e-9 + split.error, "n={n}: {exact} vs {split:?}");
        }
    }

    #[test]
    fn agrees_with_exact_doubling_on_a_cubic_with_denominators() {
        // y² = x³ + x/4 + θ over Q(θ), θ³ = 2
        let (k, e) = curve_over(&[-2, 0, 0, 1], r#"["1/4", "0", "0"]"#, r#"["0", "1", "0"]"#);
        let x = elt(&k, &[(1, 3), (1, 1), (0, 1)]);
        for n in 1..=3 {
            let exact = {
                let mut cur = x.clone();
                for _ in 0..n {
                    cur = crate::heights::double_x(&e, &cur).unwrap().unwrap();
                }
                crate::arith::weil_height(&cur, 1e-12).unwrap().value / 4f64.powi(n as i32)
            };
            let split = nf_split_tate_iterate(&e, &x, n, 1e-10).unwrap();
            assert!((exact - split.value).abs() < 1e-9 + split.error, "n={n}: {exact} vs {split:?}");
        }
    }

    #[test]
    fn rational_point_keeps_its_height_in_quadratic_fields() {
        for poly in [[1, 0, 1], [-2, 0, 1], [-7, 1, 1]] {
            let (k, e) = curve_over(&poly, "0", "-2");
            let x = k.from_int(3);
            let split = nf_split_tate_iterate(&e, &x, 12, 1e-8).unwrap();
            let delta = crate::heights::duplication_defect(&e).unwrap() / (3.0 * 4f64.powi(12));
            assert!((split.value - 1.349576835).abs() < delta + split.error + 1e-9, "{poly:?}: {split:?}");
        }
    }

    #[test]
    fn parallelogram_law_over_gaussian_field() {
        let (k, e) = curve_over(&[1, 0, 1], "0", "-2");
        let p = e.point(k.from_int(3), k.from_int(5)).unwrap();
        let q = e.point(k.from_int(1), elt(&k, &[(0, 1), (1, 1)])).unwrap();
        let h = |pt: &crate::elliptic::CurvePoint| crate::heights::canonical_height(pt, 1e-8).unwrap();
        let (hp, hq) = (h(&p), h(&q));
        let (hs, hd) = (h(&p.add(&q).unwrap()), h(&p.add(&q.neg()).unwrap()));
        let lhs = hs.value + hd.value;
        let rhs = 2.0 * (hp.value + hq.value);
        assert!((lhs - rhs).abs() <= hs.error + hd.error + 2.0 * (hp.error + hq.error), "{lhs} vs {rhs}");
        let h2 = h(&q.mul(2));
        assert!((h2.value - 4.0 * hq.value).abs() <= h2.error + 4.0 * hq.error);
    }

    #[test]
    fn index_prime_is_reported() {
        // Z[√-3·2] misses (1 + √-3)/2 at 2: x² + 3 is not 2-maximal
        let (k, e) = curve_over(&[3, 0, 1], "0", "-2");
        let x = k.from_int(3);
        assert!(matches!(nf_split_tate_iterate(&e, &x, 3, 1e-6), Err(Error::IndexPrime { p: 2, .. })));
    }
}
