use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use ntheight::arith::integer::is_prime_u64;
use ntheight::arith::numfield::{parse_rational, rational_to_string};
use ntheight::arith::{nf_create, NumberField, PrimeIdeal};
use ntheight::auxiliary::{integer_kernel, product_formula_ledger};
use ntheight::elliptic::{amplify, count_points, reduce_point, Curve, CurvePoint, CurveSpec};
use ntheight::experiments::{run_bound_experiment, ExperimentConfig, Tabular};
use ntheight::heights::canonical_height;
use ntheight::splitting::{count_primes_norm, dedekind_factor};
use ntheight::Error;

fn small_prime() -> impl Strategy<Value = u64> {
    (5u64..300).prop_filter("prime", |&p| is_prime_u64(p))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn rational_text_roundtrip(n in any::<i64>(), d in 1i64..i64::MAX) {
        let r = BigRational::new(n.into(), d.into());
        prop_assert_eq!(parse_rational(&rational_to_string(&r)).unwrap(), r);
    }

    #[test]
    fn group_law_is_additive(n in -6i64..=6, m in -6i64..=6) {
        let e = Curve::over_q(0, -2).unwrap();
        let p = e.point_q((3, 1), (5, 1)).unwrap();
        prop_assert_eq!(p.mul(n).add(&p.mul(m)).unwrap(), p.mul(n + m));
    }

    #[test]
    fn hasse_bound(a in -20i64..=20, b in -20i64..=20, p in small_prime()) {
        let Ok(e) = Curve::over_q(a, b) else { return Ok(()) };
        prop_assume!(e.is_good(p));
        let n = count_points(&e, &PrimeIdeal::rational(p)).unwrap().order as i64;
        let t = n - p as i64 - 1;
        prop_assert!(t * t <= 4 * p as i64);
    }

    #[test]
    fn amplification_reaches_identity(p in (5u64..60).prop_filter("prime", |&p| is_prime_u64(p))) {
        let e = Curve::over_q(0, -2).unwrap();
        let pt = e.point_q((3, 1), (5, 1)).unwrap();
        let w = PrimeIdeal::rational(p);
        let (m, q) = amplify(&pt, &w).unwrap();
        prop_assert!(reduce_point(&q, &w).unwrap().is_identity());
        prop_assert_eq!(m, count_points(&e, &w).unwrap().order);
    }

    #[test]
    fn residue_degrees_sum_to_degree(c in proptest::collection::vec(-6i64..=6, 1..4), p in small_prime()) {
        let mut f = c.clone();
        f.push(1);
        let Ok(k) = NumberField::from_coeffs(&f) else { return Ok(()) };
        match dedekind_factor(&k, p) {
            Ok(ws) => {
                let total: u32 = ws.iter().map(|w| w.ramification * w.residue_degree).sum();
                prop_assert_eq!(total as usize, k.degree());
                let n_p = count_primes_norm(&k, p).unwrap() as usize;
                prop_assert!(n_p <= k.degree());
            }
            Err(Error::IndexPrime { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn product_formula(n in 1i64..i64::MAX, d in 1i64..1_000_000_000, neg in any::<bool>()) {
        let r = BigRational::new(if neg { -n } else { n }.into(), d.into());
        let l = product_formula_ledger(&r).unwrap();
        prop_assert!(l.sum.abs() < 1e-9, "{}", l.sum);
    }

    #[test]
    fn kernel_vectors_annihilate(rows in proptest::collection::vec(proptest::collection::vec(-9i64..=9, 6), 1..5)) {
        let m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let ker = integer_kernel(&m);
        for v in &ker {
            prop_assert!(v.iter().any(|x| !x.is_zero()));
            for row in &m {
                let dot: BigInt = row.iter().zip(v).map(|(a, b)| a * b).sum();
                prop_assert!(dot.is_zero());
            }
        }
        prop_assert!(ker.len() >= 6 - m.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn height_is_quadratic(n in 1i64..=4) {
        let e = Curve::over_q(0, -2).unwrap();
        let p = e.point_q((3, 1), (5, 1)).unwrap();
        let h1 = canonical_height(&p, 1e-8).unwrap();
        let hn = canonical_height(&p.mul(n), 1e-8).unwrap();
        let n2 = (n * n) as f64;
        prop_assert!((hn.value - n2 * h1.value).abs() <= hn.error + n2 * h1.error + 1e-12);
    }

    #[test]
    fn height_is_a_quadratic_form_over_gaussian_field(n in -2i64..=2, m in -2i64..=2) {
        let k = nf_create(&[1, 0, 1], 64).unwrap();
        let spec: CurveSpec = serde_json::from_str(r#"{"a": 0, "b": -2}"#).unwrap();
        let e = spec.build_over(&k).unwrap();
        let p = e.point(k.from_int(3), k.from_int(5)).unwrap();
        let i = k.generator();
        let q = e.point(k.from_int(1), i).unwrap();
        let h = |pt: &CurvePoint| canonical_height(pt, 1e-8).unwrap();
        let (hp, hq, hs) = (h(&p), h(&q), h(&p.add(&q).unwrap()));
        let pair = hs.value - hp.value - hq.value;
        let (nf, mf) = (n as f64, m as f64);
        let expect = nf * nf * hp.value + mf * mf * hq.value + nf * mf * pair;
        let got = h(&p.mul(n).add(&q.mul(m)).unwrap());
        let slack = got.error + (nf * nf + nf.abs() * mf.abs()) * hp.error
            + (mf * mf + nf.abs() * mf.abs()) * hq.error + nf.abs() * mf.abs() * hs.error + 1e-12;
        prop_assert!((got.value - expect).abs() <= slack, "{} vs {}", got.value, expect);
    }

    #[test]
    fn bound_csv_depends_only_on_config(seed in 0u64..4) {
        let text = format!(
            r#"{{"schema": 1, "curve": {{"a": 0, "b": -2}}, "p": 7, "tower_build": {{"p": 7, "degrees": [2]}},
                "search": {{"naive_cap": 1.0, "hhat_cap": 3.0}}, "seed": {seed}}}"#
        );
        let cfg = ExperimentConfig::from_json(&text).unwrap();
        let a = run_bound_experiment(&cfg).unwrap();
        let b = run_bound_experiment(&cfg).unwrap();
        prop_assert_eq!(a.table().to_csv(), b.table().to_csv());
        for l in &a.levels {
            if let Some(h) = l.min_nonzero_hhat {
                prop_assert!(h.value > 10.0 * h.error);
            }
        }
    }
}
