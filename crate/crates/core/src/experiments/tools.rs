//! Single-shot operations behind the smaller CLI subcommands.

use serde::Serialize;

use crate::arith::numfield::DEFAULT_PRECISION;
use crate::arith::{poly, NumberField, PrimeIdeal};
use crate::auxiliary::{verify_drop, AuxSection, DropReport};
use crate::elliptic::{amplify, reduce_point, CurveSpec, PointSpec};
use crate::error::{Error, Result};
use crate::heights::{canonical_height, is_torsion, naive_height, search_small_points, SearchRecord};
use crate::splitting::dedekind_factor;

use super::config::ExperimentConfig;
use super::report::{float_cell, opt_cell, point_cell, Measured, Provenance, Table, Tabular};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorRow {
    pub ideal: String,
    pub ramification: u32,
    pub residue_degree: u32,
    pub norm: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorReport {
    pub poly: Vec<i64>,
    pub p: u64,
    pub primes: Vec<FactorRow>,
}

/// Factorization of `p` in `Z[x]/(poly)`.
pub fn run_factor(cfg: &ExperimentConfig) -> Result<FactorReport> {
    let f = cfg.poly.clone().ok_or_else(|| Error::Config("field `poly` is required".into()))?;
    let p = cfg.prime()?;
    let k = NumberField::new(poly::zpoly(&f), DEFAULT_PRECISION)?;
    let primes = dedekind_factor(&k, p)?
        .iter()
        .map(|w: &PrimeIdeal| FactorRow {
            ideal: w.to_string(),
            ramification: w.ramification,
            residue_degree: w.residue_degree,
            norm: w.norm.to_string(),
        })
        .collect();
    Ok(FactorReport { poly: f, p, primes })
}

impl Tabular for FactorReport {
    fn table(&self) -> Table {
        let mut t = Table::new(&[
            ("ideal", Provenance::Exact),
            ("e", Provenance::Exact),
            ("f", Provenance::Exact),
            ("norm", Provenance::Exact),
        ]);
        for r in &self.primes {
            t.push(vec![r.ideal.clone(), r.ramification.to_string(), r.residue_degree.to_string(), r.norm.clone()]);
        }
        t
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeightRow {
    pub point: PointSpec,
    pub naive_height: Option<f64>,
    pub hhat: Measured,
    pub iterations: u32,
    pub torsion: bool,
    pub torsion_order: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeightReport {
    pub curve: CurveSpec,
    pub tol: f64,
    pub points: Vec<HeightRow>,
}

/// Canonical heights of the configured points, with torsion certificates.
pub fn run_height(cfg: &ExperimentConfig) -> Result<HeightReport> {
    let e = cfg.curve_spec()?.build()?;
    if cfg.points.is_empty() {
        return Err(Error::Config("field `points` must list at least one point".into()));
    }
    let tol = cfg.tolerance();
    let mut points = Vec::new();
    for spec in &cfg.points {
        let pt = spec.build(&e)?;
        let cert = is_torsion(&pt)?;
        let h = if cert.is_torsion { crate::heights::HeightValue::zero() } else { canonical_height(&pt, tol)? };
        points.push(HeightRow {
            point: spec.clone(),
            naive_height: if pt.is_infinity() { None } else { Some(naive_height(&pt)?) },
            hhat: Measured::height(&h),
            iterations: h.iterations,
            torsion: cert.is_torsion,
            torsion_order: cert.order,
        });
    }
    Ok(HeightReport { curve: e.to_spec(), tol, points })
}

impl Tabular for HeightReport {
    fn table(&self) -> Table {
        use Provenance::*;
        let mut t = Table::new(&[
            ("point", Exact),
            ("naive_height", Derived),
            ("hhat", Enclosed),
            ("hhat_error", Enclosed),
            ("torsion", Exact),
            ("torsion_order", Exact),
        ]);
        for r in &self.points {
            t.push(vec![
                point_cell(&r.point),
                opt_cell(r.naive_height, float_cell),
                float_cell(r.hhat.value),
                float_cell(r.hhat.error),
                r.torsion.to_string(),
                opt_cell(r.torsion_order, |o| o.to_string()),
            ]);
        }
        t
    }
}

/// Small-point search on the configured curve over `field` (default `Q`).
pub fn run_search(cfg: &ExperimentConfig) -> Result<SearchRecord> {
    let k = cfg.search_field()?;
    let e = cfg.curve_spec()?.build_over(&k)?;
    search_small_points(&e, &k, &cfg.search_options())
}

impl Tabular for SearchRecord {
    fn table(&self) -> Table {
        use Provenance::*;
        let mut t = Table::new(&[
            ("point", Exact),
            ("naive_height", Derived),
            ("hhat", Enclosed),
            ("hhat_error", Enclosed),
            ("torsion", Exact),
        ]);
        for p in &self.points {
            t.push(vec![
                point_cell(&p.point),
                float_cell(p.naive_height),
                float_cell(p.hhat.value),
                float_cell(p.hhat.error),
                p.torsion.to_string(),
            ]);
        }
        t
    }
}

impl Tabular for AuxSection {
    fn table(&self) -> Table {
        let mut t = Table::new(&[("index", Provenance::Exact), ("coefficient", Provenance::Exact)]);
        for (i, c) in self.coeffs.iter().enumerate() {
            t.push(vec![i.to_string(), c.to_string()]);
        }
        t
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DropCheck {
    pub point: PointSpec,
    pub amplified_by: Option<u64>,
    pub place: String,
    pub report: DropReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DropCheckReport {
    pub checks: Vec<DropCheck>,
}

/// Checks the valuation drop of the configured section at each configured
/// point over `Q`, first amplifying at `p` when `amplify` is set.
pub fn run_verify_drop(cfg: &ExperimentConfig) -> Result<DropCheckReport> {
    let f = super::section_from_config(cfg)?;
    let e = f.curve()?;
    let p = cfg.prime()?;
    if !e.is_good(p) {
        return Err(Error::BadPrime(p));
    }
    if cfg.points.is_empty() {
        return Err(Error::Config("field `points` must list at least one point".into()));
    }
    let w = PrimeIdeal::rational(p);
    let mut checks = Vec::new();
    for spec in &cfg.points {
        let mut pt = spec.build(&e)?;
        let mut amplified_by = None;
        if cfg.amplify && !reduce_point(&pt, &w)?.is_identity() {
            let (m, q) = amplify(&pt, &w)?;
            pt = q;
            amplified_by = Some(m);
        }
        checks.push(DropCheck { point: spec.clone(), amplified_by, place: w.to_string(), report: verify_drop(&f, &pt, &w)? });
    }
    Ok(DropCheckReport { checks })
}

impl Tabular for DropCheckReport {
    fn table(&self) -> Table {
        use Provenance::*;
        let mut t = Table::new(&[
            ("point", Exact),
            ("amplified_by", Exact),
            ("p", Exact),
            ("T0", Exact),
            ("Tf", Exact),
            ("valuation", Exact),
            ("lhs", Exact),
            ("rhs", Exact),
            ("holds", Exact),
            ("holds_strengthened", Exact),
            ("ledger_sum", Derived),
        ]);
        for c in &self.checks {
            let r = &c.report;
            t.push(vec![
                point_cell(&c.point),
                opt_cell(c.amplified_by, |m| m.to_string()),
                r.p.to_string(),
                r.t0.to_string(),
                r.tf.to_string(),
                r.valuation.to_string(),
                r.lhs.to_string(),
                r.rhs.to_string(),
                r.holds.to_string(),
                r.holds_strengthened.to_string(),
                opt_cell(r.ledger.as_ref(), |l| format!("{:.3e}", l.sum)),
            ]);
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::CoordSpec;

    #[test]
    fn gaussian_five() {
        let cfg = ExperimentConfig { poly: Some(vec![1, 0, 1]), p: Some(5), ..Default::default() };
        let r = run_factor(&cfg).unwrap();
        assert_eq!(r.primes.len(), 2);
        assert!(r.primes.iter().all(|w| w.norm == "5"));
    }

    #[test]
    fn heights_of_generator_and_origin() {
        let cfg = ExperimentConfig {
            curve: Some(CurveSpec { field: vec![0, 1], a: CoordSpec::Int(0), b: CoordSpec::Int(-2) }),
            points: vec![PointSpec::Affine([CoordSpec::Int(3), CoordSpec::Int(5)]), PointSpec::Infinity("O".into())],
            ..Default::default()
        };
        let r = run_height(&cfg).unwrap();
        assert!(r.points[0].hhat.value > 0.01 && !r.points[0].torsion);
        assert!(r.points[1].torsion && r.points[1].hhat.value == 0.0);
    }
}
