use std::collections::BTreeSet;

use serde::Serialize;

use crate::arith::integer::primes_up_to;
use crate::arith::Field;
use crate::auxiliary::{verify_drop, AuxSection, DropReport};
use crate::elliptic::{amplify, phi_x, CurveRef, CurveSpec, PointSpec};
use crate::error::{Error, Result};
use crate::heights::search_small_points;

use super::config::ExperimentConfig;
use super::report::{float_cell, opt_cell, point_cell, Measured, Provenance, Table, Tabular};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplacePoint {
    /// The point as given or found, before amplification.
    pub point: PointSpec,
    /// Multiplier applied before measuring, when amplifying.
    pub amplified_by: Option<u64>,
    pub phi: Measured,
    /// `φ_X(P)/[K:Q]`.
    pub phi_per_degree: Measured,
    /// `φ_X(P)` over the full primed sum.
    pub fraction: Option<Measured>,
    /// Drop check and product-formula ledger at the amplification place.
    pub drop: Option<DropReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplaceField {
    pub poly: Vec<String>,
    pub degree: usize,
    /// `(q, N_q)` for good `q ≤ X` with `N_q > 0`.
    pub places: Vec<(u64, u64)>,
    /// Primes left out of the primed sums: bad for the curve or the order.
    pub excluded: Vec<u64>,
    /// `Σ' (N_q/[K:Q]) log q`.
    pub primed_sum: Measured,
    /// `Σ' ψ_q log q / q²` with `ψ_q` read off this field.
    pub bound_shape: Measured,
    pub points: Vec<MultiplacePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplaceReport {
    pub curve: CurveSpec,
    pub norm_cap: f64,
    pub fields: Vec<MultiplaceField>,
}

fn place_census(e: &CurveRef, x_cap: f64) -> Result<(Vec<(u64, u64)>, BTreeSet<u64>)> {
    let k = e.base();
    let limit = x_cap.floor().max(0.0) as u64;
    let mut counts = std::collections::BTreeMap::new();
    let mut excluded = BTreeSet::new();
    for p in primes_up_to(limit) {
        if !e.is_good(p) {
            excluded.insert(p);
            continue;
        }
        match crate::splitting::dedekind_factor(k, p) {
            Ok(ws) => {
                for w in ws {
                    if let Some(n) = w.norm_u64().filter(|&n| n <= limit) {
                        *counts.entry(n).or_insert(0u64) += 1;
                    }
                }
            }
            Err(Error::IndexPrime { .. }) => {
                excluded.insert(p);
            }
            Err(e) => return Err(e),
        }
    }
    Ok((counts.into_iter().collect(), excluded))
}

fn run_field(cfg: &ExperimentConfig, spec: &CurveSpec, k: &Field, x_cap: f64, section: Option<&AuxSection>) -> Result<MultiplaceField> {
    let e = spec.build_over(k)?;
    let d = k.degree() as f64;
    let (places, excluded) = place_census(&e, x_cap)?;
    let primed: f64 = places.iter().map(|&(q, n)| n as f64 / d * (q as f64).ln()).sum();
    let shape: f64 = places.iter().map(|&(q, n)| n as f64 / d * (q as f64).ln() / (q as f64).powi(2)).sum();
    let primed_sum = Measured::derived(primed);

    let mut pts = cfg.points.iter().map(|p| p.build(&e)).collect::<Result<Vec<_>>>()?;
    if pts.is_empty() {
        let rec = search_small_points(&e, k, &cfg.search_options())?;
        pts = rec.points.iter().map(|sp| sp.point.build(&e)).collect::<Result<Vec<_>>>()?;
    }
    let amp_place = match (cfg.amplify, cfg.p) {
        (false, _) => None,
        (true, None) => return Err(Error::Config("field `amplify` needs field `p`".into())),
        (true, Some(p)) => {
            if !e.is_good(p) {
                return Err(Error::BadPrime(p));
            }
            let w = crate::splitting::dedekind_factor(k, p)?.into_iter().min_by_key(|w| w.residue_degree);
            Some(w.ok_or_else(|| Error::Precondition(format!("no place above {p}")))?)
        }
    };
    let mut points = Vec::new();
    for pt in pts {
        let original = pt.to_spec();
        let (pt, amplified_by) = match &amp_place {
            Some(w) if !pt.is_infinity() => {
                // [#E(F_q)] kills P mod every place of norm q, not only w.
                let (m, q) = amplify(&pt, w)?;
                (q, Some(m))
            }
            _ => (pt, None),
        };
        let phi = phi_x(&pt, x_cap, &excluded)?;
        let phi_m = Measured::derived(phi.value);
        let drop = match (section, &amp_place) {
            (Some(f), Some(w)) if k.is_rational() && !pt.is_infinity() => Some(verify_drop(f, &pt, w)?),
            _ => None,
        };
        points.push(MultiplacePoint {
            point: original,
            amplified_by,
            phi: phi_m,
            phi_per_degree: Measured::derived(phi.value / d),
            fraction: if primed > 0.0 { Some(Measured::derived(phi.value / d / primed)) } else { None },
            drop,
        });
    }
    Ok(MultiplaceField {
        poly: k.poly().iter().map(|c| c.to_string()).collect(),
        degree: k.degree(),
        places,
        excluded: excluded.into_iter().collect(),
        primed_sum,
        bound_shape: Measured::derived(shape),
        points,
    })
}

/// Compares `φ_X(P)/[K:Q]` with `Σ'_{q ≤ X} (N_q/[K:Q]) log q` on every
/// configured field; a vanishing primed sum simply yields zero shapes.
pub fn run_multiplace_experiment(cfg: &ExperimentConfig) -> Result<MultiplaceReport> {
    let x_cap = cfg.norm_cap_value()?;
    let spec = cfg.rational_curve()?.to_spec();
    let fields = cfg.field_list()?;
    let section = if cfg.aux.is_some() || cfg.aux_file.is_some() { Some(super::section_from_config(cfg)?) } else { None };
    let fields = fields
        .iter()
        .map(|k| run_field(cfg, &spec, k, x_cap, section.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    Ok(MultiplaceReport { curve: spec, norm_cap: x_cap, fields })
}

impl Tabular for MultiplaceReport {
    fn table(&self) -> Table {
        use Provenance::*;
        let mut t = Table::new(&[
            ("field", Exact),
            ("degree", Exact),
            ("point", Exact),
            ("amplified_by", Exact),
            ("phi", Derived),
            ("phi_per_degree", Derived),
            ("primed_sum", Derived),
            ("fraction", Derived),
            ("bound_shape", Derived),
            ("drop_lhs", Exact),
            ("drop_rhs", Exact),
            ("drop_holds", Exact),
            ("ledger_sum", Derived),
        ]);
        for f in &self.fields {
            for p in &f.points {
                let drop = p.drop.as_ref();
                t.push(vec![
                    format!("[{}]", f.poly.join(",")),
                    f.degree.to_string(),
                    point_cell(&p.point),
                    opt_cell(p.amplified_by, |m| m.to_string()),
                    float_cell(p.phi.value),
                    float_cell(p.phi_per_degree.value),
                    float_cell(f.primed_sum.value),
                    opt_cell(p.fraction, |x| float_cell(x.value)),
                    float_cell(f.bound_shape.value),
                    opt_cell(drop, |d| d.lhs.to_string()),
                    opt_cell(drop, |d| d.rhs.to_string()),
                    opt_cell(drop, |d| d.holds.to_string()),
                    opt_cell(drop.and_then(|d| d.ledger.as_ref()), |l| format!("{:.3e}", l.sum)),
                ]);
            }
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::CoordSpec;

    fn cfg(points: Vec<PointSpec>, amplify: bool) -> ExperimentConfig {
        ExperimentConfig {
            curve: Some(CurveSpec { field: vec![0, 1], a: CoordSpec::Int(0), b: CoordSpec::Int(-2) }),
            norm_cap: Some(10.0),
            points,
            amplify,
            p: Some(7),
            ..Default::default()
        }
    }

    #[test]
    fn infinity_takes_every_place() {
        let r = run_multiplace_experiment(&cfg(vec![PointSpec::Infinity("O".into())], false)).unwrap();
        let f = &r.fields[0];
        assert_eq!(f.places, vec![(5, 1), (7, 1)]);
        assert_eq!(f.excluded, vec![2, 3]);
        let p = &f.points[0];
        assert!((p.phi.value - f.primed_sum.value).abs() < 1e-12);
        assert!((p.fraction.unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn amplified_point_sees_seven() {
        let pt = PointSpec::Affine([CoordSpec::Int(3), CoordSpec::Int(5)]);
        let r = run_multiplace_experiment(&cfg(vec![pt], true)).unwrap();
        let p = &r.fields[0].points[0];
        assert_eq!(p.amplified_by, Some(7));
        assert!(p.phi.value >= 7f64.ln() - 1e-12);
        assert!(p.phi.value <= r.fields[0].primed_sum.value + 1e-12);
    }
}
