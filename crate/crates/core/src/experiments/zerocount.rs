use serde::Serialize;

use crate::elliptic::{count_identity_places, CurveSpec, PointSpec};
use crate::error::{Error, Result};
use crate::heights::{search_small_points, HeightValue};

use super::config::ExperimentConfig;
use super::report::{float_cell, point_cell, Measured, Provenance, Table, Tabular};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroCandidate {
    pub point: PointSpec,
    pub hhat: Measured,
    /// Places of norm `q` where the point reduces to `O`.
    pub identity_places: usize,
    /// `identity_places / [K:Q]`.
    pub fraction: f64,
    pub residually_trivial: bool,
    /// Height certified `≤ ε`.
    pub small: bool,
    /// Height straddles `ε` within its error; kept out of `S`.
    pub undecided: bool,
    pub in_s: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroCountReport {
    pub curve: CurveSpec,
    pub field: Vec<String>,
    pub degree: usize,
    pub q: u64,
    /// `N_q(K)`.
    pub n_q: usize,
    pub epsilon: f64,
    pub threshold: f64,
    #[serde(rename = "L")]
    pub l: u32,
    #[serde(rename = "T0")]
    pub t0: u32,
    /// Vanishing order of the section at the origin along the curve.
    pub tf: u32,
    pub candidates: Vec<ZeroCandidate>,
    pub s_count: usize,
    /// `#S · T_f`.
    pub lhs: u64,
    /// `L²`.
    pub rhs: u64,
    pub violation: bool,
}

/// Counts the points of the search set (with `O`) that reduce to `O` at
/// enough places of norm `q` and have height at most `ε`, and compares
/// `#S · T_f` with `L²`. Reports; never asserts.
pub fn run_zero_count(cfg: &ExperimentConfig) -> Result<ZeroCountReport> {
    let section = super::section_from_config(cfg)?;
    let base = section.curve()?;
    if let Some(c) = &cfg.curve {
        if c.build()?.to_spec() != base.to_spec() {
            return Err(Error::Config("field `curve` differs from the section's curve".into()));
        }
    }
    let q = cfg
        .q
        .first()
        .copied()
        .or(cfg.p)
        .ok_or_else(|| Error::Config("field `q` (or `p`) is required".into()))?;
    let k = cfg.search_field()?;
    let e = base.to_spec().build_over(&k)?;
    let d = k.degree();
    let epsilon = cfg.epsilon.unwrap_or(0.0);

    let mut pts = vec![(PointSpec::Infinity("O".into()), HeightValue::zero())];
    let rec = search_small_points(&e, &k, &cfg.search_options())?;
    for sp in &rec.points {
        let h = if sp.torsion { HeightValue::zero() } else { sp.hhat };
        pts.push((sp.point.clone(), h));
    }
    for extra in &cfg.points {
        let pt = extra.build(&e)?;
        let seen = pts.iter().map(|(p, _)| p.build(&e)).collect::<Result<Vec<_>>>()?;
        if !seen.contains(&pt) {
            let tol = cfg.tolerance();
            let cert = crate::heights::is_torsion(&pt)?;
            let h = if cert.is_torsion { HeightValue::zero() } else { crate::heights::canonical_height(&pt, tol)? };
            pts.push((extra.clone(), h));
        }
    }

    let (_, n_q) = count_identity_places(&e.infinity(), q)?;
    let threshold = cfg.threshold.unwrap_or(n_q as f64 / d as f64);
    let mut candidates = Vec::new();
    for (spec, h) in pts {
        let pt = spec.build(&e)?;
        let (hits, _) = count_identity_places(&pt, q)?;
        let fraction = hits as f64 / d as f64;
        let residually_trivial = hits as f64 >= threshold * d as f64 - 1e-9;
        let small = h.exact_zero || h.value + h.error <= epsilon;
        let undecided = !small && h.value - h.error <= epsilon;
        candidates.push(ZeroCandidate {
            point: spec,
            hhat: Measured::height(&h),
            identity_places: hits,
            fraction,
            residually_trivial,
            small,
            undecided,
            in_s: residually_trivial && small,
        });
    }
    let s_count = candidates.iter().filter(|c| c.in_s).count();
    let lhs = s_count as u64 * section.tf_origin as u64;
    let rhs = (section.l as u64).pow(2);
    Ok(ZeroCountReport {
        curve: base.to_spec(),
        field: k.poly().iter().map(|c| c.to_string()).collect(),
        degree: d,
        q,
        n_q,
        epsilon,
        threshold,
        l: section.l,
        t0: section.t0,
        tf: section.tf_origin,
        candidates,
        s_count,
        lhs,
        rhs,
        violation: lhs > rhs,
    })
}

impl Tabular for ZeroCountReport {
    fn table(&self) -> Table {
        use Provenance::*;
        let mut t = Table::new(&[
            ("point", Exact),
            ("hhat", Enclosed),
            ("hhat_error", Enclosed),
            ("identity_places", Exact),
            ("fraction", Derived),
            ("residually_trivial", Exact),
            ("small", Enclosed),
            ("undecided", Enclosed),
            ("in_S", Enclosed),
        ]);
        for c in &self.candidates {
            t.push(vec![
                point_cell(&c.point),
                float_cell(c.hhat.value),
                float_cell(c.hhat.error),
                c.identity_places.to_string(),
                float_cell(c.fraction),
                c.residually_trivial.to_string(),
                c.small.to_string(),
                c.undecided.to_string(),
                c.in_s.to_string(),
            ]);
        }
        t
    }
}
