use rayon::prelude::*;
use serde::Serialize;

use crate::arith::numfield::rational_to_string;
use crate::arith::PrimeIdeal;
use crate::elliptic::{amplify, reduce_point, CurveSpec, PointSpec};
use crate::error::{Error, Result};
use crate::heights::{search_small_points, HeightValue, SearchedPoint};
use crate::splitting::dedekind_factor;

use super::config::ExperimentConfig;
use super::report::{float_cell, opt_cell, point_cell, Measured, Provenance, Table, Tabular};

/// Nonzero heights must exceed their error by this factor.
pub const CERTIFY_FACTOR: f64 = 10.0;

/// How a searched point was classified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HeightClass {
    Torsion,
    Nonzero,
    Undecided,
}

pub fn classify(p: &SearchedPoint) -> HeightClass {
    if p.torsion || p.hhat.exact_zero {
        HeightClass::Torsion
    } else if p.hhat.is_certified_nonzero(CERTIFY_FACTOR) {
        HeightClass::Nonzero
    } else {
        HeightClass::Undecided
    }
}

/// A failure kept in the report instead of aborting the run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelError {
    pub message: String,
    pub exit_code: i32,
}

impl From<&Error> for LevelError {
    fn from(e: &Error) -> Self {
        LevelError { message: e.to_string(), exit_code: e.exit_code() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmplifiedPoint {
    pub place: String,
    /// `m = #E(F_q)`.
    pub m: u64,
    pub reduces_to_identity: bool,
    /// `m² ĥ(P)`.
    pub hhat: Measured,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundLevel {
    pub level: usize,
    pub degree: usize,
    /// `N_p(K_i)`.
    pub n_p: usize,
    pub psi_ratio: String,
    pub points: usize,
    pub torsion: usize,
    pub undecided: Vec<PointSpec>,
    pub min_nonzero_hhat: Option<Measured>,
    pub min_point: Option<PointSpec>,
    pub amplified: Vec<AmplifiedPoint>,
    pub error: Option<LevelError>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub curve: CurveSpec,
    pub p: u64,
    /// Last level's exact `N_p/[K:Q]`.
    pub psi_p: String,
    /// `ψ_p log p / p²`.
    pub epsilon_shape: Measured,
    pub levels: Vec<BoundLevel>,
    pub min_nonzero_hhat: Option<Measured>,
    /// `(level, point)` attaining the minimum.
    pub min_point: Option<(usize, PointSpec)>,
    /// `min ĥ / epsilon_shape`, present only when both are certified.
    pub ratio: Option<Measured>,
    pub torsion_count: usize,
    pub undecided_count: usize,
}

impl BoundReport {
    /// The first per-level failure, if any.
    pub fn first_error(&self) -> Option<&LevelError> {
        self.levels.iter().find_map(|l| l.error.as_ref())
    }
}

fn run_level(cfg: &ExperimentConfig, spec: &CurveSpec, p: u64, level: usize, k: &crate::arith::Field) -> BoundLevel {
    let mut out = BoundLevel {
        level,
        degree: k.degree(),
        n_p: 0,
        psi_ratio: String::new(),
        points: 0,
        torsion: 0,
        undecided: Vec::new(),
        min_nonzero_hhat: None,
        min_point: None,
        amplified: Vec::new(),
        error: None,
    };
    let run = |out: &mut BoundLevel| -> Result<()> {
        let places: Vec<PrimeIdeal> =
            dedekind_factor(k, p)?.into_iter().filter(|w| w.residue_degree == 1).collect();
        out.n_p = places.len();
        out.psi_ratio = rational_to_string(&crate::arith::integer::rat(places.len() as i64, k.degree() as i64));
        let e = spec.build_over(k)?;
        let rec = search_small_points(&e, k, &cfg.search_options())?;
        out.points = rec.points.len();
        let mut best: Option<&SearchedPoint> = None;
        for sp in &rec.points {
            match classify(sp) {
                HeightClass::Torsion => out.torsion += 1,
                HeightClass::Undecided => out.undecided.push(sp.point.clone()),
                HeightClass::Nonzero => {
                    if best.map_or(true, |b| sp.hhat.value < b.hhat.value) {
                        best = Some(sp);
                    }
                }
            }
        }
        let Some(best) = best else { return Ok(()) };
        out.min_nonzero_hhat = Some(Measured::height(&best.hhat));
        out.min_point = Some(best.point.clone());
        let pt = best.point.build(&e)?;
        for w in &places {
            let (m, q) = amplify(&pt, w)?;
            let h: HeightValue = best.hhat;
            let m2 = (m as f64) * (m as f64);
            out.amplified.push(AmplifiedPoint {
                place: w.to_string(),
                m,
                reduces_to_identity: reduce_point(&q, w)?.is_identity(),
                hhat: Measured { value: m2 * h.value, error: m2 * h.error, provenance: Provenance::Enclosed },
            });
        }
        Ok(())
    };
    if let Err(e) = run(&mut out) {
        out.error = Some(LevelError::from(&e));
    }
    out
}

/// Searches each tower level for small points, amplifies the smallest
/// certified nonzero point at every place of norm `p`, and compares the
/// minimum height with `ψ_p log p / p²`.
pub fn run_bound_experiment(cfg: &ExperimentConfig) -> Result<BoundReport> {
    let e = cfg.rational_curve()?;
    let p = cfg.prime()?;
    if !crate::arith::integer::is_prime_u64(p) {
        return Err(Error::Config(format!("field `p`: {p} is not prime")));
    }
    if !e.is_good(p) {
        return Err(Error::BadPrime(p));
    }
    let tower = cfg.require_tower()?;
    let spec = e.to_spec();
    let levels: Vec<BoundLevel> = tower
        .levels()
        .par_iter()
        .enumerate()
        .map(|(i, k)| run_level(cfg, &spec, p, i, k))
        .collect();

    let last = tower.levels().last().expect("towers are nonempty");
    let n_last = match &levels.last().expect("nonempty").error {
        None => levels.last().unwrap().n_p,
        Some(_) => dedekind_factor(last, p)?.iter().filter(|w| w.residue_degree == 1).count(),
    };
    let psi = crate::arith::integer::rat(n_last as i64, last.degree() as i64);
    let psi_f = n_last as f64 / last.degree() as f64;
    let pf = p as f64;
    let epsilon_shape = Measured::derived(psi_f * pf.ln() / (pf * pf));

    let mut min: Option<(usize, Measured, PointSpec)> = None;
    for l in &levels {
        if let (Some(h), Some(pt)) = (l.min_nonzero_hhat, &l.min_point) {
            if min.as_ref().map_or(true, |(_, m, _)| h.value < m.value) {
                min = Some((l.level, h, pt.clone()));
            }
        }
    }
    let ratio = min.as_ref().and_then(|(_, h, _)| if epsilon_shape.value > 0.0 { h.ratio(&epsilon_shape) } else { None });
    Ok(BoundReport {
        curve: spec,
        p,
        psi_p: rational_to_string(&psi),
        epsilon_shape,
        torsion_count: levels.iter().map(|l| l.torsion).sum(),
        undecided_count: levels.iter().map(|l| l.undecided.len()).sum(),
        min_nonzero_hhat: min.as_ref().map(|m| m.1),
        min_point: min.map(|(l, _, p)| (l, p)),
        ratio,
        levels,
    })
}

impl Tabular for BoundReport {
    fn table(&self) -> Table {
        use Provenance::*;
        let mut t = Table::new(&[
            ("level", Exact),
            ("degree", Exact),
            ("N_p", Exact),
            ("psi_ratio", Exact),
            ("points", Exact),
            ("torsion", Exact),
            ("undecided", Exact),
            ("min_nonzero_hhat", Enclosed),
            ("hhat_error", Enclosed),
            ("min_point", Exact),
            ("amplified_m", Exact),
            ("amplified_to_identity", Exact),
            ("amplified_hhat", Enclosed),
            ("epsilon_shape", Derived),
            ("ratio", Enclosed),
            ("error", Exact),
        ]);
        for l in &self.levels {
            let ratio = l
                .min_nonzero_hhat
                .and_then(|h| if self.epsilon_shape.value > 0.0 { h.ratio(&self.epsilon_shape) } else { None });
            let amp = l.amplified.first();
            t.push(vec![
                l.level.to_string(),
                l.degree.to_string(),
                l.n_p.to_string(),
                l.psi_ratio.clone(),
                l.points.to_string(),
                l.torsion.to_string(),
                l.undecided.len().to_string(),
                opt_cell(l.min_nonzero_hhat, |h| float_cell(h.value)),
                opt_cell(l.min_nonzero_hhat, |h| float_cell(h.error)),
                opt_cell(l.min_point.as_ref(), point_cell),
                opt_cell(amp, |a| a.m.to_string()),
                if l.amplified.is_empty() {
                    String::new()
                } else {
                    l.amplified.iter().all(|a| a.reduces_to_identity).to_string()
                },
                opt_cell(amp, |a| float_cell(a.hhat.value)),
                float_cell(self.epsilon_shape.value),
                opt_cell(ratio, |r| float_cell(r.value)),
                opt_cell(l.error.as_ref(), |e| e.message.clone()),
            ]);
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::CoordSpec;
    use crate::experiments::config::{SearchConfig, TowerBuild};

    fn mordell() -> CurveSpec {
        CurveSpec { field: vec![0, 1], a: CoordSpec::Int(0), b: CoordSpec::Int(-2) }
    }

    #[test]
    fn rational_level_only() {
        let cfg = ExperimentConfig {
            curve: Some(mordell()),
            p: Some(7),
            tower: Some(crate::splitting::TowerSpec { levels: vec![vec![0, 1]], witnesses: vec![] }),
            search: SearchConfig { naive_cap: Some(10f64.ln()), hhat_cap: Some(3.0), budget: None, tol: Some(1e-7) },
            ..Default::default()
        };
        let r = run_bound_experiment(&cfg).unwrap();
        assert!(r.first_error().is_none());
        let h = r.min_nonzero_hhat.unwrap();
        assert!(h.value > 10.0 * h.error && h.value > 0.0);
        assert_eq!(r.psi_p, "1");
        assert!(r.ratio.unwrap().value > 0.0);
        let amp = &r.levels[0].amplified[0];
        assert_eq!(amp.m, 7);
        assert!(amp.reduces_to_identity);
    }

    #[test]
    fn bad_prime_and_missing_tower() {
        let mut cfg = ExperimentConfig { curve: Some(mordell()), p: Some(2), ..Default::default() };
        assert_eq!(run_bound_experiment(&cfg).unwrap_err(), Error::BadPrime(2));
        cfg.p = Some(7);
        assert_eq!(run_bound_experiment(&cfg).unwrap_err().exit_code(), 2);
        cfg.tower = Some(crate::splitting::TowerSpec { levels: vec![], witnesses: vec![] });
        assert_eq!(run_bound_experiment(&cfg).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn over_capped_level_keeps_partial_results() {
        let cfg = ExperimentConfig {
            curve: Some(mordell()),
            p: Some(7),
            tower_build: Some(TowerBuild { p: 7, degrees: vec![2], budget: None }),
            search: SearchConfig { naive_cap: Some(10f64.ln()), hhat_cap: Some(3.0), budget: Some(300), tol: Some(1e-6) },
            ..Default::default()
        };
        let r = run_bound_experiment(&cfg).unwrap();
        assert!(r.levels[0].error.is_none());
        assert_eq!(r.levels[1].error.as_ref().unwrap().exit_code, 4);
        assert!(r.min_nonzero_hhat.is_some());
        assert_eq!(r.first_error().unwrap().exit_code, 4);
    }
}
