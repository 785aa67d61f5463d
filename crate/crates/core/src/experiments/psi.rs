use serde::Serialize;

use crate::arith::numfield::rational_to_string;
use crate::error::{Error, Result};
use crate::splitting::psi_estimate;

use super::config::ExperimentConfig;
use super::report::{Provenance, Table, Tabular};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsiColumn {
    pub q: u64,
    /// `N_q(K_i)` per level.
    pub counts: Vec<u64>,
    /// `N_q(K_i)/[K_i:Q]` as exact fractions.
    pub ratios: Vec<String>,
    /// The last level's ratio; never extrapolated.
    pub last: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsiReport {
    pub degrees: Vec<usize>,
    pub columns: Vec<PsiColumn>,
}

/// Splitting ratios along the configured tower for each `q` in `cfg.q`.
pub fn run_psi_report(cfg: &ExperimentConfig) -> Result<PsiReport> {
    if cfg.q.is_empty() {
        return Err(Error::Config("field `q` must list at least one prime power".into()));
    }
    let tower = cfg.require_tower()?;
    let degrees = tower.degrees();
    let mut columns = Vec::new();
    for &q in &cfg.q {
        let est = psi_estimate(&tower, q).map_err(|e| match e {
            Error::Precondition(m) => Error::Config(format!("field `q`: {m}")),
            e => e,
        })?;
        let counts = est
            .ratios
            .iter()
            .zip(&degrees)
            .map(|(r, &d)| {
                let n = r * num_bigint::BigInt::from(d);
                num_traits::ToPrimitive::to_u64(n.numer()).expect("count fits u64")
            })
            .collect();
        columns.push(PsiColumn {
            q,
            counts,
            ratios: est.ratios.iter().map(rational_to_string).collect(),
            last: rational_to_string(&est.limit_guess),
        });
    }
    Ok(PsiReport { degrees, columns })
}

impl Tabular for PsiReport {
    fn table(&self) -> Table {
        let mut names = vec![("level".to_string(), Provenance::Exact), ("degree".to_string(), Provenance::Exact)];
        for c in &self.columns {
            names.push((format!("N_{}", c.q), Provenance::Exact));
            names.push((format!("ratio_{}", c.q), Provenance::Exact));
        }
        let mut t = Table { columns: names, rows: Vec::new() };
        for (i, d) in self.degrees.iter().enumerate() {
            let mut row = vec![i.to_string(), d.to_string()];
            for c in &self.columns {
                row.push(c.counts[i].to_string());
                row.push(c.ratios[i].clone());
            }
            t.push(row);
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::config::TowerBuild;
    use crate::splitting::TowerSpec;

    #[test]
    fn rationals_give_one_row() {
        let cfg = ExperimentConfig {
            tower: Some(TowerSpec { levels: vec![vec![0, 1]], witnesses: vec![] }),
            q: vec![5, 25],
            ..Default::default()
        };
        let r = run_psi_report(&cfg).unwrap();
        assert_eq!(r.table().to_csv(), "level,degree,N_5,ratio_5,N_25,ratio_25\n0,1,1,1,0,0\n");
    }

    #[test]
    fn padic_tower_columns() {
        let cfg = ExperimentConfig {
            tower_build: Some(TowerBuild { p: 5, degrees: vec![2, 4], budget: None }),
            q: vec![5, 25],
            ..Default::default()
        };
        let r = run_psi_report(&cfg).unwrap();
        assert_eq!(r.columns[0].ratios, vec!["1", "1", "1"]);
        assert_eq!(r.columns[1].ratios, vec!["0", "0", "0"]);
        assert_eq!(r.columns[0].counts, vec![1, 2, 4]);
    }

    #[test]
    fn config_errors() {
        let cfg = ExperimentConfig { q: vec![5], ..Default::default() };
        assert_eq!(run_psi_report(&cfg).unwrap_err().exit_code(), 2);
        let cfg = ExperimentConfig {
            tower: Some(TowerSpec { levels: vec![], witnesses: vec![] }),
            q: vec![5],
            ..Default::default()
        };
        assert_eq!(run_psi_report(&cfg).unwrap_err().exit_code(), 2);
        let cfg = ExperimentConfig { tower: Some(TowerSpec { levels: vec![vec![0, 1]], witnesses: vec![] }), q: vec![6], ..Default::default() };
        assert_eq!(run_psi_report(&cfg).unwrap_err().exit_code(), 2);
    }
}
