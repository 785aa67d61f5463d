//! Config-driven experiments shared by the CLI and the examples.
//!
//! Each runner takes an [`ExperimentConfig`] and returns a serializable
//! report; [`write_report`] turns it into JSON or a CSV table with a JSON
//! metadata sidecar.

mod bound;
mod config;
mod multiplace;
mod psi;
mod report;
mod tools;
mod zerocount;

pub use bound::{classify, run_bound_experiment, AmplifiedPoint, BoundLevel, BoundReport, HeightClass, LevelError, CERTIFY_FACTOR};
pub use config::{AuxConfig, ExperimentConfig, SearchConfig, TowerBuild, CONFIG_SCHEMA, DEFAULT_PRECISION_BITS};
pub use multiplace::{run_multiplace_experiment, MultiplaceField, MultiplacePoint, MultiplaceReport};
pub use psi::{run_psi_report, PsiColumn, PsiReport};
pub use report::{coord_cell, float_cell, point_cell, to_json, write_report, Format, Measured, Provenance, ReportMeta, Table, Tabular};
pub use tools::{run_factor, run_height, run_search, run_verify_drop, DropCheck, DropCheckReport, FactorReport, FactorRow, HeightReport, HeightRow};
pub use zerocount::{run_zero_count, ZeroCandidate, ZeroCountReport};

use crate::auxiliary::{build_aux_section, choose_parameters, AuxSection};
use crate::error::{Error, Result};

/// The section named by `aux_file`, or one built from `aux`.
///
/// With `aux.T0` omitted, `T0` comes from the parameter calibration at
/// `aux.psi` (default 1) and the first entry of `q` (else `p`).
pub fn section_from_config(cfg: &ExperimentConfig) -> Result<AuxSection> {
    if let Some(path) = &cfg.aux_file {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("field `aux_file`: {path}: {e}")))?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        let f: AuxSection = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::Config(format!("{path}: field `{}`: {}", e.path(), e.inner())))?;
        if let Some(c) = &cfg.curve {
            if c.build()?.to_spec() != f.curve()?.to_spec() {
                return Err(Error::Config(format!("{path}: section curve differs from field `curve`")));
            }
        }
        return Ok(f);
    }
    let aux = cfg.aux.as_ref().ok_or_else(|| Error::Config("an `aux` or `aux_file` field is required".into()))?;
    let e = cfg.rational_curve()?;
    let t0 = match aux.t0 {
        Some(t) => t,
        None => {
            let q = cfg.q.first().copied().or(cfg.p).ok_or_else(|| {
                Error::Config("field `aux.T0` omitted: give `q` or `p` for the parameter choice".into())
            })?;
            choose_parameters(aux.psi.unwrap_or(1.0), q, aux.l)?.t0
        }
    };
    build_aux_section(&e, aux.n, aux.l, t0)
}
