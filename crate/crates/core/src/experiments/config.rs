use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::numfield::{Field, NumberField, DEFAULT_PRECISION};
use crate::arith::poly;
use crate::elliptic::{CurveRef, CurveSpec, PointSpec};
use crate::error::{Error, Result};
use crate::heights::SearchOptions;
use crate::splitting::{build_totally_padic_tower, Tower, TowerSpec, DEFAULT_TOWER_BUDGET};

pub const CONFIG_SCHEMA: u32 = 1;

/// Requested working precision in bits when none is given.
pub const DEFAULT_PRECISION_BITS: u32 = 20;

/// One experiment's inputs. Every field except `schema` is optional at the
/// type level; each runner checks the ones it needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveSpec>,
    /// Field for a single search, as a defining polynomial (constant term first).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tower: Option<TowerSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tower_build: Option<TowerBuild>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub q: Vec<u64>,
    /// `X` in the primed sums over places of norm at most `X`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_cap: Option<f64>,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux: Option<AuxConfig>,
    /// A saved section to use instead of building one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux_file: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointSpec>,
    /// Replace each given point by `[#E(F_q)]P` before use.
    #[serde(default)]
    pub amplify: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Fraction of `[K:Q]` of norm-`q` places at which a point must reduce to `O`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Polynomial for `factor`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<Vec<i64>>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerBuild {
    pub p: u64,
    pub degrees: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub naive_cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hhat_cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuxConfig {
    #[serde(rename = "L")]
    pub l: u32,
    #[serde(rename = "N", default = "default_n")]
    pub n: u64,
    /// Omitted: chosen from `psi` and `q` by the parameter calibration.
    #[serde(rename = "T0", default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<f64>,
}

fn default_n() -> u64 {
    2
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            schema: CONFIG_SCHEMA,
            curve: None,
            field: None,
            tower: None,
            tower_build: None,
            fields: Vec::new(),
            p: None,
            q: Vec::new(),
            norm_cap: None,
            search: SearchConfig::default(),
            aux: None,
            aux_file: None,
            points: Vec::new(),
            amplify: false,
            epsilon: None,
            threshold: None,
            poly: None,
            seed: 0,
            precision: None,
        }
    }
}

fn config_error(what: impl std::fmt::Display) -> Error {
    Error::Config(what.to_string())
}

impl ExperimentConfig {
    /// Parses and validates JSON text; errors name the field, line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        // serde_json's message already ends with the line and column.
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de)
            .map_err(|e| config_error(format!("field `{}`: {}", e.path(), e.inner())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => config_error(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != CONFIG_SCHEMA {
            return Err(config_error(format!("field `schema`: expected {CONFIG_SCHEMA}, found {}", self.schema)));
        }
        let positive = |name: &str, v: Option<f64>| match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => Err(config_error(format!("field `{name}` must be positive"))),
            _ => Ok(()),
        };
        positive("search.naive_cap", self.search.naive_cap)?;
        positive("search.tol", self.search.tol)?;
        positive("norm_cap", self.norm_cap)?;
        if let Some(h) = self.search.hhat_cap {
            if !(h >= 0.0) {
                return Err(config_error("field `search.hhat_cap` must be non-negative"));
            }
        }
        if self.search.budget == Some(0) {
            return Err(config_error("field `search.budget` must be positive"));
        }
        if let Some(e) = self.epsilon {
            if !(e >= 0.0) {
                return Err(config_error("field `epsilon` must be non-negative"));
            }
        }
        if let Some(t) = self.threshold {
            if !(0.0..=1.0).contains(&t) {
                return Err(config_error("field `threshold` must lie in [0, 1]"));
            }
        }
        if let Some(b) = self.precision {
            if !(8..=4096).contains(&b) {
                return Err(config_error("field `precision` must lie in 8..=4096"));
            }
        }
        if self.tower.is_some() && self.tower_build.is_some() {
            return Err(config_error("fields `tower` and `tower_build` are exclusive"));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision.unwrap_or(DEFAULT_PRECISION_BITS)
    }

    /// Height tolerance: the explicit `search.tol`, else `2^-precision`.
    pub fn tolerance(&self) -> f64 {
        self.search.tol.unwrap_or_else(|| 2f64.powi(-(self.precision_bits() as i32)).max(1e-12))
    }

    pub fn search_options(&self) -> SearchOptions {
        let d = SearchOptions::default();
        SearchOptions {
            naive_cap: self.search.naive_cap.unwrap_or(d.naive_cap),
            hhat_cap: self.search.hhat_cap.unwrap_or(d.hhat_cap),
            budget: self.search.budget.unwrap_or(d.budget),
            tol: self.tolerance(),
        }
    }

    pub fn curve_spec(&self) -> Result<&CurveSpec> {
        self.curve.as_ref().ok_or_else(|| config_error("field `curve` is required"))
    }

    /// The curve over `Q`, rejecting curves given over larger fields.
    pub fn rational_curve(&self) -> Result<CurveRef> {
        let spec = self.curve_spec()?;
        if spec.field != [0, 1] {
            return Err(config_error("field `curve.field`: this experiment needs a curve over Q"));
        }
        spec.build().map_err(|e| config_error(format!("field `curve`: {e}")))
    }

    pub fn prime(&self) -> Result<u64> {
        self.p.ok_or_else(|| config_error("field `p` is required"))
    }

    pub fn norm_cap_value(&self) -> Result<f64> {
        self.norm_cap.ok_or_else(|| config_error("field `norm_cap` is required"))
    }

    pub fn search_field(&self) -> Result<Field> {
        match &self.field {
            None => Ok(NumberField::rationals()),
            Some(f) => NumberField::new(poly::zpoly(f), DEFAULT_PRECISION.max(self.precision_bits()))
                .map_err(|e| config_error(format!("field `field`: {e}"))),
        }
    }

    /// The configured tower: explicit, built from `tower_build` with this
    /// config's seed, or absent.
    pub fn tower(&self) -> Result<Option<Tower>> {
        if let Some(t) = &self.tower {
            return t.build().map(Some).map_err(|e| config_error(format!("field `tower`: {e}")));
        }
        if let Some(b) = &self.tower_build {
            return build_totally_padic_tower(b.p, &b.degrees, self.seed, b.budget.unwrap_or(DEFAULT_TOWER_BUDGET))
                .map(Some);
        }
        Ok(None)
    }

    pub fn require_tower(&self) -> Result<Tower> {
        self.tower()?.ok_or_else(|| config_error("a `tower` or `tower_build` field is required"))
    }

    /// `fields` if given, else the tower's levels, else `Q` alone.
    pub fn field_list(&self) -> Result<Vec<Field>> {
        if !self.fields.is_empty() {
            return self
                .fields
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    NumberField::new(poly::zpoly(f), DEFAULT_PRECISION)
                        .map_err(|e| config_error(format!("field `fields[{i}]`: {e}")))
                })
                .collect();
        }
        match self.tower()? {
            Some(t) => Ok(t.levels().to_vec()),
            None => Ok(vec![NumberField::rationals()]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_name_the_field() {
        let err = ExperimentConfig::from_json("{\n \"schema\": 1,\n \"search\": {\"naive_cap\": \"big\"}\n}").unwrap_err();
        let Error::Config(msg) = err else { panic!() };
        assert!(msg.contains("search.naive_cap") && msg.contains("line 3"), "{msg}");
        let err = ExperimentConfig::from_json("{\"schema\": 1, \"sed\": 3}").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = ExperimentConfig::from_json("{\"schema\": 2}").unwrap_err();
        assert!(err.to_string().contains("schema"));
        assert!(ExperimentConfig::from_json("{\"schema\": 1, \"search\": {\"tol\": -1}}").is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        let text = serde_json::to_string(&b).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), b);
    }
}
