use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    FailsAsPredicted,
    Unexpected,
}

/// Outcome of one verification suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    #[serde(rename = "property")]
    pub property_id: String,
    pub verdict: Verdict,
    pub max_violation: f64,
    pub tolerance: f64,
    #[serde(rename = "witness")]
    pub worst_witness: serde_json::Value,
    pub seed: u64,
    /// Trials evaluated across all dims.
    pub samples: usize,
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl PropertyReport {
    pub fn is_unexpected(&self) -> bool {
        self.verdict == Verdict::Unexpected
    }
}

/// Per-property tolerance overrides, keyed by property id. The keys
/// `dpi_margin` and `fid_tol` override the shared margins.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tolerances {
    overrides: BTreeMap<String, f64>,
}

impl Tolerances {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `key` to `value`; the key must be a registered property id or a shared margin.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::Param(format!("tolerance for {key} must be finite and non-negative, got {value}")));
        }
        if !super::is_known_tolerance_key(key) {
            return Err(Error::UnknownProperty(key.to_string()));
        }
        self.overrides.insert(key.to_string(), value);
        Ok(())
    }

    /// Parses `KEY=VALUE`.
    pub fn set_from_str(&mut self, spec: &str) -> Result<()> {
        let (k, v) = spec.split_once('=').ok_or_else(|| Error::Param(format!("expected KEY=VALUE, got {spec:?}")))?;
        let value: f64 = v.trim().parse().map_err(|_| Error::Param(format!("not a number: {v:?}")))?;
        self.set(k.trim(), value)
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.overrides.get(key).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.overrides.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.overrides.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn dpi_margin(&self) -> f64 {
        self.get("dpi_margin").unwrap_or(super::DPI_MARGIN)
    }

    pub fn fid_tol(&self) -> f64 {
        self.get("fid_tol").unwrap_or(crate::fidelity::FID_TOL)
    }
}

/// Everything that determines a suite run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub property: String,
    pub dims: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    /// Parameter for the properties that take one (`dpi_monotone`, `second_fvg`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Tolerances::is_empty")]
    pub tolerances: Tolerances,
}

impl SuiteConfig {
    pub fn new(property: &str, dims: &[usize], samples: usize, seed: u64) -> Self {
        Self {
            property: property.to_string(),
            dims: dims.to_vec(),
            samples,
            seed,
            t: None,
            tolerances: Tolerances::new(),
        }
    }

    pub fn with_t(mut self, t: f64) -> Self {
        self.t = Some(t);
        self
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self
    }
}
