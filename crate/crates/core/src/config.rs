//! Versioned JSON configuration documents.
//!
//! A document describes one medium and, optionally, a sweep over it. Every
//! canned scenario converts to a document and back without loss.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{default_delta1_grid, two_photon_resonance, Observable, Scenario, Sweep};
use crate::model::{
    derive_coherence_rates, CoherenceRates, DecayConfig, DopplerConfig, FieldConfig, GeometryConfig, SystemParams,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Decay block; omitted collisional rates follow the default collision
/// model (γ₁₂p = γ₂₃p = p, γ₁₃p = 2p).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayInput {
    pub gamma1: f64,
    pub gamma2: f64,
    #[serde(default)]
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma12p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma23p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma13p: Option<f64>,
}

impl DecayInput {
    pub fn resolve(&self) -> DecayConfig {
        let mut d = DecayConfig::with_collisions(self.gamma1, self.gamma2, self.p);
        if let Some(v) = self.gamma12p {
            d.gamma12p = v;
        }
        if let Some(v) = self.gamma23p {
            d.gamma23p = v;
        }
        if let Some(v) = self.gamma13p {
            d.gamma13p = v;
        }
        d
    }
}

impl From<DecayConfig> for DecayInput {
    fn from(d: DecayConfig) -> Self {
        Self {
            gamma1: d.gamma1,
            gamma2: d.gamma2,
            p: d.p,
            gamma12p: Some(d.gamma12p),
            gamma23p: Some(d.gamma23p),
            gamma13p: Some(d.gamma13p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub decay: DecayInput,
    /// Explicit total coherence rates, replacing the ones derived from `decay`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherence: Option<CoherenceRates>,
    pub field: FieldConfig,
    pub geometry: GeometryConfig,
    pub doppler: DopplerConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<Observable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_location: Option<f64>,
    #[serde(default)]
    pub omega: f64,
}

impl ConfigDocument {
    pub fn params(&self) -> Result<SystemParams> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        let decay = self.decay.resolve();
        match self.coherence {
            Some(c) => SystemParams::with_coherence(decay, c, self.field, self.geometry, self.doppler),
            None => SystemParams::new(decay, self.field, self.geometry, self.doppler),
        }
    }

    pub fn to_scenario(&self) -> Result<Scenario> {
        let params = self.params()?;
        let scenario = Scenario {
            name: self.name.clone().unwrap_or_else(|| "custom".into()),
            expected_location: self.expected_location.unwrap_or_else(|| two_photon_resonance(&params)),
            params,
            sweep: self.sweep.clone().unwrap_or(Sweep::Delta1 {
                grid: default_delta1_grid(),
            }),
            observable: self.observable.unwrap_or(Observable::V12),
            omega: self.omega,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn from_scenario(s: &Scenario) -> Self {
        let derived = derive_coherence_rates(&s.params.decay).ok();
        Self {
            schema_version: SCHEMA_VERSION,
            name: Some(s.name.clone()),
            decay: s.params.decay.into(),
            coherence: (derived != Some(s.params.coherence)).then_some(s.params.coherence),
            field: s.params.field,
            geometry: s.params.geometry,
            doppler: s.params.doppler,
            sweep: Some(s.sweep.clone()),
            observable: Some(s.observable),
            expected_location: Some(s.expected_location),
            omega: s.omega,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config documents always serialize")
    }
}

/// Parses a document, reporting the field path and position of any error.
pub fn parse_config(text: &str) -> Result<ConfigDocument> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: ConfigDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Config(format!(
            "line {} column {}: `{}`: {}",
            inner.line(),
            inner.column(),
            path,
            inner
        ))
    })?;
    Ok(doc)
}

pub fn load_config(path: &Path) -> Result<ConfigDocument> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}
