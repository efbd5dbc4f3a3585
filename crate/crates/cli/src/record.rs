//! The atlas cache record: a canonical JSON rendering of an [`AttractorAtlas`].

use dsum_core::certify::{certified_bounds, AttractorAtlas, CertifyError, DescentCertificate};
use dsum_core::{canonicalize_cycle, DigitError, DigitSystem, DynamicsError, Natural};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const TOOL_VERSION: &str = concat!("dsum ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("malformed record: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid system: {0}")]
    System(#[from] DigitError),
    #[error("record certificate disagrees with recomputation: {0}")]
    Certificate(String),
    #[error("invalid cycle: {0}")]
    Cycle(#[from] DynamicsError),
    #[error(transparent)]
    Atlas(#[from] CertifyError),
}

/// Field order is alphabetical, fixed points ascend and cycles are sorted by
/// their first (minimum) member, so equal atlases serialize to equal bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtlasCacheRecord {
    pub base: u32,
    pub brute_bound: Natural,
    pub created_by: String,
    pub cycles: Vec<Vec<Natural>>,
    pub exponent: u32,
    pub fixed_points: Vec<Natural>,
    pub max_transient: u64,
    pub p0: u32,
}

impl AtlasCacheRecord {
    pub fn from_atlas(atlas: &AttractorAtlas) -> Self {
        let cert = atlas.certificate();
        AtlasCacheRecord {
            base: cert.system.base(),
            brute_bound: cert.brute_bound.clone(),
            created_by: TOOL_VERSION.to_string(),
            cycles: atlas.cycles().map(|c| c.members().to_vec()).collect(),
            exponent: cert.system.exponent(),
            fixed_points: atlas.fixed_points().cloned().collect(),
            max_transient: cert.max_transient,
            p0: cert.p0,
        }
    }

    pub fn system(&self) -> Result<DigitSystem, DigitError> {
        DigitSystem::new(self.base, self.exponent)
    }

    /// Rebuild the atlas, re-deriving `p0` and `B` and checking every cycle
    /// and fixed point against the map. The result has no classification
    /// table.
    pub fn to_atlas(&self) -> Result<AttractorAtlas, RecordError> {
        let sys = self.system()?;
        let (p0, bound) = certified_bounds(sys);
        if p0 != self.p0 || bound != self.brute_bound {
            return Err(RecordError::Certificate(format!(
                "expected p0 = {p0}, B = {bound}; found p0 = {}, B = {}",
                self.p0, self.brute_bound
            )));
        }
        let mut attractors = Vec::with_capacity(self.fixed_points.len() + self.cycles.len());
        for fp in &self.fixed_points {
            attractors.push(canonicalize_cycle(vec![fp.clone()], sys)?);
        }
        for members in &self.cycles {
            if members.len() < 2 {
                return Err(RecordError::Certificate("cycles must have length at least 2".into()));
            }
            let cycle = canonicalize_cycle(members.clone(), sys)?;
            if cycle.members() != members.as_slice() {
                return Err(RecordError::Certificate(format!("cycle at {} is not canonical", members[0])));
            }
            attractors.push(cycle);
        }
        let certificate = DescentCertificate {
            system: sys,
            p0,
            brute_bound: bound,
            max_transient: self.max_transient,
        };
        Ok(AttractorAtlas::from_parts(certificate, attractors, None)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, RecordError> {
        Ok(serde_json::from_str(s)?)
    }
}
