use std::collections::HashMap;

use serde::Serialize;

use super::{CertifyError, DescentCertificate};
use crate::digitmap::{DigitSystem, Natural};
use crate::dynamics::Cycle;

/// Index of an attractor within its atlas. Attractors are ordered by their
/// minimum member, so ids are stable for a given system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct AttractorId(pub u32);

/// All fixed points and cycles of one system, with the certificate proving
/// there are no others.
#[derive(Debug, Clone)]
pub struct AttractorAtlas {
    certificate: DescentCertificate,
    attractors: Vec<Cycle>,
    members: HashMap<Natural, AttractorId>,
    table: Option<Vec<u32>>,
}

impl PartialEq for AttractorAtlas {
    /// Equal certificates and attractors; the lookup table is a cache.
    fn eq(&self, other: &Self) -> bool {
        self.certificate == other.certificate && self.attractors == other.attractors
    }
}

impl Eq for AttractorAtlas {}

impl AttractorAtlas {
    /// Assemble an atlas, checking the structural invariants: every cycle is
    /// closed under the map, attractors are pairwise disjoint, and the table,
    /// if any, covers `[0, B]` with valid ids that agree on cycle members.
    pub fn from_parts(
        certificate: DescentCertificate,
        mut attractors: Vec<Cycle>,
        table: Option<Vec<u32>>,
    ) -> Result<Self, CertifyError> {
        let sys = certificate.system;
        attractors.sort_by(|a, b| a.min().cmp(b.min()));
        let mut members = HashMap::new();
        for (i, cycle) in attractors.iter().enumerate() {
            let id = AttractorId(i as u32);
            for (k, m) in cycle.members().iter().enumerate() {
                let next = &cycle.members()[(k + 1) % cycle.len()];
                if &sys.apply(m) != next {
                    return Err(CertifyError::InvalidAtlas(format!("f({m}) != {next}")));
                }
                if m > &certificate.brute_bound {
                    return Err(CertifyError::InvalidAtlas(format!(
                        "member {m} lies above the brute bound {}",
                        certificate.brute_bound
                    )));
                }
                if members.insert(m.clone(), id).is_some() {
                    return Err(CertifyError::InvalidAtlas(format!("{m} belongs to two attractors")));
                }
            }
            if cycle.members().iter().any(|m| m < cycle.min()) {
                return Err(CertifyError::InvalidAtlas(format!("cycle at {} is not canonical", cycle.min())));
            }
        }
        if let Some(t) = &table {
            let expected_len = certificate.brute_bound.to_u64().map(|b| b as usize + 1);
            if Some(t.len()) != expected_len {
                return Err(CertifyError::InvalidAtlas("classification table does not cover [0, B]".into()));
            }
            if let Some(bad) = t.iter().position(|&id| id as usize >= attractors.len()) {
                return Err(CertifyError::InvalidAtlas(format!("table entry {bad} has no attractor")));
            }
            for (m, id) in &members {
                let v = m.to_u64().expect("members are at most B");
                if t[v as usize] != id.0 {
                    return Err(CertifyError::InvalidAtlas(format!("table misclassifies cycle member {m}")));
                }
            }
        }
        Ok(AttractorAtlas { certificate, attractors, members, table })
    }

    pub fn system(&self) -> DigitSystem {
        self.certificate.system
    }

    pub fn certificate(&self) -> &DescentCertificate {
        &self.certificate
    }

    pub fn brute_bound(&self) -> &Natural {
        &self.certificate.brute_bound
    }

    /// Every attractor, fixed points included, ordered by minimum member.
    pub fn attractors(&self) -> &[Cycle] {
        &self.attractors
    }

    pub fn attractor(&self, id: AttractorId) -> &Cycle {
        &self.attractors[id.0 as usize]
    }

    pub fn fixed_points(&self) -> impl Iterator<Item = &Natural> {
        self.attractors.iter().filter(|c| c.is_fixed_point()).map(Cycle::min)
    }

    /// Cycles of length at least 2.
    pub fn cycles(&self) -> impl Iterator<Item = &Cycle> {
        self.attractors.iter().filter(|c| !c.is_fixed_point())
    }

    pub fn attractor_containing(&self, n: &Natural) -> Option<AttractorId> {
        self.members.get(n).copied()
    }

    /// Table lookup for `n ≤ B`, when the table is present.
    pub fn classification(&self, n: u64) -> Option<AttractorId> {
        let t = self.table.as_ref()?;
        usize::try_from(n).ok().and_then(|i| t.get(i)).map(|&id| AttractorId(id))
    }

    pub fn table_len(&self) -> Option<usize> {
        self.table.as_ref().map(Vec::len)
    }

    pub fn without_table(mut self) -> Self {
        self.table = None;
        self
    }

    /// A copy with one attractor deleted and no table. Such an atlas is
    /// incomplete and must fail verification; used to test exactly that.
    pub fn without_attractor(&self, id: AttractorId) -> Self {
        let mut attractors = self.attractors.clone();
        attractors.remove(id.0 as usize);
        AttractorAtlas::from_parts(self.certificate.clone(), attractors, None)
            .expect("a subset of a valid atlas is structurally valid")
    }
}
