//! Orbits of the digit-power-sum map, cycle canonicalization and
//! classification of start values against a certified atlas.

use std::collections::{HashMap, HashSet};

use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::certify::{certified_bounds, AttractorAtlas, AttractorId};
use crate::digitmap::{DigitSystem, Natural};

/// Lower clamp for the default step budget.
pub const MIN_DEFAULT_STEPS: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("no repeated value within {max_steps} steps")]
    BudgetExceeded { max_steps: u64, partial: Vec<Natural> },
    #[error("step budget must be at least 1")]
    ZeroBudget,
    #[error("a cycle needs at least one member")]
    EmptyCycle,
    #[error("cycle member {0} appears more than once")]
    RepeatedMember(Natural),
    #[error("cycle is not closed under the map: f({from}) = {image}, expected {expected}")]
    NotConsecutive { from: Natural, image: Natural, expected: Natural },
    #[error("atlas was certified for {atlas}, not {requested}")]
    SystemMismatch { atlas: DigitSystem, requested: DigitSystem },
}

/// A periodic orbit, stored in map order starting at its minimum member.
/// A fixed point is the cycle of length 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Cycle {
    members: Vec<Natural>,
}

impl Cycle {
    pub fn members(&self) -> &[Natural] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min(&self) -> &Natural {
        &self.members[0]
    }

    pub fn is_fixed_point(&self) -> bool {
        self.members.len() == 1
    }

    pub fn contains(&self, n: &Natural) -> bool {
        self.members.contains(n)
    }
}

/// Validate a raw cycle and rotate it to begin at its minimum.
///
/// `raw` must be nonempty, free of repeats, and satisfy
/// `f(raw[i]) = raw[i + 1]` with `f(last) = first`.
pub fn canonicalize_cycle(raw: Vec<Natural>, sys: DigitSystem) -> Result<Cycle, DynamicsError> {
    if raw.is_empty() {
        return Err(DynamicsError::EmptyCycle);
    }
    let mut seen = HashSet::with_capacity(raw.len());
    for m in &raw {
        if !seen.insert(m) {
            return Err(DynamicsError::RepeatedMember(m.clone()));
        }
    }
    for (i, m) in raw.iter().enumerate() {
        let expected = &raw[(i + 1) % raw.len()];
        let image = sys.apply(m);
        if &image != expected {
            return Err(DynamicsError::NotConsecutive {
                from: m.clone(),
                image,
                expected: expected.clone(),
            });
        }
    }
    let start = raw
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(b.1))
        .map(|(i, _)| i)
        .expect("nonempty");
    let mut members = raw;
    members.rotate_left(start);
    Ok(Cycle { members })
}

/// The orbit of a start value up to its first repeated value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trajectory {
    pub start: Natural,
    /// `steps[0] = start`, `steps[i + 1] = f(steps[i])`; the value that
    /// repeats is not pushed a second time.
    pub steps: Vec<Natural>,
    /// Index of the first step lying on the terminal cycle.
    pub entry_index: usize,
    pub terminal: Cycle,
}

impl Trajectory {
    pub fn transient_length(&self) -> usize {
        self.entry_index
    }
}

/// Default step budget: `10 × digits(n) + B`, at least [`MIN_DEFAULT_STEPS`].
pub fn default_max_steps(n: &Natural, sys: DigitSystem, brute_bound: &Natural) -> u64 {
    let digits = n.digit_count(sys) as u64;
    let bound = brute_bound.as_biguint().to_u64().unwrap_or(u64::MAX);
    digits.saturating_mul(10).saturating_add(bound).max(MIN_DEFAULT_STEPS)
}

/// [`default_max_steps`] with the brute bound derived from the system alone.
pub fn default_max_steps_for(n: &Natural, sys: DigitSystem) -> u64 {
    let (_, bound) = certified_bounds(sys);
    default_max_steps(n, sys, &bound)
}

/// Iterate the map from `n` until a value repeats, applying it at most
/// `max_steps` times.
pub fn step_until_repeat(
    n: &Natural,
    sys: DigitSystem,
    max_steps: u64,
) -> Result<Trajectory, DynamicsError> {
    if max_steps == 0 {
        return Err(DynamicsError::ZeroBudget);
    }
    let mut index: HashMap<Natural, usize> = HashMap::new();
    let mut steps = vec![n.clone()];
    index.insert(n.clone(), 0);
    let mut applied = 0u64;
    loop {
        if applied == max_steps {
            return Err(DynamicsError::BudgetExceeded { max_steps, partial: steps });
        }
        let next = sys.apply(steps.last().expect("nonempty"));
        applied += 1;
        if let Some(&entry_index) = index.get(&next) {
            let terminal = canonicalize_cycle(steps[entry_index..].to_vec(), sys)?;
            return Ok(Trajectory { start: n.clone(), steps, entry_index, terminal });
        }
        index.insert(next.clone(), steps.len());
        steps.push(next);
    }
}

/// Which attractor of `atlas` the orbit of `n` falls into.
pub fn classify(
    n: &Natural,
    sys: DigitSystem,
    atlas: &AttractorAtlas,
) -> Result<AttractorId, DynamicsError> {
    let budget = default_max_steps(n, sys, atlas.brute_bound());
    classify_within(n, sys, atlas, budget)
}

/// [`classify`] with an explicit step budget.
pub fn classify_within(
    n: &Natural,
    sys: DigitSystem,
    atlas: &AttractorAtlas,
    max_steps: u64,
) -> Result<AttractorId, DynamicsError> {
    if atlas.system() != sys {
        return Err(DynamicsError::SystemMismatch { atlas: atlas.system(), requested: sys });
    }
    let mut cur = n.clone();
    let mut partial = vec![];
    for _ in 0..=max_steps {
        if let Some(id) = atlas.attractor_containing(&cur) {
            return Ok(id);
        }
        // Certified table shortcut; values there are already classified.
        if let Some(id) = cur.to_u64().and_then(|v| atlas.classification(v)) {
            return Ok(id);
        }
        let next = sys.apply(&cur);
        partial.push(cur);
        cur = next;
    }
    Err(DynamicsError::BudgetExceeded { max_steps, partial })
}

/// True iff the orbit of `n` ends at the fixed point 1.
pub fn is_happy(n: &Natural, sys: DigitSystem, atlas: &AttractorAtlas) -> Result<bool, DynamicsError> {
    let id = classify(n, sys, atlas)?;
    Ok(atlas.attractor(id).members() == [Natural::one()])
}
