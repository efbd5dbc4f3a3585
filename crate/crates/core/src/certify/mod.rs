//! Machine-checked convergence for the digit-power-sum map.
//!
//! The argument runs in three stages for any [`DigitSystem`]:
//!
//! 1. Above the digit-reduction threshold `p0`, every `p`-digit number maps to
//!    one with fewer digits, because `(b−1)^e · p < b^(p−1)`.
//! 2. The range `[0, B]` with `B = max(b^(p0−1) − 1, (b−1)^e · (p0−1))` is
//!    forward invariant, so every orbit eventually stays inside it.
//! 3. Exhaustive iteration over `[0, B]` finds every fixed point and cycle.
//!
//! The result is an [`AttractorAtlas`] whose completeness has been checked
//! value by value.

mod atlas;
mod checks;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digitmap::{DigitSystem, Natural, WordMap};
use crate::dynamics::{canonicalize_cycle, DynamicsError};

pub use atlas::{AttractorAtlas, AttractorId};
pub use checks::{
    descent_scan, forward_invariance_scan, three_digit_identity_check,
    threshold_inequality_check, verify_range, Stage, VerificationFailure, VerificationReport,
};

/// Largest brute bound [`enumerate_attractors`] accepts. The flat table costs
/// eight bytes per value.
pub const MAX_BRUTE_BOUND: u64 = 1 << 25;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("brute bound {bound} for {system} exceeds the enumeration limit {limit}")]
    BoundTooLarge { system: DigitSystem, bound: Natural, limit: u64 },
    #[error("certification failed: orbit of {start} left [0, {bound}] at {escaped}")]
    Escaped { start: Natural, escaped: Natural, bound: Natural },
    #[error("atlas invariant violated: {0}")]
    InvalidAtlas(String),
    #[error("empty range [{lo}, {hi}]")]
    InvalidRange { lo: Natural, hi: Natural },
    #[error("p_max {p_max} is below the threshold {p0}")]
    PMaxBelowThreshold { p_max: u32, p0: u32 },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// The constants that make an atlas complete.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentCertificate {
    pub system: DigitSystem,
    /// Least digit count from which the map strictly shortens numbers.
    pub p0: u32,
    /// Inclusive upper end of the exhaustively checked range.
    pub brute_bound: Natural,
    /// Longest transient seen over `[0, brute_bound]`.
    pub max_transient: u64,
}

/// `(b−1)^e · p < b^(p−1)`, evaluated exactly.
pub fn threshold_holds(sys: DigitSystem, p: u32) -> bool {
    if p == 0 {
        return false;
    }
    sys.max_digit_power() * p < BigUint::from(sys.base()).pow(p - 1)
}

/// Least `p0 ≥ 2` such that `(b−1)^e · p < b^(p−1)` for every `p ≥ p0`.
///
/// Scans upward. At the first `p` where the inequality holds, the inductive
/// step is checked too: `(b−1)^e ≤ b^(p−1)` gives
/// `(b−1)^e·(p+1) < b^(p−1) + b^(p−1) ≤ b^p`, so the bound holds from there on.
pub fn digit_reduction_threshold(sys: DigitSystem) -> u32 {
    let step = sys.max_digit_power();
    let mut p = 2u32;
    loop {
        let power = BigUint::from(sys.base()).pow(p - 1);
        if &step * p < power {
            assert!(step <= power, "inductive step must hold at the threshold");
            return p;
        }
        p += 1;
    }
}

/// `B = max(b^(p0−1) − 1, (b−1)^e · (p0−1))`.
///
/// Numbers below `b^(p0−1)` have at most `p0 − 1` digits, so their images are
/// at most `(b−1)^e·(p0−1) ≤ B`. A number in `[b^(p0−1), B]` has `p ≥ p0`
/// digits and maps below `b^(p−1) ≤ n`. Hence `f([0, B]) ⊆ [0, B]`.
pub fn brute_bound(sys: DigitSystem, p0: u32) -> Natural {
    let short = BigUint::from(sys.base()).pow(p0 - 1) - BigUint::one();
    let image = sys.max_digit_power() * (p0 - 1);
    Natural::from(short.max(image))
}

/// `(p0, B)` without any enumeration.
pub fn certified_bounds(sys: DigitSystem) -> (u32, Natural) {
    let p0 = digit_reduction_threshold(sys);
    (p0, brute_bound(sys, p0))
}

const UNVISITED: u32 = u32::MAX;
const IN_PROGRESS: u32 = u32::MAX - 1;

/// Enumerate every attractor by iterating from each value in `[0, B]`.
///
/// Uses a flat table over `[0, B]` with three states per value: unvisited, on
/// the current path, or classified with its transient length. Meeting a value
/// on the current path closes a new cycle.
pub fn enumerate_attractors(sys: DigitSystem) -> Result<AttractorAtlas, CertifyError> {
    let (p0, bound) = certified_bounds(sys);
    let too_large = || CertifyError::BoundTooLarge {
        system: sys,
        bound: bound.clone(),
        limit: MAX_BRUTE_BOUND,
    };
    let b = bound.to_u64().filter(|&b| b <= MAX_BRUTE_BOUND).ok_or_else(too_large)?;
    let map = WordMap::new(sys).ok_or_else(too_large)?;
    let size = b as usize + 1;

    // state[v]: attractor id, UNVISITED or IN_PROGRESS.
    // depth[v]: transient length once classified, path position while in progress.
    let mut state = vec![UNVISITED; size];
    let mut depth = vec![0u32; size];
    let mut raw_cycles: Vec<Vec<u64>> = Vec::new();
    let mut path: Vec<u64> = Vec::new();
    let mut max_transient = 0u32;

    for start in 0..=b {
        if state[start as usize] != UNVISITED {
            continue;
        }
        path.clear();
        let mut x = start;
        let (id, base_depth) = loop {
            let slot = x as usize;
            match state[slot] {
                UNVISITED => {
                    state[slot] = IN_PROGRESS;
                    depth[slot] = path.len() as u32;
                    path.push(x);
                    let y = map.apply(x).ok_or_else(too_large)?;
                    if y > b {
                        return Err(CertifyError::Escaped {
                            start: start.into(),
                            escaped: y.into(),
                            bound: bound.clone(),
                        });
                    }
                    x = y;
                }
                IN_PROGRESS => {
                    let pos = depth[slot] as usize;
                    let id = raw_cycles.len() as u32;
                    for &m in &path[pos..] {
                        state[m as usize] = id;
                        depth[m as usize] = 0;
                    }
                    raw_cycles.push(path[pos..].to_vec());
                    path.truncate(pos);
                    break (id, 0);
                }
                id => break (id, depth[slot]),
            }
        };
        for (k, &v) in path.iter().rev().enumerate() {
            let d = base_depth + k as u32 + 1;
            state[v as usize] = id;
            depth[v as usize] = d;
            max_transient = max_transient.max(d);
        }
    }

    let mut cycles = raw_cycles
        .into_iter()
        .enumerate()
        .map(|(old, members)| {
            let raw = members.into_iter().map(Natural::from).collect();
            Ok((canonicalize_cycle(raw, sys)?, old))
        })
        .collect::<Result<Vec<_>, DynamicsError>>()?;
    cycles.sort_by(|a, b| a.0.min().cmp(b.0.min()));
    let mut remap = vec![0u32; cycles.len()];
    for (new, (_, old)) in cycles.iter().enumerate() {
        remap[*old] = new as u32;
    }
    let table = state.into_iter().map(|id| remap[id as usize]).collect();

    let certificate = DescentCertificate {
        system: sys,
        p0,
        brute_bound: bound,
        max_transient: u64::from(max_transient),
    };
    AttractorAtlas::from_parts(certificate, cycles.into_iter().map(|(c, _)| c).collect(), Some(table))
}
