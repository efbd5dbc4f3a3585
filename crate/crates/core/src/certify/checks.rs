//! Exhaustive verification stages. Each returns a [`VerificationReport`];
//! a failing value is reported, not raised, so callers can show it.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use super::{digit_reduction_threshold, threshold_holds, AttractorAtlas, CertifyError};
use crate::digitmap::{DigitSystem, Natural};
use crate::dynamics::{default_max_steps, DynamicsError};

/// Below this many values per task, rayon splitting is not worth it.
const MIN_CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Threshold,
    ForwardInvariance,
    Range,
    Descent,
    ThreeDigitIdentity,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Threshold => "threshold",
            Stage::ForwardInvariance => "forward-invariance",
            Stage::Range => "range",
            Stage::Descent => "descent",
            Stage::ThreeDigitIdentity => "three-digit-identity",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationFailure {
    pub n: Natural,
    pub reason: String,
}

/// Fields are declared in alphabetical order so serialized reports are
/// canonical.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub checked: u64,
    pub failure: Option<VerificationFailure>,
    pub hi: Natural,
    pub lo: Natural,
    pub max_transient: Option<u64>,
    /// Smallest `n − f(n)` seen, for descent stages.
    pub min_gap: Option<Natural>,
    pub stage: Stage,
}

impl VerificationReport {
    fn new(stage: Stage, lo: Natural, hi: Natural) -> Self {
        VerificationReport {
            checked: 0,
            failure: None,
            hi,
            lo,
            max_transient: None,
            min_gap: None,
            stage,
        }
    }

    pub fn is_success(&self) -> bool {
        self.failure.is_none()
    }
}

fn range_len(lo: &Natural, hi: &Natural) -> Result<u64, CertifyError> {
    if lo > hi {
        return Err(CertifyError::InvalidRange { lo: lo.clone(), hi: hi.clone() });
    }
    (hi.as_biguint() - lo.as_biguint() + 1u32)
        .to_u64()
        .filter(|&c| c < u64::MAX)
        .ok_or_else(|| CertifyError::InvalidRange { lo: lo.clone(), hi: hi.clone() })
}

/// Per-value outcome folded into a report. Reduction keeps the failure with
/// the smallest `n`, so the result does not depend on scheduling.
#[derive(Default)]
struct Tally {
    checked: u64,
    max_transient: u64,
    min_gap: Option<BigUint>,
    failure: Option<VerificationFailure>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.max_transient = self.max_transient.max(other.max_transient);
        self.min_gap = match (self.min_gap, other.min_gap) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.failure = match (self.failure, other.failure) {
            (Some(a), Some(b)) => Some(if a.n <= b.n { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }
}

fn scan<F>(lo: &Natural, count: u64, check: F) -> Tally
where
    F: Fn(Natural, &mut Tally) + Sync,
{
    let lo = lo.as_biguint();
    let count = usize::try_from(count).expect("range length fits in usize");
    (0..count)
        .into_par_iter()
        .with_min_len(MIN_CHUNK)
        .fold(Tally::default, |mut t, off| {
            t.checked += 1;
            check(Natural::from(lo + off), &mut t);
            t
        })
        .reduce(Tally::default, Tally::merge)
}

fn fail(t: &mut Tally, n: Natural, reason: String) {
    let keep = t.failure.as_ref().is_some_and(|f| f.n <= n);
    if !keep {
        t.failure = Some(VerificationFailure { n, reason });
    }
}

/// Iterate from every `n` in `[lo, hi]` until the orbit reaches an atlas
/// member. The classification table is not consulted.
pub fn verify_range(
    sys: DigitSystem,
    atlas: &AttractorAtlas,
    lo: &Natural,
    hi: &Natural,
) -> Result<VerificationReport, CertifyError> {
    if atlas.system() != sys {
        return Err(DynamicsError::SystemMismatch { atlas: atlas.system(), requested: sys }.into());
    }
    let count = range_len(lo, hi)?;
    let tally = scan(lo, count, |n, t| {
        let budget = default_max_steps(&n, sys, atlas.brute_bound());
        let mut seen = HashSet::new();
        let mut cur = n.clone();
        let mut steps = 0u64;
        loop {
            if atlas.attractor_containing(&cur).is_some() {
                t.max_transient = t.max_transient.max(steps);
                return;
            }
            if steps == budget {
                return fail(t, n, format!("no atlas member reached within {budget} steps"));
            }
            let next = sys.apply(&cur);
            if !seen.insert(cur) {
                return fail(t, n, "orbit closed a cycle missing from the atlas".into());
            }
            cur = next;
            steps += 1;
        }
    });
    let mut report = VerificationReport::new(Stage::Range, lo.clone(), hi.clone());
    report.checked = tally.checked;
    report.max_transient = Some(tally.max_transient);
    report.failure = tally.failure;
    Ok(report)
}

/// Check `f(n) ≤ bound` for every `n ≤ bound`.
pub fn forward_invariance_scan(sys: DigitSystem, bound: &Natural) -> Result<VerificationReport, CertifyError> {
    let lo = Natural::zero();
    let count = range_len(&lo, bound)?;
    let tally = scan(&lo, count, |n, t| {
        let image = sys.apply(&n);
        if &image > bound {
            fail(t, n, format!("image {image} exceeds {bound}"));
        }
    });
    let mut report = VerificationReport::new(Stage::ForwardInvariance, lo, bound.clone());
    report.checked = tally.checked;
    report.failure = tally.failure;
    Ok(report)
}

/// Check `f(n) ≤ n − 1` for every `n` in `[lo, hi]`, recording the least
/// `n − f(n)`.
pub fn descent_scan(sys: DigitSystem, lo: &Natural, hi: &Natural) -> Result<VerificationReport, CertifyError> {
    let count = range_len(lo, hi)?;
    let tally = scan(lo, count, |n, t| {
        let image = sys.apply(&n);
        if image >= n {
            return fail(t, n, format!("f(n) = {image} is not below n"));
        }
        let gap = n.as_biguint() - image.as_biguint();
        t.min_gap = Some(match t.min_gap.take() {
            Some(g) => g.min(gap),
            None => gap,
        });
    });
    let mut report = VerificationReport::new(Stage::Descent, lo.clone(), hi.clone());
    report.checked = tally.checked;
    report.min_gap = tally.min_gap.map(Natural::from);
    report.failure = tally.failure;
    Ok(report)
}

/// For every three-digit `n = 100a + 10b + c` under decimal squares, check
/// `n − f(n) = a(100 − a) + b(10 − b) + c − c²` together with the bounds
/// `a(100 − a) ≥ 99`, `b(10 − b) ≥ 0` and `99 + c − c² ≥ 18`, which give
/// `f(n) ≤ n − 1`.
pub fn three_digit_identity_check() -> VerificationReport {
    let sys = DigitSystem::decimal_squares();
    let mut report = VerificationReport::new(Stage::ThreeDigitIdentity, 100u64.into(), 999u64.into());
    let mut min_gap = i64::MAX;
    for a in 1..=9i64 {
        for b in 0..=9i64 {
            for c in 0..=9i64 {
                let n = 100 * a + 10 * b + c;
                report.checked += 1;
                let image = sys.apply(&Natural::from(n as u64)).to_u64().expect("small") as i64;
                let gap = n - image;
                let lead = a * (100 - a);
                let middle = b * (10 - b);
                let reason = if gap != lead + middle + c - c * c {
                    Some(format!("identity fails: n − f(n) = {gap}"))
                } else if lead < 99 {
                    Some(format!("a(100 − a) = {lead} < 99"))
                } else if middle < 0 {
                    Some(format!("b(10 − b) = {middle} < 0"))
                } else if 99 + c - c * c < 18 || gap < 18 {
                    Some(format!("n − f(n) = {gap} below 18"))
                } else {
                    None
                };
                if let Some(reason) = reason {
                    report.failure.get_or_insert(VerificationFailure { n: Natural::from(n as u64), reason });
                }
                min_gap = min_gap.min(gap);
            }
        }
    }
    report.min_gap = Some(Natural::from(min_gap.max(0) as u64));
    report
}

/// Check `(b−1)^e · p < b^(p−1)` for each `p` in `[p0, p_max]` and that it
/// fails at `p0 − 1` (minimality), unless `p0 = 2`.
pub fn threshold_inequality_check(sys: DigitSystem, p_max: u32) -> Result<VerificationReport, CertifyError> {
    let p0 = digit_reduction_threshold(sys);
    if p_max < p0 {
        return Err(CertifyError::PMaxBelowThreshold { p_max, p0 });
    }
    let mut report =
        VerificationReport::new(Stage::Threshold, Natural::from(p0), Natural::from(p_max));
    if p0 > 2 && threshold_holds(sys, p0 - 1) {
        report.failure = Some(VerificationFailure {
            n: Natural::from(p0 - 1),
            reason: "inequality already holds below the threshold".into(),
        });
    }
    for p in p0..=p_max {
        report.checked += 1;
        if !threshold_holds(sys, p) && report.failure.is_none() {
            report.failure = Some(VerificationFailure {
                n: Natural::from(p),
                reason: format!("(b−1)^e · {p} ≥ b^{}", p - 1),
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{enumerate_attractors, AttractorId};

    fn n(v: u64) -> Natural {
        Natural::from(v)
    }

    #[test]
    fn verify_small_ranges() {
        let dec = DigitSystem::decimal_squares();
        let atlas = enumerate_attractors(dec).unwrap();
        let r = verify_range(dec, &atlas, &n(0), &n(99)).unwrap();
        assert!(r.is_success());
        assert_eq!(r.checked, 100);
        let r = verify_range(dec, &atlas, &n(0), &n(0)).unwrap();
        assert!(r.is_success());
        assert_eq!(r.checked, 1);
        assert_eq!(r.max_transient, Some(0));
        let r = verify_range(dec, &atlas, &n(100), &n(999)).unwrap();
        assert!(r.is_success());
        assert_eq!(r.checked, 900);
        let r = verify_range(dec, &atlas, &n(0), &n(999)).unwrap();
        assert_eq!(r.max_transient, Some(atlas.certificate().max_transient));
    }

    #[test]
    fn verify_rejects_bad_arguments() {
        let dec = DigitSystem::decimal_squares();
        let atlas = enumerate_attractors(dec).unwrap();
        assert!(matches!(verify_range(dec, &atlas, &n(5), &n(4)), Err(CertifyError::InvalidRange { .. })));
        let cubes = DigitSystem::new(10, 3).unwrap();
        assert!(matches!(verify_range(cubes, &atlas, &n(0), &n(4)), Err(CertifyError::Dynamics(_))));
    }

    #[test]
    fn truncated_atlas_fails() {
        let dec = DigitSystem::decimal_squares();
        let atlas = enumerate_attractors(dec).unwrap();
        for i in 0..atlas.attractors().len() {
            let id = AttractorId(i as u32);
            let min = atlas.attractor(id).min().clone();
            let broken = atlas.without_attractor(id);
            let r = verify_range(dec, &broken, &n(0), &n(999)).unwrap();
            let failure = r.failure.expect("incomplete atlas must fail");
            // the smallest value reaching the removed attractor is reported
            let first = (0..=999u64)
                .find(|&v| atlas.classification(v) == Some(id))
                .unwrap();
            assert_eq!(failure.n, n(first), "removed attractor at {min}");
        }
    }

    #[test]
    fn forward_invariance() {
        let dec = DigitSystem::decimal_squares();
        assert!(forward_invariance_scan(dec, &n(999)).unwrap().is_success());
        let cubes = DigitSystem::new(10, 3).unwrap();
        assert!(forward_invariance_scan(cubes, &n(9999)).unwrap().is_success());
        // 2187 is not invariant for cubes: f(1999) = 2188
        let r = forward_invariance_scan(cubes, &n(2187)).unwrap();
        assert_eq!(r.failure.unwrap().n, n(1999));
    }

    #[test]
    fn descent_on_three_digits() {
        let dec = DigitSystem::decimal_squares();
        let r = descent_scan(dec, &n(100), &n(999)).unwrap();
        assert!(r.is_success());
        assert_eq!(r.checked, 900);
        // exhaustive scan: minimum of n − f(n) is 27, at n = 109
        assert_eq!(r.min_gap, Some(n(27)));
        let r = descent_scan(dec, &n(1), &n(99)).unwrap();
        assert_eq!(r.failure.unwrap().n, n(1));
    }

    #[test]
    fn three_digit_identity() {
        let r = three_digit_identity_check();
        assert!(r.is_success(), "{:?}", r.failure);
        assert_eq!(r.checked, 900);
        assert_eq!(r.min_gap, Some(n(27)));
        // direct evaluations
        let dec = DigitSystem::decimal_squares();
        assert_eq!(100 - dec.apply(&n(100)).to_u64().unwrap(), 99);
        assert_eq!(999 - dec.apply(&n(999)).to_u64().unwrap(), 756);
        assert_eq!(9 * 91 + 9 + 9 - 81, 756);
    }

    #[test]
    fn threshold_checks() {
        let dec = DigitSystem::decimal_squares();
        let r = threshold_inequality_check(dec, 100).unwrap();
        assert!(r.is_success());
        assert_eq!(r.checked, 97);
        assert_eq!(r.lo, n(4));
        assert!(threshold_inequality_check(DigitSystem::new(2, 1).unwrap(), 64).unwrap().is_success());
        assert_eq!(
            threshold_inequality_check(dec, 3),
            Err(CertifyError::PMaxBelowThreshold { p_max: 3, p0: 4 })
        );
    }

    #[test]
    fn reports_are_independent_of_worker_count() {
        let cubes = DigitSystem::new(10, 3).unwrap();
        let atlas = enumerate_attractors(cubes).unwrap();
        let broken = atlas.without_attractor(AttractorId(4));
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                (
                    verify_range(cubes, &atlas, &n(0), &n(9999)).unwrap(),
                    verify_range(cubes, &broken, &n(0), &n(9999)).unwrap(),
                    descent_scan(cubes, &n(10_000), &n(20_000)).unwrap(),
                )
            })
        };
        let one = run(1);
        assert!(one.0.is_success());
        assert!(!one.1.is_success());
        assert_eq!(one, run(4));
        assert_eq!(one, run(7));
    }
}
