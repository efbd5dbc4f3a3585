//! Digit-power-sum dynamics and row/column grid sorting.
//!
//! * [`digitmap`]: base-`b` digits of arbitrary-precision naturals and the
//!   map `n ↦ Σ digitᵉ`.
//! * [`dynamics`]: orbits, cycle detection and classification.
//! * [`certify`]: the descent threshold, the forward-invariant brute bound
//!   and exhaustive enumeration into a complete [`AttractorAtlas`].
//! * [`gridsort`]: sorting rows then columns keeps rows sorted, with the
//!   two-row min/max merge and bubble passes that show why.

pub mod certify;
pub mod digitmap;
pub mod dynamics;
pub mod gridsort;

pub use certify::{
    brute_bound, certified_bounds, digit_reduction_threshold, enumerate_attractors, verify_range,
    AttractorAtlas, AttractorId, CertifyError, DescentCertificate, VerificationReport,
};
pub use digitmap::{
    digit_power_sum, from_digits, repunit, to_digits, DigitError, DigitSystem, DigitVector, Natural,
};
pub use dynamics::{
    canonicalize_cycle, classify, is_happy, step_until_repeat, Cycle, DynamicsError, Trajectory,
};
pub use gridsort::{
    bubble_column_sort, is_cols_sorted, is_rows_sorted, sort_cols, sort_rows, trace_bubble,
    two_row_minmax, Grid, GridError,
};
