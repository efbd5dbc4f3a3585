//! Randomized and exhaustive checking of the grid sorting properties.
//!
//! Random grids come from ChaCha8 seeded with `seed` and switched to stream
//! `index`, so trial `index` can be regenerated alone from `(seed, index)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{bubble_column_sort_with, is_rows_sorted, sort_cols, sort_rows, Grid};

/// A property that failed on some grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Rows unsorted after sorting rows then columns.
    RowsUnsorted,
    /// Bubble column sort disagrees with a plain column sort.
    BubbleMismatch,
    PassCount { expected: usize, found: usize },
    /// After pass 1 the bottom row is not the columnwise maximum, or it
    /// changed during a later pass.
    LastRowNotFixed { pass: usize },
    /// A two-row merge of row-sorted rows produced an unsorted row.
    MergeBrokeRows { pass: usize, upper: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::RowsUnsorted => write!(f, "rows unsorted after row then column sort"),
            Violation::BubbleMismatch => write!(f, "bubble column sort differs from column sort"),
            Violation::PassCount { expected, found } => {
                write!(f, "expected {expected} bubble passes, got {found}")
            }
            Violation::LastRowNotFixed { pass } => write!(f, "last row not fixed at pass {pass}"),
            Violation::MergeBrokeRows { pass, upper } => {
                write!(f, "merge of rows {upper} and {} in pass {pass} unsorted a row", upper + 1)
            }
        }
    }
}

/// Bubble passes must match a column sort, take `n − 1` passes, and leave
/// the columnwise maxima in the last row from pass 1 on. With
/// `rows_sorted_input`, every merge must also keep both merged rows sorted.
fn check_bubble(g: &Grid, rows_sorted_input: bool) -> Result<(), Violation> {
    let maxima = g.column_max();
    let last = g.rows() - 1;
    let mut violation = None;
    let (out, passes) = bubble_column_sort_with(g, |step, snap| {
        if violation.is_some() {
            return;
        }
        if rows_sorted_input
            && !(super::is_nondecreasing(snap.row(step.upper))
                && super::is_nondecreasing(snap.row(step.upper + 1)))
        {
            violation = Some(Violation::MergeBrokeRows { pass: step.pass, upper: step.upper });
        }
        // Pass 1 ends with the merge touching the last row; from then on it must hold.
        let pass_one_done = step.pass > 1 || step.upper + 1 == last;
        if pass_one_done && snap.row(last) != maxima.as_slice() {
            violation = Some(Violation::LastRowNotFixed { pass: step.pass });
        }
    });
    if let Some(v) = violation {
        return Err(v);
    }
    if passes != g.rows() - 1 {
        return Err(Violation::PassCount { expected: g.rows() - 1, found: passes });
    }
    if out != sort_cols(g) {
        return Err(Violation::BubbleMismatch);
    }
    Ok(())
}

/// Check the main theorem and the bubble-pass properties on one grid, both on
/// the raw grid and on its row-sorted form.
pub fn check_grid(g: &Grid) -> Result<(), Violation> {
    let rows_sorted = sort_rows(g);
    if !is_rows_sorted(&sort_cols(&rows_sorted)) {
        return Err(Violation::RowsUnsorted);
    }
    check_bubble(g, false)?;
    check_bubble(&rows_sorted, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Fixed { rows: usize, cols: usize },
    /// Each trial draws its size uniformly from `1..=rows` × `1..=cols`.
    UpTo { rows: usize, cols: usize },
}

pub fn random_grid<R: Rng>(rng: &mut R, rows: usize, cols: usize, lo: i64, hi: i64) -> Grid {
    let data = (0..rows * cols).map(|_| rng.random_range(lo..=hi)).collect();
    Grid::new(rows, cols, data).expect("rows, cols ≥ 1")
}

/// Trial `index` of the stream for `seed`.
pub fn seeded_grid(seed: u64, index: u64, shape: Shape, lo: i64, hi: i64) -> Grid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let (rows, cols) = match shape {
        Shape::Fixed { rows, cols } => (rows, cols),
        Shape::UpTo { rows, cols } => (rng.random_range(1..=rows), rng.random_range(1..=cols)),
    };
    random_grid(&mut rng, rows, cols, lo, hi)
}

/// Every grid of the given shape with entries in `0..alphabet`, in
/// lexicographic order of the row-major entries.
pub fn exhaustive_grids(rows: usize, cols: usize, alphabet: i64) -> impl Iterator<Item = Grid> {
    let len = rows * cols;
    let mut next = (alphabet > 0 && len > 0).then(|| vec![0i64; len]);
    std::iter::from_fn(move || {
        let cur = next.take()?;
        let mut succ = cur.clone();
        for slot in succ.iter_mut().rev() {
            *slot += 1;
            if *slot < alphabet {
                next = Some(succ);
                break;
            }
            *slot = 0;
        }
        Some(Grid::new(rows, cols, cur).expect("nonempty shape"))
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub index: u64,
    pub grid: Grid,
    pub violation: Violation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridReport {
    pub checked: u64,
    pub counterexample: Option<Counterexample>,
}

impl GridReport {
    pub fn is_success(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn run(grids: impl Iterator<Item = Grid>) -> GridReport {
    let mut checked = 0;
    for (index, grid) in grids.enumerate() {
        checked += 1;
        if let Err(violation) = check_grid(&grid) {
            return GridReport {
                checked,
                counterexample: Some(Counterexample { index: index as u64, grid, violation }),
            };
        }
    }
    GridReport { checked, counterexample: None }
}

/// Stops at the first counterexample.
pub fn verify_random(shape: Shape, trials: u64, seed: u64, lo: i64, hi: i64) -> GridReport {
    run((0..trials).map(|i| seeded_grid(seed, i, shape, lo, hi)))
}

pub fn verify_exhaustive(rows: usize, cols: usize, alphabet: i64) -> GridReport {
    run(exhaustive_grids(rows, cols, alphabet))
}
