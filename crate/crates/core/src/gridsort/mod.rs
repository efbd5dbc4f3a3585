//! Row and column sorting of integer grids.
//!
//! If every row of a grid is sorted and the columns are then sorted, the rows
//! stay sorted. For two rows this is the elementwise min/max merge: when both
//! inputs are nondecreasing, so are their pointwise minimum and maximum. For
//! `n` rows, column sorting can be carried out as `n − 1` bubble passes of
//! such merges over adjacent row pairs. Each merge preserves row order, and
//! pass `k` freezes row `n − k + 1`.
//!
//! Rows are numbered top to bottom and columns are sorted ascending
//! downward. "Sorted" always means nondecreasing.

mod text;
mod verify;

use thiserror::Error;

pub use text::{format_grid, parse_grid, GridParseError, ParseErrorKind};
pub use verify::{
    check_grid, exhaustive_grids, random_grid, seeded_grid, verify_exhaustive, verify_random,
    Counterexample, GridReport, Shape, Violation,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("a grid needs at least one row and one column, got {rows}×{cols}")]
    Empty { rows: usize, cols: usize },
    #[error("{rows}×{cols} grid needs {} entries, got {len}", rows * cols)]
    ShapeMismatch { rows: usize, cols: usize, len: usize },
    #[error("row {row} has {len} entries, expected {expected}")]
    Ragged { row: usize, len: usize, expected: usize },
    #[error("rows have different lengths: {top} and {bottom}")]
    LengthMismatch { top: usize, bottom: usize },
}

/// An `n × p` matrix of integers, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl Grid {
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self, GridError> {
        if rows == 0 || cols == 0 {
            return Err(GridError::Empty { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(GridError::ShapeMismatch { rows, cols, len: data.len() });
        }
        Ok(Grid { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self, GridError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(GridError::Ragged { row: i, len: r.len(), expected: cols });
            }
            data.extend_from_slice(r);
        }
        Grid::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.cols).map(<[i64]>::to_vec).collect()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.data
    }

    /// Columnwise maxima.
    pub fn column_max(&self) -> Vec<i64> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j)).max().expect("rows ≥ 1"))
            .collect()
    }

    fn row_pair_mut(&mut self, upper: usize) -> (&mut [i64], &mut [i64]) {
        let start = upper * self.cols;
        let (top, rest) = self.data[start..start + 2 * self.cols].split_at_mut(self.cols);
        (top, rest)
    }
}

fn is_nondecreasing(s: &[i64]) -> bool {
    s.windows(2).all(|w| w[0] <= w[1])
}

/// Sort every row ascending, left to right.
pub fn sort_rows(g: &Grid) -> Grid {
    let mut out = g.clone();
    for row in out.data.chunks_mut(out.cols) {
        row.sort_unstable();
    }
    out
}

/// Sort every column ascending, top to bottom.
pub fn sort_cols(g: &Grid) -> Grid {
    let mut out = g.clone();
    let mut column = Vec::with_capacity(g.rows);
    for j in 0..g.cols {
        column.clear();
        column.extend((0..g.rows).map(|i| g.get(i, j)));
        column.sort_unstable();
        for (i, v) in column.iter().enumerate() {
            out.data[i * g.cols + j] = *v;
        }
    }
    out
}

pub fn is_rows_sorted(g: &Grid) -> bool {
    g.data.chunks(g.cols).all(is_nondecreasing)
}

pub fn is_cols_sorted(g: &Grid) -> bool {
    (1..g.rows).all(|i| (0..g.cols).all(|j| g.get(i - 1, j) <= g.get(i, j)))
}

/// Elementwise `(min, max)` of two rows, i.e. each column pair sorted.
pub fn two_row_minmax(top: &[i64], bottom: &[i64]) -> Result<(Vec<i64>, Vec<i64>), GridError> {
    if top.len() != bottom.len() {
        return Err(GridError::LengthMismatch { top: top.len(), bottom: bottom.len() });
    }
    Ok(top.iter().zip(bottom).map(|(&a, &b)| (a.min(b), a.max(b))).unzip())
}

fn merge_in_place(top: &mut [i64], bottom: &mut [i64]) {
    for (a, b) in top.iter_mut().zip(bottom.iter_mut()) {
        if *a > *b {
            std::mem::swap(a, b);
        }
    }
}

/// One elementary merge of bubble column sort: rows `upper` and `upper + 1`
/// (zero-based) during pass `pass` (one-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MergeStep {
    pub pass: usize,
    pub upper: usize,
}

/// Column sort by `n − 1` bubble passes of two-row merges.
///
/// Pass `k` merges the pairs `(0, 1), (1, 2), …, (n − k − 1, n − k)`, so each
/// pass stops one pair before the previous one. `observe` sees the grid after
/// every merge. Returns the sorted grid and the pass count.
pub fn bubble_column_sort_with<F>(g: &Grid, mut observe: F) -> (Grid, usize)
where
    F: FnMut(MergeStep, &Grid),
{
    let mut out = g.clone();
    let passes = g.rows - 1;
    for pass in 1..=passes {
        for upper in 0..g.rows - pass {
            let (top, bottom) = out.row_pair_mut(upper);
            merge_in_place(top, bottom);
            observe(MergeStep { pass, upper }, &out);
        }
    }
    (out, passes)
}

pub fn bubble_column_sort(g: &Grid) -> (Grid, usize) {
    bubble_column_sort_with(g, |_, _| {})
}

/// The grid after a merge, tagged with the merge that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub step: MergeStep,
    pub snapshot: Grid,
}

pub fn trace_bubble(g: &Grid) -> Vec<TraceStep> {
    let mut trace = Vec::new();
    bubble_column_sort_with(g, |step, snapshot| {
        trace.push(TraceStep { step, snapshot: snapshot.clone() })
    });
    trace
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn t() -> Grid {
        Grid::from_rows(&[[1, 8, 3, 4, 8], [0, 9, 2, 7, 14], [20, 3, 6, 7, 7]]).unwrap()
    }
    pub(crate) fn t_prime() -> Grid {
        Grid::from_rows(&[[1, 3, 4, 8, 8], [0, 2, 7, 9, 14], [3, 6, 7, 7, 20]]).unwrap()
    }
    pub(crate) fn t_second() -> Grid {
        Grid::from_rows(&[[0, 2, 4, 7, 8], [1, 3, 7, 8, 14], [3, 6, 7, 9, 20]]).unwrap()
    }

    fn grid_strategy(max: usize) -> impl Strategy<Value = Grid> {
        (1..=max, 1..=max).prop_flat_map(|(r, c)| {
            prop::collection::vec(-50i64..50, r * c).prop_map(move |d| Grid::new(r, c, d).unwrap())
        })
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Grid::new(0, 3, vec![]), Err(GridError::Empty { rows: 0, cols: 3 }));
        assert_eq!(Grid::new(2, 2, vec![1, 2, 3]), Err(GridError::ShapeMismatch { rows: 2, cols: 2, len: 3 }));
        assert_eq!(
            Grid::from_rows(&[vec![1, 2], vec![3]]),
            Err(GridError::Ragged { row: 1, len: 1, expected: 2 })
        );
        assert!(Grid::from_rows::<[i64; 0]>(&[]).is_err());
    }

    #[test]
    fn worked_example() {
        assert_eq!(sort_rows(&t()), t_prime());
        assert_eq!(sort_cols(&t_prime()), t_second());
        assert!(is_rows_sorted(&t_second()) && is_cols_sorted(&t_second()));
        assert!(!is_rows_sorted(&t()) && !is_cols_sorted(&t()));
        let (g, passes) = bubble_column_sort(&t_prime());
        assert_eq!(g, t_second());
        assert_eq!(passes, 2);
    }

    #[test]
    fn trivial_grids() {
        let one = Grid::from_rows(&[[5]]).unwrap();
        assert_eq!(sort_rows(&one), one);
        assert_eq!(sort_cols(&one), one);
        assert!(is_rows_sorted(&one) && is_cols_sorted(&one));
        assert_eq!(bubble_column_sort(&one), (one.clone(), 0));
        assert!(trace_bubble(&one).is_empty());
        let single_row = Grid::from_rows(&[[3, 1, 2]]).unwrap();
        assert_eq!(sort_cols(&single_row), single_row);
        assert_eq!(bubble_column_sort(&single_row), (single_row.clone(), 0));
    }

    #[test]
    fn two_row_examples() {
        let (lo, hi) = two_row_minmax(&[1, 3, 4, 8, 8], &[0, 2, 7, 9, 14]).unwrap();
        assert_eq!(lo, [0, 2, 4, 8, 8]);
        assert_eq!(hi, [1, 3, 7, 9, 14]);
        let r = [4, -1, 7];
        assert_eq!(two_row_minmax(&r, &r).unwrap(), (r.to_vec(), r.to_vec()));
        assert_eq!(two_row_minmax(&[1], &[1, 2]), Err(GridError::LengthMismatch { top: 1, bottom: 2 }));
    }

    #[test]
    fn trace_of_worked_example() {
        let trace = trace_bubble(&t_prime());
        let steps: Vec<(usize, usize)> = trace.iter().map(|s| (s.step.pass, s.step.upper)).collect();
        assert_eq!(steps, [(1, 0), (1, 1), (2, 0)]);
        assert_eq!(trace.last().unwrap().snapshot, t_second());
        assert_eq!(trace[1].snapshot.row(2), t_prime().column_max().as_slice());
        assert_eq!(trace[1].snapshot.row(2), &[3, 6, 7, 9, 20]);
    }

    #[test]
    fn two_rows_is_one_merge() {
        let g = Grid::from_rows(&[[5, 1, 9], [2, 8, 3]]).unwrap();
        let trace = trace_bubble(&g);
        assert_eq!(trace.len(), 1);
        let (lo, hi) = two_row_minmax(g.row(0), g.row(1)).unwrap();
        assert_eq!(trace[0].snapshot, Grid::from_rows(&[lo, hi]).unwrap());
    }

    proptest! {
        #[test]
        fn main_theorem(g in grid_strategy(8)) {
            prop_assert!(is_rows_sorted(&sort_cols(&sort_rows(&g))));
        }

        #[test]
        fn two_row_lemma((mut a, mut b) in (0usize..12).prop_flat_map(|n| {
            (prop::collection::vec(-20i64..20, n), prop::collection::vec(-20i64..20, n))
        })) {
            a.sort();
            b.sort();
            let (lo, hi) = two_row_minmax(&a, &b).unwrap();
            prop_assert!(is_nondecreasing(&lo) && is_nondecreasing(&hi));
            for j in 0..a.len() {
                prop_assert_eq!(lo[j], a[j].min(b[j]));
                prop_assert_eq!(hi[j], a[j].max(b[j]));
            }
        }

        #[test]
        fn bubble_equals_sort_cols(g in grid_strategy(10)) {
            let (out, passes) = bubble_column_sort(&g);
            prop_assert_eq!(&out, &sort_cols(&g));
            prop_assert_eq!(passes, g.rows() - 1);
            prop_assert!(is_cols_sorted(&out));
        }

        #[test]
        fn merges_keep_rows_sorted(g in grid_strategy(8)) {
            let sorted = sort_rows(&g);
            for step in trace_bubble(&sorted) {
                prop_assert!(is_rows_sorted(&step.snapshot));
            }
        }

        #[test]
        fn multisets_preserved(g in grid_strategy(8)) {
            let rows = sort_rows(&g);
            for i in 0..g.rows() {
                let mut a = g.row(i).to_vec();
                a.sort();
                prop_assert_eq!(a.as_slice(), rows.row(i));
            }
            let cols = sort_cols(&g);
            let bubbled = bubble_column_sort(&g).0;
            for j in 0..g.cols() {
                let mut a = g.column(j);
                a.sort();
                prop_assert_eq!(&a, &cols.column(j));
                prop_assert_eq!(&a, &bubbled.column(j));
            }
        }

        #[test]
        fn idempotent(g in grid_strategy(6)) {
            let r = sort_rows(&g);
            prop_assert_eq!(sort_rows(&r), r.clone());
            let c = sort_cols(&g);
            prop_assert_eq!(sort_cols(&c), c);
        }
    }
}
