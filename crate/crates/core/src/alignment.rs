//! Monotone alignment of transcription sentences (rows, index `i`) against
//! report sentences (columns, index `j`) by dynamic programming.
//!
//! Every cell accumulates its own score raised to the power `p` plus the best
//! of its two predecessors: `(i - 1, j)` ("left", the transcription advanced)
//! or `(i, j - 1)` ("top", the report advanced). Optional decay factors damp
//! long runs of moves in one direction: a run of left moves is multiplied by
//! `1 - hd` per step and a run of top moves by `1 - vd`, resetting to 1 when
//! the direction changes. The decay is applied inside the recursion, so the
//! predecessor choice always reads decayed values.
//!
//! The optimal path is read back from the predecessor table and projected to
//! segments: each transcription segment goes to the report segment holding
//! the largest accumulated mass along the path.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::corpus::{AlignmentSource, MeetingBundle, SegmentAlignment};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignParams {
    /// Power applied to each similarity before accumulation, `p >= 1`.
    #[serde(rename = "p")]
    pub power: f64,
    /// Decay for runs of transcription-advancing moves.
    #[serde(rename = "hd")]
    pub horizontal_decay: f64,
    /// Decay for runs of report-advancing moves.
    #[serde(rename = "vd")]
    pub vertical_decay: f64,
}

impl Default for AlignParams {
    fn default() -> Self {
        AlignParams {
            power: 1.0,
            horizontal_decay: 0.0,
            vertical_decay: 0.0,
        }
    }
}

impl AlignParams {
    pub fn new(power: f64, horizontal_decay: f64, vertical_decay: f64) -> Result<Self> {
        let p = AlignParams {
            power,
            horizontal_decay,
            vertical_decay,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.power >= 1.0 && self.power.is_finite()) {
            return Err(Error::Config(format!("power must be >= 1, got {}", self.power)));
        }
        for (name, d) in [("hd", self.horizontal_decay), ("vd", self.vertical_decay)] {
            if !(0.0..=1.0).contains(&d) {
                return Err(Error::Config(format!("{name} must be in [0, 1], got {d}")));
            }
        }
        Ok(())
    }
}

/// Which neighbor a cell was reached from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Predecessor {
    Origin,
    /// `(i - 1, j)`: the transcription index advanced.
    Left,
    /// `(i, j - 1)`: the report index advanced.
    Top,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentTableau {
    /// Accumulated (and decayed, when decay is on) scores.
    pub scores: Matrix,
    pub history: Vec<Predecessor>,
    pub decay: Matrix,
}

impl AlignmentTableau {
    pub fn rows(&self) -> usize {
        self.scores.rows()
    }

    pub fn cols(&self) -> usize {
        self.scores.cols()
    }

    pub fn predecessor(&self, i: usize, j: usize) -> Predecessor {
        self.history[i * self.cols() + j]
    }
}

#[inline]
fn raise(s: f64, p: f64) -> f64 {
    if p == 1.0 {
        s
    } else {
        s.powf(p)
    }
}

/// Fills the accumulation, history and decay tables row by row.
///
/// Ties between the two neighbors go to `Top`. Cells on the first row or
/// column have a single possible predecessor and keep a decay of 1.
pub fn accumulate(similarity: &Matrix, params: &AlignParams) -> Result<AlignmentTableau> {
    params.validate()?;
    let (m, n) = (similarity.rows(), similarity.cols());
    if m == 0 || n == 0 {
        return Err(Error::validation("cannot align an empty similarity matrix"));
    }
    let mut scores = Matrix::zeros(m, n);
    let mut decay = Matrix::filled(m, n, 1.0);
    let mut history = vec![Predecessor::Origin; m * n];
    for i in 0..m {
        for j in 0..n {
            let s = raise(similarity[(i, j)], params.power);
            let (pred, prev) = match (i, j) {
                (0, 0) => {
                    scores[(0, 0)] = s;
                    continue;
                }
                (0, _) => (Predecessor::Top, (0, j - 1)),
                (_, 0) => (Predecessor::Left, (i - 1, 0)),
                _ => {
                    if scores[(i - 1, j)] > scores[(i, j - 1)] {
                        (Predecessor::Left, (i - 1, j))
                    } else {
                        (Predecessor::Top, (i, j - 1))
                    }
                }
            };
            let d = if i > 0 && j > 0 && history[prev.0 * n + prev.1] == pred {
                let factor = match pred {
                    Predecessor::Left => 1.0 - params.horizontal_decay,
                    _ => 1.0 - params.vertical_decay,
                };
                decay[prev] * factor
            } else {
                1.0
            };
            history[i * n + j] = pred;
            decay[(i, j)] = d;
            scores[(i, j)] = if d == 1.0 { s + scores[prev] } else { (s + scores[prev]) * d };
        }
    }
    Ok(AlignmentTableau {
        scores,
        history,
        decay,
    })
}

/// Monotone unit-step sequence of `(i, j)` cells from `(0, 0)` to `(M-1, N-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path(Vec<(usize, usize)>);

impl Path {
    /// Checks the unit-step shape before wrapping the cells.
    pub fn new(cells: Vec<(usize, usize)>) -> Result<Self> {
        if cells.first() != Some(&(0, 0)) {
            return Err(Error::validation("path must start at (0, 0)"));
        }
        for w in cells.windows(2) {
            let (a, b) = (w[0], w[1]);
            let ok = (b.0 == a.0 + 1 && b.1 == a.1) || (b.0 == a.0 && b.1 == a.1 + 1);
            if !ok {
                return Err(Error::validation(format!("path step {a:?} -> {b:?} is not a unit step")));
            }
        }
        Ok(Path(cells))
    }

    pub fn cells(&self) -> &[(usize, usize)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn end(&self) -> (usize, usize) {
        *self.0.last().expect("paths are never empty")
    }

    /// Sum of `matrix` over the path's cells.
    pub fn score(&self, matrix: &Matrix) -> f64 {
        self.0.iter().map(|&c| matrix[c]).sum()
    }
}

pub fn backtrace(tableau: &AlignmentTableau) -> Path {
    let (mut i, mut j) = (tableau.rows() - 1, tableau.cols() - 1);
    let mut cells = Vec::with_capacity(i + j + 1);
    cells.push((i, j));
    loop {
        match tableau.predecessor(i, j) {
            Predecessor::Origin => break,
            Predecessor::Left => i -= 1,
            Predecessor::Top => j -= 1,
        }
        cells.push((i, j));
    }
    cells.reverse();
    Path(cells)
}

fn owner_of(segments: &[Range<usize>], len: usize) -> Result<Vec<usize>> {
    let mut owner = vec![usize::MAX; len];
    for (k, r) in segments.iter().enumerate() {
        for i in r.clone() {
            if i >= len {
                return Err(Error::validation(format!("segment {k} covers sentence {i} of {len}")));
            }
            owner[i] = k;
        }
    }
    if let Some(i) = owner.iter().position(|&o| o == usize::MAX) {
        return Err(Error::validation(format!("sentence {i} belongs to no segment")));
    }
    Ok(owner)
}

/// Maps each transcription segment to the report segment maximizing the sum
/// of `scores` over the path cells they share; ties go to the smaller report
/// segment, and the result is clamped so it never decreases.
pub fn project_to_segments(
    path: &Path,
    scores: &Matrix,
    transcription_segments: &[Range<usize>],
    report_segments: &[Range<usize>],
) -> Result<Vec<usize>> {
    let (m, n) = (scores.rows(), scores.cols());
    if path.end() != (m - 1, n - 1) {
        return Err(Error::validation("path does not end at the last cell"));
    }
    let t_owner = owner_of(transcription_segments, m)?;
    let r_owner = owner_of(report_segments, n)?;
    // path cells arrive in order, so each transcription segment sees its
    // report segments in non-decreasing order
    let mut mass: Vec<Vec<(usize, f64)>> = vec![Vec::new(); transcription_segments.len()];
    for &(i, j) in path.cells() {
        let bucket = &mut mass[t_owner[i]];
        let rs = r_owner[j];
        match bucket.last_mut() {
            Some(last) if last.0 == rs => last.1 += scores[(i, j)],
            _ => bucket.push((rs, scores[(i, j)])),
        }
    }
    let mut out = Vec::with_capacity(mass.len());
    let mut floor = 0;
    for (k, bucket) in mass.iter().enumerate() {
        let mut best: Option<(usize, f64)> = None;
        for &(rs, v) in bucket {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((rs, v));
            }
        }
        let Some((target, _)) = best else {
            return Err(Error::validation(format!("transcription segment {k} is not on the path")));
        };
        floor = floor.max(target);
        out.push(floor);
    }
    Ok(out)
}

/// Similarity-free path following the slope `M / N`.
///
/// Walking forward from the first cell with 1-based counts `(i, j)`, the
/// transcription advances while `i / j <= M / N` and the report advances
/// otherwise; moves are forced along the last row and column.
pub fn diagonal_path(m: usize, n: usize) -> Result<Path> {
    if m == 0 || n == 0 {
        return Err(Error::validation("diagonal path needs non-empty documents"));
    }
    let (mut i, mut j) = (1usize, 1usize);
    let mut cells = Vec::with_capacity(m + n - 1);
    cells.push((0, 0));
    while (i, j) != (m, n) {
        if i == m {
            j += 1;
        } else if j == n || i * n <= m * j {
            i += 1;
        } else {
            j += 1;
        }
        cells.push((i - 1, j - 1));
    }
    Ok(Path(cells))
}

/// Diagonal baseline for a meeting: constant similarity, diagonal path,
/// projected with the constant-similarity accumulation.
pub fn diagonal_alignment(bundle: &MeetingBundle) -> Result<SegmentAlignment> {
    let m = bundle.transcription.num_sentences();
    let n = bundle.report.num_sentences();
    let tableau = accumulate(&Matrix::filled(m, n, 1.0), &AlignParams::default())?;
    let path = diagonal_path(m, n)?;
    let targets = project_to_segments(
        &path,
        &tableau.scores,
        bundle.transcription.segments(),
        &bundle.report.segment_ranges(),
    )?;
    SegmentAlignment::from_targets(bundle.meeting_id.clone(), AlignmentSource::Diagonal, None, &targets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2_similarity() -> Matrix {
        // rows: report r1..r3, cols: transcription t1..t4; transposed so
        // that rows index the transcription
        Matrix::from_rows(&[[5.0, 3.0, 8.0, 9.0], [5.0, 7.0, 6.0, 2.0], [3.0, 4.0, 7.0, 5.0]])
            .unwrap()
            .transpose()
    }

    #[test]
    fn fig2_accumulation_and_path() {
        let t = accumulate(&fig2_similarity(), &AlignParams::default()).unwrap();
        let expected = Matrix::from_rows(&[
            [5.0, 8.0, 16.0, 25.0],
            [10.0, 17.0, 23.0, 27.0],
            [13.0, 21.0, 30.0, 35.0],
        ])
        .unwrap()
        .transpose();
        assert_eq!(t.scores, expected);
        let path = backtrace(&t);
        assert_eq!(path.cells(), &[(0, 0), (0, 1), (1, 1), (2, 1), (2, 2), (3, 2)]);
    }

    #[test]
    fn fig2_projection() {
        let t = accumulate(&fig2_similarity(), &AlignParams::default()).unwrap();
        let path = backtrace(&t);
        let f = project_to_segments(&path, &t.scores, &[0..1, 1..3, 3..4], &[0..2, 2..3]).unwrap();
        assert_eq!(f, vec![0, 0, 1]);
    }

    #[test]
    fn history_borders() {
        let t = accumulate(&Matrix::filled(3, 4, 0.5), &AlignParams::default()).unwrap();
        assert_eq!(t.predecessor(0, 0), Predecessor::Origin);
        for j in 1..4 {
            assert_eq!(t.predecessor(0, j), Predecessor::Top);
        }
        for i in 1..3 {
            assert_eq!(t.predecessor(i, 0), Predecessor::Left);
        }
    }

    #[test]
    fn base_case_power() {
        let t = accumulate(&Matrix::from_rows(&[[0.5]]).unwrap(), &AlignParams::new(2.0, 0.0, 0.0).unwrap())
            .unwrap();
        assert_eq!(t.scores[(0, 0)], 0.25);
        assert_eq!(backtrace(&t).cells(), &[(0, 0)]);
    }

    #[test]
    fn single_row_and_column_paths() {
        let t = accumulate(&Matrix::filled(1, 4, 0.3), &AlignParams::default()).unwrap();
        assert_eq!(backtrace(&t).cells(), &[(0, 0), (0, 1), (0, 2), (0, 3)]);
        let t = accumulate(&Matrix::filled(3, 1, 0.3), &AlignParams::default()).unwrap();
        assert_eq!(backtrace(&t).cells(), &[(0, 0), (1, 0), (2, 0)]);
    }

    #[test]
    fn ties_go_to_top() {
        let t = accumulate(&Matrix::filled(2, 2, 1.0), &AlignParams::default()).unwrap();
        assert_eq!(t.predecessor(1, 1), Predecessor::Top);
    }

    #[test]
    fn invalid_params() {
        assert!(AlignParams::new(0.5, 0.0, 0.0).is_err());
        assert!(AlignParams::new(1.0, -0.1, 0.0).is_err());
        assert!(AlignParams::new(1.0, 0.0, 1.5).is_err());
        assert!(AlignParams::new(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn decay_resets_on_direction_change() {
        // a run of three top moves along row 1 after entering from the left
        let s = Matrix::from_rows(&[[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 1.0, 1.0]]).unwrap();
        let t = accumulate(&s, &AlignParams::new(1.0, 0.0, 0.5).unwrap()).unwrap();
        assert_eq!(t.predecessor(1, 1), Predecessor::Top);
        assert_eq!(t.decay[(1, 1)], 1.0);
        assert_eq!(t.decay[(1, 2)], 0.5);
        assert_eq!(t.decay[(1, 3)], 0.25);
    }

    #[test]
    fn projection_single_segment() {
        let t = accumulate(&Matrix::filled(3, 2, 0.4), &AlignParams::default()).unwrap();
        let p = backtrace(&t);
        assert_eq!(project_to_segments(&p, &t.scores, &[0..3], &[0..2]).unwrap(), vec![0]);
    }

    #[test]
    fn projection_is_clamped_monotone() {
        // hand-built path/mass where the raw argmax would go 1 then 0
        let scores = Matrix::from_rows(&[[1.0, 5.0], [9.0, 1.0]]).unwrap();
        let path = Path::new(vec![(0, 0), (0, 1), (1, 1)]).unwrap();
        let f = project_to_segments(&path, &scores, &[0..1, 1..2], &[0..1, 1..2]).unwrap();
        assert_eq!(f, vec![1, 1]);
    }

    #[test]
    fn diagonal_square_is_a_staircase() {
        for m in 1..10 {
            let p = diagonal_path(m, m).unwrap();
            for k in 0..m {
                assert!(p.cells().contains(&(k, k)));
            }
            assert_eq!(p.len(), 2 * m - 1);
        }
    }

    #[test]
    fn diagonal_four_by_two() {
        let p = diagonal_path(4, 2).unwrap();
        assert_eq!(p.cells(), &[(0, 0), (1, 0), (2, 0), (2, 1), (3, 1)]);
        let scores = accumulate(&Matrix::filled(4, 2, 1.0), &AlignParams::default()).unwrap().scores;
        let f = project_to_segments(&p, &scores, &[0..1, 1..2, 2..3, 3..4], &[0..1, 1..2]).unwrap();
        assert_eq!(f, vec![0, 0, 1, 1]);
    }

    #[test]
    fn diagonal_degenerate_shapes() {
        assert_eq!(diagonal_path(1, 3).unwrap().cells(), &[(0, 0), (0, 1), (0, 2)]);
        assert_eq!(diagonal_path(3, 1).unwrap().cells(), &[(0, 0), (1, 0), (2, 0)]);
        assert!(diagonal_path(0, 3).is_err());
    }

    #[test]
    fn path_validation() {
        assert!(Path::new(vec![(0, 0), (1, 1)]).is_err());
        assert!(Path::new(vec![(0, 1)]).is_err());
    }
}
