use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Default rank mask width.
pub const DEFAULT_RANK_MASK: usize = 11;

fn term_vectors<S: AsRef<str>>(sentences: &[Vec<S>]) -> Vec<HashMap<&str, f64>> {
    sentences
        .iter()
        .map(|s| {
            let mut v = HashMap::new();
            for t in s {
                *v.entry(t.as_ref()).or_insert(0.0) += 1.0;
            }
            v
        })
        .collect()
}

fn cosine(a: &HashMap<&str, f64>, b: &HashMap<&str, f64>) -> f64 {
    let dot: f64 = a.iter().filter_map(|(k, x)| b.get(k).map(|y| x * y)).sum();
    let na = a.values().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.values().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Sentence-by-sentence cosine of term counts.
pub fn similarity<S: AsRef<str>>(sentences: &[Vec<S>]) -> Matrix {
    let v = term_vectors(sentences);
    Matrix::from_fn(v.len(), v.len(), |i, j| cosine(&v[i], &v[j]))
}

/// Replaces each cell by the fraction of other cells in its `mask x mask`
/// neighborhood (clipped at the borders) holding a smaller value.
pub fn rank_transform(sim: &Matrix, mask: usize) -> Matrix {
    let n = sim.rows();
    let r = mask / 2;
    Matrix::from_fn(n, n, |i, j| {
        let v = sim[(i, j)];
        let (mut lower, mut total) = (0usize, 0usize);
        for a in i.saturating_sub(r)..(i + r + 1).min(n) {
            for b in j.saturating_sub(r)..(j + r + 1).min(sim.cols()) {
                if (a, b) == (i, j) {
                    continue;
                }
                total += 1;
                if sim[(a, b)] < v {
                    lower += 1;
                }
            }
        }
        if total == 0 {
            0.0
        } else {
            lower as f64 / total as f64
        }
    })
}

/// 2D prefix sums so that any square block sum is O(1).
struct BlockSums {
    n: usize,
    acc: Vec<f64>,
}

impl BlockSums {
    fn new(m: &Matrix) -> Self {
        let n = m.rows();
        let mut acc = vec![0.0; (n + 1) * (n + 1)];
        for i in 0..n {
            for j in 0..n {
                acc[(i + 1) * (n + 1) + j + 1] =
                    m[(i, j)] + acc[i * (n + 1) + j + 1] + acc[(i + 1) * (n + 1) + j] - acc[i * (n + 1) + j];
            }
        }
        BlockSums { n, acc }
    }

    /// Sum over `[a, b) x [a, b)`.
    fn block(&self, a: usize, b: usize) -> f64 {
        let w = self.n + 1;
        self.acc[b * w + b] - self.acc[a * w + b] - self.acc[b * w + a] + self.acc[a * w + a]
    }
}

/// Divisive clustering on the rank matrix: repeatedly adds the boundary
/// that maximizes total inside-block rank over total inside-block area,
/// until `n_segments` segments exist. Ties go to the smallest position.
pub fn c99<S: AsRef<str>>(sentences: &[Vec<S>], n_segments: usize, rank_mask: usize) -> Result<Vec<usize>> {
    let m = sentences.len();
    if n_segments == 0 || n_segments > m {
        return Err(Error::validation(format!(
            "cannot split {m} sentences into {n_segments} segments"
        )));
    }
    if rank_mask.is_multiple_of(2) {
        return Err(Error::Config(format!("rank mask must be odd, got {rank_mask}")));
    }
    let sums = BlockSums::new(&rank_transform(&similarity(sentences), rank_mask));
    let mut bounds: Vec<usize> = vec![0, m];
    while bounds.len() - 1 < n_segments {
        let (inside, area) = bounds.windows(2).fold((0.0, 0.0), |(s, a), w| {
            (s + sums.block(w[0], w[1]), a + ((w[1] - w[0]) * (w[1] - w[0])) as f64)
        });
        let mut best: Option<(f64, usize)> = None;
        for w in bounds.windows(2) {
            let (a, b) = (w[0], w[1]);
            let old_s = sums.block(a, b);
            let old_a = ((b - a) * (b - a)) as f64;
            for c in a + 1..b {
                let s = inside - old_s + sums.block(a, c) + sums.block(c, b);
                let ar = area - old_a + ((c - a) * (c - a) + (b - c) * (b - c)) as f64;
                let d = s / ar;
                if best.is_none_or(|(bd, bc)| d > bd || (d == bd && c < bc)) {
                    best = Some((d, c));
                }
            }
        }
        let (_, c) = best.expect("a segment longer than one sentence exists while fewer than M segments");
        let pos = bounds.partition_point(|&x| x < c);
        bounds.insert(pos, c);
    }
    Ok(bounds[1..bounds.len() - 1].to_vec())
}
