use std::collections::HashMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TextTilingParams {
    /// Sentences per block on each side of a gap.
    pub block_size: usize,
    /// Distance between candidate gaps, in sentences.
    pub step: usize,
    /// Boundaries need a depth above `mean - sigma * stddev`.
    pub sigma: f64,
}

impl Default for TextTilingParams {
    fn default() -> Self {
        TextTilingParams {
            block_size: 3,
            step: 1,
            sigma: 0.5,
        }
    }
}

fn counts<S: AsRef<str>>(block: &[Vec<S>]) -> HashMap<&str, f64> {
    let mut out = HashMap::new();
    for tok in block.iter().flatten() {
        *out.entry(tok.as_ref()).or_insert(0.0) += 1.0;
    }
    out
}

fn count_cosine(a: &HashMap<&str, f64>, b: &HashMap<&str, f64>) -> f64 {
    let dot: f64 = a.iter().filter_map(|(k, x)| b.get(k).map(|y| x * y)).sum();
    let na = a.values().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.values().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Depth of position `g`: how far the score climbs on each side before
/// dropping again.
fn depth(scores: &[f64], g: usize) -> f64 {
    let mut left = scores[g];
    for k in (0..g).rev() {
        if scores[k] < left {
            break;
        }
        left = scores[k];
    }
    let mut right = scores[g];
    for &s in &scores[g + 1..] {
        if s < right {
            break;
        }
        right = s;
    }
    (left - scores[g]) + (right - scores[g])
}

/// Block-comparison segmentation over tokenized sentences.
///
/// Candidate gaps sit every `step` sentences. Each gap is scored by the
/// cosine of term counts in the `block_size` sentences on either side,
/// smoothed by averaging with its neighbors, and boundaries go to local
/// minima whose depth exceeds the cutoff. Returns `[]` when the document is
/// shorter than two blocks.
pub fn texttiling<S: AsRef<str>>(sentences: &[Vec<S>], params: &TextTilingParams) -> Vec<usize> {
    let m = sentences.len();
    let w = params.block_size.max(1);
    let step = params.step.max(1);
    if m < 2 * w {
        return Vec::new();
    }
    let gaps: Vec<usize> = (step..m).step_by(step).collect();
    if gaps.is_empty() {
        return Vec::new();
    }
    let raw: Vec<f64> = gaps
        .iter()
        .map(|&b| {
            let left = counts(&sentences[b.saturating_sub(w)..b]);
            let right = counts(&sentences[b..(b + w).min(m)]);
            count_cosine(&left, &right)
        })
        .collect();
    let smooth: Vec<f64> = (0..raw.len())
        .map(|g| {
            let lo = g.saturating_sub(1);
            let hi = (g + 2).min(raw.len());
            raw[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect();
    let depths: Vec<f64> = (0..smooth.len()).map(|g| depth(&smooth, g)).collect();
    let n = depths.len() as f64;
    let mean = depths.iter().sum::<f64>() / n;
    let std = (depths.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n).sqrt();
    let cutoff = (mean - params.sigma * std).max(0.0);
    (0..smooth.len())
        .filter(|&g| {
            let left_ok = g == 0 || smooth[g] < smooth[g - 1];
            let right_ok = g + 1 == smooth.len() || smooth[g] <= smooth[g + 1];
            left_ok && right_ok && depths[g] > cutoff
        })
        .map(|g| gaps[g])
        .collect()
}
