//! Linear segmentation baselines over transcription sentences only.

mod c99;
mod texttiling;

pub use c99::{c99, rank_transform, similarity as c99_similarity, DEFAULT_RANK_MASK};
pub use texttiling::{texttiling, TextTilingParams};

use crate::corpus::{AlignmentSource, MeetingBundle, SegmentAlignment};
use crate::error::Result;

/// Picks the first parameter set whose TextTiling output has exactly
/// `expected_segments` segments.
pub fn texttiling_with_count<S: AsRef<str>>(
    sentences: &[Vec<S>],
    expected_segments: usize,
    candidates: &[TextTilingParams],
) -> Option<(TextTilingParams, Vec<usize>)> {
    candidates.iter().find_map(|p| {
        let b = texttiling(sentences, p);
        (b.len() + 1 == expected_segments).then_some((*p, b))
    })
}

/// Default TextTiling parameter grid for the segment-count search.
pub fn texttiling_grid() -> Vec<TextTilingParams> {
    let mut out = Vec::new();
    for block_size in [2, 3, 4, 5, 6, 8, 10, 15, 20] {
        for step in [1, 2, 3] {
            for sigma in [-1.0, -0.5, 0.0, 0.5, 1.0, 1.5] {
                out.push(TextTilingParams { block_size, step, sigma });
            }
        }
    }
    out
}

/// Turns a linear segmentation into a segment alignment: the k-th linear
/// segment goes to report segment k (clamped to the last one), and each
/// transcription segment follows the linear segment holding its first
/// sentence.
pub fn boundaries_to_alignment(boundaries: &[usize], bundle: &MeetingBundle) -> Result<SegmentAlignment> {
    let last = bundle.report.num_segments() - 1;
    let targets: Vec<usize> = bundle
        .transcription
        .segments()
        .iter()
        .map(|r| boundaries.partition_point(|&b| b <= r.start).min(last))
        .collect();
    SegmentAlignment::from_targets(bundle.meeting_id.clone(), AlignmentSource::Auto, None, &targets)
}
