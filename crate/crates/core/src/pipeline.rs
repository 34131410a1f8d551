//! End-to-end alignment of one meeting under an [`AlignConfig`].

use std::sync::Arc;

use crate::alignment::{accumulate, backtrace, project_to_segments, AlignmentTableau, Path};
use crate::corpus::{AlignmentSource, MeetingBundle, SegmentAlignment};
use crate::error::Result;
use crate::gridsearch::AlignConfig;
use crate::matrix::SimilarityMatrix;
use crate::similarity::{similarity_matrix, EmbeddingTable, Scorer};
use crate::windows::windowed_similarity;

#[derive(Debug, Clone)]
pub struct AlignmentOutcome {
    pub similarity: SimilarityMatrix,
    pub tableau: AlignmentTableau,
    pub path: Path,
    pub alignment: SegmentAlignment,
}

/// Sentence-level similarity of a meeting, windowed when the config asks.
pub fn meeting_similarity(
    bundle: &MeetingBundle,
    config: &AlignConfig,
    embeddings: Option<&Arc<EmbeddingTable>>,
) -> Result<SimilarityMatrix> {
    config.validate()?;
    let t = bundle.transcription.texts();
    let r = bundle.report.texts();
    let scorer = Scorer::for_meeting(config.scorer, config.pooling, &t, &r, embeddings)?;
    if config.window.is_identity() {
        similarity_matrix(&t, &r, &scorer)
    } else {
        windowed_similarity(&t, &r, &scorer, &config.window)
    }
}

pub fn align_meeting(
    bundle: &MeetingBundle,
    config: &AlignConfig,
    embeddings: Option<&Arc<EmbeddingTable>>,
) -> Result<AlignmentOutcome> {
    let similarity = meeting_similarity(bundle, config, embeddings)?;
    let tableau = accumulate(&similarity, &config.align)?;
    let path = backtrace(&tableau);
    let targets = project_to_segments(
        &path,
        &tableau.scores,
        bundle.transcription.segments(),
        &bundle.report.segment_ranges(),
    )?;
    let alignment = SegmentAlignment::from_targets(
        bundle.meeting_id.clone(),
        AlignmentSource::Auto,
        Some(config.normalized()),
        &targets,
    )?;
    Ok(AlignmentOutcome {
        similarity,
        tableau,
        path,
        alignment,
    })
}
