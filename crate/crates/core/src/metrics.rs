//! Segmentation and alignment evaluation.
//!
//! Boundaries are sentence ids: boundary `b` sits between sentences `b - 1`
//! and `b`, so valid boundaries lie in `1..M`.

use serde::{Deserialize, Serialize};

use crate::corpus::{MeetingBundle, SegmentAlignment};
use crate::error::{Error, Result};

fn check_window(bounds: &[usize], m: usize, k: usize) -> Result<()> {
    if k == 0 || k >= m {
        return Err(Error::validation(format!("window size k={k} must satisfy 1 <= k < M={m}")));
    }
    for pair in bounds.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::validation("boundaries must be strictly increasing"));
        }
    }
    if let Some(&b) = bounds.iter().find(|&&b| b == 0 || b >= m) {
        return Err(Error::validation(format!("boundary {b} outside (0, {m})")));
    }
    Ok(())
}

/// `prefix[x]` = number of boundaries `<= x`.
fn prefix_counts(bounds: &[usize], m: usize) -> Vec<usize> {
    let mut out = vec![0; m + 1];
    for &b in bounds {
        out[b] += 1;
    }
    for x in 1..=m {
        out[x] += out[x - 1];
    }
    out
}

/// Disagreeing windows and total windows for WindowDiff.
pub fn windowdiff_counts(reference: &[usize], hypothesis: &[usize], m: usize, k: usize) -> Result<(usize, usize)> {
    check_window(reference, m, k)?;
    check_window(hypothesis, m, k)?;
    let r = prefix_counts(reference, m);
    let h = prefix_counts(hypothesis, m);
    let errors = (0..m - k)
        .filter(|&i| r[i + k] - r[i] != h[i + k] - h[i])
        .count();
    Ok((errors, m - k))
}

/// Fraction of windows `(i, i + k]` holding a different number of reference
/// and hypothesis boundaries.
pub fn windowdiff(reference: &[usize], hypothesis: &[usize], m: usize, k: usize) -> Result<f64> {
    let (e, n) = windowdiff_counts(reference, hypothesis, m, k)?;
    Ok(e as f64 / n as f64)
}

pub fn pk_counts(reference: &[usize], hypothesis: &[usize], m: usize, k: usize) -> Result<(usize, usize)> {
    check_window(reference, m, k)?;
    check_window(hypothesis, m, k)?;
    let r = prefix_counts(reference, m);
    let h = prefix_counts(hypothesis, m);
    let errors = (0..m - k)
        .filter(|&i| (r[i + k] > r[i]) != (h[i + k] > h[i]))
        .count();
    Ok((errors, m - k))
}

/// Fraction of sentence pairs `(i, i + k)` on which reference and hypothesis
/// disagree about being in the same segment.
pub fn pk(reference: &[usize], hypothesis: &[usize], m: usize, k: usize) -> Result<f64> {
    let (e, n) = pk_counts(reference, hypothesis, m, k)?;
    Ok(e as f64 / n as f64)
}

/// Half the mean reference segment length, clamped to `[1, M - 1]`.
pub fn default_k(reference: &[usize], m: usize) -> Result<usize> {
    if m < 2 {
        return Err(Error::validation("window metrics need at least two sentences"));
    }
    let k = (m as f64 / (2.0 * (reference.len() + 1) as f64)).round() as usize;
    Ok(k.clamp(1, m - 1))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalCounts {
    pub correct_segments: usize,
    pub total_segments: usize,
    pub correct_words: usize,
    pub total_words: usize,
    pub irrelevant_words: usize,
}

impl EvalCounts {
    pub fn merge(self, o: EvalCounts) -> EvalCounts {
        EvalCounts {
            correct_segments: self.correct_segments + o.correct_segments,
            total_segments: self.total_segments + o.total_segments,
            correct_words: self.correct_words + o.correct_words,
            total_words: self.total_words + o.total_words,
            irrelevant_words: self.irrelevant_words + o.irrelevant_words,
        }
    }

    pub fn accuracy(&self) -> Accuracy {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let relevant = self.total_words - self.irrelevant_words;
        Accuracy {
            seg_acc: ratio(self.correct_segments, self.total_segments),
            word_acc: ratio(self.correct_words, self.total_words),
            pos_word_acc: if relevant == 0 {
                1.0
            } else {
                ratio(self.correct_words, relevant)
            },
            no_relevant_content: relevant == 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Accuracy {
    pub seg_acc: f64,
    pub word_acc: f64,
    /// Word accuracy over words the gold alignment does not mark irrelevant.
    pub pos_word_acc: f64,
    /// Set when there are no relevant words; `pos_word_acc` is then 1.
    pub no_relevant_content: bool,
}

fn check_same_segments(a: &SegmentAlignment, b: &SegmentAlignment) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::validation(format!(
            "alignments cover {} and {} transcription segments",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// Segment and word counts of `hyp` against `gold`. Segments the gold
/// alignment marks irrelevant always count as wrong.
pub fn alignment_accuracy(gold: &SegmentAlignment, hyp: &SegmentAlignment, bundle: &MeetingBundle) -> Result<EvalCounts> {
    check_same_segments(gold, hyp)?;
    if gold.len() != bundle.transcription.num_segments() {
        return Err(Error::validation(format!(
            "alignment covers {} segments, meeting {} has {}",
            gold.len(),
            bundle.meeting_id,
            bundle.transcription.num_segments()
        )));
    }
    let mut c = EvalCounts::default();
    for (g, h) in gold.map().iter().zip(hyp.map()) {
        let words = bundle.transcription.segment_words(g.t_seg);
        c.total_segments += 1;
        c.total_words += words;
        if g.irrelevant {
            c.irrelevant_words += words;
        } else if g.r_seg == h.r_seg {
            c.correct_segments += 1;
            c.correct_words += words;
        }
    }
    Ok(c)
}

pub fn micro_average(per_file: &[EvalCounts]) -> Result<Accuracy> {
    if per_file.is_empty() {
        return Err(Error::validation("nothing to average"));
    }
    Ok(per_file.iter().fold(EvalCounts::default(), |a, &b| a.merge(b)).accuracy())
}

/// Fraction of entries the annotator left untouched (target and flag).
pub fn annotator_score(pre: &SegmentAlignment, corrected: &SegmentAlignment) -> Result<f64> {
    check_same_segments(pre, corrected)?;
    let kept = pre.map().iter().zip(corrected.map()).filter(|(a, b)| a == b).count();
    Ok(kept as f64 / pre.len() as f64)
}

/// A boundary at the first sentence of every transcription segment whose
/// target differs from the previous segment's.
pub fn alignment_to_boundaries(alignment: &SegmentAlignment, bundle: &MeetingBundle) -> Result<Vec<usize>> {
    let segs = bundle.transcription.segments();
    if alignment.len() != segs.len() {
        return Err(Error::validation(format!(
            "alignment covers {} segments, meeting {} has {}",
            alignment.len(),
            bundle.meeting_id,
            segs.len()
        )));
    }
    Ok(alignment
        .map()
        .windows(2)
        .filter(|p| p[0].r_seg != p[1].r_seg)
        .map(|p| segs[p[1].t_seg].start)
        .collect())
}

/// Per-meeting evaluation of one hypothesis against gold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEvaluation {
    pub meeting_id: String,
    pub counts: EvalCounts,
    pub accuracy: Accuracy,
    pub k: usize,
    pub windowdiff_errors: usize,
    pub pk_errors: usize,
    pub windows: usize,
    pub windowdiff: f64,
    pub pk: f64,
}

pub fn evaluate_file(gold: &SegmentAlignment, hyp: &SegmentAlignment, bundle: &MeetingBundle) -> Result<FileEvaluation> {
    if gold.meeting_id() != hyp.meeting_id() {
        return Err(Error::validation(format!(
            "gold is for meeting {:?}, hypothesis for {:?}",
            gold.meeting_id(),
            hyp.meeting_id()
        )));
    }
    let counts = alignment_accuracy(gold, hyp, bundle)?;
    let m = bundle.transcription.num_sentences();
    let reference = alignment_to_boundaries(gold, bundle)?;
    let hypothesis = alignment_to_boundaries(hyp, bundle)?;
    let (k, wd, pk, windows) = if m < 2 {
        (0, 0, 0, 0)
    } else {
        let k = default_k(&reference, m)?;
        let (wd, n) = windowdiff_counts(&reference, &hypothesis, m, k)?;
        let (pk, _) = pk_counts(&reference, &hypothesis, m, k)?;
        (k, wd, pk, n)
    };
    let ratio = |a: usize| if windows == 0 { 0.0 } else { a as f64 / windows as f64 };
    Ok(FileEvaluation {
        meeting_id: bundle.meeting_id.clone(),
        counts,
        accuracy: counts.accuracy(),
        k,
        windowdiff_errors: wd,
        pk_errors: pk,
        windows,
        windowdiff: ratio(wd),
        pk: ratio(pk),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicroSummary {
    pub seg_acc: f64,
    pub word_acc: f64,
    pub pos_word_acc: f64,
    pub windowdiff: f64,
    pub pk: f64,
}

/// Micro-averages accuracies and window errors over files.
pub fn summarize(files: &[FileEvaluation]) -> Result<MicroSummary> {
    let counts: Vec<EvalCounts> = files.iter().map(|f| f.counts).collect();
    let acc = micro_average(&counts)?;
    let windows: usize = files.iter().map(|f| f.windows).sum();
    let ratio = |e: usize| if windows == 0 { 0.0 } else { e as f64 / windows as f64 };
    Ok(MicroSummary {
        seg_acc: acc.seg_acc,
        word_acc: acc.word_acc,
        pos_word_acc: acc.pos_word_acc,
        windowdiff: ratio(files.iter().map(|f| f.windowdiff_errors).sum()),
        pk: ratio(files.iter().map(|f| f.pk_errors).sum()),
    })
}
