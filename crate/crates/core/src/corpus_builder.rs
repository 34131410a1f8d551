//! Summarization training pairs from aligned meetings.
//!
//! Each report segment yields at most one pair: its text is the target and
//! the transcription segments aligned to it (minus those flagged irrelevant)
//! form the source. Pairs outside the length bounds are dropped.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{join_sentences, MeetingBundle, SegmentAlignment, Sentence};
use crate::error::{Error, Result};
use crate::fsio;

/// Inclusive word and sentence bounds applied to both sides of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairFilter {
    pub min_words: usize,
    pub max_words: usize,
    pub min_sentences: usize,
    pub max_sentences: usize,
}

impl Default for PairFilter {
    fn default() -> Self {
        PairFilter {
            min_words: 10,
            max_words: 1000,
            min_sentences: 3,
            max_sentences: 50,
        }
    }
}

impl PairFilter {
    pub fn accepts(&self, words: usize, sentences: usize) -> bool {
        (self.min_words..=self.max_words).contains(&words)
            && (self.min_sentences..=self.max_sentences).contains(&sentences)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingPair {
    pub meeting_id: String,
    pub r_seg: usize,
    pub src: String,
    pub tgt: String,
    pub src_words: usize,
    pub tgt_words: usize,
    #[serde(skip)]
    pub src_sentences: usize,
    #[serde(skip)]
    pub tgt_sentences: usize,
}

pub fn pair_filter(pair: &TrainingPair, filter: &PairFilter) -> bool {
    filter.accepts(pair.src_words, pair.src_sentences) && filter.accepts(pair.tgt_words, pair.tgt_sentences)
}

/// One candidate pair per report segment, in report order, before filtering.
pub fn candidate_pairs(bundle: &MeetingBundle, alignment: &SegmentAlignment) -> Result<Vec<TrainingPair>> {
    alignment.validate_against(bundle)?;
    let mut sources: Vec<Vec<usize>> = vec![Vec::new(); bundle.report.num_segments()];
    for e in alignment.map().iter().filter(|e| !e.irrelevant) {
        sources[e.r_seg].push(e.t_seg);
    }
    Ok(bundle
        .report
        .segments()
        .iter()
        .zip(sources)
        .enumerate()
        .filter(|(_, (_, src))| !src.is_empty())
        .map(|(r_seg, (seg, src))| {
            let sentences: Vec<Sentence> = src
                .iter()
                .flat_map(|&m| bundle.transcription.segment_sentences(m))
                .cloned()
                .collect();
            TrainingPair {
                meeting_id: bundle.meeting_id.clone(),
                r_seg,
                src: join_sentences(&sentences),
                tgt: seg.text(),
                src_words: src.iter().map(|&m| bundle.transcription.segment_words(m)).sum(),
                tgt_words: seg.words(),
                src_sentences: sentences.len(),
                tgt_sentences: seg.sentences.len(),
            }
        })
        .collect())
}

pub fn extract_pairs(bundle: &MeetingBundle, alignment: &SegmentAlignment, filter: &PairFilter) -> Result<Vec<TrainingPair>> {
    Ok(candidate_pairs(bundle, alignment)?
        .into_iter()
        .filter(|p| pair_filter(p, filter))
        .collect())
}

/// Writes one JSON object per line (LF endings).
pub fn write_jsonl<W: Write>(pairs: &[TrainingPair], mut out: W) -> std::io::Result<()> {
    for p in pairs {
        serde_json::to_writer(&mut out, p)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_pairs(pairs: &[TrainingPair], path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_jsonl(pairs, &mut buf).map_err(|e| Error::io(path, e))?;
    fsio::write_atomic(path, &buf)
}

pub fn read_pairs(path: &Path) -> Result<Vec<TrainingPair>> {
    fsio::read_to_string(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::parse(format!("{} line {}", path.display(), i + 1), e)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AlignmentEntry, AlignmentSource, ReportDoc, TranscriptionDoc};

    fn words(n: usize) -> String {
        vec!["mot"; n].join(" ")
    }

    /// Transcription segments given as sentence word counts.
    fn bundle(t: &[&[usize]], r: &[&[usize]]) -> MeetingBundle {
        let mut sentences = Vec::new();
        let mut segments = Vec::new();
        for seg in t {
            let start = sentences.len();
            for &w in *seg {
                sentences.push(Sentence::new(sentences.len(), words(w)).unwrap());
            }
            segments.push(start..sentences.len());
        }
        MeetingBundle {
            meeting_id: "m".into(),
            transcription: TranscriptionDoc::new(sentences, segments).unwrap(),
            report: ReportDoc::from_texts(r.iter().map(|seg| (None, seg.iter().map(|&w| words(w)).collect::<Vec<_>>())))
                .unwrap(),
        }
    }

    fn align(targets: &[usize]) -> SegmentAlignment {
        SegmentAlignment::from_targets("m", AlignmentSource::Gold, None, targets).unwrap()
    }

    #[test]
    fn filter_bounds_inclusive() {
        let f = PairFilter::default();
        assert!(f.accepts(1000, 50));
        assert!(f.accepts(10, 3));
        assert!(!f.accepts(1001, 50));
        assert!(!f.accepts(9, 3));
        assert!(!f.accepts(10, 2));
        assert!(!f.accepts(10, 51));
    }

    #[test]
    fn nine_word_source_dropped_ten_kept() {
        let b = bundle(&[&[3, 3, 3], &[4, 3, 3]], &[&[4, 3, 3], &[4, 3, 3]]);
        let p = extract_pairs(&b, &align(&[0, 1]), &PairFilter::default()).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].r_seg, 1);
        assert_eq!(p[0].src_words, 10);
        assert_eq!(p[0].tgt_words, 10);
    }

    #[test]
    fn unaligned_report_segment_dropped() {
        let b = bundle(&[&[4, 3, 3], &[4, 3, 3]], &[&[4, 3, 3], &[4, 3, 3]]);
        let p = extract_pairs(&b, &align(&[1, 1]), &PairFilter::default()).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].r_seg, 1);
        assert_eq!(p[0].src_words, 20);
        assert_eq!(p[0].src_sentences, 6);
    }

    #[test]
    fn irrelevant_segments_excluded_from_sources() {
        let b = bundle(&[&[4, 3, 3], &[4, 3, 3]], &[&[4, 3, 3]]);
        let a = SegmentAlignment::new(
            "m",
            AlignmentSource::Gold,
            None,
            0,
            vec![
                AlignmentEntry { t_seg: 0, r_seg: 0, irrelevant: true },
                AlignmentEntry { t_seg: 1, r_seg: 0, irrelevant: false },
            ],
        )
        .unwrap();
        let p = extract_pairs(&b, &a, &PairFilter::default()).unwrap();
        assert_eq!(p[0].src_words, 10);
    }

    #[test]
    fn jsonl_fields() {
        let b = bundle(&[&[4, 3, 3]], &[&[4, 3, 3]]);
        let p = extract_pairs(&b, &align(&[0]), &PairFilter::default()).unwrap();
        let mut out = Vec::new();
        write_jsonl(&p, &mut out).unwrap();
        let line = String::from_utf8(out).unwrap();
        assert!(line.ends_with('\n'));
        let v: serde_json::Value = serde_json::from_str(line.trim_end()).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort();
        assert_eq!(keys, ["meeting_id", "r_seg", "src", "src_words", "tgt", "tgt_words"]);
    }
}
