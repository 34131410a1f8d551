//! Document and alignment data model, plus the JSON formats they live in.
//!
//! A meeting is a pair of documents: the ASR transcription (sentences grouped
//! into speaker segments by the recognizer) and the written report (segments
//! opened by speaker mentions). All ids are 0-based.
//!
//! On-disk formats:
//!
//! ```text
//! transcription.json  {"sentences":[{"id":0,"text":"..."}],"segments":[{"id":0,"sentence_ids":[0,1]}]}
//! report.json         {"segments":[{"id":0,"speaker":"A","sentences":["...", "..."]}]}
//! alignment.json      {"meeting_id":"m1","source":"auto","revision":0,"config":null,
//!                      "map":[{"t_seg":0,"r_seg":0,"irrelevant":false}]}
//! ```
//!
//! Unknown fields are ignored on read and never written back.

use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsio;
use crate::gridsearch::AlignConfig;

/// Number of unicode-whitespace separated tokens.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub id: usize,
    pub text: String,
    pub word_count: usize,
}

impl Sentence {
    pub fn new(id: usize, text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(Error::validation(format!("sentence {id} is empty")));
        }
        let word_count = word_count(&text);
        Ok(Sentence {
            id,
            text,
            word_count,
        })
    }
}

fn check_sentence_ids(sentences: &[Sentence], first: usize, what: &str) -> Result<()> {
    for (offset, s) in sentences.iter().enumerate() {
        if s.id != first + offset {
            return Err(Error::validation(format!(
                "{what} sentence ids must be consecutive: expected {}, found {}",
                first + offset,
                s.id
            )));
        }
    }
    Ok(())
}

/// ASR transcription: the sentence list and its partition into segments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptionDoc {
    sentences: Vec<Sentence>,
    segments: Vec<Range<usize>>,
}

impl TranscriptionDoc {
    /// Segments must be non-empty, contiguous and cover every sentence in order.
    pub fn new(sentences: Vec<Sentence>, segments: Vec<Range<usize>>) -> Result<Self> {
        if sentences.is_empty() {
            return Err(Error::validation("transcription has no sentences"));
        }
        check_sentence_ids(&sentences, 0, "transcription")?;
        if segments.is_empty() {
            return Err(Error::validation("transcription has no segments"));
        }
        let mut next = 0;
        for (m, seg) in segments.iter().enumerate() {
            if seg.start != next {
                return Err(Error::validation(format!(
                    "transcription segment {m} starts at sentence {} but sentence {next} is \
                     {}",
                    seg.start,
                    if seg.start > next {
                        "not covered"
                    } else {
                        "covered twice"
                    }
                )));
            }
            if seg.end <= seg.start {
                return Err(Error::validation(format!(
                    "transcription segment {m} is empty"
                )));
            }
            next = seg.end;
        }
        if next != sentences.len() {
            return Err(Error::validation(format!(
                "transcription segments cover {next} of {} sentences",
                sentences.len()
            )));
        }
        Ok(TranscriptionDoc {
            sentences,
            segments,
        })
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn segments(&self) -> &[Range<usize>] {
        &self.segments
    }

    pub fn num_sentences(&self) -> usize {
        self.sentences.len()
    }

    pub fn num_segments(&self) -> usize {
        self.segments.len()
    }

    pub fn segment_sentences(&self, m: usize) -> &[Sentence] {
        &self.sentences[self.segments[m].clone()]
    }

    pub fn segment_words(&self, m: usize) -> usize {
        self.segment_sentences(m).iter().map(|s| s.word_count).sum()
    }

    pub fn texts(&self) -> Vec<&str> {
        self.sentences.iter().map(|s| s.text.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportSegment {
    pub speaker: Option<String>,
    pub sentences: Vec<Sentence>,
}

impl ReportSegment {
    pub fn words(&self) -> usize {
        self.sentences.iter().map(|s| s.word_count).sum()
    }

    pub fn text(&self) -> String {
        join_sentences(&self.sentences)
    }
}

/// Written report: speaker segments whose sentence ids run globally from 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportDoc {
    segments: Vec<ReportSegment>,
}

impl ReportDoc {
    pub fn new(segments: Vec<ReportSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::validation("report has no segments"));
        }
        let mut next = 0;
        for (n, seg) in segments.iter().enumerate() {
            if seg.sentences.is_empty() {
                return Err(Error::validation(format!("report segment {n} has no sentences")));
            }
            check_sentence_ids(&seg.sentences, next, "report")?;
            next += seg.sentences.len();
        }
        Ok(ReportDoc { segments })
    }

    /// Builds a report from per-segment sentence texts, numbering sentences globally.
    pub fn from_texts<S: Into<String>>(
        segments: impl IntoIterator<Item = (Option<String>, Vec<S>)>,
    ) -> Result<Self> {
        let mut next = 0;
        let mut out = Vec::new();
        for (speaker, texts) in segments {
            let mut sentences = Vec::with_capacity(texts.len());
            for text in texts {
                sentences.push(Sentence::new(next, text)?);
                next += 1;
            }
            out.push(ReportSegment { speaker, sentences });
        }
        ReportDoc::new(out)
    }

    pub fn segments(&self) -> &[ReportSegment] {
        &self.segments
    }

    pub fn num_segments(&self) -> usize {
        self.segments.len()
    }

    pub fn sentences(&self) -> impl Iterator<Item = &Sentence> {
        self.segments.iter().flat_map(|s| s.sentences.iter())
    }

    pub fn num_sentences(&self) -> usize {
        self.segments.iter().map(|s| s.sentences.len()).sum()
    }

    /// Sentence-id range of every segment.
    pub fn segment_ranges(&self) -> Vec<Range<usize>> {
        let mut start = 0;
        self.segments
            .iter()
            .map(|s| {
                let r = start..start + s.sentences.len();
                start = r.end;
                r
            })
            .collect()
    }

    pub fn texts(&self) -> Vec<&str> {
        self.sentences().map(|s| s.text.as_str()).collect()
    }
}

pub(crate) fn join_sentences(sentences: &[Sentence]) -> String {
    sentences
        .iter()
        .map(|s| s.text.trim())
        .collect::<Vec<_>>()
        .join(" ")
}

/// One meeting: both documents under a stable id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeetingBundle {
    pub meeting_id: String,
    pub transcription: TranscriptionDoc,
    pub report: ReportDoc,
}

impl MeetingBundle {
    /// Loads `transcription.json` and `report.json` from `dir`; the directory
    /// name becomes the meeting id.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        load_meeting_bundle(&dir.join("transcription.json"), &dir.join("report.json"))
    }

    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        write_transcription(&self.transcription, &dir.join("transcription.json"))?;
        write_report(&self.report, &dir.join("report.json"))
    }
}

// ---------------------------------------------------------------------------
// File records

#[derive(Debug, Serialize, Deserialize)]
struct SentenceRecord {
    id: usize,
    text: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct TranscriptionSegmentRecord {
    id: usize,
    sentence_ids: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TranscriptionFile {
    sentences: Vec<SentenceRecord>,
    segments: Vec<TranscriptionSegmentRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ReportSegmentRecord {
    id: usize,
    speaker: Option<String>,
    sentences: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ReportFile {
    segments: Vec<ReportSegmentRecord>,
}

fn transcription_from_file(file: TranscriptionFile) -> Result<TranscriptionDoc> {
    let sentences = file
        .sentences
        .into_iter()
        .map(|r| Sentence::new(r.id, r.text))
        .collect::<Result<Vec<_>>>()?;
    let mut segments = Vec::with_capacity(file.segments.len());
    for (m, seg) in file.segments.iter().enumerate() {
        if seg.id != m {
            return Err(Error::validation(format!(
                "transcription segment ids must be consecutive: expected {m}, found {}",
                seg.id
            )));
        }
        let Some(&first) = seg.sentence_ids.first() else {
            return Err(Error::validation(format!("transcription segment {m} is empty")));
        };
        for (k, &id) in seg.sentence_ids.iter().enumerate() {
            if id != first + k {
                return Err(Error::validation(format!(
                    "transcription segment {m} is not contiguous at sentence {id}"
                )));
            }
        }
        segments.push(first..first + seg.sentence_ids.len());
    }
    TranscriptionDoc::new(sentences, segments)
}

fn report_from_file(file: ReportFile) -> Result<ReportDoc> {
    for (n, seg) in file.segments.iter().enumerate() {
        if seg.id != n {
            return Err(Error::validation(format!(
                "report segment ids must be consecutive: expected {n}, found {}",
                seg.id
            )));
        }
    }
    ReportDoc::from_texts(file.segments.into_iter().map(|s| (s.speaker, s.sentences)))
}

pub fn parse_transcription(json: &str) -> Result<TranscriptionDoc> {
    let file: TranscriptionFile =
        serde_json::from_str(json).map_err(|e| Error::parse("transcription", e))?;
    transcription_from_file(file)
}

pub fn parse_report(json: &str) -> Result<ReportDoc> {
    let file: ReportFile = serde_json::from_str(json).map_err(|e| Error::parse("report", e))?;
    report_from_file(file)
}

pub fn load_transcription(path: &Path) -> Result<TranscriptionDoc> {
    let file: TranscriptionFile = fsio::read_json(path)?;
    transcription_from_file(file)
}

pub fn load_report(path: &Path) -> Result<ReportDoc> {
    let file: ReportFile = fsio::read_json(path)?;
    report_from_file(file)
}

/// Loads and validates both documents of a meeting. The meeting id is the
/// name of the directory holding the transcription file.
pub fn load_meeting_bundle(transcription_path: &Path, report_path: &Path) -> Result<MeetingBundle> {
    let transcription = load_transcription(transcription_path)?;
    let report = load_report(report_path)?;
    let meeting_id = transcription_path
        .parent()
        .and_then(|p| p.file_name())
        .or_else(|| transcription_path.file_stem())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(MeetingBundle {
        meeting_id,
        transcription,
        report,
    })
}

pub fn write_transcription(doc: &TranscriptionDoc, path: &Path) -> Result<()> {
    let file = TranscriptionFile {
        sentences: doc
            .sentences
            .iter()
            .map(|s| SentenceRecord {
                id: s.id,
                text: s.text.clone(),
            })
            .collect(),
        segments: doc
            .segments
            .iter()
            .enumerate()
            .map(|(m, r)| TranscriptionSegmentRecord {
                id: m,
                sentence_ids: r.clone().collect(),
            })
            .collect(),
    };
    fsio::write_json(path, &file)
}

pub fn write_report(doc: &ReportDoc, path: &Path) -> Result<()> {
    fsio::write_json(path, &report_file(doc))
}

fn report_file(doc: &ReportDoc) -> ReportFile {
    ReportFile {
        segments: doc
            .segments
            .iter()
            .enumerate()
            .map(|(n, s)| ReportSegmentRecord {
                id: n,
                speaker: s.speaker.clone(),
                sentences: s.sentences.iter().map(|x| x.text.clone()).collect(),
            })
            .collect(),
    }
}

pub fn report_to_json(doc: &ReportDoc) -> String {
    let mut s = serde_json::to_string_pretty(&report_file(doc)).expect("report serializes");
    s.push('\n');
    s
}

// ---------------------------------------------------------------------------
// Segment alignments

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlignmentSource {
    Gold,
    Auto,
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentEntry {
    pub t_seg: usize,
    pub r_seg: usize,
    pub irrelevant: bool,
}

/// Total, monotone map from transcription segments to report segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AlignmentRecord")]
pub struct SegmentAlignment {
    meeting_id: String,
    source: AlignmentSource,
    revision: u64,
    config: Option<AlignConfig>,
    map: Vec<AlignmentEntry>,
}

#[derive(Deserialize)]
struct AlignmentRecord {
    meeting_id: String,
    source: AlignmentSource,
    #[serde(default)]
    revision: u64,
    #[serde(default)]
    config: Option<AlignConfig>,
    map: Vec<AlignmentEntry>,
}

impl TryFrom<AlignmentRecord> for SegmentAlignment {
    type Error = Error;

    fn try_from(r: AlignmentRecord) -> Result<Self> {
        SegmentAlignment::new(r.meeting_id, r.source, r.config, r.revision, r.map)
    }
}

/// First index where the map decreases, reported against its left neighbor.
fn check_monotone(map: &[AlignmentEntry]) -> Result<()> {
    for pair in map.windows(2) {
        if pair[1].r_seg < pair[0].r_seg {
            return Err(Error::Monotonicity {
                t_seg: pair[1].t_seg,
                r_seg: pair[1].r_seg,
                neighbor_t_seg: pair[0].t_seg,
                neighbor_r_seg: pair[0].r_seg,
            });
        }
    }
    Ok(())
}

impl SegmentAlignment {
    pub fn new(
        meeting_id: impl Into<String>,
        source: AlignmentSource,
        config: Option<AlignConfig>,
        revision: u64,
        map: Vec<AlignmentEntry>,
    ) -> Result<Self> {
        if map.is_empty() {
            return Err(Error::validation("alignment map is empty"));
        }
        for (m, e) in map.iter().enumerate() {
            if e.t_seg != m {
                return Err(Error::validation(format!(
                    "alignment map must list every t_seg in order: expected {m}, found {}",
                    e.t_seg
                )));
            }
        }
        check_monotone(&map)?;
        Ok(SegmentAlignment {
            meeting_id: meeting_id.into(),
            source,
            revision,
            config,
            map,
        })
    }

    /// Builds a map with `irrelevant = false` everywhere from `targets[m] = f(m)`.
    pub fn from_targets(
        meeting_id: impl Into<String>,
        source: AlignmentSource,
        config: Option<AlignConfig>,
        targets: &[usize],
    ) -> Result<Self> {
        let map = targets
            .iter()
            .enumerate()
            .map(|(t_seg, &r_seg)| AlignmentEntry {
                t_seg,
                r_seg,
                irrelevant: false,
            })
            .collect();
        SegmentAlignment::new(meeting_id, source, config, 0, map)
    }

    pub fn meeting_id(&self) -> &str {
        &self.meeting_id
    }

    pub fn source(&self) -> AlignmentSource {
        self.source
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn config(&self) -> Option<&AlignConfig> {
        self.config.as_ref()
    }

    pub fn map(&self) -> &[AlignmentEntry] {
        &self.map
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn targets(&self) -> Vec<usize> {
        self.map.iter().map(|e| e.r_seg).collect()
    }

    pub fn with_source(mut self, source: AlignmentSource) -> Self {
        self.source = source;
        self
    }

    pub fn with_revision(mut self, revision: u64) -> Self {
        self.revision = revision;
        self
    }

    /// Replaces one entry, refusing the change if it breaks monotonicity with
    /// either neighbor.
    pub fn with_entry(&self, entry: AlignmentEntry) -> Result<Self> {
        let m = entry.t_seg;
        if m >= self.map.len() {
            return Err(Error::validation(format!(
                "t_seg {m} out of range (meeting has {} transcription segments)",
                self.map.len()
            )));
        }
        if m > 0 {
            let left = self.map[m - 1];
            if entry.r_seg < left.r_seg {
                return Err(Error::Monotonicity {
                    t_seg: m,
                    r_seg: entry.r_seg,
                    neighbor_t_seg: left.t_seg,
                    neighbor_r_seg: left.r_seg,
                });
            }
        }
        if let Some(right) = self.map.get(m + 1) {
            if entry.r_seg > right.r_seg {
                return Err(Error::Monotonicity {
                    t_seg: m,
                    r_seg: entry.r_seg,
                    neighbor_t_seg: right.t_seg,
                    neighbor_r_seg: right.r_seg,
                });
            }
        }
        let mut out = self.clone();
        out.map[m] = entry;
        Ok(out)
    }

    /// Checks the alignment fits `bundle`: same meeting, one entry per
    /// transcription segment, every target a valid report segment.
    pub fn validate_against(&self, bundle: &MeetingBundle) -> Result<()> {
        if self.meeting_id != bundle.meeting_id {
            return Err(Error::validation(format!(
                "alignment is for meeting {:?}, bundle is {:?}",
                self.meeting_id, bundle.meeting_id
            )));
        }
        let expected = bundle.transcription.num_segments();
        if self.map.len() != expected {
            return Err(Error::validation(format!(
                "alignment has {} entries, meeting {} has {expected} transcription segments",
                self.map.len(),
                bundle.meeting_id
            )));
        }
        let n = bundle.report.num_segments();
        if let Some(e) = self.map.iter().find(|e| e.r_seg >= n) {
            return Err(Error::validation(format!(
                "t_seg {} maps to r_seg {} but the report has {n} segments",
                e.t_seg, e.r_seg
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("alignment serializes");
        s.push('\n');
        s
    }

    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::parse("alignment", e))
    }
}

pub fn load_alignment(path: &Path) -> Result<SegmentAlignment> {
    let text = fsio::read_to_string(path)?;
    SegmentAlignment::from_json(&text).map_err(|e| match e {
        Error::Parse { message, .. } => Error::parse(path.display().to_string(), message),
        other => other,
    })
}

/// Writes the alignment atomically. Values can only be built through the
/// validating constructors, so whatever reaches here already holds the
/// totality and monotonicity invariants; the map is re-checked anyway.
pub fn write_alignment(alignment: &SegmentAlignment, path: &Path) -> Result<()> {
    check_monotone(&alignment.map)?;
    fsio::write_atomic(path, alignment.to_json().as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(t_seg: usize, r_seg: usize) -> AlignmentEntry {
        AlignmentEntry {
            t_seg,
            r_seg,
            irrelevant: false,
        }
    }

    fn sentences(n: usize) -> Vec<Sentence> {
        (0..n)
            .map(|i| Sentence::new(i, format!("phrase numéro {i}.")).unwrap())
            .collect()
    }

    #[test]
    fn minimal_bundle() {
        let dir = tempfile::tempdir().unwrap();
        let m = dir.path().join("m1");
        std::fs::create_dir(&m).unwrap();
        std::fs::write(
            m.join("transcription.json"),
            r#"{"sentences":[{"id":0,"text":"bonjour à tous"}],"segments":[{"id":0,"sentence_ids":[0]}]}"#,
        )
        .unwrap();
        std::fs::write(
            m.join("report.json"),
            r#"{"segments":[{"id":0,"speaker":null,"sentences":["Bonjour."]}],"extra":1}"#,
        )
        .unwrap();
        let b = MeetingBundle::load_dir(&m).unwrap();
        assert_eq!(b.meeting_id, "m1");
        assert_eq!(b.transcription.num_sentences(), 1);
        assert_eq!(b.report.num_segments(), 1);
        assert_eq!(b.transcription.sentences()[0].word_count, 3);
    }

    #[test]
    fn two_transcription_segments() {
        let doc = parse_transcription(
            r#"{"sentences":[{"id":0,"text":"a"},{"id":1,"text":"b"},{"id":2,"text":"c"}],
                "segments":[{"id":0,"sentence_ids":[0,1]},{"id":1,"sentence_ids":[2]}]}"#,
        )
        .unwrap();
        assert_eq!(doc.num_segments(), 2);
        assert_eq!(doc.segments(), &[0..2, 2..3]);
    }

    #[test]
    fn gap_in_segments_is_rejected() {
        let err = parse_transcription(
            r#"{"sentences":[{"id":0,"text":"a"},{"id":1,"text":"b"},{"id":2,"text":"c"}],
                "segments":[{"id":0,"sentence_ids":[0]},{"id":1,"sentence_ids":[2]}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn overlap_and_empty_documents_are_rejected() {
        assert!(TranscriptionDoc::new(sentences(3), vec![0..2, 1..3]).is_err());
        assert!(TranscriptionDoc::new(vec![], vec![]).is_err());
        assert!(TranscriptionDoc::new(sentences(2), vec![0..1]).is_err());
        assert!(ReportDoc::new(vec![]).is_err());
        assert!(Sentence::new(0, "   ").is_err());
        assert!(parse_report(r#"{"segments":[{"id":0,"speaker":null,"sentences":[]}]}"#).is_err());
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(
            parse_transcription("{\"sentences\": ["),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn alignment_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("alignment.json");
        let a = SegmentAlignment::from_targets("m", AlignmentSource::Auto, None, &[0, 0, 1]).unwrap();
        write_alignment(&a, &path).unwrap();
        let back = load_alignment(&path).unwrap();
        assert_eq!(a, back);
        // byte-stable
        write_alignment(&back, &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), a.to_json());
    }

    #[test]
    fn non_monotone_map_is_refused() {
        let err = SegmentAlignment::new("m", AlignmentSource::Gold, None, 0, vec![entry(0, 1), entry(1, 0)])
            .unwrap_err();
        assert!(matches!(
            err,
            Error::Monotonicity {
                t_seg: 1,
                neighbor_t_seg: 0,
                ..
            }
        ));
        let json = r#"{"meeting_id":"m","source":"gold","revision":0,"config":null,
            "map":[{"t_seg":0,"r_seg":1,"irrelevant":false},{"t_seg":1,"r_seg":0,"irrelevant":false}]}"#;
        assert!(SegmentAlignment::from_json(json).is_err());
    }

    #[test]
    fn partial_map_is_refused() {
        let err = SegmentAlignment::new("m", AlignmentSource::Gold, None, 0, vec![entry(0, 0), entry(2, 0)])
            .unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn with_entry_names_the_violating_neighbor() {
        let a = SegmentAlignment::from_targets("m", AlignmentSource::Gold, None, &[0, 1, 1, 1, 2]).unwrap();
        let ok = a.with_entry(entry(3, 2)).unwrap();
        assert_eq!(ok.targets(), vec![0, 1, 1, 2, 2]);
        match a.with_entry(entry(3, 0)).unwrap_err() {
            Error::Monotonicity {
                neighbor_t_seg,
                neighbor_r_seg,
                ..
            } => assert_eq!((neighbor_t_seg, neighbor_r_seg), (2, 1)),
            other => panic!("unexpected {other}"),
        }
    }
}
