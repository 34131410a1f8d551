//! Report segmentation by speaker mentions, and regrouping of ASR sentences.

use std::path::Path;

use crate::corpus::{ReportDoc, Sentence, TranscriptionDoc};
use crate::error::{Error, Result};
use crate::fsio;

const TERMINAL: [char; 4] = ['.', '!', '?', '…'];

fn is_terminal(c: char) -> bool {
    TERMINAL.contains(&c)
}

/// Case-sensitive speaker markers recognised at the start of a line or of a
/// sentence, e.g. `M.` in `M. Dupont. Je vous remercie.`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeakerPatterns {
    patterns: Vec<String>,
}

impl Default for SpeakerPatterns {
    fn default() -> Self {
        SpeakerPatterns::new(["M.", "Mme", "Mlle", "Dr"])
    }
}

impl SpeakerPatterns {
    pub fn new<S: Into<String>>(patterns: impl IntoIterator<Item = S>) -> Self {
        let mut patterns: Vec<String> = patterns
            .into_iter()
            .map(Into::into)
            .filter(|p| !p.is_empty())
            .collect();
        // longest first so that "Mme" wins over a hypothetical "M"
        patterns.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        patterns.dedup();
        SpeakerPatterns { patterns }
    }

    /// One pattern per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Self {
        SpeakerPatterns::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(SpeakerPatterns::parse(&fsio::read_to_string(path)?))
    }

    pub fn patterns(&self) -> &[String] {
        &self.patterns
    }

    /// Byte length of the marker at the start of `text`, including an
    /// optional trailing period, if the marker is followed by whitespace.
    fn match_at(&self, text: &str) -> Option<usize> {
        for p in &self.patterns {
            if let Some(rest) = text.strip_prefix(p.as_str()) {
                let mut len = p.len();
                let rest = match rest.strip_prefix('.') {
                    Some(r) if !p.ends_with('.') => {
                        len += 1;
                        r
                    }
                    _ => rest,
                };
                if rest.chars().next().is_some_and(char::is_whitespace) {
                    return Some(len);
                }
            }
        }
        None
    }
}

#[derive(Debug)]
struct Marker {
    start: usize,
    speaker: String,
    body_start: usize,
}

fn find_markers(text: &str, patterns: &SpeakerPatterns) -> Vec<Marker> {
    let mut markers = Vec::new();
    let mut at_start = true;
    let mut after_terminal = false;
    let mut pos = 0;
    while pos < text.len() {
        let c = text[pos..].chars().next().unwrap();
        if c.is_whitespace() {
            if c == '\n' || after_terminal {
                at_start = true;
            }
            after_terminal = false;
            pos += c.len_utf8();
            continue;
        }
        if at_start {
            if let Some(len) = patterns.match_at(&text[pos..]) {
                let after = pos + len;
                let name_start = after + (text[after..].len() - text[after..].trim_start().len());
                let name_len = text[name_start..]
                    .find(char::is_whitespace)
                    .unwrap_or(text.len() - name_start);
                let raw = &text[name_start..name_start + name_len];
                let speaker = raw.trim_end_matches(['.', ':', ',', ';']).to_string();
                if !speaker.is_empty() {
                    markers.push(Marker {
                        start: pos,
                        speaker,
                        body_start: name_start + name_len,
                    });
                    pos = name_start + name_len;
                    at_start = false;
                    after_terminal = false;
                    continue;
                }
            }
        }
        at_start = false;
        after_terminal = is_terminal(c);
        pos += c.len_utf8();
    }
    markers
}

/// Splits on runs of terminal punctuation followed by whitespace.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut prev_terminal = false;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() && prev_terminal {
            let piece = text[start..i].trim();
            if !piece.is_empty() {
                out.push(piece.to_string());
            }
            start = i;
        }
        prev_terminal = is_terminal(c);
    }
    let piece = text[start..].trim();
    if !piece.is_empty() {
        out.push(piece.to_string());
    }
    out
}

/// Cuts a raw report into speaker segments.
///
/// Every marker match opens a segment; non-blank text before the first
/// marker becomes a speaker-less preamble. A marker with no text after it
/// keeps the marker line itself as its only sentence.
pub fn segment_report_text(raw_text: &str, patterns: &SpeakerPatterns) -> Result<ReportDoc> {
    if raw_text.trim().is_empty() {
        return Err(Error::validation("report text is empty"));
    }
    let markers = find_markers(raw_text, patterns);
    let mut segments: Vec<(Option<String>, Vec<String>)> = Vec::new();
    let preamble_end = markers.first().map_or(raw_text.len(), |m| m.start);
    let preamble = split_sentences(&raw_text[..preamble_end]);
    if !preamble.is_empty() {
        segments.push((None, preamble));
    }
    for (k, m) in markers.iter().enumerate() {
        let end = markers.get(k + 1).map_or(raw_text.len(), |n| n.start);
        let mut sentences = split_sentences(&raw_text[m.body_start..end]);
        if sentences.is_empty() {
            sentences.push(raw_text[m.start..m.body_start].trim().to_string());
        }
        segments.push((Some(m.speaker.clone()), sentences));
    }
    ReportDoc::from_texts(segments)
}

/// Groups ASR sentences into segments starting at each boundary id.
/// A boundary at 0 is accepted and changes nothing.
pub fn group_transcription(sentences: Vec<Sentence>, boundaries: &[usize]) -> Result<TranscriptionDoc> {
    let m = sentences.len();
    let mut starts = vec![0];
    for (k, &b) in boundaries.iter().enumerate() {
        if b >= m {
            return Err(Error::validation(format!(
                "boundary {b} out of range for {m} sentences"
            )));
        }
        if k > 0 && b <= boundaries[k - 1] {
            return Err(Error::validation(format!(
                "boundaries must be strictly increasing ({} then {b})",
                boundaries[k - 1]
            )));
        }
        if b > 0 {
            starts.push(b);
        }
    }
    let segments = starts
        .iter()
        .enumerate()
        .map(|(k, &s)| s..starts.get(k + 1).copied().unwrap_or(m))
        .collect();
    TranscriptionDoc::new(sentences, segments)
}
