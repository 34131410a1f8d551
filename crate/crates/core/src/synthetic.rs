//! Seeded toy meetings with known gold alignments.
//!
//! Every report segment gets its own topic vocabulary (`t<n>w<k>` tokens).
//! Report sentences mix topic words with a shared filler vocabulary, and the
//! matching transcription segment does the same with more filler, so that
//! lexical and embedding scorers can recover the alignment while the
//! diagonal baseline only can when lengths are proportional.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{AlignmentSource, MeetingBundle, ReportDoc, SegmentAlignment, Sentence, TranscriptionDoc};
use crate::error::Result;
use crate::similarity::EmbeddingTable;

const FILLER: [&str; 12] = [
    "le", "la", "de", "et", "nous", "pour", "que", "est", "une", "dans", "donc", "alors",
];

/// Topic words per report segment.
pub const TOPIC_WORDS: usize = 8;

/// How transcription segment lengths relate to report segment lengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verbosity {
    /// Each transcription segment has exactly `k` sentences per report sentence.
    Proportional(usize),
    /// Each transcription segment draws its length uniformly in `min..=max`.
    Shuffled { min: usize, max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeetingShape {
    pub report_segments: usize,
    /// Inclusive range of sentences per report segment.
    pub report_sentences: (usize, usize),
    pub verbosity: Verbosity,
}

impl Default for MeetingShape {
    fn default() -> Self {
        MeetingShape {
            report_segments: 5,
            report_sentences: (1, 3),
            verbosity: Verbosity::Proportional(2),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticMeeting {
    pub bundle: MeetingBundle,
    pub gold: SegmentAlignment,
}

pub fn topic_word(topic: usize, k: usize) -> String {
    format!("t{topic}w{k}")
}

fn sentence(rng: &mut ChaCha8Rng, topic: usize, topic_share: f64) -> String {
    let len = rng.random_range(5..=9);
    let mut words = Vec::with_capacity(len);
    for _ in 0..len {
        if rng.random_bool(topic_share) {
            words.push(topic_word(topic, rng.random_range(0..TOPIC_WORDS)));
        } else {
            words.push(FILLER.choose(rng).expect("filler is non-empty").to_string());
        }
    }
    // at least one topic word so no sentence is pure filler
    words[0] = topic_word(topic, rng.random_range(0..TOPIC_WORDS));
    words.join(" ") + "."
}

/// One meeting whose gold alignment is the identity over segments.
pub fn generate_meeting(id: &str, shape: &MeetingShape, rng: &mut ChaCha8Rng) -> Result<SyntheticMeeting> {
    let (lo, hi) = shape.report_sentences;
    let mut report = Vec::with_capacity(shape.report_segments);
    let mut t_sentences = Vec::new();
    let mut t_segments = Vec::new();
    for n in 0..shape.report_segments {
        let r_len = rng.random_range(lo.max(1)..=hi.max(lo.max(1)));
        let r: Vec<String> = (0..r_len).map(|_| sentence(rng, n, 0.5)).collect();
        let t_len = match shape.verbosity {
            Verbosity::Proportional(k) => k.max(1) * r_len,
            Verbosity::Shuffled { min, max } => rng.random_range(min.max(1)..=max.max(min.max(1))),
        };
        let start = t_sentences.len();
        for _ in 0..t_len {
            let text = sentence(rng, n, 0.35);
            t_sentences.push(Sentence::new(t_sentences.len(), text)?);
        }
        t_segments.push(start..t_sentences.len());
        report.push((Some(format!("S{}", n % 3)), r));
    }
    let bundle = MeetingBundle {
        meeting_id: id.to_string(),
        transcription: TranscriptionDoc::new(t_sentences, t_segments)?,
        report: ReportDoc::from_texts(report)?,
    };
    let targets: Vec<usize> = (0..shape.report_segments).collect();
    let gold = SegmentAlignment::from_targets(id, AlignmentSource::Gold, None, &targets)?;
    Ok(SyntheticMeeting { bundle, gold })
}

/// `count` meetings from one seed, named `<prefix>000`, `<prefix>001`, ...
pub fn generate_corpus(prefix: &str, count: usize, shape: &MeetingShape, seed: u64) -> Result<Vec<SyntheticMeeting>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| generate_meeting(&format!("{prefix}{i:03}"), shape, &mut rng))
        .collect()
}

/// Word vectors for the synthetic vocabulary: topic words cluster around a
/// random direction per topic, filler words are short random vectors.
pub fn synthetic_embeddings(topics: usize, dim: usize, seed: u64) -> Result<EmbeddingTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = EmbeddingTable::new(dim)?;
    let random = |rng: &mut ChaCha8Rng, scale: f32| -> Vec<f32> {
        (0..dim).map(|_| rng.random_range(-1.0f32..1.0) * scale).collect()
    };
    for w in FILLER {
        let v = random(&mut rng, 0.2);
        table.insert(w, &v)?;
    }
    for n in 0..topics {
        let centroid = random(&mut rng, 1.0);
        for k in 0..TOPIC_WORDS {
            let noise = random(&mut rng, 0.3);
            let v: Vec<f32> = centroid.iter().zip(&noise).map(|(c, e)| c + e).collect();
            table.insert(topic_word(n, k), &v)?;
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proportional_lengths() {
        let shape = MeetingShape { verbosity: Verbosity::Proportional(3), ..Default::default() };
        let m = &generate_corpus("p", 1, &shape, 7).unwrap()[0];
        let t = &m.bundle.transcription;
        for (n, seg) in m.bundle.report.segments().iter().enumerate() {
            assert_eq!(t.segments()[n].len(), 3 * seg.sentences.len());
        }
        m.gold.validate_against(&m.bundle).unwrap();
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = generate_corpus("x", 2, &MeetingShape::default(), 11).unwrap();
        let b = generate_corpus("x", 2, &MeetingShape::default(), 11).unwrap();
        assert_eq!(a[1].bundle, b[1].bundle);
    }

    #[test]
    fn embeddings_cover_vocabulary() {
        let t = synthetic_embeddings(3, 8, 1).unwrap();
        assert_eq!(t.len(), FILLER.len() + 3 * TOPIC_WORDS);
        assert!(t.get("t2w7").is_some());
    }
}
