//! Splitting a raw report on speaker markers and grouping ASR sentences
//! into interventions.

use std::path::Path;

use alignsum::corpus::Sentence;
use alignsum::segmentation::{group_transcription, segment_report_text, SpeakerPatterns};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let patterns = SpeakerPatterns::load(&fixtures.join("patterns.txt"))?;
    let raw = alignsum::fsio::read_to_string(&fixtures.join("report.txt"))?;
    let report = segment_report_text(&raw, &patterns)?;
    for (n, seg) in report.segments().iter().enumerate() {
        println!("[{n}] {:?}: {} sentences", seg.speaker, seg.sentences.len());
    }

    let lines = ["bonsoir à tous", "nous avons le quorum", "passons au budget", "le budget augmente"];
    let sentences = lines
        .iter()
        .enumerate()
        .map(|(i, l)| Sentence::new(i, *l))
        .collect::<alignsum::Result<Vec<_>>>()?;
    let transcription = group_transcription(sentences, &[2])?;
    println!("transcription segments: {:?}", transcription.segments());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("segment report");
}
