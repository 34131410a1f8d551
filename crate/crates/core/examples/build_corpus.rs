//! Extracting filtered (transcription, report) training pairs from the
//! gold alignment of the demo meeting.

use std::path::Path;

use alignsum::corpus::{load_alignment, MeetingBundle};
use alignsum::corpus_builder::{candidate_pairs, extract_pairs, write_jsonl, PairFilter};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/demo");
    let bundle = MeetingBundle::load_dir(&dir)?;
    let gold = load_alignment(&dir.join("gold.json"))?;
    let all = candidate_pairs(&bundle, &gold)?;
    let kept = extract_pairs(&bundle, &gold, &PairFilter::default())?;
    println!("{} candidate pairs, {} pass the filter", all.len(), kept.len());
    let mut out = Vec::new();
    write_jsonl(&kept, &mut out)?;
    print!("{}", String::from_utf8_lossy(&out));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("build corpus");
}
