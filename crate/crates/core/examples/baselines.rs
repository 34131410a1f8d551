//! TextTiling and C99 on the demo transcription, and the alignment their
//! boundaries induce.

use std::path::Path;

use alignsum::baselines::{boundaries_to_alignment, c99, texttiling, TextTilingParams, DEFAULT_RANK_MASK};
use alignsum::corpus::MeetingBundle;
use alignsum::similarity::tokenize;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let bundle = MeetingBundle::load_dir(&Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/demo"))?;
    let tokens: Vec<Vec<String>> = bundle.transcription.sentences().iter().map(|s| tokenize(&s.text)).collect();

    let tiling = texttiling(&tokens, &TextTilingParams::default());
    println!("texttiling boundaries {tiling:?}");
    let n = bundle.report.num_segments();
    let divisive = c99(&tokens, n, DEFAULT_RANK_MASK)?;
    println!("c99 boundaries ({n} segments) {divisive:?}");
    println!("c99 alignment {:?}", boundaries_to_alignment(&divisive, &bundle)?.targets());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("baselines");
}
