//! Aligning the demo meeting with tf-idf and with the diagonal baseline.

use std::path::Path;

use alignsum::alignment::{diagonal_alignment, AlignParams};
use alignsum::corpus::MeetingBundle;
use alignsum::gridsearch::AlignConfig;
use alignsum::pipeline::align_meeting;
use alignsum::similarity::ScorerKind;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let bundle = MeetingBundle::load_dir(&Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/demo"))?;
    let config = AlignConfig::sentences(ScorerKind::TfidfCosine, AlignParams::new(4.0, 0.0, 1e-4)?);
    let outcome = align_meeting(&bundle, &config, None)?;
    println!("config   {}", config.canonical());
    println!("path has {} cells", outcome.path.len());
    println!("tf-idf   {:?}", outcome.alignment.targets());
    println!("diagonal {:?}", diagonal_alignment(&bundle)?.targets());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("align meeting");
}
