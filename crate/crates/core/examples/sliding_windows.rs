//! Sentence-level versus windowed similarity on the demo meeting.

use std::path::Path;

use alignsum::corpus::MeetingBundle;
use alignsum::similarity::{similarity_matrix, Pooling, Scorer, ScorerKind};
use alignsum::windows::{make_windows, windowed_similarity, Aggregation, Reduction, WindowConfig};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let bundle = MeetingBundle::load_dir(&Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/demo"))?;
    let t = bundle.transcription.texts();
    let r = bundle.report.texts();
    let scorer = Scorer::for_meeting(ScorerKind::TfidfCosine, Pooling::Sum, &t, &r, None)?;
    let cfg = WindowConfig {
        size: 3,
        overlap: 1,
        agg: Aggregation::Sum,
        red: Reduction::Product,
    };
    let windows = make_windows(t.len(), &cfg)?;
    println!("{} transcription sentences in {} windows:", t.len(), windows.len());
    for w in &windows {
        println!("  window {} covers {:?}", w.index, w.sentences);
    }
    let plain = similarity_matrix(&t, &r, &scorer)?;
    let windowed = windowed_similarity(&t, &r, &scorer, &cfg)?;
    let i = 6;
    println!("sentence {i} vs each report sentence:");
    println!("  plain    {:.3?}", plain.row(i));
    println!("  windowed {:.3?}", windowed.row(i));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("sliding windows");
}
