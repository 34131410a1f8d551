//! Scoring a hypothesis alignment against gold, and the boundary metrics
//! on their own.

use std::path::Path;

use alignsum::alignment::diagonal_alignment;
use alignsum::corpus::{load_alignment, MeetingBundle};
use alignsum::metrics::{evaluate_file, pk, summarize, windowdiff};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/demo");
    let bundle = MeetingBundle::load_dir(&dir)?;
    let gold = load_alignment(&dir.join("gold.json"))?;
    let hyp = diagonal_alignment(&bundle)?;
    let eval = evaluate_file(&gold, &hyp, &bundle)?;
    println!("diagonal on {}: {:?}", eval.meeting_id, eval.accuracy);
    println!("windowdiff {:.3}, pk {:.3} (k = {})", eval.windowdiff, eval.pk, eval.k);
    println!("micro: {:?}", summarize(&[eval])?);

    // boundaries after sentence 2 versus after sentence 3, five sentences
    println!("wd = {:.4}", windowdiff(&[2], &[3], 5, 2)?);
    println!("pk = {:.4}", pk(&[2], &[3], 5, 2)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("evaluate");
}
