//! Correcting a pre-alignment through the annotation store: one edit, a
//! stale edit rejected, submission and the annotator score.

use std::path::Path;

use alignsum::annotation::AnnotationStore;
use alignsum::corpus::{AlignmentEntry, MeetingBundle};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let bundle = MeetingBundle::load_dir(&Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/demo"))?;
    let state = tempfile::tempdir()?;
    // no configuration: pre-alignments come from the diagonal baseline
    let store = AnnotationStore::new(vec![bundle], state.path(), None, None)?;
    let session = store.session("demo")?;
    println!("pre-alignment {:?}", session.pre_alignment.targets());

    // the microphone interruption belongs to no report segment
    let fix = AlignmentEntry { t_seg: 2, r_seg: 2, irrelevant: true };
    let revision = store.submit_correction("demo", fix, session.revision)?;
    println!("corrected t_seg 2, now at revision {revision}");
    if let Err(e) = store.submit_correction("demo", fix, session.revision) {
        println!("stale edit rejected: {e}");
    }
    store.submit("demo", Some(revision))?;
    let progress = store.progress()?;
    println!("annotator score {:?}", progress.mean);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("annotation service");
}
