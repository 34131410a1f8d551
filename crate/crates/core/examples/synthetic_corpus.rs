//! Seeded synthetic meetings: where the diagonal baseline is exact and
//! where a lexical aligner beats it.

use alignsum::alignment::{diagonal_alignment, AlignParams};
use alignsum::gridsearch::AlignConfig;
use alignsum::metrics::{alignment_accuracy, micro_average};
use alignsum::pipeline::align_meeting;
use alignsum::similarity::ScorerKind;
use alignsum::synthetic::{generate_corpus, MeetingShape, Verbosity};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let config = AlignConfig::sentences(ScorerKind::TfidfCosine, AlignParams::default());
    for verbosity in [Verbosity::Proportional(3), Verbosity::Shuffled { min: 1, max: 10 }] {
        let shape = MeetingShape { verbosity, ..Default::default() };
        let (mut diag, mut lex) = (Vec::new(), Vec::new());
        for m in generate_corpus("syn", 10, &shape, 1)? {
            diag.push(alignment_accuracy(&m.gold, &diagonal_alignment(&m.bundle)?, &m.bundle)?);
            let hyp = align_meeting(&m.bundle, &config, None)?.alignment;
            lex.push(alignment_accuracy(&m.gold, &hyp, &m.bundle)?);
        }
        println!(
            "{verbosity:?}: diagonal {:.3}, tf-idf {:.3}",
            micro_average(&diag)?.seg_acc,
            micro_average(&lex)?.seg_acc
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("synthetic corpus");
}
