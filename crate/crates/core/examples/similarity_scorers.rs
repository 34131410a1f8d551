//! Every sentence scorer on the same pair of sentences.

use std::path::Path;
use std::sync::Arc;

use alignsum::similarity::{EmbeddingTable, Pooling, Scorer, ScorerKind};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let table = Arc::new(EmbeddingTable::load_word2vec_text(&fixtures.join("embeddings.txt"), None)?);
    let t = ["alors pour la cantine scolaire le budget augmente de huit pour cent"];
    let r = ["Le budget de la cantine scolaire augmente de huit pour cent cette année."];
    for kind in ScorerKind::ALL {
        let scorer = Scorer::for_meeting(kind, Pooling::Sum, &t, &r, Some(&table))?;
        println!("{:<17} {:.4}", kind.name(), scorer.score(t[0], r[0])?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("similarity scorers");
}
