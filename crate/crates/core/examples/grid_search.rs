//! A two-stage grid search over a small parameter space, with a result
//! cache, on synthetic meetings.

use std::sync::Arc;

use alignsum::gridsearch::{enumerate_configs, EvalMeeting, GridSearch, ParameterSpace, RankMetric, Stage};
use alignsum::similarity::{Pooling, ScorerKind};
use alignsum::synthetic::{generate_corpus, MeetingShape, Verbosity};
use alignsum::windows::{Aggregation, Reduction};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let shape = MeetingShape {
        verbosity: Verbosity::Shuffled { min: 1, max: 8 },
        ..Default::default()
    };
    let meetings: Vec<Arc<EvalMeeting>> = generate_corpus("grid", 6, &shape, 5)?
        .into_iter()
        .map(|m| EvalMeeting::new(m.bundle, m.gold).map(Arc::new))
        .collect::<alignsum::Result<_>>()?;
    let space = ParameterSpace {
        scorers: vec![ScorerKind::Rouge1F, ScorerKind::TfidfCosine],
        poolings: vec![Pooling::Sum],
        sizes: vec![0, 2],
        overlaps: vec![0, 1],
        aggs: vec![Aggregation::Sum, Aggregation::Cat],
        reds: vec![Reduction::Product],
        powers: vec![1.0, 4.0],
        hds: vec![0.0],
        vds: vec![0.0, 1e-4],
    };
    let configs = enumerate_configs(&space)?;
    let stages = vec![
        Stage { meetings: meetings[..2].to_vec(), top_k: 4 },
        Stage { meetings: meetings.clone(), top_k: 2 },
    ];
    let cache = tempfile::tempdir()?;
    let search = GridSearch {
        embeddings: None,
        cache_dir: Some(cache.path().to_path_buf()),
    };
    let ranking = search.staged_search(&configs, &stages, RankMetric::Windowdiff)?;
    println!("{} configurations ranked; best:", ranking.len());
    for r in ranking.iter().take(3) {
        println!("  {} wd={:.3} acc={:.3} stage={}", r.canonical, r.metrics.windowdiff, r.metrics.seg_acc, r.stage_reached);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("grid search");
}
