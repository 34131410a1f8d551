use std::sync::Arc;

use alignsum::alignment::{accumulate, backtrace, diagonal_alignment, AlignParams};
use alignsum::gridsearch::AlignConfig;
use alignsum::matrix::Matrix;
use alignsum::pipeline::align_meeting;
use alignsum::similarity::{Pooling, ScorerKind};
use alignsum::synthetic::{generate_corpus, synthetic_embeddings, MeetingShape, Verbosity};
use alignsum::windows::{Aggregation, Reduction, WindowConfig};
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = Matrix> {
    (1usize..9, 1usize..9).prop_flat_map(|(m, n)| {
        prop::collection::vec(0.0f64..=1.0, m * n).prop_map(move |v| Matrix::from_vec(m, n, v).unwrap())
    })
}

fn scorer() -> impl Strategy<Value = ScorerKind> {
    prop::sample::select(ScorerKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn paths_are_monotone_unit_staircases(s in matrix(), p in 1.0f64..5.0, hd in 0.0f64..0.1, vd in 0.0f64..0.1) {
        let t = accumulate(&s, &AlignParams::new(p, hd, vd).unwrap()).unwrap();
        let path = backtrace(&t);
        let cells = path.cells();
        prop_assert_eq!(cells[0], (0, 0));
        prop_assert_eq!(*cells.last().unwrap(), (s.rows() - 1, s.cols() - 1));
        prop_assert_eq!(cells.len(), s.rows() + s.cols() - 1);
        for w in cells.windows(2) {
            let (di, dj) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            prop_assert_eq!(di + dj, 1);
        }
    }

    #[test]
    fn aligned_meetings_are_total_and_monotone(
        seed in 0u64..1_000,
        kind in scorer(),
        size in 1usize..4,
        overlap in 0usize..3,
        red in prop::sample::select(vec![Reduction::Sum, Reduction::Product]),
        pooling in prop::sample::select(vec![Pooling::Sum, Pooling::Mean, Pooling::Max]),
    ) {
        let shape = MeetingShape { verbosity: Verbosity::Shuffled { min: 1, max: 6 }, ..Default::default() };
        let m = generate_corpus("prop", 1, &shape, seed).unwrap().remove(0);
        let table = Arc::new(synthetic_embeddings(5, 8, seed).unwrap());
        let config = AlignConfig {
            scorer: kind,
            pooling,
            window: WindowConfig {
                size,
                overlap: overlap.min(size - 1),
                agg: if kind.is_text() { Aggregation::Cat } else { Aggregation::Mean },
                red,
            },
            align: AlignParams::new(2.0, 0.0, 1e-4).unwrap(),
        };
        let out = align_meeting(&m.bundle, &config, Some(&table)).unwrap();
        out.alignment.validate_against(&m.bundle).unwrap();
        let targets = out.alignment.targets();
        prop_assert_eq!(targets.len(), m.bundle.transcription.num_segments());
        prop_assert!(targets.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(out.alignment.map().iter().all(|e| !e.irrelevant));
        prop_assert!(out.similarity.as_slice().iter().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn diagonal_is_total_and_monotone(seed in 0u64..1_000, segments in 1usize..8) {
        let shape = MeetingShape { report_segments: segments, verbosity: Verbosity::Shuffled { min: 1, max: 9 }, ..Default::default() };
        let m = generate_corpus("diag", 1, &shape, seed).unwrap().remove(0);
        let targets = diagonal_alignment(&m.bundle).unwrap().targets();
        prop_assert_eq!(targets.len(), m.bundle.transcription.num_segments());
        prop_assert!(targets.iter().all(|&n| n < segments));
        prop_assert!(targets.windows(2).all(|w| w[0] <= w[1]));
    }
}
