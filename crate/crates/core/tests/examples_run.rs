//! Every example runs to completion.

macro_rules! example {
    ($name:ident, $path:literal) => {
        #[path = $path]
        mod $name;

        #[test]
        fn $name() {
            $name::run().unwrap();
        }
    };
}

example!(align_meeting, "../examples/align_meeting.rs");
example!(annotation_service, "../examples/annotation_service.rs");
example!(baselines, "../examples/baselines.rs");
example!(build_corpus, "../examples/build_corpus.rs");
example!(decay_effect, "../examples/decay_effect.rs");
example!(dp_walkthrough, "../examples/dp_walkthrough.rs");
example!(evaluate, "../examples/evaluate.rs");
example!(grid_search, "../examples/grid_search.rs");
example!(segment_report, "../examples/segment_report.rs");
example!(similarity_scorers, "../examples/similarity_scorers.rs");
example!(sliding_windows, "../examples/sliding_windows.rs");
example!(synthetic_corpus, "../examples/synthetic_corpus.rs");
