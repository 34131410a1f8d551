//! Acceptance checks, one line per criterion. Exits non-zero if any fails.
//!
//! Run with `cargo test -p alignsum --test acceptance`. The public-meetings
//! check runs only when `ALIGNSUM_PUBLIC_MEETINGS` names a directory of
//! meeting directories (each with `gold.json`) and `ALIGNSUM_EMBEDDINGS`
//! names a word2vec text file.

#![allow(clippy::single_range_in_vec_init)]

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use alignsum::alignment::{accumulate, backtrace, diagonal_alignment, project_to_segments, AlignParams, Predecessor};
use alignsum::corpus::{MeetingBundle, ReportDoc, SegmentAlignment, AlignmentSource, Sentence, TranscriptionDoc};
use alignsum::corpus_builder::{extract_pairs, PairFilter};
use alignsum::gridsearch::{AlignConfig, EvalMeeting, GridSearch};
use alignsum::matrix::Matrix;
use alignsum::metrics::{alignment_accuracy, micro_average, pk, windowdiff, summarize};
use alignsum::pipeline::align_meeting;
use alignsum::similarity::{similarity_matrix, EmbeddingTable, Pooling, Scorer, ScorerKind};
use alignsum::synthetic::{generate_corpus, synthetic_embeddings, MeetingShape, Verbosity};
use alignsum::windows::{windowed_similarity, Aggregation, Reduction, WindowConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

use Outcome::*;

type Check = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    if ok {
        Pass(detail.into())
    } else {
        Fail(detail.into())
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Matrix {
    Matrix::from_fn(m, n, |_, _| rng.random_range(0.0..1.0))
}

/// Best path sum by enumerating every monotone unit-step path.
fn exhaustive_best(s: &Matrix) -> f64 {
    fn walk(s: &Matrix, i: usize, j: usize, acc: f64, best: &mut f64) {
        let acc = acc + s[(i, j)];
        if i + 1 == s.rows() && j + 1 == s.cols() {
            if acc > *best {
                *best = acc;
            }
            return;
        }
        if i + 1 < s.rows() {
            walk(s, i + 1, j, acc, best);
        }
        if j + 1 < s.cols() {
            walk(s, i, j + 1, acc, best);
        }
    }
    let mut best = f64::NEG_INFINITY;
    walk(s, 0, 0, 0.0, &mut best);
    best
}

fn worked_example() -> Outcome {
    // printed with rows = report sentences; the aligner indexes rows by transcription
    let s = Matrix::from_rows(&[[5.0, 3.0, 8.0, 9.0], [5.0, 7.0, 6.0, 2.0], [3.0, 4.0, 7.0, 5.0]])
        .unwrap()
        .transpose();
    let expected = Matrix::from_rows(&[
        [5.0, 8.0, 16.0, 25.0],
        [10.0, 17.0, 23.0, 27.0],
        [13.0, 21.0, 30.0, 35.0],
    ])
    .unwrap()
    .transpose();
    // (t1,r1),(t1,r2),(t2,r2),(t3,r2),(t3,r3),(t4,r3) as 0-based (t, r)
    let expected_path = [(0, 0), (0, 1), (1, 1), (2, 1), (2, 2), (3, 2)];
    let mut fastest = Duration::MAX;
    let mut ok = true;
    for _ in 0..20 {
        let start = Instant::now();
        let t = accumulate(&s, &AlignParams::default()).unwrap();
        let p = backtrace(&t);
        fastest = fastest.min(start.elapsed());
        ok &= t.scores == expected && p.cells() == expected_path;
    }
    check(
        ok && fastest < Duration::from_millis(1),
        format!("A and path exact: {ok}, {:?} per run", fastest),
    )
}

fn dp_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_200);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let m = rng.random_range(1..=6);
        let n = rng.random_range(1..=6);
        let s = random_matrix(&mut rng, m, n);
        let t = accumulate(&s, &AlignParams::default()).unwrap();
        let path = backtrace(&t);
        let best = exhaustive_best(&s);
        worst = worst
            .max((t.scores[(m - 1, n - 1)] - best).abs())
            .max((path.score(&s) - best).abs());
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-12 && elapsed < Duration::from_secs(5),
        format!("200 matrices, max error {worst:e}, {elapsed:?}"),
    )
}

fn pipeline_identity() -> Outcome {
    let meetings = generate_corpus("id", 20, &MeetingShape::default(), 31).unwrap();
    let table = Arc::new(synthetic_embeddings(5, 16, 32).unwrap());
    let mut checked = 0;
    for kind in ScorerKind::ALL {
        for m in &meetings {
            let t = m.bundle.transcription.texts();
            let r = m.bundle.report.texts();
            let scorer = Scorer::for_meeting(kind, Pooling::Sum, &t, &r, Some(&table)).unwrap();
            let direct = similarity_matrix(&t, &r, &scorer).unwrap();
            let aggs: &[Aggregation] = if kind.is_text() {
                &[Aggregation::Cat]
            } else {
                &[Aggregation::Sum, Aggregation::Mean, Aggregation::Max]
            };
            for &agg in aggs {
                for red in [Reduction::Sum, Reduction::Product] {
                    let w = WindowConfig { size: 1, overlap: 0, agg, red };
                    if windowed_similarity(&t, &r, &scorer, &w).unwrap() != direct {
                        return Fail(format!("{kind} agg={agg:?} red={red:?} on {}", m.bundle.meeting_id));
                    }
                    checked += 1;
                }
            }
        }
    }
    Pass(format!("5 scorers x 20 meetings, {checked} window settings equal"))
}

fn scale_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4_242);
    let mut cases = 0;
    for _ in 0..100 {
        let m = rng.random_range(2..=12);
        let n = rng.random_range(1..=m);
        let s = random_matrix(&mut rng, m, n);
        let ts: Vec<_> = (0..m).map(|i| i..i + 1).collect();
        let cut = rng.random_range(0..=n);
        let rs: Vec<_> = if cut == 0 || cut == n { vec![0..n] } else { vec![0..cut, cut..n] };
        for p in [1.0, 2.0, 4.0] {
            let params = AlignParams::new(p, 0.0, 0.0).unwrap();
            let base = accumulate(&s, &params).unwrap();
            let base_path = backtrace(&base);
            let base_f = project_to_segments(&base_path, &base.scores, &ts, &rs).unwrap();
            for c in [0.1, 3.0, 100.0] {
                let t = accumulate(&s.map(|x| x * c), &params).unwrap();
                let path = backtrace(&t);
                let f = project_to_segments(&path, &t.scores, &ts, &rs).unwrap();
                if path != base_path || f != base_f {
                    return Fail(format!("{m}x{n} p={p} c={c} changed the result"));
                }
                cases += 1;
            }
        }
    }
    Pass(format!("{cases} (matrix, p, c) cases unchanged"))
}

/// Plain accumulation without any decay bookkeeping.
fn reference_accumulation(s: &Matrix, p: f64) -> Matrix {
    let mut a = Matrix::zeros(s.rows(), s.cols());
    for i in 0..s.rows() {
        for j in 0..s.cols() {
            let v = s[(i, j)].powf(p);
            a[(i, j)] = v + match (i, j) {
                (0, 0) => 0.0,
                (0, _) => a[(0, j - 1)],
                (_, 0) => a[(i - 1, 0)],
                _ => a[(i - 1, j)].max(a[(i, j - 1)]),
            };
        }
    }
    a
}

fn decay() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..100 {
        let (m, n) = (rng.random_range(1..=8), rng.random_range(1..=8));
        let s = random_matrix(&mut rng, m, n);
        for p in [1.0, 2.0, 4.0] {
            let t = accumulate(&s, &AlignParams::new(p, 0.0, 0.0).unwrap()).unwrap();
            if t.scores != reference_accumulation(&s, p) || t.decay.as_slice().iter().any(|&d| d != 1.0) {
                return Fail(format!("hd=vd=0 differs from plain accumulation on {m}x{n}, p={p}"));
            }
        }
    }
    // transcription sentence 1 scores 1 against every report sentence
    let s = Matrix::from_rows(&[
        [0.0, 1.0, 1.0, 1.0],
        [1.0, 1.0, 1.0, 1.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ])
    .unwrap();
    let plain = backtrace(&accumulate(&s, &AlignParams::new(1.0, 0.0, 0.0).unwrap()).unwrap());
    let decayed_t = accumulate(&s, &AlignParams::new(1.0, 0.0, 1e-4).unwrap()).unwrap();
    let decayed = backtrace(&decayed_t);
    let pinned_plain = [(0, 0), (1, 0), (1, 1), (1, 2), (1, 3), (2, 3), (3, 3)];
    let pinned_decayed = [(0, 0), (0, 1), (0, 2), (0, 3), (1, 3), (2, 3), (3, 3)];
    let run_broken = decayed_t.predecessor(1, 3) == Predecessor::Left;
    check(
        plain.cells() == pinned_plain && decayed.cells() == pinned_decayed && run_broken,
        format!("neutral on 300 cases; vd=1e-4 path {:?} vs {:?}", decayed.cells(), plain.cells()),
    )
}

fn metric_examples() -> Outcome {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9;
    let worked = close(windowdiff(&[2], &[3], 5, 2).unwrap(), 2.0 / 3.0)
        && close(windowdiff(&[2], &[], 5, 2).unwrap(), 2.0 / 3.0)
        && close(windowdiff(&[1, 3], &[1, 3], 5, 2).unwrap(), 0.0)
        && close(pk(&[2], &[3], 5, 2).unwrap(), 2.0 / 3.0)
        && close(pk(&[], &[1, 2, 3, 4], 5, 1).unwrap(), 1.0)
        && close(pk(&[1, 3], &[1, 3], 5, 2).unwrap(), 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let mut zero = true;
    for _ in 0..500 {
        let m = rng.random_range(2..60);
        let b: Vec<usize> = (1..m).filter(|_| rng.random_bool(0.3)).collect();
        let k = rng.random_range(1..m);
        zero &= windowdiff(&b, &b, m, k).unwrap() == 0.0 && pk(&b, &b, m, k).unwrap() == 0.0;
    }
    check(worked && zero, format!("worked examples {worked}, 500 self-comparisons zero {zero}"))
}

fn words(n: usize) -> String {
    vec!["mot"; n].join(" ")
}

/// One transcription segment and one report segment with the given
/// sentence word counts.
fn pair_bundle(src: &[usize], tgt: &[usize]) -> MeetingBundle {
    let sentences = src.iter().enumerate().map(|(i, &w)| Sentence::new(i, words(w)).unwrap()).collect();
    MeetingBundle {
        meeting_id: "bounds".into(),
        transcription: TranscriptionDoc::new(sentences, vec![0..src.len()]).unwrap(),
        report: ReportDoc::from_texts([(None, tgt.iter().map(|&w| words(w)).collect::<Vec<_>>())]).unwrap(),
    }
}

fn spread(total: usize, sentences: usize) -> Vec<usize> {
    (0..sentences).map(|k| total / sentences + usize::from(k < total % sentences)).collect()
}

fn filter_bounds() -> Outcome {
    let ok = spread(10, 3);
    let cases: Vec<(&str, Vec<usize>, Vec<usize>, bool)> = vec![
        ("10 words 3 sentences", spread(10, 3), ok.clone(), true),
        ("9 word source", spread(9, 3), ok.clone(), false),
        ("9 word target", ok.clone(), spread(9, 3), false),
        ("1000 words 50 sentences", spread(1000, 50), spread(1000, 50), true),
        ("1001 word source", spread(1001, 50), ok.clone(), false),
        ("1001 word target", ok.clone(), spread(1001, 50), false),
        ("2 sentence source", spread(10, 2), ok.clone(), false),
        ("2 sentence target", ok.clone(), spread(10, 2), false),
        ("51 sentence source", spread(102, 51), ok.clone(), false),
        ("51 sentence target", ok.clone(), spread(102, 51), false),
    ];
    let filter = PairFilter::default();
    for (name, src, tgt, keep) in cases {
        let b = pair_bundle(&src, &tgt);
        let a = SegmentAlignment::from_targets("bounds", AlignmentSource::Gold, None, &[0]).unwrap();
        let kept = extract_pairs(&b, &a, &filter).unwrap().len() == 1;
        if kept != keep {
            return Fail(format!("{name}: kept={kept}"));
        }
    }
    Pass("10 boundary fixtures on both sides".into())
}

fn seg_accuracy(meetings: &[(MeetingBundle, SegmentAlignment, SegmentAlignment)]) -> f64 {
    let counts: Vec<_> = meetings
        .iter()
        .map(|(b, gold, hyp)| alignment_accuracy(gold, hyp, b).unwrap())
        .collect();
    micro_average(&counts).unwrap().seg_acc
}

fn diagonal_sanity() -> Outcome {
    let mut proportional = Vec::new();
    for k in 1..=4 {
        for segments in 1..=6 {
            let shape = MeetingShape {
                report_segments: segments,
                report_sentences: (1, 4),
                verbosity: Verbosity::Proportional(k),
            };
            for m in generate_corpus(&format!("p{k}s{segments}_"), 5, &shape, (k * 100 + segments) as u64).unwrap() {
                let hyp = diagonal_alignment(&m.bundle).unwrap();
                proportional.push((m.bundle, m.gold, hyp));
            }
        }
    }
    let prop_acc = seg_accuracy(&proportional);

    let shape = MeetingShape {
        report_segments: 8,
        report_sentences: (1, 3),
        verbosity: Verbosity::Shuffled { min: 1, max: 12 },
    };
    let shuffled = generate_corpus("shuf", 20, &shape, 2024).unwrap();
    let table = Arc::new(synthetic_embeddings(8, 16, 99).unwrap());
    let run = |config: Option<&AlignConfig>| -> f64 {
        let rows: Vec<_> = shuffled
            .iter()
            .map(|m| {
                let hyp = match config {
                    Some(c) => align_meeting(&m.bundle, c, Some(&table)).unwrap().alignment,
                    None => diagonal_alignment(&m.bundle).unwrap(),
                };
                (m.bundle.clone(), m.gold.clone(), hyp)
            })
            .collect();
        seg_accuracy(&rows)
    };
    let diag = run(None);
    let tfidf = run(Some(&AlignConfig::sentences(ScorerKind::TfidfCosine, AlignParams::default())));
    let emb = run(Some(&AlignConfig::published_best()));
    check(
        prop_acc == 1.0 && diag < tfidf && diag < emb,
        format!(
            "proportional {} meetings acc {prop_acc}; shuffled acc diagonal {diag:.3} < tf-idf {tfidf:.3}, embeddings {emb:.3}",
            proportional.len()
        ),
    )
}

fn public_meetings() -> Outcome {
    let (Some(dir), Some(emb)) = (
        std::env::var_os("ALIGNSUM_PUBLIC_MEETINGS"),
        std::env::var_os("ALIGNSUM_EMBEDDINGS"),
    ) else {
        return Skip("set ALIGNSUM_PUBLIC_MEETINGS and ALIGNSUM_EMBEDDINGS to run".into());
    };
    let result = (|| -> alignsum::Result<(f64, f64, usize)> {
        let mut dirs: Vec<PathBuf> = std::fs::read_dir(&dir)
            .map_err(|e| alignsum::Error::Validation(format!("{}: {e}", Path::new(&dir).display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.join("gold.json").is_file())
            .collect();
        dirs.sort();
        let meetings = dirs.iter().map(|d| EvalMeeting::load_dir(d).map(Arc::new)).collect::<alignsum::Result<Vec<_>>>()?;
        let table = EmbeddingTable::load_word2vec_text(Path::new(&emb), None)?;
        let search = GridSearch {
            embeddings: Some(Arc::new(table)),
            cache_dir: None,
        };
        let config = AlignConfig::published_best();
        let evals = meetings
            .iter()
            .map(|m| search.evaluate(&config, m))
            .collect::<alignsum::Result<Vec<_>>>()?;
        let s = summarize(&evals)?;
        Ok((s.seg_acc * 100.0, s.windowdiff * 100.0, meetings.len()))
    })();
    match result {
        Ok((acc, wd, n)) => check(acc >= 60.0 && wd <= 20.0, format!("{n} meetings: seg acc {acc:.2}% (>= 60), WindowDiff {wd:.2} (<= 20)")),
        Err(e) => Fail(e.to_string()),
    }
}

fn main() {
    let checks: [Check; 9] = [
        ("worked 4x3 example", worked_example),
        ("dp optimality oracle", dp_oracle),
        ("pipeline identity", pipeline_identity),
        ("scale invariance", scale_invariance),
        ("decay neutrality and effect", decay),
        ("metric worked examples", metric_examples),
        ("filter bounds", filter_bounds),
        ("diagonal sanity", diagonal_sanity),
        ("public meetings best config", public_meetings),
    ];
    let mut failed = 0;
    for (name, f) in checks {
        match f() {
            Pass(d) => println!("PASS  {name}: {d}"),
            Fail(d) => {
                failed += 1;
                println!("FAIL  {name}: {d}");
            }
            Skip(d) => println!("SKIP  {name}: {d}"),
        }
    }
    if failed > 0 {
        println!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}
