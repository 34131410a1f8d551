//! Sliding windows over sentences.
//!
//! Window `k` of a document starts at sentence `k * (s - o)` and spans `s`
//! sentences, so consecutive windows share `o` sentences. The last window is
//! truncated at the end of the document rather than dropping sentences.
//! Windows are aggregated (`agg`), scored pairwise, and the window scores
//! are folded back onto every sentence pair they cover (`red`).

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, SimilarityMatrix};
use crate::similarity::{pairwise, Representation, Scorer, SparseVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    Sum,
    Mean,
    Max,
    /// Concatenate the sentences' tokens; the only choice for ROUGE.
    Cat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    Sum,
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WindowConfig {
    pub size: usize,
    pub overlap: usize,
    pub agg: Aggregation,
    pub red: Reduction,
}

impl WindowConfig {
    /// `s = 1, o = 0`: every window is a single sentence.
    pub fn sentences(agg: Aggregation) -> Self {
        WindowConfig {
            size: 1,
            overlap: 0,
            agg,
            red: Reduction::Product,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.size == 1 && self.overlap == 0
    }

    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::Config("window size must be at least 1".into()));
        }
        if self.overlap >= self.size {
            return Err(Error::Config(format!(
                "window overlap {} must be smaller than size {}",
                self.overlap, self.size
            )));
        }
        Ok(())
    }

    pub fn step(&self) -> usize {
        self.size - self.overlap
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub index: usize,
    pub sentences: Range<usize>,
}

pub fn make_windows(doc_len: usize, cfg: &WindowConfig) -> Result<Vec<Window>> {
    cfg.validate()?;
    if doc_len == 0 {
        return Err(Error::validation("cannot window an empty document"));
    }
    let step = cfg.step();
    let mut out = Vec::new();
    let mut start = 0;
    loop {
        let end = (start + cfg.size).min(doc_len);
        out.push(Window {
            index: out.len(),
            sentences: start..end,
        });
        if end == doc_len {
            break;
        }
        start += step;
    }
    Ok(out)
}

fn check_agg(scorer: &Scorer, agg: Aggregation) -> Result<()> {
    let text = scorer.kind().is_text();
    if text != (agg == Aggregation::Cat) {
        return Err(Error::Config(format!(
            "aggregation {agg:?} cannot be used with the {} scorer",
            scorer.kind()
        )));
    }
    Ok(())
}

/// Combines several sentence representations into one.
pub fn aggregate(items: &[&Representation], agg: Aggregation) -> Result<Representation> {
    let Some((first, rest)) = items.split_first() else {
        return Err(Error::validation("cannot aggregate an empty window"));
    };
    let mismatch = || Error::Config(format!("aggregation {agg:?} does not apply to these representations"));
    match (agg, first) {
        (Aggregation::Cat, Representation::Tokens(t)) => {
            let mut out = t.clone();
            for r in rest {
                let Representation::Tokens(t) = r else { return Err(mismatch()) };
                out.extend(t.iter().cloned());
            }
            Ok(Representation::Tokens(out))
        }
        (Aggregation::Cat, _) => Err(mismatch()),
        (_, Representation::Dense(v)) => {
            let mut out = v.clone();
            for r in rest {
                let Representation::Dense(v) = r else { return Err(mismatch()) };
                if v.len() != out.len() {
                    return Err(Error::DimensionMismatch {
                        left: v.len(),
                        right: out.len(),
                    });
                }
                for (o, x) in out.iter_mut().zip(v) {
                    *o = if agg == Aggregation::Max { o.max(*x) } else { *o + x };
                }
            }
            if agg == Aggregation::Mean {
                let n = items.len() as f64;
                out.iter_mut().for_each(|o| *o /= n);
            }
            Ok(Representation::Dense(out))
        }
        (_, Representation::Sparse(v)) => {
            let mut out: SparseVector = v.clone();
            for r in rest {
                let Representation::Sparse(v) = r else { return Err(mismatch()) };
                out = if agg == Aggregation::Max {
                    out.zip_with(v, f64::max)
                } else {
                    out.zip_with(v, |a, b| a + b)
                };
            }
            if agg == Aggregation::Mean {
                out = out.scale(1.0 / items.len() as f64);
            }
            Ok(Representation::Sparse(out))
        }
        (_, Representation::Tokens(_)) => Err(mismatch()),
    }
}

fn aggregate_windows(
    sentences: &[Representation],
    windows: &[Window],
    agg: Aggregation,
) -> Result<Vec<Representation>> {
    windows
        .iter()
        .map(|w| {
            let items: Vec<&Representation> = sentences[w.sentences.clone()].iter().collect();
            aggregate(&items, agg)
        })
        .collect()
}

/// `S_sliding[k][l] = score(agg(W_T(k)), agg(W_R(l)))`.
pub fn window_similarity(
    t_sentences: &[Representation],
    t_windows: &[Window],
    r_sentences: &[Representation],
    r_windows: &[Window],
    scorer: &Scorer,
    agg: Aggregation,
) -> Result<Matrix> {
    check_agg(scorer, agg)?;
    let t = aggregate_windows(t_sentences, t_windows, agg)?;
    let r = aggregate_windows(r_sentences, r_windows, agg)?;
    pairwise(scorer, &t, &r)
}

/// Windows containing each sentence.
fn membership(windows: &[Window], len: usize) -> Result<Vec<Vec<usize>>> {
    let mut out = vec![Vec::new(); len];
    for w in windows {
        for i in w.sentences.clone() {
            if i >= len {
                return Err(Error::validation(format!("window covers sentence {i} of {len}")));
            }
            out[i].push(w.index);
        }
    }
    Ok(out)
}

/// Folds window scores back onto sentence pairs.
///
/// `Sum` adds the scores of every window pair covering `(i, j)`; if the
/// result exceeds 1 anywhere the whole matrix is divided by its maximum.
/// `Product` multiplies them and stays in `[0, 1]` on its own.
pub fn reduce_to_sentences(
    sliding: &Matrix,
    t_windows: &[Window],
    r_windows: &[Window],
    red: Reduction,
    m: usize,
    n: usize,
) -> Result<SimilarityMatrix> {
    if sliding.rows() != t_windows.len() || sliding.cols() != r_windows.len() {
        return Err(Error::DimensionMismatch {
            left: sliding.rows() * sliding.cols(),
            right: t_windows.len() * r_windows.len(),
        });
    }
    let t_in = membership(t_windows, m)?;
    let r_in = membership(r_windows, n)?;
    if let Some(i) = t_in.iter().position(Vec::is_empty) {
        return Err(Error::validation(format!("transcription sentence {i} is in no window")));
    }
    if let Some(j) = r_in.iter().position(Vec::is_empty) {
        return Err(Error::validation(format!("report sentence {j} is in no window")));
    }
    let mut out = Matrix::from_fn(m, n, |i, j| {
        let cells = t_in[i]
            .iter()
            .flat_map(|&k| r_in[j].iter().map(move |&l| sliding[(k, l)]));
        match red {
            Reduction::Sum => cells.fold(0.0, |a, x| a + x),
            Reduction::Product => cells.fold(1.0, |a, x| a * x),
        }
    });
    if red == Reduction::Sum {
        let max = out.max();
        if max > 1.0 {
            out = out.map(|x| x / max);
        }
    }
    SimilarityMatrix::new(out)
}

/// Full window pipeline: represent sentences, window both documents,
/// score window pairs and reduce back to a sentence-level matrix.
pub fn windowed_similarity<S: AsRef<str> + Sync>(
    transcription: &[S],
    report: &[S],
    scorer: &Scorer,
    cfg: &WindowConfig,
) -> Result<SimilarityMatrix> {
    use rayon::prelude::*;
    if transcription.is_empty() || report.is_empty() {
        return Err(Error::validation("cannot score an empty document"));
    }
    let t: Vec<Representation> = transcription.par_iter().map(|s| scorer.represent(s.as_ref())).collect();
    let r: Vec<Representation> = report.par_iter().map(|s| scorer.represent(s.as_ref())).collect();
    let tw = make_windows(t.len(), cfg)?;
    let rw = make_windows(r.len(), cfg)?;
    let sliding = window_similarity(&t, &tw, &r, &rw, scorer, cfg.agg)?;
    reduce_to_sentences(&sliding, &tw, &rw, cfg.red, t.len(), r.len())
}
