//! Sentence scorers and the sentence-level similarity matrix.
//!
//! Every scorer maps a pair of texts to `[0, 1]` and is symmetric. Scoring
//! happens in two steps: each text is turned into a [`Representation`]
//! (tokens for ROUGE, a vector for the cosine scorers), then pairs of
//! representations are compared. The window pipeline reuses the same split
//! to aggregate several sentences before comparing.

mod embedding;
mod rouge;
mod tfidf;
mod tokenize;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use embedding::{embed_sentence, EmbeddingTable, Pooling};
pub use rouge::{lcs_len, rouge_f, RougeVariant};
pub use tfidf::{SparseVector, TfIdfModel};
pub use tokenize::tokenize;

use crate::error::{Error, Result};
use crate::matrix::{Matrix, SimilarityMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ScorerKind {
    #[serde(rename = "rouge1f")]
    Rouge1F,
    #[serde(rename = "rouge2f")]
    Rouge2F,
    #[serde(rename = "rougeLf")]
    RougeLF,
    #[serde(rename = "tfidf_cosine")]
    TfidfCosine,
    #[serde(rename = "embedding_cosine")]
    EmbeddingCosine,
}

impl ScorerKind {
    pub const ALL: [ScorerKind; 5] = [
        ScorerKind::Rouge1F,
        ScorerKind::Rouge2F,
        ScorerKind::RougeLF,
        ScorerKind::TfidfCosine,
        ScorerKind::EmbeddingCosine,
    ];

    /// ROUGE scorers compare token sequences; the others compare vectors.
    pub fn is_text(self) -> bool {
        matches!(self, ScorerKind::Rouge1F | ScorerKind::Rouge2F | ScorerKind::RougeLF)
    }

    pub fn name(self) -> &'static str {
        match self {
            ScorerKind::Rouge1F => "rouge1f",
            ScorerKind::Rouge2F => "rouge2f",
            ScorerKind::RougeLF => "rougeLf",
            ScorerKind::TfidfCosine => "tfidf_cosine",
            ScorerKind::EmbeddingCosine => "embedding_cosine",
        }
    }
}

impl fmt::Display for ScorerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScorerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScorerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scorer {s:?}")))
    }
}

/// What a scorer compares: tokens, or a dense / sparse vector.
#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    Tokens(Vec<String>),
    Dense(Vec<f64>),
    Sparse(SparseVector),
}

/// Cosine similarity clamped below at 0; 0 when either vector is zero.
pub fn cosine_clamped(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (nu * nv)).clamp(0.0, 1.0))
}

/// A scorer ready to use on one meeting.
#[derive(Debug, Clone)]
pub enum Scorer {
    Rouge(RougeVariant),
    Tfidf(TfIdfModel),
    Embedding {
        table: Arc<EmbeddingTable>,
        pooling: Pooling,
    },
}

impl Scorer {
    /// Builds the scorer for one meeting. tf-idf is fitted on the union of
    /// both documents' sentences; the embedding scorer needs a table.
    pub fn for_meeting<S: AsRef<str>>(
        kind: ScorerKind,
        pooling: Pooling,
        transcription: &[S],
        report: &[S],
        embeddings: Option<&Arc<EmbeddingTable>>,
    ) -> Result<Self> {
        Ok(match kind {
            ScorerKind::Rouge1F => Scorer::Rouge(RougeVariant::One),
            ScorerKind::Rouge2F => Scorer::Rouge(RougeVariant::Two),
            ScorerKind::RougeLF => Scorer::Rouge(RougeVariant::L),
            ScorerKind::TfidfCosine => {
                let docs: Vec<Vec<String>> = transcription
                    .iter()
                    .chain(report)
                    .map(|t| tokenize(t.as_ref()))
                    .collect();
                Scorer::Tfidf(TfIdfModel::fit(&docs)?)
            }
            ScorerKind::EmbeddingCosine => Scorer::Embedding {
                table: embeddings
                    .cloned()
                    .ok_or_else(|| Error::Config("embedding scorer needs an embedding table".into()))?,
                pooling,
            },
        })
    }

    pub fn kind(&self) -> ScorerKind {
        match self {
            Scorer::Rouge(RougeVariant::One) => ScorerKind::Rouge1F,
            Scorer::Rouge(RougeVariant::Two) => ScorerKind::Rouge2F,
            Scorer::Rouge(RougeVariant::L) => ScorerKind::RougeLF,
            Scorer::Tfidf(_) => ScorerKind::TfidfCosine,
            Scorer::Embedding { .. } => ScorerKind::EmbeddingCosine,
        }
    }

    pub fn represent(&self, text: &str) -> Representation {
        let tokens = tokenize(text);
        match self {
            Scorer::Rouge(_) => Representation::Tokens(tokens),
            Scorer::Tfidf(model) => Representation::Sparse(model.vectorize(&tokens)),
            Scorer::Embedding { table, pooling } => {
                Representation::Dense(embed_sentence(&tokens, table, *pooling))
            }
        }
    }

    pub fn compare(&self, a: &Representation, b: &Representation) -> Result<f64> {
        match (self, a, b) {
            (Scorer::Rouge(v), Representation::Tokens(x), Representation::Tokens(y)) => {
                Ok(rouge_f(*v, x, y))
            }
            (Scorer::Tfidf(_), Representation::Sparse(x), Representation::Sparse(y)) => Ok(x.cosine(y)),
            (Scorer::Embedding { .. }, Representation::Dense(x), Representation::Dense(y)) => {
                cosine_clamped(x, y)
            }
            _ => Err(Error::Config(format!(
                "{} scorer cannot compare these representations",
                self.kind()
            ))),
        }
    }

    pub fn score(&self, a: &str, b: &str) -> Result<f64> {
        self.compare(&self.represent(a), &self.represent(b))
    }
}

/// Scores every pair of representations: `out[k][l] = compare(rows[k], cols[l])`.
pub(crate) fn pairwise(scorer: &Scorer, rows: &[Representation], cols: &[Representation]) -> Result<Matrix> {
    let data: Vec<Vec<f64>> = rows
        .par_iter()
        .map(|r| cols.iter().map(|c| scorer.compare(r, c)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    Matrix::from_rows(&data)
}

/// `S[i][j] = score(T[i], R[j])`.
pub fn similarity_matrix<S: AsRef<str> + Sync>(
    transcription: &[S],
    report: &[S],
    scorer: &Scorer,
) -> Result<SimilarityMatrix> {
    if transcription.is_empty() || report.is_empty() {
        return Err(Error::validation("cannot score an empty document"));
    }
    let t: Vec<Representation> = transcription.par_iter().map(|s| scorer.represent(s.as_ref())).collect();
    let r: Vec<Representation> = report.par_iter().map(|s| scorer.represent(s.as_ref())).collect();
    SimilarityMatrix::new(pairwise(scorer, &t, &r)?)
}
