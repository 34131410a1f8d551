use std::collections::HashMap;

use crate::error::{Error, Result};

/// Sparse vector with strictly increasing indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    /// Entries are sorted by index; repeated indices are summed.
    pub fn new(mut entries: Vec<(usize, f64)>) -> Self {
        entries.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 += v,
                _ => merged.push((i, v)),
            }
        }
        SparseVector { entries: merged }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.1 == 0.0)
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        let mut acc = 0.0;
        while let (Some(&&(i, x)), Some(&&(j, y))) = (a.peek(), b.peek()) {
            match i.cmp(&j) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => {
                    acc += x * y;
                    a.next();
                    b.next();
                }
            }
        }
        acc
    }

    /// Element-wise combination over the union of supports; a missing entry
    /// reads as 0.
    pub fn zip_with(&self, other: &SparseVector, f: impl Fn(f64, f64) -> f64) -> SparseVector {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (0, 0);
        while a < self.entries.len() || b < other.entries.len() {
            let ia = self.entries.get(a).map_or(usize::MAX, |e| e.0);
            let ib = other.entries.get(b).map_or(usize::MAX, |e| e.0);
            if ia < ib {
                out.push((ia, f(self.entries[a].1, 0.0)));
                a += 1;
            } else if ib < ia {
                out.push((ib, f(0.0, other.entries[b].1)));
                b += 1;
            } else {
                out.push((ia, f(self.entries[a].1, other.entries[b].1)));
                a += 1;
                b += 1;
            }
        }
        SparseVector { entries: out }
    }

    pub fn scale(&self, c: f64) -> SparseVector {
        SparseVector {
            entries: self.entries.iter().map(|&(i, v)| (i, v * c)).collect(),
        }
    }

    /// Cosine similarity clamped to `[0, 1]`; 0 when either side is zero.
    pub fn cosine(&self, other: &SparseVector) -> f64 {
        let denom = self.norm() * other.norm();
        if denom == 0.0 {
            return 0.0;
        }
        (self.dot(other) / denom).clamp(0.0, 1.0)
    }
}

/// tf-idf weights fitted on a set of tokenized sentences, with smoothed
/// `idf = ln((1 + D) / (1 + df)) + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TfIdfModel {
    vocab: HashMap<String, usize>,
    idf: Vec<f64>,
    documents: usize,
}

impl TfIdfModel {
    pub fn fit<S: AsRef<str>>(sentences: &[Vec<S>]) -> Result<Self> {
        let mut vocab: HashMap<String, usize> = HashMap::new();
        let mut df: Vec<usize> = Vec::new();
        for sentence in sentences {
            let mut seen = vec![];
            for tok in sentence {
                let next = vocab.len();
                let id = *vocab.entry(tok.as_ref().to_string()).or_insert(next);
                if id == df.len() {
                    df.push(0);
                }
                if !seen.contains(&id) {
                    seen.push(id);
                    df[id] += 1;
                }
            }
        }
        if vocab.is_empty() {
            return Err(Error::validation("cannot fit tf-idf on an all-empty corpus"));
        }
        let d = sentences.len() as f64;
        let idf = df
            .iter()
            .map(|&k| ((1.0 + d) / (1.0 + k as f64)).ln() + 1.0)
            .collect();
        Ok(TfIdfModel {
            vocab,
            idf,
            documents: sentences.len(),
        })
    }

    pub fn vocabulary_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn documents(&self) -> usize {
        self.documents
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.vocab.get(term).map(|&i| self.idf[i])
    }

    /// L2-normalized tf-idf vector; out-of-vocabulary tokens are ignored.
    pub fn vectorize<S: AsRef<str>>(&self, tokens: &[S]) -> SparseVector {
        let raw = SparseVector::new(
            tokens
                .iter()
                .filter_map(|t| self.vocab.get(t.as_ref()).map(|&i| (i, self.idf[i])))
                .collect(),
        );
        let norm = raw.norm();
        if norm == 0.0 {
            raw
        } else {
            raw.scale(1.0 / norm)
        }
    }

    pub fn cosine<S: AsRef<str>>(&self, a: &[S], b: &[S]) -> f64 {
        self.vectorize(a).cosine(&self.vectorize(b))
    }
}
