//! Pre-trained word vectors in word2vec text format and sentence pooling.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Pooling {
    #[default]
    Sum,
    Mean,
    Max,
}

/// Word → vector lookup with a fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    index: HashMap<String, usize>,
    // row-major, one row of `dim` values per word; f32 keeps large tables small
    vectors: Vec<f32>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::validation("embedding dimension must be positive"));
        }
        Ok(EmbeddingTable {
            dim,
            index: HashMap::new(),
            vectors: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Adds a word; a word already present keeps its first vector.
    pub fn insert(&mut self, word: impl Into<String>, vector: &[f32]) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: vector.len(),
                right: self.dim,
            });
        }
        let word = word.into();
        if self.index.contains_key(&word) {
            return Ok(());
        }
        self.index.insert(word, self.index.len());
        self.vectors.extend_from_slice(vector);
        Ok(())
    }

    pub fn get(&self, word: &str) -> Option<&[f32]> {
        self.index
            .get(word)
            .map(|&i| &self.vectors[i * self.dim..(i + 1) * self.dim])
    }

    /// Reads `<count> <dim>` then `<word> <v1> ... <vd>` lines. When `keep`
    /// is given, only those words are stored.
    pub fn read_word2vec_text<R: BufRead>(reader: R, keep: Option<&HashSet<String>>) -> Result<Self> {
        let mut lines = reader.lines();
        let header = match lines.next() {
            Some(l) => l.map_err(|e| Error::parse("embeddings", e))?,
            None => return Err(Error::parse("embeddings", "missing header line")),
        };
        let mut fields = header.split_whitespace();
        let (count, dim) = match (fields.next(), fields.next(), fields.next()) {
            (Some(c), Some(d), None) => (
                c.parse::<usize>()
                    .map_err(|e| Error::parse("embeddings header", e))?,
                d.parse::<usize>()
                    .map_err(|e| Error::parse("embeddings header", e))?,
            ),
            _ => {
                return Err(Error::parse(
                    "embeddings header",
                    format!("expected \"<count> <dim>\", got {header:?}"),
                ))
            }
        };
        let mut table = EmbeddingTable::new(dim)?;
        let mut seen = 0;
        let mut buf = Vec::with_capacity(dim);
        for (lineno, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::parse("embeddings", e))?;
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            seen += 1;
            let mut parts = line.split(' ');
            let word = parts.next().unwrap_or_default();
            if keep.is_some_and(|k| !k.contains(word)) {
                continue;
            }
            buf.clear();
            for p in parts.filter(|p| !p.is_empty()) {
                buf.push(p.parse::<f32>().map_err(|e| {
                    Error::parse(format!("embeddings line {}", lineno + 2), e)
                })?);
            }
            if buf.len() != dim {
                return Err(Error::parse(
                    format!("embeddings line {}", lineno + 2),
                    format!("expected {dim} values, found {}", buf.len()),
                ));
            }
            table.insert(word, &buf)?;
        }
        if seen != count {
            return Err(Error::parse(
                "embeddings",
                format!("header declares {count} vectors, file has {seen}"),
            ));
        }
        Ok(table)
    }

    pub fn load_word2vec_text(path: &Path, keep: Option<&HashSet<String>>) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        EmbeddingTable::read_word2vec_text(BufReader::new(file), keep).map_err(|e| match e {
            Error::Parse { context, message } => {
                Error::parse(format!("{}: {context}", path.display()), message)
            }
            other => other,
        })
    }
}

/// Pools the vectors of in-vocabulary tokens; a sentence with none gives the
/// zero vector.
pub fn embed_sentence<S: AsRef<str>>(tokens: &[S], table: &EmbeddingTable, pooling: Pooling) -> Vec<f64> {
    let mut out = vec![0.0; table.dim()];
    let mut found = 0usize;
    for v in tokens.iter().filter_map(|t| table.get(t.as_ref())) {
        match pooling {
            Pooling::Sum | Pooling::Mean => {
                for (o, &x) in out.iter_mut().zip(v) {
                    *o += x as f64;
                }
            }
            Pooling::Max => {
                for (o, &x) in out.iter_mut().zip(v) {
                    *o = if found == 0 { x as f64 } else { o.max(x as f64) };
                }
            }
        }
        found += 1;
    }
    if pooling == Pooling::Mean && found > 0 {
        let n = found as f64;
        out.iter_mut().for_each(|o| *o /= n);
    }
    out
}
