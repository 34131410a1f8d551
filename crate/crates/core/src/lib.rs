//! Alignment of meeting transcriptions with written reports.
//!
//! Both documents are split into speaker interventions, scored sentence by
//! sentence (ROUGE, tf-idf or word embeddings, optionally over sliding
//! windows), and aligned by a monotone dynamic program whose optimal path
//! is projected onto segments. Around that core sit the evaluation metrics,
//! linear segmentation baselines, a grid search over configurations, a
//! training-pair extractor and an annotation service for correcting
//! pre-alignments by hand.
//!
//! ```
//! use alignsum::alignment::{accumulate, backtrace, AlignParams};
//! use alignsum::matrix::Matrix;
//!
//! let s = Matrix::from_rows(&[[0.9, 0.1], [0.2, 0.8]]).unwrap();
//! let tableau = accumulate(&s, &AlignParams::default()).unwrap();
//! assert_eq!(backtrace(&tableau).cells(), &[(0, 0), (1, 0), (1, 1)]);
//! ```

pub mod alignment;
pub mod annotation;
pub mod baselines;
pub mod cli;
pub mod corpus;
pub mod corpus_builder;
mod error;
pub mod fsio;
pub mod gridsearch;
pub mod matrix;
pub mod metrics;
pub mod pipeline;
pub mod segmentation;
pub mod similarity;
pub mod synthetic;
pub mod windows;

pub use error::{Error, Result};
