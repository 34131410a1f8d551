//! ROUGE-N and ROUGE-L F1 between token sequences, used as a raw similarity
//! feature (no stemming, no stopword removal).

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RougeVariant {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "L")]
    L,
}

pub fn rouge_f<S: AsRef<str>>(variant: RougeVariant, candidate: &[S], reference: &[S]) -> f64 {
    if candidate.is_empty() || reference.is_empty() {
        return 0.0;
    }
    match variant {
        RougeVariant::One => ngram_f(1, candidate, reference),
        RougeVariant::Two => ngram_f(2, candidate, reference),
        RougeVariant::L => {
            let lcs = lcs_len(candidate, reference);
            2.0 * lcs as f64 / (candidate.len() + reference.len()) as f64
        }
    }
}

fn ngram_counts<S: AsRef<str>>(n: usize, tokens: &[S]) -> HashMap<Vec<&str>, usize> {
    // a sequence shorter than n counts as a single shorter gram, so that any
    // non-empty sequence still matches itself perfectly
    let n = n.min(tokens.len());
    let mut counts = HashMap::new();
    for w in tokens.windows(n) {
        *counts
            .entry(w.iter().map(AsRef::as_ref).collect())
            .or_insert(0) += 1;
    }
    counts
}

fn ngram_f<S: AsRef<str>>(n: usize, candidate: &[S], reference: &[S]) -> f64 {
    let c = ngram_counts(n, candidate);
    let r = ngram_counts(n, reference);
    let overlap: usize = c
        .iter()
        .map(|(g, &k)| r.get(g).map_or(0, |&l| k.min(l)))
        .sum();
    if overlap == 0 {
        return 0.0;
    }
    let total_c: usize = c.values().sum();
    let total_r: usize = r.values().sum();
    // F1 = 2PR / (P + R) with P = o/|c|, R = o/|r|
    2.0 * overlap as f64 / (total_c + total_r) as f64
}

pub fn lcs_len<S: AsRef<str>>(a: &[S], b: &[S]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x.as_ref() == y.as_ref() {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ALL: [RougeVariant; 3] = [RougeVariant::One, RougeVariant::Two, RougeVariant::L];

    #[test]
    fn identical_is_one() {
        let x = ["le", "conseil", "vote", "le", "budget"];
        for v in ALL {
            assert_eq!(rouge_f(v, &x, &x), 1.0);
        }
        for v in ALL {
            assert_eq!(rouge_f(v, &["oui"], &["oui"]), 1.0);
        }
    }

    #[test]
    fn hand_counted_values() {
        let a = ["a", "b", "c"];
        let b = ["a", "b", "d"];
        assert!((rouge_f(RougeVariant::One, &a, &b) - 2.0 / 3.0).abs() < 1e-15);
        assert!((rouge_f(RougeVariant::L, &a, &b) - 2.0 / 3.0).abs() < 1e-15);
        // one shared bigram (a b) out of two on each side
        assert!((rouge_f(RougeVariant::Two, &a, &b) - 0.5).abs() < 1e-15);
        assert!((rouge_f(RougeVariant::One, &["a", "b"], &["a", "b", "c"]) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn clipped_counts() {
        // candidate repeats "a" three times, reference has it once
        let v = rouge_f(RougeVariant::One, &["a", "a", "a"], &["a", "b"]);
        assert!((v - 2.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn empty_is_zero() {
        let e: [&str; 0] = [];
        for v in ALL {
            assert_eq!(rouge_f(v, &e, &["a"]), 0.0);
            assert_eq!(rouge_f(v, &["a"], &e), 0.0);
        }
    }

    fn tokens() -> impl Strategy<Value = Vec<String>> {
        prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d", "e"]), 0..12)
            .prop_map(|v| v.into_iter().map(String::from).collect())
    }

    proptest! {
        #[test]
        fn symmetric_and_bounded(a in tokens(), b in tokens()) {
            for v in ALL {
                let x = rouge_f(v, &a, &b);
                prop_assert!((0.0..=1.0).contains(&x));
                prop_assert_eq!(x, rouge_f(v, &b, &a));
            }
        }

        #[test]
        fn self_similarity(a in tokens()) {
            prop_assume!(!a.is_empty());
            for v in ALL {
                prop_assert_eq!(rouge_f(v, &a, &a), 1.0);
            }
        }
    }
}
