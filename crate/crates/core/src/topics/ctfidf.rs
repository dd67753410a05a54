use std::collections::BTreeMap;

use rayon::prelude::*;

/// Term counts per class plus the corpus-level quantities c-TF-IDF needs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClassTermCounts {
    pub classes: Vec<BTreeMap<String, u64>>,
    /// Average number of tokens per class, empty classes included.
    pub avg_class_len: f64,
    /// Total count of each term across classes.
    pub term_totals: BTreeMap<String, u64>,
}

impl ClassTermCounts {
    pub fn from_counts(classes: Vec<BTreeMap<String, u64>>) -> Self {
        let mut term_totals: BTreeMap<String, u64> = BTreeMap::new();
        let mut total = 0u64;
        for class in &classes {
            for (term, &c) in class {
                *term_totals.entry(term.clone()).or_default() += c;
                total += c;
            }
        }
        let avg_class_len = if classes.is_empty() {
            0.0
        } else {
            total as f64 / classes.len() as f64
        };
        Self {
            classes,
            avg_class_len,
            term_totals,
        }
    }

    /// Each inner iterator yields the tokens of one class.
    pub fn from_tokens<C, T, S>(classes: C) -> Self
    where
        C: IntoIterator<Item = T>,
        T: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let counts = classes
            .into_iter()
            .map(|tokens| {
                let mut m: BTreeMap<String, u64> = BTreeMap::new();
                for t in tokens {
                    *m.entry(t.as_ref().to_string()).or_default() += 1;
                }
                m
            })
            .collect();
        Self::from_counts(counts)
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }
}

/// `W(t, c) = tf(t, c) * ln(1 + A / f(t))` for every term present in class
/// `c`. With `normalize_tf`, `tf` is divided by the class's token total;
/// `A` and `f` always use raw counts. Terms come out in lexicographic order.
pub fn c_tf_idf(counts: &ClassTermCounts, normalize_tf: bool) -> Vec<Vec<(String, f64)>> {
    let a = counts.avg_class_len;
    counts
        .classes
        .par_iter()
        .map(|class| {
            let class_total: u64 = class.values().sum();
            class
                .iter()
                .filter(|(_, &c)| c > 0)
                .map(|(term, &c)| {
                    let f = counts.term_totals[term] as f64;
                    let tf = if normalize_tf {
                        c as f64 / class_total as f64
                    } else {
                        c as f64
                    };
                    (term.clone(), tf * (1.0 + a / f).ln())
                })
                .collect()
        })
        .collect()
}

/// Sort weights descending, ties by term.
pub fn rank_terms(weights: &[(String, f64)]) -> Vec<(String, f64)> {
    let mut ranked = weights.to_vec();
    ranked.sort_by(|p, q| q.1.total_cmp(&p.1).then_with(|| p.0.cmp(&q.0)));
    ranked
}
