//! Class-based TF-IDF on three tiny hand-written classes.

use std::collections::BTreeMap;

use apitopics::topics::{c_tf_idf, rank_terms, ClassTermCounts};

fn class(text: &str) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for word in text.split_whitespace() {
        *counts.entry(word.to_string()).or_default() += 1;
    }
    counts
}

fn main() {
    let classes = vec![
        class("gradle build fail gradle sync plugin version build"),
        class("emulator adb device offline emulator boot build"),
        class("recyclerview adapter scroll item adapter layout"),
    ];
    let counts = ClassTermCounts::from_counts(classes);
    println!("average class length {:.2}", counts.avg_class_len);

    for (i, weights) in c_tf_idf(&counts, false).iter().enumerate() {
        let top: Vec<String> = rank_terms(weights)
            .into_iter()
            .take(4)
            .map(|(t, w)| format!("{t} {w:.3}"))
            .collect();
        println!("class {i}: {}", top.join(", "));
    }
}
