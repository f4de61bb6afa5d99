//! Fixtures shared by the benchmarks.

use std::path::PathBuf;

use toricmld::generate::{random_instance, GenParams};
use toricmld::instance::load_instance;
use toricmld::{GPair, ToricContraction};

pub const CORPUS: &[&str] = &["a2_identity.json", "a3_identity.json", "halfplane.json", "cax4.json", "a1_family.json"];

pub fn corpus_instance(name: &str) -> (ToricContraction, GPair) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    let text = std::fs::read_to_string(&path).expect("corpus file");
    let (_, tc, pair) = load_instance(&text).expect("valid corpus instance");
    (tc, pair)
}

pub fn seeded(seeds: std::ops::Range<u64>) -> Vec<(u64, ToricContraction, GPair)> {
    let p = GenParams::default();
    seeds
        .filter_map(|s| random_instance(s, &p).map(|(tc, pair)| (s, tc, pair)))
        .collect()
}
