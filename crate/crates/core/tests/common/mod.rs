#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use proptest::prelude::*;
use toric_core::PointConfig;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn load<T: serde::de::DeserializeOwned>(name: &str) -> T {
    let text = fs::read_to_string(fixtures().join(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// Distinct integer points in [-3, 3]^d spanning R^d.
pub fn integer_config(d: usize, max_len: usize) -> impl Strategy<Value = PointConfig> {
    prop::collection::btree_set(prop::collection::vec(-3i32..=3, d), d + 1..=max_len)
        .prop_filter_map("not full dimensional", move |set| {
            let pts: Vec<Vec<f64>> = set
                .into_iter()
                .map(|p| p.into_iter().map(f64::from).collect())
                .collect();
            PointConfig::new(d, pts).ok()
        })
}

pub fn any_config() -> impl Strategy<Value = PointConfig> {
    prop_oneof![integer_config(1, 6), integer_config(2, 7)]
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}
