use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Result of a numerical estimator, tagged with the route that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub route: String,
    pub value: f64,
    pub params: BTreeMap<String, f64>,
    pub seed: Option<u64>,
}

impl EstimatorReport {
    pub fn new(route: impl Into<String>, value: f64) -> Self {
        Self { route: route.into(), value, params: BTreeMap::new(), seed: None }
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_owned(), value);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}
