use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Named angles in radians shared across word ansatze.
///
/// Frozen names are read like any other but never touched by the optimiser.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParameterStore {
    pub values: BTreeMap<String, f64>,
    #[serde(default)]
    pub frozen: BTreeSet<String>,
}

impl ParameterStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Uniform angles in `[0, 2π)` for every name, drawn in sorted-name order.
    pub fn random<'a>(names: impl IntoIterator<Item = &'a String>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let names: BTreeSet<&String> = names.into_iter().collect();
        let values = names.into_iter().map(|n| (n.clone(), rng.gen_range(0.0..TAU))).collect();
        Self { values, frozen: BTreeSet::new() }
    }

    /// Keeps existing values and draws fresh ones only for missing names.
    pub fn fill_missing<'a>(&mut self, names: impl IntoIterator<Item = &'a String>, seed: u64) {
        let missing: Vec<&String> = names.into_iter().filter(|n| !self.values.contains_key(*n)).collect();
        let fresh = Self::random(missing, seed);
        self.values.extend(fresh.values);
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        self.values.get(name).copied().ok_or_else(|| Error::UnresolvedAngle(name.to_string()))
    }

    pub fn set(&mut self, name: impl Into<String>, value: f64) {
        self.values.insert(name.into(), value);
    }

    pub fn with(mut self, name: impl Into<String>, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn freeze(&mut self, name: impl Into<String>) {
        self.frozen.insert(name.into());
    }

    pub fn is_frozen(&self, name: &str) -> bool {
        self.frozen.contains(name)
    }
}
