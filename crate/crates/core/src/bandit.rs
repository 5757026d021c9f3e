//! Linear bandit primitives: binary action features, states drawn from the
//! action set, integer reward weights and the enumerated hypothesis grid.
//!
//! Everything here is immutable once an [`Environment`] is built. Ordering is
//! fixed (actions by id, states and hypotheses lexicographic) so downstream
//! tables are reproducible bit-for-bit.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Binary feature indicators for one action.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureVector(Vec<u8>);

impl FeatureVector {
    pub fn new(bits: Vec<u8>) -> Result<Self, ModelError> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(ModelError::InvalidConfig(format!(
                "feature entries must be 0 or 1, found {b}"
            )));
        }
        Ok(FeatureVector(bits))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    /// Indices of the active features.
    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(i, _)| i)
    }

    /// Dot product with a real-valued weight vector of the same length.
    pub(crate) fn dot_f64(&self, w: &[f64]) -> f64 {
        debug_assert_eq!(self.0.len(), w.len());
        self.0
            .iter()
            .zip(w)
            .map(|(&b, &x)| if b == 1 { x } else { 0.0 })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub id: usize,
    pub features: FeatureVector,
}

/// A subset of actions presented together, ids in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct State {
    action_ids: Vec<usize>,
}

impl State {
    /// Builds a state from distinct action ids. Ids are sorted.
    pub fn new(mut action_ids: Vec<usize>) -> Result<Self, ModelError> {
        if action_ids.is_empty() {
            return Err(ModelError::InvalidState("state has no actions".into()));
        }
        action_ids.sort_unstable();
        if action_ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(ModelError::InvalidState(format!(
                "duplicate action ids in {action_ids:?}"
            )));
        }
        Ok(State { action_ids })
    }

    pub fn action_ids(&self) -> &[usize] {
        &self.action_ids
    }

    pub fn len(&self) -> usize {
        self.action_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.action_ids.is_empty()
    }

    pub fn contains(&self, action_id: usize) -> bool {
        self.action_ids.binary_search(&action_id).is_ok()
    }

    /// Position of `action_id` within the state, if present.
    pub fn position(&self, action_id: usize) -> Option<usize> {
        self.action_ids.binary_search(&action_id).ok()
    }
}

/// Integer reward weights, one per feature.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RewardWeights(pub Vec<i32>);

impl RewardWeights {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&v| f64::from(v)).collect()
    }
}

impl std::ops::Add for &RewardWeights {
    type Output = RewardWeights;

    fn add(self, rhs: &RewardWeights) -> RewardWeights {
        RewardWeights(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

/// R(a, w) = w · φ(a).
pub fn reward(action: &Action, weights: &RewardWeights) -> Result<i64, ModelError> {
    let bits = action.features.bits();
    if bits.len() != weights.len() {
        return Err(ModelError::DimensionMismatch {
            features: bits.len(),
            weights: weights.len(),
        });
    }
    Ok(bits
        .iter()
        .zip(&weights.0)
        .map(|(&b, &w)| i64::from(b) * i64::from(w))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatePriorKind {
    #[default]
    Uniform,
}

pub const DEFAULT_HYPOTHESIS_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentConfig {
    /// Size of each mutually exclusive feature group; every action has
    /// exactly one feature active per group.
    pub feature_groups: Vec<usize>,
    pub state_size: usize,
    pub weight_values: Vec<i32>,
    #[serde(default)]
    pub state_prior: StatePriorKind,
    #[serde(default = "default_cap")]
    pub hypothesis_cap: u64,
    /// Display names, one per feature. Reporting only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature_names: Option<Vec<String>>,
}

fn default_cap() -> u64 {
    DEFAULT_HYPOTHESIS_CAP
}

impl Default for EnvironmentConfig {
    /// Three colors by three patterns, states of three actions, weights in -2..=2.
    fn default() -> Self {
        EnvironmentConfig {
            feature_groups: vec![3, 3],
            state_size: 3,
            weight_values: vec![-2, -1, 0, 1, 2],
            state_prior: StatePriorKind::Uniform,
            hypothesis_cap: DEFAULT_HYPOTHESIS_CAP,
            feature_names: None,
        }
    }
}

const DEFAULT_FEATURE_NAMES: [&str; 6] = ["green", "blue", "red", "spots", "stripes", "solid"];

#[derive(Debug, Clone)]
pub struct Environment {
    k: usize,
    actions: Vec<Action>,
    states: Vec<State>,
    hypotheses: Vec<RewardWeights>,
    state_prior: Vec<f64>,
    value_set: Vec<i32>,
    feature_names: Vec<String>,
}

impl Environment {
    pub fn build(config: &EnvironmentConfig) -> Result<Self, ModelError> {
        if config.feature_groups.is_empty() || config.feature_groups.contains(&0) {
            return Err(ModelError::InvalidConfig(
                "feature_groups must be non-empty with positive sizes".into(),
            ));
        }
        let k: usize = config.feature_groups.iter().sum();

        // Cartesian product over groups, first group varying slowest.
        let mut feature_sets: Vec<Vec<u8>> = vec![Vec::new()];
        for &size in &config.feature_groups {
            feature_sets = feature_sets
                .into_iter()
                .flat_map(|prefix| {
                    (0..size).map(move |choice| {
                        let mut bits = prefix.clone();
                        bits.extend((0..size).map(|i| u8::from(i == choice)));
                        bits
                    })
                })
                .collect();
        }
        let features = feature_sets
            .into_iter()
            .map(FeatureVector::new)
            .collect::<Result<Vec<_>, _>>()?;

        let names = match &config.feature_names {
            Some(names) => {
                if names.len() != k {
                    return Err(ModelError::InvalidConfig(format!(
                        "{} feature names given for {k} features",
                        names.len()
                    )));
                }
                names.clone()
            }
            None if config.feature_groups == [3, 3] => {
                DEFAULT_FEATURE_NAMES.iter().map(|s| s.to_string()).collect()
            }
            None => (0..k).map(|i| format!("f{i}")).collect(),
        };

        Self::from_features(
            features,
            config.state_size,
            &config.weight_values,
            config.state_prior,
            config.hypothesis_cap,
            Some(names),
        )
    }

    /// Builds an environment from an explicit action feature table. Used for
    /// action sets that are not a product of feature groups.
    pub fn from_features(
        features: Vec<FeatureVector>,
        state_size: usize,
        weight_values: &[i32],
        state_prior: StatePriorKind,
        hypothesis_cap: u64,
        feature_names: Option<Vec<String>>,
    ) -> Result<Self, ModelError> {
        let k = features.first().map(FeatureVector::len).unwrap_or(0);
        if k == 0 {
            return Err(ModelError::InvalidConfig("no actions or no features".into()));
        }
        if let Some(f) = features.iter().find(|f| f.len() != k) {
            return Err(ModelError::DimensionMismatch {
                features: f.len(),
                weights: k,
            });
        }
        if state_size == 0 || state_size > features.len() {
            return Err(ModelError::InvalidConfig(format!(
                "state size {state_size} must be in 1..={}",
                features.len()
            )));
        }
        let mut value_set = weight_values.to_vec();
        value_set.sort_unstable();
        value_set.dedup();
        if value_set.is_empty() {
            return Err(ModelError::InvalidConfig("empty weight value set".into()));
        }
        if value_set.len() != weight_values.len() {
            return Err(ModelError::InvalidConfig(
                "weight value set contains duplicates".into(),
            ));
        }

        let hypotheses = enumerate_weight_hypotheses(k, &value_set, hypothesis_cap)?;
        let actions: Vec<Action> = features
            .into_iter()
            .enumerate()
            .map(|(id, features)| Action { id, features })
            .collect();
        let states = combinations(actions.len(), state_size)
            .into_iter()
            .map(State::new)
            .collect::<Result<Vec<_>, _>>()?;
        let state_prior = match state_prior {
            StatePriorKind::Uniform => vec![1.0 / states.len() as f64; states.len()],
        };
        let feature_names = match feature_names {
            Some(n) if n.len() == k => n,
            Some(n) => {
                return Err(ModelError::InvalidConfig(format!(
                    "{} feature names given for {k} features",
                    n.len()
                )))
            }
            None => (0..k).map(|i| format!("f{i}")).collect(),
        };

        Ok(Environment {
            k,
            actions,
            states,
            hypotheses,
            state_prior,
            value_set,
            feature_names,
        })
    }

    /// Number of features.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn hypotheses(&self) -> &[RewardWeights] {
        &self.hypotheses
    }

    pub fn state_prior(&self) -> &[f64] {
        &self.state_prior
    }

    pub fn value_set(&self) -> &[i32] {
        &self.value_set
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn state_index(&self, state: &State) -> Option<usize> {
        self.states.binary_search(state).ok()
    }

    /// Checks that `w` has length K and every entry lies in the value set.
    pub fn validate_weights(&self, w: &RewardWeights) -> Result<(), ModelError> {
        if w.len() != self.k {
            return Err(ModelError::DimensionMismatch {
                features: self.k,
                weights: w.len(),
            });
        }
        if let Some(v) = w.0.iter().find(|v| !self.value_set.contains(v)) {
            return Err(ModelError::InvalidConfig(format!(
                "weight {v} is outside the value set {:?}",
                self.value_set
            )));
        }
        Ok(())
    }

    /// Short human-readable label for an action, e.g. `a3 (blue spots)`.
    pub fn action_label(&self, id: usize) -> String {
        let names: Vec<&str> = self.actions[id]
            .features
            .active()
            .map(|f| self.feature_names[f].as_str())
            .collect();
        format!("a{id} ({})", names.join(" "))
    }
}

/// All |values|^K weight vectors in lexicographic order of `values`.
pub fn enumerate_weight_hypotheses(
    k: usize,
    values: &[i32],
    cap: u64,
) -> Result<Vec<RewardWeights>, ModelError> {
    if k == 0 || values.is_empty() {
        return Err(ModelError::InvalidConfig(
            "need at least one feature and one weight value".into(),
        ));
    }
    let count = u32::try_from(k)
        .ok()
        .and_then(|k| (values.len() as u128).checked_pow(k))
        .unwrap_or(u128::MAX);
    if count > u128::from(cap) {
        return Err(ModelError::TooLarge { count, cap });
    }
    let count = count as usize;
    let n = values.len();
    let mut out = Vec::with_capacity(count);
    let mut digits = vec![0usize; k];
    for _ in 0..count {
        out.push(RewardWeights(digits.iter().map(|&d| values[d]).collect()));
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < n {
                break;
            }
            *d = 0;
        }
    }
    Ok(out)
}

/// All size-`m` subsets of `0..n` in lexicographic order.
fn combinations(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..m).rev().find(|&i| idx[i] != i + n - m) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
