use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bandit::{EnvironmentConfig, RewardWeights};
use crate::error::HarnessError;
use crate::language::UtteranceKind;

/// Illustrative true weights for the default environment:
/// green +2, blue -2, red 0, spots -1, stripes +1, solid 0.
pub const DEFAULT_TRUE_W: [i32; 6] = [2, -2, 0, -1, 1, 0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ListenerVariant {
    /// L1 assumes the speaker's true horizon.
    Known,
    /// Speaker uses a fixed short horizon; L1 assumes each configured horizon.
    Misaligned,
    /// L1 infers the horizon jointly under the horizon prior.
    Joint,
}

impl ListenerVariant {
    pub const ALL: [ListenerVariant; 3] = [
        ListenerVariant::Known,
        ListenerVariant::Misaligned,
        ListenerVariant::Joint,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ListenerVariant::Known => "known",
            ListenerVariant::Misaligned => "misaligned",
            ListenerVariant::Joint => "joint",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub environment: EnvironmentConfig,
    /// Defaults to [`DEFAULT_TRUE_W`], which only fits the default environment.
    #[serde(default)]
    pub true_w: Option<RewardWeights>,
    #[serde(default = "default_beta_l0")]
    pub beta_l0: f64,
    #[serde(default = "default_beta_s1")]
    pub beta_s1: f64,
    #[serde(default = "default_horizons")]
    pub horizons: Vec<u32>,
    #[serde(default = "default_kinds")]
    pub utterance_kinds: Vec<UtteranceKind>,
    #[serde(default = "default_horizon_prior")]
    pub horizon_prior: Vec<u32>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// States that get per-utterance probability rows.
    #[serde(default = "default_report_states")]
    pub report_states: Vec<usize>,
    /// Utterance set used by the speaker in the pragmatics sweep.
    #[serde(default = "default_pragmatics_kind")]
    pub pragmatics_kind: UtteranceKind,
    #[serde(default = "default_variants")]
    pub listener_variants: Vec<ListenerVariant>,
    /// Speaker horizon in the misaligned condition.
    #[serde(default = "default_misaligned_h")]
    pub misaligned_speaker_h: u32,
}

fn default_beta_l0() -> f64 {
    3.0
}
fn default_beta_s1() -> f64 {
    10.0
}
fn default_horizons() -> Vec<u32> {
    (1..=10).collect()
}
fn default_kinds() -> Vec<UtteranceKind> {
    UtteranceKind::ALL.to_vec()
}
fn default_horizon_prior() -> Vec<u32> {
    vec![1, 2, 3, 4, 5, 10]
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_report_states() -> Vec<usize> {
    vec![0]
}
fn default_pragmatics_kind() -> UtteranceKind {
    UtteranceKind::Both
}
fn default_variants() -> Vec<ListenerVariant> {
    ListenerVariant::ALL.to_vec()
}
fn default_misaligned_h() -> u32 {
    1
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            environment: EnvironmentConfig::default(),
            true_w: None,
            beta_l0: default_beta_l0(),
            beta_s1: default_beta_s1(),
            horizons: default_horizons(),
            utterance_kinds: default_kinds(),
            horizon_prior: default_horizon_prior(),
            output_dir: default_output_dir(),
            report_states: default_report_states(),
            pragmatics_kind: default_pragmatics_kind(),
            listener_variants: default_variants(),
            misaligned_speaker_h: default_misaligned_h(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Explicit `true_w`, or the default when the environment is the default one.
    pub fn resolved_true_w(&self) -> Result<RewardWeights, HarnessError> {
        match &self.true_w {
            Some(w) => Ok(w.clone()),
            None if self.environment.feature_groups == [3, 3] => {
                Ok(RewardWeights(DEFAULT_TRUE_W.to_vec()))
            }
            None => Err(HarnessError::Config(
                "true_w is required for a non-default environment".into(),
            )),
        }
    }

    /// Checks everything that does not need the built environment.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.horizons.is_empty() {
            return bad("horizons must not be empty".into());
        }
        if self.horizons.contains(&0) || self.horizon_prior.contains(&0) {
            return bad("horizons must be >= 1".into());
        }
        if has_duplicates(&self.horizons) {
            return bad("horizons contain duplicates".into());
        }
        if self.horizon_prior.is_empty() || has_duplicates(&self.horizon_prior) {
            return bad("horizon_prior must be non-empty with distinct horizons".into());
        }
        if self.utterance_kinds.is_empty() || has_duplicates(&self.utterance_kinds) {
            return bad("utterance_kinds must be non-empty and distinct".into());
        }
        if has_duplicates(&self.listener_variants) {
            return bad("listener_variants contain duplicates".into());
        }
        if self.misaligned_speaker_h == 0 {
            return bad("misaligned_speaker_h must be >= 1".into());
        }
        for (name, beta) in [("beta_l0", self.beta_l0), ("beta_s1", self.beta_s1)] {
            if !(beta.is_finite() && beta >= 0.0) {
                return bad(format!("{name} must be finite and non-negative"));
            }
        }
        Ok(())
    }
}

fn has_duplicates<T: Ord + Clone>(xs: &[T]) -> bool {
    let mut v = xs.to_vec();
    v.sort();
    v.windows(2).any(|w| w[0] == w[1])
}
