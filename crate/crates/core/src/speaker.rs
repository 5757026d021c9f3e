//! Reward-designing speaker (S1).
//!
//! The speaker scores each utterance by the reward the imagined literal
//! listener would collect: in the visible state, plus (H − 1) times the
//! expectation over i.i.d. future states. Because rewards are linear in the
//! weights, every listener response is summarized once by its expected
//! feature vector ψ(u, s) = Σ_a π_L0(a | u, s)·φ(a), and each utility becomes
//! an O(K) dot product with w.

use serde::{Deserialize, Serialize};

use crate::bandit::{Environment, RewardWeights};
use crate::error::ModelError;
use crate::language::{Utterance, UtteranceSet};
use crate::literal::{policy_from_mean_weights, LiteralListener};
use crate::softmax::softmax_in_place;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeakerConfig {
    pub beta_s1: f64,
    pub horizon: u32,
}

impl Default for SpeakerConfig {
    fn default() -> Self {
        SpeakerConfig {
            beta_s1: 10.0,
            horizon: 1,
        }
    }
}

impl SpeakerConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.beta_s1.is_finite() && self.beta_s1 >= 0.0) {
            return Err(ModelError::InvalidConfig(format!(
                "beta_s1 must be finite and non-negative, got {}",
                self.beta_s1
            )));
        }
        if self.horizon == 0 {
            return Err(ModelError::InvalidConfig("horizon must be at least 1".into()));
        }
        Ok(())
    }
}

/// Precomputed literal-listener responses for one utterance set.
#[derive(Debug, Clone)]
pub struct ResponseCache {
    k: usize,
    n_states: usize,
    utterances: UtteranceSet,
    /// [state][utterance][feature]
    psi: Vec<f64>,
    /// [utterance][feature]
    psi_future: Vec<f64>,
}

impl ResponseCache {
    pub fn build(listener: &LiteralListener<'_>, utterances: UtteranceSet) -> Result<Self, ModelError> {
        let env = listener.env();
        let k = env.k();
        let n_states = env.states().len();
        let n_utt = utterances.len();
        let beta = listener.config().beta_l0;

        let mut psi = vec![0.0; n_states * n_utt * k];
        let mut psi_future = vec![0.0; n_utt * k];
        for (ui, u) in utterances.utterances().iter().enumerate() {
            u.validate(env)?;
            let mean = match *u {
                Utterance::Description { feature, value } => Some(
                    listener
                        .belief_update(listener.prior(), feature, value)?
                        .mean_weights(env),
                ),
                Utterance::Instruction { .. } => None,
            };
            for (si, s) in env.states().iter().enumerate() {
                let policy = match (&mean, u) {
                    (Some(mean), _) => policy_from_mean_weights(env, mean, s, beta),
                    (None, Utterance::Instruction { action }) => {
                        listener.instruction_policy(*action, s)?
                    }
                    (None, Utterance::Description { .. }) => unreachable!(),
                };
                let expected = policy.expected_features(env);
                let p_s = env.state_prior()[si];
                let at = (si * n_utt + ui) * k;
                psi[at..at + k].copy_from_slice(&expected);
                for (f, x) in psi_future[ui * k..(ui + 1) * k].iter_mut().zip(&expected) {
                    *f += p_s * x;
                }
            }
        }
        Ok(ResponseCache {
            k,
            n_states,
            utterances,
            psi,
            psi_future,
        })
    }

    pub fn utterances(&self) -> &UtteranceSet {
        &self.utterances
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    /// ψ(u, s): expected feature vector of L0's response.
    pub fn psi(&self, utterance: usize, state: usize) -> &[f64] {
        let at = (state * self.utterances.len() + utterance) * self.k;
        &self.psi[at..at + self.k]
    }

    /// Σ_s P(s)·ψ(u, s).
    pub fn psi_future(&self, utterance: usize) -> &[f64] {
        &self.psi_future[utterance * self.k..(utterance + 1) * self.k]
    }

    /// Σ_a π_L0(a | u, s)·R(a, w).
    pub fn present_utility(&self, utterance: usize, state: usize, w: &[f64]) -> f64 {
        dot(self.psi(utterance, state), w)
    }

    /// Σ_s P(s)·present_utility(u, s, w).
    pub fn future_utility(&self, utterance: usize, w: &[f64]) -> f64 {
        dot(self.psi_future(utterance), w)
    }

    /// U_present + (H − 1)·U_future.
    pub fn speaker_utility(&self, utterance: usize, state: usize, w: &[f64], horizon: u32) -> f64 {
        let present = self.present_utility(utterance, state, w);
        if horizon == 1 {
            return present;
        }
        present + f64::from(horizon - 1) * self.future_utility(utterance, w)
    }

    /// Writes S1(· | w, s, H) over the cached utterance set into `out`.
    pub fn speaker_distribution_into(
        &self,
        w: &[f64],
        state: usize,
        cfg: SpeakerConfig,
        out: &mut [f64],
    ) {
        for (u, slot) in out.iter_mut().enumerate() {
            *slot = self.speaker_utility(u, state, w, cfg.horizon);
        }
        softmax_in_place(out, cfg.beta_s1);
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A speaker bound to one environment and response cache.
pub struct Speaker<'a> {
    env: &'a Environment,
    cache: &'a ResponseCache,
    cfg: SpeakerConfig,
}

impl<'a> Speaker<'a> {
    pub fn new(
        env: &'a Environment,
        cache: &'a ResponseCache,
        cfg: SpeakerConfig,
    ) -> Result<Self, ModelError> {
        cfg.validate()?;
        if cache.utterances().is_empty() {
            return Err(ModelError::InvalidConfig("empty utterance set".into()));
        }
        if cache.n_states() != env.states().len() || cache.k() != env.k() {
            return Err(ModelError::InvalidConfig(
                "response cache was built for a different environment".into(),
            ));
        }
        Ok(Speaker { env, cache, cfg })
    }

    pub fn config(&self) -> SpeakerConfig {
        self.cfg
    }

    pub fn cache(&self) -> &ResponseCache {
        self.cache
    }

    fn index(&self, u: &Utterance) -> Result<usize, ModelError> {
        self.cache
            .utterances()
            .index_of(u)
            .ok_or_else(|| ModelError::InvalidUtterance(format!("{u} is not in the speaker's set")))
    }

    fn weights(&self, w: &RewardWeights) -> Result<Vec<f64>, ModelError> {
        if w.len() != self.env.k() {
            return Err(ModelError::DimensionMismatch {
                features: self.env.k(),
                weights: w.len(),
            });
        }
        Ok(w.as_f64())
    }

    fn state(&self, state: usize) -> Result<usize, ModelError> {
        if state >= self.env.states().len() {
            return Err(ModelError::InvalidState(format!("unknown state {state}")));
        }
        Ok(state)
    }

    pub fn present_utility(
        &self,
        u: &Utterance,
        state: usize,
        w: &RewardWeights,
    ) -> Result<f64, ModelError> {
        Ok(self
            .cache
            .present_utility(self.index(u)?, self.state(state)?, &self.weights(w)?))
    }

    pub fn future_utility(&self, u: &Utterance, w: &RewardWeights) -> Result<f64, ModelError> {
        Ok(self.cache.future_utility(self.index(u)?, &self.weights(w)?))
    }

    pub fn utility(&self, u: &Utterance, state: usize, w: &RewardWeights) -> Result<f64, ModelError> {
        Ok(self.cache.speaker_utility(
            self.index(u)?,
            self.state(state)?,
            &self.weights(w)?,
            self.cfg.horizon,
        ))
    }

    /// S1(u | w, s, H) for every utterance, in utterance-set order.
    pub fn distribution(&self, w: &RewardWeights, state: usize) -> Result<Vec<f64>, ModelError> {
        let w = self.weights(w)?;
        let mut out = vec![0.0; self.cache.utterances().len()];
        self.cache
            .speaker_distribution_into(&w, self.state(state)?, self.cfg, &mut out);
        Ok(out)
    }

    /// Most probable utterance; the earliest in set order wins ties.
    pub fn map_utterance(&self, w: &RewardWeights, state: usize) -> Result<Utterance, ModelError> {
        let dist = self.distribution(w, state)?;
        Ok(self.cache.utterances().utterances()[argmax(&dist)])
    }
}

pub(crate) fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}
