//! Literal listener (L0).
//!
//! Instructions act as partial policies: execute the named action when it is
//! in the state, otherwise pick uniformly. Descriptions filter the belief over
//! weight hypotheses, after which the listener softmaxes over expected reward.

use serde::Serialize;

use crate::bandit::{Environment, State};
use crate::error::ModelError;
use crate::language::{description_consistent, Utterance};
use crate::softmax::softmax_in_place;

/// Probability table over the environment's hypothesis list.
#[derive(Debug, Clone, PartialEq)]
pub struct Belief {
    mass: Vec<f64>,
}

impl Belief {
    pub fn uniform(env: &Environment) -> Self {
        let n = env.hypotheses().len();
        Belief {
            mass: vec![1.0 / n as f64; n],
        }
    }

    pub fn point_mass(env: &Environment, index: usize) -> Self {
        let mut mass = vec![0.0; env.hypotheses().len()];
        mass[index] = 1.0;
        Belief { mass }
    }

    /// Normalizes non-negative weights into a belief.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self, ModelError> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(ModelError::InvalidDistribution(
                "belief weights must be finite and non-negative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(ModelError::DegeneratePosterior);
        }
        Ok(Belief {
            mass: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// Belief-mean weight vector Σ_w b(w)·w.
    pub fn mean_weights(&self, env: &Environment) -> Vec<f64> {
        let mut mean = vec![0.0; env.k()];
        for (w, &p) in env.hypotheses().iter().zip(&self.mass) {
            if p == 0.0 {
                continue;
            }
            for (m, &v) in mean.iter_mut().zip(&w.0) {
                *m += p * f64::from(v);
            }
        }
        mean
    }

    /// Indices and masses of the `k` most probable hypotheses, ties broken
    /// by hypothesis order.
    pub fn top(&self, k: usize) -> Vec<(usize, f64)> {
        let mut idx: Vec<usize> = (0..self.mass.len()).collect();
        idx.sort_by(|&a, &b| self.mass[b].total_cmp(&self.mass[a]).then(a.cmp(&b)));
        idx.into_iter().take(k).map(|i| (i, self.mass[i])).collect()
    }
}

/// Action probabilities for one state, aligned with the state's action order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Policy {
    pub state: State,
    pub probs: Vec<f64>,
}

impl Policy {
    /// Expected reward Σ_a π(a)·R(a, w) for real-valued weights.
    pub fn expected_reward(&self, env: &Environment, w: &[f64]) -> f64 {
        self.state
            .action_ids()
            .iter()
            .zip(&self.probs)
            .map(|(&a, &p)| p * env.actions()[a].features.dot_f64(w))
            .sum()
    }

    /// Expected feature vector Σ_a π(a)·φ(a).
    pub fn expected_features(&self, env: &Environment) -> Vec<f64> {
        let mut psi = vec![0.0; env.k()];
        for (&a, &p) in self.state.action_ids().iter().zip(&self.probs) {
            for f in env.actions()[a].features.active() {
                psi[f] += p;
            }
        }
        psi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct ListenerConfig {
    pub beta_l0: f64,
}

impl Default for ListenerConfig {
    fn default() -> Self {
        ListenerConfig { beta_l0: 3.0 }
    }
}

impl ListenerConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.beta_l0.is_finite() && self.beta_l0 >= 0.0) {
            return Err(ModelError::InvalidConfig(format!(
                "beta_l0 must be finite and non-negative, got {}",
                self.beta_l0
            )));
        }
        Ok(())
    }
}

pub struct LiteralListener<'a> {
    env: &'a Environment,
    prior: Belief,
    cfg: ListenerConfig,
}

impl<'a> LiteralListener<'a> {
    pub fn new(env: &'a Environment, prior: Belief, cfg: ListenerConfig) -> Result<Self, ModelError> {
        cfg.validate()?;
        if prior.len() != env.hypotheses().len() {
            return Err(ModelError::InvalidDistribution(format!(
                "prior has {} entries for {} hypotheses",
                prior.len(),
                env.hypotheses().len()
            )));
        }
        Ok(LiteralListener { env, prior, cfg })
    }

    /// Uniform prior over the grid with the given config.
    pub fn uniform(env: &'a Environment, cfg: ListenerConfig) -> Result<Self, ModelError> {
        Self::new(env, Belief::uniform(env), cfg)
    }

    pub fn env(&self) -> &'a Environment {
        self.env
    }

    pub fn prior(&self) -> &Belief {
        &self.prior
    }

    pub fn config(&self) -> ListenerConfig {
        self.cfg
    }

    pub fn instruction_policy(&self, action_id: usize, s: &State) -> Result<Policy, ModelError> {
        if s.is_empty() {
            return Err(ModelError::InvalidState("empty state".into()));
        }
        let probs = match s.position(action_id) {
            Some(pos) => {
                let mut p = vec![0.0; s.len()];
                p[pos] = 1.0;
                p
            }
            None => vec![1.0 / s.len() as f64; s.len()],
        };
        Ok(Policy {
            state: s.clone(),
            probs,
        })
    }

    /// Rules out hypotheses inconsistent with ⟨feature, value⟩ and renormalizes.
    pub fn belief_update(
        &self,
        prior: &Belief,
        feature: usize,
        value: i32,
    ) -> Result<Belief, ModelError> {
        let weights: Vec<f64> = self
            .env
            .hypotheses()
            .iter()
            .zip(prior.mass())
            .map(|(w, &p)| {
                if description_consistent(feature, value, w) {
                    p
                } else {
                    0.0
                }
            })
            .collect();
        Belief::from_weights(weights).map_err(|e| match e {
            ModelError::DegeneratePosterior => ModelError::InconsistentEvidence,
            other => other,
        })
    }

    pub fn action_policy(&self, belief: &Belief, s: &State) -> Policy {
        let mean = belief.mean_weights(self.env);
        policy_from_mean_weights(self.env, &mean, s, self.cfg.beta_l0)
    }

    pub fn respond(&self, u: &Utterance, s: &State) -> Result<Policy, ModelError> {
        u.validate(self.env)?;
        match *u {
            Utterance::Instruction { action } => self.instruction_policy(action, s),
            Utterance::Description { feature, value } => {
                if s.is_empty() {
                    return Err(ModelError::InvalidState("empty state".into()));
                }
                let posterior = self.belief_update(&self.prior, feature, value)?;
                Ok(self.action_policy(&posterior, s))
            }
        }
    }
}

/// Softmax policy over `s` given a mean weight vector. Expected reward is
/// linear in w, so Σ_w b(w)·R(a, w) = R(a, w̄).
pub fn policy_from_mean_weights(env: &Environment, mean: &[f64], s: &State, beta: f64) -> Policy {
    let mut probs: Vec<f64> = s
        .action_ids()
        .iter()
        .map(|&a| env.actions()[a].features.dot_f64(mean))
        .collect();
    softmax_in_place(&mut probs, beta);
    Policy {
        state: s.clone(),
        probs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandit::{EnvironmentConfig, FeatureVector, RewardWeights, StatePriorKind};

    fn env() -> Environment {
        Environment::build(&EnvironmentConfig::default()).unwrap()
    }

    fn state(ids: &[usize]) -> State {
        State::new(ids.to_vec()).unwrap()
    }

    #[test]
    fn instruction_policy_cases() {
        let env = env();
        let l0 = LiteralListener::uniform(&env, ListenerConfig::default()).unwrap();
        let s = state(&[1, 2, 3]);
        assert_eq!(l0.instruction_policy(1, &s).unwrap().probs, vec![1.0, 0.0, 0.0]);
        assert_eq!(
            l0.instruction_policy(8, &s).unwrap().probs,
            vec![1.0 / 3.0; 3]
        );
        assert_eq!(l0.instruction_policy(8, &state(&[1])).unwrap().probs, vec![1.0]);
    }

    #[test]
    fn empty_state_is_rejected() {
        let env = env();
        let l0 = LiteralListener::uniform(&env, ListenerConfig::default()).unwrap();
        assert!(State::new(vec![]).is_err());
        // Deserialization bypasses the constructor check.
        let empty: State = serde_json::from_str(r#"{"action_ids":[]}"#).unwrap();
        assert!(matches!(
            l0.instruction_policy(0, &empty),
            Err(ModelError::InvalidState(_))
        ));
        assert!(l0
            .respond(&Utterance::Description { feature: 0, value: 1 }, &empty)
            .is_err());
    }

    #[test]
    fn description_filters_uniform_prior() {
        let env = env();
        let l0 = LiteralListener::uniform(&env, ListenerConfig::default()).unwrap();
        let post = l0.belief_update(l0.prior(), 2, -2).unwrap();
        let support: Vec<usize> = (0..post.len()).filter(|&i| post.mass()[i] > 0.0).collect();
        assert_eq!(support.len(), 3125);
        for &i in &support {
            assert_eq!(env.hypotheses()[i].0[2], -2);
            assert!((post.mass()[i] - 1.0 / 3125.0).abs() < 1e-15);
        }
        let twice = l0.belief_update(&post, 2, -2).unwrap();
        for (a, b) in twice.mass().iter().zip(post.mass()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn point_mass_survives_consistent_description() {
        let env = env();
        let l0 = LiteralListener::uniform(&env, ListenerConfig::default()).unwrap();
        let idx = env
            .hypotheses()
            .iter()
            .position(|w| w.0 == [2, -2, 0, -1, 1, 0])
            .unwrap();
        let pm = Belief::point_mass(&env, idx);
        assert_eq!(l0.belief_update(&pm, 1, -2).unwrap(), pm);
        assert_eq!(
            l0.belief_update(&pm, 1, 2),
            Err(ModelError::InconsistentEvidence)
        );
    }

    #[test]
    fn action_policy_temperatures() {
        let env = env();
        let cold = LiteralListener::uniform(&env, ListenerConfig { beta_l0: 0.0 }).unwrap();
        let s = state(&[0, 4, 8]);
        let idx = env
            .hypotheses()
            .iter()
            .position(|w| w.0 == [2, -2, 0, -1, 1, 0])
            .unwrap();
        let pm = Belief::point_mass(&env, idx);
        for p in cold.action_policy(&pm, &s).probs {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
        // Symmetric grid: uniform belief has zero mean.
        let warm = LiteralListener::uniform(&env, ListenerConfig::default()).unwrap();
        for p in warm.action_policy(warm.prior(), &s).probs {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn point_mass_softmax_values() {
        // Actions with rewards 2, 0, -2 under w = (1, 0, -1).
        let features = vec![
            FeatureVector::new(vec![1, 0, 0]).unwrap(),
            FeatureVector::new(vec![0, 1, 0]).unwrap(),
            FeatureVector::new(vec![0, 0, 1]).unwrap(),
        ];
        let env = Environment::from_features(
            features,
            3,
            &[-2, 0, 2],
            StatePriorKind::Uniform,
            100,
            None,
        )
        .unwrap();
        let idx = env
            .hypotheses()
            .iter()
            .position(|w| *w == RewardWeights(vec![2, 0, -2]))
            .unwrap();
        let l0 = LiteralListener::uniform(&env, ListenerConfig::default()).unwrap();
        let p = l0
            .action_policy(&Belief::point_mass(&env, idx), &env.states()[0])
            .probs;
        let expected = [0.997_521_263_015_562_3, 0.002_472_608_001_970_8, 6.128_982_466_927_776e-6];
        for (a, b) in p.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn respond_dispatch() {
        let env = env();
        let l0 = LiteralListener::uniform(&env, ListenerConfig::default()).unwrap();
        let s = state(&[1, 4, 7]);
        let p = l0.respond(&Utterance::Instruction { action: 1 }, &s).unwrap();
        assert_eq!(p.probs, vec![1.0, 0.0, 0.0]);

        let cold = LiteralListener::uniform(&env, ListenerConfig { beta_l0: 0.0 }).unwrap();
        let p = cold
            .respond(&Utterance::Description { feature: 0, value: 2 }, &s)
            .unwrap();
        assert!(p.probs.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-15));

        assert!(l0
            .respond(&Utterance::Description { feature: 0, value: 7 }, &s)
            .is_err());
    }

    #[test]
    fn blue_minus_two_lowers_blue() {
        // a3 = blue spots, a6 = red spots, a7 = red stripes
        let env = env();
        let l0 = LiteralListener::uniform(&env, ListenerConfig::default()).unwrap();
        let s = state(&[3, 6, 7]);
        let p = l0
            .respond(&Utterance::Description { feature: 1, value: -2 }, &s)
            .unwrap();
        assert!(p.probs[0] < p.probs[1] && p.probs[0] < p.probs[2]);
    }

    #[test]
    fn rejects_negative_beta() {
        let env = env();
        assert!(LiteralListener::uniform(&env, ListenerConfig { beta_l0: -1.0 }).is_err());
    }

    #[test]
    fn top_hypotheses() {
        let b = Belief::from_weights(vec![0.1, 0.5, 0.2, 0.2]).unwrap();
        assert_eq!(
            b.top(3).iter().map(|x| x.0).collect::<Vec<_>>(),
            vec![1, 2, 3]
        );
    }
}
