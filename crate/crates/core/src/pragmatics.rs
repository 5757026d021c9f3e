//! Pragmatic listener (L1): inverse reward design over the weight grid.
//!
//! With a known speaker horizon the posterior is
//! `L1(w | s, u, H) ∝ S1(u | w, s, H)·P(w)`. With an unknown horizon the
//! listener infers (w, H) jointly and marginalizes H out.
//!
//! Each S1 evaluation normalizes over the whole utterance set for one
//! (w, H) pair, so a single pass over the grid yields the likelihood of every
//! utterance at once. [`EvidenceTable`] keeps that pass's sufficient
//! statistics (total mass and first moment per utterance), which is all the
//! sweeps need since L1 acts on the posterior mean.

use serde::Serialize;

use crate::bandit::{Environment, RewardWeights, State};
use crate::error::ModelError;
use crate::exec::Execution;
use crate::language::Utterance;
use crate::literal::{policy_from_mean_weights, Belief, ListenerConfig, Policy};
use crate::softmax::softmax_in_place;
use crate::speaker::{dot, ResponseCache, SpeakerConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HorizonPrior {
    support: Vec<u32>,
    mass: Vec<f64>,
}

impl HorizonPrior {
    pub fn new(support: Vec<u32>, mass: Vec<f64>) -> Result<Self, ModelError> {
        if support.is_empty() || support.len() != mass.len() {
            return Err(ModelError::InvalidDistribution(
                "horizon prior needs one mass per support point".into(),
            ));
        }
        if support.contains(&0) {
            return Err(ModelError::InvalidDistribution("horizons must be >= 1".into()));
        }
        let mut sorted = support.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != support.len() {
            return Err(ModelError::InvalidDistribution(
                "duplicate horizons in prior support".into(),
            ));
        }
        if mass.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(ModelError::InvalidDistribution(
                "horizon masses must be finite and non-negative".into(),
            ));
        }
        let total: f64 = mass.iter().sum();
        if total <= 0.0 {
            return Err(ModelError::InvalidDistribution("horizon prior has zero mass".into()));
        }
        Ok(HorizonPrior {
            support,
            mass: mass.into_iter().map(|m| m / total).collect(),
        })
    }

    pub fn uniform(support: Vec<u32>) -> Result<Self, ModelError> {
        let n = support.len();
        Self::new(support, vec![1.0; n])
    }

    pub fn point(horizon: u32) -> Result<Self, ModelError> {
        Self::new(vec![horizon], vec![1.0])
    }

    pub fn support(&self) -> &[u32] {
        &self.support
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }
}

impl Default for HorizonPrior {
    fn default() -> Self {
        HorizonPrior::uniform(vec![1, 2, 3, 4, 5, 10]).expect("static support")
    }
}

#[derive(Debug, Clone)]
pub struct JointPosterior {
    pub support: Vec<u32>,
    /// Horizon-marginalized belief over weights.
    pub over_w: Belief,
    /// Weight-marginalized belief over horizons.
    pub over_h: Vec<f64>,
    /// Row-major [horizon][hypothesis].
    pub joint: Vec<f64>,
}

/// Unnormalized posterior statistics for every utterance at one (state, H):
/// `mass[u] = Σ_w S1(u | w, s, H)·P(w)` and
/// `moment[u] = Σ_w S1(u | w, s, H)·P(w)·w`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceTable {
    k: usize,
    mass: Vec<f64>,
    moment: Vec<f64>,
}

impl EvidenceTable {
    fn zeros(n_utt: usize, k: usize) -> Self {
        EvidenceTable {
            k,
            mass: vec![0.0; n_utt],
            moment: vec![0.0; n_utt * k],
        }
    }

    fn add_assign(&mut self, other: &EvidenceTable) {
        for (a, b) in self.mass.iter_mut().zip(&other.mass) {
            *a += b;
        }
        for (a, b) in self.moment.iter_mut().zip(&other.moment) {
            *a += b;
        }
    }

    /// Prior-weighted mixture Σ_H P(H)·table_H.
    pub fn mixture(tables: &[&EvidenceTable], weights: &[f64]) -> EvidenceTable {
        let first = tables[0];
        let mut out = EvidenceTable::zeros(first.mass.len(), first.k);
        for (t, &p) in tables.iter().zip(weights) {
            for (a, b) in out.mass.iter_mut().zip(&t.mass) {
                *a += p * b;
            }
            for (a, b) in out.moment.iter_mut().zip(&t.moment) {
                *a += p * b;
            }
        }
        out
    }

    pub fn mass(&self, utterance: usize) -> f64 {
        self.mass[utterance]
    }

    /// Posterior-mean weights after hearing `utterance`.
    pub fn posterior_mean(&self, utterance: usize) -> Result<Vec<f64>, ModelError> {
        let z = self.mass[utterance];
        if !(z > 0.0) {
            return Err(ModelError::DegeneratePosterior);
        }
        Ok(self.moment[utterance * self.k..(utterance + 1) * self.k]
            .iter()
            .map(|m| m / z)
            .collect())
    }
}

pub struct PragmaticListener<'a> {
    env: &'a Environment,
    cache: &'a ResponseCache,
    beta_s1: f64,
    prior: Belief,
    listener: ListenerConfig,
    exec: Execution,
    /// Hypotheses as f64 rows, [hypothesis][feature].
    grid: Vec<f64>,
}

impl<'a> PragmaticListener<'a> {
    pub fn new(
        env: &'a Environment,
        cache: &'a ResponseCache,
        beta_s1: f64,
        prior: Belief,
        listener: ListenerConfig,
    ) -> Result<Self, ModelError> {
        SpeakerConfig { beta_s1, horizon: 1 }.validate()?;
        listener.validate()?;
        if prior.len() != env.hypotheses().len() {
            return Err(ModelError::InvalidDistribution(format!(
                "prior has {} entries for {} hypotheses",
                prior.len(),
                env.hypotheses().len()
            )));
        }
        if cache.utterances().is_empty() {
            return Err(ModelError::InvalidConfig("empty utterance set".into()));
        }
        let grid = env
            .hypotheses()
            .iter()
            .flat_map(|w| w.0.iter().map(|&v| f64::from(v)))
            .collect();
        Ok(PragmaticListener {
            env,
            cache,
            beta_s1,
            prior,
            listener,
            exec: Execution::default(),
            grid,
        })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn env(&self) -> &'a Environment {
        self.env
    }

    pub fn prior(&self) -> &Belief {
        &self.prior
    }

    fn weights(&self, i: usize) -> &[f64] {
        let k = self.env.k();
        &self.grid[i * k..(i + 1) * k]
    }

    fn check(&self, state: usize, u: &Utterance) -> Result<usize, ModelError> {
        if state >= self.env.states().len() {
            return Err(ModelError::InvalidState(format!("unknown state {state}")));
        }
        self.cache
            .utterances()
            .index_of(u)
            .ok_or_else(|| ModelError::InvalidUtterance(format!("{u} is not in the speaker's set")))
    }

    /// Unnormalized S1(u | w, s, H)·P(w) for every hypothesis, in grid order.
    fn likelihood_column(&self, state: usize, utterance: usize, horizon: u32) -> Vec<f64> {
        let n_utt = self.cache.utterances().len();
        let cfg = SpeakerConfig {
            beta_s1: self.beta_s1,
            horizon,
        };
        let parts = self.exec.map_chunks(self.prior.len(), |range| {
            let mut scratch = vec![0.0; n_utt];
            range
                .map(|i| {
                    let p = self.prior.mass()[i];
                    if p == 0.0 {
                        return 0.0;
                    }
                    self.cache
                        .speaker_distribution_into(self.weights(i), state, cfg, &mut scratch);
                    scratch[utterance] * p
                })
                .collect::<Vec<f64>>()
        });
        parts.concat()
    }

    /// L1(w | s, u, H) ∝ S1(u | w, s, H)·P(w).
    pub fn posterior_fixed(&self, state: usize, u: &Utterance, horizon: u32) -> Result<Belief, ModelError> {
        if horizon == 0 {
            return Err(ModelError::InvalidConfig("horizon must be at least 1".into()));
        }
        let ui = self.check(state, u)?;
        Belief::from_weights(self.likelihood_column(state, ui, horizon))
    }

    /// Joint (w, H) posterior with the horizon marginalized out.
    pub fn posterior_joint(
        &self,
        state: usize,
        u: &Utterance,
        h_prior: &HorizonPrior,
    ) -> Result<JointPosterior, ModelError> {
        let ui = self.check(state, u)?;
        let n_w = self.prior.len();
        let mut joint = Vec::with_capacity(n_w * h_prior.support().len());
        for (&h, &ph) in h_prior.support().iter().zip(h_prior.mass()) {
            joint.extend(self.likelihood_column(state, ui, h).into_iter().map(|x| x * ph));
        }
        let total: f64 = joint.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(ModelError::DegeneratePosterior);
        }
        joint.iter_mut().for_each(|x| *x /= total);

        let over_h = joint.chunks(n_w).map(|row| row.iter().sum()).collect();
        let mut over_w = vec![0.0; n_w];
        for row in joint.chunks(n_w) {
            for (a, b) in over_w.iter_mut().zip(row) {
                *a += b;
            }
        }
        Ok(JointPosterior {
            support: h_prior.support().to_vec(),
            over_w: Belief::from_weights(over_w)?,
            over_h,
            joint,
        })
    }

    /// Softmax action policy under the pragmatic posterior.
    pub fn action_policy(&self, posterior: &Belief, s: &State) -> Policy {
        let mean = posterior.mean_weights(self.env);
        policy_from_mean_weights(self.env, &mean, s, self.listener.beta_l0)
    }

    /// One pass over the grid producing an [`EvidenceTable`] per horizon.
    pub fn evidence(&self, state: usize, horizons: &[u32]) -> Result<Vec<EvidenceTable>, ModelError> {
        if state >= self.env.states().len() {
            return Err(ModelError::InvalidState(format!("unknown state {state}")));
        }
        if horizons.contains(&0) {
            return Err(ModelError::InvalidConfig("horizon must be at least 1".into()));
        }
        let k = self.env.k();
        let n_utt = self.cache.utterances().len();
        let beta = self.beta_s1;
        let parts = self.exec.map_chunks(self.prior.len(), |range| {
            let mut tables: Vec<EvidenceTable> =
                horizons.iter().map(|_| EvidenceTable::zeros(n_utt, k)).collect();
            let mut present = vec![0.0; n_utt];
            let mut future = vec![0.0; n_utt];
            let mut scores = vec![0.0; n_utt];
            for i in range {
                let p = self.prior.mass()[i];
                if p == 0.0 {
                    continue;
                }
                let w = self.weights(i);
                for u in 0..n_utt {
                    present[u] = dot(self.cache.psi(u, state), w);
                    future[u] = dot(self.cache.psi_future(u), w);
                }
                for (table, &h) in tables.iter_mut().zip(horizons) {
                    let scale = f64::from(h - 1);
                    for u in 0..n_utt {
                        scores[u] = if h == 1 {
                            present[u]
                        } else {
                            present[u] + scale * future[u]
                        };
                    }
                    softmax_in_place(&mut scores, beta);
                    for u in 0..n_utt {
                        let q = scores[u] * p;
                        table.mass[u] += q;
                        for (m, &x) in table.moment[u * k..(u + 1) * k].iter_mut().zip(w) {
                            *m += q * x;
                        }
                    }
                }
            }
            tables
        });
        let mut out: Vec<EvidenceTable> =
            horizons.iter().map(|_| EvidenceTable::zeros(n_utt, k)).collect();
        for part in &parts {
            for (acc, t) in out.iter_mut().zip(part) {
                acc.add_assign(t);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightedHypothesis {
    pub weights: RewardWeights,
    pub mass: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HorizonMass {
    pub horizon: u32,
    pub mass: f64,
}

/// JSON-facing digest of a posterior.
#[derive(Debug, Clone, Serialize)]
pub struct PosteriorSummary {
    pub mean_weights: Vec<f64>,
    pub top: Vec<WeightedHypothesis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon_marginal: Option<Vec<HorizonMass>>,
}

impl PosteriorSummary {
    pub fn from_belief(env: &Environment, belief: &Belief, top_k: usize) -> Self {
        PosteriorSummary {
            mean_weights: belief.mean_weights(env),
            top: belief
                .top(top_k)
                .into_iter()
                .map(|(i, mass)| WeightedHypothesis {
                    weights: env.hypotheses()[i].clone(),
                    mass,
                })
                .collect(),
            horizon_marginal: None,
        }
    }

    pub fn from_joint(env: &Environment, joint: &JointPosterior, top_k: usize) -> Self {
        let mut summary = Self::from_belief(env, &joint.over_w, top_k);
        summary.horizon_marginal = Some(
            joint
                .support
                .iter()
                .zip(&joint.over_h)
                .map(|(&horizon, &mass)| HorizonMass { horizon, mass })
                .collect(),
        );
        summary
    }
}
