//! Experiment sweeps behind the CLI.
//!
//! Nothing is sampled. Every average is an exact expectation over the
//! speaker's utterance distribution and the state prior, so repeated runs are
//! byte-identical.

pub mod config;
pub mod output;

use serde::Serialize;

use crate::bandit::{Environment, RewardWeights};
use crate::error::{HarnessError, ModelError};
use crate::exec::Execution;
use crate::language::{UtteranceKind, UtteranceSet};
use crate::literal::{Belief, ListenerConfig, LiteralListener, Policy};
use crate::pragmatics::{EvidenceTable, HorizonPrior, PragmaticListener};
use crate::softmax::softmax_in_place;
use crate::speaker::{argmax, ResponseCache, SpeakerConfig};

pub use config::{ListenerVariant, RunConfig, DEFAULT_TRUE_W};
pub use output::{emit_outputs, OutputPaths, CSV_HEADER};

pub const SPEAKER_EXPERIMENT: &str = "speaker";
pub const PRAGMATICS_EXPERIMENT: &str = "pragmatics";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    FutureReward,
    PresentReward,
    Gain,
    UtteranceProb,
    MapIsDescription,
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::FutureReward => "future_reward",
            Metric::PresentReward => "present_reward",
            Metric::Gain => "gain",
            Metric::UtteranceProb => "utterance_prob",
            Metric::MapIsDescription => "map_is_description",
        }
    }
}

/// One output row. For `utterance_prob` rows the condition is
/// `<kind>/<utterance token>`, e.g. `both/description:1:-2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub experiment: String,
    pub condition: String,
    pub speaker_h: u32,
    pub assumed_h: Option<u32>,
    pub state_id: Option<usize>,
    pub metric: Metric,
    pub value: f64,
}

/// Σ_s P(s) Σ_a π(a | s)·R(a, w) for one policy per state, in state order.
pub fn evaluate_listener_future_reward(
    policies: &[Policy],
    true_w: &RewardWeights,
    env: &Environment,
) -> Result<f64, ModelError> {
    env.validate_weights(true_w)?;
    let w = true_w.as_f64();
    let mut total = 0.0;
    for (i, (s, &p)) in env.states().iter().zip(env.state_prior()).enumerate() {
        let policy = policies
            .get(i)
            .filter(|pol| pol.state == *s)
            .ok_or(ModelError::IncompletePolicy(i))?;
        total += p * policy.expected_reward(env, &w);
    }
    Ok(total)
}

/// Future reward of the softmax policy induced by mean weights `mean`.
fn future_reward_from_mean(env: &Environment, mean: &[f64], true_w: &[f64], beta: f64) -> f64 {
    let mut probs = Vec::new();
    let mut total = 0.0;
    for (s, &p_s) in env.states().iter().zip(env.state_prior()) {
        probs.clear();
        probs.extend(
            s.action_ids()
                .iter()
                .map(|&a| env.actions()[a].features.dot_f64(mean)),
        );
        softmax_in_place(&mut probs, beta);
        let value: f64 = s
            .action_ids()
            .iter()
            .zip(&probs)
            .map(|(&a, &q)| q * env.actions()[a].features.dot_f64(true_w))
            .sum();
        total += p_s * value;
    }
    total
}

/// Per-horizon gains for one start state.
#[derive(Debug, Clone, Default)]
struct StateGains {
    known: Vec<f64>,
    misaligned: Vec<f64>,
    joint: Vec<f64>,
}

pub struct Harness {
    cfg: RunConfig,
    env: Environment,
    true_w: RewardWeights,
    exec: Execution,
}

impl Harness {
    pub fn new(cfg: RunConfig) -> Result<Self, HarnessError> {
        cfg.validate()?;
        let env = Environment::build(&cfg.environment)?;
        let true_w = cfg.resolved_true_w()?;
        env.validate_weights(&true_w)
            .map_err(|e| HarnessError::Config(format!("true_w: {e}")))?;
        if let Some(&s) = cfg.report_states.iter().find(|&&s| s >= env.states().len()) {
            return Err(HarnessError::Config(format!(
                "report state {s} out of range (environment has {} states)",
                env.states().len()
            )));
        }
        Ok(Harness {
            cfg,
            env,
            true_w,
            exec: Execution::default(),
        })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn env(&self) -> &Environment {
        &self.env
    }

    pub fn true_w(&self) -> &RewardWeights {
        &self.true_w
    }

    pub fn listener_config(&self) -> ListenerConfig {
        ListenerConfig {
            beta_l0: self.cfg.beta_l0,
        }
    }

    pub fn response_cache(&self, kind: UtteranceKind) -> Result<ResponseCache, ModelError> {
        let l0 = LiteralListener::uniform(&self.env, self.listener_config())?;
        ResponseCache::build(&l0, UtteranceSet::enumerate(&self.env, kind))
    }

    /// Speaker preferences and literal-listener rewards for every
    /// (utterance kind, horizon, start state).
    pub fn run_speaker_sweep(&self) -> Result<Vec<SweepRecord>, HarnessError> {
        let w = self.true_w.as_f64();
        let n_states = self.env.states().len();
        let mut records = Vec::new();
        for &kind in &self.cfg.utterance_kinds {
            let cache = self.response_cache(kind)?;
            let utterances = cache.utterances().utterances();
            let future: Vec<f64> = (0..utterances.len())
                .map(|u| cache.future_utility(u, &w))
                .collect();
            for &h in &self.cfg.horizons {
                let cfg = SpeakerConfig {
                    beta_s1: self.cfg.beta_s1,
                    horizon: h,
                };
                let rows = self.exec.map_range(n_states, |s| {
                    let mut dist = vec![0.0; utterances.len()];
                    cache.speaker_distribution_into(&w, s, cfg, &mut dist);
                    let present: f64 = dist
                        .iter()
                        .enumerate()
                        .map(|(u, p)| p * cache.present_utility(u, s, &w))
                        .sum();
                    let fut: f64 = dist.iter().zip(&future).map(|(p, f)| p * f).sum();
                    let map_desc = utterances[argmax(&dist)].is_description();
                    (dist, present, fut, map_desc)
                });
                for (s, (dist, present, fut, map_desc)) in rows.into_iter().enumerate() {
                    let row = |metric, value| SweepRecord {
                        experiment: SPEAKER_EXPERIMENT.into(),
                        condition: kind.as_str().into(),
                        speaker_h: h,
                        assumed_h: None,
                        state_id: Some(s),
                        metric,
                        value,
                    };
                    records.push(row(Metric::FutureReward, fut));
                    records.push(row(Metric::PresentReward, present));
                    records.push(row(
                        Metric::MapIsDescription,
                        if map_desc { 1.0 } else { 0.0 },
                    ));
                    if self.cfg.report_states.contains(&s) {
                        for (u, p) in utterances.iter().zip(&dist) {
                            records.push(SweepRecord {
                                experiment: SPEAKER_EXPERIMENT.into(),
                                condition: format!("{kind}/{u}"),
                                speaker_h: h,
                                assumed_h: None,
                                state_id: Some(s),
                                metric: Metric::UtteranceProb,
                                value: *p,
                            });
                        }
                    }
                }
            }
        }
        Ok(records)
    }

    /// Gain in future reward of L1 over L0 under the configured listener
    /// variants. The speaker's utterance is taken in expectation over S1.
    pub fn run_pragmatics_sweep(&self) -> Result<Vec<SweepRecord>, HarnessError> {
        let cache = self.response_cache(self.cfg.pragmatics_kind)?;
        let n_utt = cache.utterances().len();
        let w = self.true_w.as_f64();
        let beta_l0 = self.cfg.beta_l0;
        let h_prior = HorizonPrior::uniform(self.cfg.horizon_prior.clone())?;
        let l1 = PragmaticListener::new(
            &self.env,
            &cache,
            self.cfg.beta_s1,
            Belief::uniform(&self.env),
            self.listener_config(),
        )?
        .with_execution(Execution::Sequential);

        let variants = &self.cfg.listener_variants;
        let wants = |v| variants.contains(&v);
        let misaligned_h = self.cfg.misaligned_speaker_h;

        // Listener-side horizons needing evidence tables.
        let mut needed: Vec<u32> = Vec::new();
        if wants(ListenerVariant::Known) || wants(ListenerVariant::Misaligned) {
            needed.extend(&self.cfg.horizons);
        }
        if wants(ListenerVariant::Joint) {
            needed.extend(h_prior.support());
        }
        needed.sort_unstable();
        needed.dedup();
        let slot = |h: u32| needed.binary_search(&h).expect("horizon was requested");

        // L0's future reward after each utterance.
        let l0_future: Vec<f64> = (0..n_utt).map(|u| cache.future_utility(u, &w)).collect();

        let per_state = self.exec.map_range(self.env.states().len(), |s| {
            let tables = l1.evidence(s, &needed)?;
            let l1_future = |table: &EvidenceTable| -> Result<Vec<f64>, ModelError> {
                (0..n_utt)
                    .map(|u| {
                        let mean = table.posterior_mean(u)?;
                        Ok(future_reward_from_mean(&self.env, &mean, &w, beta_l0))
                    })
                    .collect()
            };
            let fr: Vec<Vec<f64>> = tables.iter().map(&l1_future).collect::<Result<_, _>>()?;
            let joint_fr = if wants(ListenerVariant::Joint) {
                let parts: Vec<&EvidenceTable> =
                    h_prior.support().iter().map(|&h| &tables[slot(h)]).collect();
                Some(l1_future(&EvidenceTable::mixture(&parts, h_prior.mass()))?)
            } else {
                None
            };

            let speaker_dist = |h: u32| {
                let mut d = vec![0.0; n_utt];
                cache.speaker_distribution_into(
                    &w,
                    s,
                    SpeakerConfig {
                        beta_s1: self.cfg.beta_s1,
                        horizon: h,
                    },
                    &mut d,
                );
                d
            };
            let gain = |dist: &[f64], listener: &[f64]| -> f64 {
                dist.iter()
                    .zip(listener.iter().zip(&l0_future))
                    .map(|(p, (l1v, l0v))| p * (l1v - l0v))
                    .sum()
            };

            let mut out = StateGains::default();
            let short = speaker_dist(misaligned_h);
            for &h in &self.cfg.horizons {
                let dist = speaker_dist(h);
                if wants(ListenerVariant::Known) {
                    out.known.push(gain(&dist, &fr[slot(h)]));
                }
                if wants(ListenerVariant::Misaligned) {
                    out.misaligned.push(gain(&short, &fr[slot(h)]));
                }
                if let Some(jf) = &joint_fr {
                    out.joint.push(gain(&dist, jf));
                }
            }
            Ok::<_, ModelError>(out)
        });

        let mut records = Vec::new();
        for (s, gains) in per_state.into_iter().enumerate() {
            let gains = gains?;
            for (i, &h) in self.cfg.horizons.iter().enumerate() {
                let mut push = |variant: ListenerVariant, speaker_h, assumed_h, value| {
                    records.push(SweepRecord {
                        experiment: PRAGMATICS_EXPERIMENT.into(),
                        condition: variant.as_str().into(),
                        speaker_h,
                        assumed_h,
                        state_id: Some(s),
                        metric: Metric::Gain,
                        value,
                    })
                };
                if let Some(&g) = gains.known.get(i) {
                    push(ListenerVariant::Known, h, Some(h), g);
                }
                if let Some(&g) = gains.misaligned.get(i) {
                    push(ListenerVariant::Misaligned, misaligned_h, Some(h), g);
                }
                if let Some(&g) = gains.joint.get(i) {
                    push(ListenerVariant::Joint, h, None, g);
                }
            }
        }
        Ok(records)
    }

    pub fn run_all(&self) -> Result<Vec<SweepRecord>, HarnessError> {
        let mut records = self.run_speaker_sweep()?;
        records.extend(self.run_pragmatics_sweep()?);
        Ok(records)
    }

    pub fn emit(&self, records: &[SweepRecord], stem: &str) -> Result<OutputPaths, HarnessError> {
        emit_outputs(
            records,
            &self.cfg,
            self.env.state_prior(),
            &self.cfg.output_dir,
            stem,
        )
    }
}

pub fn run_speaker_sweep(cfg: &RunConfig) -> Result<Vec<SweepRecord>, HarnessError> {
    Harness::new(cfg.clone())?.run_speaker_sweep()
}

pub fn run_pragmatics_sweep(cfg: &RunConfig) -> Result<Vec<SweepRecord>, HarnessError> {
    Harness::new(cfg.clone())?.run_pragmatics_sweep()
}

/// Prior-weighted mean of `metric` over states for the matching rows.
pub fn mean_over_states(
    records: &[SweepRecord],
    state_prior: &[f64],
    mut select: impl FnMut(&SweepRecord) -> bool,
) -> Option<f64> {
    let mut total = 0.0;
    let mut weight = 0.0;
    for r in records.iter().filter(|r| select(r)) {
        let p = r.state_id.map(|s| state_prior[s]).unwrap_or(1.0);
        total += p * r.value;
        weight += p;
    }
    (weight > 0.0).then(|| total / weight)
}
