//! Brute-force reference implementations.
//!
//! Everything here is computed from the definitions directly: beliefs are
//! explicit filtered lists, expected rewards are sums over hypotheses, every
//! speaker utility recomputes listener policies from scratch, and softmaxes
//! are plain normalized exponentials. No response caching, no mean-weight
//! shortcut.

#![allow(dead_code)]

use rdesign::bandit::reward;
use rdesign::{Environment, EnvironmentConfig, RewardWeights, State, Utterance};

pub fn tiny_env() -> Environment {
    // K = 4, 4 actions, states of size 2, values {-1, 0, 1}
    Environment::build(&EnvironmentConfig {
        feature_groups: vec![2, 2],
        state_size: 2,
        weight_values: vec![-1, 0, 1],
        ..Default::default()
    })
    .unwrap()
}

fn naive_softmax(scores: &[f64], beta: f64) -> Vec<f64> {
    let e: Vec<f64> = scores.iter().map(|s| (beta * s).exp()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|x| x / z).collect()
}

/// L0 policy over `s` after hearing `u`, with a uniform grid prior.
pub fn l0_policy(env: &Environment, u: &Utterance, s: &State, beta_l0: f64) -> Vec<f64> {
    match *u {
        Utterance::Instruction { action } => {
            if s.action_ids().contains(&action) {
                s.action_ids()
                    .iter()
                    .map(|&a| if a == action { 1.0 } else { 0.0 })
                    .collect()
            } else {
                vec![1.0 / s.len() as f64; s.len()]
            }
        }
        Utterance::Description { feature, value } => {
            let consistent: Vec<&RewardWeights> = env
                .hypotheses()
                .iter()
                .filter(|w| w.0[feature] == value)
                .collect();
            let p = 1.0 / consistent.len() as f64;
            let expected: Vec<f64> = s
                .action_ids()
                .iter()
                .map(|&a| {
                    consistent
                        .iter()
                        .map(|w| reward(&env.actions()[a], w).unwrap() as f64 * p)
                        .sum()
                })
                .collect();
            naive_softmax(&expected, beta_l0)
        }
    }
}

pub fn present_utility(
    env: &Environment,
    u: &Utterance,
    s: &State,
    w: &RewardWeights,
    beta_l0: f64,
) -> f64 {
    let pi = l0_policy(env, u, s, beta_l0);
    s.action_ids()
        .iter()
        .zip(pi)
        .map(|(&a, p)| p * reward(&env.actions()[a], w).unwrap() as f64)
        .sum()
}

pub fn future_utility(env: &Environment, u: &Utterance, w: &RewardWeights, beta_l0: f64) -> f64 {
    env.states()
        .iter()
        .zip(env.state_prior())
        .map(|(s, &p)| p * present_utility(env, u, s, w, beta_l0))
        .sum()
}

pub fn speaker_utility(
    env: &Environment,
    u: &Utterance,
    s: &State,
    w: &RewardWeights,
    horizon: u32,
    beta_l0: f64,
) -> f64 {
    present_utility(env, u, s, w, beta_l0)
        + (horizon as f64 - 1.0) * future_utility(env, u, w, beta_l0)
}

pub fn speaker_distribution(
    env: &Environment,
    utterances: &[Utterance],
    s: &State,
    w: &RewardWeights,
    horizon: u32,
    beta_l0: f64,
    beta_s1: f64,
) -> Vec<f64> {
    let utils: Vec<f64> = utterances
        .iter()
        .map(|u| speaker_utility(env, u, s, w, horizon, beta_l0))
        .collect();
    naive_softmax(&utils, beta_s1)
}

/// Fixed-horizon pragmatic posterior with a uniform prior.
pub fn l1_fixed(
    env: &Environment,
    utterances: &[Utterance],
    s: &State,
    u: usize,
    horizon: u32,
    beta_l0: f64,
    beta_s1: f64,
) -> Vec<f64> {
    let prior = 1.0 / env.hypotheses().len() as f64;
    let raw: Vec<f64> = env
        .hypotheses()
        .iter()
        .map(|w| speaker_distribution(env, utterances, s, w, horizon, beta_l0, beta_s1)[u] * prior)
        .collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / z).collect()
}

/// Joint posterior over (horizon, w), row-major by horizon, plus the
/// w-marginal and h-marginal.
pub fn l1_joint(
    env: &Environment,
    utterances: &[Utterance],
    s: &State,
    u: usize,
    horizons: &[u32],
    beta_l0: f64,
    beta_s1: f64,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n_w = env.hypotheses().len();
    let p_w = 1.0 / n_w as f64;
    let p_h = 1.0 / horizons.len() as f64;
    let mut joint = Vec::new();
    for &h in horizons {
        for w in env.hypotheses() {
            joint.push(speaker_distribution(env, utterances, s, w, h, beta_l0, beta_s1)[u] * p_w * p_h);
        }
    }
    let z: f64 = joint.iter().sum();
    joint.iter_mut().for_each(|x| *x /= z);
    let mut over_w = vec![0.0; n_w];
    let mut over_h = vec![0.0; horizons.len()];
    for (hi, row) in joint.chunks(n_w).enumerate() {
        for (wi, x) in row.iter().enumerate() {
            over_w[wi] += x;
            over_h[hi] += x;
        }
    }
    (joint, over_w, over_h)
}

/// Action policy from an explicit posterior: Σ_w R(a, w)·b(w), then softmax.
pub fn policy_from_posterior(env: &Environment, posterior: &[f64], s: &State, beta_l0: f64) -> Vec<f64> {
    let expected: Vec<f64> = s
        .action_ids()
        .iter()
        .map(|&a| {
            env.hypotheses()
                .iter()
                .zip(posterior)
                .map(|(w, p)| reward(&env.actions()[a], w).unwrap() as f64 * p)
                .sum()
        })
        .collect();
    naive_softmax(&expected, beta_l0)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for k in i..=j {
                r[idx[k]] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
