//! Max-subtracted softmax shared by listeners and the speaker.
//!
//! Speaker exponents reach β·U ≈ 400 at long horizons. Scores are shifted by
//! their maximum before exponentiation so every term lies in (0, 1].

/// Overwrites `scores` with softmax(beta * scores).
pub fn softmax_in_place(scores: &mut [f64], beta: f64) {
    if scores.is_empty() {
        return;
    }
    let max = scores.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
    let mut total = 0.0;
    for x in scores.iter_mut() {
        *x = (beta * (*x - max)).exp();
        total += *x;
    }
    for x in scores.iter_mut() {
        *x /= total;
    }
}

pub fn softmax(scores: &[f64], beta: f64) -> Vec<f64> {
    let mut out = scores.to_vec();
    softmax_in_place(&mut out, beta);
    out
}

/// log Σ exp(beta * x), stable for large arguments.
pub fn log_sum_exp(scores: &[f64], beta: f64) -> f64 {
    let max = scores.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let total: f64 = scores.iter().map(|&x| (beta * (x - max)).exp()).sum();
    beta * max + total.ln()
}
