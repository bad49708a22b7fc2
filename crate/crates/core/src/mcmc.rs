//! Metropolis acceptance shared by the oracle sampler and the conditional chains.

use rand::Rng;

/// `min(1, exp(log_ratio))`; NaN and `-inf` give 0.
pub fn acceptance_probability(log_ratio: f64) -> f64 {
    if log_ratio >= 0.0 {
        1.0
    } else if log_ratio.is_nan() {
        0.0
    } else {
        log_ratio.exp()
    }
}

/// Metropolis accept/reject. Always consumes one uniform so replays stay aligned.
pub fn accept<R: Rng + ?Sized>(log_ratio: f64, rng: &mut R) -> bool {
    let u: f64 = rng.random();
    u < acceptance_probability(log_ratio)
}
