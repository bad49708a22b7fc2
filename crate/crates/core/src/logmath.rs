//! Log-domain helpers for factorial-scale quantities.

use statrs::function::gamma::ln_gamma;

/// ln k!
pub fn ln_factorial(k: usize) -> f64 {
    if k < 2 {
        0.0
    } else {
        ln_gamma(k as f64 + 1.0)
    }
}

/// ln of the falling factorial (n)_k = n (n-1) ... (n-k+1); (n)_0 = 1.
///
/// Equals ln(C(n, k) k!).
pub fn ln_falling_factorial(n: usize, k: usize) -> f64 {
    assert!(k <= n, "falling factorial (n)_k needs k <= n");
    if k == 0 {
        return 0.0;
    }
    ln_factorial(n) - ln_factorial(n - k)
}

/// ln C(n, k).
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_falling_factorial(n, k) - ln_factorial(k)
}

/// Stable ln(sum exp(x_i)); `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    if max == f64::INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}
