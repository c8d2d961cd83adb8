//! Exact and log-space combinatorics for occupation-number amplitudes.
//!
//! Multinomial coefficients are evaluated exactly in integer arithmetic up
//! to [`EXACT_TOTAL_LIMIT`] photons and through log-gamma beyond, so that
//! square-rooted amplitudes stay finite for the large photon numbers used
//! in asymptotic entanglement checks.

/// Largest total photon number for which multinomials are computed in
/// exact integer arithmetic before taking square roots.
pub const EXACT_TOTAL_LIMIT: u32 = 20;

/// Natural logarithm of the gamma function.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// ln(n!)
pub fn ln_factorial(n: u64) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// ln binom(n, k); zero for k out of range.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Exact binomial coefficient in u128, None on overflow or k > n.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return None;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128;
    }
    Some(acc)
}

/// Binomial coefficient as f64, exact for small n, log-gamma for large.
pub fn binomial_f64(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if n <= 60 {
        if let Some(b) = binomial_u128(n, k) {
            return b as f64;
        }
    }
    ln_binomial(n, k).exp()
}

/// Exact multinomial coefficient total!/(p_0! p_1! ...), None on overflow.
pub fn multinomial_u128(parts: &[u32]) -> Option<u128> {
    let mut acc: u128 = 1;
    let mut seen: u64 = 0;
    for &p in parts {
        seen += p as u64;
        acc = acc.checked_mul(binomial_u128(seen, p as u64)?)?;
    }
    Some(acc)
}

/// ln of the multinomial coefficient.
pub fn ln_multinomial(parts: &[u32]) -> f64 {
    let total: u64 = parts.iter().map(|&p| p as u64).sum();
    let mut acc = ln_factorial(total);
    for &p in parts {
        acc -= ln_factorial(p as u64);
    }
    acc
}

/// Square root of the multinomial coefficient, exact-integer path up to
/// [`EXACT_TOTAL_LIMIT`] total photons, log-gamma beyond.
pub fn sqrt_multinomial(parts: &[u32]) -> f64 {
    let total: u64 = parts.iter().map(|&p| p as u64).sum();
    if total <= EXACT_TOTAL_LIMIT as u64 {
        if let Some(m) = multinomial_u128(parts) {
            return (m as f64).sqrt();
        }
    }
    (0.5 * ln_multinomial(parts)).exp()
}

/// Number of weak compositions of `total` into `parts` parts:
/// binom(total + parts - 1, parts - 1).
pub fn composition_count(total: u32, parts: u32) -> u128 {
    if parts == 0 {
        return if total == 0 { 1 } else { 0 };
    }
    binomial_u128(total as u64 + parts as u64 - 1, parts as u64 - 1)
        .expect("composition count overflows u128")
}
