//! Gap parameter schedules `(k, k', ell)` for the set-cover distinguisher.

use num::BigRational;

use super::SetCoverError;

#[derive(Debug, Clone, PartialEq)]
pub enum GapSource {
    /// `k = 1/2 loglog N / logloglog N`, `k' = 1/2 (log N / loglog N)^{1/k}`.
    LemmaLin,
    /// `k' = (1 - beta) k ln N` with block length fixed to 5.
    Conjecture { alpha: f64, beta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapParams {
    pub k: u32,
    /// Exact rational value of the `f64` evaluation; the closed form is irrational in
    /// general.
    pub k_prime: BigRational,
    /// Odd block length, at least 3.
    pub ell: usize,
    pub source: GapSource,
}

fn smallest_odd_at_least(x: f64) -> usize {
    let c = x.max(3.0).ceil() as usize;
    if c.is_multiple_of(2) {
        c + 1
    } else {
        c
    }
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite parameter")
}

/// Schedule from the log-log regime, all logs base 2.
///
/// `k = max(1, round_half_up(loglog N / (2 logloglog N)))`,
/// `ell = smallest odd integer >= max(3, log N / k)`.
pub fn gap_params_lin(vertices: u64) -> Result<GapParams, SetCoverError> {
    if vertices < 16 {
        return Err(SetCoverError::NTooSmall(vertices));
    }
    let log = (vertices as f64).log2();
    let loglog = log.log2();
    let logloglog = loglog.log2();
    let k = ((0.5 * loglog / logloglog + 0.5).floor() as u32).max(1);
    let k_prime = 0.5 * (log / loglog).powf(1.0 / k as f64);
    let ell = smallest_odd_at_least(log / k as f64);
    if ell < 5 {
        log::warn!("ell = {ell} is below 5; lemma checkers will refuse it");
    }
    Ok(GapParams {
        k,
        k_prime: exact(k_prime),
        ell,
        source: GapSource::LemmaLin,
    })
}

/// Conjecture-parameterized schedule: `k' = (1 - beta) k ln N`, `ell = 5`.
pub fn gap_params_conjecture(
    vertices: u64,
    k: u32,
    alpha: f64,
    beta: f64,
) -> Result<GapParams, SetCoverError> {
    if !(0.0 < alpha && alpha < 1.0 && 0.0 < beta && beta < 1.0) {
        return Err(SetCoverError::BadParameter(
            "alpha and beta must lie in (0, 1)".into(),
        ));
    }
    if k == 0 || (k as f64) >= (vertices as f64).powf(alpha) {
        return Err(SetCoverError::BadParameter(format!(
            "k must satisfy 1 <= k < N^alpha, got k = {k}"
        )));
    }
    let k_prime = (1.0 - beta) * k as f64 * (vertices as f64).ln();
    Ok(GapParams {
        k,
        k_prime: exact(k_prime),
        ell: 5,
        source: GapSource::Conjecture { alpha, beta },
    })
}
