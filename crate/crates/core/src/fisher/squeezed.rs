//! Coherent-squeezed plus vacuum-squeezed probe read out by intensity
//! difference, valid for large photon numbers.

use super::FisherResult;
use crate::error::{invalid, Error, Result};
use crate::fock::LossChannel;
use crate::optimize::nelder_mead_max;
use crate::probe::{ProbeSpec, SqueezedParams};

fn shape(beta_r: f64, beta_s: f64) -> f64 {
    1.0 / beta_r + beta_r / beta_s - 3.0
}

/// `N² t² (1-2β_r)² / (N (1-T)/T + (1/β_r + β_r/β_s - 3)/4)` with
/// `T = η e^{-γt}` the photon transmissivity.
pub fn cfi_squeezed(params: &SqueezedParams, channel: &LossChannel) -> Result<FisherResult> {
    let (n, br, bs) = (params.n(), params.beta_r(), params.beta_s());
    let t = channel.t();
    let keep = channel.transmissivity();
    let denom = n * channel.mu() / keep + 0.25 * shape(br, bs);
    if !(denom > 0.0) {
        return Err(invalid("beta", format!("noise denominator {denom} is not positive")));
    }
    let value = n * n * t * t * (1.0 - 2.0 * br).powi(2) / denom;
    Ok(FisherResult::cfi(value, ProbeSpec::Squeezed(*params), channel, 0.0))
}

/// Poisson limit of [`cfi_squeezed`] at fixed `N_abs = γ t N`:
/// `(N_abs²/γ²) 4(1-2β_r)² / (4 N_abs + 1/β_r + β_r/β_s - 3)`.
pub fn cfi_squeezed_poisson(n_abs: f64, beta_r: f64, beta_s: f64, gamma: f64) -> Result<f64> {
    let ok = beta_r > 0.0 && beta_r < 1.0 && beta_s > 0.0 && beta_s < 1.0 && beta_r + beta_s <= 1.0;
    if !ok {
        return Err(Error::InvalidFractions { beta_r, beta_s });
    }
    let denom = 4.0 * n_abs + shape(beta_r, beta_s);
    if !(denom > 0.0) {
        return Err(invalid("beta", format!("noise denominator {denom} is not positive")));
    }
    Ok(n_abs * n_abs / (gamma * gamma) * 4.0 * (1.0 - 2.0 * beta_r).powi(2) / denom)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedOptimum {
    pub beta_r: f64,
    pub beta_s: f64,
    pub value: f64,
}

/// Maximizes [`cfi_squeezed_poisson`] over the fractions: a 200×200 grid on
/// the simplex followed by Nelder-Mead to 1e-8.
pub fn optimize_squeezed(n_abs: f64, gamma: f64) -> SqueezedOptimum {
    let f = |b: [f64; 2]| cfi_squeezed_poisson(n_abs, b[0], b[1], gamma).unwrap_or(f64::NEG_INFINITY);
    let mut best = ([0.5, 0.5], f64::NEG_INFINITY);
    for i in 0..200 {
        for j in 0..200 {
            let b = [(i as f64 + 0.5) / 200.0, (j as f64 + 0.5) / 200.0];
            let v = f(b);
            if v > best.1 {
                best = (b, v);
            }
        }
    }
    let (b, v) = nelder_mead_max(f, best.0, 1e-3, 1e-8, 10_000);
    let (b, v) = if v >= best.1 { (b, v) } else { best };
    SqueezedOptimum { beta_r: b[0], beta_s: b[1], value: v }
}
