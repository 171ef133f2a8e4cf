//! Accumulating per-test Fisher information over repeated tests under a
//! total-time and absorbed-photon budget, and the bounds it is measured
//! against.

mod boundary;

pub use boundary::{
    advantage_boundary, advantage_ratio, crossing_n_abs, general_boundary, max_j, BoundaryOptions, BoundaryPoint,
    GeneralBound,
};

use crate::error::{invalid, Error, Result};
use crate::fisher::{cfi_nrm, cfi_nrm_optimal, cfi_squeezed, qfi_coherent, qfi_fock_pair, qfi_noon, qfi_tfs_exact};
use crate::fock::LossChannel;
use crate::optimize::{logspace, scan_then_golden};
use crate::probe::ProbeSpec;

/// Interrogation times are capped at `T_MAX_GAMMA / γ`.
pub const T_MAX_GAMMA: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    /// Total time `T` available.
    pub t_total: f64,
    /// Mean number of photons each sample may absorb.
    pub n_abs_max: f64,
    /// Overhead per test spent preparing and measuring.
    pub t_ext: f64,
    /// Detector efficiency.
    pub eta: f64,
}

impl Budget {
    pub fn new(t_total: f64, n_abs_max: f64, t_ext: f64, eta: f64) -> Result<Self> {
        if !(t_total > 0.0 && t_total.is_finite()) {
            return Err(invalid("T", format!("must be finite and > 0, got {t_total}")));
        }
        if !(n_abs_max > 0.0 && n_abs_max.is_finite()) {
            return Err(invalid("n_abs", format!("must be finite and > 0, got {n_abs_max}")));
        }
        if !(t_ext >= 0.0 && t_ext.is_finite()) {
            return Err(invalid("t_ext", format!("must be finite and >= 0, got {t_ext}")));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(invalid("eta", format!("must lie in (0, 1], got {eta}")));
        }
        Ok(Self { t_total, n_abs_max, t_ext, eta })
    }

    /// `η = 1`, `t_ext = 0`.
    pub fn ideal(t_total: f64, n_abs_max: f64) -> Result<Self> {
        Self::new(t_total, n_abs_max, 0.0, 1.0)
    }
}

/// A protocol with an integer number of tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegerProtocol {
    pub nu: u64,
    pub t: f64,
    pub accumulated: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionResult {
    /// Number of tests, treated as continuous.
    pub nu: f64,
    /// Interrogation time per test.
    pub t: f64,
    pub per_test_f: f64,
    /// `Δg⁻² = ν F`.
    pub accumulated: f64,
    /// Mean photons absorbed per sample.
    pub n_abs: f64,
    /// Set when the photon budget cannot be used up within `50/γ`, so times
    /// were capped there.
    pub capped: bool,
    /// `floor(ν)` and `ceil(ν)` tests, the latter with `t` shortened to fit `T`.
    pub floor: Option<IntegerProtocol>,
    pub ceil: Option<IntegerProtocol>,
}

/// Mean photons absorbed, `N (1 - e^{-γt})`.
pub fn n_abs(n: f64, gamma: f64, t: f64) -> f64 {
    -n * (-gamma * t).exp_m1()
}

/// `T N_abs / γ`, the best precision classical light can reach.
pub fn classical_bound(t_total: f64, gamma: f64, n_abs: f64) -> f64 {
    t_total * n_abs / gamma
}

/// `T N / γ`, the ceiling for any probe of `N` photons.
pub fn bound_finite_n(n: f64, t_total: f64, gamma: f64) -> f64 {
    t_total * n / gamma
}

/// `η / (1 - η)`, the largest advantage over the classical bound allowed by
/// detector inefficiency alone.
pub fn bound_eta(eta: f64) -> f64 {
    eta / (1.0 - eta)
}

/// `1 / (γ t_ext)`, the largest advantage allowed by the overhead alone.
pub fn bound_text(gamma: f64, t_ext: f64) -> f64 {
    1.0 / (gamma * t_ext)
}

/// `J(t) = γ t² η e^{-γt} / ((t + t_ext)(1 - e^{-γt})(1 - η e^{-γt}))`, the
/// advantage ceiling for tests of duration `t`.
pub fn j_of_t(t: f64, gamma: f64, eta: f64, t_ext: f64) -> f64 {
    let decay = (-gamma * t).exp();
    let absorbed = -(-gamma * t).exp_m1();
    gamma * t * t * eta * decay / ((t + t_ext) * absorbed * (1.0 - eta * decay))
}

/// Interrogation time that makes a probe of `n` photons absorb `s` on average.
fn time_for(s: f64, n: f64, gamma: f64) -> f64 {
    -(-s / n).ln_1p() / gamma
}

/// How the photons are read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Readout {
    /// Optimal measurement, so the QFI.
    Optimal,
    /// Number-resolved detection in the `g → 0` limit.
    NrmWeak,
    /// Number-resolved detection at the best coupling.
    NrmOptimized,
}

/// Per-test Fisher information of `probe` read out by `readout`.
pub fn per_test_fisher(probe: &ProbeSpec, readout: Readout, channel: &LossChannel) -> Result<f64> {
    let (m, l) = match *probe {
        ProbeSpec::TwinFock(n) => (n, n),
        ProbeSpec::FockPair(m, l) => (m, l),
        ProbeSpec::Coherent(n) => return Ok(qfi_coherent(n, channel).value),
        ProbeSpec::Noon(n) => return Ok(qfi_noon(n, channel).value),
        ProbeSpec::Squeezed(p) => return Ok(cfi_squeezed(&p, channel)?.value),
    };
    Ok(match readout {
        Readout::Optimal if m == l => qfi_tfs_exact(m, channel).value,
        Readout::Optimal => qfi_fock_pair(m, l, channel).value,
        Readout::NrmWeak => cfi_nrm(m, l, channel, 0.0).value,
        Readout::NrmOptimized => cfi_nrm_optimal(m, l, channel).value,
    })
}

/// `ν F` when every sample absorbs `s` photons on average.
pub fn accumulate_at<F>(n: f64, budget: &Budget, gamma: f64, s: f64, fisher: &F) -> Result<(f64, f64, f64, f64)>
where
    F: Fn(&LossChannel) -> f64 + ?Sized,
{
    let t = time_for(s, n, gamma).min(T_MAX_GAMMA / gamma);
    let channel = LossChannel::new(gamma, t, budget.eta)?;
    let f = fisher(&channel);
    let nu = budget.t_total / (t + budget.t_ext);
    Ok((nu * f, nu, t, f))
}

/// Maximizes `ν F` for a probe of `n` photons: each sample is interrogated
/// until it has absorbed `s ≤ N_abs_max` photons on average, which fixes `t`
/// and `ν = T/(t + t_ext)`, and `s` is chosen by a log scan refined with
/// golden section.
pub fn optimize_nu<F>(n: f64, budget: &Budget, gamma: f64, fisher: &F) -> Result<PrecisionResult>
where
    F: Fn(&LossChannel) -> f64 + ?Sized,
{
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::Infeasible(format!("probe photon number must be > 0, got {n}")));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(invalid("gamma", format!("must be finite and > 0, got {gamma}")));
    }
    let s_cap = n_abs(n, gamma, T_MAX_GAMMA / gamma);
    let capped = budget.n_abs_max >= s_cap;
    let s_max = budget.n_abs_max.min(s_cap);
    let eval = |s: f64| accumulate_at(n, budget, gamma, s, fisher).map(|r| r.0).unwrap_or(f64::NEG_INFINITY);
    let grid = logspace(s_max * 1e-6, s_max, 48);
    let best = scan_then_golden(eval, &grid, 1e-10 * s_max);
    let (accumulated, nu, t, f) = accumulate_at(n, budget, gamma, best.x, fisher)?;
    let integer = |k: f64| -> Result<Option<IntegerProtocol>> {
        if k < 1.0 {
            return Ok(None);
        }
        let t_k = (budget.t_total / k - budget.t_ext).min(t);
        if t_k <= 0.0 {
            return Ok(None);
        }
        let f_k = fisher(&LossChannel::new(gamma, t_k, budget.eta)?);
        Ok(Some(IntegerProtocol { nu: k as u64, t: t_k, accumulated: k * f_k }))
    };
    Ok(PrecisionResult {
        nu,
        t,
        per_test_f: f,
        accumulated,
        n_abs: n_abs(n, gamma, t),
        capped,
        floor: integer(nu.floor())?,
        ceil: integer(nu.ceil())?,
    })
}
