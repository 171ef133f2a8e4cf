//! Precision of many atom-cavity sources, each preparing a random photon
//! number pair `(m, l)` with probability `q(m) q(l)`.

use super::{photon_pmf, superradiant_peak, t_prep, DickeConfig};
use crate::error::{invalid, Result};
use crate::fisher::{cfi_nrm_closed_form, qfi_fock_pair};
use crate::fock::{LossChannel, PhotonPMF};
use crate::protocol::{Budget, T_MAX_GAMMA};

/// Where `q(k)` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QSource {
    /// Exact ladder dynamics evaluated at the preparation time.
    #[default]
    Exact,
    /// Thermal distribution of the linearized dynamics.
    Linear,
}

/// Preparation time used with [`QSource::Exact`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PrepTime {
    /// `asinh(√n)/(√N_at J)` from the linearized dynamics.
    #[default]
    Linearized,
    /// Time of the first maximum of the mean photon number.
    PeakMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AcReadout {
    /// Optimal measurement of each pair.
    Qfi,
    /// Number-resolved detection in the `g → 0` limit.
    #[default]
    NrmWeak,
}

/// Pairs with `m + l <= N_abs` cannot absorb the budget however long they
/// are interrogated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UndamageablePairs {
    /// Discard them: no information, and only the dead time is spent.
    #[default]
    Skip,
    /// Interrogate them for `50/γ`.
    Cap,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcOptions {
    pub q_source: QSource,
    pub prep_time: PrepTime,
    pub readout: AcReadout,
    pub undamageable: UndamageablePairs,
    /// Time spent on a pair that is discarded, including overhead. Defaults
    /// to `t_ext`.
    pub dead_time: Option<f64>,
    /// Largest photon number per cavity kept in `q`; the rest is dropped and
    /// `q` renormalized.
    pub cutoff: Option<usize>,
}

impl Default for AcOptions {
    fn default() -> Self {
        Self {
            q_source: QSource::Exact,
            prep_time: PrepTime::Linearized,
            readout: AcReadout::NrmWeak,
            undamageable: UndamageablePairs::Skip,
            dead_time: None,
            cutoff: None,
        }
    }
}

fn q_distribution(config: &DickeConfig, options: &AcOptions) -> PhotonPMF {
    let q = match options.q_source {
        QSource::Exact => {
            let t = match options.prep_time {
                PrepTime::Linearized => t_prep(config),
                PrepTime::PeakMean => superradiant_peak(config).x,
            };
            photon_pmf(config, t)
        }
        QSource::Linear => {
            let n = config.n_target();
            // thermal tail beyond k is (n/(n+1))^{k+1}
            let k_max = ((1e-16f64).ln() / (n / (n + 1.0)).ln()).ceil().max(1.0) as usize;
            let probs = (0..=k_max).map(|k| super::q_linear(n, k)).collect();
            PhotonPMF::new(probs, 0.0).expect("non-negative")
        }
    };
    match options.cutoff {
        Some(k) => q.truncated(k).renormalized(),
        None => q,
    }
}

/// `Δg⁻²` of the atom-cavity scheme with `q` from the Dicke dynamics.
pub fn ac_precision(config: &DickeConfig, budget: &Budget, gamma: f64, options: &AcOptions) -> Result<f64> {
    let q = q_distribution(config, options);
    ac_precision_with_q(&q, budget, gamma, options)
}

/// `Δg⁻² = T Σ q(m) q(l) F^{m,l} / Σ q(m) q(l) (t_{m,l} + t_ext)` where each
/// pair is interrogated until it has absorbed `N_abs` photons on average,
/// `N_abs = (m + l)(1 - e^{-γ t_{m,l}})`.
pub fn ac_precision_with_q(q: &PhotonPMF, budget: &Budget, gamma: f64, options: &AcOptions) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(invalid("gamma", "must be > 0"));
    }
    let dead = options.dead_time.unwrap_or(budget.t_ext);
    if !(dead >= 0.0) {
        return Err(invalid("dead_time", "must be >= 0"));
    }
    let t_cap = T_MAX_GAMMA / gamma;
    let max_q = q.probs().iter().copied().fold(0.0, f64::max);
    let support: Vec<(usize, f64)> =
        q.probs().iter().copied().enumerate().filter(|&(_, p)| p > max_q * 1e-17).collect();
    let mut info = Vec::new();
    let mut time = Vec::new();
    for &(m, qm) in &support {
        for &(l, ql) in &support {
            let w = qm * ql;
            let photons = (m + l) as f64;
            let reachable = photons > budget.n_abs_max;
            let t = if reachable {
                (-(-budget.n_abs_max / photons).ln_1p() / gamma).min(t_cap)
            } else {
                match options.undamageable {
                    UndamageablePairs::Skip => {
                        time.push(w * dead);
                        continue;
                    }
                    UndamageablePairs::Cap if m + l == 0 => {
                        time.push(w * dead);
                        continue;
                    }
                    UndamageablePairs::Cap => t_cap,
                }
            };
            let channel = LossChannel::new(gamma, t, budget.eta)?;
            let f = match options.readout {
                AcReadout::Qfi => qfi_fock_pair(m, l, &channel).value,
                AcReadout::NrmWeak => cfi_nrm_closed_form(m, l, &channel),
            };
            info.push(w * f);
            time.push(w * (t + budget.t_ext));
        }
    }
    let total_time = crate::special::kahan_sum(time);
    if total_time <= 0.0 {
        return Ok(0.0);
    }
    Ok(budget.t_total * crate::special::kahan_sum(info) / total_time)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fisher::qfi_tfs_exact;
    use crate::protocol::accumulate_at;

    #[test]
    fn deterministic_pairs_reduce_to_tfs() {
        let q = PhotonPMF::delta(4);
        let b = Budget::ideal(10.0, 1.0).unwrap();
        let opts = AcOptions { readout: AcReadout::Qfi, ..Default::default() };
        let ac = ac_precision_with_q(&q, &b, 1.0, &opts).unwrap();
        let (direct, ..) = accumulate_at(8.0, &b, 1.0, 1.0, &|c: &LossChannel| qfi_tfs_exact(4, c).value).unwrap();
        assert!((ac - direct).abs() < 1e-9 * direct, "{ac} vs {direct}");
    }

    #[test]
    fn skipping_beats_capping() {
        let c = DickeConfig::new(100, 1.0, 0.0, 4.0).unwrap();
        let b = Budget::ideal(10.0, 1.0).unwrap();
        let skip = ac_precision(&c, &b, 1.0, &AcOptions::default()).unwrap();
        let cap = ac_precision(&c, &b, 1.0, &AcOptions { undamageable: UndamageablePairs::Cap, ..Default::default() })
            .unwrap();
        assert!(skip > cap);
    }
}
