use super::FisherResult;
use crate::error::{Error, Result};
use crate::fock::{binomial_loss_pmf, poisson_cutoff, poisson_pmf, LossChannel, PhotonPMF};
use crate::probe::ProbeSpec;
use crate::special::kahan_sum;

/// Shot-noise QFI `t² N η e^{-γt}`.
pub fn qfi_coherent(n: f64, channel: &LossChannel) -> FisherResult {
    let t = channel.t();
    FisherResult::qfi(t * t * n * channel.transmissivity(), ProbeSpec::Coherent(n), channel)
}

/// Upper bound `t² N (1-μ)/μ` for any `N`-photon probe under symmetric loss.
pub fn qfi_upper_bound(n: f64, channel: &LossChannel) -> Result<f64> {
    let mu = channel.mu();
    if mu <= 0.0 {
        return Err(Error::MuZero);
    }
    let t = channel.t();
    Ok(t * t * n * channel.transmissivity() / mu)
}

/// Indices of a pmf worth keeping in a double sum whose terms are bounded by
/// `p_i p_j × scale`.
fn support(p: &PhotonPMF) -> Vec<(usize, f64)> {
    let max = p.probs().iter().copied().fold(0.0, f64::max);
    p.probs().iter().copied().enumerate().filter(|&(_, x)| x > max * 1e-18).collect()
}

/// `(A - B) / (2(A + B))`, the value of `1/2 - 1/(1 + A/B)` including `B = 0`.
fn half_minus(a: f64, b: f64) -> f64 {
    (a - b) / (2.0 * (a + b))
}

/// Exact QFI of the lossy twin-Fock state `|n, n⟩`.
pub fn qfi_tfs_exact(n: usize, channel: &LossChannel) -> FisherResult {
    let t = channel.t();
    let p = binomial_loss_pmf(n, channel.mu());
    let sup = support(&p);
    let nf = n as f64;
    let mut terms = Vec::with_capacity(sup.len() * sup.len());
    for &(i, pi) in &sup {
        if i == n {
            continue;
        }
        let fi = i as f64;
        for &(j, pj) in &sup {
            let fj = j as f64;
            let a = (nf - fj + 1.0) * (fi + 1.0);
            let b = fj * (nf - fi);
            terms.push(pi * pj * (nf - fi) * (nf - fj + 1.0) * half_minus(a, b));
        }
    }
    let value = 4.0 * t * t * kahan_sum(terms);
    FisherResult::qfi(value.max(0.0), ProbeSpec::TwinFock(n), channel)
}

/// Exact QFI of the lossy pair `|m, l⟩`.
pub fn qfi_fock_pair(m: usize, l: usize, channel: &LossChannel) -> FisherResult {
    let t = channel.t();
    let mu = channel.mu();
    let pm = binomial_loss_pmf(m, mu);
    let pl = binomial_loss_pmf(l, mu);
    let (mf, lf) = (m as f64, l as f64);
    let mut terms = Vec::new();
    for &(i, pi) in &support(&pl) {
        let fi = i as f64;
        for &(j, pj) in &support(&pm) {
            let fj = j as f64;
            // survivors: l - i in mode b, m - j in mode a
            let first = (lf - fi) * (mf - fj + 1.0) * half_minus((mf - fj + 1.0) * (fi + 1.0), fj * (lf - fi));
            let second = (mf - fj) * (lf - fi + 1.0) * half_minus((lf - fi + 1.0) * (fj + 1.0), fi * (mf - fj));
            terms.push(pi * pj * (first + second));
        }
    }
    let value = 2.0 * t * t * kahan_sum(terms);
    FisherResult::qfi(value.max(0.0), ProbeSpec::FockPair(m, l), channel)
}

/// `G(N_abs) = N_abs² Σ_ij p_i p_j (1/2 - j/(i+1+j))` with `p` Poisson of mean
/// `N_abs/2`, truncated once the neglected mass is below 1e-12.
pub fn g_function(n_abs: f64) -> f64 {
    if n_abs <= 0.0 {
        return 0.0;
    }
    let lambda = n_abs / 2.0;
    let k_max = poisson_cutoff(lambda, 1e-12);
    let p = poisson_pmf(lambda, k_max).expect("cutoff chosen to satisfy the tail bound");
    let sup = support(&p);
    let mut terms = Vec::with_capacity(sup.len() * sup.len());
    for &(i, pi) in &sup {
        for &(j, pj) in &sup {
            terms.push(pi * pj * (0.5 - j as f64 / (i + 1 + j) as f64));
        }
    }
    n_abs * n_abs * kahan_sum(terms)
}

/// Twin-Fock QFI in the Poisson limit, `G(N_abs)/γ²`.
pub fn qfi_tfs_poisson(n_abs: f64, gamma: f64) -> f64 {
    g_function(n_abs) / (gamma * gamma)
}

/// `N² t² (1-μ)^N`: only the branch without any lost photon keeps its phase
/// sensitivity.
pub fn qfi_noon(n: usize, channel: &LossChannel) -> FisherResult {
    let t = channel.t();
    let nf = n as f64;
    let survive = (nf * (-channel.mu()).ln_1p()).exp();
    FisherResult::qfi(nf * nf * t * t * survive, ProbeSpec::Noon(n), channel)
}

/// NOON QFI in the Poisson limit, `N_abs² e^{-N_abs} / γ²`.
pub fn qfi_noon_poisson(n_abs: f64, gamma: f64) -> f64 {
    n_abs * n_abs * (-n_abs).exp() / (gamma * gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{lossy_fock_pair, mixed_qfi_oracle};

    fn ch(gamma: f64, t: f64) -> LossChannel {
        LossChannel::ideal(gamma, t).unwrap()
    }

    #[test]
    fn coherent_examples() {
        assert_eq!(qfi_coherent(100.0, &ch(1.0, 0.0)).value, 0.0);
        assert!((qfi_coherent(7.0, &ch(0.0, 2.0)).value - 28.0).abs() < 1e-12);
        let v = qfi_coherent(100.0, &ch(1.0, 0.01)).value;
        assert!((v - 1e-2 * (-0.01f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn upper_bound_examples() {
        let ln2 = 2f64.ln();
        assert!((qfi_upper_bound(10.0, &ch(1.0, ln2)).unwrap() - 10.0 * ln2 * ln2).abs() < 1e-12);
        assert_eq!(qfi_upper_bound(10.0, &ch(0.0, 1.0)), Err(Error::MuZero));
        assert!(qfi_upper_bound(10.0, &ch(1.0, 800.0)).unwrap() < 1e-300);
        let c = LossChannel::new(1.0, 0.0, 0.5).unwrap();
        assert_eq!(qfi_upper_bound(5.0, &c).unwrap(), 0.0);
    }

    #[test]
    fn tfs_lossless_and_total_loss() {
        for n in 1..6 {
            let v = qfi_tfs_exact(n, &ch(0.0, 1.0)).value;
            assert!((v - 2.0 * (n * (n + 1)) as f64).abs() < 1e-12);
        }
        assert!(qfi_tfs_exact(1, &ch(1.0, 800.0)).value.abs() < 1e-300);
    }

    #[test]
    fn tfs_matches_mixture_formula() {
        for n in 1..=4 {
            for &t in &[0.1053605156578263, 0.35667494393873245] {
                // μ = 0.1 and 0.3 at γ = 1
                let c = ch(1.0, t);
                let a = qfi_tfs_exact(n, &c).value;
                let b = mixed_qfi_oracle(&lossy_fock_pair(n, n, &c), t);
                assert!((a - b).abs() <= 1e-10 * b, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn fock_pair_examples() {
        for (m, l) in [(0, 3), (2, 5), (4, 4)] {
            let v = qfi_fock_pair(m, l, &ch(0.0, 1.0)).value;
            assert!((v - (m + l + 2 * m * l) as f64).abs() < 1e-12);
        }
        let c = ch(1.0, -(0.8f64).ln());
        let a = qfi_fock_pair(2, 0, &c).value;
        let b = mixed_qfi_oracle(&lossy_fock_pair(2, 0, &c), c.t());
        assert!((a - b).abs() <= 1e-10 * b);
        let c = ch(1.0, 0.3);
        assert!((qfi_fock_pair(3, 3, &c).value - qfi_tfs_exact(3, &c).value).abs() < 1e-13);
    }

    #[test]
    fn g_limits() {
        assert!((g_function(50.0) * 2.0 / 50.0 - 1.0).abs() < 0.1);
        assert!((g_function(0.05) * 2.0 / 0.0025 - 1.0).abs() < 0.1);
        assert_eq!(g_function(0.0), 0.0);
    }

    #[test]
    fn noon_examples() {
        assert_eq!(qfi_noon_poisson(0.0, 1.0), 0.0);
        assert!((qfi_noon_poisson(1.0, 1.0) - (-1f64).exp()).abs() < 1e-15);
        let r = qfi_noon_poisson(1e-3, 1.0) / qfi_tfs_poisson(1e-3, 1.0);
        assert!((r - 2.0).abs() < 0.02);
        assert!((qfi_noon(4, &ch(0.0, 0.5)).value - 4.0).abs() < 1e-12);
    }
}
