//! Classical Fisher information of photon-number-resolved detection of both
//! output modes after a lossy Fock pair `|m, l⟩` has passed the sample.
//!
//! An outcome is the detected pair `(c, d)`. Its probability mixes every
//! surviving label `(a, b)` with `a + b = c + d`:
//! `P(c, d) = Σ w_ab |⟨c, d| U |a, b⟩|²`.

use super::FisherResult;
use crate::error::{invalid, Result};
use crate::fock::{binomial_loss_pmf, poisson_cutoff, BeamsplitterSector, LossChannel, SectorPhases};
use crate::optimize::{linspace, logspace, scan_then_golden};
use crate::probe::ProbeSpec;

/// How `∂_g P` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Derivative {
    /// Differentiating the transition amplitudes.
    #[default]
    Analytic,
    /// Central difference in `g` with step `1e-6 max(1, 1/t)`.
    CentralDifference,
}

/// Which part of the outcome space is summed.
#[derive(Debug, Clone, Copy)]
struct Window {
    /// Largest total number of lost photons.
    n_loss_max: usize,
    /// Detected photons in mode a are restricted to `|c - m| <= q_max`.
    q_max: Option<usize>,
}

impl Window {
    fn full(m: usize, l: usize) -> Self {
        Self { n_loss_max: m + l, q_max: None }
    }

    fn admits(&self, m: usize, c: usize) -> bool {
        self.q_max.is_none_or(|q| c.abs_diff(m) <= q)
    }
}

struct Setup<'a> {
    m: usize,
    l: usize,
    loss_a: &'a [f64],
    loss_b: &'a [f64],
    window: Window,
    /// Spectral data per total loss, covering every label and admitted
    /// outcome.
    sectors: Vec<BeamsplitterSector>,
}

impl<'a> Setup<'a> {
    fn new(m: usize, l: usize, loss_a: &'a [f64], loss_b: &'a [f64], window: Window) -> Self {
        Self { m, l, loss_a, loss_b, window, sectors: Vec::new() }
    }

    /// Builds the spectral data needed by [`Setup::fisher`].
    fn with_sectors(mut self) -> Self {
        let (m, l, window) = (self.m, self.l, self.window);
        let total = m + l;
        self.sectors = (0..=window.n_loss_max.min(total))
            .map(|n_loss| {
                let detected = total - n_loss;
                let label_lo = detected.saturating_sub(l);
                let label_hi = m.min(detected);
                let (out_lo, out_hi) = match window.q_max {
                    None => (0, detected),
                    Some(q) => (m.saturating_sub(q), (m + q).min(detected)),
                };
                BeamsplitterSector::new(detected, label_lo.min(out_lo)..=label_hi.max(out_hi))
            })
            .collect();
        self
    }

    /// Weight of the surviving label `(a, b)` after the photons of a total
    /// loss `n_loss` are split between the modes.
    fn labels(&self, n_loss: usize) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let lo = n_loss.saturating_sub(self.l);
        let hi = self.m.min(n_loss);
        (lo..=hi).filter_map(move |i| {
            let j = n_loss - i;
            let w = self.loss_a[i] * self.loss_b[j];
            (w > 0.0).then_some((self.m - i, self.l - j, w))
        })
    }

    fn outcome(&self, n_loss: usize, c: usize, phases: &SectorPhases, t: f64) -> (f64, f64) {
        let sector = &self.sectors[n_loss];
        let mut p = 0.0;
        let mut dp = 0.0;
        for (a, _, w) in self.labels(n_loss) {
            let (amp, d_amp) = sector.amplitude(c, a, phases);
            p += w * amp.norm_sqr();
            // ∂_g |A|² = 2 Re(A* ∂_θ A) ∂_g θ with θ = g t / 2
            dp += w * (amp.conj() * d_amp).re * t;
        }
        (p, dp)
    }

    fn fisher(&self, g: f64, t: f64, derivative: Derivative) -> f64 {
        let window = self.window;
        let total = self.m + self.l;
        let h = 1e-6 * (1.0 / t).max(1.0);
        let mut f = 0.0;
        for (n_loss, sector) in self.sectors.iter().enumerate() {
            let detected = total - n_loss;
            let phases = sector.phases(g * t / 2.0);
            let shifted = match derivative {
                Derivative::Analytic => None,
                Derivative::CentralDifference => {
                    Some((sector.phases((g + h) * t / 2.0), sector.phases((g - h) * t / 2.0)))
                }
            };
            for c in 0..=detected {
                if !window.admits(self.m, c) {
                    continue;
                }
                let (p, dp) = match &shifted {
                    None => self.outcome(n_loss, c, &phases, t),
                    Some((plus, minus)) => {
                        let (p, _) = self.outcome(n_loss, c, &phases, t);
                        let (pp, _) = self.outcome(n_loss, c, plus, t);
                        let (pm, _) = self.outcome(n_loss, c, minus, t);
                        (p, (pp - pm) / (2.0 * h))
                    }
                };
                if p > 0.0 {
                    f += dp * dp / p;
                }
            }
        }
        f
    }

    /// `g → 0` limit. Outcomes already populated at `g = 0` stop contributing;
    /// the rest are reached from a neighbouring label by a single transferred
    /// photon, with `P ≈ w (g t / 2)² a(b+1)` for `a → a - 1` and
    /// `w (g t / 2)² (a+1) b` for `a → a + 1`. Each contributes `t² w r²`.
    fn fisher_at_zero(&self, t: f64) -> f64 {
        let window = self.window;
        let total = self.m + self.l;
        let mut f = 0.0;
        for n_loss in 0..=window.n_loss_max.min(total) {
            let labels: Vec<(usize, usize, f64)> = self.labels(n_loss).collect();
            let populated = |c: usize| labels.iter().any(|&(a, _, _)| a == c);
            let detected = total - n_loss;
            for c in 0..=detected {
                if !window.admits(self.m, c) || populated(c) {
                    continue;
                }
                for &(a, b, w) in &labels {
                    if a == c + 1 {
                        f += w * (a * (b + 1)) as f64;
                    } else if c == a + 1 && b > 0 {
                        f += w * ((a + 1) * b) as f64;
                    }
                }
            }
        }
        t * t * f
    }
}

fn losses(m: usize, l: usize, channel: &LossChannel) -> (Vec<f64>, Vec<f64>) {
    let mu = channel.mu();
    (binomial_loss_pmf(m, mu).into_probs(), binomial_loss_pmf(l, mu).into_probs())
}

/// CFI of number-resolved detection for the lossy pair `|m, l⟩` at coupling
/// `g`. At `g = 0` the `g → 0` limit is returned, since the CFI itself is
/// discontinuous there.
pub fn cfi_nrm(m: usize, l: usize, channel: &LossChannel, g: f64) -> FisherResult {
    cfi_nrm_with(m, l, channel, g, Derivative::Analytic)
}

pub fn cfi_nrm_with(m: usize, l: usize, channel: &LossChannel, g: f64, derivative: Derivative) -> FisherResult {
    let (loss_a, loss_b) = losses(m, l, channel);
    let t = channel.t();
    let value = if g == 0.0 || t == 0.0 {
        Setup::new(m, l, &loss_a, &loss_b, Window::full(m, l)).fisher_at_zero(t)
    } else {
        Setup::new(m, l, &loss_a, &loss_b, Window::full(m, l)).with_sectors().fisher(g, t, derivative)
    };
    let probe = if m == l { ProbeSpec::TwinFock(m) } else { ProbeSpec::FockPair(m, l) };
    FisherResult::cfi(value, probe, channel, g)
}

/// `t² ((1-μ)^{m+1}(m+1) l + (1-μ)^{l+1}(l+1) m)`, the `g → 0` limit in
/// closed form.
pub fn cfi_nrm_closed_form(m: usize, l: usize, channel: &LossChannel) -> f64 {
    let t = channel.t();
    let keep = channel.transmissivity();
    let (mf, lf) = (m as f64, l as f64);
    t * t * (keep.powi(m as i32 + 1) * (mf + 1.0) * lf + keep.powi(l as i32 + 1) * (lf + 1.0) * mf)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NrmOptimum {
    pub g: f64,
    pub value: f64,
}

/// Maximizes the number-resolved CFI over `g t ∈ (0, π)`: 64-point scan
/// seeded golden section to 1e-8 in `g t`. The `g → 0` limit competes as a
/// candidate.
pub fn cfi_nrm_optimal(m: usize, l: usize, channel: &LossChannel) -> NrmOptimum {
    let t = channel.t();
    let at_zero = cfi_nrm(m, l, channel, 0.0).value;
    if t == 0.0 {
        return NrmOptimum { g: 0.0, value: at_zero };
    }
    let (loss_a, loss_b) = losses(m, l, channel);
    let setup = Setup::new(m, l, &loss_a, &loss_b, Window::full(m, l)).with_sectors();
    let pi = std::f64::consts::PI;
    let grid: Vec<f64> = linspace(0.0, pi, 66)[1..65].to_vec();
    let best = scan_then_golden(|x| setup.fisher(x / t, t, Derivative::Analytic), &grid, 1e-8);
    if at_zero >= best.value {
        NrmOptimum { g: 0.0, value: at_zero }
    } else {
        NrmOptimum { g: best.x / t, value: best.value }
    }
}

/// Truncation and finite-`n` stand-in for the Poisson-limit number-resolved
/// CFI of twin-Fock states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonNrmOptions {
    /// Photons per mode of the finite twin-Fock state.
    pub n: usize,
    /// Largest photon transfer kept.
    pub q_max: usize,
    /// Largest total loss kept. `None` picks `max(ceil(4 N_abs), k)` with `k`
    /// the point where the Poisson tail of the total loss drops below 1e-10.
    pub n_loss_max: Option<usize>,
}

impl Default for PoissonNrmOptions {
    fn default() -> Self {
        Self { n: 500, q_max: 10, n_loss_max: None }
    }
}

impl PoissonNrmOptions {
    pub fn n_loss_max_for(&self, n_abs: f64) -> usize {
        self.n_loss_max.unwrap_or_else(|| ((4.0 * n_abs).ceil() as usize).max(poisson_cutoff(n_abs, 1e-10)))
    }
}

/// Number-resolved twin-Fock CFI in the Poisson limit, evaluated on `|n, n⟩`
/// with `t = N_abs/(2 γ n)` and the outcome window of `options`. With
/// `g = None` the coupling is optimized; the maximizer is returned alongside.
pub fn cfi_nrm_poisson(n_abs: f64, gamma: f64, g: Option<f64>, options: &PoissonNrmOptions) -> Result<NrmOptimum> {
    if !(n_abs >= 0.0 && n_abs.is_finite()) {
        return Err(invalid("n_abs", format!("must be finite and >= 0, got {n_abs}")));
    }
    if !(gamma > 0.0) {
        return Err(invalid("gamma", "must be > 0"));
    }
    if options.n == 0 {
        return Err(invalid("n", "must be >= 1"));
    }
    if n_abs == 0.0 {
        return Ok(NrmOptimum { g: g.unwrap_or(0.0), value: 0.0 });
    }
    let n = options.n;
    let t = n_abs / (2.0 * gamma * n as f64);
    let channel = LossChannel::ideal(gamma, t)?;
    let (loss_a, loss_b) = losses(n, n, &channel);
    let window = Window { n_loss_max: options.n_loss_max_for(n_abs), q_max: Some(options.q_max) };
    let setup = Setup::new(n, n, &loss_a, &loss_b, window);
    let setup = if g == Some(0.0) { setup } else { setup.with_sectors() };
    let eval = |g: f64| {
        if g == 0.0 {
            setup.fisher_at_zero(t)
        } else {
            setup.fisher(g, t, Derivative::Analytic)
        }
    };
    match g {
        Some(g) => Ok(NrmOptimum { g, value: eval(g) }),
        None => {
            // The optimum sits at g t √n of order one; scan φ = g t n.
            let at_zero = eval(0.0);
            let grid = logspace(1e-3, 20.0, 64);
            let scale = t * n as f64;
            let best = scan_then_golden(|x| eval(x / scale), &grid, 1e-8);
            if at_zero >= best.value {
                Ok(NrmOptimum { g: 0.0, value: at_zero })
            } else {
                Ok(NrmOptimum { g: best.x / scale, value: best.value })
            }
        }
    }
}

/// `N_abs² e^{-N_abs/2} / (2 γ²)`, the Poisson limit of the `g → 0` twin-Fock
/// closed form.
pub fn cfi_nrm_poisson_closed_form(n_abs: f64, gamma: f64) -> f64 {
    n_abs * n_abs * (-n_abs / 2.0).exp() / (2.0 * gamma * gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fisher::qfi_fock_pair;

    fn ch(t: f64, mu: f64) -> LossChannel {
        // γ = 1 and η chosen so that 1 - η e^{-t} = μ
        LossChannel::new(1.0, t, (1.0 - mu) * t.exp()).unwrap()
    }

    #[test]
    fn single_photon_pair_lossless() {
        let c = LossChannel::ideal(0.0, 1.0).unwrap();
        assert!((cfi_nrm(1, 1, &c, 0.0).value - 4.0).abs() < 1e-14);
    }

    #[test]
    fn limit_matches_closed_form() {
        let c = LossChannel::ideal(1.0, 0.3).unwrap();
        for (m, l) in [(1, 1), (3, 2), (0, 4), (5, 5)] {
            let a = cfi_nrm(m, l, &c, 0.0).value;
            let b = cfi_nrm_closed_form(m, l, &c);
            assert!((a - b).abs() <= 1e-12 * b.max(1e-300), "{m},{l}: {a} vs {b}");
        }
    }

    #[test]
    fn small_coupling_approaches_limit() {
        let c = LossChannel::ideal(1.0, 0.2).unwrap();
        let lim = cfi_nrm(3, 3, &c, 0.0).value;
        let near = cfi_nrm(3, 3, &c, 1e-5).value;
        assert!((near - lim).abs() < 1e-4 * lim, "{near} vs {lim}");
    }

    #[test]
    fn gradient_check() {
        for &(m, l, g) in &[(2usize, 2usize, 0.7), (4, 1, 1.9), (3, 5, 0.35)] {
            let c = ch(0.1, 0.2);
            let a = cfi_nrm_with(m, l, &c, g, Derivative::Analytic).value;
            let d = cfi_nrm_with(m, l, &c, g, Derivative::CentralDifference).value;
            assert!((a - d).abs() <= 1e-6 * a, "{m},{l},{g}: {a} vs {d}");
        }
    }

    #[test]
    fn cfi_below_qfi() {
        let c = ch(0.1, 0.2);
        for g in [0.0, 0.3, 1.0, 2.5] {
            for (m, l) in [(2, 2), (4, 3), (6, 6)] {
                let cf = cfi_nrm(m, l, &c, g).value;
                let qf = qfi_fock_pair(m, l, &c).value;
                assert!(cf <= qf + 1e-9, "{m},{l},{g}: {cf} > {qf}");
            }
        }
    }

    #[test]
    fn lossless_optimum_beats_limit() {
        let c = LossChannel::ideal(0.0, 1.0).unwrap();
        let opt = cfi_nrm_optimal(3, 3, &c);
        assert!(opt.value >= cfi_nrm(3, 3, &c, 0.0).value);
        assert!(opt.value <= qfi_fock_pair(3, 3, &c).value + 1e-9);
    }

    #[test]
    fn poisson_limit_at_zero_coupling() {
        let v = cfi_nrm_poisson(2.0, 1.0, Some(0.0), &PoissonNrmOptions::default()).unwrap().value;
        let target = cfi_nrm_poisson_closed_form(2.0, 1.0);
        assert!((target - 2.0 / std::f64::consts::E).abs() < 1e-15);
        assert!((v - target).abs() < 5e-3 * target, "{v} vs {target}");
        assert_eq!(cfi_nrm_poisson(0.0, 1.0, None, &PoissonNrmOptions::default()).unwrap().value, 0.0);
    }
}
