//! Photon-number probability machinery: loss channels, loss distributions and
//! beamsplitter transition amplitudes.
//!
//! The lossy evolution of a two-mode state factorizes into a dissipative
//! channel followed by the unitary `exp(-i g t H_int)` with
//! `H_int = (a†b + ab†)/2`. Everything here works on number-basis labels; the
//! free Hamiltonian `ω(a†a + b†b)` only adds a phase that is constant inside a
//! fixed-photon-number sector and is therefore dropped.

mod sector;

pub use sector::{BeamsplitterSector, SectorPhases};

use crate::error::{invalid, Error, Result};
use num_complex::Complex64;

use crate::special::{ln_binomial, ln_factorial, ln_pow, signed_log_sum, LogTerm};

/// Photon loss acting for a time `t` at rate `gamma`, followed by a detector of
/// efficiency `eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossChannel {
    gamma: f64,
    t: f64,
    eta: f64,
}

impl LossChannel {
    pub fn new(gamma: f64, t: f64, eta: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(invalid("gamma", format!("must be finite and >= 0, got {gamma}")));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(invalid("t", format!("must be finite and >= 0, got {t}")));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(invalid("eta", format!("must lie in (0, 1], got {eta}")));
        }
        Ok(Self { gamma, t, eta })
    }

    /// Perfect detector.
    pub fn ideal(gamma: f64, t: f64) -> Result<Self> {
        Self::new(gamma, t, 1.0)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn with_t(&self, t: f64) -> Result<Self> {
        Self::new(self.gamma, t, self.eta)
    }

    /// Probability that a photon survives absorption and detection,
    /// `eta * exp(-gamma t)`.
    pub fn transmissivity(&self) -> f64 {
        self.eta * (-self.gamma * self.t).exp()
    }

    /// Per-photon loss probability `mu = 1 - eta exp(-gamma t)`.
    pub fn mu(&self) -> f64 {
        1.0 - self.transmissivity()
    }

    /// Fraction of photons absorbed by the sample, `1 - exp(-gamma t)`.
    /// Detector losses do not count.
    pub fn absorbed_fraction(&self) -> f64 {
        -(-self.gamma * self.t).exp_m1()
    }
}

/// Probability of each photon count `0..probs.len()`, with the mass that a
/// cutoff discarded kept separately.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonPMF {
    probs: Vec<f64>,
    tail_mass: f64,
}

impl PhotonPMF {
    pub fn new(probs: Vec<f64>, tail_mass: f64) -> Result<Self> {
        if probs.iter().any(|p| !(*p >= 0.0)) {
            return Err(invalid("probs", "entries must be >= 0"));
        }
        if !(tail_mass >= 0.0) {
            return Err(invalid("tail_mass", "must be >= 0"));
        }
        Ok(Self { probs, tail_mass })
    }

    pub fn delta(k: usize) -> Self {
        let mut probs = vec![0.0; k + 1];
        probs[k] = 1.0;
        Self { probs, tail_mass: 0.0 }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    /// Probability of `k` photons; zero beyond the stored range.
    pub fn get(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn total(&self) -> f64 {
        crate::special::kahan_sum(self.probs.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        crate::special::kahan_sum(self.probs.iter().enumerate().map(|(k, p)| k as f64 * p))
    }

    /// Rescales the stored entries to unit mass and clears the tail.
    pub fn renormalized(&self) -> Self {
        let total = self.total();
        Self { probs: self.probs.iter().map(|p| p / total).collect(), tail_mass: 0.0 }
    }

    /// Drops entries above `k_max`, moving their mass into the tail.
    pub fn truncated(&self, k_max: usize) -> Self {
        if k_max + 1 >= self.probs.len() {
            return self.clone();
        }
        let dropped: f64 = self.probs[k_max + 1..].iter().sum();
        Self { probs: self.probs[..=k_max].to_vec(), tail_mass: self.tail_mass + dropped }
    }
}

/// Number of photons lost out of `n` when each is lost independently with
/// probability `mu`.
///
/// Terms are built by the ratio recurrence outward from the mode and then
/// divided by their sum. Evaluating every term from `ln C(n, k)` instead
/// leaves a shared log error of order `n ε` that shows up in the total above
/// a thousand photons.
///
/// # Panics
/// If `mu` lies outside `[0, 1]`.
pub fn binomial_loss_pmf(n: usize, mu: f64) -> PhotonPMF {
    assert!((0.0..=1.0).contains(&mu), "loss probability {mu} outside [0, 1]");
    if mu == 0.0 {
        return PhotonPMF::delta(0).padded(n);
    }
    if mu == 1.0 {
        return PhotonPMF::delta(n);
    }
    let odds = mu / (1.0 - mu);
    let mode = (((n + 1) as f64 * mu).floor() as usize).min(n);
    let mut probs = vec![0.0; n + 1];
    probs[mode] = 1.0;
    for k in mode..n {
        probs[k + 1] = probs[k] * (n - k) as f64 / (k + 1) as f64 * odds;
    }
    for k in (1..=mode).rev() {
        probs[k - 1] = probs[k] * k as f64 / ((n - k + 1) as f64 * odds);
    }
    let total: f64 = probs.iter().sum();
    for p in probs.iter_mut() {
        *p /= total;
    }
    PhotonPMF { probs, tail_mass: 0.0 }
}

impl PhotonPMF {
    fn padded(mut self, n: usize) -> Self {
        if self.probs.len() < n + 1 {
            self.probs.resize(n + 1, 0.0);
        }
        self
    }
}

/// Poisson distribution with mean `lambda` stored on `0..=k_max`.
///
/// Fails with [`Error::CutoffTooSmall`] when the discarded tail exceeds 1e-9.
pub fn poisson_pmf(lambda: f64, k_max: usize) -> Result<PhotonPMF> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(invalid("lambda", format!("must be finite and >= 0, got {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(PhotonPMF::delta(0).padded(k_max));
    }
    let ln_pk = |k: usize| k as f64 * lambda.ln() - lambda - ln_factorial(k);
    let probs: Vec<f64> = (0..=k_max).map(|k| ln_pk(k).exp()).collect();
    // Tail summed directly; terms beyond the mode decrease monotonically.
    let mut tail = 0.0;
    let mut k = k_max + 1;
    loop {
        let p = ln_pk(k).exp();
        tail += p;
        if (k as f64 > lambda && p <= tail * 1e-17) || p == 0.0 && k as f64 > lambda {
            break;
        }
        k += 1;
    }
    if tail > 1e-9 {
        return Err(Error::CutoffTooSmall { k_max, tail });
    }
    Ok(PhotonPMF { probs, tail_mass: tail })
}

/// Smallest cutoff whose Poisson tail is below `tail`.
pub fn poisson_cutoff(lambda: f64, tail: f64) -> usize {
    let mut k_max = (lambda + 10.0 * lambda.sqrt() + 10.0).ceil() as usize;
    loop {
        match poisson_pmf(lambda, k_max) {
            Ok(pmf) if pmf.tail_mass() <= tail => return k_max,
            _ => k_max += (k_max / 4).max(4),
        }
    }
}

/// Joint distribution of surviving photons in modes `a` (rows) and `b`
/// (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct JointFockPMF {
    rows: usize,
    cols: usize,
    probs: Vec<f64>,
}

impl JointFockPMF {
    /// Probability that `a` photons survive in mode a and `b` in mode b.
    pub fn get(&self, a: usize, b: usize) -> f64 {
        if a < self.rows && b < self.cols {
            self.probs[a * self.cols + b]
        } else {
            0.0
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn total(&self) -> f64 {
        crate::special::kahan_sum(self.probs.iter().copied())
    }

    /// Nonzero entries as `((a, b), probability)`.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.probs.iter().enumerate().filter(|(_, p)| **p > 0.0).map(move |(i, p)| ((i / self.cols, i % self.cols), *p))
    }
}

/// Independent loss on `|m, l⟩` through `channel`.
pub fn apply_loss_joint(m: usize, l: usize, channel: &LossChannel) -> JointFockPMF {
    let mu = channel.mu();
    let pa = binomial_loss_pmf(m, mu);
    let pb = binomial_loss_pmf(l, mu);
    let (rows, cols) = (m + 1, l + 1);
    let mut probs = vec![0.0; rows * cols];
    for lost_a in 0..=m {
        for lost_b in 0..=l {
            probs[(m - lost_a) * cols + (l - lost_b)] = pa.get(lost_a) * pb.get(lost_b);
        }
    }
    JointFockPMF { rows, cols, probs }
}

fn sign_pow(x: f64, e: usize) -> f64 {
    if e.is_multiple_of(2) || x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// `R` and its `theta` derivative from the alternating sum
///
///
/// `R = sqrt((k-q)!(m+q)!/(k! m!)) Σ_y (-1)^y C(m,y) C(k,y+q) cos^{k+m-2y-q} sin^{2y+q}`.
///
/// The sum is evaluated term by term in log space with explicit signs and
/// accumulated in descending magnitude order. Terms are log-concave in `y`, so
/// the loop stops once it is past the peak and 80 e-folds below it.
fn amplitude_parts(k: usize, m: usize, q: i64, theta: f64, derivative: bool) -> Result<(f64, f64)> {
    if q > k as i64 || q < -(m as i64) {
        return Err(Error::IndexOutOfRange { k, m, q });
    }
    let (s, c) = theta.sin_cos();
    let (ln_s, ln_c) = (s.abs().ln(), c.abs().ln());
    let y_lo = if q < 0 { (-q) as usize } else { 0 };
    let y_hi = m.min((k as i64 - q) as usize);
    let prefactor = 0.5
        * (ln_factorial((k as i64 - q) as usize) + ln_factorial((m as i64 + q) as usize)
            - ln_factorial(k)
            - ln_factorial(m));

    let mut value = Vec::with_capacity(16);
    let mut deriv = Vec::with_capacity(if derivative { 32 } else { 0 });
    let mut peak = f64::NEG_INFINITY;
    for y in y_lo..=y_hi {
        let kq = (y as i64 + q) as usize;
        let pc = (k as i64 + m as i64 - 2 * y as i64 - q) as usize;
        let ps = (2 * y as i64 + q) as usize;
        let ln_comb = ln_binomial(m, y) + ln_binomial(k, kq) + prefactor;
        let sign = if y % 2 == 0 { 1.0 } else { -1.0 };
        let ln_mag = ln_comb + ln_pow(c.abs(), pc) + ln_pow(s.abs(), ps);
        value.push(LogTerm { sign: sign * sign_pow(c, pc) * sign_pow(s, ps), ln_mag });
        if derivative {
            // d/dθ cos^a sin^b = -a cos^{a-1} sin^{b+1} + b cos^{a+1} sin^{b-1}
            if pc > 0 {
                let lm = ln_comb + (pc as f64).ln() + ln_pow(c.abs(), pc - 1) + (ps + 1) as f64 * ln_s;
                deriv.push(LogTerm { sign: -sign * sign_pow(c, pc - 1) * sign_pow(s, ps + 1), ln_mag: lm });
            }
            if ps > 0 {
                let lm = ln_comb + (ps as f64).ln() + (pc + 1) as f64 * ln_c + ln_pow(s.abs(), ps - 1);
                deriv.push(LogTerm { sign: sign * sign_pow(c, pc + 1) * sign_pow(s, ps - 1), ln_mag: lm });
            }
        }
        let scale =
            if derivative { deriv.iter().rev().take(2).map(|t| t.ln_mag).fold(ln_mag, f64::max) } else { ln_mag };
        if scale > peak {
            peak = scale;
        } else if scale < peak - 80.0 && s != 0.0 && c != 0.0 {
            break;
        }
    }
    let r = signed_log_sum(&mut value);
    let dr = if derivative { signed_log_sum(&mut deriv) } else { 0.0 };
    Ok((r, dr))
}

/// Sectors up to this many photons use the alternating sum; larger ones the
/// spectral form, where the sum would cancel catastrophically.
const DIRECT_MAX_PHOTONS: usize = 24;

fn check_transfer(k: usize, m: usize, q: i64) -> Result<()> {
    if q > k as i64 || q < -(m as i64) {
        Err(Error::IndexOutOfRange { k, m, q })
    } else {
        Ok(())
    }
}

fn spectral_parts(k: usize, m: usize, q: i64, theta: f64) -> (f64, f64) {
    let c = (k as i64 - q) as usize;
    let rows = c.min(k)..=c.max(k);
    let sector = BeamsplitterSector::new(k + m, rows);
    let (amp, d_amp) = sector.amplitude(c, k, &sector.phases(theta));
    // amplitude = (-i)^q R
    let rot = Complex64::new(0.0, 1.0).powi(q.rem_euclid(4) as i32);
    ((amp * rot).re, (d_amp * rot).re)
}

/// `R(theta)` such that the amplitude `⟨k-q, m+q|U|k, m⟩ = (-i)^q R(theta)`.
pub fn beamsplitter_amplitude(k: usize, m: usize, q: i64, theta: f64) -> Result<f64> {
    check_transfer(k, m, q)?;
    if k + m <= DIRECT_MAX_PHOTONS {
        amplitude_parts(k, m, q, theta, false).map(|(r, _)| r)
    } else {
        Ok(spectral_parts(k, m, q, theta).0)
    }
}

/// `R(theta)` and `dR/dtheta`.
pub fn beamsplitter_amplitude_with_derivative(k: usize, m: usize, q: i64, theta: f64) -> Result<(f64, f64)> {
    check_transfer(k, m, q)?;
    if k + m <= DIRECT_MAX_PHOTONS {
        amplitude_parts(k, m, q, theta, true)
    } else {
        Ok(spectral_parts(k, m, q, theta))
    }
}

/// `R(theta)` by the alternating sum alone, whatever the photon number.
pub fn beamsplitter_amplitude_direct(k: usize, m: usize, q: i64, theta: f64) -> Result<f64> {
    amplitude_parts(k, m, q, theta, false).map(|(r, _)| r)
}

/// Transition probability `|⟨k-q, m+q| exp(-i g t H_int) |k, m⟩|²` at
/// `theta = g t / 2`.
pub fn beamsplitter_prob(k: usize, m: usize, q: i64, theta: f64) -> Result<f64> {
    beamsplitter_amplitude(k, m, q, theta).map(|r| r * r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn lossless_binomial_is_delta() {
        assert_eq!(binomial_loss_pmf(2, 0.0).probs(), &[1.0, 0.0, 0.0]);
        assert_eq!(binomial_loss_pmf(3, 1.0).probs(), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn binomial_half() {
        let p = binomial_loss_pmf(1, 0.5);
        assert!((p.get(0) - 0.5).abs() < 1e-15 && (p.get(1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn binomial_moments_large_n() {
        let p = binomial_loss_pmf(200, 0.3);
        // direct summation of the recurrence C(n,k+1)/C(n,k) = (n-k)/(k+1)
        let mut direct = vec![0.7f64.powi(200)];
        for k in 0..200 {
            let next = direct[k] * (200 - k) as f64 / (k + 1) as f64 * 0.3 / 0.7;
            direct.push(next);
        }
        for (a, b) in p.probs().iter().zip(&direct) {
            assert!((a - b).abs() <= 1e-12 * b.max(1e-300) + 1e-300);
        }
        assert!((p.total() - 1.0).abs() < 1e-12);
        assert!((p.mean() - 60.0).abs() < 1e-9);
    }

    #[test]
    fn poisson_examples() {
        let p = poisson_pmf(0.0, 5).unwrap();
        assert_eq!(p.probs(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let p = poisson_pmf(0.5, 40).unwrap();
        assert!((p.get(0) - (-0.5f64).exp()).abs() < 1e-15);
        assert!(p.tail_mass() < 1e-30);
        match poisson_pmf(10.0, 10) {
            Err(Error::CutoffTooSmall { tail, .. }) => assert!(tail > 0.4 && tail < 0.5),
            other => panic!("expected CutoffTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn poisson_cutoff_meets_tail() {
        let k = poisson_cutoff(25.0, 1e-12);
        assert!(poisson_pmf(25.0, k).unwrap().tail_mass() <= 1e-12);
    }

    #[test]
    fn loss_channel_validation() {
        assert!(LossChannel::new(1.0, 1.0, 0.0).is_err());
        assert!(LossChannel::new(-1.0, 1.0, 1.0).is_err());
        assert!(LossChannel::new(1.0, -0.1, 1.0).is_err());
        let ch = LossChannel::new(1.0, 2f64.ln(), 0.5).unwrap();
        assert!((ch.mu() - 0.75).abs() < 1e-15);
        assert!((ch.absorbed_fraction() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn joint_loss_examples() {
        let none = LossChannel::ideal(1.0, 0.0).unwrap();
        let j = apply_loss_joint(1, 1, &none);
        assert_eq!(j.get(1, 1), 1.0);
        assert!((j.total() - 1.0).abs() < 1e-15);

        let half = LossChannel::ideal(1.0, 2f64.ln()).unwrap();
        let j = apply_loss_joint(2, 1, &half);
        // C(2,1)·0.5·0.5 for one survivor in a, 0.5 for none in b
        assert!((j.get(1, 0) - 0.25).abs() < 1e-15);
        assert!((j.total() - 1.0).abs() < 1e-15);

        let total_loss = LossChannel::ideal(1.0, 800.0).unwrap();
        let j = apply_loss_joint(3, 3, &total_loss);
        assert!((j.get(0, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_at_zero_angle() {
        for q in -2..=3 {
            let p = beamsplitter_prob(3, 2, q, 0.0).unwrap();
            assert_eq!(p, if q == 0 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn hong_ou_mandel() {
        assert!(beamsplitter_prob(1, 1, 0, FRAC_PI_4).unwrap().abs() < 1e-15);
        assert!((beamsplitter_prob(1, 1, 1, FRAC_PI_4).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unitarity_small() {
        for &theta in &[0.3, 1.1, 2.0] {
            let s: f64 = (-2..=3).map(|q| beamsplitter_prob(3, 2, q, theta).unwrap()).sum();
            assert!((s - 1.0).abs() < 1e-12, "theta {theta}: {s}");
        }
    }

    #[test]
    fn out_of_range_transfer() {
        assert_eq!(beamsplitter_prob(2, 1, 3, 0.1), Err(Error::IndexOutOfRange { k: 2, m: 1, q: 3 }));
        assert!(beamsplitter_prob(2, 1, -2, 0.1).is_err());
    }

    #[test]
    fn quarter_turn_swaps_modes() {
        // theta = π/2 maps |k,m⟩ to |m,k⟩ up to phase
        let p = beamsplitter_prob(4, 1, 3, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_matches_direct() {
        for &(k, m, q, th) in &[(3usize, 2usize, 1i64, 0.4), (5, 5, -2, 1.2), (2, 0, 2, 2.9), (10, 9, 3, 0.7)] {
            let direct = amplitude_parts(k, m, q, th, true).unwrap();
            let spectral = spectral_parts(k, m, q, th);
            assert!((direct.0 - spectral.0).abs() < 1e-12, "{k} {m} {q}: {direct:?} vs {spectral:?}");
            assert!((direct.1 - spectral.1).abs() < 1e-11, "{k} {m} {q}: {direct:?} vs {spectral:?}");
        }
    }

    #[test]
    fn large_sectors_stay_unitary() {
        for &theta in &[0.01, 0.4, 1.3] {
            let s: f64 = (-150..=150).map(|q| beamsplitter_prob(150, 150, q, theta).unwrap()).sum();
            assert!((s - 1.0).abs() < 1e-10, "theta {theta}: {s}");
        }
    }

    #[test]
    fn derivative_matches_difference() {
        let h = 1e-6;
        for &(k, m, q, th) in &[(3usize, 2usize, 1i64, 0.4), (5, 5, -2, 1.2), (2, 0, 2, 2.9), (6, 3, 0, 0.0)] {
            let (_, d) = beamsplitter_amplitude_with_derivative(k, m, q, th).unwrap();
            let fd = (beamsplitter_amplitude(k, m, q, th + h).unwrap()
                - beamsplitter_amplitude(k, m, q, th - h).unwrap())
                / (2.0 * h);
            assert!((d - fd).abs() < 1e-7 * (1.0 + d.abs()), "{k} {m} {q} {th}: {d} vs {fd}");
        }
    }
}
