//! Cavity-QED source and detector: `N_at` two-level atoms coupled
//! symmetrically to one cavity mode,
//!
//! `H = ω (a†a + Σ_i (σ^z_i + 1)/2) + J (a† S⁻ + a S⁺)`.
//!
//! The excitation number `E` (photons plus excited atoms) is conserved, and a
//! symmetric initial state stays in the ladder `(k photons, E - k atomic
//! excitations)`, on which `H` is tridiagonal. The `ω` part is `ω E` on the
//! whole ladder and only contributes a global phase.

mod ac;
mod meanfield;

pub use ac::{ac_precision, ac_precision_with_q, AcOptions, AcReadout, PrepTime, QSource, UndamageablePairs};
pub use meanfield::{meanfield_evolve, switch_time, switch_time_formula, MeanFieldState, MeanFieldTrajectory};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::fock::PhotonPMF;
use crate::optimize::{linspace, scan_then_golden, Maximum};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DickeConfig {
    n_atoms: usize,
    coupling: f64,
    omega: f64,
    n_target: f64,
}

impl DickeConfig {
    pub fn new(n_atoms: usize, coupling: f64, omega: f64, n_target: f64) -> Result<Self> {
        if n_atoms == 0 {
            return Err(invalid("n_atoms", "must be >= 1"));
        }
        if !(coupling > 0.0 && coupling.is_finite()) {
            return Err(invalid("J", format!("must be finite and > 0, got {coupling}")));
        }
        if !omega.is_finite() {
            return Err(invalid("omega", "must be finite"));
        }
        if !(n_target >= 0.0 && n_target.is_finite()) {
            return Err(invalid("n_target", format!("must be finite and >= 0, got {n_target}")));
        }
        Ok(Self { n_atoms, coupling, omega, n_target })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn n_target(&self) -> f64 {
        self.n_target
    }

    pub fn with_n_atoms(&self, n_atoms: usize) -> Result<Self> {
        Self::new(n_atoms, self.coupling, self.omega, self.n_target)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// All atoms excited, cavity empty; superradiant emission.
    Preparation,
    /// `n` photons in the cavity, all atoms in the ground state.
    Absorption { photons: usize },
}

/// The tridiagonal Hamiltonian on one excitation ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderSector {
    excitations: usize,
    /// Photon number of each basis state, ascending.
    photons: Vec<usize>,
    /// `⟨k+1 photons| H |k photons⟩` between consecutive basis states.
    couplings: Vec<f64>,
    shift: f64,
    initial: usize,
}

/// Ladder of `config` in `regime`.
pub fn build_sector(config: &DickeConfig, regime: Regime) -> LadderSector {
    let n_at = config.n_atoms;
    let j = config.coupling;
    match regime {
        Regime::Preparation => {
            let photons: Vec<usize> = (0..=n_at).collect();
            // a† S⁻ on (k photons, N_at - k excited atoms)
            let couplings = (0..n_at).map(|k| j * (k + 1) as f64 * ((n_at - k) as f64).sqrt()).collect();
            LadderSector { excitations: n_at, photons, couplings, shift: config.omega * n_at as f64, initial: 0 }
        }
        Regime::Absorption { photons: n } => {
            let lo = n.saturating_sub(n_at);
            let photons: Vec<usize> = (lo..=n).collect();
            // a S⁺ links (k, n-k) to (k-1, n-k+1); stored from the lower photon
            // number upward
            let couplings = photons[1..]
                .iter()
                .map(|&k| j * (k as f64).sqrt() * (((n - k + 1) * (n_at + k - n)) as f64).sqrt())
                .collect();
            let initial = photons.len() - 1;
            LadderSector { excitations: n, photons, couplings, shift: config.omega * n as f64, initial }
        }
    }
}

impl LadderSector {
    pub fn excitations(&self) -> usize {
        self.excitations
    }

    pub fn dim(&self) -> usize {
        self.photons.len()
    }

    pub fn photons(&self) -> &[usize] {
        &self.photons
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    /// Basis index of the regime's initial state.
    pub fn initial_index(&self) -> usize {
        self.initial
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut h = DMatrix::from_diagonal_element(d, d, self.shift);
        for (i, &c) in self.couplings.iter().enumerate() {
            h[(i, i + 1)] = c;
            h[(i + 1, i)] = c;
        }
        h
    }

    pub fn propagator(&self) -> SectorPropagator {
        let eig = SymmetricEigen::new(self.matrix());
        SectorPropagator { values: eig.eigenvalues, vectors: eig.eigenvectors }
    }

    /// Amplitudes at time `t` starting from basis state `initial`.
    pub fn evolve(&self, t: f64, initial: usize) -> Vec<Complex64> {
        self.propagator().evolve(t, initial)
    }
}

/// Eigendecomposition of a ladder, reusable across times.
#[derive(Debug, Clone)]
pub struct SectorPropagator {
    values: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl SectorPropagator {
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn evolve(&self, t: f64, initial: usize) -> Vec<Complex64> {
        let d = self.values.len();
        let weights: Vec<Complex64> =
            (0..d).map(|e| self.vectors[(initial, e)] * Complex64::from_polar(1.0, -self.values[e] * t)).collect();
        (0..d).map(|i| (0..d).map(|e| weights[e] * self.vectors[(i, e)]).sum()).collect()
    }

    /// `|amplitude|²` over the basis.
    pub fn probabilities(&self, t: f64, initial: usize) -> Vec<f64> {
        self.evolve(t, initial).iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Cavity photon distribution after preparing for a time `t` from fully
/// excited atoms and an empty cavity.
pub fn photon_pmf(config: &DickeConfig, t: f64) -> PhotonPMF {
    let sector = build_sector(config, Regime::Preparation);
    let probs = sector.propagator().probabilities(t, sector.initial);
    PhotonPMF::new(probs, 0.0).expect("probabilities are non-negative")
}

pub fn mean_photons(config: &DickeConfig, t: f64) -> f64 {
    photon_pmf(config, t).mean()
}

/// First maximum of the mean photon number during superradiant emission,
/// searched over `[0, 2 ln(4 N_at) / (√N_at J)]`.
pub fn superradiant_peak(config: &DickeConfig) -> Maximum {
    let sector = build_sector(config, Regime::Preparation);
    let prop = sector.propagator();
    let mean = |t: f64| {
        let p = prop.probabilities(t, sector.initial);
        p.iter().zip(&sector.photons).map(|(p, &k)| p * k as f64).sum::<f64>()
    };
    let n = config.n_atoms as f64;
    let horizon = 2.0 * (4.0 * n).ln() / (n.sqrt() * config.coupling);
    let grid = linspace(0.0, horizon, 257);
    // first local maximum on the grid, then refine around it
    let values: Vec<f64> = grid.iter().map(|&t| mean(t)).collect();
    let first = (1..values.len() - 1)
        .find(|&i| values[i] >= values[i - 1] && values[i] >= values[i + 1])
        .unwrap_or(values.len() - 1);
    let lo = first.saturating_sub(1);
    let hi = (first + 1).min(grid.len() - 1);
    scan_then_golden(mean, &grid[lo..=hi], 1e-12 * horizon)
}

/// Preparation time at which the linearized dynamics reach a mean of
/// `n_target` photons, `asinh(√n) / (√N_at J)`.
pub fn t_prep(config: &DickeConfig) -> f64 {
    config.n_target.sqrt().asinh() / ((config.n_atoms as f64).sqrt() * config.coupling)
}

/// Thermal distribution `n^k / (n+1)^{k+1}` produced by the linearized
/// preparation.
pub fn q_linear(n: f64, k: usize) -> f64 {
    if n == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (k as f64 * n.ln() - (k as f64 + 1.0) * n.ln_1p()).exp()
}

/// Time for a single photon to be absorbed by the ground-state ensemble,
/// `π / (2 J √N_at)`.
pub fn t_meas(config: &DickeConfig) -> f64 {
    std::f64::consts::FRAC_PI_2 / (config.coupling * (config.n_atoms as f64).sqrt())
}

/// Distribution of photons left after an absorption attempt of length
/// `t_meas` starting from `n` photons.
pub fn absorption_remainder(config: &DickeConfig, n: usize) -> PhotonPMF {
    let sector = build_sector(config, Regime::Absorption { photons: n });
    let p = sector.propagator().probabilities(t_meas(config), sector.initial);
    let mut probs = vec![0.0; n + 1];
    for (&k, &pk) in sector.photons.iter().zip(&p) {
        probs[k] = pk;
    }
    PhotonPMF::new(probs, 0.0).expect("probabilities are non-negative")
}

/// Probability that photons are left in the cavity after `rounds` absorption
/// attempts starting from `n` photons.
///
/// Between rounds the atoms are read out, which projects the cavity onto a
/// photon number, and reset to the ground state; every remaining Fock
/// component is then absorbed again for `t_meas`.
pub fn p_error(config: &DickeConfig, n: usize, rounds: usize) -> Result<f64> {
    if rounds == 0 {
        return Err(invalid("rounds", "must be >= 1"));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let mut dist = vec![0.0; n + 1];
    dist[n] = 1.0;
    let mut cache: Vec<Option<PhotonPMF>> = vec![None; n + 1];
    for _ in 0..rounds {
        let mut next = vec![0.0; n + 1];
        next[0] = dist[0];
        for k in 1..=n {
            if dist[k] == 0.0 {
                continue;
            }
            let rem = cache[k].get_or_insert_with(|| absorption_remainder(config, k));
            for (j, p) in rem.probs().iter().enumerate() {
                next[j] += dist[k] * p;
            }
        }
        dist = next;
    }
    Ok((1.0 - dist[0]).clamp(0.0, 1.0))
}

/// Detector efficiency equivalent to a failure probability spread over `n`
/// photons, `(1 - p_error)^{1/n}`; 1 when `n = 0`.
pub fn eta_from_perror(p_error: f64, n: usize) -> f64 {
    if n == 0 {
        1.0
    } else {
        (1.0 - p_error).powf(1.0 / n as f64)
    }
}

/// Tridiagonal coupling `√((N - m)(m + 1/2)(m + 1))` of the pair-creation
/// approximation, in units of `J`.
pub fn approximate_coupling(n_atoms: usize, m: usize) -> f64 {
    ((n_atoms - m) as f64 * (m as f64 + 0.5) * (m as f64 + 1.0)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n_at: usize, n: f64) -> DickeConfig {
        DickeConfig::new(n_at, 1.0, 0.0, n).unwrap()
    }

    #[test]
    fn single_atom_is_vacuum_rabi() {
        let s = build_sector(&cfg(1, 1.0), Regime::Preparation);
        assert_eq!(s.couplings(), &[1.0]);
        let p = s.propagator().probabilities(std::f64::consts::FRAC_PI_2, 0);
        assert!((p[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ladder_couplings() {
        let s = build_sector(&cfg(40, 8.0), Regime::Preparation);
        assert!((s.couplings()[0] - 40f64.sqrt()).abs() < 1e-12);
        for (k, a) in s.couplings().iter().enumerate() {
            assert!((a / ((k + 1) as f64 * ((40 - k) as f64).sqrt()) - 1.0).abs() < 1e-14);
        }
        assert_eq!(build_sector(&cfg(3, 1.0), Regime::Absorption { photons: 5 }).dim(), 4);
    }

    #[test]
    fn evolution_is_unitary() {
        let s = build_sector(&cfg(30, 4.0), Regime::Preparation);
        let prop = s.propagator();
        for t in [0.0, 0.1, 0.7, 3.0] {
            let p: f64 = prop.probabilities(t, 0).iter().sum();
            assert!((p - 1.0).abs() < 1e-10);
        }
        assert_eq!(prop.probabilities(0.0, 0)[0].round(), 1.0);
    }

    #[test]
    fn omega_only_shifts_the_spectrum() {
        let a = build_sector(&DickeConfig::new(12, 1.0, 0.0, 2.0).unwrap(), Regime::Preparation);
        let b = build_sector(&DickeConfig::new(12, 1.0, 3.5, 2.0).unwrap(), Regime::Preparation);
        let (pa, pb) = (a.propagator(), b.propagator());
        let mut ea: Vec<f64> = pa.eigenvalues().iter().copied().collect();
        let mut eb: Vec<f64> = pb.eigenvalues().iter().copied().collect();
        ea.sort_by(f64::total_cmp);
        eb.sort_by(f64::total_cmp);
        for (x, y) in ea.iter().zip(&eb) {
            assert!((y - x - 3.5 * 12.0).abs() < 1e-9);
        }
        for (x, y) in pa.probabilities(0.4, 0).iter().zip(pb.probabilities(0.4, 0)) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn thermal_distribution_sums_to_one() {
        let s: f64 = (0..2000).map(|k| q_linear(4.0, k)).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn errors_shrink_with_rounds_and_atoms() {
        let c = cfg(40, 8.0);
        let one = p_error(&c, 8, 1).unwrap();
        let two = p_error(&c, 8, 2).unwrap();
        assert!(two <= one);
        assert_eq!(p_error(&c, 0, 1).unwrap(), 0.0);
        assert_eq!(eta_from_perror(0.0, 0), 1.0);
        let mut last = 1.0;
        for n_at in [20, 40, 100] {
            let p = p_error(&cfg(n_at, 4.0), 4, 1).unwrap();
            assert!(p <= last);
            last = p;
        }
    }
}
