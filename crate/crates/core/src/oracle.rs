//! Reference quantum Fisher information for states that are diagonal in the
//! two-mode number basis, and a dense spectral evaluator for arbitrary density
//! matrices on a truncated basis.
//!
//! Both evaluate the QFI of `exp(-i g t H_int) ρ exp(i g t H_int)` with respect
//! to `g`, with `H_int = (a†b + ab†)/2`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fock::{binomial_loss_pmf, LossChannel};

/// `ρ = Σ_i q_i |a_i, b_i⟩⟨a_i, b_i|`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedFockDecomposition {
    terms: Vec<((usize, usize), f64)>,
}

impl MixedFockDecomposition {
    /// Merges repeated labels and drops zero weights. Weights must be
    /// non-negative and sum to one within 1e-10.
    pub fn new(terms: impl IntoIterator<Item = ((usize, usize), f64)>) -> Result<Self> {
        let mut merged: Vec<((usize, usize), f64)> = Vec::new();
        for (label, w) in terms {
            if !(w >= 0.0) {
                return Err(invalid("weights", format!("negative weight {w} for {label:?}")));
            }
            if w == 0.0 {
                continue;
            }
            match merged.iter_mut().find(|(l, _)| *l == label) {
                Some(entry) => entry.1 += w,
                None => merged.push((label, w)),
            }
        }
        let total: f64 = merged.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(invalid("weights", format!("sum to {total}, expected 1")));
        }
        Ok(Self { terms: merged })
    }

    /// `|m, l⟩` after independent loss with probability `mu` per photon.
    pub fn lossy_fock_pair(m: usize, l: usize, mu: f64) -> Self {
        let pa = binomial_loss_pmf(m, mu);
        let pb = binomial_loss_pmf(l, mu);
        let mut terms = Vec::new();
        for i in 0..=m {
            for j in 0..=l {
                let w = pa.get(i) * pb.get(j);
                if w > 0.0 {
                    terms.push(((m - i, l - j), w));
                }
            }
        }
        Self { terms }
    }

    pub fn terms(&self) -> &[((usize, usize), f64)] {
        &self.terms
    }

    pub fn max_photons(&self) -> usize {
        self.terms.iter().map(|((a, b), _)| a + b).max().unwrap_or(0)
    }
}

fn coupling(a: usize, b: usize) -> f64 {
    // ⟨a+1, b-1| H_int |a, b⟩
    0.5 * ((a + 1) as f64 * b as f64).sqrt()
}

/// QFI of a number-diagonal mixture:
///
/// `F = 4t² [Σ_i q_i ΔH_i² - Σ_{i≠j} 2 q_i q_j |H_ij|²/(q_i + q_j)]`
///
/// with `ΔH² = ((a(b+1) + b(a+1))/4` for `|a, b⟩` and `H_ij` nonzero only
/// between labels differing by one transferred photon.
pub fn mixed_qfi_oracle(rho: &MixedFockDecomposition, t: f64) -> f64 {
    let mut diag = 0.0;
    for &((a, b), q) in &rho.terms {
        let (a, b) = (a as f64, b as f64);
        diag += q * 0.25 * (a * (b + 1.0) + b * (a + 1.0));
    }
    let mut off = 0.0;
    for &((a, b), qi) in &rho.terms {
        if b == 0 {
            continue;
        }
        let target = (a + 1, b - 1);
        if let Some(&(_, qj)) = rho.terms.iter().find(|(l, _)| *l == target) {
            let h = coupling(a, b);
            // counted once for (i, j) and once for (j, i)
            off += 2.0 * 2.0 * qi * qj * h * h / (qi + qj);
        }
    }
    4.0 * t * t * (diag - off)
}

/// Two-mode number states `|a, b⟩` with `a + b <= n_max`, ordered by total
/// photon number and then by `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockBasis {
    n_max: usize,
}

impl FockBasis {
    pub fn new(n_max: usize) -> Self {
        Self { n_max }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        (self.n_max + 1) * (self.n_max + 2) / 2
    }

    pub fn index(&self, a: usize, b: usize) -> Option<usize> {
        let n = a + b;
        (n <= self.n_max).then(|| n * (n + 1) / 2 + a)
    }

    pub fn label(&self, index: usize) -> (usize, usize) {
        let mut n = 0;
        while (n + 1) * (n + 2) / 2 <= index {
            n += 1;
        }
        let a = index - n * (n + 1) / 2;
        (a, n - a)
    }

    /// `H_int` on this basis.
    pub fn h_int(&self) -> DMatrix<Complex64> {
        let dim = self.dim();
        let mut h = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            let (a, b) = self.label(i);
            if b > 0 {
                let j = self.index(a + 1, b - 1).expect("same photon number");
                let v = Complex64::new(coupling(a, b), 0.0);
                h[(j, i)] = v;
                h[(i, j)] = v;
            }
        }
        h
    }
}

/// A density matrix on a truncated two-mode number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    basis: FockBasis,
    rho: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Takes `rho` as given; [`spectral_qfi_oracle`] checks that it is a state.
    pub fn new(basis: FockBasis, rho: DMatrix<Complex64>) -> Result<Self> {
        if rho.nrows() != basis.dim() || rho.ncols() != basis.dim() {
            return Err(invalid(
                "rho",
                format!("shape {}x{} does not match basis dimension {}", rho.nrows(), rho.ncols(), basis.dim()),
            ));
        }
        Ok(Self { basis, rho })
    }

    /// `|ψ⟩⟨ψ|` from amplitudes indexed like the basis.
    pub fn pure(basis: FockBasis, amplitudes: &[Complex64]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(amplitudes);
        Self::new(basis, &v * v.adjoint())
    }

    pub fn from_decomposition(rho: &MixedFockDecomposition) -> Self {
        let basis = FockBasis::new(rho.max_photons());
        let mut m = DMatrix::zeros(basis.dim(), basis.dim());
        for &((a, b), q) in rho.terms() {
            let i = basis.index(a, b).expect("within n_max");
            m[(i, i)] = Complex64::new(q, 0.0);
        }
        Self { basis, rho: m }
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }
}

/// QFI from the spectral decomposition of `ρ`:
///
/// `F = 2 Σ_{λ_i + λ_j > 0} (λ_i - λ_j)² / (λ_i + λ_j) |⟨i| t H_int |j⟩|²`.
///
/// The QFI is invariant under the unitary, so the result is the same at every
/// coupling `g`. Fails with [`Error::NotAState`] if `ρ` is not Hermitian, not
/// of unit trace or has eigenvalues below -1e-10.
pub fn spectral_qfi_oracle(rho: &DensityMatrix, t: f64) -> Result<f64> {
    let m = &rho.rho;
    let herm_err = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if herm_err > 1e-10 {
        return Err(Error::NotAState(format!("not Hermitian (max |ρ - ρ†| = {herm_err:.3e})")));
    }
    let trace = m.trace();
    if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
        return Err(Error::NotAState(format!("trace {trace} differs from 1")));
    }
    let eig = SymmetricEigen::new(m.clone());
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -1e-10 {
        return Err(Error::NotAState(format!("eigenvalue {min:.3e} is negative")));
    }
    let h = rho.basis.h_int();
    let v = &eig.eigenvectors;
    let hv = &h * v;
    let elements = v.adjoint() * hv;
    let lambda: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0)).collect();
    let mut f = 0.0;
    for i in 0..lambda.len() {
        for j in 0..lambda.len() {
            let s = lambda[i] + lambda[j];
            if s <= 1e-15 {
                continue;
            }
            let d = lambda[i] - lambda[j];
            f += d * d / s * elements[(i, j)].norm_sqr();
        }
    }
    Ok(2.0 * t * t * f)
}

/// [`MixedFockDecomposition::lossy_fock_pair`] at the channel's loss probability.
pub fn lossy_fock_pair(m: usize, l: usize, channel: &LossChannel) -> MixedFockDecomposition {
    MixedFockDecomposition::lossy_fock_pair(m, l, channel.mu())
}
