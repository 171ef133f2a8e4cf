//! The observable whose eigenbasis saturates the QFI of lossy twin-Fock states
//! at `g → 0`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::fock::{binomial_loss_pmf, LossChannel};
use crate::oracle::FockBasis;

/// `L = i Σ c_kl √(k(l+1)) (|k,l⟩⟨k-1,l+1| + |l,k⟩⟨l+1,k-1|)` on `k + l <= 2n`
/// with `c_kl = (p̃_k p̃_l - p̃_{k-1} p̃_{l+1}) / (p̃_k p̃_l + p̃_{k-1} p̃_{l+1})`
/// and `p̃_k` the probability that `k` of `n` photons survive.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalMeasurement {
    basis: FockBasis,
    matrix: DMatrix<Complex64>,
}

impl OptimalMeasurement {
    pub fn new(n: usize, mu: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "must be >= 1"));
        }
        if !(0.0..1.0).contains(&mu) {
            return Err(invalid("mu", format!("must lie in [0, 1), got {mu}")));
        }
        let survive = binomial_loss_pmf(n, 1.0 - mu);
        let pt = |k: i64| if k < 0 { 0.0 } else { survive.get(k as usize) };
        let basis = FockBasis::new(2 * n);
        let mut matrix = DMatrix::zeros(basis.dim(), basis.dim());
        for k in 1..=2 * n {
            for l in 0..=(2 * n - k) {
                let (ki, li) = (k as i64, l as i64);
                let a = pt(ki) * pt(li);
                let b = pt(ki - 1) * pt(li + 1);
                if a + b == 0.0 {
                    continue;
                }
                let v = Complex64::new(0.0, (a - b) / (a + b) * ((k * (l + 1)) as f64).sqrt());
                let (r, c) = (basis.index(k, l).unwrap(), basis.index(k - 1, l + 1).unwrap());
                matrix[(r, c)] += v;
                let (r, c) = (basis.index(l, k).unwrap(), basis.index(l + 1, k - 1).unwrap());
                matrix[(r, c)] += v;
            }
        }
        Ok(Self { basis, matrix })
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Largest entry of `|L - L†|`.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// CFI of measuring in the eigenbasis of [`OptimalMeasurement`] on the lossy
/// twin-Fock state `|n, n⟩` evolved at coupling `g`.
pub fn cfi_of_l(n: usize, channel: &LossChannel, g: f64) -> Result<f64> {
    let mu = channel.mu();
    let observable = OptimalMeasurement::new(n, mu)?;
    let basis = observable.basis;
    let t = channel.t();
    let dim = basis.dim();

    let lost = binomial_loss_pmf(n, mu);
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..=n {
        for j in 0..=n {
            let idx = basis.index(n - i, n - j).expect("within 2n");
            rho[(idx, idx)] = Complex64::new(lost.get(i) * lost.get(j), 0.0);
        }
    }
    let h = basis.h_int();
    let h_real = h.map(|z| z.re);
    let eig = SymmetricEigen::new(h_real);
    let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -g * t * e)));
    let u = &v * phases * v.adjoint();
    let rho_g = &u * rho * u.adjoint();
    let i_t = Complex64::new(0.0, -t);
    let d_rho = (&h * &rho_g - &rho_g * &h) * i_t;

    let w = SymmetricEigen::new(observable.matrix.clone()).eigenvectors;
    let mut f = 0.0;
    for k in 0..dim {
        let col = w.column(k);
        let p = (col.adjoint() * &rho_g * col)[(0, 0)].re;
        let dp = (col.adjoint() * &d_rho * col)[(0, 0)].re;
        if p > 1e-14 {
            f += dp * dp / p;
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fisher::qfi_tfs_exact;

    #[test]
    fn hermitian() {
        for n in 1..=6 {
            for mu in [0.0, 0.2, 0.5] {
                let l = OptimalMeasurement::new(n, mu).unwrap();
                assert!(l.hermiticity_error() < 1e-14, "n={n} mu={mu}");
            }
        }
    }

    #[test]
    fn lossless_saturation() {
        for n in 1..=3 {
            let c = LossChannel::ideal(0.0, 1.0).unwrap();
            let f = cfi_of_l(n, &c, 0.0).unwrap();
            assert!((f - 2.0 * (n * (n + 1)) as f64).abs() < 1e-8 * f, "n={n}: {f}");
        }
    }

    #[test]
    fn saturates_qfi_with_loss() {
        let c = LossChannel::ideal(1.0, 0.3).unwrap();
        for n in 1..=4 {
            let f = cfi_of_l(n, &c, 0.0).unwrap();
            let q = qfi_tfs_exact(n, &c).value;
            assert!((f - q).abs() < 1e-6 * q, "n={n}: {f} vs {q}");
        }
    }
}
