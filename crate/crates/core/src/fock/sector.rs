//! Beamsplitter amplitudes from the spectrum of `H_int` on a sector of fixed
//! total photon number `N`.
//!
//! On `{|a, N-a⟩}` the generator is tridiagonal with off-diagonal
//! `⟨a+1| H |a⟩ = √((a+1)(N-a))/2` and exactly known eigenvalues
//! `e - N/2`, `e = 0..=N`. Each eigenvector follows from the three-term
//! recurrence, run inward from both ends (where it grows and is therefore
//! stable) and matched in the middle. Amplitudes are then
//! `⟨c|U(θ)|a⟩ = Σ_e v_e(c) v_e(a) e^{-2iθ(e - N/2)}`, free of the
//! cancellation that ruins the alternating sum at large `N`.

use num_complex::Complex64;
use std::ops::RangeInclusive;

fn offdiag(total: usize, a: usize) -> f64 {
    0.5 * (((a + 1) * (total - a)) as f64).sqrt()
}

/// Normalized eigenvector of `H_int` on sector `total` with eigenvalue
/// `e - total/2`.
pub(crate) fn eigenvector(total: usize, e: usize) -> Vec<f64> {
    let d = total + 1;
    if d == 1 {
        return vec![1.0];
    }
    let lambda = e as f64 - total as f64 / 2.0;
    let mid = total / 2;
    let hi_fwd = (mid + 2).min(total);
    let lo_bwd = mid.saturating_sub(2);

    let mut fwd = vec![0.0; hi_fwd + 1];
    fwd[0] = 1.0;
    for i in 0..hi_fwd {
        let prev = if i == 0 { 0.0 } else { offdiag(total, i - 1) * fwd[i - 1] };
        fwd[i + 1] = (lambda * fwd[i] - prev) / offdiag(total, i);
        if fwd[i + 1].abs() > 1e200 {
            fwd.iter_mut().for_each(|x| *x *= 1e-200);
        }
    }
    let mut bwd = vec![0.0; d];
    bwd[total] = 1.0;
    for i in (lo_bwd + 1..=total).rev() {
        let next = if i == total { 0.0 } else { offdiag(total, i) * bwd[i + 1] };
        bwd[i - 1] = (lambda * bwd[i] - next) / offdiag(total, i - 1);
        if bwd[i - 1].abs() > 1e200 {
            bwd.iter_mut().for_each(|x| *x *= 1e-200);
        }
    }
    // least-squares scale of the backward solution onto the forward one over
    // the overlap window
    let (mut num, mut den) = (0.0, 0.0);
    for i in lo_bwd..=hi_fwd {
        num += fwd[i] * bwd[i];
        den += bwd[i] * bwd[i];
    }
    let scale = num / den;
    let mut v: Vec<f64> = (0..d).map(|i| if i <= mid { fwd[i] } else { scale * bwd[i] }).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

/// Eigenvectors of one sector restricted to a window of photon numbers in
/// mode a.
#[derive(Debug, Clone)]
pub struct BeamsplitterSector {
    total: usize,
    rows: RangeInclusive<usize>,
    /// `vectors[(row - rows.start) * (total + 1) + e]`
    vectors: Vec<f64>,
}

/// `e^{-2iθλ_e}` and `λ_e` for one coupling angle.
#[derive(Debug, Clone)]
pub struct SectorPhases {
    phases: Vec<Complex64>,
    lambdas: Vec<f64>,
}

impl BeamsplitterSector {
    /// Sector of `total` photons keeping rows `rows` (clamped to `0..=total`).
    pub fn new(total: usize, rows: RangeInclusive<usize>) -> Self {
        let rows = *rows.start()..=(*rows.end()).min(total);
        let d = total + 1;
        let n_rows = rows.end().saturating_sub(*rows.start()) + 1;
        let mut vectors = vec![0.0; n_rows * d];
        for e in 0..d {
            let v = eigenvector(total, e);
            for (r, a) in rows.clone().enumerate() {
                vectors[r * d + e] = v[a];
            }
        }
        Self { total, rows, vectors }
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn phases(&self, theta: f64) -> SectorPhases {
        let half = self.total as f64 / 2.0;
        let lambdas: Vec<f64> = (0..=self.total).map(|e| e as f64 - half).collect();
        let phases = lambdas.iter().map(|l| Complex64::from_polar(1.0, -2.0 * theta * l)).collect();
        SectorPhases { phases, lambdas }
    }

    fn row(&self, a: usize) -> &[f64] {
        assert!(self.rows.contains(&a), "photon number {a} outside stored rows {:?}", self.rows);
        let d = self.total + 1;
        let r = a - self.rows.start();
        &self.vectors[r * d..(r + 1) * d]
    }

    /// `⟨c, N-c| U |a, N-a⟩` and its `θ` derivative.
    pub fn amplitude(&self, c: usize, a: usize, phases: &SectorPhases) -> (Complex64, Complex64) {
        let (vc, va) = (self.row(c), self.row(a));
        let mut amp = Complex64::new(0.0, 0.0);
        let mut weighted = Complex64::new(0.0, 0.0);
        for e in 0..=self.total {
            let term = phases.phases[e] * (vc[e] * va[e]);
            amp += term;
            weighted += term * phases.lambdas[e];
        }
        (amp, weighted * Complex64::new(0.0, -2.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvectors_are_orthonormal() {
        for total in [0usize, 1, 2, 7, 40, 301] {
            let vs: Vec<Vec<f64>> = (0..=total).map(|e| eigenvector(total, e)).collect();
            for i in (0..=total).step_by((total / 7).max(1)) {
                for j in (0..=total).step_by((total / 5).max(1)) {
                    let dot: f64 = vs[i].iter().zip(&vs[j]).map(|(x, y)| x * y).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - want).abs() < 1e-11, "N={total} ({i},{j}): {dot}");
                }
            }
        }
    }

    #[test]
    fn eigen_equation_holds() {
        let total = 1000;
        for e in [0, 13, 500, 987, 1000] {
            let v = eigenvector(total, e);
            let lambda = e as f64 - 500.0;
            let mut worst: f64 = 0.0;
            for a in 0..=total {
                let mut hv = 0.0;
                if a > 0 {
                    hv += offdiag(total, a - 1) * v[a - 1];
                }
                if a < total {
                    hv += offdiag(total, a) * v[a + 1];
                }
                worst = worst.max((hv - lambda * v[a]).abs());
            }
            assert!(worst < 1e-10, "e={e}: {worst}");
        }
    }
}
