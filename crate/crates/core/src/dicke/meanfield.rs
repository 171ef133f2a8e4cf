//! Classical limit of superradiant pair creation: a pump amplitude `α`
//! depleted into a signal amplitude `β`,
//!
//! `dα/dt = -i β²/2`, `dβ/dt = -i β* α`.
//!
//! Times are in units of `1/J`.

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::ode::Dopri5;
use crate::optimize::golden_section_max;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldState {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl MeanFieldState {
    /// `|α|² + |β|²/2`, conserved.
    pub fn k(&self) -> f64 {
        self.alpha.norm_sqr() + self.beta.norm_sqr() / 2.0
    }

    /// `|α|² - |β|²/2`.
    pub fn r(&self) -> f64 {
        self.alpha.norm_sqr() - self.beta.norm_sqr() / 2.0
    }

    /// `arg α - 2 arg β`.
    pub fn phase(&self) -> f64 {
        self.alpha.arg() - 2.0 * self.beta.arg()
    }

    /// `α = i √N`, `β = 1`: a single seed photon and relative phase `π/2`.
    pub fn initial(n: f64) -> Self {
        Self { alpha: Complex64::new(0.0, n.sqrt()), beta: Complex64::new(1.0, 0.0) }
    }

    fn pack(&self) -> [f64; 4] {
        [self.alpha.re, self.alpha.im, self.beta.re, self.beta.im]
    }

    fn unpack(y: &[f64; 4]) -> Self {
        Self { alpha: Complex64::new(y[0], y[1]), beta: Complex64::new(y[2], y[3]) }
    }
}

fn rhs(_t: f64, y: &[f64; 4]) -> [f64; 4] {
    let s = MeanFieldState::unpack(y);
    let minus_i = Complex64::new(0.0, -1.0);
    let da = minus_i * s.beta * s.beta / 2.0;
    let db = minus_i * s.beta.conj() * s.alpha;
    [da.re, da.im, db.re, db.im]
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldTrajectory {
    pub t: Vec<f64>,
    pub states: Vec<MeanFieldState>,
}

fn integrator() -> Dopri5 {
    Dopri5 { rtol: 1e-9, atol: 1e-12, ..Dopri5::default() }
}

/// Integrates from [`MeanFieldState::initial`] up to `t_end`, returning the
/// accepted steps.
pub fn meanfield_evolve(n: f64, t_end: f64) -> Result<MeanFieldTrajectory> {
    if !(n >= 2.0) {
        return Err(invalid("n", format!("must be >= 2, got {n}")));
    }
    let sol = integrator().integrate(rhs, 0.0, MeanFieldState::initial(n).pack(), t_end)?;
    Ok(MeanFieldTrajectory { t: sol.t, states: sol.y.iter().map(MeanFieldState::unpack).collect() })
}

/// Time of the first maximum of `|β|²`.
pub fn switch_time(n: f64) -> Result<f64> {
    let horizon = 4.0 * switch_time_formula(n);
    let traj = meanfield_evolve(n, horizon)?;
    let b2: Vec<f64> = traj.states.iter().map(|s| s.beta.norm_sqr()).collect();
    let first = (1..b2.len() - 1)
        .find(|&i| b2[i] >= b2[i - 1] && b2[i] >= b2[i + 1])
        .ok_or_else(|| invalid("n", "no maximum of |β|² within the search horizon"))?;
    let (lo, hi) = (traj.t[first - 1], traj.t[first + 1]);
    let start = MeanFieldState::initial(n).pack();
    let mut failure = None;
    let m = golden_section_max(
        |t| match integrator().solve_to(rhs, 0.0, start, t) {
            Ok(y) => MeanFieldState::unpack(&y).beta.norm_sqr(),
            Err(e) => {
                failure.get_or_insert(e);
                f64::NEG_INFINITY
            }
        },
        lo,
        hi,
        1e-12 * hi,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(m.x),
    }
}

/// `ln(4N) / (2√N)`.
pub fn switch_time_formula(n: f64) -> f64 {
    (4.0 * n).ln() / (2.0 * n.sqrt())
}
