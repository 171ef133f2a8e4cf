//! Where quantum probes stop beating classical light as detector efficiency
//! drops and per-test overhead grows.

use super::{classical_bound, j_of_t, n_abs, optimize_nu, Budget};
use crate::error::{Error, Result};
use crate::fock::LossChannel;
use crate::optimize::{bisect, linspace, logspace, scan_then_golden, Maximum};
use crate::par::{map_with, Execution};

/// `ν F` of the optimized protocol over the classical bound `T N_abs / γ`.
pub fn advantage_ratio<F>(n: f64, budget: &Budget, gamma: f64, fisher: &F) -> Result<f64>
where
    F: Fn(&LossChannel) -> f64 + ?Sized,
{
    let r = optimize_nu(n, budget, gamma, fisher)?;
    Ok(r.accumulated / classical_bound(budget.t_total, gamma, budget.n_abs_max))
}

/// Absorbed-photon budget at which the ideal (`η = 1`, `t_ext = 0`) advantage
/// ratio of an `n`-photon probe drops through 1, bracketed in `[lo, hi]`.
pub fn crossing_n_abs<F>(n: f64, gamma: f64, t_total: f64, fisher: &F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(&LossChannel) -> f64 + ?Sized,
{
    let ratio = |x: f64| {
        Budget::ideal(t_total, x)
            .and_then(|b| advantage_ratio(n, &b, gamma, fisher))
            .map(|r| r - 1.0)
            .unwrap_or(f64::NAN)
    };
    bisect(ratio, lo, hi, tol)
        .ok_or_else(|| Error::Infeasible(format!("advantage ratio does not cross 1 for N_abs in [{lo}, {hi}]")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryOptions {
    /// Values of `γ t_ext`.
    pub gamma_t_ext: Vec<f64>,
    /// Bisection tolerance in `η`.
    pub tol: f64,
    pub gamma: f64,
    pub t_total: f64,
    pub execution: Execution,
}

impl Default for BoundaryOptions {
    fn default() -> Self {
        Self {
            gamma_t_ext: logspace(1e-3, 1.0, 200),
            tol: 1e-6,
            gamma: 1.0,
            t_total: 10.0,
            execution: Execution::available(),
        }
    }
}

/// `η` at which the advantage ratio equals 1 for a given `γ t_ext`; `None`
/// when no `η ≤ 1` reaches it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub gamma_t_ext: f64,
    pub eta: Option<f64>,
}

impl BoundaryPoint {
    pub fn one_minus_eta(&self) -> f64 {
        self.eta.map_or(f64::NAN, |e| 1.0 - e)
    }
}

/// Locates the root of an increasing function of `η` on `(0, 1]`. The
/// function is sampled on 16 points first; a decrease larger than rounding
/// fails with [`Error::NonMonotone`].
fn eta_crossing(f: impl Fn(f64) -> Result<f64>, tol: f64) -> Result<f64> {
    let etas = linspace(1.0 / 16.0, 1.0, 16);
    let mut values = Vec::with_capacity(etas.len());
    for &eta in &etas {
        values.push(f(eta)?);
    }
    for (k, w) in values.windows(2).enumerate() {
        if w[1] < w[0] * (1.0 - 1e-9) - 1e-12 {
            return Err(Error::NonMonotone { eta: etas[k + 1] });
        }
    }
    let at_one = *values.last().expect("16 samples");
    if at_one < 1.0 {
        return Err(Error::NoCrossing { ratio_at_one: at_one });
    }
    let first = values.iter().position(|&v| v >= 1.0).expect("at least the last sample");
    let lo = if first == 0 { 1e-12 } else { etas[first - 1] };
    let hi = etas[first];
    bisect(|eta| f(eta).map(|v| v - 1.0).unwrap_or(f64::NAN), lo, hi, tol)
        .ok_or(Error::NoCrossing { ratio_at_one: at_one })
}

fn collect(points: Vec<(f64, Result<f64>)>) -> Result<Vec<BoundaryPoint>> {
    points
        .into_iter()
        .map(|(x, r)| match r {
            Ok(eta) => Ok(BoundaryPoint { gamma_t_ext: x, eta: Some(eta) }),
            Err(Error::NoCrossing { .. }) => Ok(BoundaryPoint { gamma_t_ext: x, eta: None }),
            Err(e) => Err(e),
        })
        .collect()
}

/// Advantage boundary of an `n`-photon probe at absorbed budget `n_abs`: for
/// every `γ t_ext` the efficiency at which the optimized protocol exactly
/// matches the classical bound.
pub fn advantage_boundary<F>(n: f64, n_abs: f64, fisher: &F, options: &BoundaryOptions) -> Result<Vec<BoundaryPoint>>
where
    F: Fn(&LossChannel) -> f64 + Sync + ?Sized,
{
    let gamma = options.gamma;
    let points = map_with(options.execution, &options.gamma_t_ext, |&x| {
        let ratio = |eta: f64| {
            let b = Budget::new(options.t_total, n_abs, x / gamma, eta)?;
            advantage_ratio(n, &b, gamma, fisher)
        };
        (x, eta_crossing(ratio, options.tol))
    });
    collect(points)
}

/// Which ceiling on the advantage ratio to use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneralBound {
    /// `max_t J(t)`, valid for any probe.
    Unconstrained,
    /// `J(t_N)` with `t_N` the time at which `n` photons absorb `n_abs`.
    FiniteN { n: f64, n_abs: f64 },
}

/// Maximum of `J(t)` over `γ t ∈ [1e-6, 50]`.
pub fn max_j(gamma: f64, eta: f64, t_ext: f64) -> Maximum {
    let grid = logspace(1e-6, 50.0, 128);
    let m = scan_then_golden(|x| j_of_t(x / gamma, gamma, eta, t_ext), &grid, 1e-10);
    Maximum { x: m.x / gamma, value: m.value }
}

/// Efficiency below which the chosen ceiling drops under 1, so that no probe
/// can beat classical light.
pub fn general_boundary(bound: GeneralBound, options: &BoundaryOptions) -> Result<Vec<BoundaryPoint>> {
    let gamma = options.gamma;
    if let GeneralBound::FiniteN { n, n_abs: budget } = bound {
        if !(budget < n) {
            return Err(Error::Infeasible(format!("budget N_abs = {budget} needs N > N_abs, got N = {n}")));
        }
    }
    let points = map_with(options.execution, &options.gamma_t_ext, |&x| {
        let t_ext = x / gamma;
        let ceiling = |eta: f64| -> Result<f64> {
            Ok(match bound {
                GeneralBound::Unconstrained => max_j(gamma, eta, t_ext).value,
                GeneralBound::FiniteN { n, n_abs: budget } => {
                    let t = -(-budget / n).ln_1p() / gamma;
                    debug_assert!((n_abs(n, gamma, t) - budget).abs() < 1e-9 * budget.max(1.0));
                    j_of_t(t, gamma, eta, t_ext)
                }
            })
        };
        (x, eta_crossing(ceiling, options.tol))
    });
    collect(points)
}
