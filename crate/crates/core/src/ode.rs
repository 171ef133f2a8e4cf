//! Adaptive Dormand–Prince 5(4) integration for small fixed-size systems.

use crate::error::{Error, Result};

/// Step-size control settings.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12, max_steps: 1_000_000 }
    }
}

/// Accepted steps of an integration, including the initial point.
#[derive(Debug, Clone)]
pub struct Solution<const D: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; D]>,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// 5th minus embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const D: usize>(y: &[f64; D], terms: &[(f64, &[f64; D])], h: f64) -> [f64; D] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..D {
            out[i] += h * c * k[i];
        }
    }
    out
}

impl Dopri5 {
    /// Integrates `dy/dt = f(t, y)` from `t0` to `t_end`, recording every
    /// accepted step.
    pub fn integrate<const D: usize, F>(&self, f: F, t0: f64, y0: [f64; D], t_end: f64) -> Result<Solution<D>>
    where
        F: Fn(f64, &[f64; D]) -> [f64; D],
    {
        let mut sol = Solution { t: vec![t0], y: vec![y0] };
        if t_end == t0 {
            return Ok(sol);
        }
        let dir = (t_end - t0).signum();
        let span = (t_end - t0).abs();
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let mut h = initial_step(&k1, &y, self, span) * dir;
        let mut steps = 0usize;
        while (t_end - t) * dir > 0.0 {
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::OdeFailure { t, h });
            }
            if (t + h - t_end) * dir > 0.0 {
                h = t_end - t;
            }
            let k2 = f(t + C2 * h, &axpy(&y, &[(A21, &k1)], h));
            let k3 = f(t + C3 * h, &axpy(&y, &[(A31, &k1), (A32, &k2)], h));
            let k4 = f(t + C4 * h, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
            let k5 = f(t + C5 * h, &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h));
            let k6 = f(t + h, &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h));
            let y_new = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
            let k7 = f(t + h, &y_new);

            let mut err = 0.0;
            for i in 0..D {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err += (e / sc).powi(2);
            }
            let err = (err / D as f64).sqrt();

            if err <= 1.0 {
                t += h;
                y = y_new;
                k1 = k7;
                sol.t.push(t);
                sol.y.push(y);
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= if err <= 1.0 { factor } else { factor.min(1.0) };
            if h.abs() <= 1e-14 * t.abs().max(span) {
                return Err(Error::OdeFailure { t, h });
            }
        }
        Ok(sol)
    }

    /// Final state only.
    pub fn solve_to<const D: usize, F>(&self, f: F, t0: f64, y0: [f64; D], t_end: f64) -> Result<[f64; D]>
    where
        F: Fn(f64, &[f64; D]) -> [f64; D],
    {
        let sol = self.integrate(f, t0, y0, t_end)?;
        Ok(*sol.y.last().expect("solution holds the initial point"))
    }
}

fn initial_step<const D: usize>(f0: &[f64; D], y0: &[f64; D], opts: &Dopri5, span: f64) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..D {
        let sc = opts.atol + opts.rtol * y0[i].abs();
        d0 += (y0[i] / sc).powi(2);
        d1 += (f0[i] / sc).powi(2);
    }
    let (d0, d1) = ((d0 / D as f64).sqrt(), (d1 / D as f64).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(span)
}
