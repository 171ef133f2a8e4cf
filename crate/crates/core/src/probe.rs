//! Initial photonic states.

use crate::error::{Error, Result};

/// Coherent-squeezed plus vacuum-squeezed two-mode state with mean photon
/// number `n` split as `beta_r = sinh²r / n`, `beta_s = sinh²s / n` and the
/// remaining `alpha² = n (1 - beta_r - beta_s)` in the displacement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedParams {
    n: f64,
    beta_r: f64,
    beta_s: f64,
}

impl SqueezedParams {
    pub fn new(n: f64, beta_r: f64, beta_s: f64) -> Result<Self> {
        let ok = beta_r > 0.0 && beta_r < 1.0 && beta_s > 0.0 && beta_s < 1.0 && beta_r + beta_s <= 1.0;
        if !ok {
            return Err(Error::InvalidFractions { beta_r, beta_s });
        }
        if !(n > 0.0 && n.is_finite()) {
            return Err(crate::error::invalid("n", format!("must be finite and > 0, got {n}")));
        }
        Ok(Self { n, beta_r, beta_s })
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn beta_r(&self) -> f64 {
        self.beta_r
    }

    pub fn beta_s(&self) -> f64 {
        self.beta_s
    }

    pub fn alpha_squared(&self) -> f64 {
        (self.n * (1.0 - self.beta_r - self.beta_s)).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbeSpec {
    /// Coherent light with mean photon number `n`.
    Coherent(f64),
    /// `|n, n⟩`.
    TwinFock(usize),
    /// `(|N, 0⟩ + |0, N⟩)/√2`.
    Noon(usize),
    /// `|m, l⟩`.
    FockPair(usize, usize),
    Squeezed(SqueezedParams),
}

impl ProbeSpec {
    /// Mean number of photons sent through the sample.
    pub fn photons(&self) -> f64 {
        match *self {
            ProbeSpec::Coherent(n) => n,
            ProbeSpec::TwinFock(n) => 2.0 * n as f64,
            ProbeSpec::Noon(n) => n as f64,
            ProbeSpec::FockPair(m, l) => (m + l) as f64,
            ProbeSpec::Squeezed(p) => p.n(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProbeSpec::Coherent(_) => "coherent",
            ProbeSpec::TwinFock(_) => "tfs",
            ProbeSpec::Noon(_) => "noon",
            ProbeSpec::FockPair(..) => "fock_pair",
            ProbeSpec::Squeezed(_) => "squeezed",
        }
    }
}
