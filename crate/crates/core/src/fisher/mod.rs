//! Per-test Fisher information of each probe family.
//!
//! Values are Fisher information with respect to the coupling `g`, so they
//! carry units of time².

mod closed;
mod measurement;
mod nrm;
mod squeezed;

pub use closed::{
    g_function, qfi_coherent, qfi_fock_pair, qfi_noon, qfi_noon_poisson, qfi_tfs_exact, qfi_tfs_poisson,
    qfi_upper_bound,
};
pub use measurement::{cfi_of_l, OptimalMeasurement};
pub use nrm::{
    cfi_nrm, cfi_nrm_closed_form, cfi_nrm_optimal, cfi_nrm_poisson, cfi_nrm_poisson_closed_form, cfi_nrm_with,
    Derivative, NrmOptimum, PoissonNrmOptions,
};
pub use squeezed::{cfi_squeezed, cfi_squeezed_poisson, optimize_squeezed, SqueezedOptimum};

use crate::fock::LossChannel;
use crate::probe::ProbeSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FisherKind {
    Quantum,
    Classical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherResult {
    pub value: f64,
    pub kind: FisherKind,
    pub probe: ProbeSpec,
    pub channel: LossChannel,
    /// Coupling at which the value was evaluated. QFI values do not depend on
    /// it and report 0.
    pub g: f64,
}

impl FisherResult {
    pub(crate) fn qfi(value: f64, probe: ProbeSpec, channel: &LossChannel) -> Self {
        Self { value, kind: FisherKind::Quantum, probe, channel: *channel, g: 0.0 }
    }

    pub(crate) fn cfi(value: f64, probe: ProbeSpec, channel: &LossChannel, g: f64) -> Self {
        Self { value, kind: FisherKind::Classical, probe, channel: *channel, g }
    }
}
