//! Fisher information of lossy two-mode photonic probes and the photon budgets
//! they need to beat classical light, plus a Dicke-model cavity simulator for
//! photon-number preparation and measurement.

// `!(x > 0.0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dicke;
pub mod error;
pub mod fisher;
pub mod fock;
pub mod ode;
pub mod optimize;
pub mod oracle;
pub mod par;
pub mod probe;
pub mod protocol;
pub mod special;

pub use error::{Error, Result};
pub use fock::{LossChannel, PhotonPMF};
pub use par::Execution;
