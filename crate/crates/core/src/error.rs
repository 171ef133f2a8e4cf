use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("poisson cutoff k_max = {k_max} leaves tail mass {tail:.3e} (limit 1e-9)")]
    CutoffTooSmall { k_max: usize, tail: f64 },

    #[error("transfer q = {q} outside [-{m}, {k}]")]
    IndexOutOfRange { k: usize, m: usize, q: i64 },

    #[error("input is not a density matrix: {0}")]
    NotAState(String),

    #[error("loss probability is zero, the loss bound diverges")]
    MuZero,

    #[error("squeezing fractions violate 0 < beta < 1, beta_r + beta_s <= 1 (beta_r = {beta_r}, beta_s = {beta_s})")]
    InvalidFractions { beta_r: f64, beta_s: f64 },

    #[error("infeasible protocol: {0}")]
    Infeasible(String),

    #[error("no crossing of the advantage ratio for eta in (0, 1] (ratio at eta = 1 is {ratio_at_one:.6})")]
    NoCrossing { ratio_at_one: f64 },

    #[error("advantage ratio is not monotone in eta near eta = {eta}")]
    NonMonotone { eta: f64 },

    #[error("ODE step control stalled at t = {t} (h = {h:.3e})")]
    OdeFailure { t: f64, h: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
