use thiserror::Error;

/// Errors raised by the attack model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: must satisfy {constraint} (got {value})")]
    InvalidParameter {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },

    #[error("click probability {0} exceeds 1; parameters are nonphysical")]
    NonphysicalClickRate(f64),

    #[error("QBER is undefined when the click probability is zero")]
    ZeroClickRate,

    #[error("sequence length must be at least {min} (got {got})")]
    InvalidLength { min: usize, got: usize },

    #[error("amplitude sequence has zero norm")]
    ZeroNorm,

    #[error("phase assignment does not fit the profile: {0}")]
    PhaseMismatch(String),

    #[error("enumerating 2^{0} padding assignments exceeds the 2^24 bound")]
    EnumerationTooLarge(usize),

    #[error("root equation has no solution when both E and D vanish")]
    NoRoot,

    #[error("QBER {qber} lies outside the collision-bound model (P_C0 = {collision})")]
    QberOutOfModel { qber: f64, collision: f64 },

    #[error("setup: {0}")]
    Setup(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check(
    ok: bool,
    name: &'static str,
    constraint: &'static str,
    value: f64,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            constraint,
            value,
        })
    }
}
