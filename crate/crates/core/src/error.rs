use thiserror::Error;

/// Errors produced by state construction, channel application and the analytic maps.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("`{name}` = {value} is outside its domain {domain}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("subsystem index {index} is invalid for a register of {count} subsystems")]
    InvalidSubsystem { index: usize, count: usize },

    #[error("operator is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("post-selection has zero success probability")]
    DegeneratePostSelection,

    #[error("no distillable window: r_even = {r_even} does not exceed r_odd = {r_odd}")]
    NoDistillableWindow { r_even: f64, r_odd: f64 },

    #[error("register of {qubits} qubits exceeds the dense-simulation limit of {limit}")]
    RegisterTooLarge { qubits: usize, limit: usize },

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit_interval_open(name: &'static str, value: f64) -> Result<()> {
    if (0.0..1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            domain: "[0, 1)",
        })
    }
}

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            domain: "[0, 1]",
        })
    }
}
