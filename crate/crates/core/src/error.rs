use std::fmt;

use thiserror::Error;

/// Which transform variable a strip or contour bound refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Omega,
    Eta,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::Omega => write!(f, "Im(omega)"),
            Axis::Eta => write!(f, "Im(eta)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("model rejected: {0}")]
    ModelRejected(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("pole of {function} at {at}")]
    Pole { function: &'static str, at: String },

    #[error("{function} overflows at {at}")]
    Overflow { function: &'static str, at: String },

    #[error("{function} underflows at {at}")]
    Underflow { function: &'static str, at: String },

    #[error("{what} did not converge (best estimate {estimate:e}, error estimate {error:e})")]
    NonConvergence {
        what: String,
        estimate: f64,
        error: f64,
    },

    #[error("no admissible contour: {0}")]
    EmptyStrip(String),

    #[error("{axis} = {value} lies outside ({lo}, {hi})")]
    OutsideStrip {
        axis: Axis,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("transform singular at {0}")]
    Singular(String),

    #[error("imaginary residue {residue:e} exceeds tolerance {tolerance:e}")]
    ImaginaryResidue { residue: f64, tolerance: f64 },

    #[error("sample weights too heavy-tailed: top 1% carry {share:.1}% of the mass")]
    VarianceExplosion { share: f64 },

    #[error("payoff undefined on {count} sample(s): {reason}")]
    UndefinedPayoff { count: usize, reason: String },

    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
