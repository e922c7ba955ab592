use core::fmt;

use crate::model::Field;

pub type Result<T> = core::result::Result<T, GameError>;

/// Errors raised by the solver.
#[derive(Debug, Clone, PartialEq)]
pub enum GameError {
    /// A parameter lies outside its admissible interval.
    Domain { field: Field, value: f64, bound: &'static str },
    /// An operation defined only for θ_A = θ_B was called with distinct abilities.
    Asymmetry { theta_a: f64, theta_b: f64 },
    /// A closed form has a (numerically) zero denominator.
    Singular { quantity: &'static str, denominator: f64 },
    /// The sign pattern of a deviation gap over the search grid is not a single crossing.
    NonMonotone { crossings: usize },
    /// A sweep or check specification is malformed.
    Spec(alloc::string::String),
}

impl fmt::Display for GameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameError::Domain { field, value, bound } => {
                write!(f, "domain error: {} = {} violates {}", field.name(), value, bound)
            }
            GameError::Asymmetry { theta_a, theta_b } => {
                write!(f, "asymmetry error: requires theta_a == theta_b (got {} and {})", theta_a, theta_b)
            }
            GameError::Singular { quantity, denominator } => {
                write!(f, "singular error: {} has denominator {} (no finite value)", quantity, denominator)
            }
            GameError::NonMonotone { crossings } => {
                write!(f, "non-monotone error: deviation gap changes sign {} times on the search grid", crossings)
            }
            GameError::Spec(msg) => write!(f, "spec error: {}", msg),
        }
    }
}

impl core::error::Error for GameError {}
