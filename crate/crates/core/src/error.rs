use alloc::string::String;
use core::fmt;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A vector or matrix had the wrong length.
    Dimension { expected: usize, got: usize },
    /// A family or tuning parameter is outside its admissible range.
    Parameter(String),
    /// Column `column` (0-based) has zero empirical norm.
    DegenerateColumn { column: usize },
    /// Column `column` violates ‖ψ_j‖_n ≤ 1.
    ColumnNorm { column: usize, norm: f64 },
    /// An exhaustive enumeration exceeded its configured cap.
    Capacity { what: &'static str, limit: usize, got: usize },
    /// The columns indexed by a support set are linearly dependent.
    RankDeficient { support: alloc::vec::Vec<usize> },
    /// An iterative method ran out of iterations.
    NoConvergence { what: &'static str, iterations: usize },
    /// Value outside the domain of a formula (e.g. α ∉ (0,1)).
    Domain(String),
    /// Malformed input (NaN, empty list, zero coefficient vector, ...).
    Input(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::Parameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::DegenerateColumn { column } => {
                write!(f, "column {} has zero norm", column + 1)
            }
            Error::ColumnNorm { column, norm } => write!(
                f,
                "column {} has empirical norm {norm} > 1 (enable rescaling to accept it)",
                column + 1
            ),
            Error::Capacity { what, limit, got } => {
                write!(f, "{what}: size {got} exceeds the cap of {limit}")
            }
            Error::RankDeficient { support } => {
                write!(f, "columns ")?;
                for (k, j) in support.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", j + 1)?;
                }
                write!(f, " are linearly dependent")
            }
            Error::NoConvergence { what, iterations } => {
                write!(f, "{what} did not converge after {iterations} iterations")
            }
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Input(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
