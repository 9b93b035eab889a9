use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("argument {value} outside the domain {domain}")]
    Domain { value: f64, domain: &'static str },

    /// Element `index` is not strictly to the right of element `index - 1`.
    #[error("element positions are not strictly increasing at index {index}")]
    MonotonicityViolation { index: usize },

    #[error("degenerate geometry: antenna-terminal distance {distance:e} m is below {min:e} m")]
    DegenerateGeometry { distance: f64, min: f64 },

    #[error("channel matrix columns are already normalized")]
    AlreadyNormalized,

    #[error("channel matrix must be column-normalized first")]
    NotNormalized,

    #[error("unsupported shape: {rows}x{cols} (need rows >= cols >= 1)")]
    UnsupportedShape { rows: usize, cols: usize },

    #[error("matrix is numerically singular (condition {condition:e})")]
    SingularMatrix { condition: f64 },

    #[error("cell {coords}: {source}")]
    Cell {
        coords: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn at_cell(self, coords: impl Into<String>) -> Self {
        Error::Cell {
            coords: coords.into(),
            source: Box::new(self),
        }
    }

    /// True for errors that signal a configuration problem rather than a
    /// failure during computation.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::InvalidParameter { .. }
            | Error::Domain { .. }
            | Error::MonotonicityViolation { .. }
            | Error::Json(_) => true,
            Error::Cell { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}
