use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate contour: {0}")]
    DegenerateContour(String),

    #[error("node count mismatch: {0} vs {1}")]
    CountMismatch(usize, usize),

    #[error("series has a nonzero residue {0:e}; antiderivative is multivalued")]
    MultivaluedAntiderivative(f64),

    #[error("exterior series evaluated inside the unit disk (|z| = {0})")]
    OutsideDomain(f64),

    #[error("boundary samples: {0}")]
    BadSamples(String),

    #[error("inconsistent velocity distribution: {0}")]
    InconsistentDistribution(String),

    #[error("stagnation points leave the circle: |circulation| = {circulation} >= {limit}")]
    StagnationOffCircle { circulation: f64, limit: f64 },

    #[error("speed does not vanish at mapped stagnation angle (|V| = {0:e})")]
    SingularityMismatch(f64),

    #[error("quasisolution correction did not converge (residual {0:e})")]
    QuasisolutionDiverged(f64),

    #[error("contour does not close: gap {gap:e} exceeds {tolerance:e}")]
    NotClosed { gap: f64, tolerance: f64 },

    #[error("h-spline ansatz inconsistent: {0}")]
    AnsatzInconsistent(String),

    #[error("section gluing requires the degree-2 spline")]
    GluingUnsupportedInLinearMode,

    #[error("optimizer failed: {0}")]
    OptimizerFailed(String),

    #[error("missing field at {0}")]
    MissingField(String),

    #[error("bad value at {path}: {message}")]
    BadValue { path: String, message: String },

    #[error("{path}: {value} is not a power of two")]
    NotPowerOfTwo { path: String, value: usize },

    #[error("nothing to plot")]
    EmptyPlot,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv {path}: line {line}: {message}")]
    Csv {
        path: String,
        line: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
