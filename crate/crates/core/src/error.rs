use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Data,
    Config,
    Numeric,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Data => 1,
            ErrorKind::Config => 2,
            ErrorKind::Numeric => 3,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,

    #[error("non-finite value {0} in sample")]
    NonFinite(f64),

    #[error("censor flags ({flags}) do not match values ({values})")]
    CensorLength { values: usize, flags: usize },

    #[error("quantile level out of range: {0}")]
    LevelOutOfRange(f64),

    #[error("cut-point count must be positive")]
    ZeroCutpoints,

    #[error("validity range degenerate: K = {0}, need K >= 11")]
    DegenerateRange(usize),

    #[error("outside interpolation support: x = {x} not in [{low}, {high}]")]
    OutsideSupport { x: f64, low: f64, high: f64 },

    #[error("grid point {x} outside valid range [{low}, {high}]")]
    OutsideValidRange { x: f64, low: f64, high: f64 },

    #[error("evaluation grid must be strictly increasing (at {0})")]
    UnorderedGrid(f64),

    #[error("interpolation knots must be nondecreasing in x")]
    UnorderedKnots,

    #[error("relative scale undefined at nonpositive outcome {0}")]
    NonPositiveOutcome(f64),

    #[error("relative scale requires an absolute-scale curve")]
    AlreadyRelative,

    #[error("empty tail at threshold {0}")]
    EmptyTail(f64),

    #[error("ratio of means undefined: control mean is zero")]
    RomUndefined,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unsupported simulation setup: {0}")]
    Unsupported(String),

    #[error("missing required column `{0}`")]
    MissingColumn(String),

    #[error("line {line}: {message}")]
    Row { line: u64, message: String },

    #[error("{0}")]
    Data(String),

    #[error("unknown format `{0}`")]
    UnknownFormat(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{path}: {source}")]
    InFile { path: String, source: Box<Error> },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            EmptySample | NonFinite(_) | CensorLength { .. } | MissingColumn(_) | Row { .. }
            | Data(_) | Csv(_) | Json(_) | Io(_) => ErrorKind::Data,
            Config(_) | Unsupported(_) | UnknownFormat(_) | ZeroCutpoints | UnorderedGrid(_)
            | UnorderedKnots => ErrorKind::Config,
            LevelOutOfRange(_)
            | DegenerateRange(_)
            | OutsideSupport { .. }
            | OutsideValidRange { .. }
            | NonPositiveOutcome(_)
            | AlreadyRelative
            | EmptyTail(_)
            | RomUndefined => ErrorKind::Numeric,
            InFile { source, .. } => source.kind(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.kind().exit_code()
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
