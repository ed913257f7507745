use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("line {line}: duplicate record for ({country}, {indicator}, {year})")]
    DuplicateKey {
        line: u64,
        country: String,
        indicator: String,
        year: i32,
    },

    #[error("{0}")]
    Domain(String),

    #[error("labels contain a single class; the likelihood has no finite maximum")]
    SingleClass,

    #[error("separation detected after {iterations} iterations (last iterate {beta:?})")]
    Separation { beta: Vec<f64>, iterations: usize },

    #[error("predictors are perfectly collinear (r^2 = 1)")]
    Collinearity,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(line: u64, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    /// Wrap an error with the name of the pipeline stage that produced it.
    pub fn in_stage(self, stage: &'static str) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// Process exit code: 1 validation, 2 data, 3 fit.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::SingleClass | Error::Separation { .. } | Error::Collinearity => 3,
            Error::Stage { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}
