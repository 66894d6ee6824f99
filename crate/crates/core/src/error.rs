use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot decode image {}: {message}", path.display())]
    Decode { path: PathBuf, message: String },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(
        "frame {} is {found_width}x{found_height}, expected {width}x{height}",
        path.display()
    )]
    DimensionMismatch {
        path: PathBuf,
        width: u32,
        height: u32,
        found_width: u32,
        found_height: u32,
    },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("pixel ({x}, {y}) is not a vertex of the skeleton graph")]
    UnknownPixel { x: u32, y: u32 },

    #[error("script event #{event} at step {step}: {message}")]
    Generation {
        event: usize,
        step: usize,
        message: String,
    },

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input (files, parameters, scripts)
    /// as opposed to failures inside a processing stage.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::UnknownPixel { .. } | Error::Stage { .. })
    }
}
