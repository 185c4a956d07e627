use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate look-at: {0}")]
    DegenerateLookAt(&'static str),

    #[error("invalid camera: {0}")]
    InvalidCamera(String),

    #[error("dimension mismatch: expected {expected_w}x{expected_h}, found {found_w}x{found_h}")]
    DimensionMismatch {
        expected_w: usize,
        expected_h: usize,
        found_w: usize,
        found_h: usize,
    },

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("channel-count mismatch: header claims {claimed} channels, payload holds {actual}")]
    ChannelMismatch { claimed: usize, actual: usize },

    #[error("unexpected raster kind: expected {expected}, found {found}")]
    WrongKind { expected: &'static str, found: String },

    #[error("truncated payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },

    #[error("trailing data after payload: {extra} extra bytes")]
    TrailingData { extra: usize },

    #[error("non-finite value at element {0}")]
    NonFinite(usize),

    #[error("unsupported PLY element(s): {0}")]
    UnsupportedPlyElement(String),

    #[error("malformed PLY: {0}")]
    MalformedPly(String),

    #[error("malformed OBJ at line {line}: {msg}")]
    MalformedObj { line: usize, msg: String },

    #[error("malformed manifest: {0}")]
    MalformedManifest(String),

    #[error("colors present on {colors} of {points} points")]
    ColorCountMismatch { colors: usize, points: usize },

    #[error("missing view {0}")]
    MissingView(usize),

    #[error("depth and texture masks differ in view {view} ({pixels} pixels)")]
    MaskMismatch { view: usize, pixels: usize },

    #[error("expected {expected} views, found {found}")]
    ViewCount { expected: usize, found: usize },

    #[error("empty point cloud")]
    EmptyCloud,

    #[error("mesh has zero surface area")]
    ZeroAreaMesh,

    #[error("degenerate correspondence covariance (rank < 2)")]
    DegenerateCovariance,

    #[error("too few points: need at least {needed}, found {found}")]
    TooFewPoints { needed: usize, found: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("image: {0}")]
    Image(#[from] image::ImageError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Coarse failure class, used by the CLI to pick an exit code.
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io { .. } | Error::MissingView(_) => ErrorClass::Input,
            Error::DegenerateLookAt(_)
            | Error::EmptyCloud
            | Error::ZeroAreaMesh
            | Error::DegenerateCovariance
            | Error::TooFewPoints { .. }
            | Error::NonFinite(_) => ErrorClass::Numeric,
            Error::InvalidConfig(_) | Error::InvalidCamera(_) => ErrorClass::Input,
            _ => ErrorClass::Format,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Format,
    Numeric,
}
