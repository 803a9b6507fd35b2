use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field size {got} does not match grid {n_alpha}x{n_beta}")]
    FieldSize {
        got: usize,
        n_alpha: usize,
        n_beta: usize,
    },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("non-finite value in field `{0}`")]
    NonFinite(&'static str),

    #[error("trim of {trim} rings leaves no points on a {n_alpha}x{n_beta} grid")]
    EmptyTrim {
        trim: usize,
        n_alpha: usize,
        n_beta: usize,
    },

    #[error("field `{name}` must be positive, found {value} at ({i}, {j})")]
    NonPositive {
        name: &'static str,
        value: f64,
        i: usize,
        j: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),

    #[error("frame is not orthonormal (deviation {0:.3e})")]
    NotOrthonormal(f64),

    #[error("frame integration step too coarse: orthonormality drift {drift:.3e} at ({i}, {j})")]
    StepTooCoarse { drift: f64, i: usize, j: usize },

    #[error("layer z = {z} passes through a center of curvature at ({i}, {j})")]
    DegenerateLayer { z: f64, i: usize, j: usize },

    #[error("seed class `{0}` has no elliptic linearization")]
    NotElliptic(&'static str),

    #[error("singular banded matrix at pivot {0}")]
    Singular(usize),

    #[error("ill-conditioned linearized operator (condition estimate {0:.3e})")]
    IllConditioned(f64),

    #[error("first integral drifted by {drift:.3e} (limit {limit:.1e})")]
    FirstIntegralDrift { drift: f64, limit: f64 },

    #[error("csv: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
