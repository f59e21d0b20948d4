use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("mesh topology: {0}")]
    Topology(String),
    #[error("mesh geometry: {0}")]
    Geometry(String),
    #[error("singular local system: {0}")]
    Singular(String),
    #[error("linear solver failure: {0}")]
    Solver(String),
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
