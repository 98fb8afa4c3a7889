use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh generation failed: {0}")]
    MeshGeneration(String),

    #[error("mesh topology error: {0}")]
    Topology(String),

    #[error("element {element}: {reason}")]
    Element { element: usize, reason: String },

    #[error("mesh file line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("quadrature order {requested} exceeds the maximum supported order {max}")]
    QuadratureOrder { requested: usize, max: usize },

    #[error("singular local mass matrix on element {0}")]
    SingularMass(usize),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("power iteration did not converge after {0} iterations")]
    PowerIteration(usize),

    #[error("non-finite state at step {step} (t = {time}); likely a CFL violation")]
    Divergence { step: usize, time: f64 },

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
