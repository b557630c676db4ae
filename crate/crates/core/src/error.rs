use thiserror::Error;

/// Errors surfaced by the map, symbolic, diagram, graph and perturbation kernels.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("point {0} outside the map domain [0,1]")]
    Domain(f64),
    #[error("derivative order {order} exceeds smoothness floor {max}")]
    UnsupportedOrder { order: u32, max: u32 },
    #[error("piece declared monotone has a non-isolated derivative zero near {0}")]
    RepresentationInconsistency(f64),
    #[error("critical structure not resolved: {0}")]
    Resolution(String),
    #[error("combinatorial budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("word names branch {0} but the partition has {1} branches")]
    PartitionMismatch(usize, usize),
    #[error("word is not admissible")]
    Inadmissible,
    #[error("orbit point {0} hits a partition boundary")]
    BoundaryHit(f64),
    #[error("diagram construction: {0}")]
    Diagram(String),
    #[error("graph has no closed path")]
    NoCycle,
    #[error("vertex {0} lies on no cycle")]
    VertexOnNoCycle(usize),
    #[error("graph is not strongly connected")]
    NotStronglyConnected,
    #[error("no closed path of length {0}")]
    NoPathOfLength(usize),
    #[error("path is not closed at the requested vertex")]
    NotClosedAt,
    #[error("convergence check: {0}")]
    Convergence(String),
    #[error("perturbation geometry: {0}")]
    Geometry(String),
    #[error("amplitude {0:e} below representable precision; reduce l")]
    Precision(f64),
    #[error("expansion {0:e} exceeds the safe precision horizon; largest safe l is {1}")]
    Horizon(f64, u32),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown builtin map `{0}`")]
    UnknownBuiltin(String),
}

pub type Result<T> = std::result::Result<T, Error>;
