use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by graph manipulation, solving, certification and
/// perturbation analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("abscissa {z} is outside the domain of the graph")]
    DomainMiss { z: f64 },

    #[error("derivative requested at kink or segment abscissa {z}")]
    AtKink { z: f64 },

    #[error("incompatible domains: {0}")]
    IncompatibleDomain(String),

    #[error("invalid piece: {0}")]
    InvalidPiece(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is not closed at z = {z}: one-sided limit {limit} is not attained")]
    NotClosed { z: f64, limit: f64 },

    #[error("unsupported topology: {0}")]
    UnsupportedTopology(String),

    #[error("invalid component: {0}")]
    InvalidComponent(String),

    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("time {t} is outside [0, 1]")]
    OutOfRange { t: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("ambiguous link at t = {t}: several candidates near z = {z}")]
    AmbiguousLink { t: f64, z: f64 },

    #[error("no strong-metric-regularity certificate at t = {t}, z = {z}: {reason}")]
    OnFold { t: f64, z: f64, reason: String },

    #[error("(t = {t}, z = {z}) is not a solution (residual {residual})")]
    NotASolution { t: f64, z: f64, residual: f64 },

    #[error("radius ratio violated: kappa * b' = {product} > a' = {a}")]
    RatioViolation { product: f64, a: f64 },

    #[error("invalid radii: {0}")]
    InvalidRadii(String),

    #[error("empty input")]
    EmptyInput,

    #[error("perturbation gate violated: epsilon = {epsilon} >= b/4 = {gate}")]
    GateViolation { epsilon: f64, gate: f64 },

    #[error("localized inverse is empty at t = {t}")]
    LocalizationEmpty { t: f64 },

    #[error("localized inverse has {count} values at t = {t}")]
    LocalizationMultivalued { t: f64, count: usize },

    #[error("epsilon = {epsilon} is not below b_t = {b}")]
    EpsilonTooLarge { epsilon: f64, b: f64 },

    #[error("trajectories are not sampled on the same grid")]
    GridMismatch,

    #[error("window radius {rho} violates the window preconditions at t = {t}")]
    WindowTooWide { rho: f64, t: f64 },

    #[error("overlapping windows disagree at t = {t} by {gap}")]
    InconsistentOverlap { t: f64, gap: f64 },
}
