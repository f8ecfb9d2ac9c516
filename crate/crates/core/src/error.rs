use thiserror::Error;

/// Errors raised by parameter validation, the band and scattering layers,
/// and the lattice oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{field} out of range: {value}")]
    OutOfRange { field: &'static str, value: f64 },

    #[error("unsupported: {0}")]
    Unsupported(&'static str),

    #[error("energy {omega} lies in the band gap")]
    InBandGap { omega: f64 },

    #[error("energy {omega} lies beyond the outer band edge")]
    BeyondBandEdge { omega: f64 },

    #[error("energy {omega} sits on a band edge (sin k = 0)")]
    BandEdge { omega: f64 },

    #[error("energy {omega} does not belong to the {band} band")]
    WrongBand { omega: f64, band: &'static str },

    #[error("band is flat (t1 t2 = 0); momentum is undefined")]
    FlatBand,

    #[error("Bloch eigenvectors are degenerate at the gap-closing point")]
    DegenerateEigenvectors,

    #[error("winding number is undefined for a gapless chain (delta = 0)")]
    UndefinedWinding,

    #[error("effective potential is singular at delta_k = {delta_k}")]
    PotentialSingularity { delta_k: f64 },

    #[error("transfer matrix denominator vanishes (t1 - V2 = 0)")]
    DegenerateDenominator,

    #[error("emitter cell x1 = {x1} is not in the bulk of a {n_cells}-cell chain")]
    Placement { x1: i64, n_cells: usize },

    #[error("linear system is singular")]
    SingularSystem,

    #[error("norm drift {drift:e} exceeds tolerance")]
    IntegrationAccuracy { drift: f64 },

    #[error("chain too short: packet reached the chain end before clearing the emitter")]
    ChainTooShort,

    #[error("no grid point maps into the selected passband")]
    EmptyGrid,

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
