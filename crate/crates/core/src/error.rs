use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("particle number {0} is not supported (expected 1..=3)")]
    ParticleCount(usize),

    #[error("invalid lattice: {0}")]
    Lattice(String),

    #[error("basis dimension {dimension} exceeds the cap of {cap}")]
    DimensionCap { dimension: u128, cap: usize },

    #[error("site {site} lies outside the lattice -{half_length}..={half_length}")]
    SiteOutOfRange { site: i64, half_length: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid time grid: {0}")]
    Grid(String),

    #[error("state and operator live in different Fock bases")]
    BasisMismatch,

    #[error(
        "eigensolver failed on a {dimension}x{dimension} matrix (Frobenius norm {norm:.6e}): {reason}"
    )]
    Eigensolver {
        dimension: usize,
        norm: f64,
        reason: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Parameter(_)
            | Error::Grid(_)
            | Error::Lattice(_)
            | Error::ParticleCount(_)
            | Error::SiteOutOfRange { .. } => 2,
            Error::DimensionCap { .. } => 3,
            Error::Eigensolver { .. } => 4,
            Error::BasisMismatch | Error::Io(_) => 1,
        }
    }
}
