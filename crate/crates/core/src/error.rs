//! Error types shared across the simulator.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller passed a value outside the documented domain of an operation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An internal staging contract was violated (e.g. grids stepped out of
    /// lockstep, or an operation was called in the wrong field mode).
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// A frequency fell outside the band where the medium model is defined.
    #[error("frequency out of band: {0}")]
    OutOfBand(String),

    /// Spectrum band too narrow around the emitter line.
    #[error("spectral band too narrow: {0}")]
    BandTooNarrow(String),

    /// The amplitude-spectrum denominator collapsed below 1e-12.
    #[error("degenerate pole at omega = {omega}: |denominator| = {magnitude}")]
    DegeneratePole { omega: f64, magnitude: f64 },

    /// Inverse transform would wrap: |C| at the time-window edge exceeds 1e-3.
    #[error("time window too short: |C| = {edge_magnitude} at window edge t = {t_edge}")]
    WindowTooShort { t_edge: f64, edge_magnitude: f64 },

    /// A decay fit was requested on a series that never crosses 1/e.
    #[error("insufficient run: population never decays to 1/e (final = {final_population})")]
    InsufficientRun { final_population: f64 },

    /// Field magnitudes exceeded 1e12 x the initial scale mid-run.
    #[error("numeric blow-up at step {step}: max |field| = {max_abs}")]
    NumericBlowup { step: u64, max_abs: f64 },

    /// Config file failed to parse at the syntax level.
    #[error("config syntax error: {0}")]
    ConfigSyntax(String),

    /// Config parsed but violated semantic constraints; all violations listed.
    #[error("invalid config:\n{}", .0.join("\n"))]
    ConfigInvalid(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 config, 3 numeric abort, 4 oracle
    /// failure (reserved for the acceptance harness), 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConfigSyntax(_) | Error::ConfigInvalid(_) => 2,
            Error::NumericBlowup { .. } => 3,
            _ => 1,
        }
    }
}
