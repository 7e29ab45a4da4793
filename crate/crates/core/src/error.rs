use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the model, data loaders and analyses.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    /// `1 + L·X` was not positive on the given day, so the leveraged fund is wiped out.
    #[error("fund wipeout on day {day}: 1 + {leverage}·{change} = {factor} is not positive")]
    Wipeout {
        day: usize,
        leverage: f64,
        change: f64,
        factor: f64,
    },

    #[error("mean squared daily change is zero; optimal leverage and its excess are undefined")]
    ZeroVolatility,

    #[error("unsupported fee order: leveraged fee r1 = {r1} is below unleveraged fee r0 = {r0}")]
    UnsupportedFeeOrder { r0: f64, r1: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("window of {window} days is longer than the series ({len} days)")]
    WindowTooLong { window: usize, len: usize },

    #[error("cannot open {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}, line {line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{}: {message}", path.display())]
    Invalid { path: PathBuf, message: String },

    #[error("empty chart: no series contains any point")]
    EmptyChart,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
