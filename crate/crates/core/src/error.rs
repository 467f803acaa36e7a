use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed WAV file: {0}")]
    MalformedFile(String),
    #[error("unsupported WAV format: {0}")]
    UnsupportedFormat(String),
    #[error("I/O failure: {0}")]
    Io(#[from] io::Error),
    #[error("sample rate {0} Hz is below the 2000 Hz minimum")]
    RateTooLow(u32),
    #[error("input contains no samples")]
    EmptyInput,
    #[error("invalid frame set: {0}")]
    InvalidFrameSet(String),
    #[error("bad length: {0}")]
    BadLength(String),
    #[error("band skipped: threshold {threshold:e}, coefficient count {count}")]
    SkippedBand { threshold: f64, count: usize },
    #[error("decoy has {decoy} samples but host needs {host}")]
    DecoyTooShort { host: usize, decoy: usize },
    #[error("sidecar does not match clip: {0}")]
    SidecarMismatch(String),
    #[error("cannot parse sidecar: {0}")]
    SidecarParse(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid attack: {0}")]
    InvalidAttack(String),
    #[error("{0} output samples would clip")]
    Clipped(usize),
}
