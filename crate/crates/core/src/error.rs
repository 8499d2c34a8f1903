use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Index or argument outside the valid range of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested size exceeds the range where double precision is trusted.
    #[error("precision limit exceeded: {0}")]
    Precision(String),

    /// Image or kernel sizes do not agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A kernel failed its unitarity check.
    #[error("unitarity check failed for {what}: defect {defect:.3e} exceeds {tol:.1e}")]
    NotUnitary { what: String, defect: f64, tol: f64 },

    /// A generator matrix is not Hermitian.
    #[error("generator {name} is not Hermitian: defect {defect:.3e}")]
    NotHermitian { name: String, defect: f64 },

    /// Malformed cache file or header that disagrees with the requested key.
    #[error("cache format error: {0}")]
    CacheFormat(String),

    #[error("unsupported cache file version {found} (supported: {supported})")]
    CacheVersion { found: u32, supported: u32 },

    #[error("cache checksum mismatch: stored {stored:08x}, computed {computed:08x}")]
    Checksum { stored: u32, computed: u32 },

    /// Unparseable text input (angles, spins, images).
    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
