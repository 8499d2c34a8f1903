//! On-disk store of built kernels.
//!
//! File layout, all integers and floats little-endian:
//!
//! ```text
//! "FKRN" | u32 version = 1 | u32 N | u8 kind | 3 pad bytes | 4 × f64 params
//! | N⁴ × (f64 re, f64 im), row-major | u32 CRC32 (IEEE) of everything before
//! ```
//!
//! Parameters are quantized to multiples of 1e−12 before both lookup and
//! construction, so a hit is bit-identical to a rebuild of the same key.
//! Writes go to a temporary file in the target directory and are renamed into
//! place, so readers never see a partial file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::fourier_group::{build_kernel, EulerParams, Kernel, KernelParams};
use crate::grids::GridSpec;
use crate::linalg::CMatrix;
use crate::tolerances::PARAM_QUANTUM;

pub const MAGIC: &[u8; 4] = b"FKRN";
pub const VERSION: u32 = 1;
/// Bytes before the matrix body.
pub const HEADER_LEN: usize = 4 + 4 + 4 + 4 + 4 * 8;
/// Environment variable overriding the default cache directory.
pub const ENV_DIR: &str = "FKLENS_CACHE_DIR";

/// Round to the nearest multiple of 1e−12.
pub fn quantize(x: f64) -> f64 {
    (x / PARAM_QUANTUM).round() * PARAM_QUANTUM
}

fn quantize_params(p: KernelParams) -> KernelParams {
    let v = p.values().map(quantize);
    match p {
        KernelParams::RotationCart { .. } => KernelParams::RotationCart { theta: v[0] },
        KernelParams::Aniso { .. } => KernelParams::Aniso { phi: v[0] },
        KernelParams::Gyration { .. } => KernelParams::Gyration { psi: v[0] },
        KernelParams::Isotropic { .. } => KernelParams::Isotropic { omega: v[0] },
        KernelParams::RotationPolar { .. } => KernelParams::RotationPolar { theta: v[0] },
        KernelParams::U2Cart(_) => KernelParams::U2Cart(euler(v)),
        KernelParams::U2Polar(_) => KernelParams::U2Polar(euler(v)),
        KernelParams::MapU => KernelParams::MapU,
    }
}

fn euler(v: [f64; 4]) -> EulerParams {
    EulerParams { omega: v[0], phi: v[1], theta: v[2], psi: v[3] }
}

/// Grid size, kernel kind and quantized parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CacheKey {
    pub side: u32,
    pub params: KernelParams,
}

impl CacheKey {
    /// Key for a kernel on `spec`.
    ///
    /// Kinds that depend on per-ring offsets are only cacheable on grids with
    /// the default offsets, since the offsets are not part of the key.
    pub fn new(spec: &GridSpec, params: KernelParams) -> Result<Self> {
        if params.uses_ring_offsets() && !spec.has_default_offsets() {
            return domain(format!("{} kernels with custom ring offsets cannot be cached", params.name()));
        }
        if !params.values().iter().all(|x| x.is_finite()) {
            return domain("kernel parameters must be finite");
        }
        Ok(CacheKey { side: spec.side() as u32, params: quantize_params(params) })
    }

    pub fn spec(&self) -> Result<GridSpec> {
        GridSpec::from_side(self.side as usize)
    }

    /// File name unique to the key: kind, N and the quantized parameters in units of 1e−12.
    pub fn file_name(&self) -> String {
        let units: Vec<String> =
            self.params.values().iter().map(|x| format!("{}", (x / PARAM_QUANTUM).round() as i64)).collect();
        format!("{}_N{}_{}.fkrn", self.params.name(), self.side, units.join("_"))
    }
}

/// Default cache directory: `$FKLENS_CACHE_DIR`, else a `fklens` directory under the user cache.
pub fn default_dir() -> PathBuf {
    if let Some(d) = std::env::var_os(ENV_DIR).filter(|d| !d.is_empty()) {
        return PathBuf::from(d);
    }
    if let Some(d) = std::env::var_os("XDG_CACHE_HOME").filter(|d| !d.is_empty()) {
        return PathBuf::from(d).join("fklens");
    }
    if let Some(h) = std::env::var_os("HOME").filter(|d| !d.is_empty()) {
        return PathBuf::from(h).join(".cache").join("fklens");
    }
    std::env::temp_dir().join("fklens")
}

/// Serialize a kernel matrix under a key.
pub fn encode(key: &CacheKey, matrix: &CMatrix) -> Result<Vec<u8>> {
    let n2 = (key.side as usize).pow(2);
    if matrix.shape() != (n2, n2) {
        return Err(Error::Dimension(format!("matrix {:?} does not fit N = {}", matrix.shape(), key.side)));
    }
    let mut buf = Vec::with_capacity(HEADER_LEN + 16 * n2 * n2 + 4);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&key.side.to_le_bytes());
    buf.push(key.params.code());
    buf.extend_from_slice(&[0u8; 3]);
    for v in key.params.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for r in 0..n2 {
        for c in 0..n2 {
            let z = matrix[(r, c)];
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    let crc = crc32fast::hash(&buf);
    buf.extend_from_slice(&crc.to_le_bytes());
    Ok(buf)
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().expect("4 bytes"))
}

fn f64_at(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().expect("8 bytes"))
}

/// Parse a cache file. Checks magic, version, length and checksum.
pub fn decode(bytes: &[u8]) -> Result<(CacheKey, CMatrix)> {
    if bytes.len() < HEADER_LEN + 4 || &bytes[..4] != MAGIC {
        return Err(Error::CacheFormat("missing FKRN header".into()));
    }
    let version = u32_at(bytes, 4);
    if version != VERSION {
        return Err(Error::CacheVersion { found: version, supported: VERSION });
    }
    let side = u32_at(bytes, 8);
    let n2 = (side as usize).checked_mul(side as usize).filter(|&x| x > 0);
    let body = n2.and_then(|x| x.checked_mul(x)).and_then(|x| x.checked_mul(16));
    let Some(body) = body else {
        return Err(Error::CacheFormat(format!("invalid grid side {side}")));
    };
    if bytes.len() != HEADER_LEN + body + 4 {
        return Err(Error::CacheFormat(format!(
            "expected {} bytes for N = {side}, found {}",
            HEADER_LEN + body + 4,
            bytes.len()
        )));
    }
    let stored = u32_at(bytes, bytes.len() - 4);
    let computed = crc32fast::hash(&bytes[..bytes.len() - 4]);
    if stored != computed {
        return Err(Error::Checksum { stored, computed });
    }
    let values = [0, 1, 2, 3].map(|i| f64_at(bytes, 16 + 8 * i));
    let params = KernelParams::from_code(bytes[12], values)?;
    let n2 = side as usize * side as usize;
    let mut m = CMatrix::zeros(n2, n2);
    let mut at = HEADER_LEN;
    for r in 0..n2 {
        for c in 0..n2 {
            m[(r, c)] = Complex64::new(f64_at(bytes, at), f64_at(bytes, at + 8));
            at += 16;
        }
    }
    Ok((CacheKey { side, params }, m))
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Write a kernel atomically into `dir`; returns the final path.
pub fn store(key: &CacheKey, kernel: &Kernel, dir: &Path) -> Result<PathBuf> {
    if kernel.spec.side() as u32 != key.side || quantize_params(kernel.params) != key.params {
        return Err(Error::Dimension(format!(
            "kernel {} at N = {} does not match key {}",
            kernel.params.name(),
            kernel.spec.side(),
            key.file_name()
        )));
    }
    let bytes = encode(key, kernel.matrix())?;
    fs::create_dir_all(dir)?;
    let path = dir.join(key.file_name());
    let tmp = dir.join(format!(
        ".{}.{}.{}.tmp",
        key.file_name(),
        std::process::id(),
        TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    let written = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, &path)
    })();
    if let Err(e) = written {
        let _ = fs::remove_file(&tmp);
        return Err(e.into());
    }
    Ok(path)
}

/// Load the kernel for `key`, or `None` when no file exists.
///
/// The header must match the key and the matrix must pass the unitarity check.
pub fn load(key: &CacheKey, dir: &Path) -> Result<Option<Kernel>> {
    let path = dir.join(key.file_name());
    let bytes = match fs::read(&path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let (found, matrix) = decode(&bytes)?;
    if found != *key {
        return Err(Error::CacheFormat(format!(
            "{} holds {} at N = {}, not the requested kernel",
            path.display(),
            found.params.name(),
            found.side
        )));
    }
    Kernel::from_parts(key.spec()?, key.params, matrix).map(Some)
}

/// Like [`load`], but the stored matrix must equal a fresh build bit for bit.
/// Without this, entries written on another platform are accepted after the
/// unitarity re-check.
pub fn load_strict(key: &CacheKey, dir: &Path) -> Result<Option<Kernel>> {
    let Some(k) = load(key, dir)? else {
        return Ok(None);
    };
    let fresh = build_kernel(&key.spec()?, key.params)?;
    if fresh.matrix() != k.matrix() {
        return Err(Error::CacheFormat(format!("{} differs from a fresh build", dir.join(key.file_name()).display())));
    }
    Ok(Some(k))
}

/// Load the kernel if cached, otherwise build it from the quantized parameters and store it.
pub fn get_or_build(spec: &GridSpec, params: KernelParams, dir: &Path) -> Result<Kernel> {
    let key = CacheKey::new(spec, params)?;
    if let Some(k) = load(&key, dir)? {
        return Ok(k);
    }
    let kernel = build_kernel(spec, key.params)?;
    store(&key, &kernel, dir)?;
    Ok(kernel)
}
