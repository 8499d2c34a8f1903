//! The `fklens` command-line tool.

pub mod image_io;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use num_complex::Complex64;

use crate::cart_basis::{lambda_table, psi_square_table};
use crate::error::{Error, Result};
use crate::fourier_group::{build_kernel, EulerParams, KernelParams};
use crate::gridmap::{cart_to_polar_with, polar_to_cart_with, CartImage, PolarImage};
use crate::grids::GridSpec;
use crate::kernel_cache::{self, get_or_build, CacheKey, HEADER_LEN};
use crate::linalg::{self, CMatrix};
use crate::polar_basis::polar_table;
use crate::specfun::{AngleRad, HalfInt};
use crate::verify::{run_suite, Status, VerifyOptions, VERIFY_MAX_TWICE_J};
use image_io::{read_image, ImageFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DIMENSION: i32 = 3;
pub const EXIT_FORMAT: i32 = 4;
pub const EXIT_CACHE: i32 = 5;
pub const EXIT_IO: i32 = 6;
pub const EXIT_NUMERICAL: i32 = 7;

const EXIT_CODES_HELP: &str = "\
Exit codes:
  0  success
  1  verification found a failing invariant
  2  usage error or argument out of range
  3  dimension mismatch (image size, --j)
  4  unreadable or unknown image format
  5  kernel cache error (bad header, version, checksum)
  6  I/O error
  7  numerical check failed (unitarity, precision limit)

Angles accept a 'rad' or 'deg' suffix (default radians). Spins accept '3/2' or '1.5'.
Pixel (row r, column c) of an image is the grid point (c - j, j - r).
Kernels are cached in --cache, else $FKLENS_CACHE_DIR, else the user cache directory.";

#[derive(Parser, Debug)]
#[command(name = "fklens", version, about = "Unitary Fourier-Kravchuk transforms of square and polar pixel images", after_help = EXIT_CODES_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Apply a transform to an image.
    Transform(TransformArgs),
    /// Write a basis table as CSV (row, col, re, im).
    Basis(BasisArgs),
    /// Run the invariant and oracle suite.
    Verify(VerifyArgs),
    /// Time kernel construction and application.
    Bench(BenchArgs),
}

fn parse_angle(s: &str) -> std::result::Result<f64, String> {
    s.parse::<AngleRad>().map(AngleRad::value).map_err(|e| e.to_string())
}

fn parse_spin(s: &str) -> std::result::Result<HalfInt, String> {
    let j: HalfInt = s.parse().map_err(|e: Error| e.to_string())?;
    if j.twice() < 0 {
        return Err(format!("spin must be non-negative, got {j}"));
    }
    Ok(j)
}

#[derive(Args, Debug)]
pub struct IoArgs {
    /// Input image (.pgm, .csv).
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output CSV (complex Cartesian or polar).
    #[arg(long)]
    pub out: PathBuf,
    /// Also write a magnitude preview PGM (lossy; never use as input to further transforms).
    #[arg(long)]
    pub mag: Option<PathBuf>,
    /// Kernel cache directory.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Build kernels without reading or writing the cache.
    #[arg(long, conflicts_with = "cache")]
    pub no_cache: bool,
    /// Expected spin j of the image (N = 2j + 1).
    #[arg(long, value_parser = parse_spin)]
    pub j: Option<HalfInt>,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    #[command(subcommand)]
    pub op: TransformOp,
}

#[derive(Subcommand, Debug)]
pub enum TransformOp {
    /// Rotate by θ.
    Rotate {
        #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
        theta: f64,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Gyrate by ψ.
    Gyrate {
        #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
        psi: f64,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Isotropic fractional Fourier-Kravchuk transform by ω.
    Frft {
        #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
        omega: f64,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Anisotropic fractional Fourier-Kravchuk transform by φ.
    Aniso {
        #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
        phi: f64,
        #[command(flatten)]
        io: IoArgs,
    },
    /// General U(2) element (ω; φ, θ, ψ).
    U2 {
        #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
        omega: f64,
        #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
        phi: f64,
        #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
        psi: f64,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Map between the Cartesian and polar screens.
    Map {
        #[arg(long)]
        to: Screen,
        #[command(flatten)]
        io: IoArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Screen {
    Polar,
    Cart,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BasisKind {
    /// Kravchuk modes Ψ□ (columns n_x major).
    Cart,
    /// Laguerre-Kravchuk functions Λ□ (columns in MA order).
    Ma,
    /// Polar wavefunctions Ψ° (columns in MA order).
    Polar,
}

#[derive(Args, Debug)]
pub struct BasisArgs {
    #[arg(long, value_enum)]
    pub kind: BasisKind,
    #[arg(long, value_parser = parse_spin)]
    pub j: HalfInt,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_parser = parse_spin, default_value = "2")]
    pub j: HalfInt,
    /// Perturb the rotation kernel so the suite must fail.
    #[arg(long, hide = true)]
    pub perturb: bool,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Comma-separated grid sides.
    #[arg(long, value_delimiter = ',', default_value = "9,17,32")]
    pub n: Vec<usize>,
    /// Applications timed per size.
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) => EXIT_USAGE,
        Error::Dimension(_) => EXIT_DIMENSION,
        Error::Parse(_) => EXIT_FORMAT,
        Error::CacheFormat(_) | Error::CacheVersion { .. } | Error::Checksum { .. } => EXIT_CACHE,
        Error::Io(_) => EXIT_IO,
        Error::Precision(_) | Error::NotUnitary { .. } | Error::NotHermitian { .. } => EXIT_NUMERICAL,
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Transform(t) => cmd_transform(t.op),
        Command::Basis(b) => cmd_basis(&b),
        Command::Verify(v) => cmd_verify(&v),
        Command::Bench(b) => cmd_bench(&b),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fklens: {e}");
            exit_code(&e)
        }
    }
}

enum Loaded {
    Cart(CartImage),
    Polar(PolarImage),
}

fn load_input(io: &IoArgs) -> Result<Loaded> {
    let img = match read_image(&io.input)? {
        ImageFile::Cartesian(c) => Loaded::Cart(c),
        ImageFile::Polar(p) => Loaded::Polar(p),
    };
    if let Some(j) = io.j {
        let found = match &img {
            Loaded::Cart(c) => c.spec.j(),
            Loaded::Polar(p) => p.spec.j(),
        };
        if found != j {
            return Err(Error::Dimension(format!("image has j = {found}, --j asks for {j}")));
        }
    }
    Ok(img)
}

fn cache_dir(io: &IoArgs) -> Option<PathBuf> {
    if io.no_cache {
        None
    } else {
        Some(io.cache.clone().unwrap_or_else(kernel_cache::default_dir))
    }
}

fn kernel(spec: &GridSpec, params: KernelParams, dir: Option<&Path>) -> Result<CMatrix> {
    Ok(match dir {
        Some(d) => get_or_build(spec, params, d)?.into_matrix(),
        None => build_kernel(spec, params)?.into_matrix(),
    })
}

fn write_cart(io: &IoArgs, img: &CartImage) -> Result<()> {
    std::fs::write(&io.out, image_io::cart_csv(img)?)?;
    if let Some(m) = &io.mag {
        std::fs::write(m, image_io::cart_magnitude_pgm(img)?)?;
    }
    Ok(())
}

fn write_polar(io: &IoArgs, img: &PolarImage) -> Result<()> {
    std::fs::write(&io.out, image_io::polar_csv(img))?;
    if let Some(m) = &io.mag {
        std::fs::write(m, image_io::polar_magnitude_pgm(img))?;
    }
    Ok(())
}

fn check_out_path(io: &IoArgs) -> Result<()> {
    let ext = io.out.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    if ext == "pgm" {
        return Err(Error::Domain("--out must be a CSV file; use --mag for a PGM preview".into()));
    }
    Ok(())
}

pub fn cmd_transform(op: TransformOp) -> Result<i32> {
    let (params, io) = match op {
        TransformOp::Map { to, io } => return cmd_map(to, &io),
        TransformOp::Rotate { theta, io } => (KernelParams::RotationCart { theta }, io),
        TransformOp::Gyrate { psi, io } => (KernelParams::Gyration { psi }, io),
        TransformOp::Frft { omega, io } => (KernelParams::Isotropic { omega }, io),
        TransformOp::Aniso { phi, io } => (KernelParams::Aniso { phi }, io),
        TransformOp::U2 { omega, phi, theta, psi, io } => {
            (KernelParams::U2Cart(EulerParams::new(omega, phi, theta, psi)?), io)
        }
    };
    check_out_path(&io)?;
    let dir = cache_dir(&io);
    match load_input(&io)? {
        Loaded::Cart(img) => {
            let k = kernel(&img.spec, params, dir.as_deref())?;
            write_cart(&io, &CartImage::new(img.spec.clone(), &k * &img.pixels)?)?;
        }
        Loaded::Polar(img) => {
            let spec = img.spec.clone();
            let k = match params {
                KernelParams::RotationCart { theta } => {
                    kernel(&spec, KernelParams::RotationPolar { theta }, dir.as_deref())?
                }
                KernelParams::U2Cart(e) => kernel(&spec, KernelParams::U2Polar(e), dir.as_deref())?,
                other => {
                    let u = kernel(&spec, KernelParams::MapU, dir.as_deref())?;
                    let c = kernel(&spec, other, dir.as_deref())?;
                    linalg::mul_adjoint(&linalg::mul(&u, &c), &u)
                }
            };
            write_polar(&io, &PolarImage::new(spec, &k * &img.pixels)?)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_map(to: Screen, io: &IoArgs) -> Result<i32> {
    check_out_path(io)?;
    let dir = cache_dir(io);
    let img = load_input(io)?;
    let spec = match &img {
        Loaded::Cart(c) => c.spec.clone(),
        Loaded::Polar(p) => p.spec.clone(),
    };
    let u = crate::fourier_group::Kernel::from_parts(
        spec.clone(),
        KernelParams::MapU,
        kernel(&spec, KernelParams::MapU, dir.as_deref())?,
    )?;
    match (to, img) {
        (Screen::Polar, Loaded::Cart(c)) => write_polar(io, &cart_to_polar_with(&u, &c)?)?,
        (Screen::Cart, Loaded::Polar(p)) => write_cart(io, &polar_to_cart_with(&u, &p)?)?,
        (Screen::Polar, Loaded::Polar(_)) => return Err(Error::Domain("input is already a polar image".into())),
        (Screen::Cart, Loaded::Cart(_)) => return Err(Error::Domain("input is already a Cartesian image".into())),
    }
    Ok(EXIT_OK)
}

pub fn cmd_basis(args: &BasisArgs) -> Result<i32> {
    let spec = GridSpec::new(args.j)?;
    let values = match args.kind {
        BasisKind::Cart => psi_square_table(&spec)?.values,
        BasisKind::Ma => lambda_table(&spec)?.values,
        BasisKind::Polar => polar_table(&spec)?.values,
    };
    let mut out = String::from("row,col,re,im\n");
    for r in 0..values.nrows() {
        for c in 0..values.ncols() {
            let z = values[(r, c)];
            out.push_str(&format!("{r},{c},{},{}\n", z.re, z.im));
        }
    }
    std::fs::write(&args.out, out)?;
    Ok(EXIT_OK)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    if args.j.twice() > VERIFY_MAX_TWICE_J {
        return Err(Error::Domain(format!("verify is capped at j ≤ {}", HalfInt::from_twice(VERIFY_MAX_TWICE_J))));
    }
    let spec = GridSpec::new(args.j)?;
    let outcomes = run_suite(&spec, VerifyOptions { perturb: args.perturb });
    let mut groups: Vec<&str> = Vec::new();
    for o in &outcomes {
        if !groups.contains(&o.group) {
            groups.push(o.group);
        }
        let tag = match o.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        if o.status == Status::Skip {
            println!("{tag} [{}] {}", o.group, o.name);
        } else {
            println!("{tag} [{}] {} (defect {:.2e}, tol {:.0e})", o.group, o.name, o.defect, o.tol);
        }
    }
    let mut all_pass = true;
    for g in groups {
        let fails = outcomes.iter().filter(|o| o.group == g && o.status == Status::Fail).count();
        all_pass &= fails == 0;
        println!("group {g}: {}", if fails == 0 { "pass" } else { "FAIL" });
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

pub fn cmd_bench(args: &BenchArgs) -> Result<i32> {
    println!("N,kernel,build_ms,apply_us,complex_mul_adds,cache_file_bytes");
    for &n in &args.n {
        let spec = GridSpec::from_side(n)?;
        let params = KernelParams::RotationCart { theta: 0.5 };
        let start = Instant::now();
        let k = build_kernel(&spec, params)?;
        let build_ms = start.elapsed().as_secs_f64() * 1e3;
        let v = DVector::from_fn(spec.len(), |i, _| Complex64::new((i % 7) as f64, 0.0));
        let reps = args.reps.max(1);
        let start = Instant::now();
        let mut sink = 0.0;
        for _ in 0..reps {
            sink += k.apply(&v)?[0].re;
        }
        let apply_us = start.elapsed().as_secs_f64() * 1e6 / reps as f64;
        std::hint::black_box(sink);
        let key = CacheKey::new(&spec, params)?;
        let bytes = HEADER_LEN + 16 * spec.len() * spec.len() + 4;
        println!("{n},{},{build_ms:.3},{apply_us:.3},{},{bytes}", key.params.name(), spec.len() * spec.len());
    }
    Ok(EXIT_OK)
}
