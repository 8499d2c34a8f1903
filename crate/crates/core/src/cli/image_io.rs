//! Image files read and written by the command-line tool.
//!
//! Screen orientation: pixel (row r, column c) of an N×N raster is the grid
//! point (q_x, q_y) = (c − j, j − r), so image "up" is +q_y.
//!
//! ```text
//!   r = 0      ┌────────────┐  q_y = +j
//!              │     ↑ q_y  │
//!              │     · → q_x│
//!   r = N−1    └────────────┘  q_y = −j
//!            c = 0        c = N−1
//! ```
//!
//! Formats:
//! * PGM, plain (P2) or binary (P5), maxval ≤ 255: real Cartesian input.
//! * CSV-complex: N lines of N cells `re+imi`, or N lines of 2N cells `re,im,…`.
//! * polar-CSV: header `rho,k,re,im` and one line per polar point.
//!
//! Floats are written with the shortest representation that round-trips, so
//! CSV files carry complex images without loss. PGM output is a lossy
//! magnitude preview only.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gridmap::{CartImage, PolarImage};
use crate::grids::GridSpec;
use crate::specfun::HalfInt;

/// A decoded input image.
#[derive(Clone, Debug)]
pub enum ImageFile {
    Cartesian(CartImage),
    Polar(PolarImage),
}

fn parse_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(msg.into()))
}

/// Canonical pixel index of raster position (r, c).
fn raster_to_index(spec: &GridSpec, r: usize, c: usize) -> Result<usize> {
    let two_j = spec.j().twice();
    let qx = HalfInt::from_twice(2 * c as i64 - two_j);
    let qy = HalfInt::from_twice(two_j - 2 * r as i64);
    spec.cart_index(qx, qy)
}

fn raster_to_image(side: usize, cells: &[Complex64]) -> Result<CartImage> {
    let spec = GridSpec::from_side(side)?;
    let mut pixels = DVector::zeros(spec.len());
    for r in 0..side {
        for c in 0..side {
            pixels[raster_to_index(&spec, r, c)?] = cells[r * side + c];
        }
    }
    CartImage::new(spec, pixels)
}

fn image_to_raster(img: &CartImage) -> Result<Vec<Complex64>> {
    let side = img.spec.side();
    let mut cells = Vec::with_capacity(side * side);
    for r in 0..side {
        for c in 0..side {
            cells.push(img.pixels[raster_to_index(&img.spec, r, c)?]);
        }
    }
    Ok(cells)
}

/// Decode PGM bytes (P2 or P5).
pub fn parse_pgm(bytes: &[u8]) -> Result<CartImage> {
    let mut pos = 0;
    let mut next_token = |bytes: &[u8]| -> Result<String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return parse_err("truncated PGM header");
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    let magic = next_token(bytes)?;
    let number = |t: String| t.parse::<usize>().map_err(|_| Error::Parse(format!("bad PGM header field {t:?}")));
    let width = number(next_token(bytes)?)?;
    let height = number(next_token(bytes)?)?;
    let maxval = number(next_token(bytes)?)?;
    if width != height || width == 0 {
        return Err(Error::Dimension(format!("PGM image must be square, got {width}×{height}")));
    }
    if maxval == 0 || maxval > 255 {
        return parse_err(format!("PGM maxval must be 1..=255, got {maxval}"));
    }
    let count = width * height;
    let values: Vec<f64> = match magic.as_str() {
        "P2" => {
            let mut v = Vec::with_capacity(count);
            for _ in 0..count {
                v.push(number(next_token(bytes)?)? as f64);
            }
            v
        }
        "P5" => {
            // Exactly one whitespace byte separates maxval from the raster.
            let start = pos + 1;
            if bytes.len() < start + count {
                return parse_err("truncated P5 raster");
            }
            bytes[start..start + count].iter().map(|&b| b as f64).collect()
        }
        other => return parse_err(format!("unsupported PGM magic {other:?}")),
    };
    if values.iter().any(|&v| v > maxval as f64) {
        return parse_err("PGM sample exceeds maxval");
    }
    let cells: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    raster_to_image(width, &cells)
}

/// Parse `re+imi`, `re-imi`, `re`, or `imi`.
pub fn parse_complex(cell: &str) -> Result<Complex64> {
    let s = cell.trim();
    let bad = || Error::Parse(format!("bad complex number {cell:?}"));
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (body[..k].parse::<f64>().map_err(|_| bad())?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "+" | "" => 1.0,
        "-" => -1.0,
        t => t.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'))
}

/// Decode a Cartesian CSV-complex image.
pub fn parse_cart_csv(text: &str) -> Result<CartImage> {
    let rows: Vec<Vec<&str>> = data_lines(text).map(|l| l.split(',').map(str::trim).collect()).collect();
    let side = rows.len();
    if side == 0 {
        return parse_err("empty CSV image");
    }
    let mut cells = Vec::with_capacity(side * side);
    for (r, row) in rows.iter().enumerate() {
        if row.len() == side {
            for c in row {
                cells.push(parse_complex(c)?);
            }
        } else if row.len() == 2 * side {
            for pair in row.chunks(2) {
                let re = pair[0].parse::<f64>().map_err(|_| Error::Parse(format!("bad number {:?}", pair[0])))?;
                let im = pair[1].parse::<f64>().map_err(|_| Error::Parse(format!("bad number {:?}", pair[1])))?;
                cells.push(Complex64::new(re, im));
            }
        } else {
            return Err(Error::Dimension(format!(
                "CSV row {r} has {} cells; a {side}-row image needs {side} or {}",
                row.len(),
                2 * side
            )));
        }
    }
    raster_to_image(side, &cells)
}

/// Decode a polar-CSV image.
pub fn parse_polar_csv(text: &str) -> Result<PolarImage> {
    let mut lines = data_lines(text).peekable();
    if lines.peek().is_some_and(|l| l.to_ascii_lowercase().starts_with("rho")) {
        lines.next();
    }
    let mut entries = Vec::new();
    for l in lines {
        let f: Vec<&str> = l.split(',').map(str::trim).collect();
        if f.len() != 4 {
            return parse_err(format!("polar CSV line {l:?} must have 4 fields"));
        }
        let int = |t: &str| t.parse::<i64>().map_err(|_| Error::Parse(format!("bad integer {t:?}")));
        let real = |t: &str| t.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {t:?}")));
        entries.push((int(f[0])?, int(f[1])?, Complex64::new(real(f[2])?, real(f[3])?)));
    }
    let side = (entries.len() as f64).sqrt().round() as usize;
    if side == 0 || side * side != entries.len() {
        return Err(Error::Dimension(format!("{} polar points is not a square count N²", entries.len())));
    }
    let spec = GridSpec::from_side(side)?;
    let mut pixels = DVector::zeros(spec.len());
    let mut seen = vec![false; spec.len()];
    for (rho, k, z) in entries {
        let i = spec.polar_index(rho, k)?;
        if seen[i] {
            return parse_err(format!("polar point ({rho}, {k}) listed twice"));
        }
        seen[i] = true;
        pixels[i] = z;
    }
    PolarImage::new(spec, pixels)
}

/// Read an image, choosing the format from the extension and contents.
pub fn read_image(path: &Path) -> Result<ImageFile> {
    let bytes = fs::read(path)?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    if ext == "pgm" || bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        return parse_pgm(&bytes).map(ImageFile::Cartesian);
    }
    if ext != "csv" {
        return parse_err(format!("unknown image format for {}", path.display()));
    }
    let text = String::from_utf8(bytes).map_err(|_| Error::Parse("CSV file is not UTF-8".into()))?;
    let first = data_lines(&text).next().unwrap_or("").to_ascii_lowercase();
    if first.starts_with("rho") {
        parse_polar_csv(&text).map(ImageFile::Polar)
    } else {
        parse_cart_csv(&text).map(ImageFile::Cartesian)
    }
}

pub fn cart_csv(img: &CartImage) -> Result<String> {
    let side = img.spec.side();
    let cells = image_to_raster(img)?;
    let mut out = String::new();
    for row in cells.chunks(side) {
        let line: Vec<String> = row.iter().map(|&z| format_complex(z)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn polar_csv(img: &PolarImage) -> String {
    let mut out = String::from("rho,k,re,im\n");
    for p in crate::grids::enumerate_polar(&img.spec) {
        let z = img.pixels[img.spec.polar_index(p.rho, p.k).expect("enumerated point")];
        let _ = writeln!(out, "{},{},{},{}", p.rho, p.k, z.re, z.im);
    }
    out
}

/// Binary PGM of a raster of magnitudes, rescaled so the largest is 255.
pub fn magnitude_pgm(side: usize, magnitudes: &[f64]) -> Vec<u8> {
    let peak = magnitudes.iter().copied().fold(0.0, f64::max);
    let mut out = format!("P5\n{side} {side}\n255\n").into_bytes();
    out.extend(magnitudes.iter().map(|&m| if peak > 0.0 { (255.0 * m / peak).round() as u8 } else { 0 }));
    out
}

pub fn cart_magnitude_pgm(img: &CartImage) -> Result<Vec<u8>> {
    let mags: Vec<f64> = image_to_raster(img)?.iter().map(|z| z.norm()).collect();
    Ok(magnitude_pgm(img.spec.side(), &mags))
}

/// Magnitude preview of a polar image: each point drawn at twice its
/// (ρ cos φ, ρ sin φ) position on a square canvas, +y up.
pub fn polar_magnitude_pgm(img: &PolarImage) -> Vec<u8> {
    let reach = 2 * img.spec.max_rho() as usize;
    let side = 2 * reach + 1;
    let mut canvas = vec![0.0f64; side * side];
    for p in crate::grids::enumerate_polar(&img.spec) {
        let z = img.pixels[img.spec.polar_index(p.rho, p.k).expect("enumerated point")];
        let (x, y) = (2.0 * p.rho as f64 * p.phi.cos(), 2.0 * p.rho as f64 * p.phi.sin());
        let c = (reach as f64 + x).round() as usize;
        let r = (reach as f64 - y).round() as usize;
        let cell = &mut canvas[r * side + c];
        *cell = cell.max(z.norm());
    }
    magnitude_pgm(side, &canvas)
}
