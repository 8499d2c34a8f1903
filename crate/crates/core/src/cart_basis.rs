//! Two-dimensional Kravchuk modes Ψ□ and the Laguerre–Kravchuk functions Λ□
//! on the square grid.
//!
//! Λ□_{n,m} is the mode-n combination of Cartesian modes with angular momentum
//! m under the imported rotation generator:
//!
//! ```text
//! Λ□_{n,m} = Σ_{n_x+n_y=n} i^E d^{J_n}_{m/2, μ}(π/2) Ψ□_{n_x,n_y},
//! E = n + m + |m| + μ − J_n,   μ = (n_x − n_y)/2,   J_n = min(n, 4j − n)/2.
//! ```
//!
//! Up to a constant phase per column this is e^{iπμ/2} d(π/2) on each block.
//! The column phase i^{n+m+|m|} e^{−iπJ_n/2} is chosen so that
//! Λ_{n,−m} = Λ_{n,m}*, which makes the Cartesian → polar map real, and so
//! that the polar image of an off-centre blob sits at the blob's own angle.
//! On the upper half of the rhombus (n > 2j) only 4j − n + 1 Cartesian modes
//! share the total n, and the block spin J_n keeps each block unitary.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::grids::{block_spin, enumerate_ma_rhombus, GridSpec};
use crate::linalg::{i_pow, to_complex, CMatrix, RMatrix};
use crate::memo::{memoize, Memo};
use crate::specfun::{kravchuk_matrix, kravchuk_psi, wigner_little_d, HalfInt};

/// Which labels the columns of a [`BasisTable`] carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelKind {
    /// Cartesian modes (n_x, n_y), n_x major.
    CartesianMode,
    /// Mode and angular momentum (n, m).
    Ma,
}

/// An N²×N² table of basis functions: rows are grid points, columns labels.
#[derive(Clone, Debug)]
pub struct BasisTable {
    pub spec: GridSpec,
    pub kind: LabelKind,
    pub values: CMatrix,
}

static KRAVCHUK: Memo<i64, RMatrix> = Memo::new();
static MODE_TABLE: Memo<i64, RMatrix> = Memo::new();
static MA_COEFFS: Memo<i64, CMatrix> = Memo::new();
static LAMBDA: Memo<i64, CMatrix> = Memo::new();

/// 1D Kravchuk functions of the grid: rows q, columns n.
pub fn kravchuk_table(spec: &GridSpec) -> Result<Arc<RMatrix>> {
    memoize(&KRAVCHUK, spec.j().twice(), || kravchuk_matrix(spec.j()))
}

/// Real orthogonal table Ψ□: rows (q_x, q_y), columns (n_x, n_y).
pub fn mode_table(spec: &GridSpec) -> Result<Arc<RMatrix>> {
    memoize(&MODE_TABLE, spec.j().twice(), || {
        let k = kravchuk_table(spec)?;
        Ok(k.kronecker(&k))
    })
}

/// Ψ□_{n_x,n_y}(q_x, q_y) = Ψ_{n_x}(q_x) Ψ_{n_y}(q_y).
pub fn psi_square(spec: &GridSpec, nx: i64, ny: i64, qx: HalfInt, qy: HalfInt) -> Result<f64> {
    Ok(kravchuk_psi(spec.j(), nx, qx)? * kravchuk_psi(spec.j(), ny, qy)?)
}

pub fn psi_square_table(spec: &GridSpec) -> Result<BasisTable> {
    Ok(BasisTable { spec: spec.clone(), kind: LabelKind::CartesianMode, values: to_complex(&*mode_table(spec)?) })
}

fn check_ma_label(spec: &GridSpec, n: i64, m: HalfInt) -> Result<i64> {
    let Some(m) = m.to_integer() else {
        return domain(format!("angular momentum {m} must be an integer"));
    };
    spec.ma_index(n, m)?;
    Ok(m)
}

/// Coefficient of Ψ□_{n_x,n_y} in Λ□_{n,m}; zero unless n_x + n_y = n.
pub fn ma_coefficient(spec: &GridSpec, nx: i64, ny: i64, n: i64, m: HalfInt) -> Result<Complex64> {
    let m = check_ma_label(spec, n, m)?;
    let side = spec.side() as i64;
    if !(0..side).contains(&nx) || !(0..side).contains(&ny) {
        return domain(format!("mode ({nx}, {ny}) outside 0..{side}"));
    }
    if nx + ny != n {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let spin = block_spin(spec, n);
    let mu = HalfInt::from_twice(nx - ny);
    let e = n + m + m.abs() + (mu - spin).twice() / 2;
    let d = wigner_little_d(spin, HalfInt::from_twice(m), mu, std::f64::consts::FRAC_PI_2)?;
    Ok(i_pow(e) * d)
}

/// Block-sparse change of basis from Cartesian modes (rows) to MA labels (columns).
pub fn ma_coefficients(spec: &GridSpec) -> Result<Arc<CMatrix>> {
    memoize(&MA_COEFFS, spec.j().twice(), || {
        let side = spec.side() as i64;
        let labels = enumerate_ma_rhombus(spec);
        let mut c = CMatrix::zeros(spec.len(), spec.len());
        for (col, l) in labels.iter().enumerate() {
            let lo = 0.max(l.n - side + 1);
            let hi = l.n.min(side - 1);
            for nx in lo..=hi {
                let ny = l.n - nx;
                let row = spec.cart_mode_index(nx as usize, ny as usize)?;
                c[(row, col)] = ma_coefficient(spec, nx, ny, l.n, l.m_or_mu)?;
            }
        }
        Ok(c)
    })
}

/// Λ□_{n,m}(q_x, q_y).
pub fn lambda_square(spec: &GridSpec, n: i64, m: HalfInt, qx: HalfInt, qy: HalfInt) -> Result<Complex64> {
    check_ma_label(spec, n, m)?;
    spec.cart_index(qx, qy)?;
    let side = spec.side() as i64;
    let mut total = Complex64::new(0.0, 0.0);
    for nx in 0.max(n - side + 1)..=n.min(side - 1) {
        let ny = n - nx;
        total += ma_coefficient(spec, nx, ny, n, m)? * psi_square(spec, nx, ny, qx, qy)?;
    }
    Ok(total)
}

/// Λ□ table: rows (q_x, q_y), columns MA labels.
pub fn lambda_table(spec: &GridSpec) -> Result<BasisTable> {
    let values = memoize(&LAMBDA, spec.j().twice(), || {
        let p = to_complex(&*mode_table(spec)?);
        Ok(crate::linalg::mul(&p, &*ma_coefficients(spec)?))
    })?;
    Ok(BasisTable { spec: spec.clone(), kind: LabelKind::Ma, values: (*values).clone() })
}
