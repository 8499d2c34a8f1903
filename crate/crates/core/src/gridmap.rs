//! Unitary map between the Cartesian and polar screens.
//!
//! `U = Ψ° · (Λ□)†` sends each Laguerre–Kravchuk function Λ□_{n,m} to the polar
//! wavefunction Ψ°_{n,m}; its inverse is `V = U†`. Both basis tables are
//! unitary, so the map loses no information. With the column phases of
//! [`crate::cart_basis`] the matrix is real up to rounding, and real images stay real to the same
//! accuracy.

use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::cart_basis::lambda_table;
use crate::error::{Error, Result};
use crate::fourier_group::{Kernel, KernelParams};
use crate::grids::GridSpec;
use crate::linalg::{self, CMatrix};
use crate::memo::{memoize, Memo};
use crate::polar_basis::polar_table_shared;
use crate::tolerances::TABLE_UNITARITY;

/// Pixels of a Cartesian image in canonical order (q_x major, q_y fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct CartImage {
    pub spec: GridSpec,
    pub pixels: DVector<Complex64>,
}

/// Pixels of a polar image in canonical order (ρ ascending, then k).
#[derive(Clone, Debug, PartialEq)]
pub struct PolarImage {
    pub spec: GridSpec,
    pub pixels: DVector<Complex64>,
}

fn check_len(spec: &GridSpec, pixels: &DVector<Complex64>) -> Result<()> {
    if pixels.len() != spec.len() {
        return Err(Error::Dimension(format!(
            "expected {} pixels for N = {}, got {}",
            spec.len(),
            spec.side(),
            pixels.len()
        )));
    }
    Ok(())
}

impl CartImage {
    pub fn new(spec: GridSpec, pixels: DVector<Complex64>) -> Result<Self> {
        check_len(&spec, &pixels)?;
        Ok(CartImage { spec, pixels })
    }

    pub fn from_real(spec: GridSpec, values: &[f64]) -> Result<Self> {
        let pixels = DVector::from_iterator(values.len(), values.iter().map(|&x| Complex64::new(x, 0.0)));
        CartImage::new(spec, pixels)
    }
}

impl PolarImage {
    pub fn new(spec: GridSpec, pixels: DVector<Complex64>) -> Result<Self> {
        check_len(&spec, &pixels)?;
        Ok(PolarImage { spec, pixels })
    }
}

static MAP_U: Memo<i64, CMatrix> = Memo::new();

fn product_u(spec: &GridSpec) -> Result<CMatrix> {
    let polar = polar_table_shared(spec)?;
    let lambda = lambda_table(spec)?;
    Ok(linalg::mul_adjoint(&polar, &lambda.values))
}

/// U is real in exact arithmetic. The complex product is kept as computed;
/// an imaginary residue above rounding level signals a broken table.
fn build_u(spec: &GridSpec) -> Result<CMatrix> {
    let u = product_u(spec)?;
    let residue = u.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if residue > TABLE_UNITARITY {
        return Err(Error::Precision(format!("map U has imaginary residue {residue:.2e}")));
    }
    Ok(u)
}

fn shared_u(spec: &GridSpec) -> Result<Arc<CMatrix>> {
    if spec.has_default_offsets() {
        memoize(&MAP_U, spec.j().twice(), || build_u(spec))
    } else {
        Ok(Arc::new(build_u(spec)?))
    }
}

/// U: rows polar points, columns Cartesian points.
pub fn kernel_u(spec: &GridSpec) -> Result<Kernel> {
    Kernel::from_parts(spec.clone(), KernelParams::MapU, (*shared_u(spec)?).clone())
}

/// V = U†: rows Cartesian points, columns polar points.
pub fn kernel_v(spec: &GridSpec) -> Result<CMatrix> {
    Ok(shared_u(spec)?.adjoint())
}

fn check_spec(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!("image grid (j = {}) does not match kernel grid (j = {})", a.j(), b.j())));
    }
    Ok(())
}

/// Map a Cartesian image onto the polar screen with a prebuilt U.
pub fn cart_to_polar_with(u: &Kernel, img: &CartImage) -> Result<PolarImage> {
    check_spec(&img.spec, &u.spec)?;
    if u.params != KernelParams::MapU {
        return Err(Error::Dimension(format!("expected the map_U kernel, got {}", u.params.name())));
    }
    PolarImage::new(img.spec.clone(), u.apply(&img.pixels)?)
}

/// Map a polar image back to the Cartesian screen with a prebuilt U.
pub fn polar_to_cart_with(u: &Kernel, img: &PolarImage) -> Result<CartImage> {
    check_spec(&img.spec, &u.spec)?;
    if u.params != KernelParams::MapU {
        return Err(Error::Dimension(format!("expected the map_U kernel, got {}", u.params.name())));
    }
    CartImage::new(img.spec.clone(), u.matrix().ad_mul(&img.pixels))
}

pub fn cart_to_polar(img: &CartImage) -> Result<PolarImage> {
    cart_to_polar_with(&kernel_u(&img.spec)?, img)
}

pub fn polar_to_cart(img: &PolarImage) -> Result<CartImage> {
    polar_to_cart_with(&kernel_u(&img.spec)?, img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cart_basis::lambda_table;
    use crate::linalg::max_abs;
    use crate::polar_basis::polar_table;
    use crate::specfun::HalfInt;

    fn spec(t: i64) -> GridSpec {
        GridSpec::new(HalfInt::from_twice(t)).unwrap()
    }

    #[test]
    fn u_is_unitary_and_real() {
        for t in 1..=8 {
            let s = spec(t);
            let u = kernel_u(&s).unwrap();
            let imag = product_u(&s).unwrap().map(|z| Complex64::new(z.im, 0.0));
            assert!(max_abs(&imag) < 1e-12, "j = {t}/2");
            let v = kernel_v(&s).unwrap();
            let vu = linalg::mul(&v, u.matrix());
            assert!(linalg::max_abs_diff(&vu, &CMatrix::identity(s.len(), s.len())) < 1e-10);
        }
    }

    #[test]
    fn u_maps_lambda_columns_to_polar_columns() {
        let s = spec(4);
        let u = kernel_u(&s).unwrap();
        let mapped = linalg::mul(u.matrix(), &lambda_table(&s).unwrap().values);
        assert!(linalg::max_abs_diff(&mapped, &polar_table(&s).unwrap().values) < 1e-10);
    }

    #[test]
    fn zero_image_maps_to_zero() {
        let s = spec(3);
        let z = CartImage::new(s.clone(), DVector::zeros(16)).unwrap();
        let p = cart_to_polar(&z).unwrap();
        assert!(p.pixels.iter().all(|x| x.norm() == 0.0));
        let back = polar_to_cart(&PolarImage::new(s, DVector::zeros(16)).unwrap()).unwrap();
        assert!(back.pixels.iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn mismatched_grids_rejected() {
        let img = CartImage::new(spec(2), DVector::zeros(9)).unwrap();
        let u = kernel_u(&spec(4)).unwrap();
        assert!(matches!(cart_to_polar_with(&u, &img), Err(Error::Dimension(_))));
        assert!(CartImage::new(spec(2), DVector::zeros(8)).is_err());
    }
}
