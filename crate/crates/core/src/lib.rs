//! Finite Fourier–Kravchuk transforms on N×N pixel screens.
//!
//! An N×N image (N = 2j+1) is a vector in C^{N²}. The group U(2) acts on it by
//! exactly unitary N²×N² kernels built from Kravchuk functions: rotations,
//! anisotropic and isotropic fractional Fourier transforms, gyrations and
//! their products. The same space is also sampled on a polar screen of
//! 2j+1 concentric rings with 2ρ+1 points each, and [`gridmap`] carries
//! images unitarily between the two screens.
//!
//! ```
//! use fklens::{fourier_group::kernel_rotation_cart, grids::GridSpec, specfun::HalfInt};
//!
//! let spec = GridSpec::new(HalfInt::int(2)).unwrap();
//! let r = kernel_rotation_cart(&spec, std::f64::consts::FRAC_PI_4).unwrap();
//! assert_eq!(r.matrix().shape(), (25, 25));
//! ```

pub mod cart_basis;
pub mod cli;
pub mod error;
pub mod fourier_group;
pub mod gridmap;
pub mod grids;
pub mod kernel_cache;
pub mod linalg;
mod memo;
pub mod oracle;
pub mod polar_basis;
pub mod specfun;
pub mod tolerances;
pub mod verify;

pub use error::{Error, Result};
pub use fourier_group::{EulerParams, Kernel, KernelParams};
pub use grids::GridSpec;
pub use specfun::{AngleRad, HalfInt};
