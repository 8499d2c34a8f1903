//! Numerical tolerances shared by the library, the `verify` command and the tests.
//!
//! All error sources in this crate are rounding errors of dense double
//! precision linear algebra, so the thresholds sit a few orders of magnitude
//! above machine epsilon times the matrix dimension.

/// Hard limit for `max |K†K − I|` when a kernel is built or loaded.
pub const KERNEL_UNITARITY: f64 = 1e-10;

/// Orthonormality of basis tables for j ≤ 8.
pub const TABLE_UNITARITY: f64 = 1e-11;

/// Closed-form special function identities (orthogonality, symmetries).
pub const SPECFUN: f64 = 1e-12;

/// Hermiticity of generator matrices, relative to their largest entry.
pub const HERMITIAN: f64 = 1e-13;

/// Unitarity of eigendecomposition exponentials.
pub const EXPM_UNITARITY: f64 = 1e-11;

/// Agreement between analytic kernels and oracle exponentials.
pub const ORACLE_AGREEMENT: f64 = 1e-9;

/// Eigenvector residuals `‖Gv − λv‖_max`.
pub const EIGEN_RESIDUAL: f64 = 1e-10;

/// One-parameter and U(2) composition laws.
pub const GROUP_LAW: f64 = 1e-9;

/// Ring shifts of the polar rotation: off-pattern entries.
pub const RING_SHIFT: f64 = 1e-12;

/// Parity identities of the Cartesian rotation.
pub const PARITY: f64 = 1e-10;

/// Cart → polar → cart round trip of images.
pub const ROUND_TRIP: f64 = 1e-9;

/// Quantization step applied to cached kernel parameters.
pub const PARAM_QUANTUM: f64 = 1e-12;
