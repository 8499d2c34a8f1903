//! Unitary N²×N² kernels of the finite U(2) Fourier group on both screens.
//!
//! Every Cartesian kernel preserves the total mode number n = n_x + n_y, so it
//! is assembled from per-n blocks in the Cartesian mode basis and then moved to
//! pixels by the real orthogonal table Ψ□: `K = Ψ□ · X · Ψ□ᵀ`.
//!
//! # Angle table
//!
//! | kernel                      | public angle | mode-basis action                                  |
//! |-----------------------------|--------------|----------------------------------------------------|
//! | [`kernel_rotation_cart`]    | θ            | d^{J_n}_{μ,μ′}(2θ)                                 |
//! | [`kernel_aniso`]            | φ            | e^{−2iφ(n_x−n_y)} = e^{−4iφμ}                      |
//! | [`kernel_gyration`]         | ψ            | A(π/8) R(ψ) A(π/8)⁻¹ = e^{−iπ(μ−μ′)/2} d_{μ,μ′}(2ψ) |
//! | [`kernel_isotropic`]        | ω            | e^{−2iω(n_x+n_y)}                                  |
//! | [`kernel_u2_cart`]          | (ω; φ, θ, ψ) | e^{−i(n−2j)ω} e^{−iμφ} d^{J_n}_{μ,μ′}(θ) e^{−iμ′ψ}  |
//! | [`kernel_rotation_polar`]   | θ            | e^{−imθ} on Ψ°_{n,m}                               |
//!
//! θ is the geometric angle: R□(θ) turns an image counterclockwise by θ and
//! R□(π) is the point reflection. The Euler-form element is factorized as
//! `e^{2ijω} K(ω/2) A(φ/4) R(θ/2) A(ψ/4)`, so (0; 0, 2θ, 0) is R□(θ).
//! J_n = min(n, 4j − n)/2 is the spin of the block with total mode n.

use std::f64::consts::FRAC_PI_8;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::cart_basis::mode_table;
use crate::error::{domain, Error, Result};
use crate::grids::{block_spin, GridSpec};
use crate::linalg::{self, CMatrix};
use crate::specfun::{wigner_d_matrix, HalfInt};
use crate::tolerances::{GROUP_LAW, KERNEL_UNITARITY};

/// Euler parameters (ω; φ, θ, ψ) of a U(2) element.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EulerParams {
    pub omega: f64,
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
}

/// A 2×2 complex matrix in the (+½, −½) basis.
pub type Su2 = [[Complex64; 2]; 2];

fn su2_mul(a: &Su2, b: &Su2) -> Su2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, x) in row.iter_mut().enumerate() {
            *x = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

fn su2_dist(a: &Su2, b: &Su2) -> f64 {
    (0..2).flat_map(|r| (0..2).map(move |c| (r, c))).map(|(r, c)| (a[r][c] - b[r][c]).norm()).fold(0.0, f64::max)
}

impl EulerParams {
    pub fn new(omega: f64, phi: f64, theta: f64, psi: f64) -> Result<Self> {
        if ![omega, phi, theta, psi].iter().all(|x| x.is_finite()) {
            return domain("Euler parameters must be finite");
        }
        Ok(EulerParams { omega, phi, theta, psi })
    }

    pub fn identity() -> Self {
        EulerParams::default()
    }

    /// SU(2) part e^{−iφσ_z/2} e^{−iθσ_y/2} e^{−iψσ_z/2}.
    pub fn su2(&self) -> Su2 {
        let (s, c) = (self.theta / 2.0).sin_cos();
        let sum = (self.phi + self.psi) / 2.0;
        let dif = (self.phi - self.psi) / 2.0;
        [
            [Complex64::from_polar(c, -sum), -Complex64::from_polar(s, -dif)],
            [Complex64::from_polar(s, dif), Complex64::from_polar(c, sum)],
        ]
    }

    /// Euler angles of the element (ω, u). θ is returned in [0, π].
    pub fn from_su2(omega: f64, u: &Su2) -> Self {
        let c = u[0][0].norm();
        let s = u[1][0].norm();
        let theta = 2.0 * s.atan2(c);
        let tiny = 1e-14;
        let (phi, psi) = if s < tiny {
            (-2.0 * u[0][0].arg(), 0.0)
        } else if c < tiny {
            (2.0 * u[1][0].arg(), 0.0)
        } else {
            let sum = -2.0 * u[0][0].arg();
            let dif = 2.0 * u[1][0].arg();
            ((sum + dif) / 2.0, (sum - dif) / 2.0)
        };
        let mut p = EulerParams { omega, phi, theta, psi };
        // Halving the arguments leaves a sign ambiguity between u and −u.
        if su2_dist(&p.su2(), u) > su2_dist(&EulerParams { phi: phi + 2.0 * std::f64::consts::PI, ..p }.su2(), u) {
            p.phi += 2.0 * std::f64::consts::PI;
        }
        p
    }

    /// Group product: the element acting as `self` after `other`.
    pub fn compose(&self, other: &EulerParams) -> EulerParams {
        let u = su2_mul(&self.su2(), &other.su2());
        let p = EulerParams::from_su2(self.omega + other.omega, &u);
        debug_assert!(su2_dist(&p.su2(), &u) < GROUP_LAW);
        p
    }
}

/// Which screens a kernel maps between.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridKind {
    Cartesian,
    Polar,
    /// Rows polar points, columns Cartesian points.
    CartesianToPolar,
}

/// Kernel family with its group parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelParams {
    RotationCart { theta: f64 },
    Aniso { phi: f64 },
    Gyration { psi: f64 },
    Isotropic { omega: f64 },
    U2Cart(EulerParams),
    RotationPolar { theta: f64 },
    U2Polar(EulerParams),
    MapU,
}

impl KernelParams {
    /// Kind code used by the cache file format.
    pub fn code(&self) -> u8 {
        match self {
            KernelParams::RotationCart { .. } => 0,
            KernelParams::Aniso { .. } => 1,
            KernelParams::Gyration { .. } => 2,
            KernelParams::Isotropic { .. } => 3,
            KernelParams::U2Cart(_) => 4,
            KernelParams::RotationPolar { .. } => 5,
            KernelParams::U2Polar(_) => 6,
            KernelParams::MapU => 7,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelParams::RotationCart { .. } => "rot_cart",
            KernelParams::Aniso { .. } => "aniso",
            KernelParams::Gyration { .. } => "gyration",
            KernelParams::Isotropic { .. } => "iso",
            KernelParams::U2Cart(_) => "u2_cart",
            KernelParams::RotationPolar { .. } => "rot_polar",
            KernelParams::U2Polar(_) => "u2_polar",
            KernelParams::MapU => "map_U",
        }
    }

    /// Parameters padded with zeros to four slots (Euler order ω, φ, θ, ψ).
    pub fn values(&self) -> [f64; 4] {
        match *self {
            KernelParams::RotationCart { theta } | KernelParams::RotationPolar { theta } => [theta, 0.0, 0.0, 0.0],
            KernelParams::Aniso { phi } => [phi, 0.0, 0.0, 0.0],
            KernelParams::Gyration { psi } => [psi, 0.0, 0.0, 0.0],
            KernelParams::Isotropic { omega } => [omega, 0.0, 0.0, 0.0],
            KernelParams::U2Cart(p) | KernelParams::U2Polar(p) => [p.omega, p.phi, p.theta, p.psi],
            KernelParams::MapU => [0.0; 4],
        }
    }

    pub fn from_code(code: u8, v: [f64; 4]) -> Result<Self> {
        let e = EulerParams { omega: v[0], phi: v[1], theta: v[2], psi: v[3] };
        Ok(match code {
            0 => KernelParams::RotationCart { theta: v[0] },
            1 => KernelParams::Aniso { phi: v[0] },
            2 => KernelParams::Gyration { psi: v[0] },
            3 => KernelParams::Isotropic { omega: v[0] },
            4 => KernelParams::U2Cart(e),
            5 => KernelParams::RotationPolar { theta: v[0] },
            6 => KernelParams::U2Polar(e),
            7 => KernelParams::MapU,
            _ => return Err(Error::CacheFormat(format!("unknown kernel kind code {code}"))),
        })
    }

    pub fn grid(&self) -> GridKind {
        match self {
            KernelParams::RotationPolar { .. } | KernelParams::U2Polar(_) => GridKind::Polar,
            KernelParams::MapU => GridKind::CartesianToPolar,
            _ => GridKind::Cartesian,
        }
    }

    /// Whether the kernel depends on the per-ring angular offsets.
    pub fn uses_ring_offsets(&self) -> bool {
        matches!(self, KernelParams::U2Polar(_) | KernelParams::MapU)
    }
}

/// A dense unitary kernel in canonical grid ordering.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub spec: GridSpec,
    pub params: KernelParams,
    matrix: CMatrix,
}

impl Kernel {
    /// Wrap a matrix after checking shape and unitarity.
    pub fn from_parts(spec: GridSpec, params: KernelParams, matrix: CMatrix) -> Result<Self> {
        let n2 = spec.len();
        if matrix.shape() != (n2, n2) {
            return Err(Error::Dimension(format!(
                "{} kernel must be {n2}×{n2}, got {:?}",
                params.name(),
                matrix.shape()
            )));
        }
        let defect = linalg::unitarity_defect(&matrix);
        if defect.is_nan() || defect >= KERNEL_UNITARITY {
            return Err(Error::NotUnitary { what: params.name().to_string(), defect, tol: KERNEL_UNITARITY });
        }
        Ok(Kernel { spec, params, matrix })
    }

    pub fn grid(&self) -> GridKind {
        self.params.grid()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Matrix-vector product with a pixel vector in canonical order.
    pub fn apply(&self, v: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        if v.len() != self.matrix.ncols() {
            return Err(Error::Dimension(format!(
                "image has {} pixels, kernel expects {}",
                v.len(),
                self.matrix.ncols()
            )));
        }
        Ok(&self.matrix * v)
    }
}

/// An operator that preserves total mode number, stored as per-n blocks.
///
/// Block n is indexed by n_x ascending, equivalently μ = −J_n … J_n.
#[derive(Clone, Debug)]
pub struct ModeBlocks {
    pub blocks: Vec<CMatrix>,
}

fn block_nx_range(spec: &GridSpec, n: i64) -> (i64, i64) {
    let top = spec.side() as i64 - 1;
    (0.max(n - top), n.min(top))
}

impl ModeBlocks {
    /// Build from a function of (n, μ_row, μ_col, J_n).
    pub fn from_fn(
        spec: &GridSpec,
        mut f: impl FnMut(i64, HalfInt, HalfInt, HalfInt) -> Result<Complex64>,
    ) -> Result<Self> {
        let mut blocks = Vec::with_capacity(2 * spec.max_rho() as usize + 1);
        for n in 0..=2 * spec.max_rho() {
            let spin = block_spin(spec, n);
            let dim = (spin.twice() + 1) as usize;
            let mut b = CMatrix::zeros(dim, dim);
            for r in 0..dim {
                for c in 0..dim {
                    let mu_r = HalfInt::from_twice(2 * r as i64) - spin;
                    let mu_c = HalfInt::from_twice(2 * c as i64) - spin;
                    b[(r, c)] = f(n, mu_r, mu_c, spin)?;
                }
            }
            blocks.push(b);
        }
        Ok(ModeBlocks { blocks })
    }

    /// Blocks d^{J_n}(β) times phases e^{−i(a·μ + b·μ′)} on rows and columns.
    fn little_d(spec: &GridSpec, beta: f64, row_phase: f64, col_phase: f64) -> Result<Self> {
        let mut blocks = Vec::with_capacity(2 * spec.max_rho() as usize + 1);
        for n in 0..=2 * spec.max_rho() {
            let spin = block_spin(spec, n);
            let d = wigner_d_matrix(spin, beta)?;
            let b = CMatrix::from_fn(d.nrows(), d.ncols(), |r, c| {
                let mu_r = (2 * r as i64 - spin.twice()) as f64 / 2.0;
                let mu_c = (2 * c as i64 - spin.twice()) as f64 / 2.0;
                Complex64::from_polar(d[(r, c)], -(row_phase * mu_r + col_phase * mu_c))
            });
            blocks.push(b);
        }
        Ok(ModeBlocks { blocks })
    }

    /// Diagonal operator with entry f(n, μ).
    pub fn diagonal(spec: &GridSpec, f: impl Fn(i64, f64) -> Complex64) -> Self {
        let blocks = (0..=2 * spec.max_rho())
            .map(|n| {
                let spin = block_spin(spec, n);
                let dim = (spin.twice() + 1) as usize;
                CMatrix::from_fn(dim, dim, |r, c| {
                    if r == c {
                        f(n, (2 * r as i64 - spin.twice()) as f64 / 2.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            })
            .collect();
        ModeBlocks { blocks }
    }

    pub fn mul(&self, other: &ModeBlocks) -> ModeBlocks {
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect();
        ModeBlocks { blocks }
    }

    pub fn scale(mut self, z: Complex64) -> ModeBlocks {
        for b in &mut self.blocks {
            *b *= z;
        }
        self
    }

    /// Dense N²×N² matrix in Cartesian mode order (n_x major).
    pub fn to_dense(&self, spec: &GridSpec) -> CMatrix {
        let side = spec.side();
        let mut out = CMatrix::zeros(spec.len(), spec.len());
        for (n, b) in self.blocks.iter().enumerate() {
            let (lo, _) = block_nx_range(spec, n as i64);
            for r in 0..b.nrows() {
                let rx = lo as usize + r;
                let row = rx * side + (n - rx);
                for c in 0..b.ncols() {
                    let cx = lo as usize + c;
                    out[(row, cx * side + (n - cx))] = b[(r, c)];
                }
            }
        }
        out
    }
}

/// Rotation blocks d^{J_n}(2θ).
pub fn rotation_modes(spec: &GridSpec, theta: f64) -> Result<ModeBlocks> {
    ModeBlocks::little_d(spec, 2.0 * theta, 0.0, 0.0)
}

pub fn aniso_modes(spec: &GridSpec, phi: f64) -> ModeBlocks {
    ModeBlocks::diagonal(spec, |_, mu| Complex64::from_polar(1.0, -4.0 * phi * mu))
}

pub fn isotropic_modes(spec: &GridSpec, omega: f64) -> ModeBlocks {
    ModeBlocks::diagonal(spec, |n, _| Complex64::from_polar(1.0, -2.0 * omega * n as f64))
}

/// Gyration blocks by the explicit sum e^{−iπμ/2} d_{μ,μ′}(2ψ) e^{+iπμ′/2}.
pub fn gyration_modes_explicit(spec: &GridSpec, psi: f64) -> Result<ModeBlocks> {
    let q = std::f64::consts::FRAC_PI_2;
    ModeBlocks::little_d(spec, 2.0 * psi, q, -q)
}

/// U(2) blocks by the direct Big-D form e^{−i(n−2j)ω} e^{−iμφ} d^{J_n}_{μ,μ′}(θ) e^{−iμ′ψ}.
pub fn u2_modes_direct(spec: &GridSpec, p: &EulerParams) -> Result<ModeBlocks> {
    let mut b = ModeBlocks::little_d(spec, p.theta, p.phi, p.psi)?;
    let two_j = spec.max_rho();
    for (n, block) in b.blocks.iter_mut().enumerate() {
        *block *= Complex64::from_polar(1.0, -((n as i64 - two_j) as f64) * p.omega);
    }
    Ok(b)
}

/// U(2) blocks by the factorized product e^{2ijω} K(ω/2) A(φ/4) R(θ/2) A(ψ/4).
pub fn u2_modes(spec: &GridSpec, p: &EulerParams) -> Result<ModeBlocks> {
    let global = Complex64::from_polar(1.0, spec.max_rho() as f64 * p.omega);
    Ok(isotropic_modes(spec, p.omega / 2.0)
        .mul(&aniso_modes(spec, p.phi / 4.0))
        .mul(&rotation_modes(spec, p.theta / 2.0)?)
        .mul(&aniso_modes(spec, p.psi / 4.0))
        .scale(global))
}

/// Pixel-basis kernel Ψ□ X Ψ□ᵀ of a mode-basis operator.
pub fn cart_kernel_from_modes(spec: &GridSpec, params: KernelParams, modes: &ModeBlocks) -> Result<Kernel> {
    let dense = modes.to_dense(spec);
    // The group identity is represented exactly rather than as Ψ□Ψ□ᵀ.
    if dense == CMatrix::identity(spec.len(), spec.len()) {
        return Kernel::from_parts(spec.clone(), params, dense);
    }
    let p = mode_table(spec)?;
    let k = linalg::real_similarity(&p, &dense);
    Kernel::from_parts(spec.clone(), params, k)
}

fn finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        domain(format!("{what} must be finite, got {x}"))
    }
}

/// R□(θ): real rotation kernel, counterclockwise by θ.
pub fn kernel_rotation_cart(spec: &GridSpec, theta: f64) -> Result<Kernel> {
    let theta = finite(theta, "θ")?;
    cart_kernel_from_modes(spec, KernelParams::RotationCart { theta }, &rotation_modes(spec, theta)?)
}

/// A□(φ): anisotropic Fourier–Kravchuk transform.
pub fn kernel_aniso(spec: &GridSpec, phi: f64) -> Result<Kernel> {
    let phi = finite(phi, "φ")?;
    cart_kernel_from_modes(spec, KernelParams::Aniso { phi }, &aniso_modes(spec, phi))
}

/// G□(ψ) = A(π/8) R(ψ) A(π/8)⁻¹.
pub fn kernel_gyration(spec: &GridSpec, psi: f64) -> Result<Kernel> {
    let psi = finite(psi, "ψ")?;
    let modes = aniso_modes(spec, FRAC_PI_8).mul(&rotation_modes(spec, psi)?).mul(&aniso_modes(spec, -FRAC_PI_8));
    cart_kernel_from_modes(spec, KernelParams::Gyration { psi }, &modes)
}

/// K□(ω): isotropic Fourier–Kravchuk transform.
pub fn kernel_isotropic(spec: &GridSpec, omega: f64) -> Result<Kernel> {
    let omega = finite(omega, "ω")?;
    cart_kernel_from_modes(spec, KernelParams::Isotropic { omega }, &isotropic_modes(spec, omega))
}

/// D□(ω; φ, θ, ψ): general U(2) element on the Cartesian screen.
pub fn kernel_u2_cart(spec: &GridSpec, p: EulerParams) -> Result<Kernel> {
    let p = EulerParams::new(p.omega, p.phi, p.theta, p.psi)?;
    let modes = u2_modes(spec, &p)?;
    #[cfg(debug_assertions)]
    {
        let direct = u2_modes_direct(spec, &p)?;
        let gap = linalg::max_abs_diff(&modes.to_dense(spec), &direct.to_dense(spec));
        debug_assert!(gap < crate::tolerances::ORACLE_AGREEMENT, "factorized and direct U(2) forms differ by {gap:e}");
    }
    cart_kernel_from_modes(spec, KernelParams::U2Cart(p), &modes)
}

/// One ring block of the polar rotation: (1/(2ρ+1)) sin((ρ+½)Δ)/sin(Δ/2).
fn ring_entry(rho: i64, delta: f64) -> f64 {
    let h = rho as f64 + 0.5;
    let den = (delta / 2.0).sin();
    if den.abs() < 1e-9 * h {
        return 1.0;
    }
    (h * delta).sin() / den / (2 * rho + 1) as f64
}

/// R°(θ): block-circulant rotation of the polar screen by θ.
pub fn kernel_rotation_polar(spec: &GridSpec, theta: f64) -> Result<Kernel> {
    let theta = finite(theta, "θ")?;
    let mut k = CMatrix::zeros(spec.len(), spec.len());
    for rho in 0..=spec.max_rho() {
        let base = (rho * rho) as usize;
        for (a, ka) in (-rho..=rho).enumerate() {
            for (b, kb) in (-rho..=rho).enumerate() {
                let delta = theta - spec.polar_angle(rho, ka) + spec.polar_angle(rho, kb);
                k[(base + a, base + b)] = Complex64::new(ring_entry(rho, delta), 0.0);
            }
        }
    }
    Kernel::from_parts(spec.clone(), KernelParams::RotationPolar { theta }, k)
}

/// D°(ω; φ, θ, ψ) = U · D□ · U†.
pub fn kernel_u2_polar(spec: &GridSpec, p: EulerParams) -> Result<Kernel> {
    let cart = kernel_u2_cart(spec, p)?;
    let u = crate::gridmap::kernel_u(spec)?;
    let k = linalg::mul_adjoint(&linalg::mul(u.matrix(), cart.matrix()), u.matrix());
    Kernel::from_parts(spec.clone(), KernelParams::U2Polar(p), k)
}

/// Build any kernel from its parameters.
pub fn build_kernel(spec: &GridSpec, params: KernelParams) -> Result<Kernel> {
    match params {
        KernelParams::RotationCart { theta } => kernel_rotation_cart(spec, theta),
        KernelParams::Aniso { phi } => kernel_aniso(spec, phi),
        KernelParams::Gyration { psi } => kernel_gyration(spec, psi),
        KernelParams::Isotropic { omega } => kernel_isotropic(spec, omega),
        KernelParams::U2Cart(p) => kernel_u2_cart(spec, p),
        KernelParams::RotationPolar { theta } => kernel_rotation_polar(spec, theta),
        KernelParams::U2Polar(p) => kernel_u2_polar(spec, p),
        KernelParams::MapU => crate::gridmap::kernel_u(spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grids::enumerate_cartesian;
    use crate::linalg::max_abs_diff;
    use std::f64::consts::PI;

    fn spec(t: i64) -> GridSpec {
        GridSpec::new(HalfInt::from_twice(t)).unwrap()
    }

    fn identity(n: usize) -> CMatrix {
        CMatrix::identity(n, n)
    }

    #[test]
    fn zero_parameters_give_identity() {
        let s = spec(4);
        let id = identity(25);
        for k in [
            kernel_rotation_cart(&s, 0.0).unwrap(),
            kernel_aniso(&s, 0.0).unwrap(),
            kernel_gyration(&s, 0.0).unwrap(),
            kernel_isotropic(&s, 0.0).unwrap(),
            kernel_u2_cart(&s, EulerParams::identity()).unwrap(),
            kernel_rotation_polar(&s, 0.0).unwrap(),
            kernel_u2_polar(&s, EulerParams::identity()).unwrap(),
        ] {
            assert!(max_abs_diff(k.matrix(), &id) < 1e-12, "{}", k.params.name());
        }
    }

    #[test]
    fn rotation_by_pi_is_point_reflection() {
        let s = spec(4);
        let r = kernel_rotation_cart(&s, PI).unwrap();
        let pts = enumerate_cartesian(&s);
        let mut p = CMatrix::zeros(25, 25);
        for (i, q) in pts.iter().enumerate() {
            p[(s.cart_index(-q.qx, -q.qy).unwrap(), i)] = Complex64::new(1.0, 0.0);
        }
        assert!(max_abs_diff(r.matrix(), &p) < 1e-10);
        assert!(r.matrix().iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn aniso_and_iso_special_angles() {
        let s = spec(4);
        assert!(max_abs_diff(kernel_aniso(&s, PI).unwrap().matrix(), &identity(25)) < 1e-12);
        assert!(max_abs_diff(kernel_isotropic(&s, PI).unwrap().matrix(), &identity(25)) < 1e-12);
    }

    #[test]
    fn isotropic_is_central() {
        let s = spec(4);
        let k = kernel_isotropic(&s, 0.9).unwrap();
        let r = kernel_rotation_cart(&s, 0.3).unwrap();
        let kr = linalg::mul(k.matrix(), r.matrix());
        let rk = linalg::mul(r.matrix(), k.matrix());
        assert!(max_abs_diff(&kr, &rk) < 1e-10);
    }

    #[test]
    fn gyration_routes_agree() {
        let s = spec(4);
        let a = kernel_gyration(&s, 0.4).unwrap();
        let b =
            cart_kernel_from_modes(&s, KernelParams::Gyration { psi: 0.4 }, &gyration_modes_explicit(&s, 0.4).unwrap())
                .unwrap();
        assert!(max_abs_diff(a.matrix(), b.matrix()) < 1e-10);
    }

    #[test]
    fn u2_reduces_to_rotation() {
        let s = spec(4);
        let u = kernel_u2_cart(&s, EulerParams::new(0.0, 0.0, 1.4, 0.0).unwrap()).unwrap();
        let r = kernel_rotation_cart(&s, 0.7).unwrap();
        assert!(max_abs_diff(u.matrix(), r.matrix()) < 1e-10);
    }

    #[test]
    fn euler_roundtrip_through_su2() {
        for p in [
            EulerParams::new(0.1, 0.4, 1.1, -2.0).unwrap(),
            EulerParams::new(0.0, 3.0, 0.0, 0.0).unwrap(),
            EulerParams::new(0.0, 1.0, PI, 0.5).unwrap(),
            EulerParams::new(0.0, 5.9, 2.5, 6.1).unwrap(),
        ] {
            let u = p.su2();
            let q = EulerParams::from_su2(p.omega, &u);
            assert!(su2_dist(&q.su2(), &u) < 1e-13, "{p:?} -> {q:?}");
        }
    }

    #[test]
    fn polar_rotation_shifts_rings() {
        let s = spec(6);
        let k = kernel_rotation_polar(&s, 2.0 * PI / 5.0).unwrap();
        // Ring ρ = 2 has five points; the kernel moves k′ to k′ + 1.
        for (a, ka) in (-2i64..=2).enumerate() {
            for (b, kb) in (-2i64..=2).enumerate() {
                let want = if (ka - kb - 1).rem_euclid(5) == 0 { 1.0 } else { 0.0 };
                assert!((k.matrix()[(4 + a, 4 + b)].re - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn kernel_codes_roundtrip() {
        let e = EulerParams::new(0.1, 0.2, 0.3, 0.4).unwrap();
        for p in [
            KernelParams::RotationCart { theta: 0.5 },
            KernelParams::Aniso { phi: 0.5 },
            KernelParams::Gyration { psi: 0.5 },
            KernelParams::Isotropic { omega: 0.5 },
            KernelParams::U2Cart(e),
            KernelParams::RotationPolar { theta: 0.5 },
            KernelParams::U2Polar(e),
            KernelParams::MapU,
        ] {
            assert_eq!(KernelParams::from_code(p.code(), p.values()).unwrap(), p);
        }
        assert!(KernelParams::from_code(9, [0.0; 4]).is_err());
    }

    #[test]
    fn non_finite_angles_rejected() {
        let s = spec(2);
        assert!(kernel_rotation_cart(&s, f64::NAN).is_err());
        assert!(kernel_u2_cart(&s, EulerParams { omega: f64::INFINITY, ..Default::default() }).is_err());
    }
}
