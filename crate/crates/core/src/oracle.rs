//! Brute-force ground truth: explicit generator matrices and matrix
//! exponentials by Hermitian eigendecomposition.
//!
//! # Sign convention of the su(2) generators
//!
//! Position is `Q = diag(−j, …, j)` and momentum has
//! `P_{m,m+1} = −(i/2)√((j−m)(j+m+1))`, `P_{m,m−1} = +(i/2)√((j+m)(j−m+1))`.
//! The pseudo-energy is taken with negative off-diagonals,
//! `K_{m,m±1} = −½√(…)`, which is the sign that satisfies
//!
//! ```text
//! [K, Q] = −iP,   [K, P] = iQ,   [Q, P] = −iK
//! ```
//!
//! with this P. The opposite sign of K would require the opposite sign of P;
//! the two choices are related by the gauge `S = diag((−1)^{j+q})`. With the
//! sign used here the ground state Ψ_0 of K is the smooth binomial profile
//! and K Ψ_n = (n − j) Ψ_n.
//!
//! # so(4) pattern
//!
//! The 2D generators are assembled as
//!
//! ```text
//! J12 = Kx + Ky   J13 = −Px − Py   J14 = Qx − Qy
//!                 J23 = Qx + Qy    J24 = Px − Py
//!                                  J34 = Kx − Ky
//! ```
//!
//! The polar pattern reads the same matrices as K, −P°x, −P°y, Q°x, Q°y and an
//! abstract M, so the radius Casimir is R(R+1) = J23² + J24² + J34². The
//! rotation generator acting on images is not J34 but the imported M of
//! [`build_imported_m`]; the two are validated separately.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::cart_basis::mode_table;
use crate::error::{domain, Error, Result};
use crate::grids::{block_spin, GridSpec};
use crate::linalg::{self, CMatrix};
use crate::specfun::HalfInt;
use crate::tolerances::{EXPM_UNITARITY, HERMITIAN};

/// Largest grid side on which the oracle runs by default.
pub const ORACLE_MAX_SIDE: usize = 16;

/// Basis in which a generator matrix is expressed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    Position1D,
    Position2D,
    CartesianModes,
}

/// A named Hermitian matrix.
#[derive(Clone, Debug)]
pub struct GeneratorMatrix {
    pub name: String,
    pub space: Space,
    pub matrix: CMatrix,
}

impl GeneratorMatrix {
    /// Wrap a matrix, rejecting it unless Hermitian to 1e−13 relative to its largest entry.
    pub fn new(name: impl Into<String>, space: Space, matrix: CMatrix) -> Result<Self> {
        let name = name.into();
        let scale = linalg::max_abs(&matrix).max(1.0);
        let defect = linalg::hermitian_defect(&matrix);
        if !matrix.is_square() || defect.is_nan() || defect > HERMITIAN * scale {
            return Err(Error::NotHermitian { name, defect });
        }
        Ok(GeneratorMatrix { name, space, matrix })
    }
}

fn check_cap(spec: &GridSpec) -> Result<()> {
    if spec.side() > ORACLE_MAX_SIDE {
        return domain(format!("oracle is capped at N ≤ {ORACLE_MAX_SIDE}, got N = {}", spec.side()));
    }
    Ok(())
}

/// Position Q, momentum P and pseudo-energy K of spin j, rows and columns m = −j … j.
pub fn build_su2_matrices(j: HalfInt) -> Result<(GeneratorMatrix, GeneratorMatrix, GeneratorMatrix)> {
    if j.twice() < 1 {
        return domain(format!("su(2) matrices need j ≥ 1/2, got {j}"));
    }
    let dim = (j.twice() + 1) as usize;
    let jf = j.as_f64();
    let mut q = CMatrix::zeros(dim, dim);
    let mut p = CMatrix::zeros(dim, dim);
    let mut k = CMatrix::zeros(dim, dim);
    for r in 0..dim {
        let m = r as f64 - jf;
        q[(r, r)] = Complex64::new(m, 0.0);
        if r + 1 < dim {
            let up = 0.5 * ((jf - m) * (jf + m + 1.0)).sqrt();
            p[(r, r + 1)] = Complex64::new(0.0, -up);
            k[(r, r + 1)] = Complex64::new(-up, 0.0);
        }
        if r > 0 {
            let down = 0.5 * ((jf + m) * (jf - m + 1.0)).sqrt();
            p[(r, r - 1)] = Complex64::new(0.0, down);
            k[(r, r - 1)] = Complex64::new(-down, 0.0);
        }
    }
    Ok((
        GeneratorMatrix::new("Q", Space::Position1D, q)?,
        GeneratorMatrix::new("P", Space::Position1D, p)?,
        GeneratorMatrix::new("K", Space::Position1D, k)?,
    ))
}

/// The 2D generators: x and y copies and the six abstract J_{i,i′}.
#[derive(Clone, Debug)]
pub struct So4Generators {
    pub qx: GeneratorMatrix,
    pub px: GeneratorMatrix,
    pub kx: GeneratorMatrix,
    pub qy: GeneratorMatrix,
    pub py: GeneratorMatrix,
    pub ky: GeneratorMatrix,
    /// J12, J13, J14, J23, J24, J34 in that order.
    pub pattern: [GeneratorMatrix; 6],
}

/// Index pairs (i, i′) of [`So4Generators::pattern`].
pub const PATTERN_INDICES: [(usize, usize); 6] = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];

impl So4Generators {
    pub fn j(&self, i: usize, k: usize) -> &GeneratorMatrix {
        let pos = PATTERN_INDICES.iter().position(|&p| p == (i, k)).expect("pattern index (i, i′) with 1 ≤ i < i′ ≤ 4");
        &self.pattern[pos]
    }

    /// Radius Casimir R(R+1) = (Q°x)² + (Q°y)² + M² = J23² + J24² + J34².
    pub fn r_casimir(&self) -> Result<GeneratorMatrix> {
        let sq = |g: &GeneratorMatrix| linalg::mul(&g.matrix, &g.matrix);
        let total = sq(self.j(2, 3)) + sq(self.j(2, 4)) + sq(self.j(3, 4));
        GeneratorMatrix::new("R(R+1)", Space::Position2D, total)
    }
}

pub fn build_so4_generators(spec: &GridSpec) -> Result<So4Generators> {
    check_cap(spec)?;
    let (q, p, k) = build_su2_matrices(spec.j())?;
    let id = CMatrix::identity(spec.side(), spec.side());
    let lift = |g: &GeneratorMatrix, x: bool| -> Result<GeneratorMatrix> {
        let m = if x { g.matrix.kronecker(&id) } else { id.kronecker(&g.matrix) };
        let suffix = if x { "x" } else { "y" };
        GeneratorMatrix::new(format!("{}{suffix}", g.name), Space::Position2D, m)
    };
    let (qx, px, kx) = (lift(&q, true)?, lift(&p, true)?, lift(&k, true)?);
    let (qy, py, ky) = (lift(&q, false)?, lift(&p, false)?, lift(&k, false)?);
    let g = |name: &str, m: CMatrix| GeneratorMatrix::new(name, Space::Position2D, m);
    let pattern = [
        g("J12", &kx.matrix + &ky.matrix)?,
        g("J13", -(&px.matrix + &py.matrix))?,
        g("J14", &qx.matrix - &qy.matrix)?,
        g("J23", &qx.matrix + &qy.matrix)?,
        g("J24", &px.matrix - &py.matrix)?,
        g("J34", &kx.matrix - &ky.matrix)?,
    ];
    Ok(So4Generators { qx, px, kx, qy, py, ky, pattern })
}

/// Imported rotation generator M on the Cartesian modes.
///
/// On the block with total mode n and spin J_n, with μ = (n_x − n_y)/2:
///
/// ```text
/// M |n_x, n_y⟩ = −i √((J−μ)(J+μ+1)) |n_x+1, n_y−1⟩ + i √((J+μ)(J−μ+1)) |n_x−1, n_y+1⟩
/// ```
///
/// For n ≤ 2j the magnitudes are √(n_y(n_x+1)) and √(n_x(n_y+1)). The
/// exponential e^{−iθM} is the rotation kernel R□(θ) in the mode basis.
pub fn build_imported_m(spec: &GridSpec) -> Result<GeneratorMatrix> {
    check_cap(spec)?;
    let side = spec.side();
    let mut m = CMatrix::zeros(spec.len(), spec.len());
    for nx in 0..side {
        for ny in 0..side {
            let n = (nx + ny) as i64;
            let spin = block_spin(spec, n).as_f64();
            let mu = (nx as f64 - ny as f64) / 2.0;
            let col = nx * side + ny;
            if ny >= 1 && nx + 1 < side {
                let amp = ((spin - mu) * (spin + mu + 1.0)).sqrt();
                m[((nx + 1) * side + ny - 1, col)] = Complex64::new(0.0, -amp);
            }
            if nx >= 1 && ny + 1 < side {
                let amp = ((spin + mu) * (spin - mu + 1.0)).sqrt();
                m[((nx - 1) * side + ny + 1, col)] = Complex64::new(0.0, amp);
            }
        }
    }
    GeneratorMatrix::new("M", Space::CartesianModes, m)
}

/// Real coupling matrix with entries √(n_y(n_x+1)) and √(n_x(n_y+1)) on every block.
///
/// On the lower half of the rhombus this is 2J_x of the μ-ladder, the
/// generator of gyrations (up to sign) rather than of rotations.
pub fn build_real_coupling(spec: &GridSpec) -> Result<GeneratorMatrix> {
    check_cap(spec)?;
    let side = spec.side();
    let mut m = CMatrix::zeros(spec.len(), spec.len());
    for nx in 0..side {
        for ny in 0..side {
            let col = nx * side + ny;
            if ny >= 1 && nx + 1 < side {
                m[((nx + 1) * side + ny - 1, col)] = Complex64::new(((ny * (nx + 1)) as f64).sqrt(), 0.0);
            }
            if nx >= 1 && ny + 1 < side {
                m[((nx - 1) * side + ny + 1, col)] = Complex64::new(((nx * (ny + 1)) as f64).sqrt(), 0.0);
            }
        }
    }
    GeneratorMatrix::new("M_real", Space::CartesianModes, m)
}

/// A mode-basis generator moved to the 2D position basis: Ψ□ G Ψ□ᵀ.
pub fn to_position_basis(spec: &GridSpec, g: &GeneratorMatrix) -> Result<GeneratorMatrix> {
    if g.space != Space::CartesianModes {
        return domain(format!("{} is not a mode-basis generator", g.name));
    }
    let p = mode_table(spec)?;
    GeneratorMatrix::new(g.name.clone(), Space::Position2D, linalg::real_similarity(&p, &g.matrix))
}

/// Diagonal mode-basis generator with entry f(n_x, n_y).
pub fn diagonal_mode_generator(
    spec: &GridSpec,
    name: &str,
    f: impl Fn(usize, usize) -> f64,
) -> Result<GeneratorMatrix> {
    let side = spec.side();
    let mut m = CMatrix::zeros(spec.len(), spec.len());
    for nx in 0..side {
        for ny in 0..side {
            m[(nx * side + ny, nx * side + ny)] = Complex64::new(f(nx, ny), 0.0);
        }
    }
    GeneratorMatrix::new(name, Space::CartesianModes, m)
}

/// e^{−itG} by Hermitian eigendecomposition.
pub fn numeric_expm_hermitian(g: &GeneratorMatrix, t: f64) -> Result<CMatrix> {
    expm_hermitian(&g.matrix, t)
}

/// e^{−itG} for a raw matrix, rejected unless Hermitian.
pub fn expm_hermitian(g: &CMatrix, t: f64) -> Result<CMatrix> {
    let checked = GeneratorMatrix::new("G", Space::Position2D, g.clone())?;
    if !t.is_finite() {
        return domain("exponent time must be finite");
    }
    let eig = SymmetricEigen::new(checked.matrix);
    let v = eig.eigenvectors;
    let phases = eig.eigenvalues.map(|lambda| Complex64::from_polar(1.0, -t * lambda));
    let mut scaled = v.clone();
    for (c, z) in phases.iter().enumerate() {
        for r in 0..scaled.nrows() {
            scaled[(r, c)] *= z;
        }
    }
    let out = linalg::mul_adjoint(&scaled, &v);
    let defect = linalg::unitarity_defect(&out);
    if defect > EXPM_UNITARITY {
        return Err(Error::NotUnitary { what: "expm".into(), defect, tol: EXPM_UNITARITY });
    }
    Ok(out)
}

/// Sorted real eigenvalues of a generator.
pub fn spectrum(g: &GeneratorMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(g.matrix.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Commutator [A, B].
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    linalg::mul(a, b) - linalg::mul(b, a)
}
