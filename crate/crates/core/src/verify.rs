//! End-to-end invariant suite run by `fklens verify`.
//!
//! Each check reports a measured defect against its tolerance. Checks that
//! need the brute-force oracle are skipped on grids larger than
//! [`crate::oracle::ORACLE_MAX_SIDE`].

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::cart_basis::{lambda_table, psi_square_table};
use crate::error::Result;
use crate::fourier_group::{
    build_kernel, kernel_aniso, kernel_gyration, kernel_isotropic, kernel_rotation_cart, kernel_rotation_polar,
    kernel_u2_cart, EulerParams, Kernel, KernelParams,
};
use crate::gridmap::{cart_to_polar, kernel_u, polar_to_cart, CartImage};
use crate::grids::{enumerate_cartesian, enumerate_ma_rhombus, GridSpec};
use crate::linalg::{self, max_abs, max_abs_diff, unitarity_defect, CMatrix};
use crate::oracle::{
    build_imported_m, build_so4_generators, build_su2_matrices, commutator, expm_hermitian, spectrum,
    to_position_basis, ORACLE_MAX_SIDE, PATTERN_INDICES,
};
use crate::polar_basis::polar_table;
use crate::specfun::{kravchuk_matrix, wigner_d_matrix, wigner_little_d, wigner_little_d_sum, HalfInt};
use crate::tolerances::*;

/// Largest 2j accepted by `fklens verify` unless overridden.
pub const VERIFY_MAX_TWICE_J: i64 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

/// Result of one invariant check.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub group: &'static str,
    pub name: String,
    pub defect: f64,
    pub tol: f64,
    pub status: Status,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct VerifyOptions {
    /// Add a small error to the rotation kernel to prove the suite can fail.
    pub perturb: bool,
}

struct Suite {
    out: Vec<CheckOutcome>,
}

impl Suite {
    fn check(&mut self, group: &'static str, name: impl Into<String>, defect: Result<f64>, tol: f64) {
        let name = name.into();
        let (defect, status) = match defect {
            Ok(d) if d.is_finite() && d < tol => (d, Status::Pass),
            Ok(d) => (d, Status::Fail),
            Err(e) => {
                self.out.push(CheckOutcome {
                    group,
                    name: format!("{name}: {e}"),
                    defect: f64::NAN,
                    tol,
                    status: Status::Fail,
                });
                return;
            }
        };
        self.out.push(CheckOutcome { group, name, defect, tol, status });
    }

    fn skip(&mut self, group: &'static str, name: impl Into<String>) {
        self.out.push(CheckOutcome { group, name: name.into(), defect: 0.0, tol: 0.0, status: Status::Skip });
    }
}

fn scalar(z: f64) -> Complex64 {
    Complex64::new(z, 0.0)
}

fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Permutation sending pixel (q_x, q_y) to (−q_x, −q_y).
pub fn point_reflection(spec: &GridSpec) -> CMatrix {
    let mut p = CMatrix::zeros(spec.len(), spec.len());
    for (i, q) in enumerate_cartesian(spec).iter().enumerate() {
        let r = spec.cart_index(-q.qx, -q.qy).expect("reflected point lies on the grid");
        p[(r, i)] = scalar(1.0);
    }
    p
}

/// Sample parameters used by the suite.
const ANGLES: [f64; 3] = [0.3, 0.7, 2.0];

fn rotation(spec: &GridSpec, theta: f64, perturb: bool) -> Result<CMatrix> {
    let mut m = kernel_rotation_cart(spec, theta)?.into_matrix();
    if perturb {
        m[(0, 0)] += scalar(1e-6);
    }
    Ok(m)
}

fn specfun_checks(s: &mut Suite, spec: &GridSpec) {
    let j = spec.j();
    s.check(
        "specfun",
        "Kravchuk table orthogonal",
        kravchuk_matrix(j).map(|k| unitarity_defect(&linalg::to_complex(&k))),
        TABLE_UNITARITY,
    );
    s.check(
        "specfun",
        "d matrices orthogonal",
        (|| {
            let mut worst: f64 = 0.0;
            for beta in ANGLES {
                worst = worst.max(unitarity_defect(&linalg::to_complex(&wigner_d_matrix(j, beta)?)));
            }
            Ok(worst)
        })(),
        TABLE_UNITARITY,
    );
    s.check(
        "specfun",
        "recurrence d agrees with finite sum",
        (|| {
            let mut worst: f64 = 0.0;
            for m1 in (-j.twice()..=j.twice()).step_by(2) {
                for m2 in (-j.twice()..=j.twice()).step_by(2) {
                    let (a, b) = (HalfInt::from_twice(m1), HalfInt::from_twice(m2));
                    let gap = wigner_little_d(j, a, b, 1.1)? - wigner_little_d_sum(j, a, b, 1.1)?;
                    worst = worst.max(gap.abs());
                }
            }
            Ok(worst)
        })(),
        SPECFUN,
    );
}

fn su2_checks(s: &mut Suite, spec: &GridSpec) {
    if spec.j().twice() < 1 {
        s.skip("oracle-su2", "j = 0 has no su(2) generators");
        return;
    }
    s.check(
        "oracle-su2",
        "[K,Q] = −iP, [K,P] = iQ, [Q,P] = −iK",
        build_su2_matrices(spec.j()).map(|(q, p, k)| {
            let i = Complex64::new(0.0, 1.0);
            let (q, p, k) = (q.matrix, p.matrix, k.matrix);
            max_abs_diff(&commutator(&k, &q), &(&p * -i))
                .max(max_abs_diff(&commutator(&k, &p), &(&q * i)))
                .max(max_abs_diff(&commutator(&q, &p), &(&k * -i)))
        }),
        1e-12,
    );
    s.check(
        "oracle-su2",
        "K eigenvectors are the Kravchuk functions",
        (|| {
            let (_, _, k) = build_su2_matrices(spec.j())?;
            let psi = linalg::to_complex(&kravchuk_matrix(spec.j())?);
            let jf = spec.j().as_f64();
            let diag = CMatrix::from_diagonal(&DVector::from_fn(spec.side(), |n, _| scalar(n as f64 - jf)));
            Ok(max_abs_diff(&linalg::mul(&k.matrix, &psi), &linalg::mul(&psi, &diag)))
        })(),
        EIGEN_RESIDUAL,
    );
}

fn so4_checks(s: &mut Suite, spec: &GridSpec) {
    if spec.side() > ORACLE_MAX_SIDE {
        s.skip("oracle-so4", format!("N > {ORACLE_MAX_SIDE}"));
        return;
    }
    if spec.j().twice() < 1 {
        s.skip("oracle-so4", "j = 0 has no so(4) generators");
        return;
    }
    s.check(
        "oracle-so4",
        "commutators follow the row/column pattern",
        build_so4_generators(spec).map(|g| {
            let mut worst: f64 = 0.0;
            for (a, &(i1, i2)) in PATTERN_INDICES.iter().enumerate() {
                for (b, &(k1, k2)) in PATTERN_INDICES.iter().enumerate() {
                    let size = max_abs(&commutator(&g.pattern[a].matrix, &g.pattern[b].matrix));
                    let shared = [i1, i2].iter().filter(|x| **x == k1 || **x == k2).count();
                    // Commuting pairs must give zero; the others a commutator of order one.
                    let defect = if shared == 1 { (size < 0.25) as u8 as f64 } else { size };
                    worst = worst.max(defect);
                }
            }
            worst
        }),
        1e-12,
    );
    s.check(
        "oracle-so4",
        "R(R+1) spectrum is ρ(ρ+1) with multiplicity 2ρ+1",
        (|| {
            let g = build_so4_generators(spec)?;
            let ev = spectrum(&g.r_casimir()?);
            let want: Vec<f64> = (0..=spec.max_rho())
                .flat_map(|r| std::iter::repeat_n((r * (r + 1)) as f64, (2 * r + 1) as usize))
                .collect();
            Ok(ev.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        })(),
        ORACLE_AGREEMENT,
    );
}

fn basis_checks(s: &mut Suite, spec: &GridSpec) {
    s.check(
        "bases",
        "Ψ□ table orthogonal",
        psi_square_table(spec).map(|t| unitarity_defect(&t.values)),
        TABLE_UNITARITY,
    );
    s.check("bases", "Λ□ table unitary", lambda_table(spec).map(|t| unitarity_defect(&t.values)), TABLE_UNITARITY);
    s.check("bases", "Ψ° table unitary", polar_table(spec).map(|t| unitarity_defect(&t.values)), TABLE_UNITARITY);
    let labels = enumerate_ma_rhombus(spec);
    let m_phase = |theta: f64| {
        CMatrix::from_diagonal(&DVector::from_fn(labels.len(), |i, _| {
            Complex64::from_polar(1.0, -labels[i].m_or_mu.as_f64() * theta)
        }))
    };
    let m_diag = CMatrix::from_diagonal(&DVector::from_fn(labels.len(), |i, _| scalar(labels[i].m_or_mu.as_f64())));
    if spec.side() <= ORACLE_MAX_SIDE {
        s.check(
            "bases",
            "Λ□ columns are eigenvectors of the imported M",
            (|| {
                let m = to_position_basis(spec, &build_imported_m(spec)?)?;
                let l = lambda_table(spec)?.values;
                Ok(max_abs_diff(&linalg::mul(&m.matrix, &l), &linalg::mul(&l, &m_diag)))
            })(),
            EIGEN_RESIDUAL,
        );
    } else {
        s.skip("bases", format!("imported M eigenvectors: N > {ORACLE_MAX_SIDE}"));
    }
    s.check(
        "bases",
        "Ψ° columns pick up e^{−imθ} under R°(θ)",
        (|| {
            let t = polar_table(spec)?.values;
            let mut worst: f64 = 0.0;
            for theta in ANGLES {
                let r = kernel_rotation_polar(spec, theta)?;
                let phases = m_phase(theta);
                worst = worst.max(max_abs_diff(&linalg::mul(r.matrix(), &t), &linalg::mul(&t, &phases)));
            }
            Ok(worst)
        })(),
        EIGEN_RESIDUAL,
    );
}

fn all_kernels() -> Vec<KernelParams> {
    let e = EulerParams { omega: 0.4, phi: 1.3, theta: 0.9, psi: -0.6 };
    vec![
        KernelParams::RotationCart { theta: 0.7 },
        KernelParams::Aniso { phi: 0.45 },
        KernelParams::Gyration { psi: 1.1 },
        KernelParams::Isotropic { omega: 0.8 },
        KernelParams::U2Cart(e),
        KernelParams::RotationPolar { theta: 2.3 },
        KernelParams::U2Polar(e),
        KernelParams::MapU,
    ]
}

fn kernel_checks(s: &mut Suite, spec: &GridSpec, opts: VerifyOptions) {
    for params in all_kernels() {
        let defect = if opts.perturb && matches!(params, KernelParams::RotationCart { .. }) {
            rotation(spec, 0.7, true).map(|m| unitarity_defect(&m))
        } else {
            build_kernel(spec, params).map(|k: Kernel| unitarity_defect(k.matrix()))
        };
        s.check("kernels", format!("{} unitary", params.name()), defect, KERNEL_UNITARITY);
    }
}

fn oracle_kernel_checks(s: &mut Suite, spec: &GridSpec, opts: VerifyOptions) {
    if spec.side() > ORACLE_MAX_SIDE || spec.j().twice() < 1 {
        s.skip("oracle-kernels", "grid outside the oracle range");
        return;
    }
    s.check(
        "oracle-kernels",
        "R□(θ) = exp(−iθM)",
        (|| {
            let m = to_position_basis(spec, &build_imported_m(spec)?)?;
            let mut worst: f64 = 0.0;
            for theta in ANGLES {
                worst =
                    worst.max(max_abs_diff(&rotation(spec, theta, opts.perturb)?, &expm_hermitian(&m.matrix, theta)?));
            }
            Ok(worst)
        })(),
        ORACLE_AGREEMENT,
    );
    s.check(
        "oracle-kernels",
        "A□(φ) = exp(−2iφ(Kx − Ky))",
        build_so4_generators(spec).and_then(|g| {
            let mut worst: f64 = 0.0;
            for phi in ANGLES {
                let k = kernel_aniso(spec, phi)?;
                worst = worst.max(max_abs_diff(k.matrix(), &expm_hermitian(&g.j(3, 4).matrix, 2.0 * phi)?));
            }
            Ok(worst)
        }),
        ORACLE_AGREEMENT,
    );
    s.check(
        "oracle-kernels",
        "K□(ω) = exp(−2iω(Kx + Ky + 2j))",
        build_so4_generators(spec).and_then(|g| {
            let shift = identity(spec.len()) * scalar(spec.max_rho() as f64);
            let h = &g.j(1, 2).matrix + shift;
            let mut worst: f64 = 0.0;
            for omega in ANGLES {
                let k = kernel_isotropic(spec, omega)?;
                worst = worst.max(max_abs_diff(k.matrix(), &expm_hermitian(&h, 2.0 * omega)?));
            }
            Ok(worst)
        }),
        ORACLE_AGREEMENT,
    );
    s.check(
        "oracle-kernels",
        "G□(ψ) = exp(−iψ A(π/8) M A(π/8)†)",
        (|| {
            let m = to_position_basis(spec, &build_imported_m(spec)?)?;
            let a = kernel_aniso(spec, std::f64::consts::FRAC_PI_8)?;
            let h = linalg::mul_adjoint(&linalg::mul(a.matrix(), &m.matrix), a.matrix());
            let h = (&h + h.adjoint()) * scalar(0.5);
            let mut worst: f64 = 0.0;
            for psi in ANGLES {
                worst = worst.max(max_abs_diff(kernel_gyration(spec, psi)?.matrix(), &expm_hermitian(&h, psi)?));
            }
            Ok(worst)
        })(),
        ORACLE_AGREEMENT,
    );
}

fn group_law_checks(s: &mut Suite, spec: &GridSpec, opts: VerifyOptions) {
    let (a, b) = (0.35, 1.2);
    type Family = fn(&GridSpec, f64) -> Result<Kernel>;
    let families: [(&str, Family); 5] = [
        ("R□", kernel_rotation_cart),
        ("A□", kernel_aniso),
        ("G□", kernel_gyration),
        ("K□", kernel_isotropic),
        ("R°", kernel_rotation_polar),
    ];
    for (name, f) in families {
        s.check(
            "group-laws",
            format!("{name}(a) {name}(b) = {name}(a+b)"),
            (|| {
                let mut ka = f(spec, a)?.into_matrix();
                if opts.perturb && name == "R□" {
                    ka = rotation(spec, a, true)?;
                }
                let prod = linalg::mul(&ka, f(spec, b)?.matrix());
                Ok(max_abs_diff(&prod, f(spec, a + b)?.matrix()))
            })(),
            GROUP_LAW,
        );
    }
    s.check(
        "group-laws",
        "D□(g) D□(h) = D□(gh)",
        (|| {
            let g = EulerParams::new(0.3, 0.9, 1.4, -0.5)?;
            let h = EulerParams::new(-1.1, 2.2, 0.6, 0.8)?;
            let prod = linalg::mul(kernel_u2_cart(spec, g)?.matrix(), kernel_u2_cart(spec, h)?.matrix());
            Ok(max_abs_diff(&prod, kernel_u2_cart(spec, g.compose(&h))?.matrix()))
        })(),
        GROUP_LAW,
    );
}

fn polar_checks(s: &mut Suite, spec: &GridSpec) {
    s.check(
        "polar",
        "R° at θ = 2πl/(2ρ+1) shifts ring ρ by l",
        (|| {
            let mut worst: f64 = 0.0;
            for rho in 0..=spec.max_rho() {
                let len = 2 * rho + 1;
                let base = (rho * rho) as usize;
                for l in 0..len {
                    let k = kernel_rotation_polar(spec, 2.0 * PI * l as f64 / len as f64)?;
                    for a in 0..len {
                        for b in 0..len {
                            let want = if (a - b - l).rem_euclid(len) == 0 { 1.0 } else { 0.0 };
                            let z = k.matrix()[(base + a as usize, base + b as usize)];
                            worst = worst.max((z - scalar(want)).norm());
                        }
                    }
                }
            }
            Ok(worst)
        })(),
        RING_SHIFT,
    );
    s.check(
        "polar",
        "U is real",
        kernel_u(spec).map(|u| u.matrix().iter().map(|z| z.im.abs()).fold(0.0, f64::max)),
        TABLE_UNITARITY,
    );
    s.check(
        "polar",
        "Cartesian → polar → Cartesian round trip",
        (|| {
            let values: Vec<f64> = (0..spec.len()).map(|i| ((i * 37 + 11) % 23) as f64 / 23.0).collect();
            let img = CartImage::from_real(spec.clone(), &values)?;
            let back = polar_to_cart(&cart_to_polar(&img)?)?;
            Ok((back.pixels - img.pixels).iter().map(|z| z.norm()).fold(0.0, f64::max))
        })(),
        ROUND_TRIP,
    );
}

fn parity_checks(s: &mut Suite, spec: &GridSpec, opts: VerifyOptions) {
    s.check(
        "parity",
        "R□(π) is the point reflection",
        rotation(spec, PI, opts.perturb).map(|r| max_abs_diff(&r, &point_reflection(spec))),
        PARITY,
    );
    s.check(
        "parity",
        "R□(2π) is the identity",
        rotation(spec, 2.0 * PI, opts.perturb).map(|r| max_abs_diff(&r, &identity(spec.len()))),
        PARITY,
    );
}

/// Run every invariant group on `spec`.
pub fn run_suite(spec: &GridSpec, opts: VerifyOptions) -> Vec<CheckOutcome> {
    let mut s = Suite { out: Vec::new() };
    specfun_checks(&mut s, spec);
    su2_checks(&mut s, spec);
    so4_checks(&mut s, spec);
    basis_checks(&mut s, spec);
    kernel_checks(&mut s, spec, opts);
    oracle_kernel_checks(&mut s, spec, opts);
    group_law_checks(&mut s, spec, opts);
    polar_checks(&mut s, spec);
    parity_checks(&mut s, spec, opts);
    s.out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_and_detects_perturbation() {
        for t in [1, 4] {
            let spec = GridSpec::new(HalfInt::from_twice(t)).unwrap();
            let clean = run_suite(&spec, VerifyOptions::default());
            for c in &clean {
                assert_ne!(c.status, Status::Fail, "{} / {}: {:e}", c.group, c.name, c.defect);
            }
            let dirty = run_suite(&spec, VerifyOptions { perturb: true });
            assert!(dirty.iter().any(|c| c.status == Status::Fail));
        }
    }
}
