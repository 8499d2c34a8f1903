//! Closed forms against brute-force constructions: matrix exponentials of
//! explicit generators and dense diagonalization.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_8};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use fklens::fourier_group::{
    kernel_aniso, kernel_gyration, kernel_isotropic, kernel_rotation_cart, kernel_u2_cart, EulerParams,
};
use fklens::grids::GridSpec;
use fklens::linalg::{self, max_abs_diff, CMatrix};
use fklens::oracle::{
    build_imported_m, build_real_coupling, build_so4_generators, build_su2_matrices, diagonal_mode_generator,
    expm_hermitian, numeric_expm_hermitian, spectrum, to_position_basis,
};
use fklens::specfun::{clebsch_gordan, wigner_little_d, HalfInt};

fn h(t: i64) -> HalfInt {
    HalfInt::from_twice(t)
}

fn spec(t: i64) -> GridSpec {
    GridSpec::new(h(t)).unwrap()
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[test]
fn little_d_is_exponential_of_momentum() {
    // P = −J_y, so d^j(β) = exp(−iβJ_y) = exp(iβP).
    for t in [1, 2, 5, 8, 13, 16, 40, 64] {
        let j = h(t);
        let (_, p, _) = build_su2_matrices(j).unwrap();
        for beta in [0.4, FRAC_PI_2, 2.6] {
            let e = numeric_expm_hermitian(&p, -beta).unwrap();
            let mut worst: f64 = 0.0;
            for r in 0..=t {
                for col in 0..=t {
                    let d = wigner_little_d(j, h(2 * r - t), h(2 * col - t), beta).unwrap();
                    worst = worst.max((e[(r as usize, col as usize)] - c(d)).norm());
                }
            }
            assert!(worst < 1e-10, "2j = {t}, β = {beta}: {worst:e}");
        }
    }
}

/// Standard angular momentum matrices (J_z, J_+) in the m-ascending basis.
fn jz_jplus(t: i64) -> (DMatrix<f64>, DMatrix<f64>) {
    let dim = (t + 1) as usize;
    let jf = t as f64 / 2.0;
    let mut jz = DMatrix::zeros(dim, dim);
    let mut jp = DMatrix::zeros(dim, dim);
    for r in 0..dim {
        let m = r as f64 - jf;
        jz[(r, r)] = m;
        if r + 1 < dim {
            jp[(r + 1, r)] = ((jf - m) * (jf + m + 1.0)).sqrt();
        }
    }
    (jz, jp)
}

#[test]
fn clebsch_gordan_from_product_space() {
    for t1 in 0..=8i64 {
        for t2 in 0..=8i64 {
            let (z1, p1) = jz_jplus(t1);
            let (z2, p2) = jz_jplus(t2);
            let (i1, i2) = (DMatrix::identity(z1.nrows(), z1.nrows()), DMatrix::identity(z2.nrows(), z2.nrows()));
            let jz = z1.kronecker(&i2) + i1.kronecker(&z2);
            let jp = p1.kronecker(&i2) + i1.kronecker(&p2);
            let jm = jp.transpose();
            let j2 = &jm * &jp + &jz * &jz + &jz;
            for tj in ((t1 - t2).abs()..=t1 + t2).step_by(2) {
                let big = tj as f64 / 2.0;
                let mut v = highest_weight(&j2, &jz, big);
                // Condon–Shortley: ⟨j1 j1; j2 J−j1 | J J⟩ > 0.
                let a = (t1 as usize, (tj - t1 + t2) as usize / 2);
                let anchor = a.0 * (t2 as usize + 1) + a.1;
                if v[anchor] < 0.0 {
                    v = -v;
                }
                let mut big_m = big;
                loop {
                    for r1 in 0..=t1 {
                        for r2 in 0..=t2 {
                            let (m1, m2) = (h(2 * r1 - t1), h(2 * r2 - t2));
                            if (m1.as_f64() + m2.as_f64() - big_m).abs() > 1e-9 {
                                continue;
                            }
                            let want = v[(r1 * (t2 + 1) + r2) as usize];
                            let got = clebsch_gordan(h(t1), m1, h(t2), m2, h(tj), h((2.0 * big_m) as i64)).unwrap();
                            assert!((got - want).abs() < 1e-12, "({t1}/2 {m1}; {t2}/2 {m2} | {tj}/2 {big_m})");
                        }
                    }
                    if big_m <= -big {
                        break;
                    }
                    v = (&jm * &v) / ((big + big_m) * (big - big_m + 1.0)).sqrt();
                    big_m -= 1.0;
                }
            }
        }
    }
}

/// |J, J⟩ spans the kernel of the positive semidefinite (J² − J(J+1))² + (J_z − J)².
fn highest_weight(j2: &DMatrix<f64>, jz: &DMatrix<f64>, big: f64) -> nalgebra::DVector<f64> {
    let n = j2.nrows();
    let a = j2 - DMatrix::identity(n, n) * (big * (big + 1.0));
    let dz = jz - DMatrix::identity(n, n) * big;
    let eig = SymmetricEigen::new(&a * &a + &dz * &dz);
    let k = eig.eigenvalues.iter().enumerate().min_by(|x, y| x.1.total_cmp(y.1)).unwrap().0;
    eig.eigenvectors.column(k).into_owned()
}

#[test]
fn cartesian_kernels_are_generator_exponentials() {
    for t in 1..=6 {
        let s = spec(t);
        let two_j = t as f64;
        let m = to_position_basis(&s, &build_imported_m(&s).unwrap()).unwrap().matrix;
        let diff = to_position_basis(&s, &diagonal_mode_generator(&s, "nx−ny", |x, y| x as f64 - y as f64).unwrap())
            .unwrap()
            .matrix;
        let total = to_position_basis(&s, &diagonal_mode_generator(&s, "nx+ny", |x, y| (x + y) as f64).unwrap())
            .unwrap()
            .matrix;
        let (theta, phi, psi, omega) = (0.9, -1.3, 2.1, 0.6);
        let rot = |a: f64| expm_hermitian(&m, a).unwrap();
        let ani = |a: f64| expm_hermitian(&diff, 2.0 * a).unwrap();
        let iso = |a: f64| expm_hermitian(&total, 2.0 * a).unwrap();

        assert!(max_abs_diff(kernel_rotation_cart(&s, theta).unwrap().matrix(), &rot(theta)) < 1e-9);
        assert!(max_abs_diff(kernel_aniso(&s, phi).unwrap().matrix(), &ani(phi)) < 1e-9);
        assert!(max_abs_diff(kernel_isotropic(&s, omega).unwrap().matrix(), &iso(omega)) < 1e-9);
        let gyr = linalg::mul(&linalg::mul(&ani(FRAC_PI_8), &rot(psi)), &ani(-FRAC_PI_8));
        assert!(max_abs_diff(kernel_gyration(&s, psi).unwrap().matrix(), &gyr) < 1e-9);

        let p = EulerParams::new(omega, phi, theta, psi).unwrap();
        let chain = [iso(omega / 2.0), ani(phi / 4.0), rot(theta / 2.0), ani(psi / 4.0)]
            .iter()
            .fold(CMatrix::identity(s.len(), s.len()), |acc, x| linalg::mul(&acc, x));
        let u2 = chain * Complex64::from_polar(1.0, two_j * omega);
        assert!(max_abs_diff(kernel_u2_cart(&s, p).unwrap().matrix(), &u2) < 1e-9);
    }
}

#[test]
fn so4_pattern_generators() {
    let s = spec(2);
    let g = build_so4_generators(&s).unwrap();
    let comm = linalg::mul(&g.j(1, 2).matrix, &g.j(3, 4).matrix) - linalg::mul(&g.j(3, 4).matrix, &g.j(1, 2).matrix);
    assert!(linalg::max_abs(&comm) < 1e-13);
    // K□x + K□y has eigenvalue n − 2j with multiplicity min(n, 4j − n) + 1.
    let ev = spectrum(g.j(1, 2));
    let mut want = Vec::new();
    for n in 0..=4i64 {
        want.extend(std::iter::repeat_n((n - 2) as f64, (n.min(4 - n) + 1) as usize));
    }
    for (a, b) in ev.iter().zip(&want) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn imported_m_structure() {
    let s = spec(4);
    let m = build_imported_m(&s).unwrap();
    let total = diagonal_mode_generator(&s, "n", |x, y| (x + y) as f64).unwrap();
    let comm = linalg::mul(&m.matrix, &total.matrix) - linalg::mul(&total.matrix, &m.matrix);
    assert!(linalg::max_abs(&comm) < 1e-14);
    // Block n has eigenvalues −w, −w+2, …, w with w = min(n, 4j − n).
    let side = s.side();
    for n in 0..=8usize {
        let idx: Vec<usize> = (0..side).filter(|&x| n >= x && n - x < side).map(|x| x * side + n - x).collect();
        let block = CMatrix::from_fn(idx.len(), idx.len(), |r, c| m.matrix[(idx[r], idx[c])]);
        let g = fklens::oracle::GeneratorMatrix::new("block", fklens::oracle::Space::CartesianModes, block).unwrap();
        let w = n.min(8 - n) as f64;
        for (k, ev) in spectrum(&g).iter().enumerate() {
            assert!((ev - (-w + 2.0 * k as f64)).abs() < 1e-12);
        }
    }
}

#[test]
fn real_coupling_generates_gyrations_on_lower_half() {
    // A(π/8) M A(π/8)† = −M_real on every block with n ≤ 2j.
    let s = spec(4);
    let m = build_imported_m(&s).unwrap().matrix;
    let real = build_real_coupling(&s).unwrap().matrix;
    let a = fklens::fourier_group::aniso_modes(&s, FRAC_PI_8).to_dense(&s);
    let conj = linalg::mul_adjoint(&linalg::mul(&a, &m), &a);
    let side = s.side();
    for r in 0..s.len() {
        for col in 0..s.len() {
            let n = r / side + r % side;
            if n <= 4 && col / side + col % side <= 4 {
                assert!((conj[(r, col)] + real[(r, col)]).norm() < 1e-13);
            }
        }
    }
}

#[test]
fn expm_of_random_hermitian_is_unitary() {
    let mut state = 0x1234_5678_9abc_def0u64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let a = CMatrix::from_fn(16, 16, |_, _| Complex64::new(next(), next()));
    let g = (&a + a.adjoint()) * c(0.5);
    for t in [0.1, 1.0, 7.5] {
        assert!(linalg::unitarity_defect(&expm_hermitian(&g, t).unwrap()) < 1e-11);
    }
}
