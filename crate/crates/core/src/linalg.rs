//! Dense complex helpers built on real `f64` products.
//!
//! nalgebra dispatches `f64` products to a blocked GEMM but multiplies complex
//! matrices with a generic loop, so complex products are split into four real
//! products here. Summation order is fixed, which keeps builds deterministic.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

pub fn split(a: &CMatrix) -> (RMatrix, RMatrix) {
    (a.map(|z| z.re), a.map(|z| z.im))
}

pub fn join(re: &RMatrix, im: &RMatrix) -> CMatrix {
    re.zip_map(im, Complex64::new)
}

pub fn to_complex(a: &RMatrix) -> CMatrix {
    a.map(|x| Complex64::new(x, 0.0))
}

/// `a · b` for complex matrices.
pub fn mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    join(&re, &im)
}

/// `a† · b` for complex matrices.
pub fn adjoint_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let re = ar.tr_mul(&br) + ai.tr_mul(&bi);
    let im = ar.tr_mul(&bi) - ai.tr_mul(&br);
    join(&re, &im)
}

/// `a · b†` for complex matrices.
pub fn mul_adjoint(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let re = &ar * br.transpose() + &ai * bi.transpose();
    let im = &ai * br.transpose() - &ar * bi.transpose();
    join(&re, &im)
}

/// `p · x · pᵀ` with a real orthogonal change of basis `p`.
pub fn real_similarity(p: &RMatrix, x: &CMatrix) -> CMatrix {
    let (xr, xi) = split(x);
    let pt = p.transpose();
    let re = p * xr * &pt;
    let im = p * xi * &pt;
    join(&re, &im)
}

/// `max |a − b|` over all entries.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |a†a − I|`.
pub fn unitarity_defect(a: &CMatrix) -> f64 {
    let g = adjoint_mul(a, a);
    let mut worst = 0.0_f64;
    for (r, c) in (0..g.ncols()).flat_map(|c| (0..g.nrows()).map(move |r| (r, c))) {
        let target = if r == c { 1.0 } else { 0.0 };
        worst = worst.max((g[(r, c)] - target).norm());
    }
    worst
}

/// `max |a − a†|`.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for r in 0..n {
        for c in 0..n {
            worst = worst.max((a[(r, c)] - a[(c, r)].conj()).norm());
        }
    }
    worst
}

/// `e^{iπ t/2}` for integer `t`, exact.
pub fn i_pow(t: i64) -> Complex64 {
    match t.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}
