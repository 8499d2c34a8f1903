//! Radius–angle (RA) basis, its overlap with the MA basis, and the discrete
//! polar oscillator wavefunctions Ψ° on the (ρ, φ_k) grid.
//!
//! ```text
//! Ψ°_{n,m}(ρ, φ_k) = e^{imφ_k} / √(2ρ+1) · φ(j,ρ,κ,m) · C^{j j ρ}_{(m+κ)/2, (m−κ)/2, m},   κ = n − 2j
//! ```
//!
//! Rotating the polar screen by a geometric angle θ multiplies Ψ°_{n,m} by
//! e^{−imθ}. A ring of radius ρ is shifted by l pixels when θ = 2πl/(2ρ+1).

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::grids::{enumerate_ma_rhombus, enumerate_polar, GridSpec};
use crate::linalg::CMatrix;
use crate::memo::{memoize, Memo};
use crate::specfun::{clebsch_gordan, ra_ma_phase, HalfInt};

/// Ψ° table: rows polar points, columns MA labels.
#[derive(Clone, Debug)]
pub struct PolarBasisTable {
    pub spec: GridSpec,
    pub values: CMatrix,
}

static POLAR: Memo<i64, CMatrix> = Memo::new();

/// ⟨RA ρ, m | MA κ, m⟩ = φ(j,ρ,κ,m) · C^{j j ρ}_{(m+κ)/2, (m−κ)/2, m}.
///
/// Zero when |m| > ρ; structural range violations are domain errors.
pub fn ra_ma_overlap(spec: &GridSpec, rho: i64, kappa: HalfInt, m: HalfInt) -> Result<Complex64> {
    let j = spec.j();
    if rho < 0 || rho > spec.max_rho() {
        return domain(format!("radius ρ = {rho} outside 0..={}", spec.max_rho()));
    }
    let (sum, diff) = (m.twice() + kappa.twice(), m.twice() - kappa.twice());
    if sum % 2 != 0 {
        return domain(format!("(m ± κ)/2 is not a half-integer for m = {m}, κ = {kappa}"));
    }
    let (m1, m2) = (HalfInt::from_twice(sum / 2), HalfInt::from_twice(diff / 2));
    for mm in [m1, m2] {
        if mm.abs() > j || !mm.same_parity(j) {
            return domain(format!("{mm} is not a projection of spin {j} (m = {m}, κ = {kappa})"));
        }
    }
    if m.abs() > HalfInt::int(rho) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let phase = ra_ma_phase(j, rho, kappa, m)?;
    Ok(phase * clebsch_gordan(j, m1, j, m2, HalfInt::int(rho), m)?)
}

/// Ψ°_{n,m}(ρ, φ_k).
pub fn psi_circ(spec: &GridSpec, n: i64, m: HalfInt, rho: i64, k: i64) -> Result<Complex64> {
    let Some(mi) = m.to_integer() else {
        return domain(format!("angular momentum {m} must be an integer"));
    };
    spec.ma_index(n, mi)?;
    spec.polar_index(rho, k)?;
    let kappa = HalfInt::int(n) - HalfInt::from_twice(2 * spec.j().twice());
    let overlap = ra_ma_overlap(spec, rho, kappa, m)?;
    let angular = Complex64::from_polar(1.0, mi as f64 * spec.polar_angle(rho, k));
    Ok(angular * overlap / ((2 * rho + 1) as f64).sqrt())
}

fn build_polar_table(spec: &GridSpec) -> Result<CMatrix> {
    let points = enumerate_polar(spec);
    let labels = enumerate_ma_rhombus(spec);
    let mut t = CMatrix::zeros(spec.len(), spec.len());
    for (c, l) in labels.iter().enumerate() {
        for (r, p) in points.iter().enumerate() {
            if l.m_or_mu.abs() <= HalfInt::int(p.rho) {
                t[(r, c)] = psi_circ(spec, l.n, l.m_or_mu, p.rho, p.k)?;
            }
        }
    }
    Ok(t)
}

/// Ψ° table. Tables of grids with default ring offsets are memoized.
pub fn polar_table(spec: &GridSpec) -> Result<PolarBasisTable> {
    let values = if spec.has_default_offsets() {
        (*memoize(&POLAR, spec.j().twice(), || build_polar_table(spec))?).clone()
    } else {
        build_polar_table(spec)?
    };
    Ok(PolarBasisTable { spec: spec.clone(), values })
}

/// Shared handle to the memoized Ψ° table of a default-offset grid.
pub(crate) fn polar_table_shared(spec: &GridSpec) -> Result<Arc<CMatrix>> {
    if spec.has_default_offsets() {
        memoize(&POLAR, spec.j().twice(), || build_polar_table(spec))
    } else {
        Ok(Arc::new(build_polar_table(spec)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_defect;

    fn spec(t: i64) -> GridSpec {
        GridSpec::new(HalfInt::from_twice(t)).unwrap()
    }

    #[test]
    fn overlap_at_origin_has_uniform_magnitude() {
        for t in 1..=8 {
            let s = spec(t);
            for kt in (-t..=t).step_by(2) {
                // κ ranges over −2j … 2j in integer steps; only m = 0 survives at ρ = 0.
                let kappa = HalfInt::int(kt);
                let z = ra_ma_overlap(&s, 0, kappa, HalfInt::ZERO).unwrap();
                assert!((z.norm() - 1.0 / ((t + 1) as f64).sqrt()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn overlap_selection_rule() {
        let s = spec(4);
        assert_eq!(ra_ma_overlap(&s, 1, HalfInt::ZERO, HalfInt::int(2)).unwrap().norm(), 0.0);
        assert!(ra_ma_overlap(&s, 5, HalfInt::ZERO, HalfInt::ZERO).is_err());
        assert!(ra_ma_overlap(&s, 1, HalfInt::ZERO, HalfInt::HALF).is_err());
    }

    #[test]
    fn overlap_matrix_is_unitary() {
        let s = spec(4);
        let labels = enumerate_ma_rhombus(&s);
        let ra: Vec<(i64, i64)> = (0..=4).flat_map(|r| (-r..=r).map(move |m| (r, m))).collect();
        let mut total = 0.0;
        let mut o = CMatrix::zeros(25, 25);
        for (c, l) in labels.iter().enumerate() {
            let kappa = HalfInt::int(l.n - 4);
            for (r, &(rho, m)) in ra.iter().enumerate() {
                if HalfInt::int(m) == l.m_or_mu {
                    o[(r, c)] = ra_ma_overlap(&s, rho, kappa, l.m_or_mu).unwrap();
                    total += o[(r, c)].norm_sqr();
                }
            }
        }
        assert!((total - 25.0).abs() < 1e-12);
        assert!(unitarity_defect(&o) < 1e-13);
    }

    #[test]
    fn psi_circ_vanishes_inside_radius() {
        let s = spec(4);
        for l in enumerate_ma_rhombus(&s) {
            for p in enumerate_polar(&s) {
                let v = psi_circ(&s, l.n, l.m_or_mu, p.rho, p.k).unwrap();
                if HalfInt::int(p.rho) < l.m_or_mu.abs() {
                    assert_eq!(v.norm(), 0.0);
                }
                let v0 = psi_circ(&s, l.n, l.m_or_mu, p.rho, 0).unwrap();
                assert!((v.norm() - v0.norm()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn polar_tables_are_unitary() {
        for t in 0..=8 {
            let s = spec(t);
            assert!(unitarity_defect(&polar_table(&s).unwrap().values) < 1e-11, "j = {t}/2");
        }
        let s = spec(6).with_ring_offsets(vec![0.1, -0.3, 0.2, 0.7, 1.1, 0.0, 2.0]).unwrap();
        assert!(unitarity_defect(&polar_table(&s).unwrap().values) < 1e-11);
    }
}
