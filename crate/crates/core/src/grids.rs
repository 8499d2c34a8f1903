//! Index spaces: the N×N Cartesian grid, the concentric polar grid and the
//! two mode rhombi.
//!
//! The enumerations below are the canonical orderings used for every row and
//! column of every table and kernel in the crate:
//!
//! * Cartesian points: q_x major, q_y fastest, both ascending.
//! * Polar points: ρ ascending, then k ascending.
//! * Cartesian modes: n_x major, n_y fastest.
//! * MA labels: n ascending, then m ascending in steps of 2.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::specfun::HalfInt;

/// Representation label j of a grid with N = 2j + 1 points per side.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    j: HalfInt,
    ring_offsets: Vec<f64>,
}

impl GridSpec {
    pub fn new(j: HalfInt) -> Result<Self> {
        if j.twice() < 0 {
            return domain(format!("grid label j must be non-negative, got {j}"));
        }
        Ok(GridSpec { j, ring_offsets: vec![0.0; (j.twice() + 1) as usize] })
    }

    /// Grid with `n` points per side (j = (n − 1)/2).
    pub fn from_side(n: usize) -> Result<Self> {
        if n == 0 {
            return domain("grid side must be at least 1");
        }
        GridSpec::new(HalfInt::from_twice(n as i64 - 1))
    }

    /// Replace the per-ring angular offsets ψ_ρ (default 0).
    pub fn with_ring_offsets(mut self, offsets: Vec<f64>) -> Result<Self> {
        if offsets.len() != self.ring_offsets.len() {
            return domain(format!("expected {} ring offsets, got {}", self.ring_offsets.len(), offsets.len()));
        }
        if offsets.iter().any(|x| !x.is_finite()) {
            return domain("ring offsets must be finite");
        }
        self.ring_offsets = offsets;
        Ok(self)
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    /// Points per side, N = 2j + 1.
    pub fn side(&self) -> usize {
        (self.j.twice() + 1) as usize
    }

    /// Total number of points, N².
    pub fn len(&self) -> usize {
        self.side() * self.side()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn ring_offsets(&self) -> &[f64] {
        &self.ring_offsets
    }

    pub fn has_default_offsets(&self) -> bool {
        self.ring_offsets.iter().all(|&x| x == 0.0)
    }

    /// Largest radius (and largest 1D mode number), 2j.
    pub fn max_rho(&self) -> i64 {
        self.j.twice()
    }

    /// Position of a Cartesian point in the canonical ordering.
    pub fn cart_index(&self, qx: HalfInt, qy: HalfInt) -> Result<usize> {
        let ix = self.coordinate_offset(qx)?;
        let iy = self.coordinate_offset(qy)?;
        Ok(ix * self.side() + iy)
    }

    fn coordinate_offset(&self, q: HalfInt) -> Result<usize> {
        if q.abs() > self.j || !q.same_parity(self.j) {
            return domain(format!("coordinate {q} is not on the grid of j = {}", self.j));
        }
        Ok(((q + self.j).twice() / 2) as usize)
    }

    /// Position of a polar point (ρ, k) in the canonical ordering.
    pub fn polar_index(&self, rho: i64, k: i64) -> Result<usize> {
        if rho < 0 || rho > self.max_rho() || k.abs() > rho {
            return domain(format!("({rho}, {k}) is not a polar point of j = {}", self.j));
        }
        Ok((rho * rho + k + rho) as usize)
    }

    /// Position of the Cartesian mode (n_x, n_y).
    pub fn cart_mode_index(&self, nx: usize, ny: usize) -> Result<usize> {
        let n = self.side();
        if nx >= n || ny >= n {
            return domain(format!("mode ({nx}, {ny}) outside 0..{n}"));
        }
        Ok(nx * n + ny)
    }

    /// Position of the MA label (n, m).
    pub fn ma_index(&self, n: i64, m: i64) -> Result<usize> {
        let tj = self.max_rho();
        let width = ma_width(tj, n);
        if n < 0 || n > 2 * tj || m.abs() > width || (m + width) % 2 != 0 {
            return domain(format!("(n, m) = ({n}, {m}) is outside the MA rhombus of j = {}", self.j));
        }
        let base = if n <= tj {
            n * (n + 1) / 2
        } else {
            let t = n - tj - 1;
            (tj + 1) * (tj + 2) / 2 + t * tj - t * (t - 1) / 2
        };
        Ok((base + (m + width) / 2) as usize)
    }

    /// Angle of the polar point (ρ, k): 2πk/(2ρ+1) + ψ_ρ.
    pub fn polar_angle(&self, rho: i64, k: i64) -> f64 {
        2.0 * PI * k as f64 / (2 * rho + 1) as f64 + self.ring_offsets[rho as usize]
    }
}

/// Half-width of the MA rhombus row n: min(n, 4j − n).
pub(crate) fn ma_width(two_j: i64, n: i64) -> i64 {
    n.min(2 * two_j - n)
}

/// Effective spin J_n = min(n, 4j − n)/2 of the mode block with total mode n.
pub fn block_spin(spec: &GridSpec, n: i64) -> HalfInt {
    HalfInt::from_twice(ma_width(spec.max_rho(), n))
}

/// A point on the Cartesian grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CartPoint {
    pub qx: HalfInt,
    pub qy: HalfInt,
}

/// A point on the polar grid at angle `phi` = 2πk/(2ρ+1) + ψ_ρ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarPoint {
    pub rho: i64,
    pub k: i64,
    pub phi: f64,
}

/// A two-dimensional mode label. For Cartesian modes `m_or_mu` is
/// μ = (n_x − n_y)/2; for MA labels it is the angular momentum m.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModeIndex {
    pub n: i64,
    pub m_or_mu: HalfInt,
}

pub fn enumerate_cartesian(spec: &GridSpec) -> Vec<CartPoint> {
    let coords: Vec<HalfInt> = (0..spec.side()).map(|i| HalfInt::from_twice(2 * i as i64) - spec.j()).collect();
    coords.iter().flat_map(|&qx| coords.iter().map(move |&qy| CartPoint { qx, qy })).collect()
}

pub fn enumerate_polar(spec: &GridSpec) -> Vec<PolarPoint> {
    (0..=spec.max_rho())
        .flat_map(|rho| (-rho..=rho).map(move |k| PolarPoint { rho, k, phi: spec.polar_angle(rho, k) }))
        .collect()
}

/// MA labels (n, m): |m| ≤ min(n, 4j − n), n + m even.
pub fn enumerate_ma_rhombus(spec: &GridSpec) -> Vec<ModeIndex> {
    let tj = spec.max_rho();
    (0..=2 * tj)
        .flat_map(|n| {
            let w = ma_width(tj, n);
            (-w..=w).step_by(2).map(move |m| ModeIndex { n, m_or_mu: HalfInt::int(m) })
        })
        .collect()
}

/// Cartesian modes (n_x, n_y) in canonical order.
pub fn enumerate_cart_modes(spec: &GridSpec) -> Vec<(usize, usize)> {
    let n = spec.side();
    (0..n).flat_map(|nx| (0..n).map(move |ny| (nx, ny))).collect()
}

/// Cartesian modes as (n, μ) labels, same order as [`enumerate_cart_modes`].
pub fn enumerate_cart_rhombus(spec: &GridSpec) -> Vec<ModeIndex> {
    enumerate_cart_modes(spec)
        .into_iter()
        .map(|(nx, ny)| ModeIndex { n: (nx + ny) as i64, m_or_mu: HalfInt::from_twice(nx as i64 - ny as i64) })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(t: i64) -> GridSpec {
        GridSpec::new(HalfInt::from_twice(t)).unwrap()
    }

    #[test]
    fn cartesian_ordering() {
        let h = HalfInt::from_twice;
        let pts: Vec<_> = enumerate_cartesian(&spec(1)).iter().map(|p| (p.qx, p.qy)).collect();
        assert_eq!(pts, vec![(h(-1), h(-1)), (h(-1), h(1)), (h(1), h(-1)), (h(1), h(1))]);
        assert_eq!(enumerate_cartesian(&spec(4)).len(), 25);
        for t in 0..8 {
            let s = spec(t);
            let first = enumerate_cartesian(&s)[0];
            assert_eq!((first.qx, first.qy), (-s.j(), -s.j()));
        }
    }

    #[test]
    fn polar_ordering() {
        let pts: Vec<_> = enumerate_polar(&spec(1)).iter().map(|p| (p.rho, p.k)).collect();
        assert_eq!(pts, vec![(0, 0), (1, -1), (1, 0), (1, 1)]);
        assert_eq!(enumerate_polar(&spec(4)).len(), 25);
        let p = enumerate_polar(&spec(2))[3];
        assert_eq!((p.rho, p.k), (1, 1));
        assert!((p.phi - 2.0 * PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ma_rhombus() {
        let labels: Vec<_> =
            enumerate_ma_rhombus(&spec(1)).iter().map(|l| (l.n, l.m_or_mu.to_integer().unwrap())).collect();
        assert_eq!(labels, vec![(0, 0), (1, -1), (1, 1), (2, 0)]);
        assert_eq!(enumerate_ma_rhombus(&spec(6)).len(), 49);
        for t in 0..8 {
            let s = spec(t);
            let l = enumerate_ma_rhombus(&s);
            assert!(l.contains(&ModeIndex { n: t, m_or_mu: HalfInt::int(t) }));
            assert!(l.contains(&ModeIndex { n: t, m_or_mu: HalfInt::int(-t) }));
        }
    }

    #[test]
    fn counts_and_indices_agree() {
        for t in 0..=32 {
            let s = spec(t);
            let n2 = s.len();
            assert_eq!(enumerate_cartesian(&s).len(), n2);
            assert_eq!(enumerate_polar(&s).len(), n2);
            let ma = enumerate_ma_rhombus(&s);
            assert_eq!(ma.len(), n2);
            for (i, l) in ma.iter().enumerate() {
                assert_eq!((l.n + l.m_or_mu.twice() / 2).rem_euclid(2), 0);
                assert_eq!(s.ma_index(l.n, l.m_or_mu.twice() / 2).unwrap(), i);
            }
            for (i, p) in enumerate_polar(&s).iter().enumerate() {
                assert_eq!(s.polar_index(p.rho, p.k).unwrap(), i);
            }
            for (i, p) in enumerate_cartesian(&s).iter().enumerate() {
                assert_eq!(s.cart_index(p.qx, p.qy).unwrap(), i);
            }
        }
    }

    #[test]
    fn invalid_lookups() {
        let s = spec(4);
        assert!(s.ma_index(1, 0).is_err());
        assert!(s.ma_index(6, 4).is_err());
        assert!(s.polar_index(5, 0).is_err());
        assert!(s.cart_index(HalfInt::from_twice(1), HalfInt::ZERO).is_err());
        assert!(GridSpec::new(HalfInt::from_twice(-1)).is_err());
        assert!(s.clone().with_ring_offsets(vec![0.0; 2]).is_err());
    }

    #[test]
    fn cart_rhombus_mu_ranges() {
        let s = spec(4);
        for l in enumerate_cart_rhombus(&s) {
            assert!(l.m_or_mu.abs() <= block_spin(&s, l.n));
        }
    }
}
