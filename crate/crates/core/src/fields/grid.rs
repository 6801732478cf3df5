use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform radial nodes `r_j = (j + offset) dr`, `j = 0..len`.
///
/// Even dimensions use cell centres (`offset = 1/2`). Odd dimensions use
/// the nodes of the intertwined stencil, `offset = (n - 1)/4`, which sit
/// half a cell further out for every two added dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub dr: f64,
    pub len: usize,
    pub offset: f64,
}

impl RadialGrid {
    pub fn cell_centered(dr: f64, r_max: f64) -> Result<Self> {
        Self::with_offset(dr, r_max, 0.5)
    }

    pub fn for_dimension(n: u32, dr: f64, r_max: f64) -> Result<Self> {
        let offset = if n % 2 == 1 { (n as f64 - 1.0) / 4.0 } else { 0.5 };
        Self::with_offset(dr, r_max, offset)
    }

    fn with_offset(dr: f64, r_max: f64, offset: f64) -> Result<Self> {
        if !(dr > 0.0 && r_max > 0.0 && dr.is_finite() && r_max.is_finite()) {
            return Err(Error::InvalidInput(format!("need dr > 0 and r_max > 0, got {dr}, {r_max}")));
        }
        let len = (r_max / dr).round() as usize;
        if len < 8 {
            return Err(Error::InvalidInput(format!("grid too coarse: {len} nodes")));
        }
        Ok(RadialGrid { dr, len, offset })
    }

    #[inline]
    pub fn r(&self, j: usize) -> f64 {
        (j as f64 + self.offset) * self.dr
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.len).map(|j| self.r(j)).collect()
    }

    pub fn r_max(&self) -> f64 {
        self.len as f64 * self.dr
    }

    /// Number of nodes with `r_j <= radius`.
    pub fn count_within(&self, radius: f64) -> usize {
        let c = (radius / self.dr - self.offset).floor() + 1.0;
        c.clamp(0.0, self.len as f64) as usize
    }

    /// Index of the node closest to `r`.
    pub fn nearest(&self, r: f64) -> usize {
        let j = (r / self.dr - self.offset).round();
        j.clamp(0.0, (self.len - 1) as f64) as usize
    }

    /// Centred first derivative; second-order one-sided stencils at the ends,
    /// except that cell-centred grids reflect evenly through the origin.
    pub fn derivative(&self, u: &[f64], out: &mut [f64]) {
        let n = self.len;
        debug_assert!(u.len() == n && out.len() == n);
        let h2 = 2.0 * self.dr;
        for j in 1..n - 1 {
            out[j] = (u[j + 1] - u[j - 1]) / h2;
        }
        out[0] = if self.offset == 0.5 {
            (u[1] - u[0]) / h2
        } else {
            (-3.0 * u[0] + 4.0 * u[1] - u[2]) / h2
        };
        out[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / h2;
    }
}

/// Symmetric-about-zero time levels `t_i = (i - past) dt`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub dt: f64,
    pub past: usize,
    pub future: usize,
}

impl TimeWindow {
    /// Smallest window on the `dt` lattice through zero covering `[t_min, t_max]`.
    pub fn new(t_min: f64, t_max: f64, dt: f64) -> Result<Self> {
        if !(t_min < 0.0 && t_max > 0.0 && dt > 0.0) {
            return Err(Error::InvalidInput(format!(
                "need t_min < 0 < t_max and dt > 0, got [{t_min}, {t_max}], dt = {dt}"
            )));
        }
        let past = (-t_min / dt - 1e-9).ceil() as usize;
        let future = (t_max / dt - 1e-9).ceil() as usize;
        Ok(TimeWindow { dt, past, future })
    }

    pub fn len(&self) -> usize {
        self.past + self.future + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn t(&self, i: usize) -> f64 {
        (i as f64 - self.past as f64) * self.dt
    }

    pub fn t_min(&self) -> f64 {
        self.t(0)
    }

    pub fn t_max(&self) -> f64 {
        self.t(self.len() - 1)
    }

    pub fn zero_index(&self) -> usize {
        self.past
    }

    pub fn nearest(&self, t: f64) -> usize {
        let i = (t / self.dt).round() + self.past as f64;
        i.clamp(0.0, (self.len() - 1) as f64) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_follow_parity() {
        assert_eq!(RadialGrid::for_dimension(4, 0.1, 10.0).unwrap().offset, 0.5);
        assert_eq!(RadialGrid::for_dimension(5, 0.1, 10.0).unwrap().offset, 1.0);
        assert_eq!(RadialGrid::for_dimension(7, 0.1, 10.0).unwrap().offset, 1.5);
    }

    #[test]
    fn nodes_are_positive_and_cover_range() {
        let g = RadialGrid::for_dimension(5, 0.125, 32.0).unwrap();
        assert_eq!(g.len, 256);
        assert!(g.r(0) > 0.0);
        assert_eq!(g.r(g.len - 1), 32.0);
        assert_eq!(g.count_within(1.0), 8);
    }

    #[test]
    fn derivative_is_second_order_exact_for_quadratics() {
        let g = RadialGrid::for_dimension(5, 0.1, 2.0).unwrap();
        let u: Vec<f64> = g.radii().iter().map(|r| 3.0 * r * r - r + 2.0).collect();
        let mut d = vec![0.0; g.len];
        g.derivative(&u, &mut d);
        for (j, r) in g.radii().iter().enumerate() {
            assert!((d[j] - (6.0 * r - 1.0)).abs() < 1e-10, "j = {j}");
        }
    }

    #[test]
    fn window_contains_zero() {
        let w = TimeWindow::new(-1.0, 2.0, 0.25).unwrap();
        assert_eq!(w.t(w.zero_index()), 0.0);
        assert_eq!(w.t_min(), -1.0);
        assert_eq!(w.t_max(), 2.0);
        assert!(TimeWindow::new(0.0, 1.0, 0.1).is_err());
    }
}
