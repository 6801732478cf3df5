//! Space-time radial fields, their generators and the two norms used to
//! measure them.

mod grid;
mod profiles;

pub use grid::{RadialGrid, TimeWindow};
pub use profiles::{
    make_initial_data, make_nonlinearity, make_potential, InitialData, Nonlinearity, Potential,
    PotentialShape, Profile,
};

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::scenario::Exponents;

/// Japanese-bracket variant `1 + |s|`.
#[inline]
pub fn bracket(s: f64) -> f64 {
    1.0 + s.abs()
}

/// `W(r, t) = <|t| + r>^a <|t| - r>^nu`.
#[inline]
pub fn weight_wk(a: f64, nu: f64, r: f64, t: f64) -> f64 {
    let t = t.abs();
    bracket(t + r).powf(a) * bracket(t - r).powf(nu)
}

/// Exponents of the weighted sup norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub a: f64,
    pub nu: f64,
    pub m: f64,
}

impl WeightSpec {
    pub fn from_exponents(e: &Exponents) -> Self {
        WeightSpec { a: e.a, nu: e.nu, m: e.m }
    }

    #[inline]
    pub fn w(&self, r: f64, t: f64) -> f64 {
        weight_wk(self.a, self.nu, r, t)
    }

    /// Multiplier of `|u|` in the norm: `r^(m-1) <r> W`.
    #[inline]
    pub fn factor0(&self, r: f64, t: f64) -> f64 {
        r.powf(self.m - 1.0) * bracket(r) * self.w(r, t)
    }

    /// Multiplier of `|u_r|` in the norm: `r^m W`.
    #[inline]
    pub fn factor1(&self, r: f64, t: f64) -> f64 {
        r.powf(self.m) * self.w(r, t)
    }
}

/// A radial field sampled on `window x grid`, with its radial derivative.
///
/// Only nodes with `r <= report_radius` enter norms and audits; the band
/// beyond it exists to keep the outer boundary out of the reported region.
#[derive(Clone, Debug)]
pub struct RadialField {
    pub n: u32,
    pub grid: RadialGrid,
    pub window: TimeWindow,
    pub u: Array2<f64>,
    pub du_dr: Array2<f64>,
    pub report_radius: f64,
}

impl RadialField {
    pub fn from_values(
        n: u32,
        grid: RadialGrid,
        window: TimeWindow,
        u: Array2<f64>,
        report_radius: f64,
    ) -> Self {
        assert_eq!(u.dim(), (window.len(), grid.len));
        let mut du_dr = Array2::zeros(u.dim());
        let mut buf = vec![0.0; grid.len];
        for (i, row) in u.outer_iter().enumerate() {
            grid.derivative(row.as_slice().expect("rows are contiguous"), &mut buf);
            du_dr.row_mut(i).assign(&ArrayView1::from(&buf));
        }
        RadialField { n, grid, window, u, du_dr, report_radius }
    }

    pub fn zeros(n: u32, grid: RadialGrid, window: TimeWindow, report_radius: f64) -> Self {
        let shape = (window.len(), grid.len);
        RadialField {
            n,
            grid,
            window,
            u: Array2::zeros(shape),
            du_dr: Array2::zeros(shape),
            report_radius,
        }
    }

    pub fn nt(&self) -> usize {
        self.window.len()
    }

    pub fn t(&self, i: usize) -> f64 {
        self.window.t(i)
    }

    /// Nodes inside the report radius.
    pub fn report_len(&self) -> usize {
        self.grid.count_within(self.report_radius)
    }

    /// Centred time derivative on row `i`, one-sided second order at the window ends.
    ///
    /// The end stencil `(1, -1/2, -1, 1/2) / dt` also annihilates `(-1)^i`, the
    /// leapfrog's neutral mode at unit Courant number, which the centred
    /// difference already ignores. The three-point one-sided stencil would
    /// amplify it by `4 / dt`.
    pub fn du_dt_row(&self, i: usize) -> Vec<f64> {
        let nt = self.nt();
        let dt = self.window.dt;
        let row = |k: usize| self.u.row(k);
        let out = if nt < 4 {
            // Too short for the end stencils; plain differences.
            let (a, b) = (i.saturating_sub(1), (i + 1).min(nt - 1));
            (&row(b) - &row(a)) / ((b - a) as f64 * dt)
        } else if i == 0 {
            (&row(0) * -1.0 + &row(1) * 0.5 + row(2) - &row(3) * 0.5) / dt
        } else if i == nt - 1 {
            (&row(nt - 1) - &row(nt - 2) * 0.5 - row(nt - 3) + &row(nt - 4) * 0.5) / dt
        } else {
            (&row(i + 1) - &row(i - 1)) / (2.0 * dt)
        };
        out.to_vec()
    }

    /// Pointwise difference `self - other` on a shared discretisation.
    pub fn minus(&self, other: &RadialField) -> RadialField {
        assert_eq!(self.u.dim(), other.u.dim());
        RadialField {
            n: self.n,
            grid: self.grid,
            window: self.window,
            u: &self.u - &other.u,
            du_dr: &self.du_dr - &other.du_dr,
            report_radius: self.report_radius.min(other.report_radius),
        }
    }

    pub fn max_abs(&self) -> f64 {
        let j = self.report_len();
        self.u.outer_iter().map(|r| r.iter().take(j).fold(0.0f64, |a, v| a.max(v.abs()))).fold(0.0, f64::max)
    }
}

/// Location and split of a weighted sup norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    /// `sup |u| r^(m-1) <r> W`.
    pub sup_value: f64,
    /// `sup |u_r| r^m W`.
    pub sup_slope: f64,
    pub argmax_t: f64,
    pub argmax_r: f64,
}

/// Weighted sup norm: the sum over `j = 0, 1` of the sups of the
/// weighted `|d_r^j u|`, taken over the report region.
pub fn norm_x_report(u: &RadialField, w: &WeightSpec) -> NormReport {
    let jmax = u.report_len();
    let radii = u.grid.radii();
    let f0: Vec<f64> = radii.iter().map(|&r| r.powf(w.m - 1.0) * bracket(r)).collect();
    let f1: Vec<f64> = radii.iter().map(|&r| r.powf(w.m)).collect();
    let (mut s0, mut s1) = (0.0f64, 0.0f64);
    let (mut at, mut ar, mut best) = (0.0, 0.0, 0.0);
    for i in 0..u.nt() {
        let t = u.t(i);
        let row = u.u.row(i);
        let drow = u.du_dr.row(i);
        for j in 0..jmax {
            let ww = w.w(radii[j], t);
            let v0 = row[j].abs() * f0[j] * ww;
            let v1 = drow[j].abs() * f1[j] * ww;
            s0 = s0.max(v0);
            s1 = s1.max(v1);
            if v0.max(v1) > best {
                best = v0.max(v1);
                at = t;
                ar = radii[j];
            }
        }
    }
    NormReport { value: s0 + s1, sup_value: s0, sup_slope: s1, argmax_t: at, argmax_r: ar }
}

pub fn norm_x(u: &RadialField, w: &WeightSpec) -> f64 {
    norm_x_report(u, w).value
}

/// `(int (|w_r|^2 + |w_t|^2) r^(n-1) dr)^(1/2)` by the node rule on the first `upto` nodes.
pub fn energy_norm(n: u32, grid: &RadialGrid, dw_dr: &[f64], dw_dt: &[f64], upto: usize) -> f64 {
    let upto = upto.min(grid.len);
    let mut s = 0.0;
    for j in 0..upto {
        let r = grid.r(j);
        s += (dw_dr[j] * dw_dr[j] + dw_dt[j] * dw_dt[j]) * r.powi(n as i32 - 1);
    }
    (s * grid.dr).sqrt()
}

/// Energy norm of every time slice over the report region.
pub fn energy_series(u: &RadialField) -> Vec<f64> {
    let upto = u.report_len();
    (0..u.nt())
        .map(|i| {
            let dt = u.du_dt_row(i);
            let dr = u.du_dr.row(i);
            energy_norm(u.n, &u.grid, dr.as_slice().expect("contiguous"), &dt, upto)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weight_spot_values() {
        assert_relative_eq!(weight_wk(1.0, 0.3, 1.0, 1.0), 3.0, epsilon = 1e-15);
        assert_relative_eq!(weight_wk(0.5, 0.5, 1.0, 3.0), 15f64.sqrt(), epsilon = 1e-14);
        assert_eq!(weight_wk(0.5, 0.5, 1.0, -3.0), weight_wk(0.5, 0.5, 1.0, 3.0));
    }

    #[test]
    fn energy_of_unit_velocity_in_unit_ball() {
        let g = RadialGrid::cell_centered(1.0 / 512.0, 2.0).unwrap();
        let zeros = vec![0.0; g.len];
        let vel: Vec<f64> = g.radii().iter().map(|&r| if r <= 1.0 { 1.0 } else { 0.0 }).collect();
        let e = energy_norm(5, &g, &zeros, &vel, g.len);
        assert_relative_eq!(e, (0.2f64).sqrt(), max_relative = 1e-5);
    }

    #[test]
    fn norm_of_zero_field_is_zero() {
        let g = RadialGrid::for_dimension(5, 0.25, 8.0).unwrap();
        let w = TimeWindow::new(-1.0, 1.0, 0.25).unwrap();
        let f = RadialField::zeros(5, g, w, 8.0);
        let spec = WeightSpec { a: 1.0, nu: 0.3, m: 1.0 };
        assert_eq!(norm_x(&f, &spec), 0.0);
    }
}
