//! Tridiagonal discretisations of `d_rr + (n-1)/r d_r`.
//!
//! Even `n`: conservative finite volumes on cell centres, faces at `j dr`.
//!
//! Odd `n`: start from the three-dimensional operator `(1/r) d_rr (r u)` on
//! cell centres, which is the 1-D second difference in disguise, and climb
//! two dimensions at a time with the intertwining `(T u) = (u_{j+1} - u_j)/(dr r_{j+1/2})`,
//! the discrete form of `(1/r) d_r`. Each step conjugates the operator
//! (`L' T = T L`), so the scheme inherits the exact light-cone propagation
//! of the 1-D leapfrog at unit Courant number.

use crate::fields::RadialGrid;

#[derive(Clone, Debug)]
pub struct Stencil {
    /// Coefficient of `u_{j-1}`; zero at `j = 0`.
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    /// Coefficient of `u_{j+1}`; at the last node it multiplies the zero ghost.
    pub upper: Vec<f64>,
    /// Positive weights making the operator symmetric: `d_j upper_j = d_{j+1} lower_{j+1}`.
    pub weights: Vec<f64>,
}

impl Stencil {
    pub fn new(n: u32, grid: &RadialGrid) -> Self {
        let (lower, diag, upper) = if n.is_multiple_of(2) {
            finite_volume(n, grid)
        } else {
            assert!(
                (grid.offset - (n as f64 - 1.0) / 4.0).abs() < 1e-12,
                "odd dimensions need the shifted node set"
            );
            intertwined(n, grid)
        };
        let mut weights = vec![1.0; grid.len];
        weights[0] = grid.r(0).powi(n as i32 - 1);
        for j in 0..grid.len - 1 {
            weights[j + 1] = weights[j] * upper[j] / lower[j + 1];
        }
        Stencil { lower, diag, upper, weights }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `out = L u`, with a homogeneous Dirichlet ghost past the last node.
    #[inline]
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        let n = self.len();
        out[0] = self.diag[0] * u[0] + self.upper[0] * u[1];
        for j in 1..n - 1 {
            out[j] = self.lower[j] * u[j - 1] + self.diag[j] * u[j] + self.upper[j] * u[j + 1];
        }
        out[n - 1] = self.lower[n - 1] * u[n - 2] + self.diag[n - 1] * u[n - 1];
    }

    /// Largest eigenvalue of `-L`, by Sturm-sequence bisection on the
    /// symmetrised matrix.
    pub fn spectral_radius(&self) -> f64 {
        let n = self.len();
        let d: Vec<f64> = self.diag.iter().map(|x| -x).collect();
        let e2: Vec<f64> = (0..n - 1).map(|j| self.upper[j] * self.lower[j + 1]).collect();
        let mut hi = 0.0f64;
        for j in 0..n {
            let mut s = d[j];
            if j > 0 {
                s += e2[j - 1].sqrt();
            }
            if j + 1 < n {
                s += e2[j].sqrt();
            }
            hi = hi.max(s);
        }
        // Count eigenvalues below x from the pivots of (K - x I).
        let below = |x: f64| {
            let mut count = 0;
            let mut q = d[0] - x;
            if q < 0.0 {
                count += 1;
            }
            for j in 1..n {
                let prev = if q == 0.0 { f64::MIN_POSITIVE } else { q };
                q = d[j] - x - e2[j - 1] / prev;
                if q < 0.0 {
                    count += 1;
                }
            }
            count
        };
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if below(mid) >= n {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        hi
    }
}

type Tri = (Vec<f64>, Vec<f64>, Vec<f64>);

fn finite_volume(n: u32, grid: &RadialGrid) -> Tri {
    let len = grid.len;
    let dr = grid.dr;
    let nf = n as f64;
    let face = |j: usize| j as f64 * dr;
    let area = |j: usize| face(j).powi(n as i32 - 1);
    let mut lower = vec![0.0; len];
    let mut diag = vec![0.0; len];
    let mut upper = vec![0.0; len];
    for j in 0..len {
        let vol = (face(j + 1).powi(n as i32) - face(j).powi(n as i32)) / nf;
        let up = area(j + 1) / (vol * dr);
        let lo = area(j) / (vol * dr);
        upper[j] = up;
        lower[j] = if j > 0 { lo } else { 0.0 };
        diag[j] = -(up + lo);
    }
    (lower, diag, upper)
}

/// Stencil in the form `L u_j = alpha_j (u_{j+1} - u_j) - gamma_j (u_j - u_{j-1})`.
struct Ladder {
    rho: Vec<f64>,
    alpha: Vec<f64>,
    gamma: Vec<f64>,
}

fn three_dimensional(len: usize, dr: f64) -> Ladder {
    let h2 = dr * dr;
    let rho: Vec<f64> = (0..len).map(|j| (j as f64 + 0.5) * dr).collect();
    let alpha = (0..len).map(|j| (j as f64 + 1.5) / ((j as f64 + 0.5) * h2)).collect();
    // Even reflection through the origin folds the j = -1 neighbour into the diagonal.
    let gamma = (0..len)
        .map(|j| if j == 0 { 0.0 } else { (j as f64 - 0.5) / ((j as f64 + 0.5) * h2) })
        .collect();
    Ladder { rho, alpha, gamma }
}

fn climb(l: &Ladder) -> Ladder {
    let len = l.rho.len() - 1;
    let rho: Vec<f64> = (0..len).map(|i| 0.5 * (l.rho[i] + l.rho[i + 1])).collect();
    let mut alpha = vec![0.0; len];
    let mut gamma = vec![0.0; len];
    for i in 0..len {
        let next = if i + 1 < len { rho[i + 1] } else { rho[i] + (l.rho[1] - l.rho[0]) };
        alpha[i] = l.alpha[i + 1] * next / rho[i];
        gamma[i] = if i == 0 { 0.0 } else { l.gamma[i] * rho[i - 1] / rho[i] };
    }
    Ladder { rho, alpha, gamma }
}

fn intertwined(n: u32, grid: &RadialGrid) -> Tri {
    let steps = ((n - 3) / 2) as usize;
    let mut l = three_dimensional(grid.len + steps + 1, grid.dr);
    for _ in 0..steps {
        l = climb(&l);
    }
    let len = grid.len;
    let lower: Vec<f64> = l.gamma[..len].to_vec();
    let upper: Vec<f64> = l.alpha[..len].to_vec();
    let diag: Vec<f64> = (0..len).map(|j| -(l.alpha[j] + l.gamma[j])).collect();
    debug_assert!((l.rho[0] - grid.r(0)).abs() < 1e-12 * grid.dr);
    (lower, diag, upper)
}
