//! Direct check of the pointwise bound on the Duhamel operator, and the
//! exponent bookkeeping behind the source-energy decay.

use serde::{Deserialize, Serialize};

use super::quadrature::Quadrature;
use crate::error::{Error, Result};
use crate::radial_wave::{RadialWaveSolver, SolverConfig};
use crate::scenario::{parity_params, Exponents};

/// Smooth forcing `amp * phi((lambda - r0)/rw) * phi((tau - t0)/tw)` with
/// `phi(x) = (1 - x^2)^4` on `|x| < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceBump {
    pub amp: f64,
    pub r0: f64,
    pub rw: f64,
    pub t0: f64,
    pub tw: f64,
}

fn phi(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - x * x).powi(4)
    }
}

fn dphi(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        -8.0 * x * (1.0 - x * x).powi(3)
    }
}

impl SourceBump {
    /// Unit bump supported in `1 <= lambda <= 2`, `-1 <= tau <= 0`.
    pub fn standard() -> Self {
        SourceBump { amp: 1.0, r0: 1.5, rw: 0.5, t0: -0.5, tw: 0.5 }
    }

    pub fn value(&self, l: f64, tau: f64) -> f64 {
        self.amp * phi((l - self.r0) / self.rw) * phi((tau - self.t0) / self.tw)
    }

    pub fn d_lambda(&self, l: f64, tau: f64) -> f64 {
        self.amp * dphi((l - self.r0) / self.rw) / self.rw * phi((tau - self.t0) / self.tw)
    }

    /// `sum_{s <= j} lambda^s |d_lambda^s G|`.
    fn size(&self, j: usize, l: f64, tau: f64) -> f64 {
        let mut s = self.value(l, tau).abs();
        if j >= 1 {
            s += l * self.d_lambda(l, tau).abs();
        }
        s
    }

    fn lambda_support(&self) -> (f64, f64) {
        (self.r0 - self.rw, self.r0 + self.rw)
    }

    fn tau_support(&self) -> (f64, f64) {
        (self.t0 - self.tw, self.t0 + self.tw)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Derivative {
    Value,
    Radial,
    Time,
}

impl Derivative {
    fn order(self) -> usize {
        match self {
            Derivative::Value => 0,
            _ => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSample {
    /// Grid node actually used (the request is snapped to the mesh).
    pub r: f64,
    pub t: f64,
    pub derivative: Derivative,
    /// `|D^beta L G|` from forced evolution.
    pub lhs: f64,
    /// The three-term majorant with unit constant and `j = |beta|`.
    pub rhs: f64,
    pub ratio: f64,
}

/// Right-hand side of the Duhamel kernel bound with `C = 1`.
fn majorant(e: &Exponents, g: &SourceBump, r: f64, t: f64, beta: usize, j: usize, q: &Quadrature) -> f64 {
    let (a, m) = (e.a, e.m);
    let jf = j as f64;
    let bf = beta as f64;
    let (lmin, lmax) = g.lambda_support();
    let (tmin, tmax) = g.tau_support();

    // Inside the cone: |lambda_-| <= lambda <= lambda_+.
    let inside = |tau: f64| {
        let lm = t - tau - r;
        let lo = lm.abs().max(lmin);
        let hi = (t - tau + r).min(lmax);
        if hi <= lo {
            return 0.0;
        }
        q.integrate_lower_power(|l| l.powf(m - jf + 1.0) * g.size(j, l, tau), lm, lo, hi, a - 1.0, &[])
            .value
    };
    let t1 = if t > tmin {
        r.powf(jf - bf - m - a) * q.integrate(inside, tmin, t.min(tmax), &[t - r]).value
    } else {
        0.0
    };

    // Behind the cone: 0 <= lambda <= lambda_-.
    let behind = |tau: f64| {
        let lm = t - tau - r;
        let lp = t - tau + r;
        let hi = lm.min(lmax);
        if hi <= lmin {
            return 0.0;
        }
        let f = |l: f64| l.powf(2.0 * m - jf + 1.0) * g.size(j, l, tau);
        lm.powf(-m) * lp.powf(-a) * q.integrate_upper_power(f, lm, lmin, hi, a - 1.0, &[]).value
    };
    let t2 = if t - r > tmin {
        r.powf(jf - bf - m) * q.integrate(behind, tmin, (t - r).min(tmax), &[]).value
    } else {
        0.0
    };

    // Boundary terms at lambda = |lambda_+-|; present only for j = 1.
    let t3 = if j == 1 {
        let edge = |tau: f64| {
            [t - tau + r, (t - tau - r).abs()]
                .iter()
                .map(|&l| l.powf(a + m) * g.value(l, tau).abs())
                .sum::<f64>()
        };
        let lo = (t - 2.0 * r).max(tmin);
        let hi = t.min(tmax);
        if hi > lo {
            r.powf(1.0 - bf - m - a) * q.integrate(edge, lo, hi, &[t - r]).value
        } else {
            0.0
        }
    } else {
        0.0
    };
    t1 + t2 + t3
}

/// Values this small count as zero when the majorant vanishes.
const PRECURSOR_FLOOR: f64 = 1e-8;

/// Compare `|D^beta L G|`, computed by forced evolution on a grid of step
/// `dr`, with the three-term majorant evaluated by quadrature with unit
/// constant. Samples are `(r, t, derivative)`; requests are snapped to the
/// nearest node.
pub fn check_kernel_bound(
    n: u32,
    g: &SourceBump,
    samples: &[(f64, f64, Derivative)],
    dr: f64,
) -> Result<Vec<KernelSample>> {
    if n < 4 {
        return Err(Error::InvalidInput(format!("kernel bound needs n >= 4, got {n}")));
    }
    if samples.is_empty() {
        return Ok(Vec::new());
    }
    if g.r0 - g.rw <= 0.0 {
        return Err(Error::InvalidInput("source support must stay away from the origin".into()));
    }
    let (a, m) = parity_params(n);
    let e = Exponents { n, a, m, p: 2.0, k: 0.0, kappa: 0.0, nu: 0.0, theta: 0.0 };
    let (tmin, _) = g.tau_support();
    let t_end = samples.iter().fold(tmin + 1.0, |acc, s| acc.max(s.1 + 1.0));
    let r_far = samples.iter().fold(0.0f64, |acc, s| acc.max(s.0));
    let r_max = g.r0 + g.rw + (t_end - tmin) + r_far + 2.0;
    let solver = RadialWaveSolver::new(n, &SolverConfig { cfl: SolverConfig::default_cfl(n), dr, r_max })?;
    let window = solver.window(tmin, t_end)?;
    let radii = solver.grid.radii();
    let u = solver.duhamel(
        |i, out| {
            let tau = window.t(i);
            for (o, &r) in out.iter_mut().zip(&radii) {
                *o = g.value(r, tau);
            }
        },
        window,
        r_max,
    );
    let q = Quadrature::with_rel_tol(1e-7);
    let mut out = Vec::with_capacity(samples.len());
    for &(r, t, d) in samples {
        let jr = solver.grid.nearest(r);
        let it = window.nearest(t);
        let (rn, tn) = (solver.grid.r(jr), window.t(it));
        let lhs = match d {
            Derivative::Value => u.u[[it, jr]],
            Derivative::Radial => u.du_dr[[it, jr]],
            Derivative::Time => u.du_dt_row(it)[jr],
        }
        .abs();
        let beta = d.order();
        let rhs = majorant(&e, g, rn, tn, beta, beta, &q);
        // Even-n leapfrog precursors ahead of the cone sit near 1e-10.
        let ratio = if lhs <= PRECURSOR_FLOOR * g.amp.abs() { 0.0 } else { lhs / rhs };
        out.push(KernelSample { r: rn, t: tn, derivative: d, lhs, rhs, ratio });
    }
    Ok(out)
}

/// Exponents of the three pieces of the source-energy bound, each of which
/// must be at least `2 theta + 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HsrcConsistency {
    /// `2p(k-m)`, `2(a+m)(p-1)`, `2 nu + 3 - delta` with `delta = 3 - 2a`.
    pub exponents: [f64; 3],
    pub target: f64,
    pub holds: bool,
}

pub fn hsrc_consistency(e: &Exponents) -> HsrcConsistency {
    let delta = 3.0 - 2.0 * e.a;
    let exponents = [
        2.0 * e.p * (e.k - e.m),
        2.0 * (e.a + e.m) * (e.p - 1.0),
        2.0 * e.nu + 3.0 - delta,
    ];
    let target = 2.0 * e.theta + 2.0;
    let holds = exponents.iter().all(|&x| x >= target - 1e-12);
    HsrcConsistency { exponents, target, holds }
}
