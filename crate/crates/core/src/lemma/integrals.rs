//! Left-hand sides of the weighted integral inequalities.
//!
//! Every function returns a quadrature [`Estimate`]; nested integrals fold
//! the convergence flags of the inner rules into the outer one. Weak
//! endpoint singularities `(x - c)^beta`, `beta > -1`, are always removed by
//! the power substitution of [`Quadrature::integrate_lower_power`].

use std::cell::Cell;

use super::quadrature::{Estimate, Quadrature};
use crate::fields::{bracket as br, weight_wk};
use crate::scenario::Exponents;

fn w(e: &Exponents, lambda: f64, tau: f64) -> f64 {
    weight_wk(e.a, e.nu, lambda, tau)
}

/// `1 - mp + m`, the power of `lambda` in the nonlinear integrands.
fn e1(e: &Exponents) -> f64 {
    1.0 - e.m * e.p + e.m
}

/// `1 - mp + 2m`.
fn e2(e: &Exponents) -> f64 {
    1.0 - e.m * e.p + 2.0 * e.m
}

fn inside(breaks: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    breaks.iter().copied().filter(|&x| x > lo && x < hi).collect()
}

fn zero() -> Estimate {
    Estimate { value: 0.0, error: 0.0, evaluations: 0, converged: true }
}

fn sum(a: Estimate, b: Estimate) -> Estimate {
    Estimate {
        value: a.value + b.value,
        error: a.error + b.error,
        evaluations: a.evaluations + b.evaluations,
        converged: a.converged && b.converged,
    }
}

/// `int_lo^hi (x - lo)^alpha (hi - x)^beta g(x) dx`, split at the midpoint.
fn two_sided<G: Fn(f64) -> f64>(
    q: &Quadrature,
    g: G,
    lo: f64,
    hi: f64,
    alpha: f64,
    beta: f64,
    breaks: &[f64],
) -> Estimate {
    if hi <= lo {
        return zero();
    }
    let mid = 0.5 * (lo + hi);
    let left = q.integrate_lower_power(
        |x| (hi - x).powf(beta) * g(x),
        lo,
        lo,
        mid,
        alpha,
        &inside(breaks, lo, mid),
    );
    let right = q.integrate_upper_power(
        |x| (x - lo).powf(alpha) * g(x),
        hi,
        mid,
        hi,
        beta,
        &inside(breaks, mid, hi),
    );
    sum(left, right)
}

/// Runs `f` and records whether any inner estimate failed.
struct Nested {
    ok: Cell<bool>,
}

impl Nested {
    fn new() -> Self {
        Nested { ok: Cell::new(true) }
    }

    fn take(&self, e: Estimate) -> f64 {
        if !e.converged {
            self.ok.set(false);
        }
        e.value
    }

    fn finish(&self, mut outer: Estimate) -> Estimate {
        outer.converged = outer.converged && self.ok.get();
        outer
    }
}

/// `int_{|t-r|}^{t+r} <y>^(-a-nu) (r - t + y)^(a-1) dy` for `r, t >= 0`.
pub fn a1(q: &Quadrature, a: f64, nu: f64, r: f64, t: f64) -> Estimate {
    q.integrate_lower_power(|y| br(y).powf(-a - nu), t - r, (t - r).abs(), t + r, a - 1.0, &[])
}

/// `int_0^z <y>^(-b) (z +- y)^(a-1) dy`; `plus` selects the sign.
pub fn a2(q: &Quadrature, a: f64, b: f64, z: f64, plus: bool) -> Estimate {
    let g = |y: f64| br(y).powf(-b);
    if plus {
        q.integrate_lower_power(g, -z, 0.0, z, a - 1.0, &[])
    } else {
        q.integrate_upper_power(g, z, 0.0, z, a - 1.0, &[])
    }
}

/// `int_z^inf <x+y>^(1-kappa) <x>^(-a) dx` for `z >= |y|`.
pub fn i_small(q: &Quadrature, e: &Exponents, z: f64, y: f64) -> Estimate {
    q.integrate_to_infinity(
        |x| br(x + y).powf(1.0 - e.kappa) * br(x).powf(-e.a),
        z,
        e.kappa - 1.0 + e.a,
        &[],
    )
}

/// `int_z^inf (x+y)^(1-mp+m) <x>^(-ap) dx` for `z >= |y|`.
pub fn j_small(q: &Quadrature, e: &Exponents, z: f64, y: f64) -> Estimate {
    let p1 = e1(e);
    let ap = e.a * e.p;
    let cut = 2.0 * z + 1.0;
    let near = q.integrate_lower_power(|x| br(x).powf(-ap), -y, z, cut, p1, &[]);
    let far = q.integrate_to_infinity(|x| (x + y).powf(p1) * br(x).powf(-ap), cut, ap - p1, &[]);
    sum(near, far)
}

/// `int_{t-r}^{t+r} <y>^(-b1) (r-t+y)^(a-1) max(<y>, <t-r>)^(-b2) dy`.
pub fn mg(q: &Quadrature, e: &Exponents, b1: f64, b2: f64, r: f64, t: f64) -> Estimate {
    let d = t - r;
    let floor = br(d);
    q.integrate_lower_power(
        |y| br(y).powf(-b1) * br(y).max(floor).powf(-b2),
        d,
        d,
        t + r,
        e.a - 1.0,
        &inside(&[0.0, d.abs(), -d.abs()], d, t + r),
    )
}

/// Outer `tau` integral over `(-inf, t]` of the light-cone integrals with
/// inner integrand `lambda^pow * h(lambda, tau) * (lambda - lambda_-)^(a-1)`.
fn cone_integral<H: Fn(f64, f64) -> f64>(
    q: &Quadrature,
    e: &Exponents,
    r: f64,
    t: f64,
    pow: f64,
    h: H,
    tail: f64,
) -> Estimate {
    let nest = Nested::new();
    let inner = |tau: f64| {
        let lm = t - tau - r;
        let lp = t - tau + r;
        let lo = lm.abs();
        let est = q.integrate_lower_power(
            |l| l.powf(pow) * h(l, tau),
            lm,
            lo,
            lp,
            e.a - 1.0,
            &inside(&[tau.abs()], lo, lp),
        );
        nest.take(est)
    };
    let breaks = inside(&[t - r, 0.0, 0.5 * (t - r), 0.5 * (t + r)], f64::NEG_INFINITY, t);
    nest.finish(q.integrate_from_neg_infinity(inner, t, tail, &breaks))
}

/// Full light-cone integral with the potential profile `<lambda>^(1-kappa) W^-1`.
pub fn i1(q: &Quadrature, e: &Exponents, r: f64, t: f64) -> Estimate {
    cone_integral(
        q,
        e,
        r,
        t,
        0.0,
        |l, tau| br(l).powf(1.0 - e.kappa) / w(e, l, tau),
        e.kappa + e.a - 1.0,
    )
}

/// Full light-cone integral with the nonlinear profile `lambda^(1-mp+m) W^-p`.
pub fn j1(q: &Quadrature, e: &Exponents, r: f64, t: f64) -> Estimate {
    let p1 = e1(e);
    cone_integral(q, e, r, t, p1, |l, tau| w(e, l, tau).powf(-e.p), e.a * e.p - p1)
}

/// `int_{-y}^inf <x+y>^(1-kappa) <x>^(-b) dx`.
pub fn a3(q: &Quadrature, e: &Exponents, b: f64, y: f64) -> Estimate {
    q.integrate_to_infinity(
        |x| br(x + y).powf(1.0 - e.kappa) * br(x).powf(-b),
        -y,
        e.kappa - 1.0 + b,
        &inside(&[0.0], -y, f64::INFINITY),
    )
}

/// `int_{-y}^inf (x+y)^(1-mp+m) <x+y>^-1 <x>^(-b) dx`.
pub fn a4(q: &Quadrature, e: &Exponents, b: f64, y: f64) -> Estimate {
    let p1 = e1(e);
    let cut = -y + 2.0 * y.abs() + 1.0;
    let g = |x: f64| br(x + y).recip() * br(x).powf(-b);
    let near = q.integrate_lower_power(g, -y, -y, cut, p1, &inside(&[0.0], -y, cut));
    let far = q.integrate_to_infinity(|x| (x + y).powf(p1) * g(x), cut, e.m * (e.p - 1.0) + b, &[]);
    sum(near, far)
}

/// `int_{t-2r}^t |lambda_+-|^pow h(|lambda_+-|, tau) d tau` with `lambda_+- = t - tau +- r`.
fn side_integral<H: Fn(f64, f64) -> f64>(
    q: &Quadrature,
    r: f64,
    t: f64,
    plus: bool,
    pow: f64,
    h: H,
) -> Estimate {
    let lo = t - 2.0 * r;
    if plus {
        let breaks = inside(&[0.0, 0.5 * (t + r)], lo, t);
        return q.integrate(|tau| {
            let l = t - tau + r;
            l.powf(pow) * h(l, tau)
        }, lo, t, &breaks);
    }
    let c = t - r;
    let g = |tau: f64| h((c - tau).abs(), tau);
    let before = q.integrate_upper_power(g, c, lo, c, pow, &inside(&[0.0, 0.5 * c], lo, c));
    let after = q.integrate_lower_power(g, c, c, t, pow, &inside(&[0.0, 0.5 * c], c, t));
    sum(before, after)
}

/// Boundary term with the potential profile.
pub fn i_pm(q: &Quadrature, e: &Exponents, r: f64, t: f64, plus: bool) -> Estimate {
    side_integral(q, r, t, plus, e.a, |l, tau| br(l).powf(1.0 - e.kappa) / w(e, l, tau))
}

/// Boundary term with the nonlinear profile.
pub fn j_pm(q: &Quadrature, e: &Exponents, r: f64, t: f64, plus: bool) -> Estimate {
    side_integral(q, r, t, plus, e.a + e1(e), |l, tau| br(l).recip() * w(e, l, tau).powf(-e.p))
}

/// `int_-inf^w <y>^(-a-nu) (w - y)^(a-1) dy` for `w <= 0`.
pub fn b1(q: &Quadrature, a: f64, nu: f64, w: f64) -> Estimate {
    let cut = w - (2.0 * w.abs() + 1.0);
    let g = |y: f64| br(y).powf(-a - nu);
    let near = q.integrate_upper_power(g, w, cut, w, a - 1.0, &[]);
    let far = q.integrate_from_neg_infinity(|y| g(y) * (w - y).powf(a - 1.0), cut, 1.0 + nu, &[]);
    sum(near, far)
}

/// Which profile a behind-the-cone integral carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    Potential,
    Nonlinear,
}

impl Profile {
    fn pow(self, e: &Exponents) -> f64 {
        match self {
            Profile::Potential => e.m,
            Profile::Nonlinear => e2(e),
        }
    }

    fn h(self, e: &Exponents, l: f64, tau: f64) -> f64 {
        match self {
            Profile::Potential => br(l).powf(1.0 - e.kappa) / w(e, l, tau),
            Profile::Nonlinear => w(e, l, tau).powf(-e.p),
        }
    }

    fn flat(self, e: &Exponents, l: f64) -> f64 {
        match self {
            Profile::Potential => br(l).powf(1.0 - e.kappa),
            Profile::Nonlinear => 1.0,
        }
    }

    /// Decay exponent in `|tau|` of the behind-the-cone `tau` integrand.
    fn tail(self, e: &Exponents) -> f64 {
        match self {
            Profile::Potential => (e.m + 1.0 + e.nu).min(e.kappa + e.nu - 1.0),
            Profile::Nonlinear => (e.m + (e.a + e.nu) * e.p + 1.0 - e.a)
                .min((e.a + e.m) * (e.p - 1.0) + e.nu * e.p - 1.0),
        }
    }
}

/// Decades `1, 10, 100, ...` below `hi`, plus `extra`; seeds the bisection on
/// long intervals whose integrand varies on the scale `<lambda>`.
fn decades(hi: f64, extra: f64) -> Vec<f64> {
    let mut out = vec![extra];
    let mut x = 1.0;
    while x < hi {
        out.push(x);
        out.push(hi - x);
        x *= 10.0;
    }
    out
}

/// `int_0^L lambda^pow h (L - lambda)^(a-1) d lambda`.
fn behind(q: &Quadrature, e: &Exponents, prof: Profile, len: f64, tau: f64) -> Estimate {
    two_sided(
        q,
        |l| prof.h(e, l, tau),
        0.0,
        len,
        prof.pow(e),
        e.a - 1.0,
        &decades(len, tau.abs()),
    )
}

/// Behind-the-cone integral over `tau <= -|t-r|`, normalised by `lambda_-^m`.
pub fn b23(q: &Quadrature, e: &Exponents, prof: Profile, r: f64, t: f64) -> Estimate {
    let nest = Nested::new();
    let f = |tau: f64| {
        let len = t - tau - r;
        if len <= 0.0 {
            return 0.0;
        }
        nest.take(behind(q, e, prof, len, tau)) * len.powf(-e.m)
    };
    nest.finish(q.integrate_from_neg_infinity(f, -(t - r).abs(), prof.tail(e), &[]))
}

/// `int_{-2|d|-1}^{min(d,0)} lambda_-^(-m-a) int_0^{lambda_-} ... ` with `d = t - r`.
pub fn i2_small(q: &Quadrature, e: &Exponents, prof: Profile, d: f64) -> Estimate {
    let nest = Nested::new();
    let f = |tau: f64| {
        let len = d - tau;
        if len <= 0.0 {
            return 0.0;
        }
        let est = two_sided(q, |l| prof.flat(e, l), 0.0, len, prof.pow(e), e.a - 1.0, &[]);
        nest.take(est) * len.powf(-e.m - e.a)
    };
    let hi = d.min(0.0);
    let lo = -2.0 * d.abs() - 1.0;
    // Near `tau = d` the integrand behaves like `(d - tau)^s`.
    let s = match prof {
        Profile::Potential => 0.0,
        Profile::Nonlinear => e1(e),
    };
    let est = if d <= 0.0 && s < 0.0 {
        q.integrate_upper_power(|tau| f(tau) / (d - tau).powf(s), d, lo, hi, s, &[])
    } else {
        q.integrate(f, lo, hi, &[])
    };
    nest.finish(est)
}

/// Behind-the-cone integral over `tau <= t - r`, weighted by `lambda_-^-m lambda_+^-a`.
pub fn i2_big(q: &Quadrature, e: &Exponents, prof: Profile, r: f64, t: f64) -> Estimate {
    let nest = Nested::new();
    let f = |tau: f64| {
        let len = t - tau - r;
        if len <= 0.0 {
            return 0.0;
        }
        let lp = t - tau + r;
        nest.take(behind(q, e, prof, len, tau)) * len.powf(-e.m) * lp.powf(-e.a)
    };
    let c = t - r;
    // Endpoint behaviour `(c - tau)^s` as `tau -> c`.
    let s = match prof {
        Profile::Potential => e.a,
        Profile::Nonlinear => e1(e) + e.a,
    };
    let tail = prof.tail(e) + e.a;
    let est = if s < 0.0 {
        let cut = c - 1.0 - c.abs();
        let near = q.integrate_upper_power(|tau| f(tau) / (c - tau).powf(s), c, cut, c, s, &inside(&[0.0], cut, c));
        let far = q.integrate_from_neg_infinity(f, cut, tail, &inside(&[0.0], f64::NEG_INFINITY, cut));
        sum(near, far)
    } else {
        q.integrate_from_neg_infinity(f, c, tail, &inside(&[0.0], f64::NEG_INFINITY, c))
    };
    nest.finish(est)
}

/// `int_0^inf r^(2a+2m+2p(1-m)) <r>^(-2p) <|tau|+r>^(-2ap) <|tau|-r>^(-2 nu p) dr`.
pub fn h_tilde(q: &Quadrature, e: &Exponents, tau: f64) -> Estimate {
    let s = tau.abs();
    let p = e.p;
    let e0 = 2.0 * e.a + 2.0 * e.m + 2.0 * p * (1.0 - e.m);
    let g = |r: f64| br(r).powf(-2.0 * p) * br(s + r).powf(-2.0 * e.a * p) * br(s - r).powf(-2.0 * e.nu * p);
    let cut = 2.0 * s + 2.0;
    let near = q.integrate_lower_power(g, 0.0, 0.0, cut, e0, &inside(&[s], 0.0, cut));
    let k = e.a + e.m + e.nu;
    let far = q.integrate_to_infinity(|r| r.powf(e0) * g(r), cut, 2.0 * p * k - 2.0 * (e.a + e.m), &[]);
    sum(near, far)
}
