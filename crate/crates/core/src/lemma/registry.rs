use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::integrals::{self as ig, Profile};
use super::quadrature::{Estimate, Quadrature};
use crate::error::{Error, Result};
use crate::fields::{bracket as br, weight_wk};
use crate::scenario::Exponents;

/// Identifier of a certified inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LemmaId {
    A1,
    A2,
    #[serde(rename = "I_J")]
    IJ,
    MG,
    I1,
    J1,
    #[serde(rename = "A3_A4")]
    A3A4,
    IPM,
    JPM,
    B1,
    #[serde(rename = "B2_B3")]
    B2B3,
    I2S,
    #[serde(rename = "I2_J2")]
    I2J2,
    HSRC,
}

impl LemmaId {
    pub const ALL: [LemmaId; 14] = [
        LemmaId::A1,
        LemmaId::A2,
        LemmaId::IJ,
        LemmaId::MG,
        LemmaId::I1,
        LemmaId::J1,
        LemmaId::A3A4,
        LemmaId::IPM,
        LemmaId::JPM,
        LemmaId::B1,
        LemmaId::B2B3,
        LemmaId::I2S,
        LemmaId::I2J2,
        LemmaId::HSRC,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LemmaId::A1 => "A1",
            LemmaId::A2 => "A2",
            LemmaId::IJ => "I_J",
            LemmaId::MG => "MG",
            LemmaId::I1 => "I1",
            LemmaId::J1 => "J1",
            LemmaId::A3A4 => "A3_A4",
            LemmaId::IPM => "IPM",
            LemmaId::JPM => "JPM",
            LemmaId::B1 => "B1",
            LemmaId::B2B3 => "B2_B3",
            LemmaId::I2S => "I2S",
            LemmaId::I2J2 => "I2_J2",
            LemmaId::HSRC => "HSRC",
        }
    }

    pub fn spec(self) -> LemmaSpec {
        use Domain::*;
        let (domain, integrand, envelope) = match self {
            LemmaId::A1 => (
                Quadrant,
                "int_{|t-r|}^{t+r} <y>^(-a-nu) (r-t+y)^(a-1) dy",
                "r^a W(r,t)^-1",
            ),
            LemmaId::A2 => (HalfLine, "int_0^z <y>^-b (z +- y)^(a-1) dy, b in {0, nu, nu p}", "z^a <z>^-b"),
            LemmaId::IJ => (
                Wedge,
                "I = int_z^inf <x+y>^(1-kappa) <x>^-a dx;  J = int_z^inf (x+y)^(1-mp+m) <x>^-ap dx",
                "I: <z>^-a;  J: <z>^(nu p - nu - a)",
            ),
            LemmaId::MG => (
                HalfPlane,
                "int_{t-r}^{t+r} <y>^-b1 (r-t+y)^(a-1) max(<y>,<t-r>)^-b2 dy, (b1,b2) in {(nu,a), (nu p, a+nu-nu p)}",
                "r^a W(r,|t|)^-1",
            ),
            LemmaId::I1 => (
                HalfPlane,
                "int_-inf^t int_{|l-|}^{l+} <l>^(1-kappa) W(l,|tau|)^-1 (l-l-)^(a-1) dl dtau",
                "r^a W(r,|t|)^-1",
            ),
            LemmaId::J1 => (
                HalfPlane,
                "int_-inf^t int_{|l-|}^{l+} l^(1-mp+m) W(l,|tau|)^-p (l-l-)^(a-1) dl dtau",
                "r^a W(r,|t|)^-1",
            ),
            LemmaId::A3A4 => (
                Line,
                "A3 = int_{-y}^inf <x+y>^(1-kappa) <x>^-b dx;  A4 = int_{-y}^inf (x+y)^(1-mp+m) <x+y>^-1 <x>^-b dx, b in {a(p-1), nu p}",
                "A3: <y>^-b;  A4: <y>^(2-mp+m-b)",
            ),
            LemmaId::IPM => (
                HalfPlane,
                "int_{t-2r}^t |l+-|^a <l+->^(1-kappa) W(|l+-|,|tau|)^-1 dtau",
                "r^a W(r,|t|)^-1",
            ),
            LemmaId::JPM => (
                HalfPlane,
                "int_{t-2r}^t |l+-|^(a+1-mp+m) <l+->^-1 W(|l+-|,|tau|)^-p dtau",
                "r^a W(r,|t|)^-1",
            ),
            LemmaId::B1 => (NegHalfLine, "int_-inf^w <y>^(-a-nu) (w-y)^(a-1) dy", "<w>^-nu"),
            LemmaId::B2B3 => (
                HalfPlane,
                "int_-inf^{-|t-r|} int_0^{l-} l^m <l>^(1-kappa) W^-1 / (l-^m (l- - l)^(1-a));  same with l^(1-mp+2m) W^-p",
                "<t-r>^-nu",
            ),
            LemmaId::I2S => (
                HalfPlane,
                "int_{-2|t-r|-1}^{min(t-r,0)} int_0^{l-} l^m <l>^(1-kappa) / (l-^(m+a) (l- - l)^(1-a));  same with l^(1-mp+2m)",
                "1;  <t-r>^(2-mp+m)",
            ),
            LemmaId::I2J2 => (
                HalfPlane,
                "int_-inf^{t-r} int_0^{l-} l^m <l>^(1-kappa) W^-1 / (l-^m l+^a (l- - l)^(1-a));  same with l^(1-mp+2m) W^-p",
                "W(r,|t|)^-1",
            ),
            LemmaId::HSRC => (
                NegHalfLine,
                "int_0^inf r^(2a+2m+2p(1-m)) <r>^-2p <|tau|+r>^-2ap <|tau|-r>^(-2 nu p) dr",
                "<tau>^(-2 theta - 2)",
            ),
        };
        LemmaSpec { id: self, domain, integrand, envelope }
    }

    /// Named hypotheses of this inequality, evaluated on `e`.
    pub fn hypotheses(self, e: &Exponents) -> Vec<Hypothesis> {
        let h = Hypotheses::new(e);
        match self {
            LemmaId::A1 | LemmaId::B1 => vec![h.a_positive(), h.nu_positive()],
            LemmaId::A2 => vec![h.a_positive(), h.nu_p_below_one()],
            LemmaId::IJ | LemmaId::I1 | LemmaId::J1 | LemmaId::IPM => vec![h.k1(), h.con(), h.ks()],
            LemmaId::MG => vec![h.k1(), h.con(), h.ks(), h.nu_p_below_one()],
            LemmaId::A3A4 => vec![h.kappa_above_two(), h.con(), h.iwcs()],
            LemmaId::JPM => vec![h.k1(), h.con(), h.ks(), h.iwcs()],
            LemmaId::B2B3 => vec![h.k1(), h.con(), h.ks(), h.a_at_most_one()],
            LemmaId::I2S => vec![h.ka(), h.con(), h.ks()],
            LemmaId::I2J2 => vec![h.m_one_a(), h.k1(), h.ka(), h.con(), h.ks()],
            LemmaId::HSRC => vec![h.k_above_m_plus_one(), h.ks()],
        }
    }

    /// Refuse to run outside the stated range of the inequality.
    pub fn check_preconditions(self, e: &Exponents) -> Result<()> {
        let failed: Vec<String> = self
            .hypotheses(e)
            .into_iter()
            .filter(|h| !h.holds)
            .map(|h| format!("{} ({})", h.name, h.detail))
            .collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(Error::Precondition { what: self.as_str().to_string(), detail: failed.join("; ") })
        }
    }

    /// Every component of the inequality at one sample point.
    pub fn evaluate(self, e: &Exponents, pt: Point, q: &Quadrature) -> Vec<Term> {
        let (x, y) = (pt.x, pt.y);
        let rt_env = |r: f64, t: f64| r.powf(e.a) / weight_wk(e.a, e.nu, r, t);
        match self {
            LemmaId::A1 => vec![Term::new("A1", ig::a1(q, e.a, e.nu, x, y), rt_env(x, y))],
            LemmaId::A2 => {
                let mut out = Vec::new();
                for b in self.b_values(e) {
                    for plus in [true, false] {
                        let sign = if plus { "plus" } else { "minus" };
                        out.push(Term::new(
                            format!("{sign} b={b:.4}"),
                            ig::a2(q, e.a, b, x, plus),
                            x.powf(e.a) * br(x).powf(-b),
                        ));
                    }
                }
                out
            }
            LemmaId::IJ => vec![
                Term::new("I", ig::i_small(q, e, x, y), br(x).powf(-e.a)),
                Term::new("J", ig::j_small(q, e, x, y), br(x).powf(e.nu * e.p - e.nu - e.a)),
            ],
            LemmaId::MG => self
                .mg_pairs(e)
                .into_iter()
                .map(|(b1, b2)| Term::new(format!("b1={b1:.4} b2={b2:.4}"), ig::mg(q, e, b1, b2, x, y), rt_env(x, y)))
                .collect(),
            LemmaId::I1 => vec![Term::new("I1", ig::i1(q, e, x, y), rt_env(x, y))],
            LemmaId::J1 => vec![Term::new("J1", ig::j1(q, e, x, y), rt_env(x, y))],
            LemmaId::A3A4 => {
                let mut out = Vec::new();
                for b in self.b_values(e) {
                    out.push(Term::new(format!("A3 b={b:.4}"), ig::a3(q, e, b, x), br(x).powf(-b)));
                    out.push(Term::new(
                        format!("A4 b={b:.4}"),
                        ig::a4(q, e, b, x),
                        br(x).powf(2.0 - e.m * e.p + e.m - b),
                    ));
                }
                out
            }
            LemmaId::IPM => vec![
                Term::new("plus", ig::i_pm(q, e, x, y, true), rt_env(x, y)),
                Term::new("minus", ig::i_pm(q, e, x, y, false), rt_env(x, y)),
            ],
            LemmaId::JPM => vec![
                Term::new("plus", ig::j_pm(q, e, x, y, true), rt_env(x, y)),
                Term::new("minus", ig::j_pm(q, e, x, y, false), rt_env(x, y)),
            ],
            LemmaId::B1 => vec![Term::new("B1", ig::b1(q, e.a, e.nu, x), br(x).powf(-e.nu))],
            LemmaId::B2B3 => {
                let env = br(y - x).powf(-e.nu);
                vec![
                    Term::new("B2", ig::b23(q, e, Profile::Potential, x, y), env),
                    Term::new("B3", ig::b23(q, e, Profile::Nonlinear, x, y), env),
                ]
            }
            LemmaId::I2S => {
                let d = y - x;
                vec![
                    Term::new("I", ig::i2_small(q, e, Profile::Potential, d), 1.0),
                    Term::new("J", ig::i2_small(q, e, Profile::Nonlinear, d), br(d).powf(2.0 - e.m * e.p + e.m)),
                ]
            }
            LemmaId::I2J2 => {
                let env = 1.0 / weight_wk(e.a, e.nu, x, y);
                vec![
                    Term::new("I2", ig::i2_big(q, e, Profile::Potential, x, y), env),
                    Term::new("J2", ig::i2_big(q, e, Profile::Nonlinear, x, y), env),
                ]
            }
            LemmaId::HSRC => vec![Term::new("H", ig::h_tilde(q, e, x), br(x).powf(-2.0 * e.theta - 2.0))],
        }
    }

    /// Exponents `b` fed to the one-dimensional bounds, as they occur downstream.
    fn b_values(self, e: &Exponents) -> Vec<f64> {
        match self {
            LemmaId::A2 => vec![0.0, e.nu, e.nu * e.p],
            _ => vec![e.a * (e.p - 1.0), e.nu * e.p],
        }
    }

    fn mg_pairs(self, e: &Exponents) -> Vec<(f64, f64)> {
        vec![(e.nu, e.a), (e.nu * e.p, e.a + e.nu - e.nu * e.p)]
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LemmaId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown lemma id `{s}`")))
    }
}

/// Sampling domain of a registry entry; `Point` coordinates are read in its terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// `(r, t)` with `r > 0`, `t >= 0`.
    Quadrant,
    /// `(r, t)` with `r > 0`, `t` real.
    HalfPlane,
    /// `z > 0`.
    HalfLine,
    /// `w <= 0`.
    NegHalfLine,
    /// `y` real.
    Line,
    /// `(z, y)` with `z >= |y|`.
    Wedge,
}

impl Domain {
    pub fn coordinate_names(self) -> &'static [&'static str] {
        match self {
            Domain::Quadrant | Domain::HalfPlane => &["r", "t"],
            Domain::HalfLine => &["z"],
            Domain::NegHalfLine => &["w"],
            Domain::Line => &["y"],
            Domain::Wedge => &["z", "y"],
        }
    }

    pub fn dims(self) -> usize {
        self.coordinate_names().len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    /// Unused on one-dimensional domains.
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn line(x: f64) -> Self {
        Point { x, y: 0.0 }
    }

    /// Largest coordinate modulus, used to tell box points from extension points.
    pub fn extent(&self) -> f64 {
        self.x.abs().max(self.y.abs())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LemmaSpec {
    pub id: LemmaId,
    pub domain: Domain,
    pub integrand: &'static str,
    pub envelope: &'static str,
}

/// One component of an inequality evaluated at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub component: String,
    pub lhs: f64,
    pub envelope: f64,
    pub converged: bool,
}

impl Term {
    fn new(component: impl Into<String>, est: Estimate, envelope: f64) -> Self {
        Term { component: component.into(), lhs: est.value, envelope, converged: est.converged }
    }

    /// `lhs / envelope`; a vanishing pair counts as ratio 0.
    pub fn ratio(&self) -> f64 {
        if self.lhs == 0.0 {
            0.0
        } else if self.envelope > 0.0 {
            self.lhs / self.envelope
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: &'static str,
    pub holds: bool,
    pub detail: String,
}

struct Hypotheses<'a> {
    e: &'a Exponents,
}

impl<'a> Hypotheses<'a> {
    fn new(e: &'a Exponents) -> Self {
        Hypotheses { e }
    }

    fn make(name: &'static str, holds: bool, detail: String) -> Hypothesis {
        Hypothesis { name, holds, detail }
    }

    fn a_positive(&self) -> Hypothesis {
        Self::make("a > 0", self.e.a > 0.0, format!("a = {}", self.e.a))
    }

    fn nu_positive(&self) -> Hypothesis {
        Self::make("nu > 0", self.e.nu > 0.0, format!("nu = {}", self.e.nu))
    }

    fn nu_p_below_one(&self) -> Hypothesis {
        let v = self.e.nu * self.e.p;
        Self::make("b < 1 for b = nu p", v < 1.0, format!("nu p = {v}"))
    }

    fn a_at_most_one(&self) -> Hypothesis {
        Self::make("a <= 1", self.e.a <= 1.0, format!("a = {}", self.e.a))
    }

    fn kappa_above_two(&self) -> Hypothesis {
        Self::make("kappa > 2", self.e.kappa > 2.0, format!("kappa = {}", self.e.kappa))
    }

    fn k1(&self) -> Hypothesis {
        let e = self.e;
        let lo = 2.0 / (e.p - 1.0);
        let hi = ((e.a + e.m) * e.p - 1.0).min(e.a + e.m + 1.0 / e.p);
        Self::make("k window", lo <= e.k && e.k < hi, format!("need {lo:.6} <= k = {} < {hi:.6}", e.k))
    }

    fn ka(&self) -> Hypothesis {
        let e = self.e;
        Self::make(
            "kappa window",
            2.0 < e.kappa && e.kappa < e.m + 2.0,
            format!("need 2 < kappa = {} < {}", e.kappa, e.m + 2.0),
        )
    }

    fn con(&self) -> Hypothesis {
        let e = self.e;
        let (x, y, z) = (e.a * (e.p - 1.0), 2.0 - e.m * e.p + e.m, e.a * e.p);
        Self::make(
            "exponent chain",
            0.0 < x && x < y && y < z,
            format!("need 0 < a(p-1) = {x:.6} < 2-mp+m = {y:.6} < ap = {z:.6}"),
        )
    }

    fn ks(&self) -> Hypothesis {
        let e = self.e;
        Self::make(
            "fractional part",
            0.0 < e.nu && e.nu < 1.0 / e.p && e.m >= 0.0 && e.a > 0.0 && e.kappa > 2.0 && e.p > 1.0,
            format!("need 0 < nu = {} < 1/p = {:.6}, m >= 0, a > 0, kappa > 2, p > 1", e.nu, 1.0 / e.p),
        )
    }

    fn iwcs(&self) -> Hypothesis {
        let e = self.e;
        let (ap1, amp1) = (e.a * (e.p - 1.0), (e.a + e.m) * (e.p - 1.0));
        let (np, mnp) = (e.nu * e.p, e.m * (e.p - 1.0) + e.nu * e.p);
        Self::make(
            "integrability chain",
            ap1 < 1.0 && 1.0 < amp1 && np < 1.0 && 1.0 < mnp,
            format!("need a(p-1) = {ap1:.6} < 1 < (a+m)(p-1) = {amp1:.6}, nu p = {np:.6} < 1 < m(p-1)+nu p = {mnp:.6}"),
        )
    }

    fn m_one_a(&self) -> Hypothesis {
        let e = self.e;
        Self::make("m >= 1 >= a", e.m >= 1.0 && 1.0 >= e.a, format!("m = {}, a = {}", e.m, e.a))
    }

    fn k_above_m_plus_one(&self) -> Hypothesis {
        let e = self.e;
        Self::make("k > m + 1", e.k > e.m + 1.0, format!("k = {}, m + 1 = {}", e.k, e.m + 1.0))
    }
}

/// A closed-form value the quadrature must reproduce.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub name: String,
    pub value: f64,
    pub expected: f64,
}

impl SpotCheck {
    pub fn error(&self) -> f64 {
        (self.value - self.expected).abs()
    }
}

/// Closed-form spot values: A2 with `(a,b,z) = (1,0,2)`, B1 with
/// `(w,a,nu) = (0,1,1/2)`, and A1 on the empty interval `t = 0`.
pub fn spot_checks(e: &Exponents) -> Vec<SpotCheck> {
    let q = Quadrature::default();
    let mut out = vec![
        SpotCheck { name: "A2(a=1,b=0,z=2,minus)".into(), value: ig::a2(&q, 1.0, 0.0, 2.0, false).value, expected: 2.0 },
        SpotCheck { name: "A2(a=1,b=0,z=2,plus)".into(), value: ig::a2(&q, 1.0, 0.0, 2.0, true).value, expected: 2.0 },
        SpotCheck { name: "B1(w=0,a=1,nu=0.5)".into(), value: ig::b1(&q, 1.0, 0.5, 0.0).value, expected: 2.0 },
    ];
    for r in [0.5, 3.0, 20.0] {
        out.push(SpotCheck {
            name: format!("A1(r={r},t=0)"),
            value: ig::a1(&q, e.a, e.nu, r, 0.0).value,
            expected: 0.0,
        });
    }
    out
}
