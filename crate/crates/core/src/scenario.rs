//! Exponent bookkeeping for a scattering scenario.
//!
//! Everything downstream (weights, lemma integrands, the expected decay
//! rate) is derived from the six raw numbers `(n, p, k, kappa, eps, v0)`.
//! Validation is all-or-nothing: every violated constraint is reported,
//! not just the first.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Raw scenario parameters as supplied by a user or a config file.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioInput {
    pub n: u32,
    pub p: f64,
    pub k: f64,
    pub kappa: f64,
    pub eps: f64,
    pub v0: f64,
}

impl ScenarioInput {
    /// The reference configuration used throughout the examples and tests.
    pub fn canonical() -> Self {
        ScenarioInput { n: 5, p: 1.9, k: 2.3, kappa: 2.5, eps: 1e-3, v0: 1e-3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    Dimension,
    Positivity,
    /// Strauss exponent below `p`, conformal-type cap above.
    ExponentWindow,
    /// `k >= 2/(p-1)`.
    DecayLowerBound,
    /// `k < min((a+m)p - 1, a + m + 1/p)` after reduction.
    DecayUpperBound,
    /// `k < (n+1)/2`.
    DecayBelowHalfDimension,
    /// `2 < kappa < m + 2` after reduction.
    PotentialDecay,
    /// `0 < a(p-1) < 2 - mp + m < ap`.
    ExponentChain,
    /// `0 < nu < 1/p` with `nu = k - m - a`.
    FractionalPart,
    /// `a(p-1) < 1 < (a+m)(p-1)` and `nu p < 1 < m(p-1) + nu p`.
    IntegrabilityChain,
    /// `k > m + 1`, needed for a positive decay rate.
    PositiveRate,
}

impl Constraint {
    pub fn name(self) -> &'static str {
        match self {
            Constraint::Dimension => "dimension",
            Constraint::Positivity => "positivity",
            Constraint::ExponentWindow => "exponent-window",
            Constraint::DecayLowerBound => "decay-lower-bound",
            Constraint::DecayUpperBound => "decay-upper-bound",
            Constraint::DecayBelowHalfDimension => "decay-below-half-dimension",
            Constraint::PotentialDecay => "potential-decay",
            Constraint::ExponentChain => "exponent-chain",
            Constraint::FractionalPart => "fractional-part",
            Constraint::IntegrabilityChain => "integrability-chain",
            Constraint::PositiveRate => "positive-rate",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: Constraint,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.constraint.name(), self.detail)
    }
}

/// Outcome of evaluating one constraint on a validated scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub constraint: Constraint,
    pub holds: bool,
    pub detail: String,
}

/// The weight exponents and everything a lemma integrand or a norm needs.
///
/// Normally built from a validated [`Scenario`]; tests of lemma
/// preconditions construct it directly to probe refused parameter sets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub n: u32,
    pub a: f64,
    pub m: f64,
    pub p: f64,
    /// Decay exponent entering the weight (the reduced one).
    pub k: f64,
    pub kappa: f64,
    pub nu: f64,
    pub theta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub input: ScenarioInput,
    pub a: f64,
    pub m: f64,
    pub strauss: f64,
    /// Decay exponent after reduction; equal to `input.k` unless reduced.
    pub k_reduced: f64,
    pub kappa_reduced: f64,
    pub nu: f64,
    /// Decay rate computed from the original `k`.
    pub theta: f64,
    pub k_was_reduced: bool,
    pub kappa_was_reduced: bool,
}

impl Scenario {
    pub fn n(&self) -> u32 {
        self.input.n
    }

    pub fn p(&self) -> f64 {
        self.input.p
    }

    pub fn eps(&self) -> f64 {
        self.input.eps
    }

    pub fn v0(&self) -> f64 {
        self.input.v0
    }

    pub fn exponents(&self) -> Exponents {
        Exponents {
            n: self.input.n,
            a: self.a,
            m: self.m,
            p: self.input.p,
            k: self.k_reduced,
            kappa: self.kappa_reduced,
            nu: self.nu,
            theta: self.theta,
        }
    }

    /// True when the weight uses a smaller `k` than the one defining `theta`.
    pub fn weight_and_rate_diverge(&self) -> bool {
        self.k_was_reduced
    }

    /// Re-evaluate every constraint on the reduced exponents.
    pub fn checks(&self) -> Vec<ConstraintCheck> {
        constraint_checks(self.input.n, self.input.p, self.k_reduced, self.kappa_reduced)
    }
}

/// `(a, m)` with `a + m = (n-1)/2`: `(1, (n-3)/2)` for odd `n`, `(1/2, (n-2)/2)` for even `n`.
pub fn parity_params(n: u32) -> (f64, f64) {
    if n % 2 == 1 {
        (1.0, (n as f64 - 3.0) / 2.0)
    } else {
        (0.5, (n as f64 - 2.0) / 2.0)
    }
}

/// Positive root of `(n-1)p^2 = (n+1)p + 2`; infinite for `n = 1`.
pub fn strauss_exponent(n: u32) -> f64 {
    if n <= 1 {
        return f64::INFINITY;
    }
    let n = n as f64;
    let disc = (n + 1.0) * (n + 1.0) + 8.0 * (n - 1.0);
    (n + 1.0 + disc.sqrt()) / (2.0 * (n - 1.0))
}

/// Exact rational value of a float, read from its shortest round-trip decimal form.
///
/// `2.3` becomes `23/10` rather than the binary expansion of the double.
pub fn decimal_rational(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let s = format!("{x}");
    let (neg, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.as_str()),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    let numer: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    let r = BigRational::new(numer, denom);
    Some(if neg { -r } else { r })
}

fn parity_rational(n: u32) -> (BigRational, BigRational) {
    let half = BigRational::new(1.into(), 2.into());
    let n_r = BigRational::from_integer(n.into());
    if n % 2 == 1 {
        (BigRational::one(), (n_r - BigRational::from_integer(3.into())) * half)
    } else {
        (half.clone(), (n_r - BigRational::from_integer(2.into())) * half)
    }
}

/// Decay rate `min((a+m)(p-1) - 1, (k-m)p - 1, k - m - 1)` in exact rational arithmetic.
pub fn theta_exact(n: u32, p: f64, k: f64) -> Option<BigRational> {
    let p = decimal_rational(p)?;
    let k = decimal_rational(k)?;
    let (a, m) = parity_rational(n);
    let one = BigRational::one();
    let t1 = (&a + &m) * (&p - &one) - &one;
    let t2 = (&k - &m) * &p - &one;
    let t3 = &k - &m - &one;
    Some(t1.min(t2).min(t3))
}

/// Expected scattering rate; exact for decimal inputs.
pub fn theta(n: u32, p: f64, k: f64) -> f64 {
    match theta_exact(n, p, k) {
        Some(t) => t.to_f64().unwrap_or(f64::NAN),
        None => f64::NAN,
    }
}

/// Upper limit for `k`: `min((a+m)p - 1, a + m + 1/p)`.
pub fn k_upper(n: u32, p: f64) -> f64 {
    let (a, m) = parity_params(n);
    ((a + m) * p - 1.0).min(a + m + 1.0 / p)
}

/// Replace an overly slow decay exponent by the midpoint of the admissible range.
///
/// Returns `(k_used, reduced)`. `k` equal to the upper limit is not reduced;
/// the strict inequality then fails during validation. Neither is any `k`
/// when the range is empty, so the reported violations refer to the input.
pub fn reduce_k(n: u32, p: f64, k: f64) -> (f64, bool) {
    let upper = k_upper(n, p);
    if k > upper && upper > 2.0 / (p - 1.0) {
        (0.5 * (2.0 / (p - 1.0) + upper), true)
    } else {
        (k, false)
    }
}

/// `kappa >= m + 2` is replaced by the midpoint of `(2, m + 2)`.
pub fn reduce_kappa(n: u32, kappa: f64) -> (f64, bool) {
    let (_, m) = parity_params(n);
    if kappa >= m + 2.0 {
        (0.5 * (2.0 + m + 2.0), true)
    } else {
        (kappa, false)
    }
}

fn check(out: &mut Vec<ConstraintCheck>, constraint: Constraint, holds: bool, detail: String) {
    out.push(ConstraintCheck { constraint, holds, detail });
}

fn constraint_checks(n: u32, p: f64, k: f64, kappa: f64) -> Vec<ConstraintCheck> {
    let (a, m) = parity_params(n);
    let nu = k - m - a;
    let nf = n as f64;
    let mut out = Vec::new();

    let pn = strauss_exponent(n);
    let cap = 1.0 + 4.0 / (nf - 1.0);
    check(
        &mut out,
        Constraint::ExponentWindow,
        pn < p && p < cap,
        format!("need {pn:.6} < p < {cap:.6}, got p = {p}"),
    );
    let lo = 2.0 / (p - 1.0);
    check(
        &mut out,
        Constraint::DecayLowerBound,
        k >= lo,
        format!("need k >= 2/(p-1) = {lo:.6}, got k = {k}"),
    );
    let up = k_upper(n, p);
    check(
        &mut out,
        Constraint::DecayUpperBound,
        k < up,
        format!("need k < min((a+m)p-1, a+m+1/p) = {up:.6}, got k = {k}"),
    );
    check(
        &mut out,
        Constraint::DecayBelowHalfDimension,
        k < (nf + 1.0) / 2.0,
        format!("need k < (n+1)/2 = {}, got k = {k}", (nf + 1.0) / 2.0),
    );
    check(
        &mut out,
        Constraint::PotentialDecay,
        2.0 < kappa && kappa < m + 2.0,
        format!("need 2 < kappa < m+2 = {}, got kappa = {kappa}", m + 2.0),
    );
    let c1 = a * (p - 1.0);
    let c2 = 2.0 - m * p + m;
    let c3 = a * p;
    check(
        &mut out,
        Constraint::ExponentChain,
        0.0 < c1 && c1 < c2 && c2 < c3,
        format!("need 0 < a(p-1) < 2-mp+m < ap, got {c1:.6} < {c2:.6} < {c3:.6}"),
    );
    check(
        &mut out,
        Constraint::FractionalPart,
        0.0 < nu && nu < 1.0 / p,
        format!("need 0 < nu < 1/p = {:.6}, got nu = {nu:.6}", 1.0 / p),
    );
    let ok = c1 < 1.0
        && 1.0 < (a + m) * (p - 1.0)
        && nu * p < 1.0
        && 1.0 < m * (p - 1.0) + nu * p;
    check(
        &mut out,
        Constraint::IntegrabilityChain,
        ok,
        format!(
            "need a(p-1) < 1 < (a+m)(p-1) and nu p < 1 < m(p-1)+nu p, got {c1:.6}, {:.6}, {:.6}, {:.6}",
            (a + m) * (p - 1.0),
            nu * p,
            m * (p - 1.0) + nu * p
        ),
    );
    out
}

/// Check every hypothesis, reduce `k` and `kappa` where allowed, derive the rest.
pub fn validate_scenario(input: ScenarioInput) -> Result<Scenario> {
    let ScenarioInput { n, p, k, kappa, eps, v0 } = input;
    let mut violations = Vec::new();
    let mut bad = |c: Constraint, d: String| violations.push(Violation { constraint: c, detail: d });

    if n < 4 {
        bad(Constraint::Dimension, format!("need n >= 4, got n = {n}"));
    }
    let finite = [p, k, kappa, eps, v0].iter().all(|x| x.is_finite());
    if !finite {
        bad(Constraint::Positivity, "all parameters must be finite".into());
    }
    if !(p > 1.0) {
        bad(Constraint::Positivity, format!("need p > 1, got {p}"));
    }
    if !(k > 0.0) {
        bad(Constraint::Positivity, format!("need k > 0, got {k}"));
    }
    if !(kappa > 2.0) {
        bad(Constraint::Positivity, format!("need kappa > 2, got {kappa}"));
    }
    if !(eps >= 0.0) {
        bad(Constraint::Positivity, format!("need eps >= 0, got {eps}"));
    }
    if !(v0 >= 0.0) {
        bad(Constraint::Positivity, format!("need v0 >= 0, got {v0}"));
    }
    if !violations.is_empty() {
        return Err(Error::InvalidScenario(violations));
    }

    let (k_red, k_was_reduced) = reduce_k(n, p, k);
    let (kappa_red, kappa_was_reduced) = reduce_kappa(n, kappa);
    for c in constraint_checks(n, p, k_red, kappa_red) {
        if !c.holds {
            let mut detail = c.detail;
            if k_was_reduced {
                detail += &format!(" (k reduced from {k})");
            }
            violations.push(Violation { constraint: c.constraint, detail });
        }
    }
    let (a, m) = parity_params(n);
    if !(k > m + 1.0) {
        violations.push(Violation {
            constraint: Constraint::PositiveRate,
            detail: format!("need k > m+1 = {}, got k = {k}", m + 1.0),
        });
    }
    if !violations.is_empty() {
        return Err(Error::InvalidScenario(violations));
    }
    let th = theta(n, p, k);
    if !(th > 0.0) {
        return Err(Error::InvalidScenario(vec![Violation {
            constraint: Constraint::PositiveRate,
            detail: format!("decay rate {th} is not positive"),
        }]));
    }
    Ok(Scenario {
        input,
        a,
        m,
        strauss: strauss_exponent(n),
        k_reduced: k_red,
        kappa_reduced: kappa_red,
        nu: k_red - m - a,
        theta: th,
        k_was_reduced,
        kappa_was_reduced,
    })
}

/// Residual of the Strauss quadratic at its computed root.
pub fn strauss_residual(n: u32) -> f64 {
    let p = strauss_exponent(n);
    let nf = n as f64;
    ((nf - 1.0) * p * p - (nf + 1.0) * p - 2.0).abs()
}
