//! Initial data, potentials and the power nonlinearity, each scaled so the
//! corresponding decay hypothesis holds with constant exactly one (or just
//! below it).

use serde::{Deserialize, Serialize};

use super::bracket;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// `phi = c eps <r>^-k`, `psi = 0`.
    Power,
    /// `phi = c1 eps <r>^-k`, `psi = c2 eps <r>^(-k-1)`.
    PowerPair,
    /// `phi = c eps (1 - r^2)^6` on `r < 1`, `psi = 0`.
    Bump,
}

impl std::str::FromStr for Profile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(Profile::Power),
            "power_pair" => Ok(Profile::PowerPair),
            "bump" => Ok(Profile::Bump),
            other => Err(Error::InvalidInput(format!("unknown data profile '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub profile: Profile,
    pub eps: f64,
    pub k: f64,
    c_phi: f64,
    c_psi: f64,
}

const BUMP_POWER: i32 = 6;

fn bump_raw(r: f64) -> [f64; 3] {
    if r >= 1.0 {
        return [0.0; 3];
    }
    let g = 1.0 - r * r;
    let p = BUMP_POWER as f64;
    let v = g.powi(BUMP_POWER);
    let d1 = -2.0 * p * r * g.powi(BUMP_POWER - 1);
    let d2 = -2.0 * p * g.powi(BUMP_POWER - 1) + 4.0 * p * (p - 1.0) * r * r * g.powi(BUMP_POWER - 2);
    [v, d1, d2]
}

/// Dense sampling used for the hypothesis audits.
fn audit_radii() -> impl Iterator<Item = f64> {
    let fine = (0..4000).map(|i| i as f64 * 2.5e-4);
    let coarse = (0..4000).map(|i| 1.0 + i as f64 * 0.05);
    let far = (0..400).map(|i| 200.0 * 1.02f64.powi(i));
    fine.chain(coarse).chain(far)
}

impl InitialData {
    /// Data with unit constant in the decay hypothesis (0.99 for the bump,
    /// whose constant comes from sampling).
    pub fn new(profile: Profile, eps: f64, k: f64) -> Result<Self> {
        if !(eps >= 0.0 && k > 0.0) {
            return Err(Error::InvalidInput(format!("need eps >= 0, k > 0, got {eps}, {k}")));
        }
        let (c_phi, c_psi) = match profile {
            Profile::Power => (1.0 / ((1.0 + k) * (1.0 + k)), 0.0),
            Profile::PowerPair => (0.5 / ((1.0 + k) * (1.0 + k)), 0.5 / (k + 2.0)),
            Profile::Bump => {
                let worst = audit_radii()
                    .filter(|&r| r < 1.0)
                    .map(|r| {
                        let [v, d1, d2] = bump_raw(r);
                        let b = bracket(r);
                        (v.abs() + b * d1.abs() + b * b * d2.abs()) * b.powf(k)
                    })
                    .fold(0.0, f64::max);
                (0.99 / worst, 0.0)
            }
        };
        Ok(InitialData { profile, eps, k, c_phi, c_psi })
    }

    /// `[phi, phi', phi'']` at radius `r`.
    pub fn phi_derivs(&self, r: f64) -> [f64; 3] {
        let s = self.c_phi * self.eps;
        match self.profile {
            Profile::Power | Profile::PowerPair => {
                let b = bracket(r);
                let v = s * b.powf(-self.k);
                [v, -self.k * v / b, self.k * (self.k + 1.0) * v / (b * b)]
            }
            Profile::Bump => {
                let [v, d1, d2] = bump_raw(r);
                [s * v, s * d1, s * d2]
            }
        }
    }

    /// `[psi, psi']` at radius `r`.
    pub fn psi_derivs(&self, r: f64) -> [f64; 2] {
        if self.c_psi == 0.0 {
            return [0.0, 0.0];
        }
        let b = bracket(r);
        let v = self.c_psi * self.eps * b.powf(-self.k - 1.0);
        [v, -(self.k + 1.0) * v / b]
    }

    pub fn phi(&self, r: f64) -> f64 {
        self.phi_derivs(r)[0]
    }

    pub fn psi(&self, r: f64) -> f64 {
        self.psi_derivs(r)[0]
    }

    /// Left side of the data decay hypothesis divided by `eps <r>^-k`.
    pub fn hypothesis_ratio(&self, r: f64) -> f64 {
        if self.eps == 0.0 {
            return 0.0;
        }
        let b = bracket(r);
        let [p0, p1, p2] = self.phi_derivs(r);
        let [q0, q1] = self.psi_derivs(r);
        let lhs = p0.abs() + b * p1.abs() + b * b * p2.abs() + b * q0.abs() + b * b * q1.abs();
        lhs / (self.eps * b.powf(-self.k))
    }

    /// Largest hypothesis ratio over a dense radial sample; at most one when valid.
    pub fn audit(&self) -> f64 {
        audit_radii().map(|r| self.hypothesis_ratio(r)).fold(0.0, f64::max)
    }
}

pub fn make_initial_data(profile: Profile, eps: f64, k: f64) -> Result<InitialData> {
    let d = InitialData::new(profile, eps, k)?;
    let worst = d.audit();
    if worst > 1.0 + 1e-12 {
        return Err(Error::Numerical(format!("data decay audit failed: ratio {worst}")));
    }
    Ok(d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialShape {
    /// `V = v0 <r>^-kappa / (1 + kappa)`.
    Power,
    Zero,
}

impl std::str::FromStr for PotentialShape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(PotentialShape::Power),
            "zero" => Ok(PotentialShape::Zero),
            other => Err(Error::InvalidInput(format!("unknown potential shape '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    pub shape: PotentialShape,
    pub v0: f64,
    pub kappa: f64,
}

impl Potential {
    pub fn zero() -> Self {
        Potential { shape: PotentialShape::Zero, v0: 0.0, kappa: 3.0 }
    }

    pub fn value(&self, r: f64) -> f64 {
        match self.shape {
            PotentialShape::Power => self.v0 / (1.0 + self.kappa) * bracket(r).powf(-self.kappa),
            PotentialShape::Zero => 0.0,
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        match self.shape {
            PotentialShape::Power => -self.kappa * self.value(r) / bracket(r),
            PotentialShape::Zero => 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.shape == PotentialShape::Zero || self.v0 == 0.0
    }

    /// `(|V| + <r>|V'|) / (v0 <r>^-kappa)`.
    pub fn hypothesis_ratio(&self, r: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let b = bracket(r);
        (self.value(r).abs() + b * self.derivative(r).abs()) / (self.v0 * b.powf(-self.kappa))
    }

    pub fn audit(&self) -> f64 {
        audit_radii().map(|r| self.hypothesis_ratio(r)).fold(0.0, f64::max)
    }
}

pub fn make_potential(v0: f64, kappa: f64, shape: PotentialShape) -> Result<Potential> {
    if !(v0 >= 0.0 && kappa > 2.0) {
        return Err(Error::InvalidInput(format!("need v0 >= 0, kappa > 2, got {v0}, {kappa}")));
    }
    let v = Potential { shape, v0, kappa };
    let worst = v.audit();
    if worst > 1.0 + 1e-12 {
        return Err(Error::Numerical(format!("potential decay audit failed: ratio {worst}")));
    }
    Ok(v)
}

/// Odd power nonlinearity `F(u) = A |u|^(p-1) u`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Nonlinearity {
    pub a: f64,
    pub p: f64,
}

impl Nonlinearity {
    pub fn none() -> Self {
        Nonlinearity { a: 0.0, p: 2.0 }
    }

    #[inline]
    pub fn f(&self, u: f64) -> f64 {
        if self.a == 0.0 {
            return 0.0;
        }
        self.a * u.abs().powf(self.p - 1.0) * u
    }

    #[inline]
    pub fn df(&self, u: f64) -> f64 {
        if self.a == 0.0 {
            return 0.0;
        }
        self.a * self.p * u.abs().powf(self.p - 1.0)
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0.0
    }

    /// Modulus bound for `|F'(u) - F'(v)|` on `|u|, |v| <= 1`:
    /// `Ap|u-v|^(p-1)` for `p <= 2`, `2Ap|u-v|` above.
    pub fn derivative_modulus(&self, u: f64, v: f64) -> f64 {
        let d = (u - v).abs();
        if self.p <= 2.0 {
            self.a * self.p * d.powf(self.p - 1.0)
        } else {
            2.0 * self.a * self.p * d
        }
    }
}

pub fn make_nonlinearity(a: f64, p: f64) -> Result<Nonlinearity> {
    if !(a >= 0.0 && p > 1.0) {
        return Err(Error::InvalidInput(format!("need A >= 0, p > 1, got {a}, {p}")));
    }
    Ok(Nonlinearity { a, p })
}
