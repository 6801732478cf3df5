//! Run configuration: one TOML file per run, unknown keys rejected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{make_initial_data, make_nonlinearity, make_potential, PotentialShape, Profile};
use crate::lemma::{CertifyOptions, LemmaId};
use crate::radial_wave::SolverConfig;
use crate::scattering::ScatterSetup;
use crate::scenario::{validate_scenario, ScenarioInput};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Directory receiving manifests and CSVs; relative paths are taken
    /// from the working directory.
    pub output: String,
    pub scenario: ScenarioInput,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub data: DataBlock,
    #[serde(default)]
    pub potential: PotentialBlock,
    #[serde(default)]
    pub iteration: IterationBlock,
    #[serde(default)]
    pub fit: FitBlock,
    #[serde(default)]
    pub verify: VerifyBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverBlock {
    /// Defaults to the largest stable Courant number for the dimension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfl: Option<f64>,
    pub dr: f64,
    /// Defaults to `report_radius + 2 (t_max - t_min)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    pub t_min: f64,
    pub t_max: f64,
    /// Defaults to `2 max(|t_min|, t_max)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_radius: Option<f64>,
    /// Snapshot cadence in time levels.
    pub snapshot_every: usize,
    /// Snapshot cadence in radial nodes.
    pub snapshot_stride: usize,
}

impl Default for SolverBlock {
    fn default() -> Self {
        SolverBlock {
            cfl: None,
            dr: 0.125,
            r_max: None,
            t_min: -60.0,
            t_max: 60.0,
            report_radius: None,
            snapshot_every: 16,
            snapshot_stride: 4,
        }
    }
}

/// Initial data. `eps` and `k` default to the scenario values and must
/// agree with them when given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataBlock {
    pub profile: Profile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
}

impl Default for DataBlock {
    fn default() -> Self {
        DataBlock { profile: Profile::Power, eps: None, k: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialBlock {
    pub shape: PotentialShape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
}

impl Default for PotentialBlock {
    fn default() -> Self {
        PotentialBlock { shape: PotentialShape::Power, v0: None, kappa: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IterationBlock {
    /// Amplitude `A` of the nonlinearity; zero switches it off.
    pub amplitude: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub tail_tolerance: f64,
}

impl Default for IterationBlock {
    fn default() -> Self {
        IterationBlock { amplitude: 1.0, tol: 1e-8, max_iter: 8, tail_tolerance: 1e-3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitBlock {
    pub t_lo: f64,
    pub t_hi: f64,
}

impl Default for FitBlock {
    fn default() -> Self {
        FitBlock { t_lo: 2.0, t_hi: 40.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyBlock {
    /// Registry ids, or `["all"]`.
    pub lemmas: Vec<String>,
    #[serde(rename = "box")]
    pub box_radius: f64,
    pub points: usize,
    pub levels: Vec<f64>,
    pub doubling: bool,
}

impl Default for VerifyBlock {
    fn default() -> Self {
        let o = CertifyOptions::default();
        VerifyBlock {
            lemmas: vec!["all".into()],
            box_radius: o.radius,
            points: o.points,
            levels: o.levels,
            doubling: o.doubling,
        }
    }
}

impl VerifyBlock {
    pub fn lemma_ids(&self) -> Result<Vec<LemmaId>> {
        if self.lemmas.iter().any(|s| s.eq_ignore_ascii_case("all")) {
            return Ok(LemmaId::ALL.to_vec());
        }
        if self.lemmas.is_empty() {
            return Err(Error::Config("verify.lemmas is empty".into()));
        }
        let mut ids = Vec::with_capacity(self.lemmas.len());
        for s in &self.lemmas {
            let id: LemmaId = s.parse()?;
            if !ids.contains(&id) {
                ids.push(id);
            }
        }
        Ok(ids)
    }

    pub fn options(&self) -> CertifyOptions {
        CertifyOptions {
            radius: self.box_radius,
            points: self.points,
            levels: self.levels.clone(),
            doubling: self.doubling,
        }
    }
}

/// Parameter grids; an empty list keeps the scenario value. Rows are the
/// Cartesian product in the order `n, p, k, kappa, eps, v0`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub p: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub k: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kappa: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eps: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub v0: Vec<f64>,
    /// Run the full scattering pipeline per row.
    #[serde(default = "yes")]
    pub scatter: bool,
    /// Certify the `verify` lemmas per row.
    #[serde(default)]
    pub certify: bool,
}

fn yes() -> bool {
    true
}

impl SweepBlock {
    pub fn rows(&self, base: &ScenarioInput) -> Vec<ScenarioInput> {
        fn or<T: Copy>(v: &[T], d: T) -> Vec<T> {
            if v.is_empty() {
                vec![d]
            } else {
                v.to_vec()
            }
        }
        let mut out = Vec::new();
        for &n in &or(&self.n, base.n) {
            for &p in &or(&self.p, base.p) {
                for &k in &or(&self.k, base.k) {
                    for &kappa in &or(&self.kappa, base.kappa) {
                        for &eps in &or(&self.eps, base.eps) {
                            for &v0 in &or(&self.v0, base.v0) {
                                out.push(ScenarioInput { n, p, k, kappa, eps, v0 });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

fn agree(what: &str, given: Option<f64>, scenario: f64) -> Result<()> {
    match given {
        Some(x) if x != scenario => Err(Error::Config(format!(
            "{what} = {x} disagrees with the scenario value {scenario}"
        ))),
        _ => Ok(()),
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(s).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&s)
    }

    /// Canonical text form; hashing this makes the manifest independent of
    /// comments and key order in the original file.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Structural checks that do not depend on the scenario being valid.
    pub fn check(&self) -> Result<()> {
        let s = &self.solver;
        if !(s.dr > 0.0 && s.t_min < 0.0 && s.t_max > 0.0) {
            return Err(Error::Config(format!(
                "solver needs dr > 0 and t_min < 0 < t_max, got dr = {}, [{}, {}]",
                s.dr, s.t_min, s.t_max
            )));
        }
        if s.snapshot_every == 0 || s.snapshot_stride == 0 {
            return Err(Error::Config("snapshot cadences must be positive".into()));
        }
        if !(self.fit.t_hi > self.fit.t_lo && self.fit.t_lo > 0.0) {
            return Err(Error::Config(format!("fit range [{}, {}] is empty", self.fit.t_lo, self.fit.t_hi)));
        }
        agree("data.eps", self.data.eps, self.scenario.eps)?;
        agree("data.k", self.data.k, self.scenario.k)?;
        agree("potential.v0", self.potential.v0, self.scenario.v0)?;
        agree("potential.kappa", self.potential.kappa, self.scenario.kappa)?;
        self.verify.lemma_ids()?;
        Ok(())
    }

    pub fn report_radius(&self) -> f64 {
        let s = &self.solver;
        s.report_radius.unwrap_or(2.0 * s.t_max.max(-s.t_min))
    }

    pub fn solver_config(&self, n: u32) -> SolverConfig {
        let s = &self.solver;
        SolverConfig {
            cfl: s.cfl.unwrap_or_else(|| SolverConfig::default_cfl(n)),
            dr: s.dr,
            r_max: s.r_max.unwrap_or(self.report_radius() + 2.0 * (s.t_max - s.t_min)),
        }
    }

    /// Scattering setup for `input`, which is the scenario block except in sweeps.
    pub fn setup_for(&self, input: ScenarioInput) -> Result<ScatterSetup> {
        let scenario = validate_scenario(input)?;
        let data = make_initial_data(self.data.profile, input.eps, input.k)?;
        let potential = make_potential(input.v0, input.kappa, self.potential.shape)?;
        let nonlinearity = make_nonlinearity(self.iteration.amplitude, input.p)?;
        Ok(ScatterSetup {
            scenario,
            data,
            potential,
            nonlinearity,
            solver: self.solver_config(input.n),
            t_min: self.solver.t_min,
            t_max: self.solver.t_max,
            report_radius: self.report_radius(),
            tol: self.iteration.tol,
            max_iter: self.iteration.max_iter,
            tail_tolerance: self.iteration.tail_tolerance,
            fit_range: (self.fit.t_lo, self.fit.t_hi),
        })
    }

    pub fn setup(&self) -> Result<ScatterSetup> {
        self.setup_for(self.scenario)
    }
}
