use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::config::RunConfig;
use super::manifest::{latest_manifest, num, opt, write_manifest, Artifact, CsvOut, Manifest, ScenarioEcho};
use crate::error::{Error, Result};
use crate::fields::RadialField;
use crate::lemma::{certify_lemma, LemmaId, LemmaReport, Verdict};
use crate::radial_wave::{residual, RadialWaveSolver};
use crate::scattering::{picard_solve, run_scattering, DecaySeries, ScatterReport};
use crate::scenario::{validate_scenario, Exponents, ScenarioInput};

/// What a finished command leaves behind.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub manifest: Manifest,
    pub manifest_path: std::path::PathBuf,
}

fn finish(dir: &Path, mut m: Manifest, exit_code: i32) -> Result<Outcome> {
    m.exit_code = exit_code;
    let manifest_path = write_manifest(dir, &m)?;
    Ok(Outcome { exit_code, manifest: m, manifest_path })
}

fn snapshots(u: &RadialField, dir: &Path, every: usize, stride: usize) -> Result<Artifact> {
    let mut out = CsvOut::new(dir, "snapshots.csv", &["t", "r", "u", "du_dr"])?;
    let jmax = u.report_len();
    let last = u.nt().saturating_sub(1);
    for i in (0..u.nt()).filter(|i| i % every == 0 || *i == last) {
        let t = num(u.t(i));
        for j in (0..jmax).step_by(stride) {
            out.row([t.clone(), num(u.grid.r(j)), num(u.u[[i, j]]), num(u.du_dr[[i, j]])])?;
        }
    }
    out.finish()
}

fn decay_csv(s: &DecaySeries, dir: &Path) -> Result<Artifact> {
    let mut out = CsvOut::new(dir, "decay.csv", &["t", "e_minus", "e_plus"])?;
    for i in 0..s.t.len() {
        out.row([num(s.t[i]), num(s.e_minus[i]), num(s.e_plus[i])])?;
    }
    out.finish()
}

/// Nonlinear solve on the configured window: snapshots, norm, residual.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<Outcome> {
    let dir = Path::new(&cfg.output);
    let setup = cfg.setup()?;
    let solver = RadialWaveSolver::new(setup.scenario.n(), &setup.solver)?;
    let out = picard_solve(&setup, &solver)?;
    let res = residual(&out.u, &setup.nonlinearity, &setup.potential, 0.5);
    let dr = setup.solver.dr;
    let mut m = Manifest::new("simulate", cfg);
    m.scenario = Some(ScenarioEcho::from(&setup.scenario));
    m.artifacts.push(snapshots(&out.u, dir, cfg.solver.snapshot_every, cfg.solver.snapshot_stride)?);
    m.results = json!({
        "iterations": out.iterations,
        "increments": out.increments,
        "ratios": out.ratios,
        "norm": out.norm,
        "free_norm": out.free_norm,
        "defect": out.defect,
        "tail": out.tail,
        "dt": solver.dt,
        "residual": res,
        "residual_over_dr2": res / (dr * dr),
        "max_abs": out.u.max_abs(),
    });
    finish(dir, m, 0)
}

#[derive(Serialize)]
struct ScatterResults<'a> {
    report: &'a ScatterReport,
    /// Largest observed increment ratio.
    rho: f64,
    theta_hat_minus: Option<f64>,
    theta_hat_plus: Option<f64>,
    /// Set when there is no source at all and no rate to measure.
    flag: Option<&'static str>,
}

fn rho(r: &ScatterReport) -> f64 {
    r.ratios.iter().copied().fold(0.0, f64::max)
}

/// Fixed point, both asymptotic free waves and the decay fits.
pub fn cmd_scatter(cfg: &RunConfig) -> Result<Outcome> {
    let dir = Path::new(&cfg.output);
    let setup = cfg.setup()?;
    let run = run_scattering(&setup)?;
    let mut m = Manifest::new("scatter", cfg);
    m.scenario = Some(ScenarioEcho::from(&setup.scenario));
    m.artifacts.push(decay_csv(&run.series, dir)?);
    let r = &run.report;
    m.results = serde_json::to_value(ScatterResults {
        report: r,
        rho: rho(r),
        theta_hat_minus: r.fit_minus.map(|f| f.rate),
        theta_hat_plus: r.fit_plus.map(|f| f.rate),
        flag: r.free_case.then_some("free case"),
    })?;
    finish(dir, m, 0)
}

fn lemma_csv(rep: &LemmaReport, dir: &Path) -> Result<Artifact> {
    let names = rep.domain.coordinate_names();
    let mut header: Vec<&str> = names.to_vec();
    header.extend(["component", "lhs", "envelope", "ratio", "converged"]);
    let mut out = CsvOut::new(dir, &format!("lemma_{}.csv", rep.lemma_id), &header)?;
    for row in &rep.rows {
        let mut rec = vec![num(row.point.x)];
        if names.len() == 2 {
            rec.push(num(row.point.y));
        }
        rec.extend([
            row.component.clone(),
            num(row.lhs),
            num(row.envelope),
            num(row.ratio),
            row.converged.to_string(),
        ]);
        out.row(rec)?;
    }
    out.finish()
}

fn argmax_label(rep: &LemmaReport) -> String {
    let names = rep.domain.coordinate_names();
    let vals = [rep.argmax.x, rep.argmax.y];
    names.iter().zip(vals).map(|(n, v)| format!("{n}={v}")).collect::<Vec<_>>().join(";")
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
    }
}

/// Refuse up front if any requested lemma has a failing hypothesis.
fn certify_all(ids: &[LemmaId], e: &Exponents, cfg: &RunConfig) -> Result<Vec<LemmaReport>> {
    for id in ids {
        id.check_preconditions(e)?;
    }
    let opts = cfg.verify.options();
    ids.iter().map(|&id| certify_lemma(id, e, &opts)).collect()
}

/// Certify the configured registry lemmas; exit 4 if any verdict fails.
pub fn cmd_certify(cfg: &RunConfig) -> Result<Outcome> {
    let dir = Path::new(&cfg.output);
    let scenario = validate_scenario(cfg.scenario)?;
    let ids = cfg.verify.lemma_ids()?;
    let reports = certify_all(&ids, &scenario.exponents(), cfg)?;
    let mut m = Manifest::new("certify", cfg);
    m.scenario = Some(ScenarioEcho::from(&scenario));
    let mut summary = CsvOut::new(
        dir,
        "summary.csv",
        &["lemma_id", "c_hat", "argmax", "component", "refinement_change", "growth", "verdict"],
    )?;
    for rep in &reports {
        m.artifacts.push(lemma_csv(rep, dir)?);
        summary.row([
            rep.lemma_id.to_string(),
            num(rep.c_hat),
            argmax_label(rep),
            rep.argmax_component.clone(),
            num(rep.refinement_change),
            opt(rep.growth),
            verdict_str(rep.verdict).to_string(),
        ])?;
    }
    m.artifacts.push(summary.finish()?);
    let failed: Vec<String> =
        reports.iter().filter(|r| r.verdict == Verdict::Fail).map(|r| r.lemma_id.to_string()).collect();
    m.results = json!({ "reports": reports, "failed": failed });
    finish(dir, m, if failed.is_empty() { 0 } else { 4 })
}

/// One line of the sweep table.
#[derive(Clone, Debug, Default, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub input: Option<ScenarioInput>,
    pub valid: bool,
    pub error: Option<String>,
    pub theta: Option<f64>,
    pub nu: Option<f64>,
    pub iterations: Option<usize>,
    pub rho: Option<f64>,
    pub norm: Option<f64>,
    pub theta_hat_minus: Option<f64>,
    pub theta_hat_plus: Option<f64>,
    pub c_hat: Vec<(String, Option<f64>)>,
}

fn sweep_row(cfg: &RunConfig, index: usize, input: ScenarioInput, ids: &[LemmaId], dir: &Path) -> SweepRow {
    let mut row = SweepRow { index, input: Some(input), ..Default::default() };
    let scenario = match validate_scenario(input) {
        Ok(s) => s,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.valid = true;
    row.theta = Some(scenario.theta);
    row.nu = Some(scenario.nu);
    let sweep = cfg.sweep.clone().unwrap_or_default();
    let mut errors = Vec::new();
    if sweep.scatter {
        match cfg.setup_for(input).and_then(|s| run_scattering(&s)) {
            Ok(run) => {
                let r = &run.report;
                row.iterations = Some(r.iterations);
                row.rho = Some(rho(r));
                row.norm = Some(r.norm.value);
                row.theta_hat_minus = r.fit_minus.map(|f| f.rate);
                row.theta_hat_plus = r.fit_plus.map(|f| f.rate);
                if let Err(e) = decay_csv(&run.series, &dir.join(format!("row_{index:04}"))) {
                    errors.push(e.to_string());
                }
            }
            Err(e) => errors.push(e.to_string()),
        }
    }
    if sweep.certify {
        let e = scenario.exponents();
        let opts = cfg.verify.options();
        for &id in ids {
            let c = certify_lemma(id, &e, &opts).map(|r| r.c_hat);
            if let Err(err) = &c {
                errors.push(format!("{id}: {err}"));
            }
            row.c_hat.push((id.to_string(), c.ok()));
        }
    }
    if !errors.is_empty() {
        row.error = Some(errors.join("; "));
    }
    row
}

/// Rows run on the worker pool; the table is assembled afterwards in row order.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<Outcome> {
    let dir = Path::new(&cfg.output);
    let sweep = cfg.sweep.clone().ok_or_else(|| Error::Config("sweep needs a [sweep] block".into()))?;
    let inputs = sweep.rows(&cfg.scenario);
    let ids = if sweep.certify { cfg.verify.lemma_ids()? } else { Vec::new() };
    let rows: Vec<SweepRow> =
        inputs.par_iter().enumerate().map(|(i, &input)| sweep_row(cfg, i, input, &ids, dir)).collect();

    let mut header: Vec<String> = [
        "index", "n", "p", "k", "kappa", "eps", "v0", "valid", "theta", "nu", "iterations", "rho", "norm",
        "theta_hat_minus", "theta_hat_plus",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend(ids.iter().map(|id| format!("c_hat_{id}")));
    header.push("error".into());
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut table = CsvOut::new(dir, "sweep.csv", &header_refs)?;
    for r in &rows {
        let s = r.input.expect("sweep rows carry their input");
        let mut rec = vec![
            r.index.to_string(),
            s.n.to_string(),
            num(s.p),
            num(s.k),
            num(s.kappa),
            num(s.eps),
            num(s.v0),
            r.valid.to_string(),
            opt(r.theta),
            opt(r.nu),
            r.iterations.map(|i| i.to_string()).unwrap_or_default(),
            opt(r.rho),
            opt(r.norm),
            opt(r.theta_hat_minus),
            opt(r.theta_hat_plus),
        ];
        rec.extend(r.c_hat.iter().map(|(_, c)| opt(*c)));
        // Rows that failed before certification still need the columns.
        rec.extend((r.c_hat.len()..ids.len()).map(|_| String::new()));
        rec.push(r.error.clone().unwrap_or_default());
        table.row(rec)?;
    }
    let mut m = Manifest::new("sweep", cfg);
    m.artifacts.push(table.finish()?);
    let invalid = rows.iter().filter(|r| !r.valid).count();
    m.results = json!({ "rows": rows.len(), "invalid": invalid, "table": rows });
    finish(dir, m, 0)
}

/// Text summary of the most recent manifest in `dir`.
pub fn cmd_report(dir: &Path) -> Result<String> {
    let (path, m) = latest_manifest(dir)?
        .ok_or_else(|| Error::InvalidInput(format!("no manifest in {}", dir.display())))?;
    let mut s = String::new();
    let mut line = |x: String| {
        s.push_str(&x);
        s.push('\n');
    };
    line(format!("{} ({} {} {})", path.display(), m.tool, m.version, m.command));
    line(format!("config sha256 {}", m.config_sha256));
    if let Some(sc) = &m.scenario {
        let i = sc.input;
        line(format!(
            "scenario n={} p={} k={} kappa={} eps={} v0={}",
            i.n, i.p, i.k, i.kappa, i.eps, i.v0
        ));
        line(format!(
            "  a={} m={} nu={} theta={} ({})",
            sc.a,
            sc.m,
            sc.nu,
            sc.theta,
            sc.theta_exact.as_deref().unwrap_or("-")
        ));
    }
    let r = &m.results;
    let get = |p: &str| r.pointer(p).filter(|v| !v.is_null()).map(|v| v.to_string()).unwrap_or_else(|| "-".into());
    match m.command.as_str() {
        "simulate" => {
            line(format!("iterations {}  norm {}  defect {}", get("/iterations"), get("/norm/value"), get("/defect")));
            line(format!("residual {}  residual/dr^2 {}", get("/residual"), get("/residual_over_dr2")));
        }
        "scatter" => {
            line(format!("iterations {}  rho {}  norm {}", get("/report/iterations"), get("/rho"), get("/report/norm/value")));
            line(format!(
                "theta {}  theta_hat- {}  theta_hat+ {}",
                get("/report/theta"),
                get("/theta_hat_minus"),
                get("/theta_hat_plus")
            ));
            if let Some(f) = r.get("flag").and_then(|f| f.as_str()) {
                line(format!("flag: {f}"));
            }
        }
        "certify" => {
            if let Some(reps) = r.get("reports").and_then(|v| v.as_array()) {
                line(format!("{:<8} {:>12} {:>9} verdict", "lemma", "C_hat", "growth"));
                for rep in reps {
                    let g = rep.get("growth").and_then(|g| g.as_f64());
                    line(format!(
                        "{:<8} {:>12.6} {:>9} {}",
                        rep["lemma_id"].as_str().unwrap_or("?"),
                        rep["c_hat"].as_f64().unwrap_or(f64::NAN),
                        g.map(|g| format!("{:.2}%", 100.0 * g)).unwrap_or_else(|| "-".into()),
                        rep["verdict"].as_str().unwrap_or("?"),
                    ));
                }
            }
        }
        "sweep" => {
            line(format!("rows {}  invalid {}", get("/rows"), get("/invalid")));
        }
        _ => {}
    }
    for a in &m.artifacts {
        line(format!("  {} ({} rows, sha256 {})", a.file, a.rows, &a.sha256[..12]));
    }
    line(format!("exit code {}", m.exit_code));
    Ok(s)
}
