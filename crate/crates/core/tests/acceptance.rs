//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fail.

use std::path::Path;
use std::time::Instant;

use radscatter::fields::{make_initial_data, Profile, RadialField};
use radscatter::lemma::{certify_lemma, spot_checks, CertifyOptions, LemmaId, Verdict};
use radscatter::radial_wave::{RadialWaveSolver, SolverConfig};
use radscatter::scattering::{fit_decay, picard_solve, run_scattering, ScatterRun, ScatterSetup};
use radscatter::scenario::{
    parity_params, strauss_exponent, strauss_residual, theta_exact, validate_scenario, ScenarioInput,
};
use radscatter::cli::RunConfig;
use radscatter::Error;

/// Sub-checks of one criterion: description and outcome.
struct Checks(Vec<(String, bool)>);

impl Checks {
    fn new() -> Self {
        Checks(Vec::new())
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        self.0.push((what.into(), ok));
    }

    fn passed(&self) -> bool {
        self.0.iter().all(|(_, ok)| *ok)
    }
}

fn criterion(number: u32, title: &str, body: fn(&mut Checks)) -> bool {
    let start = Instant::now();
    let mut c = Checks::new();
    body(&mut c);
    let status = if c.passed() { "PASS" } else { "FAIL" };
    println!("{status} criterion {number}: {title} ({:.1} s)", start.elapsed().as_secs_f64());
    for (what, ok) in &c.0 {
        println!("    [{}] {what}", if *ok { "ok" } else { "FAILED" });
    }
    c.passed()
}

fn arithmetic(c: &mut Checks) {
    for n in 2..=12 {
        let r = strauss_residual(n);
        c.check(r < 1e-12, format!("n = {n}: Strauss quadratic residual {r:.1e} (p = {})", strauss_exponent(n)));
        let (a, m) = parity_params(n);
        c.check(a + m == (n as f64 - 1.0) / 2.0, format!("n = {n}: a + m = {} exactly", a + m));
    }
    let th = theta_exact(5, 1.9, 2.3).map(|t| t.to_string());
    c.check(th.as_deref() == Some("3/10"), format!("theta(5, 1.9, 2.3) = {th:?} in exact arithmetic"));
}

fn homogeneous(n: u32, dr: f64, r_max: f64, t: f64, eps: f64) -> (RadialWaveSolver, RadialField) {
    let s = RadialWaveSolver::new(n, &SolverConfig { cfl: SolverConfig::default_cfl(n), dr, r_max }).unwrap();
    let w = s.window(-t, t).unwrap();
    let data = make_initial_data(Profile::Bump, eps, 2.3).unwrap();
    let u = s.solve_homogeneous(&data, w, r_max);
    (s, u)
}

/// Four-point Lagrange interpolation in `r` on row `i`.
fn interpolate(f: &RadialField, i: usize, r: f64) -> f64 {
    let g = f.grid;
    let x = r / g.dr - g.offset;
    let j0 = (x.floor() as usize).saturating_sub(1).min(g.len - 4);
    let mut acc = 0.0;
    for a in 0..4 {
        let mut l = 1.0;
        for b in 0..4 {
            if a != b {
                l *= (x - (j0 + b) as f64) / ((j0 + a) as f64 - (j0 + b) as f64);
            }
        }
        acc += l * f.u[[i, j0 + a]];
    }
    acc
}

/// Final-time difference between `dr` and `dr / 2` on `r <= 4`.
fn refinement_gap(n: u32, dr: f64) -> f64 {
    let (_, a) = homogeneous(n, dr, 32.0, 2.0, 1.0);
    let (_, b) = homogeneous(n, dr / 2.0, 32.0, 2.0, 1.0);
    let (ia, ib) = (a.nt() - 1, b.nt() - 1);
    let mut worst = 0.0f64;
    for j in 0..a.grid.len {
        let r = a.grid.r(j);
        if r > 4.0 {
            break;
        }
        worst = worst.max((a.u[[ia, j]] - interpolate(&b, ib, r)).abs());
    }
    worst
}

fn solver(c: &mut Checks) {
    for n in [5, 4] {
        let (e1, e2) = (refinement_gap(n, 1.0 / 32.0), refinement_gap(n, 1.0 / 64.0));
        let order = (e1 / e2).log2();
        c.check((order - 2.0).abs() <= 0.2, format!("n = {n}: observed order {order:.3} (gaps {e1:.2e}, {e2:.2e})"));
    }
    for n in [5, 4] {
        let (s, u) = homogeneous(n, 1.0 / 64.0, 32.0, 10.0, 1.0);
        let drift = s.energy_drift(&u);
        c.check(drift < 1e-6, format!("n = {n}: relative energy drift {drift:.2e} at dr = 1/64"));
    }
    let eps = 1e-3;
    let (_, u) = homogeneous(5, 1.0 / 64.0, 32.0, 20.0, eps);
    let mut inside = 0.0f64;
    for i in 0..u.nt() {
        let t = u.t(i).abs();
        for j in 0..u.grid.len {
            // Data supported in r <= 1; two cells of stencil margin.
            if u.grid.r(j) < t - 1.0 - 2.0 * u.grid.dr {
                inside = inside.max(u.u[[i, j]].abs());
            }
        }
    }
    c.check(inside < 1e-8 * eps, format!("n = 5 strong Huygens: interior field {inside:.2e} (limit {:.0e})", 1e-8 * eps));
}

fn lemmas(c: &mut Checks) {
    let e = validate_scenario(ScenarioInput::canonical()).unwrap().exponents();
    let opts = CertifyOptions::default();
    for id in LemmaId::ALL {
        match certify_lemma(id, &e, &opts) {
            Ok(r) => {
                let growth = r.growth.map(|g| format!("{:.2}%", 100.0 * g)).unwrap_or_else(|| "-".into());
                let further =
                    r.further_growth.map(|g| format!(", next doubling {:.2}%", 100.0 * g)).unwrap_or_default();
                c.check(
                    r.verdict == Verdict::Pass && r.points >= 400 && r.radius >= 50.0,
                    format!(
                        "{id}: C = {:.4e}, refinement {:.2e}, growth {growth}{further}, {} points{}",
                        r.c_hat,
                        r.refinement_change,
                        r.points,
                        if r.reasons.is_empty() { String::new() } else { format!(" ({})", r.reasons.join("; ")) }
                    ),
                );
            }
            Err(err) => c.check(false, format!("{id}: {err}")),
        }
    }
    for s in spot_checks(&e) {
        c.check(s.error() <= 1e-6, format!("{} = {:.10} (expected {})", s.name, s.value, s.expected));
    }
}

fn canonical_config() -> RunConfig {
    RunConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/canonical.toml")).unwrap()
}

fn canonical_run(dr: f64) -> (ScatterSetup, ScatterRun) {
    let mut cfg = canonical_config();
    cfg.solver.dr = dr;
    let setup = cfg.setup().unwrap();
    let run = run_scattering(&setup).unwrap();
    (setup, run)
}

/// Relative change allowed between the two resolutions for the Duhamel constants.
const REFINEMENT_STABLE: f64 = 0.10;

fn fixed_point(c: &mut Checks, fine: &(ScatterSetup, ScatterRun)) {
    let (setup, run) = fine;
    let r = &run.report;
    c.check(r.iterations <= 8, format!("{} iterations", r.iterations));
    let rho = r.ratios.iter().copied().fold(0.0, f64::max);
    c.check(rho <= 0.5, format!("increment ratios {:?}, max {rho:.3e}", r.ratios));
    c.check(r.norm.value <= 1.0, format!("norm {:.4e}", r.norm.value));
    c.check(r.defect < 2.0 * setup.tol, format!("defect {:.2e} (tol {:.0e})", r.defect, setup.tol));
    let a = r.source_audit;
    c.check(
        a.nonlinear <= 1.05 && a.potential <= 1.05,
        format!("source audit ratios nonlinear {:.4}, potential {:.4}", a.nonlinear, a.potential),
    );
    let coarse = canonical_run(2.0 * setup.solver.dr).1.report.theorem;
    let t = r.theorem;
    for (name, f, g) in [
        ("nonlinear", t.c1_nonlinear, coarse.c1_nonlinear),
        ("potential", t.c1_potential, coarse.c1_potential),
    ] {
        let change = (f - g).abs() / f;
        c.check(
            f.is_finite() && f > 0.0 && change < REFINEMENT_STABLE,
            format!(
                "{name} Duhamel constant {f:.4e} at dr = {}, {g:.4e} at twice that ({:.2}% change)",
                setup.solver.dr,
                100.0 * change
            ),
        );
    }
}

fn rates(c: &mut Checks, fine: &(ScatterSetup, ScatterRun)) {
    let (setup, run) = fine;
    let r = &run.report;
    let theta = setup.scenario.theta;
    let (lo, hi) = setup.fit_range;
    c.check(lo == 2.0 && hi >= 40.0, format!("fit range [{lo}, {hi}]"));
    for (side, fit) in [("minus", r.fit_minus), ("plus", r.fit_plus)] {
        match fit {
            Some(f) => c.check(
                f.rate >= theta - 0.15,
                format!("theta_hat_{side} = {:.5} (theta = {theta}, floor {:.2})", f.rate, theta - 0.15),
            ),
            None => c.check(false, format!("no fit for the {side} side: {:?}", r.fit_error)),
        }
    }
    let t: Vec<f64> = (1..=480).map(|i| i as f64 * 0.25).collect();
    let e: Vec<f64> = t.iter().map(|&s| 3e-7 * (1.0 + s).powf(-0.3)).collect();
    let planted = fit_decay(&t, &e, 2.0, 40.0).unwrap().rate;
    c.check((planted - 0.3).abs() <= 0.005, format!("planted exponent 0.3 recovered as {planted:.6}"));
}

fn negative_controls(c: &mut Checks) {
    let base = ScenarioInput::canonical();
    let at_strauss = ScenarioInput { p: strauss_exponent(5), ..base };
    let r = validate_scenario(at_strauss);
    c.check(
        matches!(r, Err(Error::InvalidScenario(_))),
        format!("p = p_5 rejected: {}", r.as_ref().err().map(|e| e.to_string()).unwrap_or_default()),
    );
    let slow = ScenarioInput { k: 2.0, ..base };
    let r = validate_scenario(slow);
    c.check(
        matches!(r, Err(Error::InvalidScenario(_))),
        format!("k = 2 < 2/(p-1) rejected: {}", r.as_ref().err().map(|e| e.to_string()).unwrap_or_default()),
    );
    let mut e = validate_scenario(base).unwrap().exponents();
    e.m = 0.0;
    let r = certify_lemma(LemmaId::I2J2, &e, &CertifyOptions::default());
    c.check(
        matches!(r, Err(Error::Precondition { .. })),
        format!("I2_J2 with m = 0 refused: {}", r.as_ref().err().map(|e| e.to_string()).unwrap_or_default()),
    );
    let mut setup = ScatterSetup::standard(ScenarioInput { eps: 10.0, ..base }, 0.25, 30.0).unwrap();
    setup.fit_range = (2.0, 30.0);
    let solver = RadialWaveSolver::new(5, &setup.solver).unwrap();
    let r = picard_solve(&setup, &solver);
    c.check(
        matches!(r, Err(Error::NotContracting(_))),
        format!("eps = 10: {}", r.as_ref().err().map(|e| e.to_string()).unwrap_or_else(|| "converged".into())),
    );
}

fn main() {
    let mut ok = true;
    ok &= criterion(1, "parameter arithmetic", arithmetic);
    ok &= criterion(2, "homogeneous solver verification", solver);
    ok &= criterion(6, "negative controls", negative_controls);
    let start = Instant::now();
    let fine = canonical_run(canonical_config().solver.dr);
    println!("(canonical scattering run: {:.1} s)", start.elapsed().as_secs_f64());
    let mut c4 = Checks::new();
    fixed_point(&mut c4, &fine);
    let mut c5 = Checks::new();
    rates(&mut c5, &fine);
    for (number, title, c) in [(4, "fixed point", c4), (5, "scattering rate", c5)] {
        println!("{} criterion {number}: {title}", if c.passed() { "PASS" } else { "FAIL" });
        for (what, pass) in &c.0 {
            println!("    [{}] {what}", if *pass { "ok" } else { "FAILED" });
        }
        ok &= c.passed();
    }
    ok &= criterion(3, "lemma certification", lemmas);
    if !ok {
        std::process::exit(1);
    }
}
