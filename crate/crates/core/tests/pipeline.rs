//! Fixed point and scattering pipeline on short windows.

use std::sync::OnceLock;

use radscatter::fields::{energy_series, make_potential, Nonlinearity, Potential, PotentialShape};
use radscatter::radial_wave::RadialWaveSolver;
use radscatter::scattering::{
    audit_source_bounds, check_theorem_bounds, fit_decay, picard_solve, run_scattering, PicardOutcome, ScatterSetup,
};
use radscatter::scenario::ScenarioInput;
use radscatter::Error;

fn setup(input: ScenarioInput) -> ScatterSetup {
    let mut s = ScatterSetup::standard(input, 0.25, 30.0).unwrap();
    s.fit_range = (2.0, 30.0);
    s
}

fn canonical() -> &'static (ScatterSetup, RadialWaveSolver, PicardOutcome) {
    static RUN: OnceLock<(ScatterSetup, RadialWaveSolver, PicardOutcome)> = OnceLock::new();
    RUN.get_or_init(|| {
        let s = setup(ScenarioInput::canonical());
        let solver = RadialWaveSolver::new(5, &s.solver).unwrap();
        let out = picard_solve(&s, &solver).unwrap();
        (s, solver, out)
    })
}

#[test]
fn canonical_fixed_point_contracts() {
    let (s, _, out) = canonical();
    assert!(out.iterations <= 8);
    assert!(out.ratios.iter().all(|&r| r <= 0.5), "{:?}", out.ratios);
    assert!(out.norm.value <= 1.0);
    assert!(out.defect < 2.0 * s.tol, "defect {}", out.defect);
}

#[test]
fn source_audit_stays_within_slack() {
    let (s, _, out) = canonical();
    let a = audit_source_bounds(&out.u, &s.nonlinearity, &s.potential, &s.weight());
    assert!(a.nonlinear <= 1.05 && a.potential <= 1.05, "{a:?}");
}

#[test]
fn potential_bound_is_linear_in_v0() {
    let (s, solver, out) = canonical();
    let w = s.weight();
    let full = check_theorem_bounds(&out.u, &s.nonlinearity, &s.potential, solver, &w);
    let half_v = make_potential(0.5 * s.potential.v0, s.potential.kappa, PotentialShape::Power).unwrap();
    let half = check_theorem_bounds(&out.u, &s.nonlinearity, &half_v, solver, &w);
    assert!(full.c1_potential.is_finite() && full.c1_potential > 0.0);
    assert!((half.c1_potential / full.c1_potential - 1.0).abs() < 0.05);
}

#[test]
fn zero_field_gives_zero_audits() {
    let (s, solver, out) = canonical();
    let mut zero = out.u.clone();
    zero.u.fill(0.0);
    zero.du_dr.fill(0.0);
    let w = s.weight();
    let a = audit_source_bounds(&zero, &s.nonlinearity, &s.potential, &w);
    assert_eq!((a.nonlinear, a.potential), (0.0, 0.0));
    let t = check_theorem_bounds(&zero, &s.nonlinearity, &s.potential, solver, &w);
    assert_eq!((t.c1_nonlinear, t.c1_potential), (0.0, 0.0));
    let no_v = audit_source_bounds(&out.u, &s.nonlinearity, &Potential::zero(), &w);
    assert_eq!(no_v.potential, 0.0);
}

#[test]
fn large_data_is_not_contracting() {
    let mut input = ScenarioInput::canonical();
    input.eps = 10.0;
    let s = setup(input);
    let solver = RadialWaveSolver::new(5, &s.solver).unwrap();
    let err = picard_solve(&s, &solver).unwrap_err();
    assert!(matches!(err, Error::NotContracting(_)), "{err}");
    assert!(err.to_string().contains("smallness violated"));
}

#[test]
fn free_case_is_flagged() {
    let mut input = ScenarioInput::canonical();
    input.v0 = 0.0;
    let mut s = setup(input);
    s.nonlinearity = Nonlinearity::none();
    s.potential = Potential::zero();
    let run = run_scattering(&s).unwrap();
    assert!(run.report.free_case);
    assert!(run.report.fit_minus.is_none() && run.report.fit_plus.is_none());
    let worst = run.series.e_minus.iter().chain(&run.series.e_plus).fold(0.0f64, |m, x| m.max(x.abs()));
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn zero_data_gives_zero_solution() {
    let mut input = ScenarioInput::canonical();
    input.eps = 0.0;
    let s = setup(input);
    let solver = RadialWaveSolver::new(5, &s.solver).unwrap();
    let out = picard_solve(&s, &solver).unwrap();
    assert_eq!(out.u.max_abs(), 0.0);
    assert_eq!(out.norm.value, 0.0);
}

#[test]
fn short_window_rates_are_positive() {
    let run = run_scattering(&setup(ScenarioInput::canonical())).unwrap();
    let (m, p) = (run.report.fit_minus.unwrap(), run.report.fit_plus.unwrap());
    assert!(m.rate > 0.0 && p.rate > 0.0, "{m:?} {p:?}");
}

#[test]
fn fixed_point_residual_is_second_order() {
    let res = |dr: f64| {
        let mut s = ScatterSetup::standard(ScenarioInput::canonical(), dr, 30.0).unwrap();
        s.fit_range = (2.0, 30.0);
        run_scattering(&s).unwrap().report.residual
    };
    let (coarse, fine) = (res(0.25), res(0.125));
    let order = (coarse / fine).log2();
    assert!((order - 2.0).abs() < 0.3, "residuals {coarse:e} {fine:e}, order {order}");
}

#[test]
fn future_free_wave_captures_the_solution_at_the_end() {
    let run = run_scattering(&setup(ScenarioInput::canonical())).unwrap();
    let initial = energy_series(&run.free_minus);
    let zero = run.series.t.iter().position(|&t| t.abs() < 1e-12).unwrap();
    let end = *run.series.e_plus.last().unwrap();
    assert!(end < 1e-2 * initial[zero], "{end:e} vs {:e}", initial[zero]);
}

#[test]
fn flat_series_has_zero_rate() {
    let t: Vec<f64> = (1..=200).map(|i| i as f64 * 0.25).collect();
    let fit = fit_decay(&t, &vec![7.0; t.len()], 2.0, 40.0).unwrap();
    assert!(fit.rate.abs() < 1e-12);
}
