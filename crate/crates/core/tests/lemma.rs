//! Integral inequalities: quadrature validation against closed forms,
//! spot values, hypothesis gates and the Duhamel kernel bound.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use rand::{Rng, SeedableRng};
use statrs::function::beta::beta;

use radscatter::lemma::integrals::{self as ig, Profile};
use radscatter::lemma::quadrature::Quadrature;
use radscatter::lemma::{
    certify_lemma, check_kernel_bound, hsrc_consistency, spot_checks, CertifyOptions, Derivative, LemmaId, Point,
    SourceBump,
};
use radscatter::scenario::{validate_scenario, Exponents, ScenarioInput};
use radscatter::Error;

fn canonical() -> Exponents {
    validate_scenario(ScenarioInput::canonical()).unwrap().exponents()
}

fn q() -> Quadrature {
    Quadrature::default()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn quadrature_validation_set() {
    let q = q();
    let cases: Vec<(&str, f64, f64)> = vec![
        ("int_0^1 y^-1/2", q.integrate_lower_power(|_| 1.0, 0.0, 0.0, 1.0, -0.5, &[]).value, 2.0),
        ("int_0^2 1", q.integrate_lower_power(|_| 1.0, 0.0, 0.0, 2.0, 0.0, &[]).value, 2.0),
        (
            "int_0^1 y^-1/2 (1+y)^-1",
            q.integrate_lower_power(|y| 1.0 / (1.0 + y), 0.0, 0.0, 1.0, -0.5, &[]).value,
            PI / 2.0,
        ),
        (
            "int_0^1 y^2 (1-y)^-1/2",
            q.integrate_upper_power(|y| y * y, 1.0, 0.0, 1.0, -0.5, &[]).value,
            16.0 / 15.0,
        ),
        ("int_0^inf (1+x)^-2", q.integrate_to_infinity(|x| (1.0 + x).powi(-2), 0.0, 2.0, &[]).value, 1.0),
        (
            "int_-inf^0 (1+|x|)^-3/2",
            q.integrate_from_neg_infinity(|x| (1.0 + x.abs()).powf(-1.5), 0.0, 1.5, &[]).value,
            2.0,
        ),
        ("int_0^pi sin", q.integrate(f64::sin, 0.0, PI, &[]).value, 2.0),
        (
            "int_0^1 y^-1/2 (1-y)^-1/2",
            q.integrate_lower_power(|y| (1.0 - y).powf(-0.5), 0.0, 0.0, 0.5, -0.5, &[]).value
                + q.integrate_upper_power(|y| y.powf(-0.5), 1.0, 0.5, 1.0, -0.5, &[]).value,
            PI,
        ),
        (
            "int_0^inf x^-1/2 / (1+x)",
            q.integrate_lower_power(|x| 1.0 / (1.0 + x), 0.0, 0.0, 1.0, -0.5, &[]).value
                + q.integrate_to_infinity(|x| x.powf(-0.5) / (1.0 + x), 1.0, 1.5, &[]).value,
            PI,
        ),
        ("int_-1^1 |x|", q.integrate(f64::abs, -1.0, 1.0, &[0.0]).value, 1.0),
    ];
    assert_eq!(cases.len(), 10);
    for (name, got, want) in cases {
        assert!(rel(got, want) < 1e-6, "{name}: {got} vs {want}");
    }
}

#[test]
fn registry_spot_values() {
    for s in spot_checks(&canonical()) {
        assert!(s.error() < 1e-6, "{}: {} vs {}", s.name, s.value, s.expected);
    }
}

#[test]
fn spot_value_ratios() {
    let e = canonical();
    let q = q();
    // A1 on t = 0 is an empty interval.
    for t in LemmaId::A1.evaluate(&e, Point::new(3.0, 0.0), &q) {
        assert_eq!(t.lhs, 0.0);
        assert_eq!(t.ratio(), 0.0);
    }
    // B1 at w = 0 with a = 1, nu = 1/2: lhs 2 against envelope 1.
    let b = ig::b1(&q, 1.0, 0.5, 0.0);
    assert!(b.converged);
    assert_relative_eq!(b.value, 2.0, max_relative = 1e-6);
}

#[test]
fn a1_matches_antiderivative_for_unit_a() {
    let q = q();
    let nu = 0.3;
    for (r, t) in [(0.5f64, 0.2f64), (1.0, 1.0), (3.0, 7.0), (40.0, 12.0), (2.0, 45.0)] {
        let lo: f64 = (t - r).abs();
        let want = ((1.0 + lo).powf(-nu) - (1.0 + t + r).powf(-nu)) / nu;
        let got = ig::a1(&q, 1.0, nu, r, t).value;
        assert!(rel(got, want) < 1e-6, "({r}, {t}): {got} vs {want}");
    }
}

#[test]
fn a2_matches_antiderivative_and_sign_symmetry() {
    let q = q();
    for b in [0.0f64, 0.3, 0.57, -0.4] {
        for z in [0.1f64, 2.0, 17.0, 50.0] {
            let want = ((1.0 + z).powf(1.0 - b) - 1.0) / (1.0 - b);
            let plus = ig::a2(&q, 1.0, b, z, true).value;
            let minus = ig::a2(&q, 1.0, b, z, false).value;
            assert!(rel(plus, want) < 1e-6 && rel(minus, want) < 1e-6, "b={b} z={z}");
        }
    }
    // General a: the two signs give z^a/a and ((2z)^a - z^a)/a.
    let (a, z) = (0.5f64, 3.0f64);
    assert_relative_eq!(ig::a2(&q, a, 0.0, z, false).value, z.powf(a) / a, max_relative = 1e-6);
    assert_relative_eq!(
        ig::a2(&q, a, 0.0, z, true).value,
        ((2.0 * z).powf(a) - z.powf(a)) / a,
        max_relative = 1e-6
    );
}

#[test]
fn b1_matches_antiderivative() {
    let q = q();
    for nu in [0.2, 0.3, 0.5] {
        for w in [0.0f64, -0.5, -4.0, -49.0] {
            let want = (1.0 + w.abs()).powf(-nu) / nu;
            assert!(rel(ig::b1(&q, 1.0, nu, w).value, want) < 1e-6, "nu={nu} w={w}");
        }
    }
}

#[test]
fn tails_with_zero_shift_match_closed_forms() {
    let e = canonical();
    let q = q();
    for z in [0.0f64, 1.0, 10.0, 50.0] {
        let want = (1.0 + z).powf(2.0 - e.kappa - e.a) / (e.kappa + e.a - 2.0);
        assert!(rel(ig::i_small(&q, &e, z, 0.0).value, want) < 1e-6, "I at z={z}");
    }
    for b in [e.a * (e.p - 1.0), e.nu * e.p] {
        let want = 1.0 / (e.kappa + b - 2.0);
        assert!(rel(ig::a3(&q, &e, b, 0.0).value, want) < 1e-6, "A3 with b={b}");
    }
}

#[test]
fn j_is_finite_on_the_wedge_edge() {
    let e = canonical();
    let q = q();
    for z in [0.5f64, 5.0, 50.0] {
        for y in [-z, z] {
            let j = ig::j_small(&q, &e, z, y);
            assert!(j.converged && j.value.is_finite() && j.value > 0.0, "z={z} y={y}");
            let env = (1.0 + z).powf(e.nu * e.p - e.nu - e.a);
            assert!(j.value / env < 10.0, "z={z} y={y}: ratio {}", j.value / env);
        }
    }
}

/// The nonlinear small-region integral reduces to a Beta function times
/// an elementary integral in `lambda_-`.
fn beta_oracle(e: &Exponents, d: f64) -> f64 {
    let s = 2.0 - e.m * e.p + e.m;
    let bb = beta(2.0 - e.m * e.p + 2.0 * e.m, e.a);
    let lo = d.max(0.0);
    let hi = d + 2.0 * d.abs() + 1.0;
    bb * (hi.powf(s) - lo.powf(s)) / s
}

#[test]
fn small_region_integral_matches_beta_oracle() {
    let q = q();
    let odd = canonical();
    let even = Exponents { n: 4, a: 0.5, m: 1.0, p: 2.2, k: 2.0, kappa: 2.5, nu: 0.5, theta: 0.0 };
    for e in [odd, even] {
        for d in [-20.0, -3.0, -0.5, 0.0, 0.7, 5.0, 40.0] {
            let got = ig::i2_small(&q, &e, Profile::Nonlinear, d);
            let want = beta_oracle(&e, d);
            assert!(got.converged, "a={} d={d}", e.a);
            assert!(rel(got.value, want) < 1e-6, "a={} d={d}: {} vs {want}", e.a, got.value);
        }
    }
}

#[test]
fn source_energy_profile_at_origin_is_a_beta_integral() {
    let e = canonical();
    let e0 = 2.0 * e.a + 2.0 * e.m + 2.0 * e.p * (1.0 - e.m);
    let total = 2.0 * e.p * (1.0 + e.a + e.nu);
    let want = beta(e0 + 1.0, total - e0 - 1.0);
    assert_relative_eq!(ig::h_tilde(&q(), &e, 0.0).value, want, max_relative = 1e-6);
}

#[test]
fn source_energy_exponents_dominate_the_target() {
    let h = hsrc_consistency(&canonical());
    assert!(h.holds, "{h:?}");
    assert_relative_eq!(h.target, 2.6, epsilon = 1e-12);
}

#[test]
fn second_order_boundary_lemma_needs_m_at_least_one() {
    let mut e = canonical();
    e.m = 0.0;
    let err = LemmaId::I2J2.check_preconditions(&e).unwrap_err();
    assert!(matches!(err, Error::Precondition { .. }), "{err}");
    assert_eq!(err.exit_code(), 2);
    let opts = CertifyOptions { points: 16, doubling: false, ..Default::default() };
    assert!(certify_lemma(LemmaId::I2J2, &e, &opts).is_err());
    // The canonical scenario satisfies it.
    assert!(LemmaId::I2J2.check_preconditions(&canonical()).is_ok());
}

#[test]
fn unknown_lemma_ids_are_rejected() {
    assert!("Z9".parse::<LemmaId>().is_err());
    assert_eq!("i2_j2".parse::<LemmaId>().unwrap(), LemmaId::I2J2);
}

#[test]
fn elementary_lemmas_certify_on_the_default_box() {
    let e = canonical();
    for id in [LemmaId::A1, LemmaId::A2, LemmaId::B1, LemmaId::HSRC] {
        let rep = certify_lemma(id, &e, &CertifyOptions::default()).unwrap();
        assert!(rep.points >= 400);
        assert!(rep.c_hat.is_finite() && rep.c_hat > 0.0, "{id}");
        assert!(rep.reasons.is_empty(), "{id}: {:?}", rep.reasons);
    }
}

fn kernel_ratio_max(n: u32, samples: &[(f64, f64, Derivative)]) -> f64 {
    check_kernel_bound(n, &SourceBump::standard(), samples, 1.0 / 64.0)
        .unwrap()
        .iter()
        .map(|s| s.ratio)
        .fold(0.0, f64::max)
}

#[test]
fn kernel_bound_holds_with_margin_at_reference_point() {
    let out = check_kernel_bound(5, &SourceBump::standard(), &[(1.0, 2.0, Derivative::Value)], 1.0 / 64.0).unwrap();
    let s = out[0];
    assert!(s.lhs > 0.0 && s.rhs > 0.0);
    assert!(s.ratio < 0.9, "{s:?}");
}

#[test]
fn kernel_bound_holds_at_random_points() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let mut samples = Vec::new();
    for _ in 0..20 {
        let r = rng.gen_range(0.3..6.0);
        let t = rng.gen_range(0.2..6.0);
        samples.push((r, t, Derivative::Value));
        samples.push((r, t, if rng.gen_bool(0.5) { Derivative::Radial } else { Derivative::Time }));
    }
    for n in [4, 5] {
        let worst = kernel_ratio_max(n, &samples);
        assert!(worst <= 1.0, "n={n}: worst ratio {worst}");
    }
}

#[test]
fn zero_source_gives_zero_kernel_values() {
    let g = SourceBump { amp: 0.0, ..SourceBump::standard() };
    let out = check_kernel_bound(5, &g, &[(1.0, 2.0, Derivative::Value), (2.0, 1.0, Derivative::Radial)], 1.0 / 32.0)
        .unwrap();
    for s in out {
        assert_eq!(s.lhs, 0.0);
        assert_eq!(s.ratio, 0.0);
    }
}

/// Closed-form odd-dimensional kernel: for `n = 5` the forced solution is
/// `(1/(2 r^2)) int int lambda^2 P_1(mu) G dlambda dtau` with
/// `mu = (r^2 + lambda^2 - (t - tau)^2) / (2 r lambda)`.
#[test]
fn forced_evolution_matches_the_five_dimensional_kernel() {
    let g = SourceBump::standard();
    let q = Quadrature::with_rel_tol(1e-10);
    let (r, t) = (1.0, 2.0);
    let inner = |tau: f64| {
        let s = t - tau;
        let lo = (r - s).abs().max(1.0);
        let hi = (r + s).min(2.0);
        if hi <= lo {
            return 0.0;
        }
        q.integrate(
            |l| {
                let mu = (r * r + l * l - s * s) / (2.0 * r * l);
                l * l * mu * g.value(l, tau)
            },
            lo,
            hi,
            &[],
        )
        .value
    };
    let exact = q.integrate(inner, -1.0, 0.0, &[t - r - 1.0]).value / (2.0 * r * r);
    let out = check_kernel_bound(5, &g, &[(r, t, Derivative::Value)], 1.0 / 128.0).unwrap();
    let got = out[0];
    // Snapping to the mesh moves the point by at most dr/2.
    assert!((got.r - r).abs() <= 1.0 / 256.0 + 1e-12 && (got.t - t).abs() <= 1.0 / 256.0 + 1e-12);
    assert!(rel(got.lhs, exact.abs()) < 2e-2, "{} vs {exact}", got.lhs);
}
