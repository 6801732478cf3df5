//! Derived exponents and constraint checks for a scenario, plus a rejected one.
//!
//!     cargo run --example scenario_arithmetic -- 5 1.9 2.3 2.5

use radscatter::scenario::{strauss_exponent, theta_exact, validate_scenario, ScenarioInput};

fn main() {
    let args: Vec<f64> = std::env::args().skip(1).map(|s| s.parse().expect("numeric argument")).collect();
    let mut input = ScenarioInput::canonical();
    if let [n, p, k, kappa, ..] = args[..] {
        input = ScenarioInput { n: n as u32, p, k, kappa, ..input };
    }

    match validate_scenario(input) {
        Ok(s) => {
            println!("n = {}, p = {}, k = {}, kappa = {}", input.n, input.p, input.k, input.kappa);
            println!("a = {}, m = {}, strauss p_n = {:.6}", s.a, s.m, s.strauss);
            println!("nu = {:.6}, theta = {:.6}", s.nu, s.theta);
            if let Some(t) = theta_exact(input.n, input.p, input.k) {
                println!("theta (exact) = {t}");
            }
            if s.k_was_reduced {
                println!("k reduced to {}", s.k_reduced);
            }
            for c in s.checks() {
                println!("  {:<24} {}", c.constraint.name(), c.detail);
            }
        }
        Err(e) => println!("rejected: {e}"),
    }

    // At the Strauss exponent itself the scenario is refused.
    let at_strauss = ScenarioInput { p: strauss_exponent(input.n), ..input };
    if let Err(e) = validate_scenario(at_strauss) {
        println!("\np = p_n: {e}");
    }
}
