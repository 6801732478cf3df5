//! Weighted decay constant of the free wave from power-law data, on a base
//! window and on one with doubled radius and duration.
//!
//!     cargo run --release --example free_wave_decay -- 80

use radscatter::fields::{make_initial_data, Profile, WeightSpec};
use radscatter::radial_wave::{verify_free_decay, SolverConfig};
use radscatter::scenario::{validate_scenario, ScenarioInput};

fn main() -> radscatter::Result<()> {
    let s = validate_scenario(ScenarioInput::canonical())?;
    let e = s.exponents();
    let w = WeightSpec::from_exponents(&e);
    let data = make_initial_data(Profile::Power, s.eps(), s.k_reduced)?;
    let t: f64 = std::env::args().nth(1).map(|s| s.parse().expect("window half-length")).unwrap_or(80.0);
    let cfg = SolverConfig { cfl: SolverConfig::default_cfl(e.n), dr: 0.25, r_max: 6.0 * t };
    let check = verify_free_decay(e.n, &data, &w, &cfg, t, 2.0 * t)?;
    for (label, r) in [("base", check.base), ("enlarged", check.enlarged)] {
        println!("{label:>9}: C = {:.5} at r = {}, t = {}", r.c_hat, r.argmax_r, r.argmax_t);
    }
    println!("growth {:.2}%", 100.0 * check.growth);
    Ok(())
}
