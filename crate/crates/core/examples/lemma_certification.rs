//! Certify integral inequalities for the reference scenario.
//!
//!     cargo run --release --example lemma_certification -- A1 B1 HSRC

use radscatter::lemma::{certify_lemma, spot_checks, CertifyOptions, LemmaId};
use radscatter::scenario::{validate_scenario, ScenarioInput};

fn main() -> radscatter::Result<()> {
    let e = validate_scenario(ScenarioInput::canonical())?.exponents();
    let mut ids: Vec<LemmaId> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    if ids.is_empty() {
        ids = vec![LemmaId::A1, LemmaId::A2, LemmaId::B1];
    }
    let opts = CertifyOptions::default();
    println!("{:<6} {:>10} {:>11} {:>8}  verdict", "lemma", "C", "refinement", "growth");
    for id in ids {
        let r = certify_lemma(id, &e, &opts)?;
        let growth = r.growth.map(|g| format!("{:.2}%", 100.0 * g)).unwrap_or_else(|| "-".into());
        println!("{:<6} {:>10.4} {:>11.2e} {:>8}  {:?}", id.to_string(), r.c_hat, r.refinement_change, growth, r.verdict);
        for reason in &r.reasons {
            println!("       {reason}");
        }
    }
    println!();
    for s in spot_checks(&e) {
        println!("{:<26} {:.10} (expected {})", s.name, s.value, s.expected);
    }
    Ok(())
}
