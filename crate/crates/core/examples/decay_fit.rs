//! Recover a planted power-law rate from a noisy series.

use rand::{rngs::StdRng, Rng, SeedableRng};
use radscatter::scattering::fit_decay;

fn main() -> radscatter::Result<()> {
    let mut rng = StdRng::seed_from_u64(7);
    let t: Vec<f64> = (1..=400).map(|i| i as f64 * 0.25).collect();
    for noise in [0.0, 0.01, 0.05] {
        let e: Vec<f64> = t
            .iter()
            .map(|&s| 2e-6 * (1.0 + s).powf(-0.3) * (1.0 + noise * rng.gen_range(-1.0..1.0)))
            .collect();
        let f = fit_decay(&t, &e, 2.0, 40.0)?;
        println!("noise {noise:>4}: rate {:.5} +/- {:.1e} from {} points", f.rate, f.stderr, f.points);
    }
    // Less than a decade of <t> is refused.
    println!("{}", fit_decay(&t, &t, 2.0, 5.0).unwrap_err());
    Ok(())
}
