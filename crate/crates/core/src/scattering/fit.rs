use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::bracket;

/// Least-squares power law `e ~ C <t>^-rate`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub rate: f64,
    pub stderr: f64,
    pub log_prefactor: f64,
    pub points: usize,
}

/// Fit `log e` against `log <t>` over `t_lo <= |t| <= t_hi`.
///
/// The selected `<t>` values must span at least a decade and every energy
/// in range must be positive.
pub fn fit_decay(times: &[f64], energies: &[f64], t_lo: f64, t_hi: f64) -> Result<DecayFit> {
    if times.len() != energies.len() {
        return Err(Error::InvalidInput("times and energies differ in length".into()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &e) in times.iter().zip(energies) {
        let at = t.abs();
        if at < t_lo || at > t_hi {
            continue;
        }
        if !(e > 0.0) || !e.is_finite() {
            return Err(Error::Numerical(format!("non-positive energy {e} at t = {t}")));
        }
        xs.push(bracket(t).ln());
        ys.push(e.ln());
    }
    let n = xs.len();
    if n < 5 {
        return Err(Error::InvalidInput(format!("only {n} samples in the fit range")));
    }
    let (xmin, xmax) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if xmax - xmin < std::f64::consts::LN_10 - 1e-12 {
        return Err(Error::InvalidInput(format!(
            "fit range spans only a factor {:.2} in <t>; need a decade",
            (xmax - xmin).exp()
        )));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = if n > 2 { (sse / (nf - 2.0) / sxx).sqrt() } else { f64::NAN };
    Ok(DecayFit { rate: -slope, stderr, log_prefactor: intercept, points: n })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_synthetic_rate() {
        let ts: Vec<f64> = (0..400).map(|i| 2.0 + i as f64 * 0.1).collect();
        let es: Vec<f64> = ts.iter().map(|&t| 7.0 * bracket(t).powf(-0.3)).collect();
        let fit = fit_decay(&ts, &es, 2.0, 40.0).unwrap();
        assert!((fit.rate - 0.3).abs() < 1e-12);
        assert!((fit.log_prefactor - 7f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn refuses_short_span() {
        let ts: Vec<f64> = (0..50).map(|i| 2.0 + i as f64 * 0.1).collect();
        let es: Vec<f64> = ts.iter().map(|&t| 1.0 / t).collect();
        assert!(fit_decay(&ts, &es, 2.0, 7.0).is_err());
    }

    #[test]
    fn refuses_zero_energy() {
        let ts: Vec<f64> = (0..100).map(|i| 2.0 + i as f64).collect();
        let es = vec![0.0; 100];
        assert!(fit_decay(&ts, &es, 2.0, 90.0).is_err());
    }
}
