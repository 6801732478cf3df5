use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quadrature::Quadrature;
use super::registry::{Domain, LemmaId, Point, Term};
use crate::error::{Error, Result};
use crate::scenario::Exponents;

/// Sampling box and quadrature ladder for a certification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyOptions {
    /// Half-width of the sampled box: `r, |t|, |y|, z, |w| <= radius`.
    pub radius: f64,
    /// Minimum number of sample points per lemma.
    pub points: usize,
    /// Relative quadrature tolerances, coarse to fine.
    pub levels: Vec<f64>,
    /// Also evaluate the points gained by doubling the box.
    pub doubling: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { radius: 50.0, points: 400, levels: vec![1e-4, 1e-6, 1e-8], doubling: true }
    }
}

/// Largest relative change of the empirical constant between the last two levels.
pub const REFINEMENT_LIMIT: f64 = 0.01;
/// Largest relative growth of the empirical constant when the box doubles.
pub const DOUBLING_LIMIT: f64 = 0.10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// One row of the per-lemma table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub point: Point,
    pub component: String,
    pub lhs: f64,
    pub envelope: f64,
    pub ratio: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma_id: LemmaId,
    pub domain: Domain,
    pub radius: f64,
    pub points: usize,
    /// Sup of `lhs / envelope` at the finest level.
    pub c_hat: f64,
    pub argmax: Point,
    pub argmax_component: String,
    /// Empirical constant at every quadrature level.
    pub level_c: Vec<f64>,
    pub refinement_change: f64,
    /// Empirical constant over the doubled box, if evaluated.
    pub doubled_c: Option<f64>,
    pub growth: Option<f64>,
    /// Growth from the doubled to the quadrupled box. Only computed when the
    /// doubling test fails; a value well below `growth` points to a constant
    /// that is still converging rather than drifting.
    pub further_growth: Option<f64>,
    /// Finest-level evaluations whose quadrature did not reach its tolerance.
    pub unconverged: usize,
    pub verdict: Verdict,
    pub reasons: Vec<String>,
    #[serde(skip)]
    pub rows: Vec<PointResult>,
}

fn squares(count: usize, scale: f64) -> impl Iterator<Item = f64> {
    (1..=count).map(move |i| scale * (i as f64 / count as f64).powi(2))
}

/// Sample points of `domain` within `radius`, quadratically graded towards
/// the origin. Two-dimensional grids share abscissae so that the light cone
/// `|t| = r` is hit exactly.
pub fn sample_points(domain: Domain, radius: f64, count: usize) -> Vec<Point> {
    let count = count.max(4);
    let side = (count as f64).sqrt().ceil() as usize;
    let half = side.div_ceil(2).max(1);
    match domain {
        Domain::Quadrant => {
            let rs: Vec<f64> = squares(side, radius).collect();
            let ts: Vec<f64> = squares(side.max(count.div_ceil(side)), radius).collect();
            rs.iter().flat_map(|&r| ts.iter().map(move |&t| Point::new(r, t))).collect()
        }
        Domain::HalfPlane => {
            let rs: Vec<f64> = squares(side, radius).collect();
            let per = count.div_ceil(side).div_ceil(2).max(half);
            let pos: Vec<f64> = squares(per, radius).collect();
            let ts: Vec<f64> = pos.iter().rev().map(|t| -t).chain(pos.iter().copied()).collect();
            rs.iter().flat_map(|&r| ts.iter().map(move |&t| Point::new(r, t))).collect()
        }
        Domain::HalfLine => squares(count, radius).map(Point::line).collect(),
        Domain::NegHalfLine => (0..count)
            .map(|i| Point::line(-radius * (i as f64 / (count - 1) as f64).powi(2)))
            .collect(),
        Domain::Line => {
            let pos: Vec<f64> = squares(count.div_ceil(2), radius).collect();
            pos.iter()
                .rev()
                .map(|y| -y)
                .chain(std::iter::once(0.0))
                .chain(pos.iter().copied())
                .map(Point::line)
                .collect()
        }
        Domain::Wedge => {
            let ns = count.div_ceil(side).max(3);
            squares(side, radius)
                .flat_map(|z| (0..ns).map(move |j| Point::new(z, z * (-1.0 + 2.0 * j as f64 / (ns - 1) as f64))))
                .collect()
        }
    }
}

fn evaluate_all(id: LemmaId, e: &Exponents, pts: &[Point], q: &Quadrature) -> Vec<PointResult> {
    let per_point: Vec<Vec<Term>> = pts.par_iter().map(|&pt| id.evaluate(e, pt, q)).collect();
    pts.iter()
        .zip(per_point)
        .flat_map(|(&point, terms)| {
            terms.into_iter().map(move |t| PointResult {
                point,
                ratio: t.ratio(),
                component: t.component,
                lhs: t.lhs,
                envelope: t.envelope,
                converged: t.converged,
            })
        })
        .collect()
}

/// Worst row; NaN ratios count as infinite.
fn worst(rows: &[PointResult]) -> Option<&PointResult> {
    let key = |r: &PointResult| if r.ratio.is_nan() { f64::INFINITY } else { r.ratio };
    rows.iter().fold(None, |best: Option<&PointResult>, r| match best {
        Some(b) if key(b) >= key(r) => Some(b),
        _ => Some(r),
    })
}

fn sup(rows: &[PointResult]) -> f64 {
    worst(rows).map(|r| if r.ratio.is_nan() { f64::INFINITY } else { r.ratio }).unwrap_or(0.0)
}

/// Certify one inequality on the sampled box.
///
/// The statement checked is that `sup lhs / envelope` over the box is
/// finite, moves by less than [`REFINEMENT_LIMIT`] between the two finest
/// quadrature levels, and grows by less than [`DOUBLING_LIMIT`] when the box
/// doubles. Only the points of the doubled box outside the original one are
/// evaluated for the last test.
pub fn certify_lemma(id: LemmaId, e: &Exponents, opts: &CertifyOptions) -> Result<LemmaReport> {
    id.check_preconditions(e)?;
    if opts.levels.len() < 2 {
        return Err(Error::InvalidInput("certification needs at least two quadrature levels".into()));
    }
    if !(opts.radius > 0.0) {
        return Err(Error::InvalidInput(format!("box radius must be positive, got {}", opts.radius)));
    }
    let domain = id.spec().domain;
    let pts = sample_points(domain, opts.radius, opts.points);
    let mut level_c = Vec::with_capacity(opts.levels.len());
    let mut rows = Vec::new();
    for &tol in &opts.levels {
        rows = evaluate_all(id, e, &pts, &Quadrature::with_rel_tol(tol));
        level_c.push(sup(&rows));
    }
    let finest = Quadrature::with_rel_tol(*opts.levels.last().expect("two levels"));
    let c_hat = *level_c.last().expect("two levels");
    let prev = level_c[level_c.len() - 2];
    let refinement_change = if c_hat == prev { 0.0 } else { (c_hat - prev).abs() / c_hat.abs().max(prev.abs()) };

    let extension = |scale: f64| {
        let ext: Vec<Point> = sample_points(domain, 2.0 * scale, opts.points)
            .into_iter()
            .filter(|p| p.extent() > scale * (1.0 + 1e-12))
            .collect();
        sup(&evaluate_all(id, e, &ext, &finest))
    };
    let growth_of = |from: f64, to: f64| {
        if from > 0.0 {
            to / from - 1.0
        } else if to > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    };
    let (mut doubled_c, mut growth, mut further_growth) = (None, None, None);
    if opts.doubling {
        let c2 = c_hat.max(extension(opts.radius));
        let g = growth_of(c_hat, c2);
        if !(g < DOUBLING_LIMIT) {
            let c4 = c2.max(extension(2.0 * opts.radius));
            further_growth = Some(growth_of(c2, c4));
        }
        doubled_c = Some(c2);
        growth = Some(g);
    }

    let unconverged = rows.iter().filter(|r| !r.converged).count();
    let mut reasons = Vec::new();
    if !c_hat.is_finite() {
        reasons.push(format!("sup ratio is not finite ({c_hat})"));
    }
    if !(refinement_change < REFINEMENT_LIMIT) {
        reasons.push(format!("quadrature levels disagree by {:.3}%", 100.0 * refinement_change));
    }
    if let Some(g) = growth {
        if !(g < DOUBLING_LIMIT) {
            let mut msg = format!("constant grows by {:.2}% when the box doubles", 100.0 * g);
            if let Some(g2) = further_growth {
                msg += &format!(" ({:.2}% on the next doubling)", 100.0 * g2);
            }
            reasons.push(msg);
        }
    }
    if unconverged > 0 {
        reasons.push(format!("{unconverged} evaluations missed their quadrature tolerance"));
    }
    let top = worst(&rows).cloned();
    Ok(LemmaReport {
        lemma_id: id,
        domain,
        radius: opts.radius,
        points: pts.len(),
        c_hat,
        argmax: top.as_ref().map(|r| r.point).unwrap_or(Point::line(0.0)),
        argmax_component: top.map(|r| r.component).unwrap_or_default(),
        level_c,
        refinement_change,
        doubled_c,
        growth,
        further_growth,
        unconverged,
        verdict: if reasons.is_empty() { Verdict::Pass } else { Verdict::Fail },
        reasons,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_counts_meet_the_request() {
        for d in [
            Domain::Quadrant,
            Domain::HalfPlane,
            Domain::HalfLine,
            Domain::NegHalfLine,
            Domain::Line,
            Domain::Wedge,
        ] {
            let pts = sample_points(d, 50.0, 400);
            assert!(pts.len() >= 400, "{d:?}: {}", pts.len());
            assert!(pts.iter().all(|p| p.extent() <= 50.0 + 1e-12));
        }
    }

    #[test]
    fn half_plane_grid_hits_the_cone() {
        let pts = sample_points(Domain::HalfPlane, 50.0, 400);
        assert!(pts.iter().any(|p| p.x == p.y));
        assert!(pts.iter().any(|p| p.x == -p.y));
    }

    #[test]
    fn wedge_includes_its_edges() {
        let pts = sample_points(Domain::Wedge, 10.0, 400);
        assert!(pts.iter().any(|p| p.y == -p.x));
        assert!(pts.iter().any(|p| p.y == p.x));
    }
}
