//! Grid probes that look for points where a nearest or farthest map is
//! multivalued.
//!
//! A probe evaluates a map at every point of a rectangular grid, counts the
//! points with a tie, and keeps a few witnesses. When the attainer switches
//! between two extreme points along a grid edge, the edge is bisected on the
//! sign of the distance difference, which pins a tie down to rounding level.
//! Grid evaluation runs on the rayon pool; results are gathered in grid
//! order so reports do not depend on the number of workers.

use rayon::prelude::*;
use serde::Serialize;

use crate::bregman::distance_unchecked;
use crate::centers;
use crate::error::{Error, Result};
use crate::legendre::{Kernel, LegendreFunction};
use crate::maps::{self, MapKind, MapOptions, MapResult, ATTAINER_SEPARATION};
use crate::sets::{extreme_points, CompactSet};
use crate::vector::Vector;

/// Maximum number of witnesses kept per report.
pub const MAX_WITNESSES: usize = 16;

/// Bisection steps along a grid edge; enough to reach rounding level.
const BISECTION_STEPS: usize = 120;

/// Points per axis `resolution[i]`, equally spaced on `[lo[i], hi[i]]`,
/// enumerated with the last coordinate varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub resolution: Vec<usize>,
}

impl GridSpec {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, resolution: Vec<usize>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() || lo.len() != resolution.len() {
            return Err(Error::Parameter(
                "grid bounds and resolution must have the same nonzero length".into(),
            ));
        }
        for i in 0..lo.len() {
            if !(lo[i].is_finite() && hi[i].is_finite() && lo[i] <= hi[i]) {
                return Err(Error::Parameter(format!(
                    "grid axis {i} has invalid bounds"
                )));
            }
            if resolution[i] == 0 {
                return Err(Error::Parameter(format!(
                    "grid axis {i} has zero resolution"
                )));
            }
        }
        Ok(Self { lo, hi, resolution })
    }

    /// The same `[lo, hi]` and resolution on each of `dim` axes.
    pub fn cube(lo: f64, hi: f64, resolution: usize, dim: usize) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim], vec![resolution; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn len(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn axis_value(&self, axis: usize, k: usize) -> f64 {
        let n = self.resolution[axis];
        if n == 1 {
            self.lo[axis]
        } else {
            self.lo[axis] + (self.hi[axis] - self.lo[axis]) * k as f64 / (n - 1) as f64
        }
    }

    fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            idx[axis] = flat % self.resolution[axis];
            flat /= self.resolution[axis];
        }
        idx
    }

    fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.resolution)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn point(&self, flat: usize) -> Vector {
        let idx = self.multi_index(flat);
        Vector::from_finite(
            idx.iter()
                .enumerate()
                .map(|(axis, &k)| self.axis_value(axis, k))
                .collect(),
        )
    }

    pub fn points(&self) -> Vec<Vector> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    /// Pairs of flat indices that are neighbours along one axis.
    fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for flat in 0..self.len() {
            let idx = self.multi_index(flat);
            for axis in 0..self.dim() {
                if idx[axis] + 1 < self.resolution[axis] {
                    let mut next = idx.clone();
                    next[axis] += 1;
                    out.push((flat, self.flat_index(&next)));
                }
            }
        }
        out
    }
}

/// A point where the map has at least two attainers, with the distance
/// from (or to) each attainer recomputed independently.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub point: Vector,
    pub attainers: Vec<Vector>,
    pub distances: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub map: &'static str,
    pub grid: GridSpec,
    pub tie_tol: f64,
    pub total: usize,
    pub single_valued: usize,
    pub tied: usize,
    pub witnesses: Vec<Witness>,
    pub evaluations: usize,
}

impl ProbeReport {
    pub fn tie_fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.tied as f64 / self.total as f64
        }
    }
}

/// Value and tie flag of the map at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub point: Vector,
    pub value: f64,
    pub tied: bool,
}

fn map_distance(kind: MapKind, f: &LegendreFunction, c: &Vector, z: &Vector) -> f64 {
    match kind {
        MapKind::LeftNearest | MapKind::LeftFarthest => distance_unchecked(f, c, z),
        MapKind::RightNearest | MapKind::RightFarthest => distance_unchecked(f, z, c),
    }
}

fn witness(kind: MapKind, f: &LegendreFunction, z: &Vector, r: &MapResult) -> Witness {
    Witness {
        point: z.clone(),
        attainers: r.attainers.clone(),
        distances: r
            .attainers
            .iter()
            .map(|c| map_distance(kind, f, c, z))
            .collect(),
    }
}

fn push_witness(list: &mut Vec<Witness>, w: Witness) {
    if list.len() < MAX_WITNESSES
        && !list
            .iter()
            .any(|o| o.point.dist_inf(&w.point) <= ATTAINER_SEPARATION)
    {
        list.push(w);
    }
}

/// Evaluates the map on every grid point.
pub fn scan_map(
    kind: MapKind,
    f: &LegendreFunction,
    set: &CompactSet,
    grid: &GridSpec,
    opts: &MapOptions,
) -> Result<(ProbeReport, Vec<GridRow>, Vec<MapResult>)> {
    set.check_for(f)?;
    if grid.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: grid.dim(),
        });
    }
    let points = grid.points();
    for p in &points {
        f.check_interior(p)?;
    }
    let results: Vec<MapResult> = points
        .par_iter()
        .map(|z| maps::evaluate(kind, f, set, z, opts))
        .collect::<Result<_>>()?;
    let mut report = ProbeReport {
        map: kind.name(),
        grid: grid.clone(),
        tie_tol: opts.tie_tol,
        total: points.len(),
        single_valued: 0,
        tied: 0,
        witnesses: Vec::new(),
        evaluations: points.len(),
    };
    let mut rows = Vec::with_capacity(points.len());
    for (z, r) in points.into_iter().zip(&results) {
        if r.is_tie() {
            report.tied += 1;
            push_witness(&mut report.witnesses, witness(kind, f, &z, r));
        } else {
            report.single_valued += 1;
        }
        rows.push(GridRow {
            point: z,
            value: r.value,
            tied: r.is_tie(),
        });
    }
    Ok((report, rows, results))
}

/// Grid scan followed by bisection along every grid edge on which the
/// attainer switches between two extreme points of the set.
pub fn probe_with_bisection(
    kind: MapKind,
    f: &LegendreFunction,
    set: &CompactSet,
    grid: &GridSpec,
    opts: &MapOptions,
) -> Result<ProbeReport> {
    let (mut report, _, results) = scan_map(kind, f, set, grid, opts)?;
    let ext = extreme_points(set).points;
    let is_extreme = |p: &Vector| ext.iter().any(|e| e.dist_inf(p) <= ATTAINER_SEPARATION);
    let maximize = kind.is_farthest();

    let switches: Vec<(usize, usize)> = grid
        .edges()
        .into_iter()
        .filter(|&(i, j)| {
            let (a, b) = (&results[i].attainers[0], &results[j].attainers[0]);
            a.dist_inf(b) > ATTAINER_SEPARATION && is_extreme(a) && is_extreme(b)
        })
        .collect();

    let found: Vec<(Option<(Vector, MapResult)>, usize)> = switches
        .par_iter()
        .map(|&(i, j)| {
            let (y0, y1) = (grid.point(i), grid.point(j));
            let (a, b) = (&results[i].attainers[0], &results[j].attainers[0]);
            // h < 0 where `a` wins (nearest) resp. h > 0 where `a` wins (farthest).
            let h = |t: f64| {
                let y = y0.lerp(&y1, t);
                map_distance(kind, f, a, &y) - map_distance(kind, f, b, &y)
            };
            let a_wins = |v: f64| if maximize { v >= 0.0 } else { v <= 0.0 };
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (lo + hi);
                if a_wins(h(mid)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let y = y0.lerp(&y1, 0.5 * (lo + hi));
            let evals = BISECTION_STEPS + 1;
            match f
                .check_interior(&y)
                .and_then(|_| maps::evaluate(kind, f, set, &y, opts))
            {
                Ok(r) if r.is_tie() => (Some((y, r)), evals),
                _ => (None, evals),
            }
        })
        .collect();
    for (hit, evals) in found {
        report.evaluations += evals;
        if let Some((y, r)) = hit {
            push_witness(&mut report.witnesses, witness(kind, f, &y, &r));
        }
    }
    Ok(report)
}

/// Looks for points with two or more left-nearest attainers.
pub fn chebyshev_probe(
    f: &LegendreFunction,
    set: &CompactSet,
    grid: &GridSpec,
    opts: &MapOptions,
) -> Result<ProbeReport> {
    probe_with_bisection(MapKind::LeftNearest, f, set, grid, opts)
}

/// Looks for points with two or more left-farthest attainers. The left
/// Chebyshev center of a set with at least two extreme points is always
/// such a point, so it is tried first.
pub fn klee_probe(
    f: &LegendreFunction,
    set: &CompactSet,
    grid: &GridSpec,
    opts: &MapOptions,
) -> Result<ProbeReport> {
    let mut report = probe_with_bisection(MapKind::LeftFarthest, f, set, grid, opts)?;
    if extreme_points(set).points.len() >= 2 {
        let c = centers::left_center(f, set)?.center;
        let r = maps::left_farthest_with(f, set, &c, opts)?;
        report.evaluations += 1;
        if r.is_tie() {
            let w = witness(MapKind::LeftFarthest, f, &c, &r);
            report
                .witnesses
                .retain(|o| o.point.dist_inf(&c) > ATTAINER_SEPARATION);
            report.witnesses.insert(0, w);
            report.witnesses.truncate(MAX_WITNESSES);
        }
    }
    Ok(report)
}

/// Outcome of the scan over the curve `λ ↦ (e^λ, e^{2λ})` under the
/// negative entropy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveReport {
    pub scan: ProbeReport,
    /// Grid points whose near-optimal curve samples split into clusters
    /// farther apart than `discretization_tol` along the curve.
    pub robust_ties: usize,
    /// Ten times the longest step between consecutive curve samples.
    pub discretization_tol: f64,
    /// Midpoint of the curve's endpoints, if the curve is not a single point.
    pub nonconvexity_witness: Option<Vector>,
    /// Euclidean distance from the witness to the sampled curve.
    pub witness_distance: Option<f64>,
}

/// Right-nearest scan of the curve `{(e^λ, e^{2λ}) : λ ∈ [0, lambda_max]}`,
/// sampled at `resolution` points, over a 2-D grid.
pub fn curious_set_probe(
    lambda_max: f64,
    resolution: usize,
    grid: &GridSpec,
    tie_tol: f64,
) -> Result<CurveReport> {
    if !(lambda_max >= 0.0 && lambda_max.is_finite()) {
        return Err(Error::Parameter(format!(
            "lambda_max must be finite and ≥ 0, got {lambda_max}"
        )));
    }
    if resolution == 0 {
        return Err(Error::Parameter("resolution must be positive".into()));
    }
    if grid.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: grid.dim(),
        });
    }
    let f = LegendreFunction::uniform(Kernel::NegativeEntropy, 2)?;
    let n = if lambda_max == 0.0 {
        1
    } else {
        resolution.max(2)
    };
    let curve: Vec<Vector> = (0..n)
        .map(|k| {
            let lam = if n == 1 {
                0.0
            } else {
                lambda_max * k as f64 / (n - 1) as f64
            };
            Vector::from_finite(vec![lam.exp(), (2.0 * lam).exp()])
        })
        .collect();
    let mut arc = vec![0.0; n];
    let mut max_step: f64 = 0.0;
    for k in 1..n {
        let s = curve[k].dist2(&curve[k - 1]);
        arc[k] = arc[k - 1] + s;
        max_step = max_step.max(s);
    }
    let discretization_tol = 10.0 * max_step;

    let points = grid.points();
    for p in &points {
        f.check_interior(p)?;
    }
    // (best value, indices within tie_tol, robust)
    let per_point: Vec<(f64, Vec<usize>, bool)> = points
        .par_iter()
        .map(|x| {
            let values: Vec<f64> = curve.iter().map(|c| distance_unchecked(&f, x, c)).collect();
            let best = values.iter().copied().fold(f64::INFINITY, f64::min);
            let near: Vec<usize> = (0..n).filter(|&k| values[k] - best <= tie_tol).collect();
            let robust = near
                .windows(2)
                .any(|w| arc[w[1]] - arc[w[0]] > discretization_tol);
            (best, near, robust)
        })
        .collect();

    let mut scan = ProbeReport {
        map: MapKind::RightNearest.name(),
        grid: grid.clone(),
        tie_tol,
        total: points.len(),
        single_valued: 0,
        tied: 0,
        witnesses: Vec::new(),
        evaluations: points.len() * n,
    };
    let mut robust_ties = 0;
    for (x, (_, near, robust)) in points.iter().zip(per_point) {
        if near.len() > 1 {
            scan.tied += 1;
            let attainers: Vec<Vector> = near.iter().map(|&k| curve[k].clone()).collect();
            let distances = attainers
                .iter()
                .map(|c| distance_unchecked(&f, x, c))
                .collect();
            push_witness(
                &mut scan.witnesses,
                Witness {
                    point: x.clone(),
                    attainers,
                    distances,
                },
            );
        } else {
            scan.single_valued += 1;
        }
        if robust {
            robust_ties += 1;
        }
    }

    let (nonconvexity_witness, witness_distance) = if n > 1 {
        let m = curve[0].lerp(&curve[n - 1], 0.5);
        let d = curve
            .iter()
            .map(|c| c.dist2(&m))
            .fold(f64::INFINITY, f64::min);
        (Some(m), Some(d))
    } else {
        (None, None)
    };
    Ok(CurveReport {
        scan,
        robust_ties,
        discretization_tol,
        nonconvexity_witness,
        witness_distance,
    })
}

/// Tie counts of all four maps on one grid at one tie tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleValuednessReport {
    pub tie_tol: f64,
    pub maps: Vec<ProbeReport>,
}

pub fn single_valuedness_scan(
    f: &LegendreFunction,
    set: &CompactSet,
    grid: &GridSpec,
    tie_tol: f64,
) -> Result<SingleValuednessReport> {
    let opts = MapOptions {
        tie_tol,
        ..Default::default()
    };
    let maps = MapKind::ALL
        .into_iter()
        .map(|kind| scan_map(kind, f, set, grid, &opts).map(|(r, _, _)| r))
        .collect::<Result<_>>()?;
    Ok(SingleValuednessReport { tie_tol, maps })
}

/// Runs [`single_valuedness_scan`] for each tolerance, in the given order.
pub fn tie_fraction_decay(
    f: &LegendreFunction,
    set: &CompactSet,
    grid: &GridSpec,
    tie_tols: &[f64],
) -> Result<Vec<SingleValuednessReport>> {
    tie_tols
        .iter()
        .map(|&t| single_valuedness_scan(f, set, grid, t))
        .collect()
}

/// Whether every map's tie fraction is non-increasing along the reports.
pub fn is_non_increasing(reports: &[SingleValuednessReport]) -> bool {
    reports.windows(2).all(|w| {
        w[0].maps
            .iter()
            .zip(&w[1].maps)
            .all(|(a, b)| b.tie_fraction() <= a.tie_fraction())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector;

    fn finite(points: &[f64]) -> CompactSet {
        CompactSet::finite(points.iter().map(|&p| vector![p]).collect()).unwrap()
    }

    #[test]
    fn grid_enumeration_order() {
        let g = GridSpec::new(vec![0.0, 10.0], vec![1.0, 12.0], vec![2, 3]).unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[1], vector![0, 11]);
        assert_eq!(pts[3], vector![1, 10]);
        assert_eq!(g.edges().len(), 7);
    }

    #[test]
    fn energy_bisector_witness() {
        let f = LegendreFunction::energy(1).unwrap();
        let g = GridSpec::cube(-1.0, 3.0, 40, 1).unwrap();
        let r = chebyshev_probe(&f, &finite(&[0.0, 2.0]), &g, &MapOptions::default()).unwrap();
        assert!(!r.witnesses.is_empty());
        assert!(r.witnesses.iter().all(|w| (w.point[0] - 1.0).abs() < 1e-9));
        assert_eq!(r.single_valued + r.tied, r.total);
    }

    #[test]
    fn entropy_bisector_witness() {
        let f = LegendreFunction::entropy(1).unwrap();
        let g = GridSpec::cube(0.5, 5.0, 50, 1).unwrap();
        let r = chebyshev_probe(&f, &finite(&[1.0, 4.0]), &g, &MapOptions::default()).unwrap();
        let expected = ((4.0 * 4f64.ln() - 3.0) / 3.0).exp();
        assert!((r.witnesses[0].point[0] - expected).abs() < 1e-9);
        let d = &r.witnesses[0].distances;
        assert!((d[0] - d[1]).abs() <= 1e-9);
    }

    #[test]
    fn singleton_has_no_ties() {
        let f = LegendreFunction::entropy(1).unwrap();
        let g = GridSpec::cube(0.5, 5.0, 50, 1).unwrap();
        let r = chebyshev_probe(&f, &finite(&[2.0]), &g, &MapOptions::default()).unwrap();
        assert_eq!(r.tied, 0);
        assert!(r.witnesses.is_empty());
    }

    #[test]
    fn klee_witness_at_neglog_interval_center() {
        let f = LegendreFunction::neglog(1).unwrap();
        let set = CompactSet::interval(1.0, 2.0).unwrap();
        let g = GridSpec::cube(0.5, 3.0, 26, 1).unwrap();
        let r = klee_probe(&f, &set, &g, &MapOptions::default()).unwrap();
        assert!((r.witnesses[0].point[0] - 1.0 / 2f64.ln()).abs() < 1e-8);
    }

    #[test]
    fn klee_witness_on_entropy_segment() {
        let f = LegendreFunction::entropy(2).unwrap();
        let set = CompactSet::segment(vector![1, 3], vector![3, 1]).unwrap();
        let g = GridSpec::cube(0.5, 4.0, 8, 2).unwrap();
        let r = klee_probe(&f, &set, &g, &MapOptions::default()).unwrap();
        assert!(r.witnesses[0].point.dist_inf(&vector![2, 2]) < 1e-8);
        assert_eq!(r.witnesses[0].attainers.len(), 2);
    }

    #[test]
    fn curve_singleton_is_single_valued() {
        let g = GridSpec::cube(0.5, 8.0, 10, 2).unwrap();
        let r = curious_set_probe(0.0, 10_000, &g, 1e-9).unwrap();
        assert_eq!(r.scan.tied, 0);
        assert_eq!(r.robust_ties, 0);
        assert!(r.nonconvexity_witness.is_none());
    }

    #[test]
    fn probes_are_deterministic() {
        let f = LegendreFunction::entropy(2).unwrap();
        let set = CompactSet::finite(vec![vector![1, 1], vector![3, 1], vector![2, 3]]).unwrap();
        let g = GridSpec::cube(0.5, 4.0, 15, 2).unwrap();
        let a = single_valuedness_scan(&f, &set, &g, 1e-6).unwrap();
        let b = single_valuedness_scan(&f, &set, &g, 1e-6).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn energy_interval_projection_never_ties() {
        let f = LegendreFunction::energy(1).unwrap();
        let set = CompactSet::interval(0.0, 1.0).unwrap();
        let g = GridSpec::cube(-2.0, 3.0, 501, 1).unwrap();
        let r = single_valuedness_scan(&f, &set, &g, 1e-9).unwrap();
        assert_eq!(r.maps[0].tied, 0);
    }
}
