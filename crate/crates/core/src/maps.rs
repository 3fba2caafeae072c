//! Left/right Bregman nearest- and farthest-point maps.
//!
//! "Left" maps vary the first argument of `D` over the set, "right" maps the
//! second:
//!
//! | map | value | attainers |
//! |-----|-------|-----------|
//! | [`left_nearest`] | `inf_{x∈C} D(x, y)` | argmin |
//! | [`right_nearest`] | `inf_{y∈C} D(x, y)` | argmin |
//! | [`left_farthest`] | `sup_{x∈C} D(x, y)` | argmax |
//! | [`right_farthest`] | `sup_{y∈C} D(x, y)` | argmax |
//!
//! Results are exact on finite sets, intervals and boxes. On segments the
//! right maps scan the curve `∇f(C)` at a fixed resolution and refine each
//! winning cell; those values are approximate.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::bregman::distance_unchecked;
use crate::error::Result;
use crate::legendre::LegendreFunction;
use crate::search::{ternary_max, ternary_min};
use crate::sets::{
    dual_image_with_resolution, extreme_points, CompactSet, DEFAULT_SEGMENT_RESOLUTION,
};
use crate::vector::Vector;

/// Default absolute tolerance on distance values for declaring a tie.
pub const DEFAULT_TIE_TOL: f64 = 1e-9;

/// Attainers closer than this (sup-norm) are reported once.
pub const ATTAINER_SEPARATION: f64 = 1e-9;

/// Parameter tolerance of the one-dimensional searches.
pub const PARAM_TOL: f64 = 1e-12;

/// Largest number of local extrema refined on a segment scan.
const MAX_REFINED_CELLS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapOptions {
    pub tie_tol: f64,
    pub segment_resolution: usize,
}

impl Default for MapOptions {
    fn default() -> Self {
        Self {
            tie_tol: DEFAULT_TIE_TOL,
            segment_resolution: DEFAULT_SEGMENT_RESOLUTION,
        }
    }
}

/// Value of a nearest/farthest map and every point attaining it within `tie_tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct MapResult {
    pub value: f64,
    pub attainers: Vec<Vector>,
    pub tie_tol: f64,
}

impl MapResult {
    pub fn is_single_valued(&self) -> bool {
        self.attainers.len() == 1
    }

    pub fn is_tie(&self) -> bool {
        self.attainers.len() > 1
    }
}

impl Serialize for MapResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("MapResult", 3)?;
        s.serialize_field("value", &self.value)?;
        s.serialize_field("attainers", &self.attainers)?;
        s.serialize_field("ties", &self.is_tie())?;
        s.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapKind {
    LeftNearest,
    RightNearest,
    LeftFarthest,
    RightFarthest,
}

impl MapKind {
    pub const ALL: [MapKind; 4] = [
        MapKind::LeftNearest,
        MapKind::RightNearest,
        MapKind::LeftFarthest,
        MapKind::RightFarthest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MapKind::LeftNearest => "left_nearest",
            MapKind::RightNearest => "right_nearest",
            MapKind::LeftFarthest => "left_farthest",
            MapKind::RightFarthest => "right_farthest",
        }
    }

    pub fn is_farthest(self) -> bool {
        matches!(self, MapKind::LeftFarthest | MapKind::RightFarthest)
    }
}

/// Evaluates the map of the given kind.
pub fn evaluate(
    kind: MapKind,
    f: &LegendreFunction,
    set: &CompactSet,
    z: &Vector,
    opts: &MapOptions,
) -> Result<MapResult> {
    match kind {
        MapKind::LeftNearest => left_nearest_with(f, set, z, opts),
        MapKind::RightNearest => right_nearest_with(f, set, z, opts),
        MapKind::LeftFarthest => left_farthest_with(f, set, z, opts),
        MapKind::RightFarthest => right_farthest_with(f, set, z, opts),
    }
}

pub fn left_nearest(f: &LegendreFunction, set: &CompactSet, y: &Vector) -> Result<MapResult> {
    left_nearest_with(f, set, y, &MapOptions::default())
}

pub fn left_nearest_with(
    f: &LegendreFunction,
    set: &CompactSet,
    y: &Vector,
    opts: &MapOptions,
) -> Result<MapResult> {
    set.check_for(f)?;
    f.check_interior(y)?;
    let dist = |x: &Vector| distance_unchecked(f, x, y);
    Ok(match set {
        CompactSet::Finite(points) => {
            select(points.iter().map(|p| (p.clone(), dist(p))), false, opts)
        }
        // D(·, y) is separable and each coordinate term is minimized at y_j
        CompactSet::Interval { .. } | CompactSet::Box { .. } => {
            single(clamp_into(set, y), dist, opts)
        }
        CompactSet::Segment { c0, c1 } => {
            let r = ternary_min(|t| dist(&c0.lerp(c1, t)), 0.0, 1.0, PARAM_TOL);
            single(c0.lerp(c1, r.arg), dist, opts)
        }
    })
}

pub fn right_nearest(f: &LegendreFunction, set: &CompactSet, x: &Vector) -> Result<MapResult> {
    right_nearest_with(f, set, x, &MapOptions::default())
}

/// Right nearest map, computed in dual coordinates as
/// `∇f* ∘ (left nearest map of f* over C*) ∘ ∇f` except on segments,
/// whose image is a curve and is scanned directly.
pub fn right_nearest_with(
    f: &LegendreFunction,
    set: &CompactSet,
    x: &Vector,
    opts: &MapOptions,
) -> Result<MapResult> {
    set.check_for(f)?;
    f.check_interior(x)?;
    if matches!(set, CompactSet::Segment { .. }) {
        return right_nearest_direct(f, set, x, opts);
    }
    let fc = f.conjugate();
    let dual_set = dual_image_with_resolution(f, set, opts.segment_resolution)?;
    let dual = left_nearest_with(&fc, &dual_set, &f.grad_unchecked(x), opts)?;
    Ok(back_to_primal(f, dual))
}

/// Right nearest map minimizing `D(x, ·)` over `C` in primal coordinates.
pub(crate) fn right_nearest_direct(
    f: &LegendreFunction,
    set: &CompactSet,
    x: &Vector,
    opts: &MapOptions,
) -> Result<MapResult> {
    set.check_for(f)?;
    f.check_interior(x)?;
    let dist = |y: &Vector| distance_unchecked(f, x, y);
    Ok(match set {
        CompactSet::Finite(points) => {
            select(points.iter().map(|p| (p.clone(), dist(p))), false, opts)
        }
        // ∂D(x,y)/∂y_j = f''(y_j)(y_j - x_j): each coordinate term is unimodal
        CompactSet::Interval { .. } | CompactSet::Box { .. } => {
            single(clamp_into(set, x), dist, opts)
        }
        CompactSet::Segment { c0, c1 } => {
            let xs = f.grad_unchecked(x);
            let fc = f.conjugate();
            let through_dual = |y: &Vector| distance_unchecked(&fc, &f.grad_unchecked(y), &xs);
            scan_segment(c0, c1, through_dual, false, opts)
        }
    })
}

pub fn left_farthest(f: &LegendreFunction, set: &CompactSet, y: &Vector) -> Result<MapResult> {
    left_farthest_with(f, set, y, &MapOptions::default())
}

/// Left farthest map. `D(·, y)` is convex, so its maximum over a convex set
/// is attained among the extreme points; only those are evaluated.
pub fn left_farthest_with(
    f: &LegendreFunction,
    set: &CompactSet,
    y: &Vector,
    opts: &MapOptions,
) -> Result<MapResult> {
    set.check_for(f)?;
    f.check_interior(y)?;
    let ext = extreme_points(set);
    Ok(select(
        ext.points.into_iter().map(|p| {
            let d = distance_unchecked(f, &p, y);
            (p, d)
        }),
        true,
        opts,
    ))
}

pub fn right_farthest(f: &LegendreFunction, set: &CompactSet, x: &Vector) -> Result<MapResult> {
    right_farthest_with(f, set, x, &MapOptions::default())
}

/// Right farthest map. In each coordinate `D(x, ·)` decreases towards `x`
/// and increases away from it, so over an interval or box the maximum sits
/// at a vertex. Segments go through the dual curve.
pub fn right_farthest_with(
    f: &LegendreFunction,
    set: &CompactSet,
    x: &Vector,
    opts: &MapOptions,
) -> Result<MapResult> {
    set.check_for(f)?;
    f.check_interior(x)?;
    let dist = |y: &Vector| distance_unchecked(f, x, y);
    Ok(match set {
        CompactSet::Segment { c0, c1 } => {
            let xs = f.grad_unchecked(x);
            let fc = f.conjugate();
            let through_dual = |y: &Vector| distance_unchecked(&fc, &f.grad_unchecked(y), &xs);
            scan_segment(c0, c1, through_dual, true, opts)
        }
        _ => select(
            extreme_points(set).points.into_iter().map(|p| {
                let d = dist(&p);
                (p, d)
            }),
            true,
            opts,
        ),
    })
}

/// `|primal value - value obtained through dual coordinates|` for the chosen map.
///
/// Left nearest is compared with the right nearest map of `f*` over `C*`,
/// the farthest maps with their mirrored counterparts under `f*`, and the
/// right nearest map (itself computed in dual coordinates) with a direct
/// primal minimization.
pub fn duality_transport_check(
    f: &LegendreFunction,
    set: &CompactSet,
    z: &Vector,
    which: MapKind,
) -> Result<f64> {
    let opts = MapOptions::default();
    set.check_for(f)?;
    f.check_interior(z)?;
    let fc = f.conjugate();
    let dual_set = dual_image_with_resolution(f, set, opts.segment_resolution)?;
    let zs = f.grad_unchecked(z);
    let (primal, dual) = match which {
        MapKind::LeftNearest => (
            left_nearest_with(f, set, z, &opts)?,
            right_nearest_direct(&fc, &dual_set, &zs, &opts)?,
        ),
        MapKind::RightNearest => (
            right_nearest_with(f, set, z, &opts)?,
            right_nearest_direct(f, set, z, &opts)?,
        ),
        MapKind::LeftFarthest => (
            left_farthest_with(f, set, z, &opts)?,
            right_farthest_with(&fc, &dual_set, &zs, &opts)?,
        ),
        MapKind::RightFarthest => (
            right_farthest_with(f, set, z, &opts)?,
            left_farthest_with(&fc, &dual_set, &zs, &opts)?,
        ),
    };
    Ok((primal.value - dual.value).abs())
}

fn back_to_primal(f: &LegendreFunction, dual: MapResult) -> MapResult {
    MapResult {
        attainers: dual
            .attainers
            .iter()
            .map(|p| f.grad_conj_unchecked(p))
            .collect(),
        ..dual
    }
}

fn clamp_into(set: &CompactSet, z: &Vector) -> Vector {
    match set {
        CompactSet::Interval { a, b } => Vector::from_finite(vec![z[0].clamp(*a, *b)]),
        CompactSet::Box { lo, hi } => {
            Vector::from_finite((0..z.dim()).map(|j| z[j].clamp(lo[j], hi[j])).collect())
        }
        _ => unreachable!("clamp only applies to intervals and boxes"),
    }
}

fn single(p: Vector, dist: impl Fn(&Vector) -> f64, opts: &MapOptions) -> MapResult {
    let value = dist(&p);
    MapResult {
        value,
        attainers: vec![p],
        tie_tol: opts.tie_tol,
    }
}

/// Best value over the candidates and every distinct candidate within the tie tolerance.
pub(crate) fn select(
    candidates: impl IntoIterator<Item = (Vector, f64)>,
    maximize: bool,
    opts: &MapOptions,
) -> MapResult {
    let candidates: Vec<(Vector, f64)> = candidates.into_iter().collect();
    let better = |a: f64, b: f64| if maximize { a > b } else { a < b };
    let value = candidates.iter().map(|c| c.1).fold(
        if maximize {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        },
        |best, v| {
            if better(v, best) {
                v
            } else {
                best
            }
        },
    );
    let mut attainers: Vec<Vector> = Vec::new();
    if value.is_finite() {
        for (p, v) in candidates {
            if (v - value).abs() <= opts.tie_tol
                && !attainers
                    .iter()
                    .any(|q| q.dist_inf(&p) <= ATTAINER_SEPARATION)
            {
                attainers.push(p);
            }
        }
    }
    MapResult {
        value,
        attainers,
        tie_tol: opts.tie_tol,
    }
}

/// Scans `λ ↦ objective(c_λ)` on a uniform grid and refines every local
/// extremum by a ternary search over its two neighbouring cells.
fn scan_segment(
    c0: &Vector,
    c1: &Vector,
    objective: impl Fn(&Vector) -> f64,
    maximize: bool,
    opts: &MapOptions,
) -> MapResult {
    let n = opts.segment_resolution.max(3);
    let step = 1.0 / (n - 1) as f64;
    let at = |t: f64| objective(&c0.lerp(c1, t));
    let values: Vec<f64> = (0..n).map(|i| at(i as f64 * step)).collect();
    let sign = if maximize { 1.0 } else { -1.0 };
    let mut extrema: Vec<usize> = (0..n)
        .filter(|&i| {
            let v = sign * values[i];
            (i == 0 || v >= sign * values[i - 1]) && (i == n - 1 || v >= sign * values[i + 1])
        })
        .collect();
    extrema.sort_by(|&i, &j| (sign * values[j]).total_cmp(&(sign * values[i])));
    extrema.truncate(MAX_REFINED_CELLS);

    let mut refined: Vec<(f64, f64)> = extrema
        .into_iter()
        .map(|i| {
            let lo = i.saturating_sub(1) as f64 * step;
            let hi = ((i + 1).min(n - 1)) as f64 * step;
            let r = if maximize {
                ternary_max(at, lo, hi, PARAM_TOL)
            } else {
                ternary_min(at, lo, hi, PARAM_TOL)
            };
            if sign * r.value >= sign * values[i] {
                (r.arg, r.value)
            } else {
                (i as f64 * step, values[i])
            }
        })
        .collect();
    // neighbouring cells that refine to the same extremum count once
    refined.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(refined.len());
    for (t, v) in refined {
        match merged.last_mut() {
            Some(last) if t - last.0 <= 2.0 * step => {
                if sign * v > sign * last.1 {
                    *last = (t, v);
                }
            }
            _ => merged.push((t, v)),
        }
    }
    let candidates = merged.into_iter().map(|(t, v)| (c0.lerp(c1, t), v));
    select(candidates, maximize, opts)
}
