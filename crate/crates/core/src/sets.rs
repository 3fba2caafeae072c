//! Compact sets inside the interior of a Legendre function's domain.
//!
//! Four shapes are representable: finite point sets, real intervals,
//! axis-aligned boxes, and line segments. The shapes are validated on
//! construction; membership in `int dom f` is validated against a given
//! function with [`CompactSet::check_for`], which every map calls first.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::legendre::LegendreFunction;
use crate::vector::Vector;

/// Points closer than this in the sup-norm count as the same point.
pub const DEDUP_TOL: f64 = 1e-12;

/// Samples used when a segment's image under `∇f` has to be discretized.
pub const DEFAULT_SEGMENT_RESOLUTION: usize = 1001;

/// Boxes carry `2^n` vertices; this keeps that at most 1024.
pub const MAX_BOX_DIM: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub enum CompactSet {
    /// Nonempty, pairwise distinct points of a common dimension.
    Finite(Vec<Vector>),
    /// `[a, b]` with `a < b`, in one dimension.
    Interval { a: f64, b: f64 },
    /// `{x : lo <= x <= hi}` with `lo < hi` coordinatewise.
    Box { lo: Vector, hi: Vector },
    /// `conv{c0, c1}` with `c0 != c1`.
    Segment { c0: Vector, c1: Vector },
}

impl CompactSet {
    /// Finite set; near-duplicates (within [`DEDUP_TOL`]) are merged, keeping
    /// the first occurrence.
    pub fn finite(points: Vec<Vector>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidSet("finite set must be nonempty".into()));
        };
        let dim = first.dim();
        let mut kept: Vec<Vector> = Vec::with_capacity(points.len());
        for p in points {
            p.check_dim(dim)?;
            if !kept.iter().any(|q| q.dist_inf(&p) <= DEDUP_TOL) {
                kept.push(p);
            }
        }
        Ok(CompactSet::Finite(kept))
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        let set = CompactSet::Interval { a, b };
        set.validate()?;
        Ok(set)
    }

    pub fn boxed(lo: Vector, hi: Vector) -> Result<Self> {
        let set = CompactSet::Box { lo, hi };
        set.validate()?;
        Ok(set)
    }

    pub fn segment(c0: Vector, c1: Vector) -> Result<Self> {
        let set = CompactSet::Segment { c0, c1 };
        set.validate()?;
        Ok(set)
    }

    /// Shape invariants, independent of any function.
    pub fn validate(&self) -> Result<()> {
        match self {
            CompactSet::Finite(points) => {
                let Some(first) = points.first() else {
                    return Err(Error::InvalidSet("finite set must be nonempty".into()));
                };
                for p in points {
                    p.check_dim(first.dim())?;
                }
                Ok(())
            }
            CompactSet::Interval { a, b } => {
                if a.is_finite() && b.is_finite() && a < b {
                    Ok(())
                } else {
                    Err(Error::InvalidSet(format!(
                        "interval needs finite a < b, got [{a}, {b}]"
                    )))
                }
            }
            CompactSet::Box { lo, hi } => {
                hi.check_dim(lo.dim())?;
                if lo.dim() > MAX_BOX_DIM {
                    return Err(Error::InvalidSet(format!(
                        "box dimension {} exceeds {MAX_BOX_DIM}",
                        lo.dim()
                    )));
                }
                match lo.iter().zip(hi.iter()).position(|(l, h)| l >= h) {
                    None => Ok(()),
                    Some(j) => Err(Error::InvalidSet(format!(
                        "box needs lo < hi, coordinate {j} has {} >= {}",
                        lo[j], hi[j]
                    ))),
                }
            }
            CompactSet::Segment { c0, c1 } => {
                c1.check_dim(c0.dim())?;
                if c0.dist_inf(c1) <= DEDUP_TOL {
                    Err(Error::InvalidSet("segment endpoints coincide".into()))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            CompactSet::Finite(points) => points[0].dim(),
            CompactSet::Interval { .. } => 1,
            CompactSet::Box { lo, .. } => lo.dim(),
            CompactSet::Segment { c0, .. } => c0.dim(),
        }
    }

    /// Validates the shape and checks that the set lies in `int dom f`.
    ///
    /// For the convex shapes it is enough to check the defining points,
    /// since the interior of a separable domain is a product of open intervals.
    pub fn check_for(&self, f: &LegendreFunction) -> Result<()> {
        self.validate()?;
        if self.dim() != f.dim() {
            return Err(Error::DimensionMismatch {
                expected: f.dim(),
                found: self.dim(),
            });
        }
        match self {
            CompactSet::Finite(points) => points.iter().try_for_each(|p| f.check_interior(p)),
            CompactSet::Interval { a, b } => {
                f.check_interior(&Vector::from_finite(vec![*a]))?;
                f.check_interior(&Vector::from_finite(vec![*b]))
            }
            CompactSet::Box { lo, hi } => {
                f.check_interior(lo)?;
                f.check_interior(hi)
            }
            CompactSet::Segment { c0, c1 } => {
                f.check_interior(c0)?;
                f.check_interior(c1)
            }
        }
    }

    /// `c_λ = (1 - λ) c0 + λ c1` for segments and `a + λ (b - a)` for intervals.
    pub fn point_at(&self, lambda: f64) -> Option<Vector> {
        match self {
            CompactSet::Interval { a, b } => Some(Vector::from_finite(vec![a + lambda * (b - a)])),
            CompactSet::Segment { c0, c1 } => Some(c0.lerp(c1, lambda)),
            _ => None,
        }
    }

    /// Membership up to `tol` in the sup-norm.
    pub fn contains(&self, p: &Vector, tol: f64) -> bool {
        if p.dim() != self.dim() {
            return false;
        }
        match self {
            CompactSet::Finite(points) => points.iter().any(|q| q.dist_inf(p) <= tol),
            CompactSet::Interval { a, b } => p[0] >= a - tol && p[0] <= b + tol,
            CompactSet::Box { lo, hi } => {
                (0..p.dim()).all(|j| p[j] >= lo[j] - tol && p[j] <= hi[j] + tol)
            }
            CompactSet::Segment { c0, c1 } => {
                let d: Vec<f64> = c1.iter().zip(c0.iter()).map(|(a, b)| a - b).collect();
                let dd: f64 = d.iter().map(|v| v * v).sum();
                let t = (p
                    .iter()
                    .zip(c0.iter())
                    .zip(&d)
                    .map(|((x, c), v)| (x - c) * v)
                    .sum::<f64>()
                    / dd)
                    .clamp(0.0, 1.0);
                c0.lerp(c1, t).dist_inf(p) <= tol
            }
        }
    }
}

/// Extreme points of a set: all points of a finite set, the endpoints of an
/// interval or segment, and the `2^n` vertices of a box.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremePointList {
    pub points: Vec<Vector>,
}

pub fn extreme_points(set: &CompactSet) -> ExtremePointList {
    let points = match set {
        CompactSet::Finite(points) => points.clone(),
        CompactSet::Interval { a, b } => {
            vec![Vector::from_finite(vec![*a]), Vector::from_finite(vec![*b])]
        }
        CompactSet::Box { lo, hi } => box_vertices(lo, hi),
        CompactSet::Segment { c0, c1 } => vec![c0.clone(), c1.clone()],
    };
    ExtremePointList { points }
}

/// Vertex `k` takes `hi[j]` where bit `j` of `k` is set.
fn box_vertices(lo: &Vector, hi: &Vector) -> Vec<Vector> {
    let n = lo.dim();
    (0..1usize << n)
        .map(|k| {
            Vector::from_finite(
                (0..n)
                    .map(|j| if k >> j & 1 == 1 { hi[j] } else { lo[j] })
                    .collect(),
            )
        })
        .collect()
}

/// `C* = ∇f(C)`.
pub fn dual_image(f: &LegendreFunction, set: &CompactSet) -> Result<CompactSet> {
    dual_image_with_resolution(f, set, DEFAULT_SEGMENT_RESOLUTION)
}

/// As [`dual_image`], discretizing a segment's curved image at `resolution` samples.
pub fn dual_image_with_resolution(
    f: &LegendreFunction,
    set: &CompactSet,
    resolution: usize,
) -> Result<CompactSet> {
    set.check_for(f)?;
    Ok(match set {
        CompactSet::Finite(points) => {
            CompactSet::Finite(points.iter().map(|p| f.grad_unchecked(p)).collect())
        }
        CompactSet::Interval { a, b } => {
            let k = f.kernels()[0];
            let (ga, gb) = (k.grad(*a), k.grad(*b));
            CompactSet::Interval {
                a: ga.min(gb),
                b: ga.max(gb),
            }
        }
        CompactSet::Box { lo, hi } => {
            let (gl, gh) = (f.grad_unchecked(lo), f.grad_unchecked(hi));
            CompactSet::Box {
                lo: Vector::from_finite(gl.iter().zip(gh.iter()).map(|(a, b)| a.min(*b)).collect()),
                hi: Vector::from_finite(gl.iter().zip(gh.iter()).map(|(a, b)| a.max(*b)).collect()),
            }
        }
        CompactSet::Segment { c0, c1 } => {
            let n = resolution.max(2);
            let samples = (0..n)
                .map(|i| f.grad_unchecked(&c0.lerp(c1, i as f64 / (n - 1) as f64)))
                .collect();
            CompactSet::finite(samples)?
        }
    })
}

/// Outcome of a convex-hull membership query.
#[derive(Debug, Clone, PartialEq)]
pub enum HullMembership {
    /// `weights >= 0`, summing to one, with `‖Σ w_i p_i - y‖∞ = residual <= tol`.
    Inside { weights: Vec<f64>, residual: f64 },
    /// Euclidean distance from `y` to the hull exceeds the tolerance.
    Outside { margin: f64 },
}

impl HullMembership {
    pub fn is_inside(&self) -> bool {
        matches!(self, HullMembership::Inside { .. })
    }
}

/// Decides whether `y ∈ conv(points)` by computing the nearest point of the
/// hull (Wolfe's minimum-norm-point algorithm on `p_i - y`).
pub fn convex_hull_membership(y: &Vector, points: &[Vector], tol: f64) -> HullMembership {
    if points.is_empty() {
        return HullMembership::Outside {
            margin: f64::INFINITY,
        };
    }
    let shifted: Vec<DVector<f64>> = points
        .iter()
        .map(|p| {
            assert_eq!(p.dim(), y.dim(), "hull point dimension mismatch");
            DVector::from_iterator(y.dim(), p.iter().zip(y.iter()).map(|(a, b)| a - b))
        })
        .collect();
    let weights = min_norm_weights(&shifted);
    let mut combo = DVector::zeros(y.dim());
    for (w, q) in weights.iter().zip(&shifted) {
        combo.axpy(*w, q, 1.0);
    }
    let residual = combo.amax();
    if residual <= tol {
        HullMembership::Inside { weights, residual }
    } else {
        HullMembership::Outside {
            margin: combo.norm(),
        }
    }
}

/// Barycentric weights of the minimum-norm point of `conv(q)`.
fn min_norm_weights(q: &[DVector<f64>]) -> Vec<f64> {
    const MAX_MAJOR: usize = 1000;
    let scale = q
        .iter()
        .map(|v| v.norm_squared())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let eps_opt = 1e-15 * scale;
    let eps_w = 1e-14;

    let start = (0..q.len())
        .min_by(|&i, &j| q[i].norm_squared().total_cmp(&q[j].norm_squared()))
        .unwrap();
    let mut support = vec![start];
    let mut lam = vec![1.0];
    let mut x = q[start].clone();

    for _ in 0..MAX_MAJOR {
        if x.norm_squared() <= eps_opt {
            break;
        }
        let j = (0..q.len())
            .min_by(|&i, &k| x.dot(&q[i]).total_cmp(&x.dot(&q[k])))
            .unwrap();
        if x.norm_squared() - x.dot(&q[j]) <= eps_opt || support.contains(&j) {
            break;
        }
        support.push(j);
        lam.push(0.0);
        loop {
            let alpha = affine_min_norm(q, &support);
            if alpha.iter().all(|&a| a > eps_w) {
                lam = alpha;
                break;
            }
            let theta = lam
                .iter()
                .zip(&alpha)
                .filter(|(_, &a)| a <= eps_w)
                .map(|(&l, &a)| if l - a > 0.0 { l / (l - a) } else { 0.0 })
                .fold(1.0, f64::min);
            for (l, a) in lam.iter_mut().zip(&alpha) {
                *l += theta * (a - *l);
            }
            let mut i = 0;
            while i < support.len() {
                if lam[i] <= eps_w {
                    support.remove(i);
                    lam.remove(i);
                } else {
                    i += 1;
                }
            }
            if support.is_empty() {
                // numerical collapse; restart from the best single point
                support.push(start);
                lam.push(1.0);
                break;
            }
            let total: f64 = lam.iter().sum();
            lam.iter_mut().for_each(|l| *l /= total);
        }
        x = DVector::zeros(x.len());
        for (&i, &l) in support.iter().zip(&lam) {
            x.axpy(l, &q[i], 1.0);
        }
    }

    let mut weights = vec![0.0; q.len()];
    for (&i, &l) in support.iter().zip(&lam) {
        weights[i] = l;
    }
    weights
}

/// Minimizer of `‖Σ α_i q_i‖` over the affine hull of the support, `Σ α_i = 1`.
fn affine_min_norm(q: &[DVector<f64>], support: &[usize]) -> Vec<f64> {
    let k = support.len();
    let mut kkt = DMatrix::zeros(k + 1, k + 1);
    for a in 0..k {
        for b in 0..k {
            kkt[(a, b)] = q[support[a]].dot(&q[support[b]]);
        }
        kkt[(a, k)] = 1.0;
        kkt[(k, a)] = 1.0;
    }
    let mut rhs = DVector::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = kkt
        .clone()
        .lu()
        .solve(&rhs)
        .filter(|s| s.iter().all(|v| v.is_finite()))
        .unwrap_or_else(|| {
            kkt.svd(true, true)
                .solve(&rhs, 1e-14)
                .expect("svd solve with both factors")
        });
    sol.iter().take(k).copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector;
    use std::f64::consts::E;

    #[test]
    fn shape_validation() {
        assert!(CompactSet::interval(3.0, 1.0).is_err());
        assert!(CompactSet::boxed(vector![1, 1], vector![2, 1]).is_err());
        assert!(CompactSet::segment(vector![1, 2], vector![1, 2]).is_err());
        assert!(CompactSet::finite(vec![]).is_err());
        assert!(CompactSet::finite(vec![vector![1], vector![1, 2]]).is_err());
    }

    #[test]
    fn finite_sets_are_deduplicated() {
        let set = CompactSet::finite(vec![vector![1, 2], vector![1, 2.0 + 1e-14], vector![3, 4]])
            .unwrap();
        assert_eq!(set, CompactSet::Finite(vec![vector![1, 2], vector![3, 4]]));
    }

    #[test]
    fn domain_check_reports_coordinate() {
        let f = LegendreFunction::entropy(2).unwrap();
        let set = CompactSet::segment(vector![1, 2], vector![3, 0]).unwrap();
        assert_eq!(
            set.check_for(&f).unwrap_err(),
            Error::Domain {
                index: 1,
                value: 0.0
            }
        );
    }

    #[test]
    fn dual_image_examples() {
        let kl = LegendreFunction::entropy(1).unwrap();
        let img = dual_image(&kl, &CompactSet::interval(1.0, E).unwrap()).unwrap();
        assert_eq!(img, CompactSet::Interval { a: 0.0, b: 1.0 });

        let e = LegendreFunction::energy(2).unwrap();
        let bx = CompactSet::boxed(vector![1, -1], vector![2, 3]).unwrap();
        assert_eq!(dual_image(&e, &bx).unwrap(), bx);

        let is = LegendreFunction::neglog(1).unwrap();
        let img = dual_image(
            &is,
            &CompactSet::finite(vec![vector![2], vector![4]]).unwrap(),
        )
        .unwrap();
        assert_eq!(img, CompactSet::Finite(vec![vector![-0.5], vector![-0.25]]));
    }

    #[test]
    fn segment_dual_image_is_sampled_curve() {
        let kl = LegendreFunction::entropy(2).unwrap();
        let seg = CompactSet::segment(vector![1, 3], vector![3, 1]).unwrap();
        let CompactSet::Finite(pts) = dual_image_with_resolution(&kl, &seg, 11).unwrap() else {
            panic!("segment image should be finite");
        };
        assert_eq!(pts.len(), 11);
        assert!(pts[5].dist_inf(&vector![2f64.ln(), 2f64.ln()]) < 1e-15);
    }

    #[test]
    fn extreme_point_examples() {
        let ext = extreme_points(&CompactSet::interval(1.0, 3.0).unwrap());
        assert_eq!(ext.points, vec![vector![1], vector![3]]);

        let ext = extreme_points(&CompactSet::boxed(vector![1, 1], vector![2, 3]).unwrap());
        assert_eq!(ext.points.len(), 4);
        for v in [vector![1, 1], vector![2, 1], vector![1, 3], vector![2, 3]] {
            assert!(ext.points.contains(&v));
        }

        let ext = extreme_points(&CompactSet::segment(vector![1, 3], vector![3, 1]).unwrap());
        assert_eq!(ext.points, vec![vector![1, 3], vector![3, 1]]);
    }

    #[test]
    fn hull_membership_examples() {
        let pts = [vector![1, 3], vector![3, 1]];
        match convex_hull_membership(&vector![2, 2], &pts, 1e-12) {
            HullMembership::Inside { weights, .. } => {
                assert!((weights[0] - 0.5).abs() < 1e-12 && (weights[1] - 0.5).abs() < 1e-12)
            }
            other => panic!("expected inside, got {other:?}"),
        }
        assert!(!convex_hull_membership(&vector![0, 0], &pts, 1e-9).is_inside());

        match convex_hull_membership(&vector![1.5], &[vector![1], vector![2]], 1e-12) {
            HullMembership::Inside { weights, .. } => {
                assert!((weights[0] - 0.5).abs() < 1e-12 && (weights[1] - 0.5).abs() < 1e-12)
            }
            other => panic!("expected inside, got {other:?}"),
        }
    }

    #[test]
    fn hull_margin_is_euclidean_distance() {
        let pts = [vector![0, 0], vector![1, 0], vector![0, 1], vector![1, 1]];
        match convex_hull_membership(&vector![2, 0.5], &pts, 1e-9) {
            HullMembership::Outside { margin } => assert!((margin - 1.0).abs() < 1e-12),
            other => panic!("expected outside, got {other:?}"),
        }
    }

    #[test]
    fn hull_with_redundant_points() {
        let pts: Vec<Vector> = (0..16)
            .map(|k| {
                let t = k as f64 * std::f64::consts::TAU / 16.0;
                vector![t.cos(), t.sin()]
            })
            .chain([vector![0, 0], vector![0.1, 0.1]])
            .collect();
        let y = vector![0.3, -0.2];
        match convex_hull_membership(&y, &pts, 1e-12) {
            HullMembership::Inside { weights, .. } => {
                assert!(weights.iter().all(|&w| w >= 0.0));
                assert!((weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
            other => panic!("expected inside, got {other:?}"),
        }
    }
}
