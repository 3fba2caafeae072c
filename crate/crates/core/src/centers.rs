//! Chebyshev radii and centers of compact sets.
//!
//! The right center minimizes the convex function `x ↦ sup_{y∈C} D(x, y)`.
//! On the line this is a ternary search. In higher dimensions the problem
//! is solved through its concave dual over the simplex of weights on the
//! candidate farthest points `q_i`:
//!
//! ```text
//! maximize  h(w) = Σ w_i f*(q_i*) - f*(Σ w_i q_i*)      (w ∈ simplex)
//! center    x    = ∇f*(Σ w_i q_i*)
//! ```
//!
//! `∂h/∂w_i = D(x, q_i) - f(x)`, so a pairwise Frank–Wolfe step moves weight
//! from the nearest supported point to the farthest one, and at the optimum
//! the supported points are exactly the farthest points with `x* ∈ conv`
//! of their images. Iterates stay in `int dom f` because `Σ w_i q_i*` is a
//! convex combination of points of `int dom f*`.
//!
//! The left center is obtained in dual coordinates: it is `∇f*` of the
//! right center of `f*` over `∇f(ext C)`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::bregman::distance_unchecked;
use crate::error::{Error, Result};
use crate::legendre::LegendreFunction;
use crate::maps::{left_farthest_with, right_farthest_with, MapOptions, MapResult, PARAM_TOL};
use crate::search::ternary_min;
use crate::sets::{
    convex_hull_membership, dual_image_with_resolution, extreme_points, CompactSet, HullMembership,
};
use crate::vector::Vector;

/// Required accuracy of the hull characterization at a returned center.
pub const DEFAULT_CERTIFICATE_TOL: f64 = 1e-6;

pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Subsets examined by [`minimax_by_enumeration`] before giving up.
const MAX_ENUMERATED_SUPPORTS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterOptions {
    pub certificate_tol: f64,
    pub max_iter: usize,
    pub map: MapOptions,
}

impl Default for CenterOptions {
    fn default() -> Self {
        Self {
            certificate_tol: DEFAULT_CERTIFICATE_TOL,
            max_iter: DEFAULT_MAX_ITER,
            map: MapOptions::default(),
        }
    }
}

/// Convex-combination witness: `Σ weights_i points_i` reproduces the
/// characterization point up to `residual` (sup-norm).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub points: Vec<Vector>,
    pub weights: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverTrace {
    pub iterations: usize,
    pub final_step: f64,
    /// Whether the certificate residual met the tolerance.
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CenterResult {
    pub center: Vector,
    pub radius: f64,
    pub certificate: Certificate,
    pub trace: SolverTrace,
}

pub fn right_center(f: &LegendreFunction, set: &CompactSet) -> Result<CenterResult> {
    right_center_with(f, set, &CenterOptions::default())
}

pub fn right_center_with(
    f: &LegendreFunction,
    set: &CompactSet,
    opts: &CenterOptions,
) -> Result<CenterResult> {
    set.check_for(f)?;
    let mut candidates = farthest_candidates(set, opts.map.segment_resolution);
    let (mut center, mut iterations, mut final_step) = solve_right(f, &candidates, opts);

    // Segments: the sampled candidates can miss the true farthest point;
    // feed the refined attainers back until the sampled maximum is exact.
    if matches!(set, CompactSet::Segment { .. }) {
        for _ in 0..8 {
            let sampled = candidates
                .iter()
                .map(|q| distance_unchecked(f, &center, q))
                .fold(f64::NEG_INFINITY, f64::max);
            let refined = right_farthest_with(f, set, &center, &opts.map)?;
            if refined.value <= sampled + opts.map.tie_tol {
                break;
            }
            candidates.extend(refined.attainers);
            sort_lex(&mut candidates);
            let (c, it, st) = solve_right(f, &candidates, opts);
            center = c;
            iterations += it;
            final_step = st;
        }
    }

    let farthest = right_farthest_with(f, set, &center, &opts.map)?;
    let x_star = f.grad_unchecked(&center);
    let images: Vec<Vector> = farthest
        .attainers
        .iter()
        .map(|q| f.grad_unchecked(q))
        .collect();
    let certificate = certify(&x_star, &farthest, &images, opts.certificate_tol);
    Ok(CenterResult {
        center,
        radius: farthest.value,
        trace: SolverTrace {
            iterations,
            final_step,
            converged: certificate.residual <= opts.certificate_tol,
        },
        certificate,
    })
}

pub fn left_center(f: &LegendreFunction, set: &CompactSet) -> Result<CenterResult> {
    left_center_with(f, set, &CenterOptions::default())
}

/// Left center `∇f*(right center of f* over ∇f(ext C))`, certified by
/// `y ∈ conv(left farthest points of y)`.
pub fn left_center_with(
    f: &LegendreFunction,
    set: &CompactSet,
    opts: &CenterOptions,
) -> Result<CenterResult> {
    set.check_for(f)?;
    let fc = f.conjugate();
    let images = extreme_points(set)
        .points
        .iter()
        .map(|p| f.grad_unchecked(p))
        .collect();
    let dual = right_center_with(&fc, &CompactSet::finite(images)?, opts)?;
    let center = f.grad_conj_unchecked(&dual.center);
    let farthest = left_farthest_with(f, set, &center, &opts.map)?;
    let certificate = certify(
        &center,
        &farthest,
        &farthest.attainers,
        opts.certificate_tol,
    );
    Ok(CenterResult {
        center,
        radius: farthest.value,
        trace: SolverTrace {
            converged: certificate.residual <= opts.certificate_tol,
            ..dual.trace
        },
        certificate,
    })
}

/// Closed-form `(right center, left center)` of `[a, b]` on the line:
/// `x = (f*(b*) - f*(a*)) / (b* - a*)` and `y = ∇f*((f(b) - f(a)) / (b - a))`.
pub fn interval_center_closed_form(f: &LegendreFunction, a: f64, b: f64) -> Result<(f64, f64)> {
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: f.dim(),
        });
    }
    CompactSet::interval(a, b)?.check_for(f)?;
    let k = f.kernels()[0];
    let kc = k.conjugate();
    let (a_s, b_s) = (k.grad(a), k.grad(b));
    let x = (kc.value(b_s) - kc.value(a_s)) / (b_s - a_s);
    let y = kc.grad((k.value(b) - k.value(a)) / (b - a));
    Ok((x, y))
}

/// `|left radius of C under f - right radius of C* under f*|`.
///
/// The left radius is computed in primal coordinates without the dual
/// solver: by a ternary search on the line, and otherwise by
/// [`minimax_by_enumeration`] over the extreme points.
pub fn radius_duality_check(f: &LegendreFunction, set: &CompactSet) -> Result<f64> {
    set.check_for(f)?;
    let primal = left_radius_primal(f, set)?;
    let dual = right_center(
        &f.conjugate(),
        &dual_image_with_resolution(f, set, crate::sets::DEFAULT_SEGMENT_RESOLUTION)?,
    )?;
    Ok((primal - dual.radius).abs())
}

fn left_radius_primal(f: &LegendreFunction, set: &CompactSet) -> Result<f64> {
    let ext = extreme_points(set).points;
    if f.dim() == 1 {
        // on [min, max] the two extreme distances move in opposite directions
        let lo = ext.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let hi = ext.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        let worst = |y: f64| {
            ext.iter()
                .map(|p| distance_unchecked(f, p, &[y]))
                .fold(f64::NEG_INFINITY, f64::max)
        };
        return Ok(ternary_min(worst, lo, hi, PARAM_TOL).value);
    }
    minimax_by_enumeration(f, &ext).map(|(_, r, _)| r)
}

/// Left Chebyshev center of `conv(points)` by enumerating candidate supports.
///
/// For each subset `S` of at most `n + 1` points, Newton's method maximizes
/// the strictly concave gap `Σ w_i f(p_i) - f(Σ w_i p_i)` over the affine
/// hull of `S`; its stationary point is the point equidistant (in `D(p_i, ·)`)
/// from all of `S`. A subset is accepted when the weights are nonnegative and
/// no other point is farther. Returns `(center, radius, weights)`.
pub fn minimax_by_enumeration(
    f: &LegendreFunction,
    points: &[Vector],
) -> Result<(Vector, f64, Vec<f64>)> {
    let m = points.len();
    if m == 0 {
        return Err(Error::InvalidSet("no points".into()));
    }
    for p in points {
        f.check_interior(p)?;
    }
    let max_size = (f.dim() + 1).min(m);
    let total: usize = (1..=max_size).map(|k| binomial(m, k)).sum();
    if total > MAX_ENUMERATED_SUPPORTS {
        return Err(Error::Parameter(format!(
            "{total} candidate supports exceed the enumeration limit {MAX_ENUMERATED_SUPPORTS}"
        )));
    }
    let mut best: Option<(Vector, f64, Vec<f64>)> = None;
    for k in 1..=max_size {
        for subset in Combinations::new(m, k) {
            let support: Vec<&Vector> = subset.iter().map(|&i| &points[i]).collect();
            let Some((y, w)) = equidistant_point(f, &support) else {
                continue;
            };
            if w.iter().any(|&wi| wi < -1e-12) {
                continue;
            }
            let r = subset
                .iter()
                .map(|&i| distance_unchecked(f, &points[i], &y))
                .fold(f64::NEG_INFINITY, f64::max);
            let worst = points
                .iter()
                .map(|p| distance_unchecked(f, p, &y))
                .fold(f64::NEG_INFINITY, f64::max);
            if worst > r + 1e-11 * (1.0 + r) {
                continue;
            }
            if best.as_ref().is_none_or(|b| worst < b.1) {
                let mut weights = vec![0.0; m];
                for (&i, &wi) in subset.iter().zip(&w) {
                    weights[i] = wi.max(0.0);
                }
                best = Some((y, worst, weights));
            }
        }
    }
    best.ok_or(Error::NonConvergence {
        iterations: total,
        residual: f64::INFINITY,
    })
}

/// Newton's method on the Jensen gap restricted to the affine hull of `support`.
fn equidistant_point(f: &LegendreFunction, support: &[&Vector]) -> Option<(Vector, Vec<f64>)> {
    let k = support.len();
    let n = f.dim();
    if k == 1 {
        return Some((support[0].clone(), vec![1.0]));
    }
    let base = support[0];
    let dirs = DMatrix::from_fn(n, k - 1, |r, c| support[c + 1][r] - base[r]);
    let fvals: Vec<f64> = support
        .iter()
        .map(|p| f.eval(p).unwrap_or(f64::INFINITY))
        .collect();
    let point = |u: &DVector<f64>| -> Option<Vector> {
        let y = DVector::from_column_slice(base) + &dirs * u;
        let v = Vector::new(y.iter().copied().collect()).ok()?;
        f.in_interior(&v).then_some(v)
    };
    let gap = |u: &DVector<f64>, y: &Vector| -> f64 {
        let w0 = 1.0 - u.sum();
        w0 * fvals[0] + u.iter().zip(&fvals[1..]).map(|(a, b)| a * b).sum::<f64>()
            - f.eval(y).unwrap_or(f64::INFINITY)
    };

    let mut u = DVector::from_element(k - 1, 1.0 / k as f64);
    let mut y = point(&u)?;
    let mut value = gap(&u, &y);
    for _ in 0..100 {
        let gy = f.grad_unchecked(&y);
        let grad = DVector::from_fn(k - 1, |c, _| {
            fvals[c + 1] - fvals[0] - (0..n).map(|r| gy[r] * dirs[(r, c)]).sum::<f64>()
        });
        let scale = 1.0 + fvals.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if grad.amax() <= 1e-14 * scale {
            break;
        }
        let curv = f.second_derivative(&y).ok()?;
        let weighted = DMatrix::from_fn(n, k - 1, |r, c| curv[r] * dirs[(r, c)]);
        let hess = dirs.transpose() * weighted;
        let step = hess.cholesky()?.solve(&grad);
        let mut t = 1.0;
        loop {
            let trial = &u + &step * t;
            if let Some(yt) = point(&trial) {
                let vt = gap(&trial, &yt);
                if vt >= value - 1e-15 * scale {
                    u = trial;
                    y = yt;
                    value = vt;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-12 {
                return None;
            }
        }
        if (&step * t).amax() <= 1e-16 {
            break;
        }
    }
    let mut w = vec![1.0 - u.sum()];
    w.extend(u.iter());
    Some((y, w))
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Lexicographic `k`-subsets of `0..n`.
struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Candidate right-farthest points: the extreme points where the maximum is
/// known to sit, or a sampling of a segment.
fn farthest_candidates(set: &CompactSet, resolution: usize) -> Vec<Vector> {
    let mut pts = match set {
        CompactSet::Segment { c0, c1 } => {
            let n = resolution.max(2);
            (0..n)
                .map(|i| c0.lerp(c1, i as f64 / (n - 1) as f64))
                .collect()
        }
        _ => extreme_points(set).points,
    };
    sort_lex(&mut pts);
    pts
}

fn sort_lex(pts: &mut [Vector]) {
    pts.sort_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

/// Minimizes `x ↦ max_i D(x, q_i)`; returns the center, iteration count and last step.
fn solve_right(f: &LegendreFunction, q: &[Vector], opts: &CenterOptions) -> (Vector, usize, f64) {
    let worst = |x: &[f64]| {
        q.iter()
            .map(|p| distance_unchecked(f, x, p))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    if q.len() == 1 {
        return (q[0].clone(), 0, 0.0);
    }
    if f.dim() == 1 {
        // the minimizer lies between the extreme candidates since ∇f* is monotone
        let lo = q.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let hi = q.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        let r = ternary_min(|t| worst(&[t]), lo, hi, PARAM_TOL);
        return (Vector::from_finite(vec![r.arg]), r.iterations, r.width);
    }
    pairwise_frank_wolfe(f, q, opts.max_iter)
}

/// Frank–Wolfe iterations between attempts to finish with Newton's method.
const POLISH_EVERY: usize = 25;

/// Newton's method on the face of the simplex spanned by the current support
/// (at most `n + 1` points of largest weight). Accepted only if the result
/// satisfies the optimality conditions exactly: nonnegative weights and no
/// candidate farther than the support. Returns the dual point.
fn polish(
    f: &LegendreFunction,
    fc: &LegendreFunction,
    q: &[Vector],
    images: &[Vector],
    w: &[f64],
) -> Option<Vec<f64>> {
    let mut support: Vec<usize> = (0..w.len()).filter(|&i| w[i] > 0.0).collect();
    support.sort_by(|&i, &j| w[j].total_cmp(&w[i]).then(i.cmp(&j)));
    support.truncate(f.dim() + 1);
    let refs: Vec<&Vector> = support.iter().map(|&i| &images[i]).collect();
    let (y, ws) = equidistant_point(fc, &refs)?;
    if ws.iter().any(|&v| v < -1e-12) {
        return None;
    }
    let x = f.grad_conj_unchecked(&y);
    let r = support
        .iter()
        .map(|&i| distance_unchecked(f, &x, &q[i]))
        .fold(f64::NEG_INFINITY, f64::max);
    let worst = q
        .iter()
        .map(|p| distance_unchecked(f, &x, p))
        .fold(f64::NEG_INFINITY, f64::max);
    if worst > r + 1e-12 * (1.0 + r.abs()) {
        return None;
    }
    Some(y.into_inner())
}

/// Pairwise Frank–Wolfe on the dual weights with exact line search,
/// finished by Newton's method once the support has settled.
fn pairwise_frank_wolfe(
    f: &LegendreFunction,
    q: &[Vector],
    max_iter: usize,
) -> (Vector, usize, f64) {
    let m = q.len();
    let n = f.dim();
    let images: Vec<Vector> = q.iter().map(|p| f.grad_unchecked(p)).collect();
    let mut w = vec![1.0 / m as f64; m];
    let mut s: Vec<f64> = (0..n)
        .map(|j| images.iter().map(|p| p[j]).sum::<f64>() / m as f64)
        .collect();
    let to_primal = |s: &[f64]| f.grad_conj_unchecked(&Vector::from_finite(s.to_vec()));
    let mut x = to_primal(&s);
    let mut last_step = 0.0;
    let mut iterations = 0;
    let fc = f.conjugate();

    while iterations < max_iter {
        if iterations % POLISH_EVERY == 0 {
            if let Some(sp) = polish(f, &fc, q, &images, &w) {
                return (to_primal(&sp), iterations, last_step);
            }
        }
        let g: Vec<f64> = q.iter().map(|p| distance_unchecked(f, &x, p)).collect();
        // lowest index wins ties, candidates are sorted lexicographically
        let mut fw = 0;
        for i in 1..m {
            if g[i] > g[fw] {
                fw = i;
            }
        }
        let mut away = usize::MAX;
        for i in 0..m {
            if w[i] > 0.0 && (away == usize::MAX || g[i] < g[away]) {
                away = i;
            }
        }
        let gap = g[fw] - g[away];
        if gap <= 1e-14 * (1.0 + g[fw].abs()) || fw == away {
            break;
        }
        iterations += 1;

        let dir: Vec<f64> = (0..n).map(|j| images[fw][j] - images[away][j]).collect();
        let along = |t: f64| -> Vector {
            let st: Vec<f64> = (0..n).map(|j| s[j] + t * dir[j]).collect();
            to_primal(&st)
        };
        // derivative of the concave dual along the pair direction
        let slope = |t: f64| {
            let xt = along(t);
            distance_unchecked(f, &xt, &q[fw]) - distance_unchecked(f, &xt, &q[away])
        };
        let t_max = w[away];
        let t = if slope(t_max) >= 0.0 {
            t_max
        } else {
            let (mut lo, mut hi) = (0.0, t_max);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if slope(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-17 * t_max.max(1e-300) {
                    break;
                }
            }
            0.5 * (lo + hi)
        };
        if t == 0.0 {
            break;
        }
        w[fw] += t;
        w[away] -= t;
        if t == t_max {
            w[away] = 0.0;
        }
        for j in 0..n {
            s[j] += t * dir[j];
        }
        x = to_primal(&s);
        last_step = t;
    }
    (x, iterations, last_step)
}

fn certify(target: &Vector, farthest: &MapResult, images: &[Vector], tol: f64) -> Certificate {
    match convex_hull_membership(target, images, tol) {
        HullMembership::Inside { weights, residual } => Certificate {
            points: farthest.attainers.clone(),
            weights,
            residual,
        },
        HullMembership::Outside { margin } => Certificate {
            points: farthest.attainers.clone(),
            weights: Vec::new(),
            residual: margin,
        },
    }
}
