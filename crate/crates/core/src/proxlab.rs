//! Moreau envelopes, proximal maps, farthest envelopes and Chebyshev points
//! of piecewise functions on the line.
//!
//! With `q = ½|·|²`:
//!
//! ```text
//! e_λ g(x) = inf_w  g(w) + (x - w)² / (2λ)        P_λ g(x) = argmin
//! φ_μ g(y) = sup_x  (y - x)² / (2μ) - g(x)        Q_μ g(y) = argmax
//! ```
//!
//! Every piece of `g` is a quadratic `α w²/2 + β w + γ` restricted to an
//! interval, so each objective is a quadratic per piece and its extrema sit
//! at the piece endpoints or at the vertex. Evaluating the true `g` at an
//! open endpoint is valid because `g` is lower semicontinuous: the value
//! there never exceeds the limit from the open side.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::{MapResult, DEFAULT_TIE_TOL};
use crate::search::{ternary_max, ternary_min};
use crate::vector::Vector;

/// Step used by [`gradient_identity_check`] for central differences.
pub const FD_STEP: f64 = 1e-5;

/// Window and resolution of the grid-sup conjugate oracle.
pub const CONJUGATE_WINDOW: (f64, f64) = (-50.0, 50.0);
pub const CONJUGATE_GRID: usize = 1_000_001;

const BRACKET_DOUBLINGS: usize = 60;

/// Shape of `g` on one piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Form {
    /// `curvature · q(w) + linear · w + constant`.
    Quadratic {
        curvature: f64,
        linear: f64,
        constant: f64,
    },
    /// Constant level.
    Constant(f64),
    /// Zero on the piece (the indicator of the piece's interval).
    Indicator,
}

impl Form {
    /// `(α, β, γ)` with value `α w²/2 + β w + γ`.
    fn coefficients(self) -> (f64, f64, f64) {
        match self {
            Form::Quadratic {
                curvature,
                linear,
                constant,
            } => (curvature, linear, constant),
            Form::Constant(level) => (0.0, 0.0, level),
            Form::Indicator => (0.0, 0.0, 0.0),
        }
    }

    fn value(self, w: f64) -> f64 {
        let (a, b, c) = self.coefficients();
        0.5 * a * w * w + b * w + c
    }
}

/// `g` restricted to an interval; infinite endpoints are always open.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
    pub form: Form,
}

impl Piece {
    pub fn closed(lo: f64, hi: f64, form: Form) -> Self {
        Self {
            lo,
            hi,
            lo_closed: lo.is_finite(),
            hi_closed: hi.is_finite(),
            form,
        }
    }

    fn contains(&self, w: f64) -> bool {
        let above = if self.lo_closed {
            w >= self.lo
        } else {
            w > self.lo
        };
        let below = if self.hi_closed {
            w <= self.hi
        } else {
            w < self.hi
        };
        above && below
    }

    fn is_unbounded(&self) -> bool {
        !self.lo.is_finite() || !self.hi.is_finite()
    }
}

/// Lower semicontinuous, proper, piecewise-quadratic function on `R`;
/// `+∞` outside the pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseFunction {
    pieces: Vec<Piece>,
}

impl PiecewiseFunction {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidFunction(
                "at least one piece is required".into(),
            ));
        }
        for (i, p) in pieces.iter().enumerate() {
            let (a, b, c) = p.form.coefficients();
            if ![a, b, c].iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidFunction(format!(
                    "piece {i} has non-finite coefficients"
                )));
            }
            if p.lo.is_nan() || p.hi.is_nan() || p.lo > p.hi {
                return Err(Error::InvalidFunction(format!("piece {i} has lo > hi")));
            }
            if (p.lo == f64::NEG_INFINITY && p.lo_closed) || (p.hi == f64::INFINITY && p.hi_closed)
            {
                return Err(Error::InvalidFunction(format!(
                    "piece {i} closes an infinite endpoint"
                )));
            }
            if p.lo == p.hi && !(p.lo_closed && p.hi_closed) {
                return Err(Error::InvalidFunction(format!("piece {i} is empty")));
            }
            if p.lo == f64::INFINITY || p.hi == f64::NEG_INFINITY {
                return Err(Error::InvalidFunction(format!("piece {i} is empty")));
            }
        }
        for (i, w) in pieces.windows(2).enumerate() {
            let (left, right) = (&w[0], &w[1]);
            if left.hi > right.lo || (left.hi == right.lo && left.hi_closed && right.lo_closed) {
                return Err(Error::InvalidFunction(format!(
                    "pieces {i} and {} overlap or are out of order",
                    i + 1
                )));
            }
        }
        let g = Self { pieces };
        g.check_lsc()?;
        Ok(g)
    }

    /// `q(w) = w²/2` on the whole line.
    pub fn quadratic() -> Self {
        Self {
            pieces: vec![Piece {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
                lo_closed: false,
                hi_closed: false,
                form: Form::Quadratic {
                    curvature: 1.0,
                    linear: 0.0,
                    constant: 0.0,
                },
            }],
        }
    }

    /// Indicator of `[a, b]`.
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![Piece::closed(a, b, Form::Indicator)])
    }

    /// `0` on `[a, (a+b)/2]`, `1` on `((a+b)/2, b]`, `+∞` elsewhere.
    pub fn step(a: f64, b: f64) -> Result<Self> {
        if a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) {
            return Err(Error::InvalidFunction(format!(
                "step needs a < b, got {a}, {b}"
            )));
        }
        let m = 0.5 * (a + b);
        Self::new(vec![
            Piece::closed(a, m, Form::Constant(0.0)),
            Piece {
                lo: m,
                hi: b,
                lo_closed: false,
                hi_closed: true,
                form: Form::Constant(1.0),
            },
        ])
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn eval(&self, w: f64) -> f64 {
        self.pieces
            .iter()
            .find(|p| p.contains(w))
            .map_or(f64::INFINITY, |p| p.form.value(w))
    }

    /// Infimum and supremum of `dom g`.
    pub fn domain_hull(&self) -> (f64, f64) {
        (self.pieces[0].lo, self.pieces[self.pieces.len() - 1].hi)
    }

    fn check_lsc(&self) -> Result<()> {
        for (i, p) in self.pieces.iter().enumerate() {
            let ends = [(p.lo, p.lo_closed), (p.hi, p.hi_closed)];
            for (e, closed) in ends {
                if closed || !e.is_finite() {
                    continue;
                }
                let limit = p.form.value(e);
                if self.eval(e) > limit + 1e-12 * (1.0 + limit.abs()) {
                    return Err(Error::InvalidFunction(format!(
                        "piece {i} is open at {e} where g jumps up; g would not be lower semicontinuous"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Prox-boundedness threshold `λ_g` and farthest threshold `μ_g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    #[serde(serialize_with = "extended_real")]
    pub lambda_g: f64,
    #[serde(serialize_with = "extended_real")]
    pub mu_g: f64,
}

/// JSON has no infinities; write them as the strings `"inf"` / `"-inf"`.
fn extended_real<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    match *v {
        f64::INFINITY => s.serialize_str("inf"),
        f64::NEG_INFINITY => s.serialize_str("-inf"),
        v => s.serialize_f64(v),
    }
}

/// Only unbounded pieces constrain the thresholds: on a bounded piece every
/// quadratic is bounded.
pub fn thresholds(g: &PiecewiseFunction) -> Thresholds {
    let mut lambda_g = f64::INFINITY;
    let mut mu_g: f64 = 0.0;
    for p in g.pieces.iter().filter(|p| p.is_unbounded()) {
        let (alpha, _, _) = p.form.coefficients();
        if alpha < 0.0 {
            lambda_g = lambda_g.min(-1.0 / alpha);
        }
        mu_g = mu_g.max(if alpha > 0.0 {
            1.0 / alpha
        } else {
            f64::INFINITY
        });
    }
    Thresholds { lambda_g, mu_g }
}

/// Candidate arguments of a per-piece quadratic objective `A w² + B w`:
/// the finite endpoints, plus the vertex when it is an extremum of the
/// wanted kind and lies inside the piece.
fn candidates(
    g: &PiecewiseFunction,
    coef: impl Fn(&Piece) -> (f64, f64),
    maximize: bool,
) -> Vec<f64> {
    let mut out = Vec::new();
    for p in &g.pieces {
        for e in [p.lo, p.hi] {
            if e.is_finite() {
                out.push(e);
            }
        }
        let (a, b) = coef(p);
        let wanted = if maximize { a < 0.0 } else { a > 0.0 };
        if wanted {
            let v = -b / (2.0 * a);
            if v >= p.lo && v <= p.hi {
                out.push(v);
            }
        }
    }
    out
}

fn best_of(points: Vec<(f64, f64)>, maximize: bool, tie_tol: f64) -> MapResult {
    let mut finite: Vec<(f64, f64)> = points.into_iter().filter(|(_, v)| v.is_finite()).collect();
    finite.sort_by(|a, b| a.0.total_cmp(&b.0));
    crate::maps::select(
        finite
            .into_iter()
            .map(|(w, v)| (Vector::from_finite(vec![w]), v)),
        maximize,
        &crate::maps::MapOptions {
            tie_tol,
            ..Default::default()
        },
    )
}

fn check_lambda(g: &PiecewiseFunction, lambda: f64) -> Result<()> {
    let t = thresholds(g);
    if lambda > 0.0 && lambda < t.lambda_g {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "λ = {lambda} must lie in (0, {})",
            t.lambda_g
        )))
    }
}

fn check_mu(g: &PiecewiseFunction, mu: f64) -> Result<()> {
    let t = thresholds(g);
    if mu > t.mu_g && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "μ = {mu} must exceed μ_g = {}",
            t.mu_g
        )))
    }
}

/// Envelope value together with the proximal points.
pub fn prox_with_value(g: &PiecewiseFunction, lambda: f64, x: f64) -> Result<MapResult> {
    check_lambda(g, lambda)?;
    let coef = |p: &Piece| {
        let (a, b, _) = p.form.coefficients();
        (0.5 * a + 0.5 / lambda, b - x / lambda)
    };
    let objective = |w: f64| g.eval(w) + (x - w) * (x - w) / (2.0 * lambda);
    let pts = candidates(g, coef, false)
        .into_iter()
        .map(|w| (w, objective(w)))
        .collect();
    Ok(best_of(pts, false, DEFAULT_TIE_TOL))
}

pub fn moreau_envelope(g: &PiecewiseFunction, lambda: f64, x: f64) -> Result<f64> {
    prox_with_value(g, lambda, x).map(|r| r.value)
}

pub fn prox(g: &PiecewiseFunction, lambda: f64, x: f64) -> Result<MapResult> {
    prox_with_value(g, lambda, x)
}

/// Farthest envelope value together with the farthest points.
pub fn farthest_map(g: &PiecewiseFunction, mu: f64, y: f64) -> Result<MapResult> {
    check_mu(g, mu)?;
    let coef = |p: &Piece| {
        let (a, b, _) = p.form.coefficients();
        (0.5 / mu - 0.5 * a, -y / mu - b)
    };
    let objective = |w: f64| (y - w) * (y - w) / (2.0 * mu) - g.eval(w);
    let pts = candidates(g, coef, true)
        .into_iter()
        .map(|w| (w, objective(w)))
        .collect();
    Ok(best_of(pts, true, DEFAULT_TIE_TOL))
}

pub fn farthest_envelope(g: &PiecewiseFunction, mu: f64, y: f64) -> Result<f64> {
    farthest_map(g, mu, y).map(|r| r.value)
}

/// The unique minimizer of `φ_μ g` and its hull certificate `p ∈ conv Q_μ g(p)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChebyshevPoint {
    pub point: f64,
    pub value: f64,
    pub farthest: Vec<f64>,
    pub weights: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

pub fn chebyshev_point(g: &PiecewiseFunction, mu: f64) -> Result<ChebyshevPoint> {
    check_mu(g, mu)?;
    let phi = |y: f64| farthest_envelope(g, mu, y).unwrap_or(f64::INFINITY);
    let (lo, hi) = match g.domain_hull() {
        (a, b) if a.is_finite() && b.is_finite() => (a, b),
        (a, b) => {
            let c = if a.is_finite() {
                a
            } else if b.is_finite() {
                b
            } else {
                0.0
            };
            let mut w = 1.0;
            let mut found = None;
            for _ in 0..BRACKET_DOUBLINGS {
                let mid = phi(c);
                if phi(c - w) >= mid && phi(c + w) >= mid {
                    found = Some((c - w, c + w));
                    break;
                }
                w *= 2.0;
            }
            found.ok_or(Error::NonConvergence {
                iterations: BRACKET_DOUBLINGS,
                residual: f64::INFINITY,
            })?
        }
    };
    let r = ternary_min(phi, lo, hi, 1e-13 * (1.0 + lo.abs().max(hi.abs())));
    let q = farthest_map(g, mu, r.arg)?;
    let farthest: Vec<f64> = q.attainers.iter().map(|v| v[0]).collect();
    let (qmin, qmax) = farthest
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let p = r.arg;
    let residual = if p < qmin {
        qmin - p
    } else if p > qmax {
        p - qmax
    } else {
        0.0
    };
    let weights = farthest
        .iter()
        .map(|&v| {
            if qmax == qmin {
                1.0 / farthest.len() as f64
            } else if v == qmin {
                ((qmax - p) / (qmax - qmin)).clamp(0.0, 1.0)
            } else if v == qmax {
                ((p - qmin) / (qmax - qmin)).clamp(0.0, 1.0)
            } else {
                0.0
            }
        })
        .collect();
    Ok(ChebyshevPoint {
        point: p,
        value: r.value,
        farthest,
        weights,
        residual,
        iterations: r.iterations,
    })
}

/// Which gradient identity to test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GradientIdentity {
    /// `∇((g + λ⁻¹q)*)(z) = P_λ g(λ z)`.
    Prox { lambda: f64 },
    /// `∇((g - μ⁻¹q)*)(z) = Q_μ g(-μ z)`.
    Farthest { mu: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub max_residual: f64,
    pub checked: usize,
    /// Samples where the map was multivalued.
    pub skipped: Vec<f64>,
}

/// `sup_w z w - h(w)` over a uniform grid, refined by a ternary search in the
/// two cells around the best grid point.
pub fn conjugate_by_grid(h: impl Fn(f64) -> f64, z: f64, window: (f64, f64), n: usize) -> f64 {
    let step = (window.1 - window.0) / (n - 1) as f64;
    let obj = |w: f64| z * w - h(w);
    let (mut best_k, mut best) = (0, f64::NEG_INFINITY);
    for k in 0..n {
        let v = obj(window.0 + k as f64 * step);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let lo = window.0 + best_k.saturating_sub(1) as f64 * step;
    let hi = window.0 + (best_k + 1).min(n - 1) as f64 * step;
    best.max(ternary_max(obj, lo, hi, 1e-15).value)
}

/// Largest discrepancy between a central difference of the numerically
/// conjugated `g ± q/τ` and the closed-form prox/farthest point, over the
/// samples where the map is single-valued.
pub fn gradient_identity_check(
    g: &PiecewiseFunction,
    identity: GradientIdentity,
    samples: &[f64],
) -> Result<IdentityReport> {
    let mut report = IdentityReport {
        max_residual: 0.0,
        checked: 0,
        skipped: Vec::new(),
    };
    for &z in samples {
        let (map, h): (MapResult, Box<dyn Fn(f64) -> f64>) = match identity {
            GradientIdentity::Prox { lambda } => (
                prox(g, lambda, lambda * z)?,
                Box::new(move |w| g.eval(w) + 0.5 * w * w / lambda),
            ),
            GradientIdentity::Farthest { mu } => (
                farthest_map(g, mu, -mu * z)?,
                Box::new(move |w| g.eval(w) - 0.5 * w * w / mu),
            ),
        };
        if !map.is_single_valued() {
            report.skipped.push(z);
            continue;
        }
        let plus = conjugate_by_grid(&h, z + FD_STEP, CONJUGATE_WINDOW, CONJUGATE_GRID);
        let minus = conjugate_by_grid(&h, z - FD_STEP, CONJUGATE_WINDOW, CONJUGATE_GRID);
        let slope = (plus - minus) / (2.0 * FD_STEP);
        report.max_residual = report.max_residual.max((slope - map.attainers[0][0]).abs());
        report.checked += 1;
    }
    Ok(report)
}

/// Scans `[lo, hi]` for a point where the map jumps and bisects each jump
/// down to a multivalued point. Returns the first verified witness.
pub fn find_multivalued(
    map: impl Fn(f64) -> Result<MapResult>,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<Option<f64>> {
    let step = (hi - lo) / (n - 1) as f64;
    let branch = |r: &MapResult| r.attainers[0][0];
    let mut prev_x = lo;
    let mut prev = map(lo)?;
    if prev.is_tie() {
        return Ok(Some(lo));
    }
    for k in 1..n {
        let x = lo + k as f64 * step;
        let cur = map(x)?;
        if cur.is_tie() {
            return Ok(Some(x));
        }
        if (branch(&cur) - branch(&prev)).abs() > 10.0 * step {
            let (mut a, mut b) = (prev_x, x);
            let left = branch(&prev);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let r = map(m)?;
                if r.is_tie() {
                    return Ok(Some(m));
                }
                if (branch(&r) - left).abs() <= 10.0 * step {
                    a = m;
                } else {
                    b = m;
                }
                if b - a <= 1e-15 * (1.0 + a.abs()) {
                    break;
                }
            }
        }
        prev_x = x;
        prev = cur;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step01() -> PiecewiseFunction {
        PiecewiseFunction::step(0.0, 1.0).unwrap()
    }

    #[test]
    fn envelope_examples() {
        let q = PiecewiseFunction::quadratic();
        let r = prox(&q, 1.0, 2.0).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        assert_eq!(r.attainers.len(), 1);
        assert!((r.attainers[0][0] - 1.0).abs() < 1e-15);

        let ind = PiecewiseFunction::indicator(0.0, 1.0).unwrap();
        let r = prox(&ind, 2.0, 3.0).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.attainers[0][0], 1.0);

        for lambda in [0.1, 1.0, 7.0] {
            let r = prox(&ind, lambda, 0.5).unwrap();
            assert_eq!(r.value, 0.0);
            assert_eq!(r.attainers[0][0], 0.5);
        }
    }

    #[test]
    fn farthest_examples() {
        let q = PiecewiseFunction::quadratic();
        assert!((farthest_envelope(&q, 2.0, 1.0).unwrap() - 0.5).abs() < 1e-15);

        let ind = PiecewiseFunction::indicator(0.0, 1.0).unwrap();
        let r = farthest_map(&ind, 1.0, 0.2).unwrap();
        assert!((r.value - 0.32).abs() < 1e-15);
        assert_eq!(r.attainers.len(), 1);
        assert_eq!(r.attainers[0][0], 1.0);

        let r = farthest_map(&ind, 1.0, 0.5).unwrap();
        assert_eq!(r.attainers.len(), 2);
    }

    #[test]
    fn threshold_examples() {
        let t = thresholds(&PiecewiseFunction::quadratic());
        assert_eq!(
            t,
            Thresholds {
                lambda_g: f64::INFINITY,
                mu_g: 1.0
            }
        );
        let t = thresholds(&PiecewiseFunction::indicator(-2.0, 3.0).unwrap());
        assert_eq!(
            t,
            Thresholds {
                lambda_g: f64::INFINITY,
                mu_g: 0.0
            }
        );
        assert_eq!(thresholds(&step01()).mu_g, 0.0);

        let concave = PiecewiseFunction::new(vec![Piece {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            lo_closed: false,
            hi_closed: false,
            form: Form::Quadratic {
                curvature: -0.5,
                linear: 0.0,
                constant: 0.0,
            },
        }])
        .unwrap();
        let t = thresholds(&concave);
        assert_eq!(t.lambda_g, 2.0);
        assert_eq!(t.mu_g, f64::INFINITY);
    }

    #[test]
    fn parameters_outside_thresholds_are_rejected() {
        let q = PiecewiseFunction::quadratic();
        assert!(farthest_envelope(&q, 1.0, 0.0).is_err());
        assert!(farthest_envelope(&q, 0.5, 0.0).is_err());
        assert!(moreau_envelope(&q, 0.0, 0.0).is_err());
        assert!(moreau_envelope(&q, -1.0, 0.0).is_err());
        assert!(chebyshev_point(&PiecewiseFunction::indicator(0.0, 1.0).unwrap(), 0.0).is_err());
    }

    #[test]
    fn chebyshev_point_examples() {
        let p = chebyshev_point(&PiecewiseFunction::quadratic(), 2.0).unwrap();
        assert!(p.point.abs() < 1e-10);
        assert!(p.residual <= 1e-8);

        let p = chebyshev_point(&PiecewiseFunction::indicator(0.0, 1.0).unwrap(), 1.0).unwrap();
        assert!((p.point - 0.5).abs() < 1e-10);
        assert_eq!(p.farthest.len(), 2);

        let p = chebyshev_point(&step01(), 1.0).unwrap();
        assert!((p.point - 0.25).abs() < 1e-10, "{p:?}");
        assert!(p.residual <= 1e-8);

        let p = chebyshev_point(&step01(), 0.1).unwrap();
        assert!((p.point - 0.4).abs() < 1e-10, "{p:?}");
        assert!(p.residual <= 1e-8);
    }

    #[test]
    fn step_function_is_open_on_the_right_half() {
        let g = step01();
        assert_eq!(g.eval(0.5), 0.0);
        assert_eq!(g.eval(0.5 + 1e-12), 1.0);
        assert_eq!(g.eval(1.0), 1.0);
        assert_eq!(g.eval(1.0 + 1e-12), f64::INFINITY);
    }

    #[test]
    fn non_lsc_functions_are_rejected() {
        // open indicator of (0, 1)
        let open = PiecewiseFunction::new(vec![Piece {
            lo: 0.0,
            hi: 1.0,
            lo_closed: false,
            hi_closed: true,
            form: Form::Indicator,
        }]);
        assert!(open.is_err());
        // step with the jump on the wrong side
        let bad = PiecewiseFunction::new(vec![
            Piece {
                lo: 0.0,
                hi: 0.5,
                lo_closed: true,
                hi_closed: false,
                form: Form::Constant(0.0),
            },
            Piece::closed(0.5, 1.0, Form::Constant(1.0)),
        ]);
        assert!(bad.is_err());
        assert!(PiecewiseFunction::new(vec![]).is_err());
    }

    #[test]
    fn overlapping_pieces_are_rejected() {
        let r = PiecewiseFunction::new(vec![
            Piece::closed(0.0, 1.0, Form::Indicator),
            Piece::closed(1.0, 2.0, Form::Indicator),
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn gradient_identities_on_quadratic() {
        let q = PiecewiseFunction::quadratic();
        let samples: Vec<f64> = (0..20).map(|i| -9.5 + i as f64).collect();
        let r =
            gradient_identity_check(&q, GradientIdentity::Prox { lambda: 1.0 }, &samples).unwrap();
        assert_eq!(r.checked, 20);
        assert!(r.max_residual <= 1e-4, "{r:?}");
    }

    #[test]
    fn multivalued_prox_of_step() {
        let g = step01();
        let lambda = 0.02;
        let w = find_multivalued(|x| prox(&g, lambda, x), -1.0, 2.0, 301)
            .unwrap()
            .unwrap();
        // tie between 0.5 and x itself: (x - 0.5)² / (2λ) = 1
        assert!((w - (0.5 + (2.0 * lambda).sqrt())).abs() < 1e-9, "{w}");
        assert!(prox(&g, lambda, w).unwrap().is_tie());
    }

    #[test]
    fn convex_prox_has_no_multivalued_point() {
        let q = PiecewiseFunction::quadratic();
        assert_eq!(
            find_multivalued(|x| prox(&q, 1.0, x), -5.0, 5.0, 1001).unwrap(),
            None
        );
    }
}
