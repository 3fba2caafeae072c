//! Bregman distance `D_f(x, y) = f(x) - f(y) - ⟨∇f(y), x - y⟩`.
//!
//! Outside `dom f × int dom f` the distance is `+∞`; that is a value, not an
//! error. Only a dimension mismatch fails.

use crate::error::Result;
use crate::legendre::LegendreFunction;
use crate::vector::Vector;

pub fn distance(f: &LegendreFunction, x: &Vector, y: &Vector) -> Result<f64> {
    x.check_dim(f.dim())?;
    y.check_dim(f.dim())?;
    Ok(distance_unchecked(f, x, y))
}

/// Distance for vectors already known to match `f`'s dimension.
pub(crate) fn distance_unchecked(f: &LegendreFunction, x: &[f64], y: &[f64]) -> f64 {
    f.kernels()
        .iter()
        .zip(x.iter().zip(y))
        .map(|(k, (&a, &b))| k.distance(a, b))
        .sum()
}

/// `|D_f(x, y) - D_{f*}(∇f(y), ∇f(x))|`.
pub fn distance_dual_identity_check(f: &LegendreFunction, x: &Vector, y: &Vector) -> Result<f64> {
    let xs = f.grad(x)?;
    let ys = f.grad(y)?;
    let primal = distance(f, x, y)?;
    let dual = distance(&f.conjugate(), &ys, &xs)?;
    Ok((primal - dual).abs())
}
