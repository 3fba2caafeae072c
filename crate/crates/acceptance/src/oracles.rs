//! Reference computations that do not go through the library's solvers.
//!
//! Distances are evaluated straight from the definition
//! `f(x) - f(y) - f'(y)(x - y)` summed over coordinates, and maps by
//! exhaustive search over a uniform discretization.

use bregman_core::{Kernel, LegendreFunction, Vector};

/// `D(x, y)` from the definition, coordinate by coordinate.
pub fn definitional_distance(f: &LegendreFunction, x: &[f64], y: &[f64]) -> f64 {
    f.kernels()
        .iter()
        .zip(x.iter().zip(y))
        .map(|(k, (&a, &b))| k.value(a) - k.value(b) - k.grad(b) * (a - b))
        .sum()
}

/// `(right center, left center)` of `[a, b]` from the equidistance
/// conditions `D(x, a) = D(x, b)` and `D(a, y) = D(b, y)`, solved by hand.
pub fn interval_centers(k: Kernel, a: f64, b: f64) -> (f64, f64) {
    let (ga, gb) = (k.grad(a), k.grad(b));
    let x = (k.value(a) - ga * a - k.value(b) + gb * b) / (gb - ga);
    let slope = (k.value(b) - k.value(a)) / (b - a);
    let y = match k {
        Kernel::HalvedEnergy => slope,
        Kernel::NegativeEntropy => slope.exp(),
        Kernel::NegativeLog | Kernel::ConjugateNegativeLog => -1.0 / slope,
        Kernel::Exponential => slope.ln(),
    };
    (x, y)
}

/// Named closed forms of the three catalog functions on `[a, b]`,
/// as `(right center, left center)`.
pub fn named_interval_centers(k: Kernel, a: f64, b: f64) -> Option<(f64, f64)> {
    let (la, lb) = (a.ln(), b.ln());
    match k {
        Kernel::HalvedEnergy => Some((0.5 * (a + b), 0.5 * (a + b))),
        Kernel::NegativeEntropy => Some((
            (b - a) / (lb - la),
            ((b * lb - b - a * la + a) / (b - a)).exp(),
        )),
        Kernel::NegativeLog => Some((a * b * (lb - la) / (b - a), (b - a) / (lb - la))),
        _ => None,
    }
}

/// `n` equally spaced points from `c0` to `c1`.
pub fn discretize(c0: &Vector, c1: &Vector, n: usize) -> Vec<Vector> {
    (0..n)
        .map(|i| c0.lerp(c1, i as f64 / (n - 1) as f64))
        .collect()
}

/// Best value of `D(c, z)` (left) or `D(z, c)` (right) over `points`.
pub fn exhaustive(
    f: &LegendreFunction,
    points: &[Vector],
    z: &Vector,
    left: bool,
    farthest: bool,
) -> f64 {
    let values = points.iter().map(|c| {
        if left {
            definitional_distance(f, c, z)
        } else {
            definitional_distance(f, z, c)
        }
    });
    if farthest {
        values.fold(f64::NEG_INFINITY, f64::max)
    } else {
        values.fold(f64::INFINITY, f64::min)
    }
}

/// Uniform grid of `n` points on `[lo, hi]`, computed so that points with a
/// short binary expansion relative to the grid land exactly.
pub fn line_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_solved_centers_agree_with_named_forms() {
        for k in [
            Kernel::HalvedEnergy,
            Kernel::NegativeEntropy,
            Kernel::NegativeLog,
        ] {
            let (x, y) = interval_centers(k, 1.5, 4.0);
            let (xn, yn) = named_interval_centers(k, 1.5, 4.0).unwrap();
            assert!((x - xn).abs() < 1e-12, "{k}: {x} vs {xn}");
            assert!((y - yn).abs() < 1e-12, "{k}: {y} vs {yn}");
        }
    }

    #[test]
    fn definitional_distance_of_neglog() {
        let f = LegendreFunction::neglog(1).unwrap();
        let d = definitional_distance(&f, &[1.0], &[2.0]);
        assert!((d - (0.5 - 1.0 + std::f64::consts::LN_2)).abs() < 1e-15);
    }
}
