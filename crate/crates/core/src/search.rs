//! One-dimensional bracketing searches shared by the solvers.

/// Iteration cap for ternary searches.
pub const TERNARY_MAX_ITER: usize = 200;

/// Outcome of a bracketing search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracketed {
    pub arg: f64,
    pub value: f64,
    pub iterations: usize,
    /// Width of the final bracket.
    pub width: f64,
}

/// Ternary search for the minimum of a unimodal function on `[lo, hi]`,
/// stopping once the bracket is narrower than `tol` (absolute) or after
/// [`TERNARY_MAX_ITER`] iterations. The endpoints are also compared, so a
/// minimum at the boundary is returned exactly.
pub fn ternary_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Bracketed {
    let (mut a, mut b) = (lo, hi);
    let mut iterations = 0;
    while b - a > tol && iterations < TERNARY_MAX_ITER {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if f(m1) <= f(m2) {
            b = m2;
        } else {
            a = m1;
        }
        iterations += 1;
    }
    let mid = 0.5 * (a + b);
    let (arg, value) = [(mid, f(mid)), (lo, f(lo)), (hi, f(hi))].into_iter().fold(
        (f64::NAN, f64::INFINITY),
        |best, cand| {
            if cand.1 < best.1 {
                cand
            } else {
                best
            }
        },
    );
    Bracketed {
        arg: if arg.is_nan() { mid } else { arg },
        value,
        iterations,
        width: b - a,
    }
}

/// Ternary search for the maximum of a unimodal function on `[lo, hi]`.
pub fn ternary_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Bracketed {
    let r = ternary_min(|t| -f(t), lo, hi, tol);
    Bracketed {
        value: -r.value,
        ..r
    }
}
