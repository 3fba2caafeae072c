//! Acceptance criteria for `bregman-core`.
//!
//! Each criterion is a function returning an [`Outcome`]: whether it
//! passed, the worst discrepancy observed, the tolerance it was held to and
//! a one-line description. Random instances come from a fixed-seed ChaCha
//! generator, so every run checks the same cases.

pub mod oracles;

use std::time::Instant;

use bregman_core::centers::{self, left_center, right_center};
use bregman_core::maps::{self, left_farthest, right_farthest, MapKind, MapOptions};
use bregman_core::probes::{self, GridSpec};
use bregman_core::proxlab::{self, GradientIdentity, PiecewiseFunction};
use bregman_core::sets::{convex_hull_membership, HullMembership};
use bregman_core::{
    distance_dual_identity_check, vector, CompactSet, Kernel, LegendreFunction, Vector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

const SEED: u64 = 0x0062_7265_676d_616e;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Outcome {
    fn new(id: u8, name: &'static str, worst: f64, tolerance: f64, detail: String) -> Self {
        Self {
            id,
            name,
            passed: worst <= tolerance,
            worst,
            tolerance,
            detail,
        }
    }

    fn failed(id: u8, name: &'static str, tolerance: f64, detail: String) -> Self {
        Self {
            id,
            name,
            passed: false,
            worst: f64::INFINITY,
            tolerance,
            detail,
        }
    }

    /// `criterion N PASS|FAIL name: worst=… tol=… detail`.
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {} {}: worst={:.3e} tol={:.0e} {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.worst,
            self.tolerance,
            self.detail
        )
    }
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

/// A uniformly drawn point of a box well inside the kernel's interior.
fn draw(k: Kernel, r: &mut ChaCha8Rng) -> f64 {
    match k {
        Kernel::HalvedEnergy | Kernel::Exponential => r.gen_range(-4.0..4.0),
        Kernel::NegativeEntropy | Kernel::NegativeLog => r.gen_range(0.05..6.0),
        Kernel::ConjugateNegativeLog => r.gen_range(-6.0..-0.05),
    }
}

fn draw_vec(k: Kernel, dim: usize, r: &mut ChaCha8Rng) -> Vector {
    Vector::new((0..dim).map(|_| draw(k, r)).collect()).expect("finite draw")
}

/// Runs a fallible criterion body, turning library errors into failures.
fn guarded(
    id: u8,
    name: &'static str,
    tolerance: f64,
    body: impl FnOnce() -> bregman_core::Result<Outcome>,
) -> Outcome {
    body().unwrap_or_else(|e| Outcome::failed(id, name, tolerance, format!("error: {e}")))
}

/// Gradient round trip and Fenchel–Young equality on 1000 random points per
/// catalog member.
pub fn legendre_duality() -> Outcome {
    const TOL: f64 = 1e-10;
    guarded(1, "legendre duality", TOL, || {
        let mut r = rng(1);
        let mut worst: f64 = 0.0;
        for k in Kernel::ALL {
            let f = LegendreFunction::uniform(k, 3)?;
            for _ in 0..1000 {
                let x = draw_vec(k, 3, &mut r);
                let g = f.grad(&x)?;
                worst = worst.max(f.grad_conj(&g)?.dist_inf(&x));
                let fy = f.eval(&x)? + f.eval_conj(&g)? - x.dot(&g);
                worst = worst.max(fy.abs());
            }
        }
        Ok(Outcome::new(
            1,
            "legendre duality",
            worst,
            TOL,
            "5 members x 1000 points".into(),
        ))
    })
}

/// `D_f(x, y) = D_{f*}(∇f(y), ∇f(x))` on 1000 random pairs per member.
pub fn distance_dual_identity() -> Outcome {
    const TOL: f64 = 1e-10;
    guarded(2, "distance dual identity", TOL, || {
        let mut r = rng(2);
        let mut worst: f64 = 0.0;
        for k in Kernel::ALL {
            let f = LegendreFunction::uniform(k, 3)?;
            for _ in 0..1000 {
                let x = draw_vec(k, 3, &mut r);
                let y = draw_vec(k, 3, &mut r);
                worst = worst.max(distance_dual_identity_check(&f, &x, &y)?);
            }
        }
        Ok(Outcome::new(
            2,
            "distance dual identity",
            worst,
            TOL,
            "5 members x 1000 pairs".into(),
        ))
    })
}

/// Numerical interval centers against the equidistance formulas, plus the
/// named closed forms of the three catalog functions.
pub fn interval_centers() -> Outcome {
    const TOL: f64 = 1e-6;
    guarded(3, "interval centers", TOL, || {
        let mut r = rng(3);
        let mut worst: f64 = 0.0;
        let mut compared = 0;
        for k in Kernel::ALL {
            let f = LegendreFunction::uniform(k, 1)?;
            for _ in 0..100 {
                let a = draw(k, &mut r);
                let b = loop {
                    let b = draw(k, &mut r);
                    if (b - a).abs() >= 1e-2 {
                        break b;
                    }
                };
                let (a, b) = (a.min(b), a.max(b));
                let set = CompactSet::interval(a, b)?;
                let x = right_center(&f, &set)?.center[0];
                let y = left_center(&f, &set)?.center[0];
                let (xo, yo) = oracles::interval_centers(k, a, b);
                worst = worst.max((x - xo).abs()).max((y - yo).abs());
                if let Some((xn, yn)) = oracles::named_interval_centers(k, a, b) {
                    worst = worst.max((x - xn).abs()).max((y - yn).abs());
                }
                compared += 1;
            }
        }
        Ok(Outcome::new(
            3,
            "interval centers",
            worst,
            TOL,
            format!("{compared} random intervals, named forms for energy/entropy/neglog"),
        ))
    })
}

fn segment_rule(y: &Vector, c0: &Vector, c1: &Vector) -> Vec<Vector> {
    if y[1] < y[0] {
        vec![c0.clone()]
    } else if y[1] > y[0] {
        vec![c1.clone()]
    } else {
        vec![c0.clone(), c1.clone()]
    }
}

fn same_points(a: &[Vector], b: &[Vector]) -> bool {
    a.len() == b.len() && a.iter().all(|p| b.iter().any(|q| p.dist_inf(q) <= 1e-9))
}

/// Left center of the anti-diagonal segment is its midpoint, and the
/// farthest maps follow the sign of `y₂ - y₁`.
pub fn segment_midpoint() -> Outcome {
    const TOL: f64 = 1e-5;
    guarded(4, "segment midpoint", TOL, || {
        let mut r = rng(4);
        let mut worst: f64 = 0.0;
        let mut mismatches = 0;
        let mut checked = 0;
        for a in [2.0, 5.0, 10.0] {
            let c0 = vector![1.0, a];
            let c1 = vector![a, 1.0];
            let set = CompactSet::segment(c0.clone(), c1.clone())?;
            let mid = vector![(1.0 + a) / 2.0, (1.0 + a) / 2.0];
            for k in [
                Kernel::HalvedEnergy,
                Kernel::NegativeEntropy,
                Kernel::NegativeLog,
            ] {
                let f = LegendreFunction::uniform(k, 2)?;
                worst = worst.max(left_center(&f, &set)?.center.dist_inf(&mid));
                for _ in 0..100 {
                    let y =
                        Vector::new(vec![r.gen_range(0.5..a + 1.0), r.gen_range(0.5..a + 1.0)])?;
                    let expected = segment_rule(&y, &c0, &c1);
                    let mut got = vec![left_farthest(&f, &set, &y)?.attainers];
                    // D(x, ·) is convex for energy and entropy, so the right map obeys the same rule
                    if k != Kernel::NegativeLog {
                        got.push(right_farthest(&f, &set, &y)?.attainers);
                    }
                    for g in got {
                        checked += 1;
                        if !same_points(&g, &expected) {
                            mismatches += 1;
                        }
                    }
                }
            }
        }
        let mut o = Outcome::new(
            4,
            "segment midpoint",
            worst,
            TOL,
            format!("{mismatches}/{checked} farthest-map rule mismatches"),
        );
        o.passed &= mismatches == 0;
        Ok(o)
    })
}

fn certificate_instances() -> bregman_core::Result<Vec<(LegendreFunction, CompactSet)>> {
    let mut r = rng(5);
    let mut out = Vec::new();
    for k in Kernel::ALL {
        let f1 = LegendreFunction::uniform(k, 1)?;
        let f2 = LegendreFunction::uniform(k, 2)?;
        for _ in 0..4 {
            let (a, b) = (draw(k, &mut r), draw(k, &mut r));
            out.push((f1.clone(), CompactSet::interval(a.min(b) - 0.01, a.max(b))?));
            let pts = (0..5).map(|_| draw_vec(k, 2, &mut r)).collect();
            out.push((f2.clone(), CompactSet::finite(pts)?));
            let (p, q) = (draw_vec(k, 2, &mut r), draw_vec(k, 2, &mut r));
            let lo = Vector::new(
                p.iter()
                    .zip(q.iter())
                    .map(|(x, y)| x.min(*y) - 0.01)
                    .collect(),
            )?;
            let hi = Vector::new(p.iter().zip(q.iter()).map(|(x, y)| x.max(*y)).collect())?;
            out.push((f2.clone(), CompactSet::boxed(lo, hi)?));
            out.push((f2.clone(), CompactSet::segment(p, q)?));
        }
    }
    Ok(out)
}

/// Every computed center lies in the convex hull of its farthest points
/// (left), resp. its gradient lies in the hull of the farthest points'
/// gradients (right), recomputed from scratch at the returned center.
pub fn center_certificates() -> Outcome {
    const TOL: f64 = 1e-6;
    guarded(5, "center certificates", TOL, || {
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for (f, set) in certificate_instances()? {
            let l = left_center(&f, &set)?;
            let far = left_farthest(&f, &set, &l.center)?;
            worst = worst.max(hull_residual(&l.center, &far.attainers));

            let rc = right_center(&f, &set)?;
            let far = right_farthest(&f, &set, &rc.center)?;
            let images: Vec<Vector> = far
                .attainers
                .iter()
                .map(|q| f.grad(q))
                .collect::<Result<_, _>>()?;
            worst = worst.max(hull_residual(&f.grad(&rc.center)?, &images));
            count += 2;
        }
        Ok(Outcome::new(
            5,
            "center certificates",
            worst,
            TOL,
            format!("{count} centers"),
        ))
    })
}

fn hull_residual(y: &Vector, points: &[Vector]) -> f64 {
    match convex_hull_membership(y, points, f64::INFINITY) {
        HullMembership::Inside { residual, .. } => residual,
        HullMembership::Outside { margin } => margin,
    }
}

/// Left radius of `C` under `f` equals the right radius of `∇f(C)` under
/// `f*`, on 50 random finite sets, intervals and boxes per member.
pub fn radius_duality() -> Outcome {
    const TOL: f64 = 1e-7;
    guarded(6, "radius duality", TOL, || {
        let mut r = rng(6);
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for k in Kernel::ALL {
            let f1 = LegendreFunction::uniform(k, 1)?;
            let f2 = LegendreFunction::uniform(k, 2)?;
            for i in 0..50 {
                let (f, set) = match i % 3 {
                    0 => {
                        let m = r.gen_range(2..=6);
                        (
                            &f2,
                            CompactSet::finite((0..m).map(|_| draw_vec(k, 2, &mut r)).collect())?,
                        )
                    }
                    1 => {
                        let (a, b) = (draw(k, &mut r), draw(k, &mut r));
                        (&f1, CompactSet::interval(a.min(b), a.max(b))?)
                    }
                    _ => {
                        let (p, q) = (draw_vec(k, 2, &mut r), draw_vec(k, 2, &mut r));
                        let lo =
                            Vector::new(p.iter().zip(q.iter()).map(|(x, y)| x.min(*y)).collect())?;
                        let hi =
                            Vector::new(p.iter().zip(q.iter()).map(|(x, y)| x.max(*y)).collect())?;
                        (&f2, CompactSet::boxed(lo, hi)?)
                    }
                };
                worst = worst.max(centers::radius_duality_check(f, &set)?);
                count += 1;
            }
        }
        Ok(Outcome::new(
            6,
            "radius duality",
            worst,
            TOL,
            format!("{count} instances"),
        ))
    })
}

/// Brute-force `inf`/`sup` over the 100 001-point grid on `[-10, 10]`.
fn brute_envelope(g: &PiecewiseFunction, lambda: f64, x: f64) -> f64 {
    oracles::line_grid(-10.0, 10.0, 100_001)
        .map(|w| g.eval(w) + (x - w) * (x - w) / (2.0 * lambda))
        .fold(f64::INFINITY, f64::min)
}

fn brute_phi(g: &PiecewiseFunction, mu: f64, y: f64) -> f64 {
    oracles::line_grid(-10.0, 10.0, 100_001)
        .map(|w| (y - w) * (y - w) / (2.0 * mu) - g.eval(w))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Chebyshev points of the worked examples and envelope values against
/// brute force.
pub fn prox_lab_closed_forms() -> Outcome {
    const TOL: f64 = 1e-6;
    guarded(7, "prox lab closed forms", TOL, || {
        let q = PiecewiseFunction::quadratic();
        let step = PiecewiseFunction::step(0.0, 1.0)?;
        let mut worst: f64 = proxlab::chebyshev_point(&q, 2.0)?.point.abs();
        for (a, b) in [(0.0, 1.0), (-2.0, 3.0), (1.5, 1.75)] {
            let ind = PiecewiseFunction::indicator(a, b)?;
            for mu in [0.5, 1.0, 4.0] {
                let p = proxlab::chebyshev_point(&ind, mu)?.point;
                worst = worst.max((p - 0.5 * (a + b)).abs());
            }
        }
        for (mu, expected) in [(1.0, 0.25), (0.1, 0.4)] {
            worst = worst.max((proxlab::chebyshev_point(&step, mu)?.point - expected).abs());
        }
        let closed = worst;

        let ind = PiecewiseFunction::indicator(0.0, 1.0)?;
        let cases: [(&PiecewiseFunction, f64, f64); 3] =
            [(&q, 1.0, 2.0), (&ind, 2.0, 1.0), (&step, 0.3, 0.5)];
        let mut samples = 0;
        for (g, lambda, mu) in cases {
            for x in oracles::line_grid(-5.0, 5.0, 21) {
                let e = proxlab::moreau_envelope(g, lambda, x)?;
                let phi = proxlab::farthest_envelope(g, mu, x)?;
                worst = worst
                    .max((e - brute_envelope(g, lambda, x)).abs())
                    .max((phi - brute_phi(g, mu, x)).abs());
                samples += 2;
            }
        }
        Ok(Outcome::new(
            7,
            "prox lab closed forms",
            worst,
            TOL,
            format!("closed forms within {closed:.1e}; {samples} envelope values vs brute force"),
        ))
    })
}

/// Finite-difference gradients of the numerically conjugated
/// regularizations against the prox and farthest maps.
pub fn gradient_identities() -> Outcome {
    const TOL: f64 = 1e-4;
    guarded(8, "gradient identities", TOL, || {
        let q = PiecewiseFunction::quadratic();
        let ind = PiecewiseFunction::indicator(0.0, 1.0)?;
        // 20 samples in [-4.75, 4.75], none where -z = 0.5
        let samples: Vec<f64> = (0..20).map(|i| -4.75 + 0.5 * i as f64).collect();
        let cases = [
            ("prox q, λ=1", &q, GradientIdentity::Prox { lambda: 1.0 }),
            (
                "farthest ι[0,1], μ=1",
                &ind,
                GradientIdentity::Farthest { mu: 1.0 },
            ),
            (
                "farthest q, μ=2",
                &q,
                GradientIdentity::Farthest { mu: 2.0 },
            ),
        ];
        let mut worst: f64 = 0.0;
        let mut short = Vec::new();
        for (name, g, id) in cases {
            let rep = proxlab::gradient_identity_check(g, id, &samples)?;
            worst = worst.max(rep.max_residual);
            if rep.checked < 20 {
                short.push(format!("{name}: {} checked", rep.checked));
            }
        }
        let mut o = Outcome::new(
            8,
            "gradient identities",
            worst,
            TOL,
            if short.is_empty() {
                "3 identities x 20 single-valued points".into()
            } else {
                short.join("; ")
            },
        );
        o.passed &= short.is_empty();
        Ok(o)
    })
}

fn witnesses_reverify(rep: &probes::ProbeReport) -> bool {
    rep.witnesses.iter().all(|w| {
        w.attainers.len() >= 2 && {
            let hi = w
                .distances
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            let lo = w.distances.iter().copied().fold(f64::INFINITY, f64::min);
            hi - lo <= rep.tie_tol
        }
    })
}

/// Klee contrapositive, curve consistency and tie-fraction decay.
pub fn probe_suite() -> Outcome {
    const TOL: f64 = 60.0;
    guarded(9, "probe suite", TOL, || {
        let start = Instant::now();
        let opts = MapOptions::default();
        let mut problems = Vec::new();

        let klee_sets: Vec<(LegendreFunction, CompactSet, GridSpec)> = vec![
            (
                LegendreFunction::energy(1)?,
                CompactSet::finite(vec![vector![0], vector![2]])?,
                GridSpec::cube(-1.0, 3.0, 41, 1)?,
            ),
            (
                LegendreFunction::entropy(2)?,
                CompactSet::segment(vector![1, 3], vector![3, 1])?,
                GridSpec::cube(0.5, 4.0, 15, 2)?,
            ),
            (
                LegendreFunction::neglog(1)?,
                CompactSet::interval(1.0, 2.0)?,
                GridSpec::cube(0.5, 3.0, 51, 1)?,
            ),
            (
                LegendreFunction::entropy(2)?,
                CompactSet::finite(vec![vector![1, 1], vector![4, 1.5], vector![2, 5]])?,
                GridSpec::cube(0.5, 6.0, 30, 2)?,
            ),
            (
                LegendreFunction::neglog(2)?,
                CompactSet::boxed(vector![1, 1], vector![2, 3])?,
                GridSpec::cube(0.5, 4.0, 15, 2)?,
            ),
        ];
        for (i, (f, set, grid)) in klee_sets.iter().enumerate() {
            let rep = probes::klee_probe(f, set, grid, &opts)?;
            if rep.witnesses.is_empty() {
                problems.push(format!("klee set {i}: no witness"));
            } else if !witnesses_reverify(&rep) {
                problems.push(format!("klee set {i}: witness fails re-verification"));
            }
        }

        let grid = GridSpec::cube(0.5, 8.0, 100, 2)?;
        let curve = probes::curious_set_probe(1.0, 10_000, &grid, opts.tie_tol)?;
        if curve.robust_ties != 0 {
            problems.push(format!("curve: {} robust ties", curve.robust_ties));
        }
        if curve.witness_distance.is_none_or(|d| d <= 0.1) {
            problems.push("curve: no nonconvexity witness".into());
        }

        let f = LegendreFunction::entropy(2)?;
        let set = CompactSet::finite(vec![vector![1, 1], vector![4, 1.5], vector![2, 5]])?;
        let grid = GridSpec::cube(0.5, 6.0, 100, 2)?;
        let decay = probes::tie_fraction_decay(&f, &set, &grid, &[1e-3, 1e-6, 1e-9])?;
        if !probes::is_non_increasing(&decay) {
            problems.push("tie fractions increase as the tolerance shrinks".into());
        }
        let finest = decay
            .last()
            .map(|r| r.maps.iter().map(|m| m.tie_fraction()).fold(0.0, f64::max))
            .unwrap_or(0.0);
        if finest > 1e-2 {
            problems.push(format!("tie fraction {finest} at 1e-9"));
        }

        let elapsed = start.elapsed().as_secs_f64();
        let mut o = Outcome::new(
            9,
            "probe suite",
            elapsed,
            TOL,
            if problems.is_empty() {
                format!(
                    "seconds; 5 Klee witnesses, 0 robust curve ties, curve gap {:.3}, finest tie fraction {finest:.1e}",
                    curve.witness_distance.unwrap_or(f64::NAN)
                )
            } else {
                problems.join("; ")
            },
        );
        o.passed &= problems.is_empty();
        Ok(o)
    })
}

/// All four maps against exhaustive search over a 2001-point
/// discretization of intervals and segments.
pub fn oracle_equivalence() -> Outcome {
    const TOL: f64 = 1e-6;
    guarded(10, "oracle equivalence", TOL, || {
        let mut r = rng(10);
        let kernels = [
            Kernel::HalvedEnergy,
            Kernel::NegativeEntropy,
            Kernel::NegativeLog,
        ];
        let mut worst: f64 = 0.0;
        for i in 0..50 {
            let k = kernels[i % 3];
            let dim = 1 + (i / 3) % 2;
            let f = LegendreFunction::uniform(k, dim)?;
            let c0 = Vector::new((0..dim).map(|_| r.gen_range(0.5..2.5)).collect())?;
            let c1 = Vector::new(c0.iter().map(|&c| c + r.gen_range(-0.5..0.5)).collect())?;
            let z = Vector::new((0..dim).map(|_| r.gen_range(0.5..3.0)).collect())?;
            let set = if dim == 1 {
                CompactSet::interval(c0[0].min(c1[0]), c0[0].max(c1[0]))?
            } else {
                CompactSet::segment(c0.clone(), c1.clone())?
            };
            let points = oracles::discretize(&c0, &c1, 2001);
            for kind in MapKind::ALL {
                let lib = maps::evaluate(kind, &f, &set, &z, &MapOptions::default())?.value;
                let left = matches!(kind, MapKind::LeftNearest | MapKind::LeftFarthest);
                let brute = oracles::exhaustive(&f, &points, &z, left, kind.is_farthest());
                worst = worst.max((lib - brute).abs());
            }
        }
        Ok(Outcome::new(
            10,
            "oracle equivalence",
            worst,
            TOL,
            "50 instances x 4 maps".into(),
        ))
    })
}

/// Every criterion, in order.
pub fn run_all() -> Vec<Outcome> {
    vec![
        legendre_duality(),
        distance_dual_identity(),
        interval_centers(),
        segment_midpoint(),
        center_certificates(),
        radius_duality(),
        prox_lab_closed_forms(),
        gradient_identities(),
        probe_suite(),
        oracle_equivalence(),
    ]
}
