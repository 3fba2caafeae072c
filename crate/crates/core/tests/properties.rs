//! Randomized invariants of the core library.

use bregman_core::centers::{left_center, right_center};
use bregman_core::maps::{left_farthest, left_nearest, right_farthest, right_nearest};
use bregman_core::proxlab::{self, PiecewiseFunction};
use bregman_core::{distance, CompactSet, Kernel, LegendreFunction, Vector};
use proptest::prelude::*;

/// A point well inside the interior of the kernel's domain, from a unit draw.
fn interior_point(kernel: Kernel, u: f64) -> f64 {
    match kernel {
        Kernel::HalvedEnergy | Kernel::Exponential => -4.0 + 8.0 * u,
        Kernel::NegativeEntropy | Kernel::NegativeLog => 0.05 + 6.0 * u,
        Kernel::ConjugateNegativeLog => -6.0 + 5.95 * u,
    }
}

fn kernel() -> impl Strategy<Value = Kernel> {
    prop::sample::select(Kernel::ALL.to_vec())
}

fn point(kernel: Kernel, units: &[f64]) -> Vector {
    Vector::new(units.iter().map(|&u| interior_point(kernel, u)).collect()).unwrap()
}

proptest! {
    #[test]
    fn gradient_round_trip_and_fenchel_young(k in kernel(), u in prop::collection::vec(0.0..1.0f64, 1..5)) {
        let f = LegendreFunction::uniform(k, u.len()).unwrap();
        let x = point(k, &u);
        let g = f.grad(&x).unwrap();
        let back = f.grad_conj(&g).unwrap();
        prop_assert!(back.dist_inf(&x) <= 1e-10 * (1.0 + x.dist_inf(&back.clone())));
        let fy = f.eval(&x).unwrap() + f.eval_conj(&g).unwrap() - x.dot(&g);
        prop_assert!(fy.abs() <= 1e-10 * (1.0 + x.dot(&g).abs()));
    }

    #[test]
    fn gradient_matches_central_difference(k in kernel(), u in 0.05..0.95f64) {
        let t = interior_point(k, u);
        let h = 1e-6 * (1.0 + t.abs());
        let fd = (k.value(t + h) - k.value(t - h)) / (2.0 * h);
        prop_assert!((fd - k.grad(t)).abs() <= 1e-6 * (1.0 + k.grad(t).abs()));
        let fd2 = (k.grad(t + h) - k.grad(t - h)) / (2.0 * h);
        prop_assert!((fd2 - k.second(t)).abs() <= 1e-5 * (1.0 + k.second(t).abs()));
    }

    #[test]
    fn conjugate_matches_grid_supremum(k in kernel(), u in 0.1..0.9f64) {
        // pick the dual point as a gradient so the supremum sits inside the window
        let t = interior_point(k, u);
        let s = k.grad(t);
        let conj = k.conjugate().value(s);
        let (lo, hi) = match k {
            Kernel::HalvedEnergy | Kernel::Exponential => (-10.0, 10.0),
            Kernel::NegativeEntropy | Kernel::NegativeLog => (1e-3, 10.0),
            Kernel::ConjugateNegativeLog => (-10.0, -1e-3),
        };
        let sup = proxlab::conjugate_by_grid(|w| k.value(w), s, (lo, hi), 20_001);
        prop_assert!((sup - conj).abs() <= 1e-8 * (1.0 + conj.abs()), "{sup} vs {conj}");
    }

    #[test]
    fn distance_is_nonnegative_and_convex_in_first_argument(
        k in kernel(),
        a in prop::collection::vec(0.0..1.0f64, 2),
        b in prop::collection::vec(0.0..1.0f64, 2),
        c in prop::collection::vec(0.0..1.0f64, 2),
    ) {
        let f = LegendreFunction::uniform(k, 2).unwrap();
        let (x1, x2, y) = (point(k, &a), point(k, &b), point(k, &c));
        let d1 = distance(&f, &x1, &y).unwrap();
        let d2 = distance(&f, &x2, &y).unwrap();
        prop_assert!(d1 >= 0.0 && d2 >= 0.0);
        let dm = distance(&f, &x1.lerp(&x2, 0.5), &y).unwrap();
        prop_assert!(dm <= 0.5 * (d1 + d2) + 1e-12 * (1.0 + d1 + d2));
        prop_assert_eq!(distance(&f, &y, &y).unwrap(), 0.0);
    }

    #[test]
    fn small_distance_means_close_points(
        k in kernel(),
        a in prop::collection::vec(0.0..1.0f64, 2),
        e in prop::collection::vec(-1e-5..1e-5f64, 2),
    ) {
        // D(x, y) >= m/2 |x - y|^2 coordinatewise, m the least curvature between x and y
        let f = LegendreFunction::uniform(k, 2).unwrap();
        let x = point(k, &a);
        let y = Vector::new(x.iter().zip(&e).map(|(c, d)| c + d).collect()).unwrap();
        prop_assume!(f.in_interior(&y));
        let d = distance(&f, &x, &y).unwrap();
        let m = x.iter().chain(y.iter()).map(|&t| k.second(t)).fold(f64::INFINITY, f64::min);
        prop_assert!(x.dist_inf(&y) <= (2.0 * d / m).sqrt() * (1.0 + 1e-6) + 1e-12);
    }

    #[test]
    fn map_values_bound_every_sampled_set_point(
        k in prop::sample::select(vec![Kernel::HalvedEnergy, Kernel::NegativeEntropy, Kernel::NegativeLog]),
        ends in prop::collection::vec(0.0..1.0f64, 4),
        z in prop::collection::vec(0.0..1.0f64, 2),
    ) {
        let f = LegendreFunction::uniform(k, 2).unwrap();
        let c0 = point(k, &ends[..2]);
        let c1 = point(k, &ends[2..]);
        prop_assume!(c0.dist_inf(&c1) > 1e-3);
        let set = CompactSet::segment(c0.clone(), c1.clone()).unwrap();
        let z = point(k, &z);
        let ln = left_nearest(&f, &set, &z).unwrap().value;
        let lf = left_farthest(&f, &set, &z).unwrap().value;
        let rn = right_nearest(&f, &set, &z).unwrap().value;
        let rf = right_farthest(&f, &set, &z).unwrap().value;
        for i in 0..=50 {
            let s = c0.lerp(&c1, i as f64 / 50.0);
            let dl = distance(&f, &s, &z).unwrap();
            let dr = distance(&f, &z, &s).unwrap();
            let slack = 1e-9 * (1.0 + dl + dr);
            prop_assert!(ln <= dl + slack && dl <= lf + slack);
            prop_assert!(rn <= dr + slack && dr <= rf + slack);
        }
    }

    #[test]
    fn centers_are_local_minimizers_of_the_radius(
        k in prop::sample::select(vec![Kernel::HalvedEnergy, Kernel::NegativeEntropy, Kernel::NegativeLog]),
        units in prop::collection::vec(0.0..1.0f64, 8),
        dir in prop::collection::vec(-1.0..1.0f64, 2),
    ) {
        let f = LegendreFunction::uniform(k, 2).unwrap();
        let pts: Vec<Vector> = units.chunks(2).map(|c| point(k, c)).collect();
        let set = CompactSet::finite(pts).unwrap();
        for (left, c) in [(true, left_center(&f, &set).unwrap()), (false, right_center(&f, &set).unwrap())] {
            for step in [1e-3, 1e-2] {
                let moved = Vector::new(c.center.iter().zip(&dir).map(|(a, d)| a + step * d).collect()).unwrap();
                if !f.in_interior(&moved) {
                    continue;
                }
                let r = if left {
                    left_farthest(&f, &set, &moved).unwrap().value
                } else {
                    right_farthest(&f, &set, &moved).unwrap().value
                };
                prop_assert!(r >= c.radius - 1e-9 * (1.0 + c.radius), "left={left} {r} < {}", c.radius);
            }
        }
    }

    #[test]
    fn farthest_envelope_is_midpoint_convex(y1 in -5.0..5.0f64, y2 in -5.0..5.0f64, mu in 0.05..4.0f64) {
        let g = PiecewiseFunction::step(0.0, 1.0).unwrap();
        let phi = |y| proxlab::farthest_envelope(&g, mu, y).unwrap();
        let lhs = phi(0.5 * (y1 + y2));
        prop_assert!(lhs <= 0.5 * (phi(y1) + phi(y2)) + 1e-10);
    }

    #[test]
    fn envelope_matches_brute_force(x in -8.0..8.0f64, lambda in 0.05..5.0f64) {
        let g = PiecewiseFunction::step(0.0, 1.0).unwrap();
        let n = 100_001;
        let brute = (0..n)
            .map(|i| -10.0 + 20.0 * i as f64 / (n - 1) as f64)
            .map(|w| g.eval(w) + (x - w) * (x - w) / (2.0 * lambda))
            .fold(f64::INFINITY, f64::min);
        let e = proxlab::moreau_envelope(&g, lambda, x).unwrap();
        prop_assert!(e <= brute + 1e-12);
        prop_assert!(brute - e <= 1e-6, "{brute} vs {e}");
    }
}
