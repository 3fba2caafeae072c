//! Separable Legendre functions with closed-form conjugates.
//!
//! Every function here is a sum of one-dimensional kernels `f(x) = Σ_j k_j(x_j)`.
//! The catalog is closed under conjugation:
//!
//! | kernel | `k(t)` | interior | `k'(t)` | conjugate |
//! |--------|--------|----------|---------|-----------|
//! | `HalvedEnergy` | `t²/2` | `R` | `t` | itself |
//! | `NegativeEntropy` | `t ln t - t` (`0` at `t = 0`) | `t > 0` | `ln t` | `Exponential` |
//! | `NegativeLog` | `-ln t` | `t > 0` | `-1/t` | `ConjugateNegativeLog` |
//! | `Exponential` | `e^t` | `R` | `e^t` | `NegativeEntropy` |
//! | `ConjugateNegativeLog` | `-1 - ln(-t)` | `t < 0` | `-1/t` | `NegativeLog` |
//!
//! Values outside the domain are `+∞`. Gradients are only defined on the
//! interior; asking for one elsewhere is a [`Error::Domain`].

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::vector::Vector;

/// One-dimensional Legendre kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    HalvedEnergy,
    NegativeEntropy,
    NegativeLog,
    Exponential,
    ConjugateNegativeLog,
}

impl Kernel {
    pub const ALL: [Kernel; 5] = [
        Kernel::HalvedEnergy,
        Kernel::NegativeEntropy,
        Kernel::NegativeLog,
        Kernel::Exponential,
        Kernel::ConjugateNegativeLog,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kernel::HalvedEnergy => "energy",
            Kernel::NegativeEntropy => "entropy",
            Kernel::NegativeLog => "neglog",
            Kernel::Exponential => "exp",
            Kernel::ConjugateNegativeLog => "neglog-conj",
        }
    }

    pub fn conjugate(self) -> Kernel {
        match self {
            Kernel::HalvedEnergy => Kernel::HalvedEnergy,
            Kernel::NegativeEntropy => Kernel::Exponential,
            Kernel::Exponential => Kernel::NegativeEntropy,
            Kernel::NegativeLog => Kernel::ConjugateNegativeLog,
            Kernel::ConjugateNegativeLog => Kernel::NegativeLog,
        }
    }

    pub fn in_interior(self, t: f64) -> bool {
        match self {
            Kernel::HalvedEnergy | Kernel::Exponential => t.is_finite(),
            Kernel::NegativeEntropy | Kernel::NegativeLog => t > 0.0 && t.is_finite(),
            Kernel::ConjugateNegativeLog => t < 0.0 && t.is_finite(),
        }
    }

    pub fn in_domain(self, t: f64) -> bool {
        match self {
            Kernel::NegativeEntropy => t >= 0.0 && t.is_finite(),
            _ => self.in_interior(t),
        }
    }

    /// `k(t)`, `+∞` outside the domain.
    pub fn value(self, t: f64) -> f64 {
        if !self.in_domain(t) {
            return f64::INFINITY;
        }
        match self {
            Kernel::HalvedEnergy => 0.5 * t * t,
            Kernel::NegativeEntropy => {
                if t == 0.0 {
                    0.0
                } else {
                    t * t.ln() - t
                }
            }
            Kernel::NegativeLog => -t.ln(),
            Kernel::Exponential => t.exp(),
            Kernel::ConjugateNegativeLog => -1.0 - (-t).ln(),
        }
    }

    /// `k'(t)`; caller guarantees `t` is interior.
    pub fn grad(self, t: f64) -> f64 {
        match self {
            Kernel::HalvedEnergy => t,
            Kernel::NegativeEntropy => t.ln(),
            Kernel::NegativeLog | Kernel::ConjugateNegativeLog => -1.0 / t,
            Kernel::Exponential => t.exp(),
        }
    }

    /// `k''(t)`; caller guarantees `t` is interior.
    pub fn second(self, t: f64) -> f64 {
        match self {
            Kernel::HalvedEnergy => 1.0,
            Kernel::NegativeEntropy => 1.0 / t,
            Kernel::NegativeLog | Kernel::ConjugateNegativeLog => 1.0 / (t * t),
            Kernel::Exponential => t.exp(),
        }
    }

    /// One-dimensional Bregman distance `k(x) - k(y) - k'(y)(x - y)` in a
    /// cancellation-aware closed form.
    pub fn distance(self, x: f64, y: f64) -> f64 {
        if !self.in_interior(y) || !self.in_domain(x) {
            return f64::INFINITY;
        }
        match self {
            Kernel::HalvedEnergy => 0.5 * (x - y) * (x - y),
            Kernel::NegativeEntropy => {
                if x == 0.0 {
                    y
                } else {
                    (x * (x / y).ln() - x + y).max(0.0)
                }
            }
            Kernel::NegativeLog | Kernel::ConjugateNegativeLog => {
                // both arguments share a sign, so the ratio is positive
                let r = x / y;
                (r - 1.0 - r.ln()).max(0.0)
            }
            Kernel::Exponential => {
                let d = x - y;
                (y.exp() * (d.exp_m1() - d)).max(0.0)
            }
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "energy" => Ok(Kernel::HalvedEnergy),
            "entropy" => Ok(Kernel::NegativeEntropy),
            "neglog" => Ok(Kernel::NegativeLog),
            "exp" => Ok(Kernel::Exponential),
            "neglog-conj" => Ok(Kernel::ConjugateNegativeLog),
            other => Err(Error::InvalidFunction(format!(
                "unknown kernel '{other}' (expected energy, entropy or neglog)"
            ))),
        }
    }
}

/// A separable Legendre function on `R^n`, one kernel per coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LegendreFunction {
    kernels: Vec<Kernel>,
}

impl LegendreFunction {
    pub fn uniform(kernel: Kernel, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidFunction("dimension must be positive".into()));
        }
        Ok(Self {
            kernels: vec![kernel; dim],
        })
    }

    /// `½‖x‖²`.
    pub fn energy(dim: usize) -> Result<Self> {
        Self::uniform(Kernel::HalvedEnergy, dim)
    }

    /// `Σ x ln x - x`, whose distance is the Kullback-Leibler divergence.
    pub fn entropy(dim: usize) -> Result<Self> {
        Self::uniform(Kernel::NegativeEntropy, dim)
    }

    /// `-Σ ln x`, whose distance is the Itakura-Saito distance.
    pub fn neglog(dim: usize) -> Result<Self> {
        Self::uniform(Kernel::NegativeLog, dim)
    }

    pub fn separable(kernels: Vec<Kernel>) -> Result<Self> {
        if kernels.is_empty() {
            return Err(Error::InvalidFunction("dimension must be positive".into()));
        }
        Ok(Self { kernels })
    }

    pub fn dim(&self) -> usize {
        self.kernels.len()
    }

    pub fn kernels(&self) -> &[Kernel] {
        &self.kernels
    }

    /// The shared kernel when every coordinate uses the same one.
    pub fn uniform_kernel(&self) -> Option<Kernel> {
        let first = self.kernels[0];
        self.kernels.iter().all(|&k| k == first).then_some(first)
    }

    pub fn conjugate(&self) -> LegendreFunction {
        LegendreFunction {
            kernels: self.kernels.iter().map(|k| k.conjugate()).collect(),
        }
    }

    pub fn in_domain(&self, x: &Vector) -> bool {
        x.dim() == self.dim()
            && self
                .kernels
                .iter()
                .zip(x.iter())
                .all(|(k, &t)| k.in_domain(t))
    }

    pub fn in_interior(&self, x: &Vector) -> bool {
        x.dim() == self.dim()
            && self
                .kernels
                .iter()
                .zip(x.iter())
                .all(|(k, &t)| k.in_interior(t))
    }

    /// Dimension check plus interior membership, reporting the first bad coordinate.
    pub fn check_interior(&self, x: &Vector) -> Result<()> {
        x.check_dim(self.dim())?;
        match self
            .kernels
            .iter()
            .zip(x.iter())
            .position(|(k, &t)| !k.in_interior(t))
        {
            None => Ok(()),
            Some(index) => Err(Error::Domain {
                index,
                value: x[index],
            }),
        }
    }

    pub fn eval(&self, x: &Vector) -> Result<f64> {
        x.check_dim(self.dim())?;
        Ok(self
            .kernels
            .iter()
            .zip(x.iter())
            .map(|(k, &t)| k.value(t))
            .sum())
    }

    /// `f*(y)` by the closed form of each kernel's conjugate.
    pub fn eval_conj(&self, y: &Vector) -> Result<f64> {
        y.check_dim(self.dim())?;
        Ok(self
            .kernels
            .iter()
            .zip(y.iter())
            .map(|(k, &t)| k.conjugate().value(t))
            .sum())
    }

    pub fn grad(&self, x: &Vector) -> Result<Vector> {
        self.check_interior(x)?;
        Ok(self.grad_unchecked(x))
    }

    pub fn grad_conj(&self, y: &Vector) -> Result<Vector> {
        self.conjugate().grad(y)
    }

    pub fn second_derivative(&self, x: &Vector) -> Result<Vector> {
        self.check_interior(x)?;
        Ok(Vector::from_finite(
            self.kernels
                .iter()
                .zip(x.iter())
                .map(|(k, &t)| k.second(t))
                .collect(),
        ))
    }

    pub(crate) fn grad_unchecked(&self, x: &Vector) -> Vector {
        Vector::from_finite(
            self.kernels
                .iter()
                .zip(x.iter())
                .map(|(k, &t)| k.grad(t))
                .collect(),
        )
    }

    pub(crate) fn grad_conj_unchecked(&self, y: &Vector) -> Vector {
        Vector::from_finite(
            self.kernels
                .iter()
                .zip(y.iter())
                .map(|(k, &t)| k.conjugate().grad(t))
                .collect(),
        )
    }

    /// Parses a catalog name (`energy`, `entropy`, `neglog`) with an explicit
    /// dimension, or a JSON-style list of names such as `["energy","entropy"]`.
    pub fn parse(spec: &str, dim: usize) -> Result<Self> {
        let spec = spec.trim();
        if let Some(inner) = spec.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let kernels = inner
                .split(',')
                .map(|s| s.trim().trim_matches('"').parse())
                .collect::<Result<Vec<Kernel>>>()?;
            return Self::separable(kernels);
        }
        Self::uniform(spec.parse()?, dim)
    }
}

impl fmt::Display for LegendreFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.uniform_kernel() {
            Some(k) => write!(f, "{k}^{}", self.dim()),
            None => {
                let names: Vec<_> = self.kernels.iter().map(|k| k.name()).collect();
                write!(f, "[{}]", names.join(","))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector;
    use std::f64::consts::E;

    #[test]
    fn eval_examples() {
        assert_eq!(
            LegendreFunction::energy(2)
                .unwrap()
                .eval(&vector![3, 4])
                .unwrap(),
            12.5
        );
        assert_eq!(
            LegendreFunction::entropy(2)
                .unwrap()
                .eval(&vector![1, 1])
                .unwrap(),
            -2.0
        );
        assert_eq!(
            LegendreFunction::neglog(1)
                .unwrap()
                .eval(&vector![-1])
                .unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn entropy_accepts_boundary_but_gradient_rejects_it() {
        let f = LegendreFunction::entropy(2).unwrap();
        assert_eq!(f.eval(&vector![0, 1]).unwrap(), -1.0);
        assert_eq!(
            f.grad(&vector![1, 0]).unwrap_err(),
            Error::Domain {
                index: 1,
                value: 0.0
            }
        );
    }

    #[test]
    fn neglog_boundary_is_infinite() {
        let f = LegendreFunction::neglog(2).unwrap();
        assert_eq!(f.eval(&vector![0, 1]).unwrap(), f64::INFINITY);
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(
            LegendreFunction::energy(2)
                .unwrap()
                .eval_conj(&vector![3, 4])
                .unwrap(),
            12.5
        );
        assert_eq!(
            LegendreFunction::entropy(2)
                .unwrap()
                .eval_conj(&vector![0, 0])
                .unwrap(),
            2.0
        );
        assert_eq!(
            LegendreFunction::neglog(1)
                .unwrap()
                .eval_conj(&vector![-1])
                .unwrap(),
            -1.0
        );
        assert_eq!(
            LegendreFunction::neglog(1)
                .unwrap()
                .eval_conj(&vector![0.5])
                .unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn gradient_examples() {
        let g = LegendreFunction::entropy(2)
            .unwrap()
            .grad(&vector![E, E * E])
            .unwrap();
        assert!((g[0] - 1.0).abs() < 1e-15 && (g[1] - 2.0).abs() < 1e-15);

        let f = LegendreFunction::neglog(2).unwrap();
        let back = f.grad_conj(&f.grad(&vector![2, 5]).unwrap()).unwrap();
        assert!(back.dist_inf(&vector![2, 5]) < 1e-15);

        assert_eq!(
            LegendreFunction::energy(2)
                .unwrap()
                .grad(&vector![1, -1])
                .unwrap(),
            vector![1, -1]
        );
    }

    #[test]
    fn grad_conj_rejects_outside_dual_domain() {
        let f = LegendreFunction::neglog(1).unwrap();
        assert!(matches!(
            f.grad_conj(&vector![1.0]),
            Err(Error::Domain { index: 0, .. })
        ));
    }

    #[test]
    fn second_derivative_examples() {
        assert_eq!(
            LegendreFunction::energy(3)
                .unwrap()
                .second_derivative(&vector![-2, 0, 7])
                .unwrap(),
            vector![1, 1, 1]
        );
        assert_eq!(
            LegendreFunction::entropy(1)
                .unwrap()
                .second_derivative(&vector![2])
                .unwrap(),
            vector![0.5]
        );
        assert_eq!(
            LegendreFunction::neglog(1)
                .unwrap()
                .second_derivative(&vector![2])
                .unwrap(),
            vector![0.25]
        );
    }

    #[test]
    fn dimension_mismatch() {
        let f = LegendreFunction::energy(2).unwrap();
        assert_eq!(
            f.eval(&vector![1]).unwrap_err(),
            Error::DimensionMismatch {
                expected: 2,
                found: 1
            }
        );
    }

    #[test]
    fn conjugation_is_an_involution() {
        let f = LegendreFunction::separable(vec![
            Kernel::HalvedEnergy,
            Kernel::NegativeEntropy,
            Kernel::NegativeLog,
        ])
        .unwrap();
        assert_eq!(f.conjugate().conjugate(), f);
    }

    #[test]
    fn parse_names_and_lists() {
        assert_eq!(
            LegendreFunction::parse("entropy", 3).unwrap(),
            LegendreFunction::entropy(3).unwrap()
        );
        let mixed = LegendreFunction::parse(r#"["energy", "neglog"]"#, 0).unwrap();
        assert_eq!(
            mixed.kernels(),
            &[Kernel::HalvedEnergy, Kernel::NegativeLog]
        );
        assert!(LegendreFunction::parse("cosh", 1).is_err());
    }
}
