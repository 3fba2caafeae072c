//! Bregman-distance geometry at desk scale.
//!
//! The crate works with separable Legendre functions `f` (halved energy,
//! negative entropy, negative logarithm and their conjugates) and the
//! Bregman distance they induce,
//!
//! ```text
//! D(x, y) = f(x) - f(y) - ⟨∇f(y), x - y⟩.
//! ```
//!
//! On top of that it provides:
//!
//! - [`maps`]: left/right nearest- and farthest-point maps over finite
//!   sets, intervals, boxes and segments, with ties reported explicitly;
//! - [`centers`]: left/right Chebyshev radii and centers with
//!   convex-combination certificates;
//! - [`proxlab`]: Moreau envelopes, proximal maps, farthest envelopes and
//!   Chebyshev points of piecewise functions on the line;
//! - [`probes`]: grid scans looking for multi-valued maps.
//!
//! ```
//! use bregman_core::{vector, LegendreFunction, CompactSet, centers};
//!
//! let kl = LegendreFunction::entropy(2).unwrap();
//! let seg = CompactSet::segment(vector![1, 3], vector![3, 1]).unwrap();
//! let c = centers::left_center(&kl, &seg).unwrap();
//! assert!(c.center.dist_inf(&vector![2, 2]) < 1e-9);
//! ```

pub mod bregman;
pub mod centers;
pub mod error;
pub mod legendre;
pub mod maps;
pub mod probes;
pub mod proxlab;
pub mod search;
pub mod sets;
pub mod vector;

pub use bregman::{distance, distance_dual_identity_check};
pub use centers::{CenterResult, Certificate};
pub use error::{Error, Result};
pub use legendre::{Kernel, LegendreFunction};
pub use maps::{MapKind, MapOptions, MapResult};
pub use sets::CompactSet;
pub use vector::Vector;
