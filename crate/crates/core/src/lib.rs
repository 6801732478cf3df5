//! Numerical companion for small-data scattering of radial waves with a
//! decaying potential and a power nonlinearity in dimensions `n >= 4`.
//!
//! The crate is organised bottom-up:
//!
//! * [`scenario`] validates the exponents and derives the weight parameters.
//! * [`fields`] holds space-time fields, data generators and norms.
//! * [`radial_wave`] is the leapfrog solver (free, forced, backwards).
//! * [`scattering`] runs the fixed-point iteration and measures decay rates.
//! * [`lemma`] certifies the weighted integral inequalities by quadrature.
//! * [`cli`] backs the `radscatter` binary: configs, manifests, CSV output.

// `!(x > 0.0)` is used on purpose: it also rejects NaN. Grid loops index
// several arrays and the radius by the same node number.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod fields;
pub mod lemma;
pub mod radial_wave;
pub mod scattering;
pub mod scenario;

pub use error::{Error, Result};
