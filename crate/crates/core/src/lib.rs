//! Geometric entropy of weighted graphs.
//!
//! A graph is lifted to a family of zero-mean Gaussians whose covariance is
//! `diag(theta) + A`; the Fisher-inspired metric on the variances `theta`
//! defines a (pseudo-)Riemannian manifold whose regularized log-volume is
//! the entropy. Sweeping the edge count of G(n, k) random graphs traces
//! the normalized entropy across the giant-component transition.

// `!(x > y)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod geometry;
pub mod graph;
pub mod linalg;
pub mod rng;
pub mod volume;

pub use error::{Error, Result};
