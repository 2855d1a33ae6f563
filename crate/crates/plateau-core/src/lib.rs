//! Numerical toolkit for equilibrium surfaces spanned by elastic boundary curves.
//!
//! The energy under study couples surface tension, a total Gaussian curvature
//! term weighted by a saddle-splay modulus, and the bending energy of the
//! boundary. The crate provides:
//!
//! * frame kinematics and curve reconstruction ([`geom`]),
//! * area-constrained planar elastica solvers and buckled-ring shooting
//!   ([`elastica`]),
//! * the full boundary equilibrium system with its torsion first integral
//!   ([`boundary`]),
//! * Björling continuation, helicoid families, and Weierstrass fixtures
//!   ([`bjorling`]),
//! * an audit engine that re-derives every identity numerically ([`audit`]).
//!
//! All operations are pure functions of their inputs; values are immutable
//! after construction and safe to share across threads.

pub mod audit;
pub mod bjorling;
pub mod boundary;
pub mod convention;
pub mod elastica;
pub mod error;
pub mod geom;
pub mod io;
pub mod numerics;

pub use convention::{Sheet, KG_SIGN_DISK};
pub use elastica::EnergyParams;
pub use error::{Error, Result};

/// 3-vector over f64, the workhorse type of the crate.
pub type Vec3 = nalgebra::Vector3<f64>;
/// Complexified 3-vector used by analytic continuation.
pub type CVec3 = nalgebra::Vector3<num_complex::Complex64>;
