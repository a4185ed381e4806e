//! Pointwise Chern curvature of Hermitian holomorphic vector bundles.
//!
//! The crate works entirely at a single point of the base manifold: a
//! curvature tensor is a dense array of components in unitary frames, and
//! every positivity notion becomes an optimization problem over complex
//! Grassmannians of base and fiber subspaces. Inner optimizations over fiber
//! subspaces are solved spectrally (Ky Fan); outer ones by quasi-Newton
//! descent in local Grassmannian charts from random restarts. Statements
//! that quantify over the whole manifold are approximated by a minimum over
//! a user-supplied list of points.
//!
//! The crate is `no_std` and needs only `alloc`; file formats, reports and
//! the command-line front end live in the `chern` crate.
#![cfg_attr(not(test), no_std)]
// NaN must fail these checks, so comparisons are written negated.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod extremal;
pub mod functionals;
pub mod grassmann;
pub mod linalg;
pub mod rng;
pub mod spherical;
pub mod subspace;
pub mod tensor;
pub mod vanishing;
pub mod zoo;

pub use error::{Error, Result};
pub use functionals::{DirectionMatrix, DirectionSource};
pub use grassmann::{OptimizerOptions, PositivityCertificate, PositivityKind, Sense};
pub use subspace::Subspace;
pub use tensor::{CurvatureTensor, FrameData};
pub use vanishing::VanishingConstants;

pub use num_complex::Complex64;
