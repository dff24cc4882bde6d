//! Exact-arithmetic construction and verification of dual polynomials.
//!
//! The crate builds, in exact rational arithmetic, the dual objects used to
//! certify lower bounds on threshold degree, smooth threshold degree and
//! sign-rank: dual polynomials for OR, corrector objects, dual distributions
//! for the Minsky–Papert function, locally smooth witnesses, weight-transfer
//! and amplification pipelines. Every constructed object comes with a
//! certificate whose claims are re-checked against the object itself, and the
//! [`lp`] module provides an independent exact linear-programming oracle.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command line
//! and floating-point cross-checks live in the `dualpoly-cli` companion crate.
//!
//! Module map:
//!
//! * [`rational`], [`bounds`], [`linalg`] — exact scalars, dyadic brackets for
//!   irrational constants, and exact Gaussian elimination.
//! * [`domain`], [`table`], [`orth`], [`fourier`], [`symmetrize`] — finite
//!   domains, finitely supported functions, orthogonal content, Fourier
//!   transform and symmetrization.
//! * [`lp`] — exact simplex with re-checkable certificates and the degree
//!   oracles built on it.
//! * [`dual_or`], [`corrector`], [`mixture`], [`family`], [`dual_mp`] — the
//!   dual objects themselves.
//! * [`smooth`] — heavy-set selection, concentration, weight reduction and the
//!   locally smooth weight-transfer toolkit.
//! * [`amplify`] — input compression, Booleanization, composition and smooth
//!   amplification.
//! * [`matrix`] — pattern matrices, Forster-type bounds and communication
//!   formulas.
//! * [`circuits`] — circuit descriptions, evaluation and the named families.

#![no_std]
#![forbid(unsafe_code)]
#![warn(missing_docs)]

extern crate alloc;

pub mod amplify;
pub mod bounds;
pub mod circuits;
pub mod corrector;
pub mod domain;
pub mod dual_mp;
pub mod dual_or;
pub mod error;
pub mod family;
pub mod fourier;
pub mod linalg;
pub mod lp;
pub mod matrix;
pub mod mixture;
pub mod orth;
pub mod rational;
pub mod smooth;
pub mod symmetrize;
pub mod table;

pub use domain::{Domain, Point};
pub use error::{Error, Result};
pub use orth::{orth, Monomial, OrthResult};
pub use rational::Q;
pub use table::FnTable;
