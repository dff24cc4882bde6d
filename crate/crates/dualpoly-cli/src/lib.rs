//! Command line, file formats and numeric cross-checks for `dualpoly`.
//!
//! * [`json`]: JSON encodings of tables, mixtures, circuits and certificates
//!   (rationals as `"p/q"` strings) and CSV matrices/tables.
//! * [`numeric`]: floating-point spectral norms used only to confirm exact
//!   closed forms, and seeded random instances.
//! * [`manifest`]: run manifests with SHA-256 digests of certificates.
//! * [`acceptance`]: the twelve pinned end-to-end acceptance checks.
//! * [`cli`]: the `dualpoly` command line.

#![warn(missing_docs)]

pub mod acceptance;
pub mod cli;
pub mod json;
pub mod manifest;
pub mod numeric;
