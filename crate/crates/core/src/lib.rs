//! # holevo-auth
//!
//! Library for simulating and empirically verifying the security bound stack of a
//! two-universal-hashing authentication protocol over partially leaked keys:
//!
//! - **Quantum primitives** ([`quantum`]): density matrices, von Neumann entropy,
//!   Holevo information, trace distance, Helstrom discrimination, Kraus channels,
//!   quantum relative entropy.
//! - **Classical entropies** ([`entropy`]): Shannon/binary/min/0-entropy, conditional
//!   guessing probability, Fano-inequality inversion, Helstrom floors, and the
//!   asymmetric/symmetric security classifier.
//! - **GF(2) machinery** ([`gf2`], [`hashing`]): packed bit vectors and matrices,
//!   Toeplitz and parity-check two-universal families, tag generation, collision
//!   estimation.
//! - **Adversary** ([`adversary`]): exact optimal guessing from classical side
//!   information, Helstrom/pretty-good-measurement guessing from quantum side
//!   information, and exhaustive forgery search at desk scale.
//! - **Protocol** ([`protocol`], [`config`]): error correction by syndrome exchange,
//!   privacy amplification to the Holevo-limited key length, tag authentication,
//!   transcript accounting, and Monte Carlo security reports.
//! - **Bound checks** ([`bounds`]): one named check per analytic claim, each comparing
//!   an exact or Monte Carlo quantity against its bound.
//!
//! All entropies are in bits (base-2 logarithms). Numerical state validity uses the
//! single library-wide tolerance [`VALIDITY_TOL`].

pub mod adversary;
pub mod bounds;
pub mod config;
pub mod entropy;
pub mod error;
pub mod gf2;
pub mod hashing;
pub mod matrix;
pub mod protocol;
pub mod quantum;
pub mod seed;

pub use config::{EcCodeSpec, ProtocolConfig};
pub use num_complex::Complex64;
pub use entropy::{Distribution, JointDistribution, SecurityClass};
pub use error::{Error, Result};
pub use gf2::{Bits, Gf2Matrix};
pub use hashing::{HashInstance, HashKind, Tag};
pub use matrix::ComplexMatrix;
pub use protocol::{SecurityReport, Transcript};
pub use quantum::{DensityMatrix, Ensemble, KrausChannel};

/// Absolute tolerance for state-validity checks (Hermiticity, trace, positivity,
/// Kraus completeness, probability normalization).
pub const VALIDITY_TOL: f64 = 1e-9;

/// Eigenvalues and probabilities below this threshold are treated as zero in
/// entropy computations and support tests.
pub const SUPPORT_TOL: f64 = 1e-12;
