//! Kirkwood-Dirac nonclassicality, complete incompatibility of basis pairs,
//! and support-uncertainty diagrams for finite-dimensional quantum systems.
//!
//! The crate is organized bottom-up:
//!
//! - [`linalg`]: dense complex matrices, tolerance-aware rank/kernel, and
//!   exhaustive minor enumeration;
//! - [`bases`]: the transition-matrix catalog (Fourier, Tao, spin-1, the
//!   4x4 one-parameter family, two 6x6 examples), products, permutations,
//!   Haar sampling, and basis-pair statistics;
//! - [`kd`]: Kirkwood-Dirac quasiprobability distributions and classicality
//!   verdicts for pure states;
//! - [`coinc`]: complete incompatibility of a basis pair, the
//!   incompatibility hierarchy, support-uncertainty diagrams, and
//!   nonclassicality witnesses driven by support sizes;
//! - [`perturb`]: rotating a unitary into one with no vanishing minor while
//!   tracking the total deviation;
//! - [`oracle`]: randomized cross-checks of the exact diagrams and witness
//!   soundness;
//! - [`wire`]: JSON/CSV input and output with byte-stable float formatting.

pub mod acceptance;
pub mod bases;
pub mod coinc;
pub mod error;
pub mod kd;
pub mod linalg;
pub mod oracle;
pub mod perturb;
pub mod wire;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, IndexSet, Tolerance, C64};
