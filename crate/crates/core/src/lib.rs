//! Audit toolkit for greedy stopping-set decomposition encoders of LDPC codes.
//!
//! The crate is organised bottom-up:
//!
//! - [`gf2`]: dense bit-packed linear algebra over GF(2) and matrix file formats.
//! - [`peel`]: the STRIP fixpoint, the (P)ESS finder and stopping-set classification.
//! - [`decompose`]: the recursive decomposition into components and message-bit accounting.
//! - [`circuit`]: XOR circuits, pseudo-tree schedules, composition and encoder verification.
//! - [`counterexample`]: the `M_n` family and checks of its structural claims.
//! - [`experiments`]: random regular ensembles and overcount statistics.

pub mod circuit;
pub mod counterexample;
pub mod decompose;
pub mod error;
pub mod experiments;
pub mod gf2;
pub mod peel;
mod serde_util;

pub use circuit::{Circuit, EncodeSchedule, EncoderVerdict, Gate, VerifyMode};
pub use decompose::{Component, ComponentKind, DecomposeOptions, DecompositionReport, Verdict};
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVec, KernelBasis, SubSelection};
pub use peel::{ChoicePolicy, EssClassification, EssKind, FoldLevel, PeelTrace};

/// Version stamped into every JSON report.
pub const SCHEMA_VERSION: u32 = 1;
