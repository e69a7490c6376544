//! Exact density-matrix toolkit for classical and quantum information.
//!
//! - [`probability`]: Shannon entropies, mutual information, relative
//!   entropy, Bayes updates, channel capacity, typical sets, random coding.
//! - [`state`]: state vectors and density operators, partial trace,
//!   purification, Schmidt decomposition, von Neumann entropy, fidelity,
//!   trace distance.
//! - [`dynamics`]: projective measurements, POVMs, Kraus channels, Choi
//!   complete-positivity test, ancilla realization of POVMs.
//! - [`distinguish`]: ensembles, Holevo χ, accessible-information search,
//!   two-state discrimination measures, unambiguous discrimination.
//! - [`entanglement`]: Bell basis, pure-state entanglement, pair
//!   operations, Werner states, twirling, CHSH.
//! - [`protocols`]: BB84, E91, teleportation, superdense coding,
//!   entanglement swapping, recurrence purification.
//! - [`coding`]: typical-subspace compression, QECC condition checking,
//!   repetition-code recovery, Hamming bound.
//!
//! Conventions: multi-partite indices are big-endian (subsystem 0 is most
//! significant), the trace distance carries no ½ factor, and every
//! entropy-like quantity takes an explicit [`LogBase`].

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coding;
pub mod distinguish;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod io;
pub mod linalg;
pub mod probability;
pub mod protocols;
pub mod random;
pub mod state;

pub use error::{Error, Result};
pub use probability::LogBase;
