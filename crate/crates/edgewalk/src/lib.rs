//! Simulation toolkit for quantized walks on finite Markov chains.
//!
//! The library builds small ergodic chains (complete graphs, set-walk
//! families, tuple-exchange walks), quantizes them into a unitary walk
//! operator on the directed-edge space, and exercises the machinery that
//! walk-based search rests on:
//!
//! * spectral analysis of the chain and of its quantized walk, including
//!   the correspondence between discriminant singular values and walk
//!   eigenphases,
//! * an approximate reflection about the stationary state built from
//!   repeated phase estimation banks, with measurable error decay,
//! * classical and quantum search loops with explicit cost accounting,
//! * query-model applications (unordered search, element distinctness,
//!   product verification, associativity probing, triangle finding,
//!   commutativity testing) with closed-form cost models.
//!
//! Everything is deterministic under a caller-supplied seed; state spaces
//! are capped so all simulations stay dense and exact.

pub mod apps;
pub mod builders;
pub mod chain;
pub mod edge;
pub mod error;
pub mod jsonio;
pub mod reflection;
pub mod search;
pub mod walk;

pub use chain::{analyze, ChainAnalysis, MarkovChain};
pub use edge::EdgeState;
pub use error::{Error, Result};
pub use walk::{walk_spectrum, DiscriminantSpectrum, SpectrumOptions, SpectrumReport, WalkOperator};
