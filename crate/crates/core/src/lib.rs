//! Frame multipliers on `C^d`.
//!
//! A multiplier `M_{m,Φ,Ψ} h = Σ m_n ⟨h, ψ_n⟩ φ_n` weights analysis
//! coefficients with respect to one sequence and resynthesizes with another.
//! This crate computes such operators and their inverses in finite dimension:
//!
//! - [`linalg`]: dense complex matrices, Jacobi eigen/singular value solvers,
//!   pseudoinverses and range-inclusion tests;
//! - [`frames`]: analysis/synthesis/frame operators, bounds, canonical and
//!   random duals, classification and frame equivalence;
//! - [`multiplier`]: the multiplier calculus, including dual-frame inverse
//!   representations, symbol factorization and constant-symbol range analysis;
//! - [`gabor`]: discrete time-frequency shifts, Gabor frames and
//!   unit-symbol Gabor multipliers that commute with the lattice.

pub mod error;
pub mod fixtures;
pub mod frames;
pub mod gabor;
pub mod linalg;
pub mod multiplier;
pub mod random;

pub use error::{Error, Result};
pub use frames::{FrameBounds, FrameClass, FrameKind, FrameSeq};
pub use gabor::{GaborSystem, Lattice, TfPoint};
pub use linalg::{CMatrix, CVector, C64};
pub use multiplier::{InverseClass, InverseReport, Multiplier, RangeRelation, SymbolSeq};
pub use random::SeededRng;
