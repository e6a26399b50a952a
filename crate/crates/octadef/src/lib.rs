//! Exact computation and certification of frame defects in rational
//! centerings of the integer lattice.
//!
//! A rational centering is a lattice Λ with `Z^n ⊆ Λ ⊆ Q^n`, stored as a
//! common denominator q together with the integer matrix of scaled
//! generators. The defect of the standard frame counts how many standard
//! basis vectors must be replaced by lattice vectors to reach a basis of Λ.
//! This crate computes the defect exactly by brute force at small
//! dimensions, and certifies upper bounds at any dimension through a
//! constructive pipeline: square-free reduction of the denominator, modular
//! rank data per prime, greedy systems of common representatives over
//! column extension sets, and an explicit completed basis as the final
//! certificate. Admissibility of the unit L1 ball is decided exactly from
//! the coset group, and the classical inequalities relating these objects
//! are all checkable against brute-force oracles.
//!
//! All arithmetic is exact (arbitrary-precision integers and rationals);
//! floating point appears only in two soft, report-only bound evaluators.

pub mod arith;
pub mod error;
pub mod lattice;
pub mod matrix;

pub use error::{Error, Result};
