//! Symbolic jet-bundle calculus for Lagrangian field theory.
//!
//! The crate computes, in exact rational arithmetic over a declared fibred
//! coordinate system: jet prolongations and total derivatives, the
//! horizontal/vertical bicomplex of differential forms, Frölicher–Nijenhuis
//! brackets, connection geometry (curvature, torsion, Christoffel symbols,
//! gauge field strengths), Euler–Lagrange operators, symmetry
//! classification, Noether currents, and Noether identities — for both even
//! and Grassmann-odd field variables.

pub mod cli;
pub mod conn;
pub mod expr;
pub mod index;
pub mod forms;
pub mod gauge;
pub mod jet;
pub mod model;
pub mod noether;
pub mod parse;
pub mod report;
pub mod selftest;
pub mod tvform;
pub mod variational;
pub mod world;

pub use expr::{Atom, ExprError, ExprParity, Expression, Field, FuncKind, Parity, Rat};
pub use index::MultiIndex;
pub use jet::{ContactDerivation, JetError, JetModel, Prolongation};
