//! Computational workbench for fusion rings, quadrilateral-subfactor angle
//! invariants, Cuntz-algebra endomorphisms and SU(2)_k modular data.

pub mod angles;
pub mod catalog;
pub mod classify;
pub mod cli;
pub mod cuntz;
pub mod exec;
pub mod fusion;
pub mod scalar;
pub mod wzw;

pub use exec::Exec;
pub use scalar::{QuadExt, Tolerance};
