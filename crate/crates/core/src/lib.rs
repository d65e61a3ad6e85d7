//! Exact-arithmetic toolkit for quantum GL(N) spin-chain transfer matrices,
//! their generating master T-operator, and the bilinear identity suites that
//! certify it as a tau-function of the discrete-time hierarchy: determinant
//! identities of Jacobi-Trudi and Giambelli type, Hirota relations, wave
//! operators, the undressing chain to Baxter Q-operators, Wronskian T-formulas
//! and the rational (Casorati) tau layer, cross-validated against a
//! brute-force free-fermion oracle on a finite mode window.

pub mod scalar;
pub mod poly;
pub mod ratfunc;
pub mod matrix;
pub mod symfunc;
pub mod fock;

pub use matrix::{Mat, MatPolyU};
pub use poly::{Poly, PolyRat};
pub use ratfunc::RatFunc;
pub use scalar::{rat, rat_i, Rat};
pub use symfunc::{MiwaSpec, Partition, TimesVector};
