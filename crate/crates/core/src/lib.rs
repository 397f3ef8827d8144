//! Generalized coherent, squeezed and intelligent states of the
//! Heisenberg-Weyl, su(2), su(1,1) and q-deformed algebras on truncated
//! bases, with the characteristic uncertainty-relation hierarchy.
//!
//! Units: hbar = m = 1, oscillator frequency 1 unless a dynamics profile
//! says otherwise. Complex square roots use the principal branch.

// `!(x > 0.0)` rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod complementarity;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod par;
pub mod random;
pub mod reps;
pub mod special;
pub mod states;
pub mod uncertainty;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
