//! Dirac and Pauli Hamiltonians of a planar spin-½ particle on noncommutative
//! phase space, represented on a truncated oscillator basis.
//!
//! * [`spinor_algebra`] — Pauli and Dirac matrices, Clifford and Pauli-product checks.
//! * [`phase_space`] — canonical and Bopp-shifted operators, the Moyal star product.
//! * [`hamiltonians`] — Dirac, NC Dirac, Pauli and NC Pauli matrices.
//! * [`limits`] — spectra, small-component elimination, convergence in `c`.
//!
//! The guide in `book/` walks through each module; its code blocks are
//! compiled and run as doctests of this crate.

pub mod error;
pub mod hamiltonians;
pub mod limits;
pub mod linalg;
pub mod phase_space;
pub mod spinor_algebra;

pub use error::{Error, Result};
pub use linalg::MatrixC;

// One module per chapter so a failing block points at its chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/spinor-algebra.md")]
    mod spinor_algebra {}
    #[doc = include_str!("../../../book/src/phase-space.md")]
    mod phase_space {}
    #[doc = include_str!("../../../book/src/hamiltonians.md")]
    mod hamiltonians {}
    #[doc = include_str!("../../../book/src/nonrelativistic-limit.md")]
    mod nonrelativistic_limit {}
}
