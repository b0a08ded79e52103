//! Completely positive Schur A-multipliers and Herz-Schur multipliers on
//! reduced crossed products by finite groups, in finite dimensions.
//!
//! Every algebra is a direct sum of full matrix blocks acting on `C^d`;
//! every group is given by its multiplication table. Complete positivity is
//! always decided by eigenvalues of Choi blocks, and the main equivalences
//! can be checked by evaluating both sides independently.

pub mod approx;
pub mod crossed;
pub mod error;
pub mod fdcstar;
pub mod fixtures;
pub mod hsmult;
pub mod io;
pub mod linalg;
pub mod nuc;
pub mod random;
pub mod schur;

pub use crossed::{Automorphism, CrossedElement, CrossedMap, DynamicalSystem, FiniteGroup};
pub use error::{Error, Result};
pub use fdcstar::{AlgElement, Algebra, CBMap, ChoiBlocks, StinespringData, TracialState};
pub use hsmult::{certify_cp, CPVerdict, CertifyOptions, HSMultiplier};
pub use linalg::{CMatrix, C64};
pub use schur::{BlockOperator, Kernel, SchurMultiplierFn};
