//! Generalized Pauli channels over decompositions of `M_n` into pairwise
//! complementary subalgebras.
//!
//! The crate builds the decompositions (qubit Pauli MASAs, mutually unbiased
//! MASAs in prime dimension, the five-part decomposition of `M_2 ⊗ M_2`),
//! the channels `α(A) = (1 − Σλ) Tr(A)/n · I + Σ λ_i E_i(A)` over them, and
//! certifies complete positivity two ways: through the coefficient
//! inequalities of the commutant Kraus expansion and through the spectrum of
//! the Choi matrix.

pub mod channel;
pub mod constructions;
pub mod error;
pub mod matcore;
pub mod subalgebra;
pub mod verify;

pub use channel::{ChannelSpec, CpReport, GeneralizedPauliChannel, KrausForm};
pub use constructions::{Decomposition, DecompositionRegistry};
pub use error::{GpcError, Result};
pub use matcore::{CMatrix, C64};
pub use subalgebra::{Subalgebra, SubalgebraKind};
