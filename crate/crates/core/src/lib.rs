//! Quasi-linear evaluation, interpolation and reduction of elliptic functions
//! on cosets of a 2-power torsion subgroup, with the applications built on
//! them: normal-basis multiplication, MDS Goppa codes and a toy LWE scheme.
//!
//! Everything is exact arithmetic over a prime field `F_p` (`p < 2^63`).

pub mod basis;
pub mod butterfly;
pub mod curve;
pub mod error;
pub mod field;
pub mod goppa;
pub mod linalg;
pub mod lwe;
pub mod ntt;
pub mod ops;
pub mod ring;
pub mod tower;

pub use error::{Error, FieldError, Result};
pub use field::{ExtField, Field, Fp};
