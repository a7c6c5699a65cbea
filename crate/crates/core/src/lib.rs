//! Exact verification of the Chevalley–Gras ambiguous class number formula
//! for quadratic fields `Q(√d)/Q`.

pub mod arith;
pub mod error;
pub mod f2;
pub mod field;
pub mod formulas;
pub mod group;
pub mod hilbert;
pub mod modulus;
pub mod quadforms;
pub mod rayoracle;
pub mod verify;

pub use arith::Discriminant;
pub use error::{Error, Result};
pub use modulus::{Modulus, PlaceSet};
