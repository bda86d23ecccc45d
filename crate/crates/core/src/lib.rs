//! Exact arithmetic for affine Hecke algebras of irreducible root data.

pub mod coeffs;
pub mod error;
pub mod extweyl;
pub mod hecke;
pub mod json;
pub mod klpoly;
mod lincomb;
pub mod module_m;
pub mod roots;
pub mod satake;
pub mod verify;

pub use coeffs::{GroupAlgElt, HalfLaurent, IntPoly, RatFun};
pub use error::{Error, Result};
pub use extweyl::{AffineWord, ExtAffineElt};
pub use hecke::{Hecke, HeckeElt};
pub use module_m::{KVariant, ModElt, ModGen, Module};
pub use roots::{CartanType, Coweight, LatticeSpec, RootDatum, WeylElt};
