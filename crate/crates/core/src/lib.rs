//! Truncated `p`-typical Witt vectors over totally ramified cyclic degree-`p`
//! extensions of `p`-adic fields, with level-1 Galois cohomology checks.

pub mod cohomology;
pub mod error;
pub mod extension;
pub mod linalg;
pub mod poly;
pub mod tower;
pub mod universal;
pub mod witt;
pub mod zp;

pub use error::{Error, Result};
pub use extension::{build_extension, ExtensionData, ExtensionKind, ExtensionSpec};
pub use tower::{BaseRing, EisensteinPoly, OKElement, OLElement, Tower, Valuation};
pub use witt::{WittRing, WittVec};
pub use zp::{PrecisionInt, Residues};
