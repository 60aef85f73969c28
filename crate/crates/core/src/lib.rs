//! Exact verification of Riemann-Roch type identities on products of
//! projective spaces: Hirzebruch-Riemann-Roch, Grothendieck-Riemann-Roch
//! for projections and linear embeddings, holomorphic Atiyah-Bott and its
//! equivariant refinements, plus the derivative-of-exponential identity
//! for noncommutative power series.
//!
//! All arithmetic is exact, over `Q` or a number field `Q[z]/(p)`.

pub mod charclass;
pub mod cohring;
pub mod equivariant;
pub mod error;
pub mod exactnum;
pub mod ncseries;
pub mod par;
pub mod variety;
pub mod verify;

pub use cohring::{GradedElement, RingPresentation};
pub use error::{Error, Result};
pub use exactnum::{Modulus, Rational, Scalar};
pub use par::ExecMode;
pub use variety::{BundleData, MorphismModel, VarietyModel};
