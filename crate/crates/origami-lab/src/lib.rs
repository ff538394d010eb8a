//! A desk-scale laboratory for the dynamics of Veech-group actions on
//! square-tiled surfaces: combinatorial surface encodings, exact SL2(Z)
//! algebra, hyperbolic orbit counting, Veech group computation via orbit
//! graphs, exact affine point tracking, flat metric queries, Koopman/Fourier
//! spectral estimates, and shrinking-target experiments.

pub mod error;
pub mod perm;
pub mod origami;
pub mod sl2;
pub mod hyperbolic;
pub mod veech;
pub mod affine;
pub mod flat;
pub mod spectral;
pub mod target;

pub use error::{Error, ErrorCategory, Result};
pub use origami::{CanonicalForm, Origami, Stratum};
pub use sl2::{GeneratorSet, GroupElement, Letter, Word};
