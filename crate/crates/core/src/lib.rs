//! Nearly G₂ geometry on the round seven-sphere and its hypersurfaces.
//!
//! Octonion arithmetic and cross products, exterior algebra in dimension
//! seven, the round nearly G₂ structure on S⁷, shape data of hypersurfaces
//! M⁶ ⊂ S⁷, and a finite-difference check of the eigenvalue identity
//! Δh = −(|A|² + 6)h for minimal hypersurfaces.

pub mod eigencheck;
pub mod error;
pub mod fd;
pub mod forms;
pub mod g2;
pub mod hypersurface;
pub mod identities;
pub mod octonion;
pub mod sphere;

pub use error::{GeomError, Result};
pub use forms::{AltForm, MetricTensor, Sym2};
pub use octonion::{cross2, cross3, oct_mul, Octonion, Vec7, Vec8};
