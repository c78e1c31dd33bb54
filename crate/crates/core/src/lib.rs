//! Exact and floating-point machinery for finite, affine, and hyperbolic
//! reflection groups: chamber geometry, the tilings cut out by the maps
//! w |-> (1 - w) applied to the fundamental chamber, inverse lookup of a
//! tile from a point, and the combinatorial structure of the resulting fans.

pub mod chamber;
pub mod element;
pub mod enumerate;
pub mod error;
pub mod group;
pub mod linalg;
pub mod polyhedron;
pub mod roots;
pub mod scalar;
pub mod solver;
pub mod space;
pub mod structure;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Backend, ScalarValue, Sign, DEFAULT_EPSILON};
