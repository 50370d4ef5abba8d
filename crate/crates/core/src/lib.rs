//! Exact piecewise-linear path machinery: a path groupoid over rational
//! coordinates, germ-level independence, hyphs and their directed refinement,
//! generalized connections with group values, Haar-based cylindrical
//! integration, and gauge transformations.
//!
//! All path-level computation is exact (arbitrary-precision rationals); group
//! backends are either exact finite groups or tolerance-based Lie groups.

pub mod connection;
pub mod error;
pub mod gauge;
pub mod geometry;
pub mod germs;
pub mod group;
pub mod groupoid;
pub mod hyph;
pub mod measure;

pub use error::{Error, Result};

pub mod prelude {
    //! Convenience re-exports of the most commonly used types.
    pub use crate::connection::{ExtensionPolicy, GeneralizedConnection};
    pub use crate::error::{Error, Result};
    pub use crate::gauge::GaugeTransform;
    pub use crate::geometry::{PathLocation, PlPath, Point, Rat};
    pub use crate::germs::{FreePoint, FreeSide};
    pub use crate::group::{GroupDescriptor, GroupElement};
    pub use crate::groupoid::{PathWord, ReducedPath, Sign};
    pub use crate::hyph::{Factorization, Hyph};
    pub use crate::measure::{CylindricalFunction, IntegrationResult, McParams};
}
