//! Coadjoint-orbit geometry of SO(6) for 2-forms on ℝ⁶: orbit
//! classification, toric moment polytopes, fibration projections, the
//! Klein correspondence between complex and product structures, and
//! integrability on the Iwasawa manifold.
//!
//! The Weyl group, Cartan points and the polytope engine are generic over
//! [`Scalar`], implemented for `f32`, `f64` and exact rationals.

pub mod algebra;
pub mod cartan;
pub mod iwasawa;
pub mod klein;
pub mod moment;
pub mod polytope;
pub mod scalar;
pub mod weyl;

pub use algebra::{
    canonical_triple, classify, classify_point, conjugate, eigen_split, AlgebraError, EigenSplit, OrbitClass,
    Rotation, SkewEndomorphism, TwoForm,
};
pub use cartan::{fundamental_weight, CartanPoint};
pub use iwasawa::{iwasawa_algebra, FrameAlgebra, InvariantOCS, InvariantOPS, IwasawaError};
pub use klein::{KleinError, MixedStructure, SimplePlaneForm};
pub use moment::{moment_polytope, mu_t, MomentError, SampleCloud};
pub use polytope::{hull, intersect, section, Facet, Polytope, PolytopeError};
pub use scalar::{ratio, Rational, Scalar};
pub use weyl::{to_chamber, weyl_group, weyl_orbit, RootVector, WeylElement, WeylError};

/// Cartan point with `f64` coordinates.
pub type FloatCartanPoint = CartanPoint<f64>;
/// Cartan point with exact rational coordinates.
pub type ExactCartanPoint = CartanPoint<Rational>;
/// Polytope with `f64` coordinates.
pub type FloatPolytope = Polytope<f64>;
/// Polytope with exact rational coordinates.
pub type ExactPolytope = Polytope<Rational>;
/// Facet with exact rational coefficients.
pub type ExactFacet = Facet<Rational>;
