//! 2-forms on ℝ⁶, skew endomorphisms, eigen-splitting and orbit classification.

mod classify;
mod eigen;
mod form;
mod rotation;
mod spin;

use thiserror::Error;

pub use classify::{canonical_triple, classify, classify_point, OrbitClass, DEFAULT_TOL};
pub use eigen::{eigen_split, EigenPlane, EigenSplit};
pub use form::{endo_to_form, form_to_endo, pair_index, SkewEndomorphism, TwoForm, PAIRS};
pub use rotation::{conjugate, Rotation, TorusElement};
pub use spin::{
    kks_pairing, spin_cover_check, spin_weight_to_cartan, wedge_basis_map, SpinCoverCheck, SpinWeight,
    NU1_WEIGHT, SU4_TORUS_BASIS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("expected 15 coefficients, got {0}")]
    WrongLength(usize),
    #[error("matrix is not skew-symmetric (|M + Mᵀ| = {0:e})")]
    NotSkew(f64),
    #[error("not a rotation (|RᵀR − I| = {orthogonality:e}, det = {det})")]
    InvalidRotation { orthogonality: f64, det: f64 },
    #[error("symmetric eigensolver did not converge")]
    NonConvergence,
    #[error("orbit pattern is ambiguous at this tolerance; coarser class is {coarser}")]
    AmbiguousClass { coarser: OrbitClass },
    #[error("spin weight is not trace free (sum = {0:e})")]
    WeightNotTraceFree(f64),
}
