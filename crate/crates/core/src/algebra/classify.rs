use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::eigen::eigen_split;
use super::form::{form_to_endo, TwoForm};
use super::AlgebraError;
use crate::cartan::CartanPoint;
use crate::weyl::to_chamber;

/// Default relative tolerance for equality tests on eigenvalues.
pub const DEFAULT_TOL: f64 = 1e-8;

/// SO(6)-orbit type of a 2-form, read off its chamber representative `(x, y, z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrbitClass {
    Zero,
    Generic,
    PPlus,
    PMinus,
    Grassmannian,
    F1,
    F2,
    F3Plus,
    F3Zero,
    F3Minus,
}

impl OrbitClass {
    pub const ALL: [OrbitClass; 10] = [
        OrbitClass::Zero,
        OrbitClass::Generic,
        OrbitClass::PPlus,
        OrbitClass::PMinus,
        OrbitClass::Grassmannian,
        OrbitClass::F1,
        OrbitClass::F2,
        OrbitClass::F3Plus,
        OrbitClass::F3Zero,
        OrbitClass::F3Minus,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            OrbitClass::Zero => "Zero",
            OrbitClass::Generic => "Generic",
            OrbitClass::PPlus => "PPlus",
            OrbitClass::PMinus => "PMinus",
            OrbitClass::Grassmannian => "Grassmannian",
            OrbitClass::F1 => "F1",
            OrbitClass::F2 => "F2",
            OrbitClass::F3Plus => "F3Plus",
            OrbitClass::F3Zero => "F3Zero",
            OrbitClass::F3Minus => "F3Minus",
        }
    }

    /// Dimension of the stabilizer subalgebra in 𝔰𝔬(6).
    pub fn stabilizer_dim(&self) -> usize {
        match self {
            OrbitClass::Zero => 15,
            OrbitClass::Generic => 3,
            OrbitClass::PPlus | OrbitClass::PMinus => 9,
            OrbitClass::Grassmannian => 7,
            OrbitClass::F1
            | OrbitClass::F2
            | OrbitClass::F3Plus
            | OrbitClass::F3Zero
            | OrbitClass::F3Minus => 5,
        }
    }

    pub fn orbit_dim(&self) -> usize {
        15 - self.stabilizer_dim()
    }
}

impl fmt::Display for OrbitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for OrbitClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OrbitClass::ALL
            .into_iter()
            .find(|c| c.tag() == s)
            .ok_or_else(|| format!("unknown orbit class {s:?}"))
    }
}

fn rel_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

/// Chamber representative `z ≥ x ≥ |y|` of the signed eigenvalue triple.
pub fn canonical_triple(form: &TwoForm, tol: f64) -> Result<CartanPoint, AlgebraError> {
    let split = eigen_split(&form_to_endo(form), tol)?;
    let (p, _) = to_chamber(&CartanPoint::from_array(split.values()));
    Ok(p)
}

/// Classifies a chamber point by its equality pattern.
///
/// Equalities among `z, x, y, −y, 0` are tested at relative tolerance. If
/// they are not transitive the point sits within tolerance of two different
/// patterns, and the coarser one (the transitive closure) is returned inside
/// [`AlgebraError::AmbiguousClass`].
pub fn classify_point(p: &CartanPoint, tol: f64) -> Result<OrbitClass, AlgebraError> {
    let vals = [p.z, p.x, p.y, -p.y, 0.0];
    let mut eq = [[false; 5]; 5];
    for i in 0..5 {
        for j in 0..5 {
            eq[i][j] = rel_eq(vals[i], vals[j], tol);
        }
    }
    let mut closure = eq;
    for k in 0..5 {
        for i in 0..5 {
            for j in 0..5 {
                closure[i][j] |= closure[i][k] && closure[k][j];
            }
        }
    }
    let class = pattern(&closure, p.y);
    if closure != eq {
        return Err(AlgebraError::AmbiguousClass { coarser: class });
    }
    Ok(class)
}

fn pattern(eq: &[[bool; 5]; 5], y: f64) -> OrbitClass {
    const Z: usize = 0;
    const X: usize = 1;
    const Y: usize = 2;
    const NY: usize = 3;
    const O: usize = 4;
    if eq[Z][O] {
        OrbitClass::Zero
    } else if eq[X][O] {
        OrbitClass::Grassmannian
    } else if eq[Z][X] {
        if eq[X][Y] {
            OrbitClass::PPlus
        } else if eq[X][NY] {
            OrbitClass::PMinus
        } else if eq[Y][O] {
            OrbitClass::F3Zero
        } else if y > 0.0 {
            OrbitClass::F3Plus
        } else {
            OrbitClass::F3Minus
        }
    } else if eq[X][Y] {
        OrbitClass::F1
    } else if eq[X][NY] {
        OrbitClass::F2
    } else {
        OrbitClass::Generic
    }
}

/// Orbit type of `form`.
pub fn classify(form: &TwoForm, tol: f64) -> Result<OrbitClass, AlgebraError> {
    classify_point(&canonical_triple(form, tol)?, tol)
}
