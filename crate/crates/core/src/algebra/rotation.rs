use nalgebra::{Matrix2, Matrix6};

use super::form::{form_to_endo, pair_index, SkewEndomorphism, TwoForm};
use super::AlgebraError;

const ROTATION_TOL: f64 = 1e-12;

/// An element of SO(6).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation {
    m: Matrix6<f64>,
}

impl Rotation {
    /// Checks `RᵀR = I` and `det R = 1` to `1e-12`.
    pub fn new(m: Matrix6<f64>) -> Result<Self, AlgebraError> {
        let orth = (m.transpose() * m - Matrix6::identity()).amax();
        let det = m.determinant();
        if !(orth <= ROTATION_TOL && (det - 1.0).abs() <= ROTATION_TOL) {
            return Err(AlgebraError::InvalidRotation { orthogonality: orth, det });
        }
        Ok(Self { m })
    }

    pub fn identity() -> Self {
        Self { m: Matrix6::identity() }
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.m
    }

    pub fn inverse(&self) -> Self {
        Self { m: self.m.transpose() }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { m: self.m * other.m }
    }

    /// `exp(X)` of a skew endomorphism.
    pub fn exp(x: &SkewEndomorphism) -> Self {
        Self { m: x.matrix().exp() }
    }

    /// Rotation by `theta` inside the coordinate plane `⟨e_i, e_j⟩` (one based),
    /// taking `e_i` towards `e_j`.
    pub fn plane(i: usize, j: usize, theta: f64) -> Self {
        let mut m = Matrix6::identity();
        let (s, c) = theta.sin_cos();
        let (i, j) = (i - 1, j - 1);
        m[(i, i)] = c;
        m[(j, j)] = c;
        m[(j, i)] = s;
        m[(i, j)] = -s;
        Self { m }
    }
}

/// `(θ₁, θ₂, θ₃)` acting by block rotations on `⟨e₁,e₂⟩, ⟨e₃,e₄⟩, ⟨e₅,e₆⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusElement {
    pub angles: [f64; 3],
}

impl TorusElement {
    pub fn new(angles: [f64; 3]) -> Self {
        Self { angles }
    }

    pub fn to_rotation(&self) -> Rotation {
        let mut m = Matrix6::zeros();
        for (k, &t) in self.angles.iter().enumerate() {
            let (s, c) = t.sin_cos();
            m.fixed_view_mut::<2, 2>(2 * k, 2 * k)
                .copy_from(&Matrix2::new(c, -s, s, c));
        }
        Rotation { m }
    }

    /// `t·ω`, with the invariant coefficients of `e¹², e³⁴, e⁵⁶` carried over verbatim.
    pub fn act(&self, form: &TwoForm) -> TwoForm {
        let mut c = *conjugate(form, &self.to_rotation()).coeffs();
        for (i, j) in [(1, 2), (3, 4), (5, 6)] {
            c[pair_index(i - 1, j - 1)] = form.coeff(i, j);
        }
        TwoForm::new(c).expect("finite coefficients")
    }
}

/// `R·ω`: the form whose endomorphism is `R 𝔉 Rᵀ`.
pub fn conjugate(form: &TwoForm, rot: &Rotation) -> TwoForm {
    let f = form_to_endo(form);
    SkewEndomorphism::from_matrix_unchecked(rot.m * f.matrix() * rot.m.transpose()).to_form()
}
