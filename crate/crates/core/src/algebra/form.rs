use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix6, Vector6};
use serde::{Deserialize, Serialize};

use super::AlgebraError;
use crate::cartan::CartanPoint;

/// Index pairs `(i, j)`, `i < j`, zero based, in the coefficient order of [`TwoForm`].
pub const PAIRS: [(usize, usize); 15] = [
    (0, 1),
    (0, 2),
    (0, 3),
    (0, 4),
    (0, 5),
    (1, 2),
    (1, 3),
    (1, 4),
    (1, 5),
    (2, 3),
    (2, 4),
    (2, 5),
    (3, 4),
    (3, 5),
    (4, 5),
];

/// Position of `e^{ij}` (zero based, `i < j`) in the coefficient vector.
pub fn pair_index(i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < 6);
    // rows of the strict upper triangle have lengths 5, 4, 3, 2, 1
    i * (11 - i) / 2 + (j - i - 1)
}

/// A 2-form on ℝ⁶ in the basis `e^{ij}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawForm", into = "RawForm")]
pub struct TwoForm {
    coeffs: [f64; 15],
}

#[derive(Serialize, Deserialize)]
struct RawForm {
    coeffs: Vec<f64>,
}

impl TryFrom<RawForm> for TwoForm {
    type Error = AlgebraError;

    fn try_from(raw: RawForm) -> Result<Self, Self::Error> {
        let coeffs: [f64; 15] = raw
            .coeffs
            .try_into()
            .map_err(|v: Vec<f64>| AlgebraError::WrongLength(v.len()))?;
        TwoForm::new(coeffs)
    }
}

impl From<TwoForm> for RawForm {
    fn from(f: TwoForm) -> Self {
        RawForm { coeffs: f.coeffs.to_vec() }
    }
}

impl TwoForm {
    pub fn new(coeffs: [f64; 15]) -> Result<Self, AlgebraError> {
        if coeffs.iter().all(|c| c.is_finite()) {
            Ok(Self { coeffs })
        } else {
            Err(AlgebraError::NonFinite)
        }
    }

    pub fn zero() -> Self {
        Self { coeffs: [0.0; 15] }
    }

    /// `e^{ij}` with one-based indices; `basis(j, i) = −basis(i, j)`.
    pub fn basis(i: usize, j: usize) -> Self {
        let mut f = Self::zero();
        f.set(i, j, 1.0);
        f
    }

    /// Sum of `c·e^{ij}` terms, one-based indices.
    pub fn from_terms(terms: &[(usize, usize, f64)]) -> Self {
        let mut f = Self::zero();
        for &(i, j, c) in terms {
            let old = f.coeff(i, j);
            f.set(i, j, old + c);
        }
        f
    }

    /// `e^{12} + e^{34} + e^{56}`.
    pub fn omega0() -> Self {
        Self::from_terms(&[(1, 2, 1.0), (3, 4, 1.0), (5, 6, 1.0)])
    }

    /// `x e^{12} + y e^{34} + z e^{56}`.
    pub fn from_cartan(p: &CartanPoint) -> Self {
        Self::from_terms(&[(1, 2, p.x), (3, 4, p.y), (5, 6, p.z)])
    }

    pub fn coeffs(&self) -> &[f64; 15] {
        &self.coeffs
    }

    /// Coefficient of `e^{ij}`, one-based, antisymmetric in `(i, j)`.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        assert!((1..=6).contains(&i) && (1..=6).contains(&j));
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.coeffs[pair_index(i - 1, j - 1)],
            std::cmp::Ordering::Greater => -self.coeffs[pair_index(j - 1, i - 1)],
            std::cmp::Ordering::Equal => 0.0,
        }
    }

    fn set(&mut self, i: usize, j: usize, c: f64) {
        assert!((1..=6).contains(&i) && (1..=6).contains(&j) && i != j);
        if i < j {
            self.coeffs[pair_index(i - 1, j - 1)] = c;
        } else {
            self.coeffs[pair_index(j - 1, i - 1)] = -c;
        }
    }

    /// `u ∧ v`, with `(u∧v)_{ij} = u_i v_j − u_j v_i`.
    pub fn wedge(u: &Vector6<f64>, v: &Vector6<f64>) -> Self {
        let mut coeffs = [0.0; 15];
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            coeffs[k] = u[i] * v[j] - u[j] * v[i];
        }
        Self { coeffs }
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Coefficients of `ω∧ω / 2` on `e^{ijkl}`, the Plücker relations of a simple form.
    pub fn half_square(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(15);
        for i in 1..=6 {
            for j in i + 1..=6 {
                for k in j + 1..=6 {
                    for l in k + 1..=6 {
                        out.push(
                            self.coeff(i, j) * self.coeff(k, l) - self.coeff(i, k) * self.coeff(j, l)
                                + self.coeff(i, l) * self.coeff(j, k),
                        );
                    }
                }
            }
        }
        out
    }

    /// True when `ω∧ω = 0` within `tol`, i.e. `ω` is decomposable.
    pub fn is_simple(&self, tol: f64) -> bool {
        self.half_square().iter().all(|c| c.abs() <= tol)
    }

    pub fn to_endo(&self) -> SkewEndomorphism {
        form_to_endo(self)
    }
}

impl Add for TwoForm {
    type Output = TwoForm;
    fn add(mut self, rhs: TwoForm) -> TwoForm {
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *a += b;
        }
        self
    }
}

impl Sub for TwoForm {
    type Output = TwoForm;
    fn sub(self, rhs: TwoForm) -> TwoForm {
        self + (-rhs)
    }
}

impl Neg for TwoForm {
    type Output = TwoForm;
    fn neg(self) -> TwoForm {
        self * -1.0
    }
}

impl Mul<f64> for TwoForm {
    type Output = TwoForm;
    fn mul(mut self, s: f64) -> TwoForm {
        for a in self.coeffs.iter_mut() {
            *a *= s;
        }
        self
    }
}

impl Mul<TwoForm> for f64 {
    type Output = TwoForm;
    fn mul(self, f: TwoForm) -> TwoForm {
        f * self
    }
}

impl fmt::Display for TwoForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            let c = self.coeffs[k];
            if c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
            } else if c < 0.0 {
                write!(f, "-")?;
            }
            write!(f, "{}e{}{}", c.abs(), i + 1, j + 1)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A skew-symmetric endomorphism of ℝ⁶.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkewEndomorphism {
    m: Matrix6<f64>,
}

impl SkewEndomorphism {
    /// Accepts `m` if `m + mᵀ` vanishes to `1e-12` and stores its skew part.
    pub fn from_matrix(m: Matrix6<f64>) -> Result<Self, AlgebraError> {
        let sym = (m + m.transpose()).amax();
        if !m.iter().all(|c| c.is_finite()) {
            return Err(AlgebraError::NonFinite);
        }
        if sym > 1e-12 * m.amax().max(1.0) {
            return Err(AlgebraError::NotSkew(sym));
        }
        Ok(Self { m: (m - m.transpose()) * 0.5 })
    }

    pub(crate) fn from_matrix_unchecked(m: Matrix6<f64>) -> Self {
        Self { m: (m - m.transpose()) * 0.5 }
    }

    pub fn zero() -> Self {
        Self { m: Matrix6::zeros() }
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.m
    }

    pub fn apply(&self, v: &Vector6<f64>) -> Vector6<f64> {
        self.m * v
    }

    /// `XY − YX`.
    pub fn commutator(&self, other: &Self) -> Self {
        Self::from_matrix_unchecked(self.m * other.m - other.m * self.m)
    }

    pub fn to_form(&self) -> TwoForm {
        endo_to_form(self)
    }
}

/// The endomorphism `𝔉` with `g(𝔉X, Y) = ω(X, Y)`.
///
/// Entry `[j][i]` is the coefficient of `e^{ij}` for `i < j`, so `e^{12}`
/// maps `e₁` to `e₂`.
pub fn form_to_endo(form: &TwoForm) -> SkewEndomorphism {
    let mut m = Matrix6::zeros();
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        m[(j, i)] = form.coeffs[k];
        m[(i, j)] = -form.coeffs[k];
    }
    SkewEndomorphism { m }
}

pub fn endo_to_form(endo: &SkewEndomorphism) -> TwoForm {
    let mut coeffs = [0.0; 15];
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        coeffs[k] = endo.m[(j, i)];
    }
    TwoForm { coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_index_matches_table() {
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            assert_eq!(pair_index(i, j), k);
        }
    }

    #[test]
    fn e12_endomorphism() {
        let m = *form_to_endo(&TwoForm::basis(1, 2)).matrix();
        for r in 0..6 {
            for c in 0..6 {
                let want = match (r, c) {
                    (1, 0) => 1.0,
                    (0, 1) => -1.0,
                    _ => 0.0,
                };
                assert_eq!(m[(r, c)], want);
            }
        }
        assert_eq!(*form_to_endo(&TwoForm::zero()).matrix(), Matrix6::zeros());
    }

    #[test]
    fn omega0_is_a_complex_structure() {
        let j = *form_to_endo(&TwoForm::omega0()).matrix();
        assert_eq!(j * j, -Matrix6::identity());
    }

    #[test]
    fn metric_pairing_reproduces_form() {
        let f = TwoForm::new(core::array::from_fn(|k| (k as f64 * 0.37).sin())).unwrap();
        let m = *f.to_endo().matrix();
        for i in 0..6 {
            for j in 0..6 {
                // g(𝔉 e_i, e_j) = (𝔉 e_i)_j = m[j][i]
                assert_eq!(m[(j, i)], f.coeff(i + 1, j + 1));
            }
        }
    }

    #[test]
    fn wedge_and_basis_agree() {
        let e = |k: usize| Vector6::from_fn(|i, _| if i == k { 1.0 } else { 0.0 });
        assert_eq!(TwoForm::wedge(&e(0), &e(1)), TwoForm::basis(1, 2));
        assert_eq!(TwoForm::wedge(&e(3), &e(1)), -TwoForm::basis(2, 4));
        assert_eq!(TwoForm::basis(4, 2), -TwoForm::basis(2, 4));
    }

    #[test]
    fn simple_forms() {
        assert!(TwoForm::basis(5, 6).is_simple(0.0));
        assert!(!TwoForm::omega0().is_simple(1e-12));
        let u = Vector6::new(1.0, 2.0, 0.0, -1.0, 0.5, 3.0);
        let v = Vector6::new(0.0, 1.0, 1.0, 2.0, -2.0, 0.25);
        assert!(TwoForm::wedge(&u, &v).is_simple(1e-12));
    }

    #[test]
    fn json_round_trip() {
        let s = serde_json::to_string(&TwoForm::basis(1, 3)).unwrap();
        assert_eq!(s, r#"{"coeffs":[0.0,1.0,0.0,0.0,0.0,0.0,0.0,0.0,0.0,0.0,0.0,0.0,0.0,0.0,0.0]}"#);
        let back: TwoForm = serde_json::from_str(&s).unwrap();
        assert_eq!(back, TwoForm::basis(1, 3));
        assert!(serde_json::from_str::<TwoForm>(r#"{"coeffs":[1.0]}"#).is_err());
    }

    #[test]
    fn display() {
        let f = TwoForm::from_terms(&[(1, 2, 1.0), (3, 4, -2.0)]);
        assert_eq!(f.to_string(), "1e12 - 2e34");
    }
}
