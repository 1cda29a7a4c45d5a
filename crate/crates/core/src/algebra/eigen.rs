use nalgebra::{DMatrix, Matrix6, Vector6};

use super::form::{SkewEndomorphism, TwoForm};
use super::AlgebraError;

/// An oriented invariant 2-plane `⟨u, v⟩` with `𝔉u = λv`, `𝔉v = −λu`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenPlane {
    pub u: Vector6<f64>,
    pub v: Vector6<f64>,
    pub value: f64,
}

/// Orthogonal splitting of ℝ⁶ into three invariant planes of a skew endomorphism.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenSplit {
    pub planes: [EigenPlane; 3],
}

impl EigenSplit {
    pub fn values(&self) -> [f64; 3] {
        self.planes.map(|p| p.value)
    }

    /// Columns `u₁ v₁ u₂ v₂ u₃ v₃`; a rotation.
    pub fn frame(&self) -> Matrix6<f64> {
        let mut m = Matrix6::zeros();
        for (k, p) in self.planes.iter().enumerate() {
            m.set_column(2 * k, &p.u);
            m.set_column(2 * k + 1, &p.v);
        }
        m
    }

    /// `Σ λₖ uₖ∧vₖ`.
    pub fn reconstruct(&self) -> TwoForm {
        self.planes
            .iter()
            .fold(TwoForm::zero(), |acc, p| acc + TwoForm::wedge(&p.u, &p.v) * p.value)
    }
}

const MAX_ITER: usize = 10_000;

fn top_eigenvector(s: &DMatrix<f64>) -> Result<nalgebra::DVector<f64>, AlgebraError> {
    let eig = s
        .clone()
        .try_symmetric_eigen(f64::EPSILON, MAX_ITER)
        .ok_or(AlgebraError::NonConvergence)?;
    let k = eig.eigenvalues.imax();
    Ok(eig.eigenvectors.column(k).into_owned())
}

/// Orthonormal basis of the orthogonal complement of `used`.
fn complement(used: &[Vector6<f64>]) -> Result<Vec<Vector6<f64>>, AlgebraError> {
    let mut p = Matrix6::identity();
    for u in used {
        p -= u * u.transpose();
    }
    let eig = nalgebra::SymmetricEigen::try_new(p, f64::EPSILON, MAX_ITER)
        .ok_or(AlgebraError::NonConvergence)?;
    Ok((0..6)
        .filter(|&k| eig.eigenvalues[k] > 0.5)
        .map(|k| eig.eigenvectors.column(k).into_owned())
        .collect())
}

/// Splits `endo` into three orthogonal invariant planes by deflation on `−𝔉²`.
///
/// Planes come out ordered by decreasing `|λ|`, each oriented so that `λ ≥ 0`,
/// except that the last value changes sign when needed to make the frame
/// positively oriented. Planes whose `|𝔉u|` falls below `tol·max(1, |𝔉|)` are
/// treated as kernel planes.
pub fn eigen_split(endo: &SkewEndomorphism, tol: f64) -> Result<EigenSplit, AlgebraError> {
    let f = *endo.matrix();
    let s = -(f * f);
    let fscale = f.amax().max(1.0);
    let mut used: Vec<Vector6<f64>> = Vec::with_capacity(6);
    let mut planes = Vec::with_capacity(3);

    for _ in 0..3 {
        let q = complement(&used)?;
        let qm = DMatrix::from_fn(6, q.len(), |r, c| q[c][r]);
        let restricted = qm.transpose() * DMatrix::from_column_slice(6, 6, s.as_slice()) * &qm;
        let y = top_eigenvector(&restricted)?;
        let mut u: Vector6<f64> = Vector6::from_iterator((&qm * y).iter().copied());
        u.normalize_mut();

        let fu = f * u;
        let n = fu.norm();
        let (v, value) = if n > tol * fscale {
            let v = fu / n;
            (v, v.dot(&fu))
        } else {
            // kernel: any unit vector of the complement orthogonal to u
            let v = q
                .iter()
                .map(|c| c - u * u.dot(c))
                .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                .ok_or(AlgebraError::NonConvergence)?
                .normalize();
            (v, 0.0)
        };
        used.push(u);
        used.push(v);
        planes.push(EigenPlane { u, v, value });
    }

    planes.sort_by(|a, b| b.value.abs().total_cmp(&a.value.abs()));
    let mut split = EigenSplit { planes: [planes[0], planes[1], planes[2]] };
    if split.frame().determinant() < 0.0 {
        let last = &mut split.planes[2];
        last.v = -last.v;
        last.value = if last.value == 0.0 { 0.0 } else { -last.value };
    }
    Ok(split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::form::form_to_endo;

    #[test]
    fn omega0_splits_into_coordinate_planes() {
        let s = eigen_split(&form_to_endo(&TwoForm::omega0()), 1e-12).unwrap();
        assert!(s.values().iter().all(|v| (v - 1.0).abs() < 1e-14));
        assert!(s.reconstruct().max_abs_diff(&TwoForm::omega0()) < 1e-14);
        assert!((s.frame().determinant() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn simple_form_has_two_kernel_planes() {
        let s = eigen_split(&form_to_endo(&TwoForm::basis(5, 6)), 1e-12).unwrap();
        let vals = s.values();
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert_eq!(&vals[1..], &[0.0, 0.0]);
        let p = s.planes[0];
        assert!((p.u[4].powi(2) + p.u[5].powi(2) - 1.0).abs() < 1e-14);
        for k in 0..4 {
            assert!(p.u[k].abs() < 1e-14 && p.v[k].abs() < 1e-14);
        }
        assert!(s.reconstruct().max_abs_diff(&TwoForm::basis(5, 6)) < 1e-14);
    }

    #[test]
    fn orientation_is_forced_positive() {
        let f = TwoForm::from_terms(&[(1, 2, 3.0), (3, 4, 2.0), (5, 6, -1.0)]);
        let s = eigen_split(&form_to_endo(&f), 1e-12).unwrap();
        let v = s.values();
        assert!((v[0] - 3.0).abs() < 1e-13 && (v[1] - 2.0).abs() < 1e-13 && (v[2] + 1.0).abs() < 1e-13);
        assert!(s.reconstruct().max_abs_diff(&f) < 1e-13);

        let neg = eigen_split(&form_to_endo(&-TwoForm::omega0()), 1e-12).unwrap();
        let nv = neg.values();
        assert!((nv[0] - 1.0).abs() < 1e-14 && (nv[1] - 1.0).abs() < 1e-14 && (nv[2] + 1.0).abs() < 1e-14);
        assert!(neg.reconstruct().max_abs_diff(&-TwoForm::omega0()) < 1e-14);
    }

    #[test]
    fn planes_are_invariant() {
        let f = TwoForm::new(core::array::from_fn(|k| ((k * k) as f64 * 0.61).sin())).unwrap();
        let endo = form_to_endo(&f);
        let s = eigen_split(&endo, 1e-12).unwrap();
        let m = *endo.matrix();
        for p in &s.planes {
            assert!((m * p.u - p.v * p.value).amax() < 1e-12);
            assert!((m * p.v + p.u * p.value).amax() < 1e-12);
        }
        let fr = s.frame();
        assert!((fr.transpose() * fr - Matrix6::identity()).amax() < 1e-12);
        assert!(fr.determinant() > 0.0);
        assert!(s.reconstruct().max_abs_diff(&f) < 1e-12);
    }
}
