use nalgebra::{Matrix4, Matrix6};
use num_complex::Complex64;

use super::form::{form_to_endo, SkewEndomorphism, TwoForm};
use super::rotation::TorusElement;
use super::AlgebraError;
use crate::cartan::CartanPoint;

/// KKS pairing `⟨λ, [X, Y]⟩ = ½ tr(𝔉_λ (XY − YX)ᵀ)`.
///
/// Evaluated as `½ Σ (F∘(XY))ᵢⱼ − ½ Σ (F∘(YX))ᵢⱼ` with the two halves
/// computed by the same code path, so swapping `X` and `Y` negates the
/// result bit for bit.
pub fn kks_pairing(base: &TwoForm, x: &SkewEndomorphism, y: &SkewEndomorphism) -> f64 {
    let f = form_to_endo(base);
    let half = |a: &SkewEndomorphism, b: &SkewEndomorphism| f.matrix().component_mul(&(a.matrix() * b.matrix())).sum();
    0.5 * (half(x, y) - half(y, x))
}

/// Weight `(θ₁, …, θ₄)` of the SU(4) torus `diag(e^{iθ₁}, …, e^{iθ₄})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinWeight {
    pub theta: [f64; 4],
}

impl SpinWeight {
    pub fn new(theta: [f64; 4]) -> Result<Self, AlgebraError> {
        let s: f64 = theta.iter().sum();
        if s.abs() >= 1e-12 {
            return Err(AlgebraError::WeightNotTraceFree(s));
        }
        Ok(Self { theta })
    }
}

/// Rows are `diag(−1,−1,1,1)`, `diag(−1,1,−1,1)`, `diag(−1,1,1,−1)`.
pub const SU4_TORUS_BASIS: [[f64; 4]; 3] = [
    [-1.0, -1.0, 1.0, 1.0],
    [-1.0, 1.0, -1.0, 1.0],
    [-1.0, 1.0, 1.0, -1.0],
];

/// Coordinates of `diag(θ)` against [`SU4_TORUS_BASIS`], each divided by its squared norm 4.
pub fn spin_weight_to_cartan(w: &SpinWeight) -> Result<CartanPoint, AlgebraError> {
    let s: f64 = w.theta.iter().sum();
    if s.abs() >= 1e-12 {
        return Err(AlgebraError::WeightNotTraceFree(s));
    }
    let c = SU4_TORUS_BASIS.map(|b| b.iter().zip(&w.theta).map(|(p, q)| p * q).sum::<f64>() / 4.0);
    Ok(CartanPoint::from_array(c))
}

/// The torus weight of ν₁.
pub const NU1_WEIGHT: [f64; 4] = [-3.0, 1.0, 1.0, 1.0];

/// Index pairs `(a, b)` of `v_a∧v_b` in the order `v01, v23, v02, v31, v03, v12`.
const WEDGE_PAIRS: [(usize, usize); 6] = [(0, 1), (2, 3), (0, 2), (3, 1), (0, 3), (1, 2)];

/// Result of comparing the SO(6) and SU(4) pictures of one torus loop.
#[derive(Clone, Debug)]
pub struct SpinCoverCheck {
    pub theta: f64,
    /// `Γ(θ)` on ℝ⁶.
    pub so6_action: Matrix6<f64>,
    /// `exp(iθ/2 · ν₁)` on ℂ⁴.
    pub su4_element: Matrix4<Complex64>,
    /// The same element acting on `Λ²ℂ⁴` in the basis `v01, v23, v02, v31, v03, v12`.
    pub su4_on_wedge: Matrix6<Complex64>,
    /// `‖S Γ − D S‖₂` with `S` the real-to-wedge basis map.
    pub discrepancy: f64,
}

/// Columns are `e¹ … e⁶` written in the wedge basis:
/// `e¹ = v01 + v23`, `e² = −i v01 + i v23`, and likewise for the other two pairs.
pub fn wedge_basis_map() -> Matrix6<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut s = Matrix6::zeros();
    for k in 0..3 {
        s[(2 * k, 2 * k)] = one;
        s[(2 * k + 1, 2 * k)] = one;
        s[(2 * k, 2 * k + 1)] = -i;
        s[(2 * k + 1, 2 * k + 1)] = i;
    }
    s
}

/// Compares `Γ(θ)`, the simultaneous rotation of all three planes, with the
/// action of `diag(e^{iθ wₐ/2})` on `Λ²ℂ⁴`, `w = (−3, 1, 1, 1)`.
pub fn spin_cover_check(theta: f64) -> SpinCoverCheck {
    let gamma = *TorusElement::new([theta; 3]).to_rotation().matrix();
    let phase = |t: f64| Complex64::from_polar(1.0, t);
    let su4 = Matrix4::from_diagonal(&nalgebra::Vector4::from_fn(|a, _| phase(theta * NU1_WEIGHT[a] / 2.0)));
    let wedge = Matrix6::from_diagonal(&nalgebra::Vector6::from_fn(|k, _| {
        let (a, b) = WEDGE_PAIRS[k];
        phase(theta * (NU1_WEIGHT[a] + NU1_WEIGHT[b]) / 2.0)
    }));
    let s = wedge_basis_map();
    let diff = s * gamma.map(|c| Complex64::new(c, 0.0)) - wedge * s;
    let discrepancy = diff.singular_values().max();
    SpinCoverCheck { theta, so6_action: gamma, su4_element: su4, su4_on_wedge: wedge, discrepancy }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::form::form_to_endo;

    #[test]
    fn nu1_weight_maps_to_nu1() {
        let p = spin_weight_to_cartan(&SpinWeight::new(NU1_WEIGHT).unwrap()).unwrap();
        assert_eq!(p, CartanPoint::new(1.0, 1.0, 1.0));
        let z = spin_weight_to_cartan(&SpinWeight::new([0.0; 4]).unwrap()).unwrap();
        assert_eq!(z, CartanPoint::origin());
    }

    #[test]
    fn nu2_weight_by_solving_the_pairing_system() {
        // oracle: θ = Σ cₖ bₖ reproduces coordinates cₖ since the bₖ are orthogonal with norm² 4
        let theta: [f64; 4] = core::array::from_fn(|a| SU4_TORUS_BASIS[2][a]);
        let p = spin_weight_to_cartan(&SpinWeight { theta }).unwrap();
        assert_eq!(p, CartanPoint::new(0.0, 0.0, 1.0));
        for i in 0..3 {
            for j in 0..3 {
                let d: f64 = (0..4).map(|a| SU4_TORUS_BASIS[i][a] * SU4_TORUS_BASIS[j][a]).sum();
                assert_eq!(d, if i == j { 4.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn trace_must_vanish() {
        assert!(matches!(SpinWeight::new([1.0, 0.0, 0.0, 0.0]), Err(AlgebraError::WeightNotTraceFree(_))));
        assert!(spin_weight_to_cartan(&SpinWeight { theta: [1.0, 0.0, 0.0, 0.0] }).is_err());
    }

    #[test]
    fn full_loop_lifts_to_minus_identity() {
        let c = spin_cover_check(2.0 * std::f64::consts::PI);
        assert!((c.so6_action - Matrix6::identity()).amax() < 1e-12);
        assert!((c.su4_element + Matrix4::identity()).map(|z| z.norm()).max() < 1e-12);
        assert!(c.discrepancy < 1e-12);
        let z = spin_cover_check(0.0);
        assert_eq!(z.so6_action, Matrix6::identity());
        assert_eq!(z.discrepancy, 0.0);
    }

    #[test]
    fn first_basis_vector_transports() {
        let t = std::f64::consts::PI / 3.0;
        let c = spin_cover_check(t);
        let g = c.so6_action;
        assert!((g[(0, 0)] - t.cos()).abs() < 1e-15 && (g[(1, 0)] - t.sin()).abs() < 1e-15);
        let img = wedge_basis_map() * g.column(0).map(|x| Complex64::new(x, 0.0));
        assert!((img[0] - Complex64::from_polar(1.0, -t)).norm() < 1e-15);
        assert!((img[1] - Complex64::from_polar(1.0, t)).norm() < 1e-15);
        assert!(c.discrepancy < 1e-12);
    }

    #[test]
    fn kks_is_antisymmetric_and_matches_trace() {
        let base = TwoForm::new(core::array::from_fn(|k| (k as f64 * 1.3).sin())).unwrap();
        let x = form_to_endo(&TwoForm::new(core::array::from_fn(|k| (k as f64 * 0.7).cos())).unwrap());
        let y = form_to_endo(&TwoForm::new(core::array::from_fn(|k| (k as f64 * 2.1 + 0.3).sin())).unwrap());
        assert_eq!(kks_pairing(&base, &x, &y), -kks_pairing(&base, &y, &x));
        assert_eq!(kks_pairing(&base, &x, &x), 0.0);
        let f = *form_to_endo(&base).matrix();
        let comm = x.matrix() * y.matrix() - y.matrix() * x.matrix();
        let brute = 0.5 * (f * comm.transpose()).trace();
        assert!((kks_pairing(&base, &x, &y) - brute).abs() < 1e-12);
    }

    #[test]
    fn kks_vanishes_on_stabilizer() {
        // e^{12} commutes with J₀
        let x = form_to_endo(&TwoForm::basis(1, 2));
        let y = form_to_endo(&TwoForm::new(core::array::from_fn(|k| k as f64)).unwrap());
        assert_eq!(x.commutator(&form_to_endo(&TwoForm::omega0())), SkewEndomorphism::zero());
        assert!(kks_pairing(&TwoForm::omega0(), &x, &y).abs() < 1e-12);
    }
}
