//! Projections between orbits, the real Klein correspondence between
//! compatible complex and product structures, and the explicit inverse
//! images of edges and squares under the moment map.

use nalgebra::{Matrix6, SymmetricEigen, Vector6};
use thiserror::Error;

use crate::algebra::{
    canonical_triple, classify, eigen_split, endo_to_form, form_to_endo, AlgebraError, OrbitClass,
    SkewEndomorphism, TwoForm,
};
use crate::cartan::CartanPoint;
use crate::moment::{moment_polytope, mu_t};
use crate::polytope::Polytope;
use crate::weyl::{roots, to_chamber};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KleinError {
    #[error("target multiplicity pattern does not coarsen the form's pattern")]
    IncompatiblePattern,
    #[error("expected a form of class {expected}, got {found}")]
    WrongClass { expected: OrbitClass, found: OrbitClass },
    #[error("vector is degenerate for this construction (|v∧Jv| = {0:e})")]
    DegenerateVector(f64),
    #[error("parameters violate the unit-norm constraint (deviation {0:e})")]
    NormViolation(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("the form cannot orient its kernel")]
    DegenerateOrientation,
    #[error("not an orthogonal complex structure (|J² + I| = {0:e})")]
    NotComplexStructure(f64),
    #[error("not a compatible mixed structure: {0}")]
    Incompatible(&'static str),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

const TOL: f64 = 1e-8;

/// A unit decomposable 2-form `f¹∧f²`: an oriented 2-plane 𝒱 and its
/// orthogonal complement ℋ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimplePlaneForm {
    form: TwoForm,
}

impl SimplePlaneForm {
    /// Accepts `form` if `ω∧ω = 0` and `|ω| = 1` to `tol`.
    pub fn new(form: TwoForm, tol: f64) -> Result<Self, KleinError> {
        let dev = (form.norm() - 1.0).abs();
        if dev > tol {
            return Err(KleinError::NormViolation(dev));
        }
        if !form.is_simple(tol) {
            return Err(KleinError::Incompatible("form is not decomposable"));
        }
        Ok(Self { form })
    }

    /// `normalize(u∧v)`.
    pub fn from_vectors(u: &Vector6<f64>, v: &Vector6<f64>) -> Result<Self, KleinError> {
        let w = TwoForm::wedge(u, v);
        let n = w.norm();
        if n < 1e-12 {
            return Err(KleinError::DegenerateVector(n));
        }
        Ok(Self { form: w * (1.0 / n) })
    }

    pub fn form(&self) -> &TwoForm {
        &self.form
    }

    /// Orthonormal `(f₁, f₂)` with `f₁∧f₂ = ω`.
    pub fn plane_basis(&self) -> (Vector6<f64>, Vector6<f64>) {
        let f = *form_to_endo(&self.form).matrix();
        // f₁: the coordinate vector with the largest image, projected into 𝒱
        let k = (0..6)
            .max_by(|&a, &b| f.column(a).norm().total_cmp(&f.column(b).norm()))
            .expect("six columns");
        let f2 = f.column(k).normalize();
        let f1 = -(f * f2);
        (f1.normalize(), f2)
    }

    /// Orthogonal projector onto 𝒱.
    pub fn projector(&self) -> Matrix6<f64> {
        let f = *form_to_endo(&self.form).matrix();
        -(f * f)
    }

    /// Orthonormal basis `h₁..h₄` of ℋ with `(f₁, f₂, h₁, …, h₄)` positively oriented.
    ///
    /// Built by pivoted Gram–Schmidt on the coordinate vectors, so a
    /// coordinate plane gets coordinate vectors in increasing order.
    pub fn kernel_basis(&self) -> [Vector6<f64>; 4] {
        let proj_h = Matrix6::identity() - self.projector();
        let mut basis: Vec<Vector6<f64>> = Vec::with_capacity(4);
        let residual = |k: usize, basis: &[Vector6<f64>]| {
            let mut r: Vector6<f64> = proj_h.column(k).into_owned();
            for b in basis {
                r -= b * b.dot(&r);
            }
            r
        };
        for _ in 0..4 {
            let mut best = (0, -1.0);
            for k in 0..6 {
                let n = residual(k, &basis).norm();
                if n > best.1 + 1e-12 {
                    best = (k, n);
                }
            }
            basis.push(residual(best.0, &basis).normalize());
        }
        let (f1, f2) = self.plane_basis();
        let mut m = Matrix6::zeros();
        m.set_column(0, &f1);
        m.set_column(1, &f2);
        for (k, b) in basis.iter().enumerate() {
            m.set_column(k + 2, b);
        }
        if m.determinant() < 0.0 {
            basis[3] = -basis[3];
        }
        [basis[0], basis[1], basis[2], basis[3]]
    }
}

/// Self-dual basis `h¹²+h³⁴, h¹³+h⁴², h¹⁴+h²³` of an oriented 4-space.
fn self_dual(h: &[Vector6<f64>; 4]) -> [TwoForm; 3] {
    let w = |a: usize, b: usize| TwoForm::wedge(&h[a], &h[b]);
    [w(0, 1) + w(2, 3), w(0, 2) + w(3, 1), w(0, 3) + w(1, 2)]
}

/// Anti-self-dual basis `h¹²−h³⁴, h¹³−h⁴², h¹⁴−h²³`.
fn anti_self_dual(h: &[Vector6<f64>; 4]) -> [TwoForm; 3] {
    let w = |a: usize, b: usize| TwoForm::wedge(&h[a], &h[b]);
    [w(0, 1) - w(2, 3), w(0, 2) - w(3, 1), w(0, 3) - w(1, 2)]
}

fn check_unit(v: &[f64]) -> Result<(), KleinError> {
    let dev = (v.iter().map(|c| c * c).sum::<f64>() - 1.0).abs();
    if dev > 1e-12 {
        return Err(KleinError::NormViolation(dev));
    }
    Ok(())
}

fn require_class(form: &TwoForm, expected: OrbitClass) -> Result<(), KleinError> {
    let found = match classify(form, TOL) {
        Ok(c) => c,
        Err(AlgebraError::AmbiguousClass { coarser }) => coarser,
        Err(e) => return Err(e.into()),
    };
    if found != expected {
        return Err(KleinError::WrongClass { expected, found });
    }
    Ok(())
}

/// Reassigns the eigenvalues of `form` to those of `target`, keeping the planes.
///
/// Allowed when every root vanishing on the form's chamber point also
/// vanishes on the target's, i.e. the form's stabilizer lies in the target's.
pub fn fibration_project(form: &TwoForm, target: &CartanPoint, tol: f64) -> Result<TwoForm, KleinError> {
    let split = eigen_split(&form_to_endo(form), tol)?;
    let (c, w) = to_chamber(&CartanPoint::from_array(split.values()));
    let (t, _) = to_chamber(target);
    let scale = |p: &CartanPoint| tol * 1f64.max(p.x.abs()).max(p.y.abs()).max(p.z.abs());
    for r in roots() {
        if r.dot(&c).abs() <= scale(&c) && r.dot(&t).abs() > scale(&t) {
            return Err(KleinError::IncompatiblePattern);
        }
    }
    let slots = w.inverse().apply(&t).to_array();
    Ok(split
        .planes
        .iter()
        .zip(slots)
        .fold(TwoForm::zero(), |acc, (p, v)| acc + TwoForm::wedge(&p.u, &p.v) * v))
}

fn inverse_sqrt_psd(s: &Matrix6<f64>) -> Matrix6<f64> {
    let eig = SymmetricEigen::new(*s);
    let d = eig.eigenvalues.map(|l| if l > 1e-300 { 1.0 / l.sqrt() } else { 0.0 });
    eig.eigenvectors * Matrix6::from_diagonal(&d) * eig.eigenvectors.transpose()
}

/// `π₁`: the complex structure `𝔉(−𝔉²)^{−1/2}` underlying an ℱ₁ form.
pub fn pi1(form: &TwoForm) -> Result<TwoForm, KleinError> {
    require_class(form, OrbitClass::F1)?;
    let f = *form_to_endo(form).matrix();
    let j = f * inverse_sqrt_psd(&-(f * f));
    Ok(endo_to_form(&SkewEndomorphism::from_matrix(j)?))
}

/// `π₂`: the unit simple form of the eigenplane with the distinct eigenvalue, oriented by `𝔉`.
pub fn pi2(form: &TwoForm) -> Result<SimplePlaneForm, KleinError> {
    if matches!(classify(form, TOL), Ok(OrbitClass::F3Zero)) {
        return Err(KleinError::DegenerateOrientation);
    }
    require_class(form, OrbitClass::F1)?;
    let c = canonical_triple(form, TOL)?;
    let (a, z) = (c.x, c.z);
    let f = *form_to_endo(form).matrix();
    let s = -(f * f);
    let pz = (s - Matrix6::identity() * (a * a)) / (z * z - a * a);
    let v = SkewEndomorphism::from_matrix(f * pz / z)?;
    SimplePlaneForm::new(endo_to_form(&v), 1e-9)
}

/// `p + Σ uₖ σₖ` with `σₖ` the self-dual basis of ℋ: the complex structure
/// that restricts to `p` on 𝒱 and to the self-dual structure `u` on ℋ.
pub fn ocs_over_plane(p: &SimplePlaneForm, u: [f64; 3]) -> Result<TwoForm, KleinError> {
    check_unit(&u)?;
    let h = p.kernel_basis();
    let sd = self_dual(&h);
    Ok(*p.form() + sd[0] * u[0] + sd[1] * u[1] + sd[2] * u[2])
}

fn complex_structure(j: &TwoForm, tol: f64) -> Result<Matrix6<f64>, KleinError> {
    let m = *form_to_endo(j).matrix();
    let dev = (m * m + Matrix6::identity()).amax();
    if dev > tol {
        return Err(KleinError::NotComplexStructure(dev));
    }
    Ok(m)
}

/// `±normalize(v∧Jv)`: the `J`-invariant plane through `v` with the
/// orientation induced by `J` (`+1`) or the opposite one (`−1`).
pub fn invariant_plane(j: &TwoForm, v: &Vector6<f64>, orientation: i8, tol: f64) -> Result<SimplePlaneForm, KleinError> {
    let m = complex_structure(j, tol.max(1e-10))?;
    if orientation != 1 && orientation != -1 {
        return Err(KleinError::InvalidParameter("orientation must be ±1"));
    }
    let w = TwoForm::wedge(v, &(m * v));
    let n = w.norm();
    if n < tol {
        return Err(KleinError::DegenerateVector(n));
    }
    Ok(SimplePlaneForm { form: w * (f64::from(orientation) / n) })
}

/// `ω_J + t·(f∧Jf)` for unit `f`, an ℱ₁ form over `J`.
pub fn mixed_over(j: &TwoForm, f: &Vector6<f64>, t: f64) -> Result<TwoForm, KleinError> {
    require_class(j, OrbitClass::PPlus)?;
    if !(t > 0.0) {
        return Err(KleinError::InvalidParameter("t must be positive"));
    }
    let plane = invariant_plane(j, f, 1, 1e-12)?;
    Ok(*j + *plane.form() * t)
}

/// A compatible pair of an orthogonal complex structure `J` and a product
/// structure `P` whose `+1` eigenspace 𝒱 is a `J`-invariant 2-plane,
/// weighted into the form `a·ω_J + b·ω_𝒱`.
#[derive(Clone, Debug)]
pub struct MixedStructure {
    j: SkewEndomorphism,
    p: Matrix6<f64>,
    a: f64,
    b: f64,
}

impl MixedStructure {
    pub fn new(j: SkewEndomorphism, p: Matrix6<f64>, a: f64, b: f64) -> Result<Self, KleinError> {
        let jm = *j.matrix();
        let dev = (jm * jm + Matrix6::identity()).amax();
        if dev > 1e-10 {
            return Err(KleinError::NotComplexStructure(dev));
        }
        if (p - p.transpose()).amax() > 1e-10 || (p * p - Matrix6::identity()).amax() > 1e-10 {
            return Err(KleinError::Incompatible("P is not a symmetric involution"));
        }
        if (p.trace() + 2.0).abs() > 1e-10 {
            return Err(KleinError::Incompatible("+1 eigenspace of P is not a plane"));
        }
        if (jm * p - p * jm).amax() > 1e-10 {
            return Err(KleinError::Incompatible("J and P do not commute"));
        }
        if !(a > 0.0) || b == 0.0 {
            return Err(KleinError::InvalidParameter("weights need a > 0 and b ≠ 0"));
        }
        Ok(Self { j, p, a, b })
    }

    /// Splits an ℱ₁ form `x(…) + z e^{56}`-type into `J = π₁`, `𝒱 = π₂`, `a = x`, `b = z − x`.
    pub fn from_f1_form(form: &TwoForm) -> Result<Self, KleinError> {
        let j = pi1(form)?.to_endo();
        let v = pi2(form)?;
        let c = canonical_triple(form, TOL)?;
        let p = v.projector() * 2.0 - Matrix6::identity();
        Self::new(j, p, c.x, c.z - c.x)
    }

    pub fn j(&self) -> &SkewEndomorphism {
        &self.j
    }

    pub fn p(&self) -> &Matrix6<f64> {
        &self.p
    }

    pub fn weights(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// `J` restricted to 𝒱 as a 2-form, i.e. the 𝒱 plane oriented by `J`.
    pub fn vertical_form(&self) -> TwoForm {
        let pv = (self.p + Matrix6::identity()) * 0.5;
        endo_to_form(&SkewEndomorphism::from_matrix_unchecked(self.j.matrix() * pv))
    }

    pub fn form(&self) -> TwoForm {
        endo_to_form(&self.j) * self.a + self.vertical_form() * self.b
    }
}

/// Default weight `t₀` of the prism region, `λ = (1, 1, 1 + t₀)`.
pub const DEFAULT_PRISM_T0: f64 = 1.0;

/// `μ_T(ω + t·e∧Je)` for `ω = a(e¹²−e³⁴)+b(e¹³−e⁴²)+c(e¹⁴−e²³)−e⁵⁶`
/// and `e = αe¹ + βe³ + γe⁵`.
pub fn edge_prism_point(abc: [f64; 3], dirs: [f64; 3], t: f64) -> Result<CartanPoint, KleinError> {
    check_unit(&abc)?;
    check_unit(&dirs)?;
    if !(t >= 0.0) {
        return Err(KleinError::InvalidParameter("t must be non-negative"));
    }
    let [a, b, c] = abc;
    let [al, be, ga] = dirs;
    let omega = TwoForm::from_terms(&[
        (1, 2, a),
        (3, 4, -a),
        (1, 3, b),
        (4, 2, -b),
        (1, 4, c),
        (2, 3, -c),
        (5, 6, -1.0),
    ]);
    let j = *form_to_endo(&omega).matrix();
    let e = Vector6::new(al, 0.0, be, 0.0, ga, 0.0);
    Ok(mu_t(&(omega + TwoForm::wedge(&e, &(j * e)) * t)))
}

/// The closed form `(a+t(α²a+αβc), −a+t(αβc−β²a), −1−tγ²)`.
pub fn edge_prism_closed_form(abc: [f64; 3], dirs: [f64; 3], t: f64) -> CartanPoint {
    let [a, _, c] = abc;
    let [al, be, ga] = dirs;
    CartanPoint::new(
        a + t * (al * al * a + al * be * c),
        -a + t * (al * be * c - be * be * a),
        -1.0 - t * ga * ga,
    )
}

/// `Δ(1, 1, 1+t₀)`, whose part below `z = −1` bounds the edge prism.
pub fn prism_polytope(t0: f64) -> Polytope<f64> {
    moment_polytope(&CartanPoint::new(1.0, 1.0, 1.0 + t0))
}

/// The prism region `{z ≤ −1} ∩ Δ(1, 1, 1+t₀)`.
#[derive(Clone, Debug)]
pub struct PrismRegion {
    pub t0: f64,
    polytope: Polytope<f64>,
}

impl PrismRegion {
    pub fn new(t0: f64) -> Self {
        Self { t0, polytope: prism_polytope(t0) }
    }

    pub fn polytope(&self) -> &Polytope<f64> {
        &self.polytope
    }

    pub fn contains(&self, p: &CartanPoint) -> bool {
        p.z <= -1.0 + 1e-12 && self.polytope.contains(&p.to_array(), &1e-9)
    }

    /// Facets of `Δ(1,1,1+t₀)` together with `z ≤ −1`.
    pub fn facets(&self) -> Vec<([f64; 3], f64)> {
        let mut out: Vec<([f64; 3], f64)> = self.polytope.facets().iter().map(|f| (f.normal, f.offset)).collect();
        out.push(([0.0, 0.0, 1.0], -1.0));
        out
    }
}

/// `z ≤ −1` and inside `Δ(1, 1, 1+t₀)`.
pub fn prism_region_test(p: &CartanPoint, t0: f64) -> bool {
    PrismRegion::new(t0).contains(p)
}

/// The plane form `½(Σ pₖ τ⁺ₖ + Σ qₖ τ⁻ₖ)` of `Gr₂(ℝ⁴) ≅ S² × S²` inside
/// `⟨e₁..e₄⟩`, with `τ⁺ = (e¹²+e³⁴, e¹³+e⁴², e¹⁴+e²³)` and `τ⁻` the
/// anti-self-dual counterparts. Its image is `((p₁+q₁)/2, (p₁−q₁)/2, 0)`.
pub fn square_plane(v_plus: [f64; 3], v_minus: [f64; 3]) -> Result<SimplePlaneForm, KleinError> {
    check_unit(&v_plus)?;
    check_unit(&v_minus)?;
    let h: [Vector6<f64>; 4] = core::array::from_fn(|k| Vector6::from_fn(|i, _| if i == k { 1.0 } else { 0.0 }));
    let sd = self_dual(&h);
    let asd = anti_self_dual(&h);
    let mut f = TwoForm::zero();
    for k in 0..3 {
        f = f + sd[k] * (0.5 * v_plus[k]) + asd[k] * (0.5 * v_minus[k]);
    }
    SimplePlaneForm::new(f, 1e-12)
}

/// `μ_T(s + t·J)` where `s` is the plane of [`square_plane`] and `J` the
/// complex structure over it with self-dual parameter `u`.
pub fn square_fiber_points(u: [f64; 3], v_plus: [f64; 3], v_minus: [f64; 3], t: f64) -> Result<CartanPoint, KleinError> {
    if !(t > 0.0) {
        return Err(KleinError::InvalidParameter("t must be positive"));
    }
    let s = square_plane(v_plus, v_minus)?;
    let j = ocs_over_plane(&s, u)?;
    Ok(mu_t(&(*s.form() + j * t)))
}

/// Facets `(n, d)`, `n·p ≤ d`, of the image of all [`square_fiber_points`]
/// at weight `t`: `|x+y| ≤ 1+t+z`, `|x−y| ≤ 1+t−z`, `|z| ≤ t`.
pub fn square_region(t: f64) -> Vec<([f64; 3], f64)> {
    vec![
        ([1.0, 1.0, -1.0], 1.0 + t),
        ([-1.0, -1.0, -1.0], 1.0 + t),
        ([1.0, -1.0, 1.0], 1.0 + t),
        ([-1.0, 1.0, 1.0], 1.0 + t),
        ([0.0, 0.0, 1.0], t),
        ([0.0, 0.0, -1.0], t),
    ]
}

/// Largest violation of [`square_region`] by `p`.
pub fn square_region_violation(p: &CartanPoint, t: f64) -> f64 {
    square_region(t)
        .iter()
        .map(|(n, d)| n[0] * p.x + n[1] * p.y + n[2] * p.z - d)
        .fold(f64::NEG_INFINITY, f64::max)
}
