//! Invariant structures on the Iwasawa manifold: the complex Heisenberg
//! frame algebra, Nijenhuis integrability, closure of product structures
//! and the scans locating them under the moment map.

use nalgebra::{Matrix6, Vector3, Vector6};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{classify, conjugate, form_to_endo, OrbitClass, Rotation, SkewEndomorphism, TwoForm};
use crate::cartan::CartanPoint;
use crate::klein::{square_plane, KleinError, SimplePlaneForm};
use crate::moment::{haar_rotation, moment_polytope, mu_t, sample_rng, SampleCloud};
use crate::polytope::{hull, Polytope};
use crate::weyl::{weyl_group, WeylElement};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IwasawaError {
    #[error("structure constants are not antisymmetric")]
    NotAntisymmetric,
    #[error("not an orthogonal complex structure (|J² + I| = {square:e}, |JᵀJ − I| = {orthogonality:e})")]
    InvalidOcs { square: f64, orthogonality: f64 },
    #[error("vertical plane basis is not orthonormal (deviation {0:e})")]
    InvalidOps(f64),
    #[error("plane is not invariant under J (deviation {0:e})")]
    IncompatiblePair(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error(transparent)]
    Klein(#[from] KleinError),
}

/// Structure constants `[eᵢ, eⱼ] = Σₖ c[k][i][j] eₖ` on an orthonormal frame.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameAlgebra {
    c: [[[f64; 6]; 6]; 6],
}

impl FrameAlgebra {
    pub fn new(c: [[[f64; 6]; 6]; 6]) -> Result<Self, IwasawaError> {
        for ck in &c {
            for i in 0..6 {
                for j in 0..6 {
                    if ck[i][j] != -ck[j][i] {
                        return Err(IwasawaError::NotAntisymmetric);
                    }
                }
            }
        }
        Ok(Self { c })
    }

    /// The algebra with `deᵏ = −Σ_{i<j} c[k][i][j] eⁱʲ`, i.e. `deᵏ(X, Y) = −eᵏ([X, Y])`.
    pub fn from_differentials(d: &[TwoForm; 6]) -> Self {
        let mut c = [[[0.0; 6]; 6]; 6];
        for (k, dk) in d.iter().enumerate() {
            for i in 0..6 {
                for j in 0..6 {
                    if i != j {
                        c[k][i][j] = -dk.coeff(i + 1, j + 1);
                    }
                }
            }
        }
        Self { c }
    }

    pub fn structure_constants(&self) -> &[[[f64; 6]; 6]; 6] {
        &self.c
    }

    /// `deᵏ` of the dual coframe, `k` zero based.
    pub fn d(&self, k: usize) -> TwoForm {
        let mut terms = Vec::new();
        for i in 0..6 {
            for j in i + 1..6 {
                terms.push((i + 1, j + 1, -self.c[k][i][j]));
            }
        }
        TwoForm::from_terms(&terms)
    }

    /// `max |[[eᵢ,eⱼ],eₗ] + [[eⱼ,eₗ],eᵢ] + [[eₗ,eᵢ],eⱼ]|`.
    pub fn jacobi_residual(&self) -> f64 {
        let e = |i: usize| Vector6::from_fn(|r, _| if r == i { 1.0 } else { 0.0 });
        let mut worst: f64 = 0.0;
        for i in 0..6 {
            for j in 0..6 {
                for l in 0..6 {
                    let (a, b, c) = (e(i), e(j), e(l));
                    let s = self.bracket(&self.bracket(&a, &b), &c)
                        + self.bracket(&self.bracket(&b, &c), &a)
                        + self.bracket(&self.bracket(&c, &a), &b);
                    worst = worst.max(s.amax());
                }
            }
        }
        worst
    }

    pub fn bracket(&self, x: &Vector6<f64>, y: &Vector6<f64>) -> Vector6<f64> {
        Vector6::from_fn(|k, _| {
            let mut s = 0.0;
            for i in 0..6 {
                for j in i + 1..6 {
                    s += self.c[k][i][j] * (x[i] * y[j] - x[j] * y[i]);
                }
            }
            s
        })
    }
}

/// The complex Heisenberg algebra: `de¹ = … = de⁴ = 0`,
/// `de⁵ = e¹³ + e⁴²`, `de⁶ = e¹⁴ + e²³`.
pub fn iwasawa_algebra() -> FrameAlgebra {
    let de5 = TwoForm::from_terms(&[(1, 3, 1.0), (4, 2, 1.0)]);
    let de6 = TwoForm::from_terms(&[(1, 4, 1.0), (2, 3, 1.0)]);
    let z = TwoForm::zero();
    FrameAlgebra::from_differentials(&[z, z, z, z, de5, de6])
}

pub fn bracket(a: &FrameAlgebra, x: &Vector6<f64>, y: &Vector6<f64>) -> Vector6<f64> {
    a.bracket(x, y)
}

/// An invariant orthogonal almost complex structure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvariantOCS {
    j: Matrix6<f64>,
}

impl InvariantOCS {
    pub fn new(j: Matrix6<f64>, tol: f64) -> Result<Self, IwasawaError> {
        let square = (j * j + Matrix6::identity()).amax();
        let orthogonality = (j.transpose() * j - Matrix6::identity()).amax();
        if square > tol || orthogonality > tol {
            return Err(IwasawaError::InvalidOcs { square, orthogonality });
        }
        Ok(Self { j })
    }

    pub fn from_form(form: &TwoForm) -> Result<Self, IwasawaError> {
        Self::new(*form_to_endo(form).matrix(), 1e-10)
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.j
    }

    pub fn form(&self) -> TwoForm {
        SkewEndomorphism::from_matrix(self.j).expect("J is skew").to_form()
    }

    /// `+1` on 𝒫⁺, `−1` on 𝒫⁻.
    pub fn orientation(&self) -> i8 {
        if self.j.determinant() > 0.0 && matches!(classify(&self.form(), 1e-8), Ok(OrbitClass::PPlus)) {
            1
        } else {
            -1
        }
    }
}

/// An invariant orthogonal almost product structure, given by an oriented
/// orthonormal basis of its 2-dimensional eigenspace 𝒱.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvariantOPS {
    v: [Vector6<f64>; 2],
}

impl InvariantOPS {
    pub fn new(v1: Vector6<f64>, v2: Vector6<f64>) -> Result<Self, IwasawaError> {
        let dev = (v1.norm() - 1.0).abs().max((v2.norm() - 1.0).abs()).max(v1.dot(&v2).abs());
        if dev > 1e-12 {
            return Err(IwasawaError::InvalidOps(dev));
        }
        Ok(Self { v: [v1, v2] })
    }

    /// Gram–Schmidt of `(u, w)`.
    pub fn span(u: &Vector6<f64>, w: &Vector6<f64>) -> Result<Self, IwasawaError> {
        let v1 = u.normalize();
        let r = w - v1 * v1.dot(w);
        if !(u.norm() > 1e-12) || !(r.norm() > 1e-12 * w.norm().max(1.0)) {
            return Err(IwasawaError::InvalidOps(r.norm()));
        }
        Self::new(v1, r.normalize())
    }

    pub fn from_plane(p: &SimplePlaneForm) -> Self {
        let (f1, f2) = p.plane_basis();
        Self { v: [f1, f2] }
    }

    pub fn vertical(&self) -> &[Vector6<f64>; 2] {
        &self.v
    }

    pub fn plane(&self) -> SimplePlaneForm {
        SimplePlaneForm::from_vectors(&self.v[0], &self.v[1]).expect("orthonormal pair")
    }

    /// Orthonormal basis of ℋ.
    pub fn horizontal(&self) -> [Vector6<f64>; 4] {
        self.plane().kernel_basis()
    }

    /// `μ_T(v₁∧v₂)`.
    pub fn image(&self) -> CartanPoint {
        mu_t(&TwoForm::wedge(&self.v[0], &self.v[1]))
    }
}

fn frame(i: usize) -> Vector6<f64> {
    Vector6::from_fn(|r, _| if r == i { 1.0 } else { 0.0 })
}

/// Frobenius norm of `N(eᵢ, eⱼ) = [Jeᵢ,Jeⱼ] − J[Jeᵢ,eⱼ] − J[eᵢ,Jeⱼ] − [eᵢ,eⱼ]` over all frame pairs.
pub fn nijenhuis_norm(a: &FrameAlgebra, j: &InvariantOCS) -> f64 {
    let m = j.matrix();
    let mut s = 0.0;
    for i in 0..6 {
        for k in 0..6 {
            let (x, y) = (frame(i), frame(k));
            let (jx, jy) = (m * x, m * y);
            let n = a.bracket(&jx, &jy) - m * a.bracket(&jx, &y) - m * a.bracket(&x, &jy) - a.bracket(&x, &y);
            s += n.norm_squared();
        }
    }
    s.sqrt()
}

const CLOSURE_TOL: f64 = 1e-12;

/// `[ℋ, ℋ] ⊆ ℋ`.
pub fn horizontal_closed(a: &FrameAlgebra, p: &InvariantOPS) -> bool {
    let h = p.horizontal();
    let [v1, v2] = p.vertical();
    for i in 0..4 {
        for k in i + 1..4 {
            let b = a.bracket(&h[i], &h[k]);
            if b.dot(v1).abs() > CLOSURE_TOL || b.dot(v2).abs() > CLOSURE_TOL {
                return false;
            }
        }
    }
    true
}

/// `[𝒱, 𝒱] ⊆ 𝒱`.
pub fn vertical_closed(a: &FrameAlgebra, p: &InvariantOPS) -> bool {
    let [v1, v2] = p.vertical();
    let b = a.bracket(v1, v2);
    let off = b - v1 * v1.dot(&b) - v2 * v2.dot(&b);
    off.amax() <= CLOSURE_TOL
}

/// Unit anti-self-dual completion `a(e¹²−e³⁴)+b(e¹³−e⁴²)+c(e¹⁴−e²³)−e⁵⁶`.
pub fn edge_family_form(abc: [f64; 3]) -> TwoForm {
    let [a, b, c] = abc;
    TwoForm::from_terms(&[(1, 2, a), (3, 4, -a), (1, 3, b), (4, 2, -b), (1, 4, c), (2, 3, -c), (5, 6, -1.0)])
}

/// `count` points on the unit sphere with `a` evenly spaced in `[−1, 1]`
/// and the azimuth advanced by the golden angle.
pub fn edge_family_grid(count: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let a = if count == 1 { 0.0 } else { -1.0 + 2.0 * k as f64 / (count - 1) as f64 };
            let r = (1.0 - a * a).max(0.0).sqrt();
            let phi = golden * k as f64;
            [a, r * phi.cos(), r * phi.sin()]
        })
        .collect()
}

fn vec3(p: &CartanPoint) -> Vector3<f64> {
    Vector3::from(p.to_array())
}

fn segment_distance(p: &CartanPoint, a: &CartanPoint, b: &CartanPoint) -> f64 {
    let (p, a, d) = (vec3(p), vec3(a), vec3(b) - vec3(a));
    let t = ((p - a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
    (p - a - d * t).norm()
}

fn random_unit<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector6<f64> {
    loop {
        let v = Vector6::from_fn(|i, _| if i < dim { rng.sample::<f64, _>(StandardNormal) } else { 0.0 });
        if v.norm() > 1e-6 {
            return v.normalize();
        }
    }
}

/// Random OPS with 𝒱 an orthonormalized Gaussian pair in the first `dim` coordinates.
fn random_ops<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> InvariantOPS {
    loop {
        let u = random_unit(rng, dim);
        let w = random_unit(rng, dim);
        if let Ok(p) = InvariantOPS::span(&u, &w) {
            if (u.dot(&w)).abs() < 0.999 {
                return p;
            }
        }
    }
}

/// Outcome of the integrable complex structure scan.
#[derive(Clone, Debug, Serialize)]
pub struct ComplexScanReport {
    pub n: usize,
    pub seed: u64,
    pub tol: f64,
    /// Image of `J₀`.
    pub vertex: CartanPoint,
    /// Endpoints of the image of the anti-self-dual family.
    pub edge: [CartanPoint; 2],
    /// Row-major Weyl element taking `(1,1,1)` and `{(a,−a,−1)}` to `vertex` and `edge`.
    pub aligning_weyl: [i8; 9],
    pub vertex_nijenhuis: f64,
    pub family_points: usize,
    pub family_max_nijenhuis: f64,
    pub family_max_edge_distance: f64,
    /// Hausdorff distance between the family images and the edge.
    pub family_hausdorff: f64,
    /// Hausdorff distance between the edge and an evenly spaced grid of the same size.
    pub grid_resolution: f64,
    pub vertex_on_edge: bool,
    pub haar_accepted: usize,
    pub haar_max_distance: f64,
    pub haar_min_rejected_distance: f64,
    pub haar_min_rejected_nijenhuis: f64,
    /// Integrable structures moved by `exp(εX)` with small `ε`.
    pub perturbed: usize,
    pub perturbed_accepted: usize,
    pub perturbed_max_distance: f64,
    pub epsilon: f64,
    pub pass: bool,
}

/// Distance from `p` to `{vertex} ∪ edge`.
pub fn distance_to_vertex_edge(p: &CartanPoint, vertex: &CartanPoint, edge: &[CartanPoint; 2]) -> f64 {
    (vec3(p) - vec3(vertex)).norm().min(segment_distance(p, &edge[0], &edge[1]))
}

fn align(vertex: &CartanPoint, edge: &[CartanPoint; 2]) -> WeylElement {
    let pv = CartanPoint::new(1.0, 1.0, 1.0);
    let pe = [CartanPoint::new(1.0, -1.0, -1.0), CartanPoint::new(-1.0, 1.0, -1.0)];
    let fits = |w: &WeylElement| {
        let close = |a: &CartanPoint, b: &CartanPoint| a.max_abs_diff(b) < 1e-9;
        let e0 = w.apply(&pe[0]);
        let e1 = w.apply(&pe[1]);
        close(&w.apply(&pv), vertex)
            && ((close(&e0, &edge[0]) && close(&e1, &edge[1])) || (close(&e0, &edge[1]) && close(&e1, &edge[0])))
    };
    let id = WeylElement::identity();
    if fits(&id) {
        return id;
    }
    weyl_group().iter().copied().find(|w| fits(w)).unwrap_or(id)
}

/// Haar-samples `J ∈ 𝒫⁺`, keeps those with `nijenhuis_norm < tol`, and
/// checks the accepted images against the vertex and edge found from `J₀`
/// and the anti-self-dual family.
///
/// The accepted cloud lists the family images and `J₀` first, then
/// accepted Haar samples, then accepted perturbed samples.
pub fn scan_complex(n: usize, seed: u64, tol: f64) -> Result<(SampleCloud, ComplexScanReport), IwasawaError> {
    if n == 0 {
        return Err(IwasawaError::InvalidParameter("n must be positive"));
    }
    let alg = iwasawa_algebra();
    let j0 = InvariantOCS::from_form(&TwoForm::omega0())?;
    let vertex = mu_t(&TwoForm::omega0());
    let vertex_nijenhuis = nijenhuis_norm(&alg, &j0);

    const FAMILY: usize = 101;
    let grid = edge_family_grid(FAMILY);
    let family: Vec<(CartanPoint, f64)> = grid
        .iter()
        .map(|abc| {
            let f = edge_family_form(*abc);
            let j = InvariantOCS::from_form(&f).expect("unit anti-self-dual completion");
            (mu_t(&f), nijenhuis_norm(&alg, &j))
        })
        .collect();
    let edge = [family[0].0.clone(), family[FAMILY - 1].0.clone()];
    let family_max_nijenhuis = family.iter().map(|f| f.1).fold(0.0, f64::max);
    let family_max_edge_distance = family.iter().map(|f| segment_distance(&f.0, &edge[0], &edge[1])).fold(0.0, f64::max);
    let d = vec3(&edge[1]) - vec3(&edge[0]);
    let edge_len = d.norm();
    // projections of the images onto the edge, as fractions of its length
    let mut fractions: Vec<f64> = family
        .iter()
        .map(|f| (vec3(&f.0) - vec3(&edge[0])).dot(&d) / d.norm_squared())
        .collect();
    fractions.sort_by(f64::total_cmp);
    let mut gap: f64 = fractions[0].max(1.0 - fractions[FAMILY - 1]) * 2.0;
    for w in fractions.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    let family_hausdorff = family_max_edge_distance.max(gap / 2.0 * edge_len);
    let grid_resolution = 0.5 / (FAMILY - 1) as f64 * edge_len;
    let vertex_on_edge = segment_distance(&vertex, &edge[0], &edge[1]) < 1e-9;
    let aligning_weyl = align(&vertex, &edge).to_row_major();

    let epsilon = 1e-2;
    let haar: Vec<(CartanPoint, f64)> = (0..n as u64)
        .into_par_iter()
        .map(|k| {
            let r = haar_rotation(&mut sample_rng(seed, k));
            let j = conjugate(&TwoForm::omega0(), &r);
            let ocs = InvariantOCS::from_form(&j).expect("conjugate of J₀");
            (mu_t(&j), nijenhuis_norm(&alg, &ocs))
        })
        .collect();
    let mut accepted = Vec::new();
    let mut haar_max_distance: f64 = 0.0;
    let mut haar_min_rejected_distance = f64::INFINITY;
    let mut haar_min_rejected_nijenhuis = f64::INFINITY;
    for (p, nn) in &haar {
        let d = distance_to_vertex_edge(p, &vertex, &edge);
        if *nn < tol {
            accepted.push(p.clone());
            haar_max_distance = haar_max_distance.max(d);
        } else {
            haar_min_rejected_distance = haar_min_rejected_distance.min(d);
            haar_min_rejected_nijenhuis = haar_min_rejected_nijenhuis.min(*nn);
        }
    }
    let haar_accepted = accepted.len();

    // integrable structures rotated by exp(εX), ε log-uniform in [1e−12, 1e−8]
    let perturbed = n.min(1000);
    let moved: Vec<(CartanPoint, f64)> = (0..perturbed as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = sample_rng(seed ^ 0x9e37_79b9_7f4a_7c15, k);
            let base = if k % 2 == 0 {
                TwoForm::omega0()
            } else {
                let v = random_unit(&mut rng, 3);
                edge_family_form([v[0], v[1], v[2]])
            };
            let eps = 10f64.powf(-8.0 - 4.0 * rng.random::<f64>());
            let x = Matrix6::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
            let skew = SkewEndomorphism::from_matrix((x - x.transpose()) * (0.5 * eps)).expect("finite");
            let j = conjugate(&base, &Rotation::exp(&skew));
            let ocs = InvariantOCS::from_form(&j).expect("rotated OCS");
            (mu_t(&j), nijenhuis_norm(&alg, &ocs))
        })
        .collect();
    let mut perturbed_max_distance: f64 = 0.0;
    let mut perturbed_points = Vec::new();
    for (p, nn) in &moved {
        if *nn < tol {
            perturbed_points.push(p.clone());
            perturbed_max_distance = perturbed_max_distance.max(distance_to_vertex_edge(p, &vertex, &edge));
        }
    }
    let perturbed_accepted = perturbed_points.len();

    let pass = vertex_nijenhuis < 1e-10
        && family_max_nijenhuis < 1e-10
        && family_max_edge_distance < 1e-9
        && family_hausdorff <= grid_resolution + 1e-9
        && !vertex_on_edge
        && haar_max_distance <= epsilon
        && perturbed_max_distance <= epsilon;

    let mut points: Vec<CartanPoint> = family.iter().map(|f| f.0.clone()).collect();
    points.push(vertex.clone());
    points.extend(accepted);
    points.extend(perturbed_points);
    let cloud = SampleCloud { seed, source: format!("scan-complex tol={tol:e}"), points };
    let report = ComplexScanReport {
        n,
        seed,
        tol,
        vertex,
        edge,
        aligning_weyl,
        vertex_nijenhuis,
        family_points: FAMILY,
        family_max_nijenhuis,
        family_max_edge_distance,
        family_hausdorff,
        grid_resolution,
        vertex_on_edge,
        haar_accepted,
        haar_max_distance,
        haar_min_rejected_distance,
        haar_min_rejected_nijenhuis,
        perturbed,
        perturbed_accepted,
        perturbed_max_distance,
        epsilon,
        pass,
    };
    Ok((cloud, report))
}

/// Outcome of a product structure scan.
#[derive(Clone, Debug, Serialize)]
pub struct OpsScanReport {
    pub n: usize,
    pub seed: u64,
    /// Samples from the subspace that pass the closure test(s).
    pub accepted: usize,
    /// Largest deviation of an accepted image from the target set.
    pub max_violation: f64,
    /// Negative controls drawn off the target set.
    pub controls: usize,
    /// Controls that failed the closure test(s), as they should.
    pub controls_rejected: usize,
    /// Controls that passed, each verified to lie within tolerance of the target set.
    pub controls_near_target: usize,
    pub pass: bool,
}

/// Samples 𝒱 in `⟨e₁..e₄⟩`, all of which must satisfy `[ℋ,ℋ] ⊆ ℋ` with
/// images in the square `|x|+|y| ≤ 1, z = 0`; Gaussian 𝒱 in ℝ⁶ serve as
/// negative controls.
pub fn scan_k(n: usize, seed: u64) -> Result<(SampleCloud, OpsScanReport), IwasawaError> {
    if n == 0 {
        return Err(IwasawaError::InvalidParameter("n must be positive"));
    }
    let alg = iwasawa_algebra();
    let inside: Vec<(CartanPoint, bool)> = (0..n as u64)
        .into_par_iter()
        .map(|k| {
            let p = random_ops(&mut sample_rng(seed, k), 4);
            (p.image(), horizontal_closed(&alg, &p))
        })
        .collect();
    let controls: Vec<(bool, f64)> = (0..n as u64)
        .into_par_iter()
        .map(|k| {
            let p = random_ops(&mut sample_rng(seed, n as u64 + k), 6);
            let off = p.vertical().iter().map(|v| v[4].hypot(v[5])).fold(0.0, f64::max);
            (horizontal_closed(&alg, &p), off)
        })
        .collect();
    let mut max_violation: f64 = 0.0;
    let mut accepted = 0;
    let mut points = Vec::new();
    for (img, ok) in &inside {
        if *ok {
            accepted += 1;
            max_violation = max_violation.max(img.x.abs() + img.y.abs() - 1.0).max(img.z.abs());
            points.push(img.clone());
        }
    }
    let controls_rejected = controls.iter().filter(|c| !c.0).count();
    let controls_near_target = controls.iter().filter(|c| c.0 && c.1 < 1e-6).count();
    let pass = accepted == n && max_violation <= 1e-9 && controls_rejected + controls_near_target == n;
    let cloud = SampleCloud { seed, source: "scan-k".into(), points };
    Ok((cloud, OpsScanReport { n, seed, accepted, max_violation, controls: n, controls_rejected, controls_near_target, pass }))
}

/// The doubly closed planes `½(±τ⁺₁ + Σ qₖ τ⁻ₖ)` of `⟨e₁..e₄⟩`, for random
/// signs and unit `q`. All must satisfy both closure tests with images on
/// `x + y = ±1`; Gaussian planes of `⟨e₁..e₄⟩` serve as negative controls.
pub fn scan_k_intersection(n: usize, seed: u64) -> Result<(SampleCloud, OpsScanReport), IwasawaError> {
    if n == 0 {
        return Err(IwasawaError::InvalidParameter("n must be positive"));
    }
    let alg = iwasawa_algebra();
    let inside: Vec<(CartanPoint, bool)> = (0..n as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = sample_rng(seed, k);
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let q = random_unit(&mut rng, 3);
            let s = square_plane([sign, 0.0, 0.0], [q[0], q[1], q[2]]).expect("unit parameters");
            let p = InvariantOPS::from_plane(&s);
            (p.image(), horizontal_closed(&alg, &p) && vertical_closed(&alg, &p))
        })
        .collect();
    let controls: Vec<(bool, f64)> = (0..n as u64)
        .into_par_iter()
        .map(|k| {
            let p = random_ops(&mut sample_rng(seed, n as u64 + k), 4);
            let img = p.image();
            let d = (img.x + img.y - 1.0).abs().min((img.x + img.y + 1.0).abs());
            (horizontal_closed(&alg, &p) && vertical_closed(&alg, &p), d)
        })
        .collect();
    let mut max_violation: f64 = 0.0;
    let mut accepted = 0;
    let mut points = Vec::new();
    for (img, ok) in &inside {
        if *ok {
            accepted += 1;
            let d = (img.x + img.y - 1.0).abs().min((img.x + img.y + 1.0).abs());
            let box_dev = (img.x.abs() - 1.0).max(img.y.abs() - 1.0).max(0.0);
            max_violation = max_violation.max(d).max(img.z.abs()).max(box_dev);
            points.push(img.clone());
        }
    }
    let controls_rejected = controls.iter().filter(|c| !c.0).count();
    let controls_near_target = controls.iter().filter(|c| c.0 && c.1 <= 1e-9).count();
    let pass = accepted == n && max_violation <= 1e-9 && controls_rejected + controls_near_target == n;
    let cloud = SampleCloud { seed, source: "scan-kk".into(), points };
    Ok((cloud, OpsScanReport { n, seed, accepted, max_violation, controls: n, controls_rejected, controls_near_target, pass }))
}

/// `ω_J + t·ω_𝒱` for a plane 𝒱 invariant under `J`, oriented by `J`.
pub fn mixed_pair(j: &InvariantOCS, p: &InvariantOPS, t: f64) -> Result<TwoForm, IwasawaError> {
    if !(t > 0.0) {
        return Err(IwasawaError::InvalidParameter("t must be positive"));
    }
    let [v1, v2] = p.vertical();
    let jv = j.matrix() * v1;
    let inside = v1 * v1.dot(&jv) + v2 * v2.dot(&jv);
    let dev = (jv - inside).amax();
    if dev > 1e-9 {
        return Err(IwasawaError::IncompatiblePair(dev));
    }
    let plane = TwoForm::wedge(v1, &jv);
    Ok(j.form() + plane * t)
}

/// Which product structures the mixed scan draws from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MixedSource {
    /// `[ℋ,ℋ] ⊆ ℋ`.
    K,
    /// `[ℋ,ℋ] ⊆ ℋ` and `[𝒱,𝒱] ⊆ 𝒱`.
    KIntersection,
}

/// Outcome of the mixed structure scan.
#[derive(Clone, Debug, Serialize)]
pub struct MixedScanReport {
    pub n: usize,
    pub seed: u64,
    pub which: MixedSource,
    pub t: f64,
    pub built: usize,
    /// Largest violation of `Δ(1,1,1+t)` by an image.
    pub max_violation: f64,
    /// Largest Nijenhuis norm among the complex structures used.
    pub max_nijenhuis: f64,
    /// Pairs whose plane failed a closure test it should pass.
    pub closure_failures: usize,
    /// Facets `(normal, offset)` of the hull of the images, `n·p ≤ offset`.
    pub region: Vec<([f64; 3], f64)>,
    pub pass: bool,
}

/// Builds `ω_J + t·ω_𝒱` from integrable `J` (`J₀` or the anti-self-dual
/// family) and `J`-invariant 𝒱 from the chosen closure class, with `t = 1`.
pub fn mixed_classes_over(n: usize, seed: u64, which: MixedSource) -> Result<(SampleCloud, MixedScanReport), IwasawaError> {
    if n == 0 {
        return Err(IwasawaError::InvalidParameter("n must be positive"));
    }
    let t = 1.0;
    let alg = iwasawa_algebra();
    let built: Vec<Result<(CartanPoint, f64, bool), IwasawaError>> = (0..n as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = sample_rng(seed, k);
            let (j, ops) = if k % 2 == 0 {
                let j = InvariantOCS::from_form(&TwoForm::omega0())?;
                let v = random_unit(&mut rng, 4);
                let ops = InvariantOPS::span(&v, &(j.matrix() * v))?;
                (j, ops)
            } else {
                let q = random_unit(&mut rng, 3);
                let q = [q[0], q[1], q[2]];
                let j = InvariantOCS::from_form(&edge_family_form(q))?;
                let ops = match which {
                    MixedSource::K => {
                        let v = random_unit(&mut rng, 4);
                        InvariantOPS::span(&v, &(j.matrix() * v))?
                    }
                    MixedSource::KIntersection => {
                        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                        InvariantOPS::from_plane(&square_plane([sign, 0.0, 0.0], q)?)
                    }
                };
                (j, ops)
            };
            let closed = horizontal_closed(&alg, &ops)
                && (which == MixedSource::K || vertical_closed(&alg, &ops));
            let form = mixed_pair(&j, &ops, t)?;
            Ok((mu_t(&form), nijenhuis_norm(&alg, &j), closed))
        })
        .collect();
    let built: Vec<(CartanPoint, f64, bool)> = built.into_iter().collect::<Result<_, _>>()?;
    let outer: Polytope<f64> = moment_polytope(&CartanPoint::new(1.0, 1.0, 1.0 + t));
    let points: Vec<CartanPoint> = built.iter().map(|b| b.0.clone()).collect();
    let max_violation = points.iter().map(|p| outer.max_violation(&p.to_array())).fold(0.0, f64::max);
    let max_nijenhuis = built.iter().map(|b| b.1).fold(0.0, f64::max);
    let closure_failures = built.iter().filter(|b| !b.2).count();
    let region = hull(&points.iter().map(CartanPoint::to_array).collect::<Vec<_>>())
        .map(|h| h.facets().iter().map(|f| (f.normal, f.offset)).collect())
        .unwrap_or_default();
    let pass = max_violation <= 1e-9 && max_nijenhuis < 1e-10 && closure_failures == 0;
    let cloud = SampleCloud {
        seed,
        source: format!("mixed {} t={t}", if which == MixedSource::K { "K" } else { "K-intersection" }),
        points,
    };
    Ok((cloud, MixedScanReport { n, seed, which, t, built: n, max_violation, max_nijenhuis, closure_failures, region, pass }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(k: usize) -> Vector6<f64> {
        frame(k - 1)
    }

    #[test]
    fn heisenberg_brackets() {
        let a = iwasawa_algebra();
        assert!(a.jacobi_residual() < 1e-14);
        assert_eq!(a.bracket(&e(1), &e(3)), -e(5));
        assert_eq!(a.bracket(&e(2), &e(4)), e(5));
        assert_eq!(a.bracket(&e(1), &e(4)), -e(6));
        assert_eq!(a.bracket(&e(2), &e(3)), -e(6));
        assert_eq!(a.bracket(&e(1), &e(2)), Vector6::zeros());
        for i in 1..=6 {
            assert_eq!(a.bracket(&e(5), &e(i)), Vector6::zeros());
            assert_eq!(a.bracket(&e(6), &e(i)), Vector6::zeros());
        }
        // de⁵(e₁, e₃) = −e⁵([e₁, e₃]) = 1
        assert_eq!(a.d(4).coeff(1, 3), 1.0);
        assert_eq!(a.d(4), TwoForm::from_terms(&[(1, 3, 1.0), (4, 2, 1.0)]));
        let x = Vector6::new(0.3, -1.0, 2.0, 0.5, 0.1, 7.0);
        assert_eq!(a.bracket(&x, &x), Vector6::zeros());
    }

    #[test]
    fn differentials_match_complex_coordinates() {
        // Re and Im of dz¹∧dz² with z¹ = e¹+ie², z² = e³+ie⁴
        let (re, im) = {
            let z1 = [(1usize, 1.0, 0.0), (2, 0.0, 1.0)];
            let z2 = [(3usize, 1.0, 0.0), (4, 0.0, 1.0)];
            let mut re = TwoForm::zero();
            let mut im = TwoForm::zero();
            for (i, ar, ai) in z1 {
                for (j, br, bi) in z2 {
                    re = re + TwoForm::basis(i, j) * (ar * br - ai * bi);
                    im = im + TwoForm::basis(i, j) * (ar * bi + ai * br);
                }
            }
            (re, im)
        };
        let a = iwasawa_algebra();
        assert_eq!(a.d(4), re);
        assert_eq!(a.d(5), im);
    }

    #[test]
    fn rejects_non_antisymmetric_constants() {
        let mut c = [[[0.0; 6]; 6]; 6];
        c[0][1][2] = 1.0;
        assert_eq!(FrameAlgebra::new(c), Err(IwasawaError::NotAntisymmetric));
    }

    #[test]
    fn integrable_structures() {
        let a = iwasawa_algebra();
        let j0 = InvariantOCS::from_form(&TwoForm::omega0()).unwrap();
        assert_eq!(nijenhuis_norm(&a, &j0), 0.0);
        for abc in edge_family_grid(21) {
            let j = InvariantOCS::from_form(&edge_family_form(abc)).unwrap();
            assert!(nijenhuis_norm(&a, &j) < 1e-12);
            assert_eq!(j.orientation(), 1);
        }
        let w3 = TwoForm::from_terms(&[(1, 2, -1.0), (3, 4, -1.0), (5, 6, 1.0)]);
        assert!(nijenhuis_norm(&a, &InvariantOCS::from_form(&w3).unwrap()) > 1.0);
        let r = haar_rotation(&mut sample_rng(3, 0));
        let moved = InvariantOCS::from_form(&conjugate(&TwoForm::omega0(), &r)).unwrap();
        assert!(nijenhuis_norm(&a, &moved) > 1e-3);
        assert!(InvariantOCS::new(Matrix6::identity(), 1e-10).is_err());
    }

    #[test]
    fn closure_examples() {
        let a = iwasawa_algebra();
        let ops = |u: Vector6<f64>, v: Vector6<f64>| InvariantOPS::span(&u, &v).unwrap();
        assert!(!horizontal_closed(&a, &ops(e(5), e(6))));
        assert!(horizontal_closed(&a, &ops(e(1), e(2))));
        assert!(horizontal_closed(&a, &ops(e(1) + e(3), e(2) + e(4))));
        assert!(vertical_closed(&a, &ops(e(1), e(2))));
        assert!(!vertical_closed(&a, &ops(e(1), e(3))));
        assert!(vertical_closed(&a, &ops(e(5), e(6))));
        let tilted = ops(e(1) * (0.75f64).sqrt() + e(5) * 0.5, e(2));
        assert!(!horizontal_closed(&a, &tilted));
        assert_eq!(ops(e(1), e(2)).image(), CartanPoint::new(1.0, 0.0, 0.0));
        assert_eq!(ops(e(3), e(4)).image(), CartanPoint::new(0.0, 1.0, 0.0));
        assert_eq!(ops(e(2), e(1)).image(), CartanPoint::new(-1.0, 0.0, 0.0));
        let diag = ops((e(1) + e(3)) / 2f64.sqrt(), (e(2) + e(4)) / 2f64.sqrt()).image();
        assert!(diag.max_abs_diff(&CartanPoint::new(0.5, 0.5, 0.0)) < 1e-15);
    }

    #[test]
    fn horizontal_closure_is_membership_in_the_first_four() {
        // grid over planes spanned by e₁ and a unit vector mixing e₂, e₃, e₅
        let a = iwasawa_algebra();
        for i in 0..=20 {
            for k in 0..=20 {
                let th = std::f64::consts::PI * i as f64 / 20.0;
                let ph = std::f64::consts::PI * k as f64 / 20.0;
                let w = e(2) * th.cos() + e(3) * th.sin() * ph.cos() + e(5) * th.sin() * ph.sin();
                let p = InvariantOPS::span(&e(1), &w).unwrap();
                let inside = (th.sin() * ph.sin()).abs() < 1e-12;
                assert_eq!(horizontal_closed(&a, &p), inside, "th={th} ph={ph}");
            }
        }
    }

    #[test]
    fn mixed_pairs() {
        let j0 = InvariantOCS::from_form(&TwoForm::omega0()).unwrap();
        let p = InvariantOPS::span(&e(1), &e(2)).unwrap();
        let m = mixed_pair(&j0, &p, 1.0).unwrap();
        assert_eq!(m, TwoForm::from_terms(&[(1, 2, 2.0), (3, 4, 1.0), (5, 6, 1.0)]));
        assert_eq!(mu_t(&m), CartanPoint::new(2.0, 1.0, 1.0));
        let bad = InvariantOPS::span(&e(1), &e(3)).unwrap();
        assert!(matches!(mixed_pair(&j0, &bad, 1.0), Err(IwasawaError::IncompatiblePair(_))));
    }

    #[test]
    fn small_scans_pass() {
        let (cloud, r) = scan_complex(500, 1, 1e-6).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.vertex, CartanPoint::new(1.0, 1.0, 1.0));
        assert_eq!(r.aligning_weyl, WeylElement::identity().to_row_major());
        assert_eq!(r.perturbed_accepted, r.perturbed);
        assert!(r.haar_min_rejected_distance > 1e-2);
        assert!(cloud.points.len() >= 102);
        let (_, k) = scan_k(300, 2).unwrap();
        assert!(k.pass, "{k:?}");
        let (_, kk) = scan_k_intersection(300, 3).unwrap();
        assert!(kk.pass, "{kk:?}");
        for which in [MixedSource::K, MixedSource::KIntersection] {
            let (_, m) = mixed_classes_over(200, 4, which).unwrap();
            assert!(m.pass, "{m:?}");
        }
    }

    #[test]
    fn scans_are_deterministic() {
        let a = scan_k(50, 9).unwrap().0.to_csv_string();
        let b = scan_k(50, 9).unwrap().0.to_csv_string();
        assert_eq!(a, b);
    }
}
