//! The toric moment map, Haar sampling of orbits, moment polytopes and
//! the singular-value polytopes of the moment map.

use std::io::Write;

use nalgebra::{DMatrix, Matrix6};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{conjugate, form_to_endo, Rotation, SkewEndomorphism, TwoForm, PAIRS};
use crate::cartan::{fundamental_weight, CartanPoint};
use crate::polytope::{hull, Polytope, PolytopeError};
use crate::scalar::Scalar;
use crate::weyl::{singular_vertex_set, to_chamber, weyl_group, weyl_orbit, WeylElement, WeylError};

#[derive(Debug, Error)]
pub enum MomentError {
    #[error("{count} of {n} samples left the polytope (max violation {max_violation:e})")]
    ToleranceExceeded { max_violation: f64, count: usize, n: usize },
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// `μ_T(ω) = (ω₁₂, ω₃₄, ω₅₆)`.
pub fn mu_t(form: &TwoForm) -> CartanPoint {
    CartanPoint::new(form.coeff(1, 2), form.coeff(3, 4), form.coeff(5, 6))
}

/// Generator for sample `index` of a run seeded with `seed`.
///
/// Each sample owns its own ChaCha stream, so results do not depend on how
/// samples are scheduled across threads.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Haar-distributed element of SO(6): QR of a Gaussian matrix with the
/// signs of `diag(R)` absorbed into `Q`, then a column flip if `det Q < 0`.
pub fn haar_rotation<R: Rng + ?Sized>(rng: &mut R) -> Rotation {
    let g = Matrix6::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..6 {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    Rotation::new(q).expect("QR factor is orthogonal")
}

/// Points of `μ_T` over some orbit or subset, with the seed that produced them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleCloud {
    pub seed: u64,
    pub source: String,
    pub points: Vec<CartanPoint>,
}

impl SampleCloud {
    /// CSV with a `# seed=…` comment line and an `x,y,z` header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), MomentError> {
        writeln!(w, "# seed={}, {}, n={}", self.seed, self.source, self.points.len())?;
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["x", "y", "z"])?;
        for p in &self.points {
            wr.serialize((p.x, p.y, p.z))?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn arrays(&self) -> Vec<[f64; 3]> {
        self.points.iter().map(CartanPoint::to_array).collect()
    }
}

pub(crate) fn fmt_point(p: &CartanPoint) -> String {
    format!("({},{},{})", p.x, p.y, p.z)
}

/// `μ_T(R ω_λ Rᵀ)` for `n` Haar rotations, followed by the Weyl-orbit
/// points `μ_T(w·ω_λ)`.
pub fn orbit_samples(lambda: &CartanPoint, n: usize, seed: u64) -> SampleCloud {
    let form = TwoForm::from_cartan(lambda);
    let mut points: Vec<CartanPoint> = (0..n as u64)
        .into_par_iter()
        .map(|k| {
            let r = haar_rotation(&mut sample_rng(seed, k));
            mu_t(&conjugate(&form, &r))
        })
        .collect();
    points.extend(weyl_orbit(lambda));
    SampleCloud { seed, source: format!("lambda={}", fmt_point(lambda)), points }
}

/// Same as [`orbit_samples`] without the torus-fixed points.
pub fn haar_orbit_samples(lambda: &CartanPoint, n: usize, seed: u64) -> SampleCloud {
    let mut cloud = orbit_samples(lambda, n, seed);
    cloud.points.truncate(n);
    cloud
}

/// `conv(W·λ)`.
pub fn moment_polytope<T: Scalar>(lambda: &CartanPoint<T>) -> Polytope<T> {
    let (c, _) = to_chamber(lambda);
    let pts: Vec<[T; 3]> = weyl_orbit(&c).iter().map(CartanPoint::to_array).collect();
    hull(&pts).expect("orbit is nonempty")
}

/// Basis of `{X ∈ 𝔰𝔬(6) : [X, 𝔉] = 0}`.
#[derive(Clone, Debug)]
pub struct StabilizerAlgebra {
    pub basis: Vec<SkewEndomorphism>,
}

impl StabilizerAlgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `Σ cₖ Bₖ`.
    pub fn element(&self, coeffs: &[f64]) -> SkewEndomorphism {
        let m = self
            .basis
            .iter()
            .zip(coeffs)
            .fold(Matrix6::zeros(), |acc, (b, c)| acc + b.matrix() * *c);
        SkewEndomorphism::from_matrix(m).expect("combination of skew matrices")
    }
}

/// Null space of `X ↦ [X, 𝔉_ref]` on the 15 coordinates of 𝔰𝔬(6), by SVD.
pub fn stabilizer_algebra(ref_form: &TwoForm) -> StabilizerAlgebra {
    let f = form_to_endo(ref_form);
    let gens: Vec<SkewEndomorphism> = (0..15)
        .map(|k| {
            let (i, j) = PAIRS[k];
            form_to_endo(&TwoForm::basis(i + 1, j + 1))
        })
        .collect();
    let mut a = DMatrix::zeros(36, 15);
    for (k, g) in gens.iter().enumerate() {
        let c = g.commutator(&f);
        for (r, v) in c.matrix().iter().enumerate() {
            a[(r, k)] = *v;
        }
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let smax = svd.singular_values.max().max(1.0);
    let basis = (0..15)
        .filter(|&k| svd.singular_values[k] <= 1e-10 * smax)
        .map(|k| {
            let m = gens
                .iter()
                .enumerate()
                .fold(Matrix6::zeros(), |acc, (j, g)| acc + g.matrix() * vt[(k, j)]);
            SkewEndomorphism::from_matrix(m).expect("combination of skew matrices")
        })
        .collect();
    StabilizerAlgebra { basis }
}

/// One singular-value polytope `u·conv(W_i·wλ)`.
#[derive(Clone, Debug)]
pub struct SingularPolytope<T = f64> {
    pub i: usize,
    pub w: WeylElement,
    /// Weyl element moving the polytope to its position; identity for the
    /// images of the fixed stabilizers `F_i`.
    pub conjugator: WeylElement,
    pub polytope: Polytope<T>,
}

/// The singular-value polytopes `conv(W_i·wλ)`, `i ∈ {1,2,3}`, `w ∈ W`,
/// together with their images under `W` (the same sets for the conjugate
/// stabilizers `uF_iu⁻¹`), with duplicates removed.
pub fn singular_value_polytopes<T: Scalar>(lambda: &CartanPoint<T>) -> Vec<SingularPolytope<T>> {
    let mut seen: Vec<Vec<[T; 3]>> = Vec::new();
    let mut out: Vec<SingularPolytope<T>> = Vec::new();
    for i in 1..=3 {
        for w in weyl_group() {
            let base = singular_vertex_set(lambda, w, i).expect("index in range");
            for u in weyl_group() {
                let mut pts: Vec<[T; 3]> = base.iter().map(|p| u.apply(p).to_array()).collect();
                pts.sort_by(crate::scalar::lex_cmp);
                let dup = seen.iter().any(|q| {
                    q.len() == pts.len() && q.iter().zip(&pts).all(|(a, b)| crate::scalar::points_eq(a, b))
                });
                if dup {
                    continue;
                }
                let polytope = hull(&pts).expect("nonempty");
                seen.push(pts);
                out.push(SingularPolytope { i, w: *w, conjugator: *u, polytope });
            }
        }
    }
    out
}

/// `ν₁ ↦ e¹²+e³⁴+e⁵⁶`, `ν₂ ↦ e⁵⁶`, `ν₃ ↦ e¹²−e³⁴+e⁵⁶`.
pub fn weight_form(i: usize) -> Result<TwoForm, WeylError> {
    let nu = fundamental_weight::<f64>(i).ok_or(WeylError::BadIndex(i))?;
    Ok(TwoForm::from_cartan(&nu))
}

/// Outcome of a containment check.
#[derive(Clone, Debug, Serialize)]
pub struct ContainmentReport {
    pub pass: bool,
    pub max_violation: f64,
    pub n: usize,
    pub seed: u64,
}

/// Largest scaled facet violation of the cloud against `p`.
pub fn containment(p: &Polytope<f64>, cloud: &SampleCloud, tol: f64) -> ContainmentReport {
    let max_violation = cloud
        .points
        .par_iter()
        .map(|q| p.max_violation(&q.to_array()))
        .reduce(|| f64::NEG_INFINITY, f64::max);
    ContainmentReport { pass: max_violation <= tol, max_violation, n: cloud.points.len(), seed: cloud.seed }
}

/// Samples `exp(X)·(w·ω_λ)` for `X` in the stabilizer of the `ν_i` form and
/// checks that `μ_T` stays in `conv(W_i·wλ)`.
pub fn verify_singular(
    lambda: &CartanPoint,
    i: usize,
    w: &WeylElement,
    n: usize,
    seed: u64,
    tol: f64,
) -> Result<ContainmentReport, MomentError> {
    let verts: Vec<[f64; 3]> = singular_vertex_set(lambda, w, i)?.iter().map(CartanPoint::to_array).collect();
    let target = hull(&verts)?;
    let alg = stabilizer_algebra(&weight_form(i)?);
    let base = TwoForm::from_cartan(&w.apply(lambda));
    let points: Vec<CartanPoint> = (0..n as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = sample_rng(seed, k);
            let c: Vec<f64> = (0..alg.dim()).map(|_| 2.0 * rng.sample::<f64, _>(StandardNormal)).collect();
            let r = Rotation::exp(&alg.element(&c));
            mu_t(&conjugate(&base, &r))
        })
        .collect();
    let cloud = SampleCloud { seed, source: format!("singular i={i} lambda={}", fmt_point(lambda)), points };
    let report = containment(&target, &cloud, tol);
    if !report.pass {
        let count = cloud
            .points
            .iter()
            .filter(|q| target.max_violation(&q.to_array()) > tol)
            .count();
        return Err(MomentError::ToleranceExceeded { max_violation: report.max_violation, count, n });
    }
    Ok(report)
}

/// Monte-Carlo estimate of `vol(inner) / vol(outer)` from `n` uniform points
/// in the bounding box of `outer`.
pub fn monte_carlo_volume_ratio(inner: &Polytope<f64>, outer: &Polytope<f64>, n: usize, seed: u64) -> f64 {
    let (lo, hi) = outer.bounding_box();
    let (a, b) = (0..n as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = sample_rng(seed, k);
            let p: [f64; 3] = core::array::from_fn(|d| lo[d] + (hi[d] - lo[d]) * rng.random::<f64>());
            (
                usize::from(inner.contains(&p, &1e-12)),
                usize::from(outer.contains(&p, &1e-12)),
            )
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{classify, OrbitClass, TorusElement, DEFAULT_TOL};
    use crate::scalar::{ratio, Rational};

    #[test]
    fn mu_t_examples() {
        assert_eq!(mu_t(&TwoForm::omega0()), CartanPoint::new(1.0, 1.0, 1.0));
        let f = TwoForm::from_terms(&[(1, 2, 1.0), (1, 3, 5.0)]);
        assert_eq!(mu_t(&f), CartanPoint::new(1.0, 0.0, 0.0));
        // e¹∧J₀e¹ = e¹²
        let g = -TwoForm::omega0() + TwoForm::basis(1, 2) * 2.0;
        assert_eq!(mu_t(&g), CartanPoint::new(1.0, -1.0, -1.0));
    }

    #[test]
    fn haar_is_deterministic_and_valid() {
        let a = haar_rotation(&mut sample_rng(42, 0));
        let b = haar_rotation(&mut sample_rng(42, 0));
        assert_eq!(a, b);
        assert_ne!(a, haar_rotation(&mut sample_rng(42, 1)));
        assert!((a.matrix().determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_mean_is_near_zero() {
        let n = 10_000;
        let sum = (0..n as u64)
            .map(|k| *haar_rotation(&mut sample_rng(3, k)).matrix())
            .fold(Matrix6::zeros(), |a, m| a + m);
        assert!((sum / n as f64).amax() < 0.05);
    }

    #[test]
    fn torus_equivariance_is_exact() {
        let f = TwoForm::new(core::array::from_fn(|k| (k as f64).cos())).unwrap();
        let t = TorusElement::new([0.4, 1.1, -2.0]).to_rotation();
        assert!(mu_t(&conjugate(&f, &t)).max_abs_diff(&mu_t(&f)) < 1e-14);
    }

    #[test]
    fn nu1_cloud_stays_in_tetrahedron() {
        let nu1 = CartanPoint::new(1.0, 1.0, 1.0);
        let cloud = orbit_samples(&nu1, 1000, 5);
        assert_eq!(cloud.points.len(), 1004);
        let rep = containment(&moment_polytope(&nu1), &cloud, 1e-9);
        assert!(rep.pass, "{rep:?}");
        assert_eq!(orbit_samples(&CartanPoint::origin(), 10, 1).points, vec![CartanPoint::origin(); 11]);
    }

    #[test]
    fn cloud_is_reproducible_and_csv_is_stable() {
        let l = CartanPoint::new(1.0, 0.5, 2.0);
        let a = orbit_samples(&l, 50, 9);
        let b = orbit_samples(&l, 50, 9);
        assert_eq!(a, b);
        let csv = a.to_csv_string();
        assert!(csv.starts_with("# seed=9, lambda=(1,0.5,2), n=74\nx,y,z\n"));
        assert_eq!(csv, b.to_csv_string());
    }

    #[test]
    fn moment_polytope_shapes() {
        let q = |a: i64| ratio(a, 1);
        let t: Polytope<Rational> = moment_polytope(&CartanPoint::new(q(1), q(1), q(2)));
        assert_eq!(t.vertices().len(), 12);
        assert_eq!(t.facets().len(), 8);
        let g: Polytope<Rational> = moment_polytope(&CartanPoint::new(q(0), q(0), q(1)));
        assert_eq!(g.facets().len(), 8);
        let gen = moment_polytope(&CartanPoint::new(1.0, 0.5, 2.0));
        assert_eq!(gen.vertices().len(), 24);
        assert_eq!(gen.facets().len(), 14);
        let sizes: Vec<usize> = gen.faces().iter().map(Vec::len).collect();
        assert_eq!(sizes.iter().filter(|&&s| s == 6).count(), 8);
        assert_eq!(sizes.iter().filter(|&&s| s == 4).count(), 6);
    }

    #[test]
    fn stabilizer_dimensions() {
        let cases = [
            (TwoForm::omega0(), 9),
            (TwoForm::basis(5, 6), 7),
            (TwoForm::from_terms(&[(1, 2, 1.0), (3, 4, 0.5), (5, 6, 2.0)]), 3),
            (TwoForm::from_terms(&[(1, 2, 1.0), (3, 4, 1.0), (5, 6, 2.0)]), 5),
            (TwoForm::from_terms(&[(1, 2, 2.0), (5, 6, 2.0)]), 5),
        ];
        for (f, d) in cases {
            let alg = stabilizer_algebra(&f);
            assert_eq!(alg.dim(), d, "{f}");
            assert_eq!(alg.dim(), classify(&f, DEFAULT_TOL).unwrap().stabilizer_dim());
            let fm = form_to_endo(&f);
            for b in &alg.basis {
                assert!(b.commutator(&fm).matrix().amax() < 1e-12);
            }
        }
        assert_eq!(OrbitClass::Grassmannian.stabilizer_dim(), 7);
    }

    #[test]
    fn singular_polytopes_of_nu1() {
        let s = singular_value_polytopes(&CartanPoint::new(ratio(1, 1), ratio(1, 1), ratio(1, 1)));
        let dims: Vec<usize> = s.iter().map(|p| p.polytope.dim()).collect();
        assert_eq!(dims.iter().filter(|&&d| d == 0).count(), 4);
        assert_eq!(dims.iter().filter(|&&d| d == 1).count(), 6);
        assert_eq!(dims.iter().filter(|&&d| d == 2).count(), 4);
        assert_eq!(s.len(), 14);
        for i in 1..=3 {
            for w in weyl_group() {
                let lit = singular_vertex_set(&CartanPoint::new(ratio(1, 1), ratio(1, 1), ratio(1, 1)), w, i).unwrap();
                assert!(s.iter().any(|p| p.polytope.vertices().len() == lit.len()
                    && lit.iter().all(|v| p.polytope.vertices().contains(&v.to_array()))));
            }
        }
    }

    #[test]
    fn singular_polytopes_cover_generic_facets() {
        let l = CartanPoint::new(ratio(2, 2), ratio(1, 2), ratio(2, 1));
        let poly = moment_polytope(&l);
        let s = singular_value_polytopes(&l);
        let planar: Vec<&Polytope<Rational>> = s.iter().map(|p| &p.polytope).filter(|p| p.dim() == 2).collect();
        // facet hexagons plus the internal walls x ± y ± z = const
        assert_eq!(planar.iter().filter(|p| p.vertices().len() == 6).count(), 16);
        assert!(planar.iter().filter(|p| p.vertices().len() == 4).count() >= 6);
        for (f, face) in poly.facets().iter().zip(poly.faces()) {
            let verts: Vec<[Rational; 3]> = face.iter().map(|&k| poly.vertices()[k].clone()).collect();
            let found = planar.iter().any(|p| {
                p.vertices().len() == verts.len() && verts.iter().all(|v| p.vertices().contains(v))
            });
            assert!(found, "facet {f:?} missing");
        }
    }

    #[test]
    fn verify_singular_small() {
        let nu1 = CartanPoint::new(1.0, 1.0, 1.0);
        let id = WeylElement::identity();
        let r = verify_singular(&nu1, 1, &id, 200, 1, 1e-9).unwrap();
        assert!(r.max_violation <= 1e-9);
        verify_singular(&nu1, 2, &id, 200, 1, 1e-9).unwrap();
        let g = CartanPoint::new(1.0, 0.5, 2.0);
        for i in 1..=3 {
            for w in weyl_group().iter().take(5) {
                verify_singular(&g, i, w, 200, 2, 1e-9).unwrap();
            }
        }
    }
}
