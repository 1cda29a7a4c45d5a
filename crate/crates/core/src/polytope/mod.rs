//! Convex polytopes in ℝ³: hulls, H-representations, intersections and sections.
//!
//! A [`Polytope`] carries both representations. Vertices are the extreme
//! points only; facets are inequalities `normal·p ≤ offset` in canonical
//! form (primitive integer normals for rationals, unit normals for floats),
//! sorted lexicographically. Lower-dimensional polytopes additionally carry
//! the equations of their affine hull, and their inequalities are stated
//! inside it.

mod hull;
mod io;
mod planar;

use thiserror::Error;

use crate::scalar::{add, cross, det3, dot, lex_cmp, points_eq, scale, sub, Scalar};

pub use io::{facets_json, write_off};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("hull of an empty point set")]
    EmptyInput,
    #[error("the polytopes do not intersect")]
    EmptyIntersection,
    #[error("the plane does not meet the polytope")]
    EmptySection,
    #[error("operation needs a full-dimensional polytope (got dimension {0})")]
    NotFullDimensional(usize),
}

/// The closed halfspace `normal·p ≤ offset` (or the plane `normal·p = offset`
/// when used as an affine-hull equation).
#[derive(Clone, Debug, PartialEq)]
pub struct Facet<T = f64> {
    pub normal: [T; 3],
    pub offset: T,
}

impl<T: Scalar> Facet<T> {
    pub fn canonical(normal: [T; 3], offset: T) -> Self {
        let (normal, offset) = T::canonical_plane(normal, offset);
        Facet { normal, offset }
    }

    /// `normal·p − offset`.
    pub fn slack(&self, p: &[T; 3]) -> T {
        dot(&self.normal, p) - self.offset.clone()
    }

    /// Slack measured in units of the largest normal component.
    pub fn scaled_violation(&self, p: &[T; 3]) -> T {
        let m = self
            .normal
            .iter()
            .map(|c| c.abs())
            .fold(T::zero(), |a, b| if b > a { b } else { a });
        if m.is_zero() {
            self.slack(p)
        } else {
            self.slack(p) / m
        }
    }

    pub(crate) fn is_tight(&self, p: &[T; 3]) -> bool {
        T::is_zero_scaled(&self.slack(p), &T::normal_scale(&self.normal))
    }

    fn approx_eq(&self, other: &Self) -> bool {
        points_eq(&self.normal, &other.normal) && T::approx_eq(&self.offset, &other.offset)
    }
}

#[derive(Clone, Debug)]
pub struct Polytope<T = f64> {
    dim: usize,
    vertices: Vec<[T; 3]>,
    facets: Vec<Facet<T>>,
    equalities: Vec<Facet<T>>,
    faces: Vec<Vec<usize>>,
}

fn facet_cmp<T: Scalar>(a: &Facet<T>, b: &Facet<T>) -> std::cmp::Ordering {
    lex_cmp(&a.normal, &b.normal).then_with(|| {
        a.offset
            .partial_cmp(&b.offset)
            .unwrap_or(std::cmp::Ordering::Equal)
    })
}

fn to_f64_array<T: Scalar>(p: &[T; 3]) -> [f64; 3] {
    [p[0].to_f64_lossy(), p[1].to_f64_lossy(), p[2].to_f64_lossy()]
}

/// Orders the vertex indices of a planar convex face counter-clockwise around `normal`.
fn ccw_order(points: &[[f64; 3]], idx: &mut [usize], normal: [f64; 3]) {
    if idx.len() < 3 {
        return;
    }
    let n = idx.len() as f64;
    let mut c = [0.0; 3];
    for &i in idx.iter() {
        for k in 0..3 {
            c[k] += points[i][k] / n;
        }
    }
    let d = |i: usize| [points[i][0] - c[0], points[i][1] - c[1], points[i][2] - c[2]];
    let u = d(idx[0]);
    let w = [
        normal[1] * u[2] - normal[2] * u[1],
        normal[2] * u[0] - normal[0] * u[2],
        normal[0] * u[1] - normal[1] * u[0],
    ];
    let angle = |i: usize| {
        let v = d(i);
        let a = v[0] * w[0] + v[1] * w[1] + v[2] * w[2];
        let b = v[0] * u[0] + v[1] * u[1] + v[2] * u[2];
        a.atan2(b)
    };
    idx.sort_by(|&i, &j| angle(i).partial_cmp(&angle(j)).unwrap_or(std::cmp::Ordering::Equal));
}

impl<T: Scalar> Polytope<T> {
    pub(crate) fn from_parts(
        dim: usize,
        mut vertices: Vec<[T; 3]>,
        mut facets: Vec<Facet<T>>,
        mut equalities: Vec<Facet<T>>,
    ) -> Self {
        for e in equalities.iter_mut() {
            let first = e.normal.iter().find(|c| !c.is_zero()).cloned();
            if first.is_some_and(|c| c < T::zero()) {
                e.normal = e.normal.clone().map(|c| -c);
                e.offset = -e.offset.clone();
            }
        }
        vertices.sort_by(lex_cmp);
        facets.sort_by(facet_cmp);
        facets.dedup_by(|a, b| a.approx_eq(b));

        let fv: Vec<[f64; 3]> = vertices.iter().map(to_f64_array).collect();
        let faces = match dim {
            3 => facets
                .iter()
                .map(|f| {
                    let mut idx: Vec<usize> =
                        (0..vertices.len()).filter(|&i| f.is_tight(&vertices[i])).collect();
                    ccw_order(&fv, &mut idx, to_f64_array(&f.normal));
                    idx
                })
                .collect(),
            2 => {
                let mut idx: Vec<usize> = (0..vertices.len()).collect();
                ccw_order(&fv, &mut idx, to_f64_array(&equalities[0].normal));
                vec![idx]
            }
            _ => vec![(0..vertices.len()).collect()],
        };
        Polytope { dim, vertices, facets, equalities, faces }
    }

    pub(crate) fn point(p: [T; 3]) -> Self {
        let mut equalities = Vec::new();
        for k in 0..3 {
            let mut n = [T::zero(), T::zero(), T::zero()];
            n[k] = T::one();
            equalities.push(Facet::canonical(n, p[k].clone()));
        }
        Self::from_parts(0, vec![p], Vec::new(), equalities)
    }

    /// Affine dimension, 0 to 3.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Extreme points, sorted lexicographically.
    pub fn vertices(&self) -> &[[T; 3]] {
        &self.vertices
    }

    /// The facet inequalities in canonical order.
    pub fn facets(&self) -> &[Facet<T>] {
        &self.facets
    }

    /// Equations of the affine hull; empty for full-dimensional polytopes.
    pub fn affine_hull(&self) -> &[Facet<T>] {
        &self.equalities
    }

    /// Canonical H-representation: the facet inequalities.
    pub fn h_representation(&self) -> Vec<Facet<T>> {
        self.facets.clone()
    }

    /// Vertex index cycles, one per facet (in facet order) for dim 3,
    /// a single cycle for polygons.
    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        match self.dim {
            0 => {}
            1 => out.push((0, 1)),
            _ => {
                for f in &self.faces {
                    for k in 0..f.len() {
                        let (a, b) = (f[k], f[(k + 1) % f.len()]);
                        out.push((a.min(b), a.max(b)));
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `V − E + F` for a 3-polytope.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges().len() as i64 + self.facets.len() as i64
    }

    /// True iff every inequality and affine-hull equation holds within `tol`,
    /// measured in units of the largest normal component.
    pub fn contains(&self, p: &[T; 3], tol: &T) -> bool {
        self.max_violation(p) <= *tol
    }

    /// Largest scaled violation of the H-representation at `p` (≤ 0 inside).
    pub fn max_violation(&self, p: &[T; 3]) -> T {
        let mut worst: Option<T> = None;
        let mut take = |v: T| {
            if worst.as_ref().map_or(true, |w| v > *w) {
                worst = Some(v);
            }
        };
        for f in &self.facets {
            take(f.scaled_violation(p));
        }
        for e in &self.equalities {
            take(e.scaled_violation(p).abs());
        }
        worst.unwrap_or_else(T::zero)
    }

    /// Same vertex set and facet system (exact for rationals, within tolerance for floats).
    pub fn same_as(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.vertices.len() == other.vertices.len()
            && self.facets.len() == other.facets.len()
            && self.vertices.iter().zip(&other.vertices).all(|(a, b)| points_eq(a, b))
            && self.facets.iter().zip(&other.facets).all(|(a, b)| a.approx_eq(b))
    }

    pub fn to_f64(&self) -> Polytope<f64> {
        let conv = |f: &Facet<T>| Facet::canonical(to_f64_array(&f.normal), f.offset.to_f64_lossy());
        Polytope::from_parts(
            self.dim,
            self.vertices.iter().map(to_f64_array).collect(),
            self.facets.iter().map(conv).collect(),
            self.equalities.iter().map(conv).collect(),
        )
    }

    /// Euclidean volume of a 3-polytope (zero otherwise).
    pub fn volume(&self) -> f64 {
        if self.dim < 3 {
            return 0.0;
        }
        let pts: Vec<[f64; 3]> = self.vertices.iter().map(to_f64_array).collect();
        let n = pts.len() as f64;
        let mut c = [0.0; 3];
        for p in &pts {
            for k in 0..3 {
                c[k] += p[k] / n;
            }
        }
        let mut vol = 0.0;
        for f in &self.faces {
            for k in 1..f.len().saturating_sub(1) {
                let a = sub(&pts[f[0]], &c);
                let b = sub(&pts[f[k]], &c);
                let d = sub(&pts[f[k + 1]], &c);
                vol += det3(&a, &b, &d) / 6.0;
            }
        }
        vol.abs()
    }

    /// Bounding box `(min, max)` of the vertex set.
    pub fn bounding_box(&self) -> ([T; 3], [T; 3]) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices {
            for k in 0..3 {
                if v[k] < lo[k] {
                    lo[k] = v[k].clone();
                }
                if v[k] > hi[k] {
                    hi[k] = v[k].clone();
                }
            }
        }
        (lo, hi)
    }
}

/// Convex hull of a nonempty finite point set.
pub fn hull<T: Scalar>(points: &[[T; 3]]) -> Result<Polytope<T>, PolytopeError> {
    if points.is_empty() {
        return Err(PolytopeError::EmptyInput);
    }
    Ok(hull::build(points))
}

fn solve3<T: Scalar>(a: &Facet<T>, b: &Facet<T>, c: &Facet<T>) -> Option<[T; 3]> {
    let d = det3(&a.normal, &b.normal, &c.normal);
    let s = T::normal_scale(&a.normal) * T::normal_scale(&b.normal) * T::normal_scale(&c.normal);
    if T::EXACT {
        if d.is_zero() {
            return None;
        }
    } else if d.abs().to_f64_lossy() <= 1e-12 * s.to_f64_lossy() {
        return None;
    }
    let bc = cross(&b.normal, &c.normal);
    let ca = cross(&c.normal, &a.normal);
    let ab = cross(&a.normal, &b.normal);
    let num = add(
        &add(&scale(&bc, &a.offset), &scale(&ca, &b.offset)),
        &scale(&ab, &c.offset),
    );
    Some(num.map(|v| v / d.clone()))
}

/// Vertices of a bounded halfspace system, by enumerating triples of planes.
pub fn halfspace_vertices<T: Scalar>(halfspaces: &[Facet<T>]) -> Vec<[T; 3]> {
    let tol = T::tolerance();
    let n = halfspaces.len();
    let mut out: Vec<[T; 3]> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let Some(p) = solve3(&halfspaces[i], &halfspaces[j], &halfspaces[k]) else {
                    continue;
                };
                let feasible = halfspaces.iter().all(|h| h.scaled_violation(&p) <= tol);
                if feasible && !out.iter().any(|q| points_eq(q, &p)) {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// Clips `p` to the halfspace `h`; `None` when nothing remains.
fn clip<T: Scalar>(p: &Polytope<T>, h: &Facet<T>) -> Option<Polytope<T>> {
    let nscale = T::normal_scale(&h.normal);
    let side: Vec<T> = p.vertices.iter().map(|v| h.slack(v)).collect();
    let inside = |s: &T| !T::is_positive_scaled(s, &nscale);
    if side.iter().all(inside) {
        return Some(p.clone());
    }
    let mut pts: Vec<[T; 3]> = p
        .vertices
        .iter()
        .zip(&side)
        .filter(|(_, s)| inside(s))
        .map(|(v, _)| v.clone())
        .collect();
    for (a, b) in p.edges() {
        let (sa, sb) = (&side[a], &side[b]);
        if inside(sa) == inside(sb) || T::is_zero_scaled(sa, &nscale) || T::is_zero_scaled(sb, &nscale) {
            continue;
        }
        let t = sa.clone() / (sa.clone() - sb.clone());
        let d = sub(&p.vertices[b], &p.vertices[a]);
        pts.push(add(&p.vertices[a], &scale(&d, &t)));
    }
    if pts.is_empty() {
        None
    } else {
        Some(hull::build(&pts))
    }
}

/// `P ∩ Q` for full-dimensional `P`, `Q`, by clipping `P` against each facet of `Q`.
pub fn intersect<T: Scalar>(p: &Polytope<T>, q: &Polytope<T>) -> Result<Polytope<T>, PolytopeError> {
    for x in [p, q] {
        if x.dim != 3 {
            return Err(PolytopeError::NotFullDimensional(x.dim));
        }
    }
    let mut cur = p.clone();
    for h in &q.facets {
        cur = clip(&cur, h).ok_or(PolytopeError::EmptyIntersection)?;
    }
    Ok(cur)
}

/// `P ∩ {normal·p = offset}` for a full-dimensional `P`.
pub fn section<T: Scalar>(
    p: &Polytope<T>,
    normal: [T; 3],
    offset: T,
) -> Result<Polytope<T>, PolytopeError> {
    if p.dim != 3 {
        return Err(PolytopeError::NotFullDimensional(p.dim));
    }
    let plane = Facet { normal, offset };
    let nscale = T::normal_scale(&plane.normal);
    let side: Vec<T> = p.vertices.iter().map(|v| plane.slack(v)).collect();
    let on = |s: &T| T::is_zero_scaled(s, &nscale);

    let mut pts: Vec<[T; 3]> = p
        .vertices
        .iter()
        .zip(&side)
        .filter(|(_, s)| on(s))
        .map(|(v, _)| v.clone())
        .collect();
    for (a, b) in p.edges() {
        let (sa, sb) = (&side[a], &side[b]);
        if on(sa) || on(sb) {
            continue;
        }
        if (*sa > T::zero()) != (*sb > T::zero()) {
            let t = sa.clone() / (sa.clone() - sb.clone());
            let d = sub(&p.vertices[b], &p.vertices[a]);
            pts.push(add(&p.vertices[a], &scale(&d, &t)));
        }
    }
    if pts.is_empty() {
        return Err(PolytopeError::EmptySection);
    }
    hull(&pts)
}
