//! Incremental convex hull in ℝ³ with first-class lower-dimensional results.

use std::collections::HashMap;

use crate::scalar::{
    cross, det3, dot, lex_cmp, norm_sq, points_eq, scale, sub, Scalar,
};

use super::{Facet, Polytope};

struct Face<T> {
    v: [usize; 3],
    normal: [T; 3],
    offset: T,
    scale: T,
    degenerate: bool,
    alive: bool,
}

impl<T: Scalar> Face<T> {
    fn new(pts: &[[T; 3]], v: [usize; 3]) -> Self {
        let normal = cross(&sub(&pts[v[1]], &pts[v[0]]), &sub(&pts[v[2]], &pts[v[0]]));
        let offset = dot(&normal, &pts[v[0]]);
        let scale = T::normal_scale(&normal);
        let degenerate = if T::EXACT {
            normal.iter().all(|c| c.is_zero())
        } else {
            scale.to_f64_lossy() <= f64::EPSILON * 16.0
        };
        Face { v, normal, offset, scale, degenerate, alive: true }
    }

    fn signed_distance_numerator(&self, p: &[T; 3]) -> T {
        dot(&self.normal, p) - self.offset.clone()
    }

    fn sees(&self, p: &[T; 3]) -> bool {
        !self.degenerate && T::is_positive_scaled(&self.signed_distance_numerator(p), &self.scale)
    }
}

fn dedup<T: Scalar>(points: &[[T; 3]]) -> Vec<[T; 3]> {
    let mut sorted = points.to_vec();
    sorted.sort_by(lex_cmp);
    let mut out: Vec<[T; 3]> = Vec::with_capacity(sorted.len());
    for p in sorted {
        if T::EXACT {
            if out.last().map_or(true, |q| lex_cmp(q, &p) != std::cmp::Ordering::Equal) {
                out.push(p);
            }
        } else if !out.iter().rev().take(64).any(|q| points_eq(q, &p)) {
            out.push(p);
        }
    }
    out
}

fn length<T: Scalar>(v: &[T; 3]) -> T {
    if T::EXACT {
        norm_sq(v)
    } else {
        T::normal_scale(v)
    }
}

/// Builds the hull of a finite point set.
pub(crate) fn build<T: Scalar>(points: &[[T; 3]]) -> Polytope<T> {
    let pts = dedup(points);
    assert!(!pts.is_empty(), "hull of an empty point set");

    // Affine dimension and an initial simplex.
    let p0 = 0;
    let far = |from: &[T; 3]| -> (usize, T) {
        let mut best = (0, T::zero());
        for (i, p) in pts.iter().enumerate() {
            let d = norm_sq(&sub(p, from));
            if d > best.1 {
                best = (i, d);
            }
        }
        best
    };
    let (p1, d01) = far(&pts[p0]);
    let tol = T::tolerance();
    if d01 <= tol.clone() * tol.clone() || pts.len() == 1 {
        return Polytope::point(pts[p0].clone());
    }
    let axis = sub(&pts[p1], &pts[p0]);
    let axis_len = length(&axis);
    let mut p2 = None;
    let mut best_area = T::zero();
    for (i, p) in pts.iter().enumerate() {
        let c = cross(&axis, &sub(p, &pts[p0]));
        let a = norm_sq(&c);
        if a > best_area {
            best_area = a;
            p2 = Some(i);
        }
    }
    let planar_normal = match p2 {
        Some(i) => {
            let n = cross(&axis, &sub(&pts[i], &pts[p0]));
            // distance from the line = |n| / |axis|
            if T::is_zero_scaled(&length(&n), &axis_len) {
                None
            } else {
                Some((i, n))
            }
        }
        None => None,
    };
    let Some((p2, normal)) = planar_normal else {
        return segment(&pts, p0, p1, axis);
    };
    let normal_len = T::normal_scale(&normal);
    let mut p3 = None;
    let mut best_vol = T::zero();
    for (i, p) in pts.iter().enumerate() {
        let v = dot(&normal, &sub(p, &pts[p0])).abs();
        if v > best_vol {
            best_vol = v;
            p3 = Some(i);
        }
    }
    let p3 = match p3 {
        Some(i) if T::is_positive_scaled(&best_vol, &normal_len) => i,
        _ => return super::planar::polygon(&pts, &pts[p0], normal),
    };

    // Tetrahedron with outward orientation.
    let mut tet = [p0, p1, p2, p3];
    let o = det3(
        &sub(&pts[p1], &pts[p0]),
        &sub(&pts[p2], &pts[p0]),
        &sub(&pts[p3], &pts[p0]),
    );
    if o > T::zero() {
        tet.swap(1, 2);
    }
    let [a, b, c, d] = tet;
    let mut faces: Vec<Face<T>> = vec![
        Face::new(&pts, [a, b, c]),
        Face::new(&pts, [a, d, b]),
        Face::new(&pts, [b, d, c]),
        Face::new(&pts, [c, d, a]),
    ];
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..3 {
            edges.insert((f.v[k], f.v[(k + 1) % 3]), fi);
        }
    }

    // Far points first so the hull grows quickly and most later points are interior.
    let centroid = {
        let four = T::from_i32(4).unwrap();
        let mut s = [T::zero(), T::zero(), T::zero()];
        for &i in &tet {
            for k in 0..3 {
                s[k] = s[k].clone() + pts[i][k].clone();
            }
        }
        s.map(|c| c / four.clone())
    };
    let mut order: Vec<usize> = (0..pts.len()).filter(|i| !tet.contains(i)).collect();
    let dist: Vec<T> = pts.iter().map(|p| norm_sq(&sub(p, &centroid))).collect();
    order.sort_by(|&i, &j| {
        dist[j]
            .partial_cmp(&dist[i])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });

    let mut alive_count = 4usize;
    for &pi in &order {
        let p = &pts[pi];
        let mut visible: Vec<usize> = faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive && f.sees(p))
            .map(|(i, _)| i)
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut is_visible = vec![false; faces.len()];
        for &fi in &visible {
            is_visible[fi] = true;
        }
        // Degenerate slivers adjacent to the visible region go with it.
        loop {
            let mut grew = false;
            for fi in 0..faces.len() {
                if !faces[fi].alive || is_visible[fi] || !faces[fi].degenerate {
                    continue;
                }
                let v = faces[fi].v;
                let touches = (0..3).any(|k| {
                    edges
                        .get(&(v[(k + 1) % 3], v[k]))
                        .is_some_and(|&nb| is_visible[nb])
                });
                if touches {
                    is_visible[fi] = true;
                    visible.push(fi);
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }

        let mut horizon: Vec<(usize, usize)> = Vec::new();
        for &fi in &visible {
            let v = faces[fi].v;
            for k in 0..3 {
                let (s, e) = (v[k], v[(k + 1) % 3]);
                let across = edges.get(&(e, s)).copied();
                if across.map_or(true, |nb| !is_visible[nb]) {
                    horizon.push((s, e));
                }
            }
        }
        for &fi in &visible {
            let v = faces[fi].v;
            for k in 0..3 {
                edges.remove(&(v[k], v[(k + 1) % 3]));
            }
            faces[fi].alive = false;
        }
        alive_count -= visible.len();
        for (s, e) in horizon {
            let f = Face::new(&pts, [s, e, pi]);
            let fi = faces.len();
            for k in 0..3 {
                edges.insert((f.v[k], f.v[(k + 1) % 3]), fi);
            }
            faces.push(f);
            alive_count += 1;
        }

        if faces.len() > 4 * alive_count + 64 {
            compact(&mut faces, &mut edges);
        }
    }

    let triangles: Vec<&Face<T>> = faces.iter().filter(|f| f.alive && !f.degenerate).collect();
    assemble_3d(&pts, &triangles)
}

fn compact<T: Scalar>(faces: &mut Vec<Face<T>>, edges: &mut HashMap<(usize, usize), usize>) {
    faces.retain(|f| f.alive);
    edges.clear();
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..3 {
            edges.insert((f.v[k], f.v[(k + 1) % 3]), fi);
        }
    }
}

fn same_plane<T: Scalar>(a: &([T; 3], T), b: &([T; 3], T)) -> bool {
    if T::EXACT {
        a == b
    } else {
        let dn = (0..3)
            .map(|k| (a.0[k].clone() - b.0[k].clone()).abs().to_f64_lossy())
            .fold(0.0, f64::max);
        dn <= 1e-7 && T::approx_eq(&a.1, &b.1)
    }
}

/// Merges coplanar triangles into facets and keeps only extreme vertices.
fn assemble_3d<T: Scalar>(pts: &[[T; 3]], triangles: &[&Face<T>]) -> Polytope<T> {
    // (canonical plane, area weight used to pick the representative)
    let mut planes: Vec<(([T; 3], T), T)> = Vec::new();
    for f in triangles {
        let canon = T::canonical_plane(f.normal.clone(), f.offset.clone());
        match planes.iter_mut().find(|(p, _)| same_plane(p, &canon)) {
            Some(entry) => {
                if f.scale > entry.1 {
                    *entry = (canon, f.scale.clone());
                }
            }
            None => planes.push((canon, f.scale.clone())),
        }
    }
    let facets: Vec<Facet<T>> = planes
        .into_iter()
        .map(|((normal, offset), _)| Facet { normal, offset })
        .collect();

    let mut used: Vec<usize> = triangles.iter().flat_map(|f| f.v).collect();
    used.sort_unstable();
    used.dedup();

    let mut vertices: Vec<[T; 3]> = Vec::new();
    for &i in &used {
        let p = &pts[i];
        let tight: Vec<&Facet<T>> = facets.iter().filter(|f| f.is_tight(p)).collect();
        if has_rank_three(&tight) {
            vertices.push(p.clone());
        }
    }
    Polytope::from_parts(3, vertices, facets, Vec::new())
}

fn has_rank_three<T: Scalar>(facets: &[&Facet<T>]) -> bool {
    let n = facets.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let d = det3(&facets[i].normal, &facets[j].normal, &facets[k].normal);
                let s = T::normal_scale(&facets[i].normal)
                    * T::normal_scale(&facets[j].normal)
                    * T::normal_scale(&facets[k].normal);
                let nonzero = if T::EXACT {
                    !d.is_zero()
                } else {
                    d.abs().to_f64_lossy() > 1e-9 * s.to_f64_lossy()
                };
                if nonzero {
                    return true;
                }
            }
        }
    }
    false
}

fn segment<T: Scalar>(pts: &[[T; 3]], p0: usize, p1: usize, dir: [T; 3]) -> Polytope<T> {
    // extreme points along the direction
    let proj = |p: &[T; 3]| dot(&dir, p);
    let mut lo = p0;
    let mut hi = p1;
    for (i, p) in pts.iter().enumerate() {
        if proj(p) < proj(&pts[lo]) {
            lo = i;
        }
        if proj(p) > proj(&pts[hi]) {
            hi = i;
        }
    }
    let a = pts[lo].clone();
    let b = pts[hi].clone();
    let d = sub(&b, &a);
    let facets = vec![
        Facet::canonical(d.clone(), dot(&d, &b)),
        Facet::canonical(scale(&d, &-T::one()), -dot(&d, &a)),
    ];
    let equalities = complement_planes(&d, &a);
    Polytope::from_parts(1, vec![a, b], facets, equalities)
}

/// Two planes whose intersection is the line through `at` with direction `d`.
pub(crate) fn complement_planes<T: Scalar>(d: &[T; 3], at: &[T; 3]) -> Vec<Facet<T>> {
    // cross with the axis least aligned with d
    let abs: Vec<T> = d.iter().map(|c| c.abs()).collect();
    let k = (0..3)
        .min_by(|&i, &j| abs[i].partial_cmp(&abs[j]).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap();
    let mut axis = [T::zero(), T::zero(), T::zero()];
    axis[k] = T::one();
    let n1 = cross(d, &axis);
    let n2 = cross(d, &n1);
    vec![
        Facet::canonical(n1.clone(), dot(&n1, at)),
        Facet::canonical(n2.clone(), dot(&n2, at)),
    ]
}
