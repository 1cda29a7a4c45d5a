use crate::scalar::{cross, dot, lex_cmp, sub, Scalar};

use super::{Facet, Polytope};

fn orient<T: Scalar>(normal: &[T; 3], a: &[T; 3], b: &[T; 3], c: &[T; 3]) -> T {
    dot(normal, &cross(&sub(b, a), &sub(c, a)))
}

fn turns_left<T: Scalar>(normal: &[T; 3], a: &[T; 3], b: &[T; 3], c: &[T; 3]) -> bool {
    let o = orient(normal, a, b, c);
    let s = T::normal_scale(normal) * T::normal_scale(&sub(b, a));
    T::is_positive_scaled(&o, &s)
}

/// Convex polygon hull of points lying in the plane through `origin` with normal `normal`.
///
/// Vertices come out counter-clockwise around `normal`.
pub(crate) fn polygon<T: Scalar>(pts: &[[T; 3]], origin: &[T; 3], normal: [T; 3]) -> Polytope<T> {
    let abs: Vec<T> = normal.iter().map(|c| c.abs()).collect();
    let drop = (0..3)
        .max_by(|&i, &j| abs[i].partial_cmp(&abs[j]).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap();
    let keep: Vec<usize> = (0..3).filter(|&k| k != drop).collect();
    let key = |p: &[T; 3]| [p[keep[0]].clone(), p[keep[1]].clone(), T::zero()];

    let mut sorted = pts.to_vec();
    sorted.sort_by(|a, b| lex_cmp(&key(a), &key(b)));

    let chain = |iter: &mut dyn Iterator<Item = &[T; 3]>| -> Vec<[T; 3]> {
        let mut h: Vec<[T; 3]> = Vec::new();
        for p in iter {
            while h.len() >= 2 && !turns_left(&normal, &h[h.len() - 2], &h[h.len() - 1], p) {
                h.pop();
            }
            h.push(p.clone());
        }
        h
    };
    let mut lower = chain(&mut sorted.iter());
    let mut upper = chain(&mut sorted.iter().rev());
    lower.pop();
    upper.pop();
    lower.extend(upper);
    let ring = lower;

    if ring.len() < 3 {
        // numerically collinear after all
        let a = ring[0].clone();
        let b = ring.get(1).cloned().unwrap_or_else(|| a.clone());
        return super::hull::build(&[a, b]);
    }

    let mut facets = Vec::with_capacity(ring.len());
    for k in 0..ring.len() {
        let a = &ring[k];
        let b = &ring[(k + 1) % ring.len()];
        let out = cross(&sub(b, a), &normal);
        let off = dot(&out, a);
        facets.push(Facet::canonical(out, off));
    }
    let equalities = vec![Facet::canonical(normal.clone(), dot(&normal, origin))];
    Polytope::from_parts(2, ring, facets, equalities)
}
