//! The Weyl group `W ≅ S₄` of SO(6) acting on the Cartan subalgebra `𝔱 ≅ ℝ³`.
//!
//! The group is realised concretely as the closure of the 12 root
//! reflections; it turns out to be the signed permutation matrices with an
//! even number of sign changes.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::cartan::{fundamental_weight, CartanPoint};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeylError {
    #[error("fundamental weight index must be 1, 2 or 3 (got {0})")]
    BadIndex(usize),
    #[error("matrix is not an element of the Weyl group")]
    NotInGroup,
}

/// A root, stored with primitive integer coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootVector(pub [i8; 3]);

impl RootVector {
    pub fn dot<T: Scalar>(&self, p: &CartanPoint<T>) -> T {
        let [a, b, c] = self.0.map(|v| T::from_i8(v).unwrap());
        a * p.x.clone() + b * p.y.clone() + c * p.z.clone()
    }

    pub fn coords<T: Scalar>(&self) -> [T; 3] {
        self.0.map(|v| T::from_i8(v).unwrap())
    }

    /// The reflection `v ↦ v − (v·α) α` (all roots have squared length 2).
    pub fn reflection(&self) -> WeylElement {
        let a = self.0;
        let mut m = [[0i8; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = i8::from(i == j) - a[i] * a[j];
            }
        }
        WeylElement { m }
    }
}

/// The 12 roots `(0,±1,±1), (±1,0,±1), (±1,±1,0)`.
pub fn roots() -> Vec<RootVector> {
    let mut out = Vec::with_capacity(12);
    for zero in 0..3 {
        for s in [1i8, -1] {
            for t in [1i8, -1] {
                let mut r = [0i8; 3];
                let others: Vec<usize> = (0..3).filter(|&k| k != zero).collect();
                r[others[0]] = s;
                r[others[1]] = t;
                out.push(RootVector(r));
            }
        }
    }
    out.sort();
    out
}

/// A Weyl group element as a 3×3 signed permutation matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylElement {
    m: [[i8; 3]; 3],
}

impl WeylElement {
    pub fn identity() -> Self {
        Self { m: [[1, 0, 0], [0, 1, 0], [0, 0, 1]] }
    }

    /// Validates membership in the group.
    pub fn from_matrix(m: [[i8; 3]; 3]) -> Result<Self, WeylError> {
        let w = Self { m };
        if weyl_group().contains(&w) {
            Ok(w)
        } else {
            Err(WeylError::NotInGroup)
        }
    }

    pub fn matrix(&self) -> [[i8; 3]; 3] {
        self.m
    }

    pub fn compose(&self, other: &Self) -> Self {
        let mut m = [[0i8; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..3).map(|k| self.m[i][k] * other.m[k][j]).sum();
            }
        }
        Self { m }
    }

    /// Signed permutation matrices are orthogonal.
    pub fn inverse(&self) -> Self {
        let mut m = [[0i8; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = self.m[j][i];
            }
        }
        Self { m }
    }

    pub fn determinant(&self) -> i8 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn apply<T: Scalar>(&self, p: &CartanPoint<T>) -> CartanPoint<T> {
        let v = p.to_array();
        let row = |i: usize| -> T {
            let mut acc = T::zero();
            for (k, c) in v.iter().enumerate() {
                match self.m[i][k] {
                    1 => acc = acc + c.clone(),
                    -1 => acc = acc - c.clone(),
                    _ => {}
                }
            }
            acc
        };
        CartanPoint::new(row(0), row(1), row(2))
    }

    pub fn apply_root(&self, r: &RootVector) -> RootVector {
        let mut out = [0i8; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|k| self.m[i][k] * r.0[k]).sum();
        }
        RootVector(out)
    }

    /// Row-major entries.
    pub fn to_row_major(&self) -> [i8; 9] {
        let m = &self.m;
        [m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2]]
    }

    /// The permutation `σ` and the signs `s` with `(w·p)_i = s_i p_{σ(i)}`.
    pub fn signed_permutation(&self) -> ([usize; 3], [i8; 3]) {
        let mut perm = [0usize; 3];
        let mut signs = [1i8; 3];
        for i in 0..3 {
            for k in 0..3 {
                if self.m[i][k] != 0 {
                    perm[i] = k;
                    signs[i] = self.m[i][k];
                }
            }
        }
        (perm, signs)
    }
}

impl Serialize for WeylElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_row_major().serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeylElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let e = <[i8; 9]>::deserialize(d)?;
        let m = [[e[0], e[1], e[2]], [e[3], e[4], e[5]], [e[6], e[7], e[8]]];
        WeylElement::from_matrix(m).map_err(serde::de::Error::custom)
    }
}

/// Closes a set of generators under composition.
fn close(generators: &[WeylElement]) -> Vec<WeylElement> {
    let mut seen: BTreeSet<WeylElement> = BTreeSet::new();
    seen.insert(WeylElement::identity());
    let mut frontier = vec![WeylElement::identity()];
    while let Some(w) = frontier.pop() {
        for g in generators {
            let next = g.compose(&w);
            if seen.insert(next) {
                frontier.push(next);
            }
        }
    }
    seen.into_iter().collect()
}

/// All 24 elements, sorted.
pub fn weyl_group() -> &'static [WeylElement] {
    static GROUP: OnceLock<Vec<WeylElement>> = OnceLock::new();
    GROUP.get_or_init(|| {
        let gens: Vec<WeylElement> = roots().iter().map(RootVector::reflection).collect();
        close(&gens)
    })
}

fn dedup_tolerance<T: Scalar>() -> T {
    if T::EXACT {
        T::zero()
    } else {
        T::from_f64_lossy(1e-12)
    }
}

fn push_unique<T: Scalar>(out: &mut Vec<CartanPoint<T>>, p: CartanPoint<T>) {
    let tol = dedup_tolerance::<T>();
    let same = |q: &CartanPoint<T>| {
        (q.x.clone() - p.x.clone()).abs() <= tol
            && (q.y.clone() - p.y.clone()).abs() <= tol
            && (q.z.clone() - p.z.clone()).abs() <= tol
    };
    if !out.iter().any(same) {
        out.push(p);
    }
}

/// `W·p`, deduplicated and in group order.
pub fn weyl_orbit<T: Scalar>(p: &CartanPoint<T>) -> Vec<CartanPoint<T>> {
    let mut out = Vec::new();
    for w in weyl_group() {
        push_unique(&mut out, w.apply(p));
    }
    out
}

fn chamber_key<T: Scalar>(p: &CartanPoint<T>) -> [T; 3] {
    [p.z.clone(), p.x.clone(), p.y.clone()]
}

/// The image of `p` in the closed chamber `z ≥ x ≥ |y|` and an element
/// mapping `p` there. Picks the lexicographically largest `(z, x, y)`
/// over all 24 images.
pub fn to_chamber<T: Scalar>(p: &CartanPoint<T>) -> (CartanPoint<T>, WeylElement) {
    let mut best: Option<(CartanPoint<T>, WeylElement)> = None;
    for w in weyl_group() {
        let q = w.apply(p);
        let better = match &best {
            None => true,
            Some((b, _)) => {
                crate::scalar::lex_cmp(&chamber_key(&q), &chamber_key(b))
                    == std::cmp::Ordering::Greater
            }
        };
        if better {
            best = Some((q, *w));
        }
    }
    best.expect("group is nonempty")
}

/// The parabolic subgroup `W_i` generated by reflections in roots orthogonal to `ν_i`.
pub fn parabolic(i: usize) -> Result<Vec<WeylElement>, WeylError> {
    let nu = fundamental_weight::<f64>(i).ok_or(WeylError::BadIndex(i))?;
    let gens: Vec<WeylElement> = roots()
        .iter()
        .filter(|r| r.dot(&nu) == 0.0)
        .map(RootVector::reflection)
        .collect();
    Ok(close(&gens))
}

/// `W_i · (w·λ)`: the vertex set of the singular polytope `conv(W_i·wλ)`.
///
/// Since `W_i` fixes `ν_i`, these points share the value of `⟨·, ν_i⟩`.
pub fn singular_vertex_set<T: Scalar>(
    lambda: &CartanPoint<T>,
    w: &WeylElement,
    i: usize,
) -> Result<Vec<CartanPoint<T>>, WeylError> {
    let base = w.apply(lambda);
    let mut out = Vec::new();
    for g in parabolic(i)? {
        push_unique(&mut out, g.apply(&base));
    }
    Ok(out)
}

/// Elements fixing `p` (exact comparison for rationals).
pub fn stabilizer<T: Scalar>(p: &CartanPoint<T>) -> Vec<WeylElement> {
    weyl_group()
        .iter()
        .filter(|w| w.apply(p).approx_eq(p))
        .copied()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    fn all_signed_even_permutations() -> BTreeSet<WeylElement> {
        // independent oracle: every permutation matrix times every even sign pattern
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut out = BTreeSet::new();
        for p in perms {
            for signs in [[1, 1, 1], [-1, -1, 1], [-1, 1, -1], [1, -1, -1]] {
                let mut m = [[0i8; 3]; 3];
                for i in 0..3 {
                    m[i][p[i]] = signs[i];
                }
                out.insert(WeylElement { m });
            }
        }
        out
    }

    #[test]
    fn group_has_order_24_and_matches_signed_permutations() {
        let g: BTreeSet<_> = weyl_group().iter().copied().collect();
        assert_eq!(g.len(), 24);
        assert_eq!(g, all_signed_even_permutations());
        assert!(g.contains(&WeylElement::identity()));
        assert!(g.contains(&WeylElement { m: [[-1, 0, 0], [0, -1, 0], [0, 0, 1]] }));
    }

    #[test]
    fn group_is_closed_with_inverses() {
        let g: BTreeSet<_> = weyl_group().iter().copied().collect();
        for a in &g {
            assert!(g.contains(&a.inverse()));
            assert_eq!(a.compose(&a.inverse()), WeylElement::identity());
            for b in &g {
                assert!(g.contains(&a.compose(b)));
            }
        }
    }

    #[test]
    fn group_preserves_roots() {
        let rs: BTreeSet<_> = roots().into_iter().collect();
        assert_eq!(rs.len(), 12);
        for w in weyl_group() {
            let image: BTreeSet<_> = rs.iter().map(|r| w.apply_root(r)).collect();
            assert_eq!(image, rs);
        }
    }

    #[test]
    fn orbit_of_nu1_is_tetrahedron_vertices() {
        let orbit = weyl_orbit(&CartanPoint::new(1.0, 1.0, 1.0));
        let mut pts: Vec<[f64; 3]> = orbit.iter().map(|p| p.to_array()).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(
            pts,
            vec![[-1.0, -1.0, 1.0], [-1.0, 1.0, -1.0], [1.0, -1.0, -1.0], [1.0, 1.0, 1.0]]
        );
    }

    #[test]
    fn orbit_of_nu2_is_signed_unit_vectors() {
        let orbit = weyl_orbit(&CartanPoint::new(0.0, 0.0, 1.0));
        assert_eq!(orbit.len(), 6);
        for p in &orbit {
            let a = p.to_array();
            assert_eq!(a.iter().map(|c: &f64| c.abs()).sum::<f64>(), 1.0);
        }
        assert_eq!(weyl_orbit(&CartanPoint::<f64>::origin()).len(), 1);
    }

    #[test]
    fn orbit_sizes_match_stabilizer_counts() {
        for p in [
            CartanPoint::new(0.0, 0.0, 0.0),
            CartanPoint::new(1.0, 1.0, 1.0),
            CartanPoint::new(0.0, 0.0, 1.0),
            CartanPoint::new(1.0, 1.0, 2.0),
            CartanPoint::new(1.0, 0.0, 1.0),
            CartanPoint::new(1.0, 0.5, 2.0),
        ] {
            assert_eq!(weyl_orbit(&p).len() * stabilizer(&p).len(), 24);
        }
    }

    #[test]
    fn chamber_reduction_examples() {
        let (q, w) = to_chamber(&CartanPoint::new(1.0, 0.0, 0.0));
        assert_eq!(q, CartanPoint::new(0.0, 0.0, 1.0));
        assert_eq!(w.apply(&CartanPoint::new(1.0, 0.0, 0.0)), q);

        let (q, _) = to_chamber(&CartanPoint::new(-1.0, -1.0, -1.0));
        assert_eq!(q, CartanPoint::new(1.0, -1.0, 1.0));

        let p = CartanPoint::new(1.0, 0.5, 2.0);
        assert_eq!(to_chamber(&p), (p.clone(), WeylElement::identity()));
    }

    #[test]
    fn parabolic_orders() {
        assert_eq!(parabolic(1).unwrap().len(), 6);
        assert_eq!(parabolic(2).unwrap().len(), 4);
        assert_eq!(parabolic(3).unwrap().len(), 6);
        assert_eq!(parabolic(0), Err(WeylError::BadIndex(0)));
        assert_eq!(parabolic(4), Err(WeylError::BadIndex(4)));

        // W₂ is generated by the reflections in (1,1,0) and (1,-1,0)
        let expected = close(&[RootVector([1, 1, 0]).reflection(), RootVector([1, -1, 0]).reflection()]);
        assert_eq!(parabolic(2).unwrap(), expected);

        for i in 1..=3 {
            let nu = fundamental_weight::<f64>(i).unwrap();
            for w in parabolic(i).unwrap() {
                assert_eq!(w.apply(&nu), nu);
            }
        }
    }

    #[test]
    fn singular_vertex_sets() {
        let nu1 = CartanPoint::new(1.0, 1.0, 1.0);
        let id = WeylElement::identity();
        assert_eq!(singular_vertex_set(&nu1, &id, 1).unwrap(), vec![nu1.clone()]);

        let mut edge = singular_vertex_set(&nu1, &id, 2).unwrap();
        edge.sort_by(|a, b| a.to_array().partial_cmp(&b.to_array()).unwrap());
        assert_eq!(edge, vec![CartanPoint::new(-1.0, -1.0, 1.0), nu1.clone()]);

        let generic = CartanPoint::new(ratio(1, 1), ratio(1, 2), ratio(2, 1));
        let hexagon = singular_vertex_set(&generic, &id, 1).unwrap();
        assert_eq!(hexagon.len(), 6);
        assert!(matches!(singular_vertex_set(&generic, &id, 5), Err(WeylError::BadIndex(5))));
    }

    #[test]
    fn singular_vertex_set_is_orbit_slice() {
        let lambda = CartanPoint::new(ratio(1, 1), ratio(1, 2), ratio(2, 1));
        let orbit = weyl_orbit(&lambda);
        for i in 1..=3 {
            let nu = fundamental_weight::<Rational>(i).unwrap();
            let nu_dot = |p: &CartanPoint<Rational>| crate::scalar::dot(&p.to_array(), &nu.to_array());
            for w in weyl_group() {
                let set: BTreeSet<_> = singular_vertex_set(&lambda, w, i)
                    .unwrap()
                    .iter()
                    .map(|p| p.to_array())
                    .collect();
                let level = nu_dot(&w.apply(&lambda));
                let slice: BTreeSet<_> = orbit
                    .iter()
                    .filter(|p| nu_dot(p) == level)
                    .map(|p| p.to_array())
                    .collect();
                assert_eq!(set, slice);
            }
        }
    }

    #[test]
    fn weyl_json_is_row_major() {
        let w = WeylElement { m: [[0, 1, 0], [-1, 0, 0], [0, 0, -1]] };
        assert!(weyl_group().contains(&w));
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, "[0,1,0,-1,0,0,0,0,-1]");
        let back: WeylElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
        assert!(serde_json::from_str::<WeylElement>("[-1,0,0,0,1,0,0,0,1]").is_err());
    }
}
