//! Scalar types accepted by the Weyl-group and polytope engines.
//!
//! Geometry over the Cartan subalgebra only needs ordered-field arithmetic,
//! so it is written once against [`Scalar`] and instantiated either with
//! floating point (tolerance based predicates) or with arbitrary precision
//! rationals (exact predicates, zero tolerance).

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// An ordered field usable by the geometric core.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// `true` when arithmetic is exact and all predicates use zero tolerance.
    const EXACT: bool;

    /// Absolute tolerance for "on the plane" / "same point" decisions.
    fn tolerance() -> Self;

    /// Lossy conversion from `f64`. Exact types convert the binary value exactly.
    fn from_f64_lossy(v: f64) -> Self;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Magnitude used to scale tolerances for a plane normal.
    ///
    /// Euclidean norm for floats; exact types return one since their
    /// tolerance is zero anyway.
    fn normal_scale(n: &[Self; 3]) -> Self;

    /// Rescales a plane `normal·p = offset` into its canonical representative:
    /// unit normal for floats, primitive integer normal for rationals.
    fn canonical_plane(normal: [Self; 3], offset: Self) -> ([Self; 3], Self);

    /// JSON rendering of a single value.
    fn to_json(&self) -> serde_json::Value;

    /// The exact rational value of `self`.
    fn to_rational(&self) -> BigRational;

    /// `|a - b| <= tolerance`.
    fn approx_eq(a: &Self, b: &Self) -> bool {
        (a.clone() - b.clone()).abs() <= Self::tolerance()
    }

    /// `a > tolerance * scale`.
    fn is_positive_scaled(a: &Self, scale: &Self) -> bool {
        *a > Self::tolerance() * scale.clone()
    }

    /// `|a| <= tolerance * scale`.
    fn is_zero_scaled(a: &Self, scale: &Self) -> bool {
        a.abs() <= Self::tolerance() * scale.clone()
    }
}

macro_rules! float_scalar {
    ($t:ty, $tol:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn tolerance() -> Self {
                $tol
            }

            fn from_f64_lossy(v: f64) -> Self {
                v as $t
            }

            fn normal_scale(n: &[Self; 3]) -> Self {
                (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt()
            }

            fn canonical_plane(normal: [Self; 3], offset: Self) -> ([Self; 3], Self) {
                let s = Self::normal_scale(&normal);
                if s == 0.0 {
                    return (normal, offset);
                }
                let mut n = normal.map(|c| c / s);
                // avoid -0.0 so that lexicographic facet order is stable
                for c in n.iter_mut() {
                    if *c == 0.0 {
                        *c = 0.0;
                    }
                }
                (n, offset / s)
            }

            fn to_json(&self) -> serde_json::Value {
                serde_json::json!(*self)
            }

            fn to_rational(&self) -> BigRational {
                BigRational::from_float(*self).expect("finite value")
            }
        }
    };
}

float_scalar!(f64, 1e-9);
float_scalar!(f32, 1e-5);

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn tolerance() -> Self {
        BigRational::zero()
    }

    fn from_f64_lossy(v: f64) -> Self {
        BigRational::from_float(v).expect("finite value")
    }

    fn normal_scale(_n: &[Self; 3]) -> Self {
        BigRational::one()
    }

    fn canonical_plane(normal: [Self; 3], offset: Self) -> ([Self; 3], Self) {
        if normal.iter().all(Zero::is_zero) {
            return (normal, offset);
        }
        let lcm = normal
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = normal
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        let gcd = ints
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let factor = BigRational::new(lcm, gcd);
        (
            normal.map(|c| c * factor.clone()),
            offset * factor,
        )
    }

    fn to_json(&self) -> serde_json::Value {
        if self.is_integer() {
            if let Some(i) = self.numer().to_i64() {
                return serde_json::json!(i);
            }
        }
        serde_json::json!(self.to_f64().unwrap_or(f64::NAN))
    }

    fn to_rational(&self) -> BigRational {
        self.clone()
    }
}

/// Exact rational number.
pub type Rational = BigRational;

/// Convenience constructor for small rationals.
pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn dot<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0].clone() * b[0].clone() + a[1].clone() * b[1].clone() + a[2].clone() * b[2].clone()
}

pub(crate) fn sub<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [
        a[0].clone() - b[0].clone(),
        a[1].clone() - b[1].clone(),
        a[2].clone() - b[2].clone(),
    ]
}

pub(crate) fn add<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [
        a[0].clone() + b[0].clone(),
        a[1].clone() + b[1].clone(),
        a[2].clone() + b[2].clone(),
    ]
}

pub(crate) fn scale<T: Scalar>(a: &[T; 3], s: &T) -> [T; 3] {
    [
        a[0].clone() * s.clone(),
        a[1].clone() * s.clone(),
        a[2].clone() * s.clone(),
    ]
}

pub(crate) fn cross<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [
        a[1].clone() * b[2].clone() - a[2].clone() * b[1].clone(),
        a[2].clone() * b[0].clone() - a[0].clone() * b[2].clone(),
        a[0].clone() * b[1].clone() - a[1].clone() * b[0].clone(),
    ]
}

pub(crate) fn det3<T: Scalar>(a: &[T; 3], b: &[T; 3], c: &[T; 3]) -> T {
    dot(a, &cross(b, c))
}

pub(crate) fn norm_sq<T: Scalar>(a: &[T; 3]) -> T {
    dot(a, a)
}

pub(crate) fn points_eq<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> bool {
    (0..3).all(|k| T::approx_eq(&a[k], &b[k]))
}

pub(crate) fn lex_cmp<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> std::cmp::Ordering {
    for k in 0..3 {
        match a[k].partial_cmp(&b[k]) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    std::cmp::Ordering::Equal
}
