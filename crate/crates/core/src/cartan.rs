use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::Scalar;

/// A point of the Cartan subalgebra, in coordinates along `e^{12}, e^{34}, e^{56}`.
///
/// The same coordinates describe the SU(4) torus through the basis
/// `diag(-1,-1,1,1), diag(-1,1,-1,1), diag(-1,1,1,-1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CartanPoint<T = f64> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> CartanPoint<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(a: [T; 3]) -> Self {
        let [x, y, z] = a;
        Self { x, y, z }
    }

    pub fn to_array(&self) -> [T; 3] {
        [self.x.clone(), self.y.clone(), self.z.clone()]
    }

    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn to_f64(&self) -> CartanPoint<f64> {
        CartanPoint::new(self.x.to_f64_lossy(), self.y.to_f64_lossy(), self.z.to_f64_lossy())
    }

    pub fn from_f64(p: &CartanPoint<f64>) -> Self {
        Self::new(T::from_f64_lossy(p.x), T::from_f64_lossy(p.y), T::from_f64_lossy(p.z))
    }

    /// Closed fundamental chamber `z >= x >= |y|`.
    pub fn in_chamber(&self) -> bool {
        self.z >= self.x && self.x >= self.y.abs()
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        T::approx_eq(&self.x, &other.x)
            && T::approx_eq(&self.y, &other.y)
            && T::approx_eq(&self.z, &other.z)
    }
}

impl CartanPoint<f64> {
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }
}

/// The fundamental weights `ν₁ = (1,1,1)`, `ν₂ = (0,0,1)`, `ν₃ = (1,-1,1)`.
pub fn fundamental_weight<T: Scalar>(i: usize) -> Option<CartanPoint<T>> {
    let one = T::one();
    let zero = T::zero();
    match i {
        1 => Some(CartanPoint::new(one.clone(), one.clone(), one)),
        2 => Some(CartanPoint::new(zero.clone(), zero, one)),
        3 => Some(CartanPoint::new(one.clone(), -one.clone(), one)),
        _ => None,
    }
}

// JSON form is the bare triple `[x, y, z]`.
impl<T: Scalar + Serialize> Serialize for CartanPoint<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [&self.x, &self.y, &self.z].serialize(s)
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for CartanPoint<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, y, z] = <[T; 3]>::deserialize(d)?;
        Ok(Self { x, y, z })
    }
}
