//! Exact-or-approximate number tower used for moments and matrix entries.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

/// Either an exact rational or a float carrying an absolute error bound.
///
/// Arithmetic on `Approx` propagates bounds conservatively: sums add the
/// bounds, products use the first-order bound plus the cross term, and each
/// float operation adds one rounding unit of the result.
///
/// Equality is tolerance-aware: two scalars are equal when the exact values
/// coincide, or when an exact value lies within an approximate bound, or
/// when two approximate intervals overlap. This relation is not transitive.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Approx { value: f64, err: f64 },
}

const ULP: f64 = f64::EPSILON;

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn from_int(k: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(k.into()))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::Exact(BigRational::new(num.into(), den.into()))
    }

    pub fn approx(value: f64, err: f64) -> Self {
        debug_assert!(err >= 0.0);
        Scalar::Approx { value, err }
    }

    /// A float treated as exact input data (zero error bound).
    pub fn float(value: f64) -> Self {
        Scalar::Approx { value, err: 0.0 }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Approx { .. } => None,
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Scalar::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Scalar::Approx { value, .. } => *value,
        }
    }

    pub fn abs_error(&self) -> f64 {
        match self {
            Scalar::Exact(_) => 0.0,
            Scalar::Approx { err, .. } => *err,
        }
    }

    /// Exact zero, or an approximate value whose interval is `{0}`.
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Approx { value, err } => *value == 0.0 && *err == 0.0,
        }
    }

    /// Zero lies in the enclosing interval.
    pub fn admits_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Approx { value, err } => value.abs() <= *err,
        }
    }

    /// True when the value is certainly positive.
    pub fn is_positive(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_positive(),
            Scalar::Approx { value, err } => value - err > 0.0,
        }
    }

    /// Lower bound of the enclosing interval.
    pub fn lower(&self) -> f64 {
        self.value() - self.abs_error()
    }

    /// Converts to the approximate representation (for engine cross-checks).
    pub fn to_approx(&self) -> Scalar {
        match self {
            Scalar::Exact(q) => {
                let v = q.to_f64().unwrap_or(f64::NAN);
                Scalar::Approx { value: v, err: v.abs() * ULP * 0.5 }
            }
            a => a.clone(),
        }
    }

    /// Bound and value of an exact operand when mixed into float arithmetic.
    fn float_parts(&self) -> (f64, f64) {
        match self {
            Scalar::Exact(q) => {
                let v = q.to_f64().unwrap_or(f64::NAN);
                (v, v.abs() * ULP * 0.5)
            }
            Scalar::Approx { value, err } => (*value, *err),
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q.abs()),
            Scalar::Approx { value, err } => Scalar::Approx { value: value.abs(), err: *err },
        }
    }

    pub fn powi(&self, k: u32) -> Scalar {
        (0..k).fold(Scalar::from_int(1), |acc, _| &acc * self)
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::Exact(q)
    }
}

impl From<&BigRational> for Scalar {
    fn from(q: &BigRational) -> Self {
        Scalar::Exact(q.clone())
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => {
                let (a, ea) = self.float_parts();
                let (b, eb) = other.float_parts();
                (a - b).abs() <= ea + eb
            }
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            _ => {
                let (a, ea) = self.float_parts();
                let (b, eb) = rhs.float_parts();
                let v = a + b;
                Scalar::Approx { value: v, err: ea + eb + v.abs() * ULP }
            }
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            (Scalar::Exact(a), _) | (_, Scalar::Exact(a)) if a.is_zero() => Scalar::zero(),
            _ => {
                let (a, ea) = self.float_parts();
                let (b, eb) = rhs.float_parts();
                let v = a * b;
                Scalar::Approx { value: v, err: a.abs() * eb + b.abs() * ea + ea * eb + v.abs() * ULP }
            }
        }
    }
}

impl Div for &Scalar {
    type Output = Scalar;

    /// Division; an interval denominator containing zero yields an infinite bound.
    fn div(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a / b),
            _ => {
                let (a, ea) = self.float_parts();
                let (b, eb) = rhs.float_parts();
                let v = a / b;
                let lo = b.abs() - eb;
                let err = if lo <= 0.0 { f64::INFINITY } else { (ea + v.abs() * eb) / lo + v.abs() * ULP };
                Scalar::Approx { value: v, err }
            }
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(-q),
            Scalar::Approx { value, err } => Scalar::Approx { value: -value, err: *err },
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| &acc + &x)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{q}"),
            Scalar::Approx { value, err } => write!(f, "{value:e} ± {err:.1e}"),
        }
    }
}

/// `{"exact": "1/4"}` or `{"approx": 0.785, "err": 1e-13}`.
impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(q) => {
                let mut m = serializer.serialize_map(Some(1))?;
                m.serialize_entry("exact", &q.to_string())?;
                m.end()
            }
            Scalar::Approx { value, err } => {
                let mut m = serializer.serialize_map(Some(2))?;
                m.serialize_entry("approx", value)?;
                m.serialize_entry("err", err)?;
                m.end()
            }
        }
    }
}
