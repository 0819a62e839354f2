//! Exact integer coefficients stored inline while they fit in an i64.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug)]
pub enum Coeff {
    Small(i64),
    Big(BigInt),
}

impl Coeff {
    pub const ZERO: Coeff = Coeff::Small(0);
    pub const ONE: Coeff = Coeff::Small(1);

    fn norm(b: BigInt) -> Coeff {
        match b.to_i64() {
            Some(v) => Coeff::Small(v),
            None => Coeff::Big(b),
        }
    }

    pub fn to_bigint(&self) -> BigInt {
        match self {
            Coeff::Small(v) => BigInt::from(*v),
            Coeff::Big(b) => b.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Coeff::Small(0))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Coeff::Small(1))
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Coeff::Small(v) => *v < 0,
            Coeff::Big(b) => b.is_negative(),
        }
    }

    pub fn abs(&self) -> Coeff {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Coeff::Small(v) => Some(*v),
            Coeff::Big(_) => None,
        }
    }

    /// Quotient and remainder, truncating toward zero.
    pub fn div_rem(&self, o: &Coeff) -> (Coeff, Coeff) {
        if let (Coeff::Small(a), Coeff::Small(b)) = (self, o) {
            if let (Some(q), Some(r)) = (a.checked_div(*b), a.checked_rem(*b)) {
                return (Coeff::Small(q), Coeff::Small(r));
            }
        }
        let (q, r) = self.to_bigint().div_rem(&o.to_bigint());
        (Coeff::norm(q), Coeff::norm(r))
    }
}

impl Default for Coeff {
    fn default() -> Self {
        Coeff::ZERO
    }
}

impl PartialEq for Coeff {
    fn eq(&self, o: &Coeff) -> bool {
        match (self, o) {
            (Coeff::Small(a), Coeff::Small(b)) => a == b,
            (Coeff::Big(a), Coeff::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Coeff {}

impl std::hash::Hash for Coeff {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        match self {
            Coeff::Small(v) => v.hash(h),
            Coeff::Big(b) => b.hash(h),
        }
    }
}

impl From<i64> for Coeff {
    fn from(v: i64) -> Self {
        Coeff::Small(v)
    }
}

impl From<BigInt> for Coeff {
    fn from(b: BigInt) -> Self {
        Coeff::norm(b)
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Small(v) => write!(f, "{v}"),
            Coeff::Big(b) => write!(f, "{b}"),
        }
    }
}

impl FromStr for Coeff {
    type Err = num_bigint::ParseBigIntError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<BigInt>().map(Coeff::norm)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident, $op:tt) => {
        impl $tr for &Coeff {
            type Output = Coeff;
            fn $m(self, o: &Coeff) -> Coeff {
                if let (Coeff::Small(a), Coeff::Small(b)) = (self, o) {
                    if let Some(v) = a.$checked(*b) {
                        return Coeff::Small(v);
                    }
                }
                Coeff::norm(self.to_bigint() $op o.to_bigint())
            }
        }
        impl $tr for Coeff {
            type Output = Coeff;
            fn $m(self, o: Coeff) -> Coeff {
                (&self).$m(&o)
            }
        }
    };
}

binop!(Add, add, checked_add, +);
binop!(Sub, sub, checked_sub, -);
binop!(Mul, mul, checked_mul, *);

impl AddAssign<Coeff> for Coeff {
    fn add_assign(&mut self, o: Coeff) {
        *self = &*self + &o;
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        match self {
            Coeff::Small(v) => v.checked_neg().map(Coeff::Small).unwrap_or_else(|| Coeff::norm(-BigInt::from(*v))),
            Coeff::Big(b) => Coeff::norm(-b),
        }
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        -&self
    }
}

impl Zero for Coeff {
    fn zero() -> Self {
        Coeff::ZERO
    }
    fn is_zero(&self) -> bool {
        Coeff::is_zero(self)
    }
}

impl One for Coeff {
    fn one() -> Self {
        Coeff::ONE
    }
}
