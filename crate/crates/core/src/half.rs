//! Exact half-integers stored as doubled integers.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// A number in `(1/2)Z`, stored as twice its value.
///
/// String lengths, riggings, vacancy numbers and statistics all live on this
/// lattice, so one representation covers every type.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Half(pub i64);

impl Half {
    pub const ZERO: Half = Half(0);
    pub const HALF: Half = Half(1);
    pub const ONE: Half = Half(2);
    /// Stand-in for an undefined selected length; compares above every real length.
    pub const INF: Half = Half(i64::MAX / 4);

    pub const fn int(v: i64) -> Half {
        Half(2 * v)
    }

    pub const fn doubled(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn is_inf(self) -> bool {
        self.0 >= Half::INF.0 / 2
    }

    /// The integer value, if there is one.
    pub fn to_int(self) -> Option<i64> {
        self.is_integer().then_some(self.0 / 2)
    }

    /// Multiply by a half-integer; `None` if the product leaves `(1/2)Z`.
    pub fn checked_mul(self, rhs: Half) -> Option<Half> {
        let p = self.0 * rhs.0;
        (p % 2 == 0).then_some(Half(p / 2))
    }

    /// Exact quotient `self / rhs` as an integer, if it is one.
    pub fn div_exact(self, rhs: Half) -> Option<i64> {
        (rhs.0 != 0 && self.0 % rhs.0 == 0).then(|| self.0 / rhs.0)
    }

    pub fn min(self, other: Half) -> Half {
        std::cmp::min(self, other)
    }

    pub fn max(self, other: Half) -> Half {
        std::cmp::max(self, other)
    }
}

impl Add for Half {
    type Output = Half;
    fn add(self, rhs: Half) -> Half {
        Half(self.0 + rhs.0)
    }
}

impl AddAssign for Half {
    fn add_assign(&mut self, rhs: Half) {
        self.0 += rhs.0;
    }
}

impl Sub for Half {
    type Output = Half;
    fn sub(self, rhs: Half) -> Half {
        Half(self.0 - rhs.0)
    }
}

impl SubAssign for Half {
    fn sub_assign(&mut self, rhs: Half) {
        self.0 -= rhs.0;
    }
}

impl Neg for Half {
    type Output = Half;
    fn neg(self) -> Half {
        Half(-self.0)
    }
}

impl Mul<i64> for Half {
    type Output = Half;
    fn mul(self, rhs: i64) -> Half {
        Half(self.0 * rhs)
    }
}

impl std::iter::Sum for Half {
    fn sum<I: Iterator<Item = Half>>(iter: I) -> Half {
        Half(iter.map(|h| h.0).sum())
    }
}

impl From<i64> for Half {
    fn from(v: i64) -> Half {
        Half::int(v)
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inf() {
            write!(f, "inf")
        } else if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl fmt::Debug for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
