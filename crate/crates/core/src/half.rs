//! Exact half-integer arithmetic for spin quantum numbers.
//!
//! Values are stored as twice their nominal value, so j = 3/2 is `twice = 3`.
//! All comparisons and arithmetic are exact integer operations; no quantum
//! number is ever compared through floating point.

use std::fmt;
use std::ops::{Add, Neg, Sub};

/// A half-integer j, m, or j' stored as a doubled integer.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct HalfInteger {
    twice: i32,
}

impl HalfInteger {
    /// Builds the value `twice / 2`.
    pub const fn from_twice(twice: i32) -> Self {
        Self { twice }
    }

    /// Builds an integer value.
    pub const fn from_int(value: i32) -> Self {
        Self { twice: 2 * value }
    }

    pub const ZERO: Self = Self { twice: 0 };

    pub const fn twice(self) -> i32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub const fn abs(self) -> Self {
        Self {
            twice: self.twice.abs(),
        }
    }

    /// Shifts by an ordinary integer.
    pub const fn plus_int(self, n: i32) -> Self {
        Self {
            twice: self.twice + 2 * n,
        }
    }
}

impl Add for HalfInteger {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            twice: self.twice + rhs.twice,
        }
    }
}

impl Sub for HalfInteger {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            twice: self.twice - rhs.twice,
        }
    }
}

impl Neg for HalfInteger {
    type Output = Self;
    fn neg(self) -> Self {
        Self { twice: -self.twice }
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// True iff (j, m) labels a valid basis vector: |m| <= j and j - m integer.
pub fn is_valid_projection(j: HalfInteger, m: HalfInteger) -> bool {
    m.abs() <= j && (j - m).is_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_is_exact() {
        let a = HalfInteger::from_twice(3); // 3/2
        let b = HalfInteger::from_twice(-1); // -1/2
        assert_eq!(a + b, HalfInteger::from_int(1));
        assert_eq!(a - b, HalfInteger::from_twice(4));
        assert_eq!(-a, HalfInteger::from_twice(-3));
        assert_eq!(a.plus_int(-2), HalfInteger::from_twice(-1));
        assert!(b < a);
        assert_eq!(a.value(), 1.5);
        assert!(!a.is_integer());
        assert!((a + b).is_integer());
    }

    #[test]
    fn projection_validity() {
        let j = HalfInteger::from_twice(3);
        assert!(is_valid_projection(j, HalfInteger::from_twice(-3)));
        assert!(is_valid_projection(j, HalfInteger::from_twice(1)));
        // |m| > j
        assert!(!is_valid_projection(j, HalfInteger::from_twice(5)));
        // j - m not an integer
        assert!(!is_valid_projection(j, HalfInteger::from_int(1)));
    }

    #[test]
    fn display_forms() {
        assert_eq!(HalfInteger::from_twice(3).to_string(), "3/2");
        assert_eq!(HalfInteger::from_int(2).to_string(), "2");
        assert_eq!(HalfInteger::from_twice(-1).to_string(), "-1/2");
    }
}
