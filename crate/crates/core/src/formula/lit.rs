use std::fmt;
use std::ops::Not;

use serde::{Deserialize, Serialize};

/// A Boolean variable. Indices start at 1; 0 is never issued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Var(u32);

impl Var {
    pub fn new(index: u32) -> Var {
        assert!(index > 0, "variable index 0 is reserved");
        Var(index)
    }

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn positive(self) -> Lit {
        Lit::new(self, true)
    }

    #[inline]
    pub fn negative(self) -> Lit {
        Lit::new(self, false)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A variable or its negation, packed as `var << 1 | negated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn new(var: Var, positive: bool) -> Lit {
        Lit(var.0 << 1 | u32::from(!positive))
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Dense code usable as an array index (`2 * var + negated`).
    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    /// Parses a non-zero DIMACS integer.
    pub fn from_dimacs(value: i64) -> Option<Lit> {
        if value == 0 || value.unsigned_abs() > u64::from(u32::MAX >> 1) {
            return None;
        }
        let var = Var(value.unsigned_abs() as u32);
        Some(Lit::new(var, value > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var().0);
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    /// Truth value of the literal when its variable takes `value`.
    #[inline]
    pub fn eval(self, value: bool) -> bool {
        value == self.is_positive()
    }
}

impl Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl Serialize for Lit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i64(self.to_dimacs())
    }
}

impl<'de> Deserialize<'de> for Lit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Lit::from_dimacs(v).ok_or_else(|| serde::de::Error::custom("invalid literal"))
    }
}
