use std::fmt;
use std::ops::{BitXor, BitXorAssign};

use serde::{Deserialize, Serialize};

/// An element of F_2^I stored as a bitmask over coordinate ranks.
///
/// The derived ordering on the underlying integer is exactly the lex order:
/// `x < y` iff `y` has a one at the largest coordinate where they differ.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub u64);

impl Point {
    pub const ZERO: Point = Point(0);

    /// The basis vector of the coordinate with the given rank.
    pub fn basis(rank: usize) -> Point {
        Point(1 << rank)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// Number of one coordinates.
    pub fn norm(self) -> u32 {
        self.0.count_ones()
    }

    /// Coordinatewise maximum.
    pub fn join(self, other: Point) -> Point {
        Point(self.0 | other.0)
    }

    /// Coordinatewise minimum.
    pub fn meet(self, other: Point) -> Point {
        Point(self.0 & other.0)
    }

    pub fn coord(self, rank: usize) -> bool {
        self.0 >> rank & 1 == 1
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Position in the lex order of F_2^I.
    pub fn lex_rank(self) -> u64 {
        self.0
    }

    /// Coordinate string of length `n`, leftmost character = smallest rank.
    pub fn to_bit_string(self, n: usize) -> String {
        (0..n)
            .map(|k| if self.coord(k) { '1' } else { '0' })
            .collect()
    }
}

impl BitXor for Point {
    type Output = Point;
    fn bitxor(self, rhs: Point) -> Point {
        Point(self.0 ^ rhs.0)
    }
}

impl BitXorAssign for Point {
    fn bitxor_assign(&mut self, rhs: Point) {
        self.0 ^= rhs.0;
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point({:#b})", self.0)
    }
}
