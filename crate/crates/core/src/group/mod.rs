//! Points, sets, sumsets, Hamming balls, affine hulls and stabilizers over F_2^I.

mod affine;
mod ball;
pub(crate) mod bits;
mod index_set;
mod point;
mod point_set;
mod sumset;

pub use affine::{affine_hull, for_each_subspace, gaussian_binomial_2, stabilizer, AffineSubspace};
pub use ball::{
    ball_size, binomial, for_each_weight, hamming_ball, hamming_ball_with, hamming_norm,
};
pub use index_set::IndexSet;
pub use point::Point;
pub use point_set::{Iter, PointSet, Representation, DENSE_HARD_LIMIT, DENSE_MAX_DIM};
pub use sumset::{
    doubling, is_affine_subspace, iterated_sumset, join_set, representation_counts, sum_all,
    sumset, sumset_with, DoublingRatio, SumsetMethod, TRANSFORM_MAX_DIM,
};

/// `x ∨ y`.
pub fn join(x: Point, y: Point) -> Point {
    x.join(y)
}

/// `x ∧ y`.
pub fn meet(x: Point, y: Point) -> Point {
    x.meet(y)
}

/// `{a + v : a ∈ A}`.
pub fn translate(a: &PointSet, v: Point) -> crate::Result<PointSet> {
    a.translate(v)
}
