//! Scalar types usable as edge weights and path distances.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};

/// An edge weight: a positive quantity that can be summed along a path and
/// compared.
///
/// Implemented for the primitive floats and integers and for
/// [`Ratio<i64>`]. Integer and rational weights make distances exact.
pub trait Weight:
    Num + Copy + PartialOrd + Debug + Display + FromStr + ToPrimitive + Send + Sync + 'static
{
    /// Whether the value is finite. Always true for exact types.
    fn is_finite_weight(&self) -> bool {
        true
    }

    /// Whether the value is acceptable as an edge weight (finite and > 0).
    fn is_valid_weight(&self) -> bool {
        self.is_finite_weight() && *self > Self::zero()
    }
}

impl Weight for f32 {
    fn is_finite_weight(&self) -> bool {
        self.is_finite()
    }
}

impl Weight for f64 {
    fn is_finite_weight(&self) -> bool {
        self.is_finite()
    }
}

macro_rules! exact_weight {
    ($($t:ty),*) => { $(impl Weight for $t {})* };
}

exact_weight!(u32, u64, i32, i64, Ratio<i64>);

/// Total order on weights for heap keys. Weights are validated finite, so
/// the partial order is total on every value that reaches a heap.
pub(crate) fn cmp_weight<W: Weight>(a: &W, b: &W) -> std::cmp::Ordering {
    a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal)
}
