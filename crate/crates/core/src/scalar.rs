//! Scalar abstraction for the numeric kernels.
//!
//! Metrics, clustering, forest training and interpretation are generic over
//! any floating scalar; the pipeline pins them to `f64` (see [`crate::Real`])
//! so artifacts are byte-stable across runs.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::AddAssign;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating scalar usable by every numeric kernel in the crate.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + AddAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossless-enough conversion from usize for counts and averages.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + AddAssign
        + Sum
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Mean of a slice; zero for an empty slice.
pub fn mean<F: Scalar>(values: &[F]) -> F {
    if values.is_empty() {
        return F::zero();
    }
    values.iter().copied().fold(F::zero(), |a, b| a + b) / F::from_count(values.len())
}

/// Linear-interpolation quantile (the common "type 7" definition) of an
/// unsorted slice. `q` is clamped to [0, 1].
pub fn quantile<F: Scalar>(values: &[F], q: f64) -> F {
    assert!(!values.is_empty(), "quantile of empty slice");
    let mut sorted: Vec<F> = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    quantile_sorted(&sorted, q)
}

/// Same as [`quantile`] but assumes `sorted` is already ascending.
pub fn quantile_sorted<F: Scalar>(sorted: &[F], q: f64) -> F {
    assert!(!sorted.is_empty(), "quantile of empty slice");
    let q = q.clamp(0.0, 1.0);
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        return sorted[lo];
    }
    let frac = F::from_f64(pos - lo as f64).expect("fraction");
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_midpoints() {
        let v: Vec<f64> = vec![1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
        assert_eq!(quantile(&v, 0.5), 2.5);
    }

    #[test]
    fn generic_over_f32_and_f64() {
        let a: f32 = mean(&[1.0f32, 2.0, 3.0]);
        let b: f64 = mean(&[1.0f64, 2.0, 3.0]);
        assert_eq!(a, 2.0);
        assert_eq!(b, 2.0);
    }
}
