//! Exact pigeonhole counts for the permutation argument.

use num_bigint::BigUint;
use num_traits::One;

use super::LowerBoundError;

pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

/// Distinct sets of labeled blocks with width `f` plus global strings of
/// length `g`: `2^(f(2r+1)b + g)`.
pub fn certificate_classes(f: usize, g: usize, b: usize, r: usize) -> BigUint {
    BigUint::one() << (f * (2 * r + 1) * b + g)
}

/// Permuted yes-instances whose blocks alternate between two colors of `b/2`
/// blocks each, starting from a fixed color: `((b/2)!)^2`.
pub fn alternating_count(b: usize) -> BigUint {
    let h = factorial(b / 2);
    &h * &h
}

/// True iff `2^(f(2r+1)b + g) < b!`, so two permuted instances must share
/// their labeled blocks under some certificate.
pub fn counting_bound(f: usize, g: usize, b: usize, r: usize) -> bool {
    certificate_classes(f, g, b, r) < factorial(b)
}

/// The same test against `((b/2)!)^2` alternating instances; `b` must be even.
pub fn counting_bound_odd(f: usize, g: usize, b: usize, r: usize) -> Result<bool, LowerBoundError> {
    if b % 2 == 1 {
        return Err(LowerBoundError::InvalidParameters(format!("the odd-cycle count needs an even b, got {b}")));
    }
    Ok(certificate_classes(f, g, b, r) < alternating_count(b))
}

/// The smallest local width `f` for which the counting bound no longer forces
/// a collision.
pub fn min_local_width(b: usize, r: usize, g: usize, odd: bool) -> usize {
    let target = if odd { alternating_count(b) } else { factorial(b) };
    (0..).find(|&f| certificate_classes(f, g, b, r) >= target).expect("the search is unbounded")
}
