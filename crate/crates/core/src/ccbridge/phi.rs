//! Isomorphism-invariant encoding of bit vectors as small gadget graphs.
//!
//! Vector `x` of length `n` maps to the isomorphism class number `int(x)` in
//! [`canonical_graphs`] on `k(n)` nodes, where `k(n)` is the smallest node
//! count with at least `2^n` classes.

use super::CcError;
use crate::canon::{adjacency_from_edges, canonical_graphs, class_index, edges_of, MAX_NODES};

/// Longest vector that fits the gadget sizes [`crate::canon`] can enumerate.
pub const MAX_BITS: usize = 6;

/// A graph on nodes `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gadget {
    pub k: usize,
    pub edges: Vec<(usize, usize)>,
}

/// Smallest `k` with at least `2^n` isomorphism classes on `k` nodes.
pub fn gadget_size(n: usize) -> Result<usize, CcError> {
    if n == 0 || n > MAX_BITS {
        return Err(CcError::TooManyBits(n));
    }
    (1..=MAX_NODES)
        .find(|&k| canonical_graphs(k).map(|c| c.len() >= 1 << n).unwrap_or(false))
        .ok_or(CcError::TooManyBits(n))
}

/// `x` read most significant bit first.
pub fn to_index(x: &[bool]) -> usize {
    x.iter().fold(0, |acc, &b| acc << 1 | b as usize)
}

pub fn from_index(n: usize, index: usize) -> Vec<bool> {
    (0..n).rev().map(|i| index >> i & 1 == 1).collect()
}

/// All vectors of length `n` in index order.
pub fn all_vectors(n: usize) -> Vec<Vec<bool>> {
    (0..1 << n).map(|i| from_index(n, i)).collect()
}

pub fn phi_encode(x: &[bool]) -> Result<Gadget, CcError> {
    let k = gadget_size(x.len())?;
    let code = canonical_graphs(k)?[to_index(x)];
    Ok(Gadget { k, edges: edges_of(k, code) })
}

/// The vector of length `n` whose class `g` belongs to, or `None` when the
/// class is outside the image of [`phi_encode`].
pub fn phi_decode(n: usize, g: &Gadget) -> Result<Option<Vec<bool>>, CcError> {
    if g.k != gadget_size(n)? {
        return Ok(None);
    }
    let adj = adjacency_from_edges(g.k, &g.edges)?;
    let idx = class_index(g.k, &adj)?;
    Ok((idx < 1 << n).then(|| from_index(n, idx)))
}
