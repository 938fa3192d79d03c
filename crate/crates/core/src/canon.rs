//! Canonical forms and isomorphism-class enumeration for graphs on at most 8 nodes.
//!
//! A graph on `k` nodes is written as its adjacency bits over the pairs
//! `(i, j)`, `i < j`, ordered by `j` then `i`, most significant first. The
//! canonical code is the smallest such integer over all node orderings.

use std::collections::BTreeSet;
use std::sync::OnceLock;

pub const MAX_NODES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CanonError {
    #[error("graphs on {0} nodes exceed the limit of {MAX_NODES}")]
    TooLarge(usize),
}

/// Adjacency as one neighbor bitmask per node.
pub type Adjacency = [u8; MAX_NODES];

fn pair_count(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Adjacency code of `adj` read in the order `perm` (position -> node).
pub fn encode(k: usize, adj: &Adjacency, perm: &[usize]) -> u64 {
    let mut code = 0u64;
    for j in 1..k {
        for i in 0..j {
            code = (code << 1) | (adj[perm[i]] >> perm[j] & 1) as u64;
        }
    }
    code
}

/// Rebuilds the adjacency masks from a code on `k` nodes.
pub fn decode(k: usize, code: u64) -> Adjacency {
    let mut adj = [0u8; MAX_NODES];
    let mut bit = pair_count(k);
    for j in 1..k {
        for i in 0..j {
            bit -= 1;
            if code >> bit & 1 == 1 {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }
    adj
}

pub fn edges_of(k: usize, code: u64) -> Vec<(usize, usize)> {
    let adj = decode(k, code);
    let mut out = Vec::new();
    for j in 1..k {
        for i in 0..j {
            if adj[i] >> j & 1 == 1 {
                out.push((i, j));
            }
        }
    }
    out
}

pub fn adjacency_from_edges(k: usize, edges: &[(usize, usize)]) -> Result<Adjacency, CanonError> {
    if k > MAX_NODES {
        return Err(CanonError::TooLarge(k));
    }
    let mut adj = [0u8; MAX_NODES];
    for &(a, b) in edges {
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    Ok(adj)
}

struct Search<'a> {
    k: usize,
    adj: &'a Adjacency,
    perm: [usize; MAX_NODES],
    best: Option<u64>,
}

impl Search<'_> {
    /// `prefix` holds the bits for positions `0..pos`, `used` the placed nodes.
    fn run(&mut self, pos: usize, used: u8, prefix: u64) {
        if pos == self.k {
            if self.best.is_none_or(|b| prefix < b) {
                self.best = Some(prefix);
            }
            return;
        }
        let remaining_bits = pair_count(self.k) - pair_count(pos + 1);
        let free = !used & ((1u16 << self.k) - 1) as u8;
        let mut tried: u8 = 0;
        for v in 0..self.k {
            if free >> v & 1 == 0 {
                continue;
            }
            // Unplaced twins produce identical subtrees.
            if (0..v).any(|u| tried >> u & 1 == 1 && self.twins(u, v)) {
                continue;
            }
            tried |= 1 << v;
            let mut code = prefix;
            for i in 0..pos {
                code = (code << 1) | (self.adj[self.perm[i]] >> v & 1) as u64;
            }
            if let Some(b) = self.best {
                if code > b >> remaining_bits {
                    continue;
                }
            }
            self.perm[pos] = v;
            self.run(pos + 1, used | 1 << v, code);
        }
    }

    fn twins(&self, u: usize, v: usize) -> bool {
        let mask = !((1u8 << u) | (1u8 << v));
        self.adj[u] & mask == self.adj[v] & mask
    }
}

/// The smallest adjacency code over all orderings of the `k` nodes.
pub fn canonical_code(k: usize, adj: &Adjacency) -> Result<u64, CanonError> {
    if k > MAX_NODES {
        return Err(CanonError::TooLarge(k));
    }
    let mut s = Search { k, adj, perm: [0; MAX_NODES], best: None };
    s.run(0, 0, 0);
    Ok(s.best.unwrap_or(0))
}

/// All canonical codes on `k` nodes, sorted; one per isomorphism class.
pub fn canonical_graphs(k: usize) -> Result<&'static [u64], CanonError> {
    static CACHE: [OnceLock<Vec<u64>>; MAX_NODES + 1] = [const { OnceLock::new() }; MAX_NODES + 1];
    if k > MAX_NODES {
        return Err(CanonError::TooLarge(k));
    }
    Ok(CACHE[k].get_or_init(|| enumerate(k)))
}

fn enumerate(k: usize) -> Vec<u64> {
    if k <= 1 {
        return vec![0];
    }
    let smaller = canonical_graphs(k - 1).expect("k - 1 is in range");
    let mut found = BTreeSet::new();
    for &code in smaller {
        let mut adj = decode(k - 1, code);
        for nbrs in 0u16..1 << (k - 1) {
            let nbrs = nbrs as u8;
            for (u, row) in adj.iter_mut().enumerate().take(k - 1) {
                *row = (*row & !(1 << (k - 1))) | ((nbrs >> u & 1) << (k - 1));
            }
            adj[k - 1] = nbrs;
            found.insert(canonical_code(k, &adj).unwrap());
        }
    }
    found.into_iter().collect()
}

/// Position of the class of `adj` in [`canonical_graphs`].
pub fn class_index(k: usize, adj: &Adjacency) -> Result<usize, CanonError> {
    let code = canonical_code(k, adj)?;
    let list = canonical_graphs(k)?;
    Ok(list.binary_search(&code).expect("every graph has a class"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn permutations(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(k - 1) {
            for pos in 0..k {
                let mut q = p.clone();
                q.insert(pos, k - 1);
                out.push(q);
            }
        }
        out
    }

    /// Independent oracle: minimum code over every permutation, for every graph.
    fn brute_force_classes(k: usize) -> BTreeSet<u64> {
        let perms = permutations(k);
        let mut classes = BTreeSet::new();
        for code in 0..1u64 << pair_count(k) {
            let adj = decode(k, code);
            let min = perms.iter().map(|p| encode(k, &adj, p)).min().unwrap();
            classes.insert(min);
        }
        classes
    }

    #[test]
    fn class_counts() {
        let expected = [1, 1, 2, 4, 11, 34, 156, 1044, 12346];
        for (k, &count) in expected.iter().enumerate() {
            assert_eq!(canonical_graphs(k).unwrap().len(), count, "k={k}");
        }
    }

    #[test]
    fn matches_brute_force_up_to_five() {
        for k in 1..=5 {
            let fast: BTreeSet<u64> = canonical_graphs(k).unwrap().iter().copied().collect();
            assert_eq!(fast, brute_force_classes(k), "k={k}");
        }
    }

    #[test]
    fn three_node_classes() {
        let classes = canonical_graphs(3).unwrap();
        let edge_counts: Vec<usize> = classes.iter().map(|&c| edges_of(3, c).len()).collect();
        assert_eq!(edge_counts, vec![0, 1, 2, 3]);
    }

    #[test]
    fn too_large() {
        assert_eq!(canonical_graphs(9), Err(CanonError::TooLarge(9)));
    }

    #[test]
    fn code_round_trip() {
        for code in 0..1u64 << pair_count(5) {
            let adj = decode(5, code);
            assert_eq!(encode(5, &adj, &[0, 1, 2, 3, 4]), code);
        }
    }

    #[test]
    fn relabeling_keeps_the_class() {
        use rand::seq::SliceRandom;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let k = rng.gen_range(2..=7);
            let code = rng.gen_range(0..1u64 << pair_count(k));
            let adj = decode(k, code);
            let mut perm: Vec<usize> = (0..k).collect();
            perm.shuffle(&mut rng);
            let relabeled = decode(k, encode(k, &adj, &perm));
            let a = canonical_code(k, &adj).unwrap();
            assert_eq!(a, canonical_code(k, &relabeled).unwrap());
            let set: HashSet<u64> = canonical_graphs(k).unwrap().iter().copied().collect();
            assert!(set.contains(&a));
        }
    }
}
