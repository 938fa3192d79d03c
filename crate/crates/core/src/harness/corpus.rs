//! Deterministic instance generators.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::Bits;
use crate::canon::{canonical_graphs, edges_of, MAX_NODES};
use crate::graph::{Graph, GraphBuilder};
use crate::language::{minimum_spanning_tree, UnionFind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Cycles,
    Paths,
    /// One graph per isomorphism class of trees.
    Trees,
    /// One graph per isomorphism class of connected graphs.
    Connected,
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cycles" => Ok(Family::Cycles),
            "paths" => Ok(Family::Paths),
            "trees" => Ok(Family::Trees),
            "connected" => Ok(Family::Connected),
            other => Err(format!("unknown graph family {other:?}")),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Cycles => "cycles",
            Family::Paths => "paths",
            Family::Trees => "trees",
            Family::Connected => "connected",
        })
    }
}

/// How inputs are attached to each base graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inputs {
    /// All inputs `"0"`, nothing selected.
    Plain,
    /// Every subset of selected nodes.
    Selections,
    /// Every subset of selected edges.
    EdgeMarks,
    /// `count` random distinct-weight graphs per size, each with several
    /// edge selections (the minimum spanning tree among them).
    Weighted { count: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub family: Family,
    pub n_min: usize,
    pub n_max: usize,
    pub inputs: Inputs,
    pub seed: u64,
}

impl Corpus {
    pub fn new(family: Family, n_min: usize, n_max: usize, inputs: Inputs) -> Self {
        Corpus { family, n_min, n_max, inputs, seed: 0 }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn generate(&self) -> Vec<Graph> {
        if let Inputs::Weighted { count } = self.inputs {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            return (self.n_min.max(1)..=self.n_max)
                .flat_map(|n| (0..count).map(move |_| n).collect::<Vec<_>>())
                .flat_map(|n| weighted_variants(&random_weighted(n, &mut rng), &mut rng))
                .collect();
        }
        let mut out = Vec::new();
        for n in self.n_min..=self.n_max {
            for g in base_graphs(self.family, n) {
                match self.inputs {
                    Inputs::Plain => out.push(g),
                    Inputs::Selections => out.extend(all_selections(&g)),
                    Inputs::EdgeMarks => out.extend(all_edge_marks(&g)),
                    Inputs::Weighted { .. } => unreachable!(),
                }
            }
        }
        out
    }
}

/// Graph on ids `1..=k` from a canonical code, all inputs `"0"`.
pub fn graph_from_code(k: usize, code: u64) -> Graph {
    let mut b = GraphBuilder::new();
    for i in 1..=k as u64 {
        b = b.node(i, Bits::from_uint(0, 1));
    }
    for (i, j) in edges_of(k, code) {
        b = b.edge(i as u64 + 1, j as u64 + 1);
    }
    b.build().expect("canonical graphs are simple")
}

pub fn base_graphs(family: Family, n: usize) -> Vec<Graph> {
    match family {
        Family::Cycles if n >= 3 => vec![Graph::cycle(n as u64)],
        Family::Paths if n >= 1 => vec![Graph::path(n as u64)],
        Family::Trees | Family::Connected if (1..=MAX_NODES).contains(&n) => canonical_graphs(n)
            .unwrap()
            .iter()
            .map(|&c| graph_from_code(n, c))
            .filter(|g| g.is_connected() && (family == Family::Connected || g.edge_count() + 1 == n))
            .collect(),
        _ => Vec::new(),
    }
}

/// `g` with every subset of nodes selected, mask order.
pub fn all_selections(g: &Graph) -> Vec<Graph> {
    (0u64..1 << g.n()).map(|m| g.with_selection_mask(m)).collect()
}

/// `g` with every subset of edges selected, mask order over sorted edges.
pub fn all_edge_marks(g: &Graph) -> Vec<Graph> {
    let edges = g.edges();
    (0u64..1 << edges.len())
        .map(|m| {
            let sel: BTreeSet<_> = edges.iter().enumerate().filter(|(k, _)| m >> k & 1 == 1).map(|(_, &e)| e).collect();
            g.with_selected(&sel)
        })
        .collect()
}

/// A random connected graph on ids `1..=n` with distinct weights `1..=m`
/// in random order and nothing selected.
pub fn random_weighted(n: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = BTreeSet::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        edges.insert((j, i));
    }
    for j in 1..n {
        for i in 0..j {
            if rng.gen_bool(0.35) {
                edges.insert((i, j));
            }
        }
    }
    let mut weights: Vec<u64> = (1..=edges.len() as u64).collect();
    weights.shuffle(rng);
    let mut b = GraphBuilder::new();
    for i in 1..=n as u64 {
        b = b.node(i, Bits::from_uint(0, 1));
    }
    for (&(i, j), &w) in edges.iter().zip(&weights) {
        let (u, v) = (i as u64 + 1, j as u64 + 1);
        b = b.edge(u, v).weight(u, v, w);
    }
    b.build().expect("random graph is valid")
}

/// The minimum spanning tree selection, a random spanning tree selection,
/// and the minimum spanning tree with one edge dropped (when it has one).
pub fn weighted_variants(g: &Graph, rng: &mut ChaCha8Rng) -> Vec<Graph> {
    let mst: BTreeSet<_> = minimum_spanning_tree(g).into_iter().collect();
    let mut out = vec![g.with_selected(&mst)];
    let mut edges = g.edges();
    edges.shuffle(rng);
    let mut uf = UnionFind::new(g.n());
    let random_tree: BTreeSet<_> = edges.into_iter().filter(|&(a, b)| uf.union(a, b)).collect();
    out.push(g.with_selected(&random_tree));
    if let Some(&drop) = mst.iter().nth(rng.gen_range(0..mst.len().max(1))) {
        let mut fewer = mst.clone();
        fewer.remove(&drop);
        out.push(g.with_selected(&fewer));
    }
    out
}

/// Reassigns `g`'s weights as a random permutation of `1..=m`.
pub fn reweighted(g: &Graph, rng: &mut ChaCha8Rng) -> Graph {
    let edges = g.edges();
    let mut weights: Vec<u64> = (1..=edges.len() as u64).collect();
    weights.shuffle(rng);
    let map: BTreeMap<_, _> = edges.into_iter().zip(weights).collect();
    g.with_weights(&map).expect("permuted weights are distinct")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::{Language, StdLanguage};

    #[test]
    fn connected_counts() {
        // Connected graphs on 1..=6 nodes: 1, 1, 2, 6, 21, 112.
        let counts: Vec<usize> = (1..=6).map(|n| base_graphs(Family::Connected, n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 21, 112]);
        let trees: Vec<usize> = (1..=7).map(|n| base_graphs(Family::Trees, n).len()).collect();
        assert_eq!(trees, vec![1, 1, 1, 2, 3, 6, 11]);
    }

    #[test]
    fn selections_cover_every_mask() {
        let c = Corpus::new(Family::Cycles, 3, 4, Inputs::Selections).generate();
        assert_eq!(c.len(), 8 + 16);
    }

    #[test]
    fn weighted_corpus_is_deterministic_and_mixed() {
        let c = Corpus::new(Family::Connected, 2, 6, Inputs::Weighted { count: 5 }).seed(7);
        let a = c.generate();
        let b = c.generate();
        assert_eq!(a.iter().map(Graph::to_json).collect::<Vec<_>>(), b.iter().map(Graph::to_json).collect::<Vec<_>>());
        let yes = a.iter().filter(|g| StdLanguage::Mst.contains(g).unwrap()).count();
        assert!(yes >= 25 && yes < a.len());
    }
}
