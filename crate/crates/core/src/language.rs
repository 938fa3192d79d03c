//! Distributed languages and their centralized membership oracles.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LanguageError {
    #[error("language {0} needs edge weights")]
    MissingInput(&'static str),
    #[error("unknown language {0:?}")]
    Unknown(String),
}

pub trait Language: Send + Sync {
    fn name(&self) -> String;
    fn contains(&self, g: &Graph) -> Result<bool, LanguageError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StdLanguage {
    /// At most one selected node.
    Amos,
    /// At least one selected node.
    Alos,
    /// Every connected component has a selected node.
    AlosPerComponent,
    NoneSelected,
    /// Exactly one selected node.
    Leader,
    /// Selected edges form a spanning tree.
    SpanningTree,
    /// Selected edges form the minimum spanning tree.
    Mst,
    Bipartite,
    OddCycle,
}

impl StdLanguage {
    pub const ALL: [StdLanguage; 9] = [
        StdLanguage::Amos,
        StdLanguage::Alos,
        StdLanguage::AlosPerComponent,
        StdLanguage::NoneSelected,
        StdLanguage::Leader,
        StdLanguage::SpanningTree,
        StdLanguage::Mst,
        StdLanguage::Bipartite,
        StdLanguage::OddCycle,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            StdLanguage::Amos => "amos",
            StdLanguage::Alos => "alos",
            StdLanguage::AlosPerComponent => "alos-per-component",
            StdLanguage::NoneSelected => "none-selected",
            StdLanguage::Leader => "leader",
            StdLanguage::SpanningTree => "st",
            StdLanguage::Mst => "mst",
            StdLanguage::Bipartite => "bipartite",
            StdLanguage::OddCycle => "odd-cycle",
        }
    }
}

impl fmt::Display for StdLanguage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StdLanguage {
    type Err = LanguageError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.replace('_', "-");
        StdLanguage::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| LanguageError::Unknown(s.to_string()))
    }
}

impl Language for StdLanguage {
    fn name(&self) -> String {
        self.as_str().to_string()
    }

    fn contains(&self, g: &Graph) -> Result<bool, LanguageError> {
        let selected = g.selected_nodes().len();
        Ok(match self {
            StdLanguage::Amos => selected <= 1,
            StdLanguage::Alos => selected >= 1,
            StdLanguage::AlosPerComponent => {
                g.components().iter().all(|c| c.iter().any(|&i| g.node(i).is_selected()))
            }
            StdLanguage::NoneSelected => selected == 0,
            StdLanguage::Leader => selected == 1,
            StdLanguage::SpanningTree => is_spanning_tree(g, &g.selected_edges()),
            StdLanguage::Mst => {
                if !g.is_weighted() && g.edge_count() > 0 {
                    return Err(LanguageError::MissingInput("mst"));
                }
                g.is_connected() && {
                    let sel: BTreeSet<_> = g.selected_edges().into_iter().collect();
                    sel == minimum_spanning_tree(g).into_iter().collect()
                }
            }
            StdLanguage::Bipartite => two_coloring(g).is_some(),
            StdLanguage::OddCycle => is_cycle(g) && g.n() % 2 == 1,
        })
    }
}

/// True iff `edges` (index pairs) form a spanning tree of `g`.
pub fn is_spanning_tree(g: &Graph, edges: &[(usize, usize)]) -> bool {
    if edges.len() + 1 != g.n() {
        return false;
    }
    let mut uf = UnionFind::new(g.n());
    edges.iter().all(|&(a, b)| uf.union(a, b))
}

/// Connected and 2-regular with at least three nodes.
pub fn is_cycle(g: &Graph) -> bool {
    g.n() >= 3 && g.is_connected() && (0..g.n()).all(|i| g.degree(i) == 2)
}

/// Kruskal over index pairs; assumes distinct weights. Returns a spanning
/// forest when `g` is disconnected.
pub fn minimum_spanning_tree(g: &Graph) -> Vec<(usize, usize)> {
    let mut edges: Vec<(u64, usize, usize)> = g
        .edges()
        .into_iter()
        .map(|(a, b)| (g.edge_attr(a, b).unwrap().weight.unwrap_or(0), a, b))
        .collect();
    edges.sort_unstable();
    let mut uf = UnionFind::new(g.n());
    let mut out: Vec<(usize, usize)> = edges.into_iter().filter(|&(_, a, b)| uf.union(a, b)).map(|(_, a, b)| (a, b)).collect();
    out.sort_unstable();
    out
}

/// A proper 2-coloring by graph position: BFS from the smallest id of each
/// component, which gets color 0.
pub fn two_coloring(g: &Graph) -> Option<Vec<bool>> {
    let mut color: Vec<Option<bool>> = vec![None; g.n()];
    for s in 0..g.n() {
        if color[s].is_some() {
            continue;
        }
        color[s] = Some(false);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let c = color[u].unwrap();
            for &w in g.neighbors(u) {
                match color[w] {
                    None => {
                        color[w] = Some(!c);
                        queue.push_back(w);
                    }
                    Some(cw) if cw == c => return None,
                    Some(_) => {}
                }
            }
        }
    }
    Some(color.into_iter().map(Option::unwrap).collect())
}

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    /// Merges the sets of `a` and `b`; false if they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}
