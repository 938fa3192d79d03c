//! Blocks of consecutive identifiers and the permuted cycles built from them.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::LowerBoundError;
use crate::bits::Bits;
use crate::graph::{Graph, GraphBuilder};
use crate::language::StdLanguage;

/// A path of `2r+1` nodes with consecutive ids, oriented from low to high.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Block {
    pub index: usize,
    pub r: usize,
}

impl Block {
    pub fn len(&self) -> usize {
        2 * self.r + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first_id(&self) -> u64 {
        (self.index * self.len()) as u64 + 1
    }

    pub fn last_id(&self) -> u64 {
        self.first_id() + 2 * self.r as u64
    }

    pub fn center(&self) -> u64 {
        self.first_id() + self.r as u64
    }

    pub fn ids(&self) -> impl Iterator<Item = u64> {
        self.first_id()..=self.last_id()
    }
}

/// The blocks `0..=b`; block `b` is the special one.
pub fn make_blocks(b: usize, r: usize) -> Result<Vec<Block>, LowerBoundError> {
    if b < 2 || r < 1 {
        return Err(LowerBoundError::InvalidParameters(format!("need b >= 2 and r >= 1, got b={b}, r={r}")));
    }
    Ok((0..=b).map(|index| Block { index, r }).collect())
}

/// Which language the permuted yes-instances belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// The center of the special block is selected.
    Alos,
    /// Same instances as `Alos`, read as exactly one selected node.
    Leader,
    /// Every edge selected except one inside the special block.
    SpanningTree,
    /// Blocks alternate between two color classes; the special block closes
    /// an odd cycle.
    OddCycle,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Alos, Variant::Leader, Variant::SpanningTree, Variant::OddCycle];

    pub fn language(&self) -> StdLanguage {
        match self {
            Variant::Alos => StdLanguage::Alos,
            Variant::Leader => StdLanguage::Leader,
            Variant::SpanningTree => StdLanguage::SpanningTree,
            Variant::OddCycle => StdLanguage::OddCycle,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Alos => "alos",
            Variant::Leader => "leader",
            Variant::SpanningTree => "st",
            Variant::OddCycle => "odd",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = LowerBoundError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| LowerBoundError::InvalidParameters(format!("unknown variant {s:?}")))
    }
}

/// The `b+1` blocks of one construction together with the variant's inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockFamily {
    pub b: usize,
    pub r: usize,
    pub variant: Variant,
    pub blocks: Vec<Block>,
}

impl BlockFamily {
    pub fn new(b: usize, r: usize, variant: Variant) -> Result<Self, LowerBoundError> {
        if variant == Variant::OddCycle && b % 2 == 1 {
            return Err(LowerBoundError::InvalidParameters(format!("the odd-cycle variant needs an even b, got {b}")));
        }
        Ok(BlockFamily { b, r, variant, blocks: make_blocks(b, r)? })
    }

    pub fn special(&self) -> usize {
        self.b
    }

    pub fn block_len(&self) -> usize {
        2 * self.r + 1
    }

    /// Total number of ids, used as the id bound of every built graph.
    pub fn id_bound(&self) -> u64 {
        ((self.b + 1) * self.block_len()) as u64
    }

    /// Color class of an ordinary block in the odd-cycle variant: the first
    /// half is white (`false`), the second half black.
    pub fn color(&self, block: usize) -> bool {
        block >= self.b / 2
    }

    fn node_input(&self, id: u64) -> Bits {
        let special = self.blocks[self.special()];
        let on = matches!(self.variant, Variant::Alos | Variant::Leader) && id == special.center();
        Bits::from_bools(&[on])
    }

    /// The edge of the special block left unselected in the spanning-tree variant.
    fn unselected_edge(&self) -> (u64, u64) {
        let c = self.blocks[self.special()].center();
        (c, c + 1)
    }

    /// Lays the given blocks one after another, joining consecutive blocks
    /// last-to-first, and closes the cycle when `closed`.
    pub fn lay(&self, order: &[usize], closed: bool) -> Result<Graph, LowerBoundError> {
        let mut gb = GraphBuilder::new().id_bound(self.id_bound());
        let mut edges = Vec::new();
        let mut prev: Option<u64> = None;
        for &k in order {
            let block = self.blocks[k];
            for id in block.ids() {
                gb = gb.node(id, self.node_input(id));
                if let Some(p) = prev {
                    edges.push((p, id));
                }
                prev = Some(id);
            }
        }
        if closed {
            let first = self.blocks[order[0]].first_id();
            let last = prev.expect("order is not empty");
            edges.push((last, first));
        }
        let skip = self.unselected_edge();
        for (u, v) in edges {
            gb = gb.edge(u, v);
            if self.variant == Variant::SpanningTree && (u, v) != skip {
                gb = gb.select(u, v);
            }
        }
        Ok(gb.build()?)
    }

    /// Checks that `perm` orders the ordinary blocks as the variant requires.
    pub fn check_permutation(&self, perm: &[usize]) -> Result<(), LowerBoundError> {
        let mut seen = vec![false; self.b];
        if perm.len() != self.b || !perm.iter().all(|&p| p < self.b && !std::mem::replace(&mut seen[p], true)) {
            return Err(LowerBoundError::NotAPermutation(perm.to_vec()));
        }
        if self.variant == Variant::OddCycle && perm.windows(2).any(|w| self.color(w[0]) == self.color(w[1])) {
            return Err(LowerBoundError::NotAlternating(perm.to_vec()));
        }
        Ok(())
    }

    pub fn instance(&self, perm: &[usize]) -> Result<PermInstance, LowerBoundError> {
        self.check_permutation(perm)?;
        let mut order = perm.to_vec();
        order.push(self.special());
        let graph = self.lay(&order, true)?;
        Ok(PermInstance { variant: self.variant, perm: perm.to_vec(), order, graph })
    }
}

/// The yes-instance `C_π`: the ordinary blocks in `perm` order, then the special block.
#[derive(Debug, Clone)]
pub struct PermInstance {
    pub variant: Variant,
    pub perm: Vec<usize>,
    /// `perm` followed by the special block.
    pub order: Vec<usize>,
    pub graph: Graph,
}

/// Builds `C_π` for `perm` over `blocks` (as returned by [`make_blocks`]).
pub fn permuted_instance(perm: &[usize], blocks: &[Block], variant: Variant) -> Result<PermInstance, LowerBoundError> {
    let b = blocks.len().saturating_sub(1);
    let r = blocks.first().map_or(0, |bl| bl.r);
    BlockFamily::new(b, r, variant)?.instance(perm)
}

/// A block together with one label per node, in id order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledBlock {
    pub block: usize,
    pub labels: Vec<Bits>,
}

impl LabeledBlock {
    /// The labeling number `index` of a block of `len` nodes with width `f`:
    /// node `k` gets bits `k*f .. (k+1)*f` of `index`, least significant first.
    pub fn from_index(block: usize, len: usize, f: usize, index: u64) -> Self {
        let labels = (0..len)
            .map(|k| {
                let mut l = Bits::zeros(f);
                for j in 0..f {
                    l.set(j, index >> (k * f + j) & 1 == 1);
                }
                l
            })
            .collect();
        LabeledBlock { block, labels }
    }

    pub fn index(&self) -> u64 {
        let f = self.labels.first().map_or(0, Bits::len);
        let mut x = 0u64;
        for (k, l) in self.labels.iter().enumerate() {
            for j in 0..f {
                x |= (l.get(j) as u64) << (k * f + j);
            }
        }
        x
    }
}
