//! Extracting a 2-coloring of blocks from a bipartiteness certificate.
//!
//! For a fixed global certificate `c`, `G_c` has an arc from block `i` to
//! block `j` whenever some block-based cycle where `j` follows `i` is accepted
//! under `c`. When `G_c` has no odd directed cycle and each component is
//! strongly connected, it is bipartite and its 2-coloring `f_c` colors every
//! accepted cycle properly.

use std::collections::BTreeSet;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use super::blocks::Block;
use super::LowerBoundError;
use crate::bits::Bits;
use crate::graph::{Graph, GraphBuilder};
use crate::harness::Evaluator;
use crate::proof::Regime;
use crate::schemes::{Scheme, Verifier};
use crate::view::{View, ViewRule};

/// Block-based cycles evaluated per certificate are capped at this count.
const MAX_CYCLES: usize = 1_000_000;

/// Every cyclic sequence of distinct blocks out of `0..m` with between one and
/// `max_len` blocks, each listed once, starting from its smallest block.
pub fn block_cycles(m: usize, max_len: usize) -> Vec<Vec<usize>> {
    fn extend(m: usize, max_len: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        if cur.len() == max_len {
            return;
        }
        for k in cur[0] + 1..m {
            if !used[k] {
                used[k] = true;
                cur.push(k);
                extend(m, max_len, cur, used, out);
                cur.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    for first in 0..m {
        let mut used = vec![false; m];
        used[first] = true;
        extend(m, max_len, &mut vec![first], &mut used, &mut out);
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// The cycle laid from `blocks[order[0]]`, `blocks[order[1]]`, ...; every node input is `0`.
pub fn cycle_graph(blocks: &[Block], order: &[usize]) -> Result<Graph, LowerBoundError> {
    let bound = blocks.iter().map(Block::last_id).max().unwrap_or(1);
    let mut gb = GraphBuilder::new().id_bound(bound);
    let ids: Vec<u64> = order.iter().flat_map(|&k| blocks[k].ids()).collect();
    for &id in &ids {
        gb = gb.node(id, Bits::zeros(1));
    }
    for w in ids.windows(2) {
        gb = gb.edge(w[0], w[1]);
    }
    gb = gb.edge(*ids.last().expect("nonempty"), ids[0]);
    Ok(gb.build()?)
}

/// Precomputed views of every block-based cycle, reusable across certificates.
pub struct CycleBank<'a> {
    pub blocks: Vec<Block>,
    pub cycles: Vec<Vec<usize>>,
    evaluators: Vec<Evaluator<'a>>,
}

impl<'a> CycleBank<'a> {
    pub fn new(verifier: &'a dyn Verifier, blocks: &[Block], max_blocks: usize) -> Result<Self, LowerBoundError> {
        let m = blocks.len();
        let count: u128 = (1..=max_blocks.min(m))
            .map(|k| {
                let choose: u128 = (0..k as u128).fold(1, |acc, i| acc * (m as u128 - i) / (i + 1));
                choose * (1..k as u128).product::<u128>()
            })
            .sum();
        if count > MAX_CYCLES as u128 {
            return Err(LowerBoundError::BudgetTooLarge { what: "block-based cycles", size: count, limit: MAX_CYCLES as u128 });
        }
        let cycles = block_cycles(m, max_blocks);
        let evaluators = cycles
            .iter()
            .map(|c| Ok(Evaluator::new(&cycle_graph(blocks, c)?, verifier, ViewRule::Strict)))
            .collect::<Result<_, LowerBoundError>>()?;
        Ok(CycleBank { blocks: blocks.to_vec(), cycles, evaluators })
    }

    /// `G_c` for the global certificate `c`.
    pub fn gc(&self, c: &Bits) -> Gc {
        let mut arcs = BTreeSet::new();
        let mut accepted = Vec::new();
        for (cycle, ev) in self.cycles.iter().zip(&self.evaluators) {
            if ev.all_accept(&[], Some(c)) {
                for k in 0..cycle.len() {
                    arcs.insert((cycle[k], cycle[(k + 1) % cycle.len()]));
                }
                accepted.push(cycle.clone());
            }
        }
        Gc { blocks: self.blocks.len(), arcs, accepted }
    }
}

/// The directed block graph induced by one certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Gc {
    pub blocks: usize,
    pub arcs: BTreeSet<(usize, usize)>,
    /// The accepted block-based cycles the arcs come from.
    pub accepted: Vec<Vec<usize>>,
}

impl Gc {
    pub fn from_arcs(blocks: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Gc { blocks, arcs: arcs.into_iter().collect(), accepted: Vec::new() }
    }
}

/// `G_c` over all block-based cycles of at most `max_blocks` blocks.
pub fn build_gc(verifier: &dyn Verifier, c: &Bits, blocks: &[Block], max_blocks: usize) -> Result<Gc, LowerBoundError> {
    Ok(CycleBank::new(verifier, blocks, max_blocks)?.gc(c))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GcAnalysis {
    pub no_odd_directed_cycle: bool,
    pub components_strongly_connected: bool,
    /// `f_c` per block, when both checks hold.
    pub coloring: Option<Vec<bool>>,
}

pub fn analyze_gc(gc: &Gc) -> GcAnalysis {
    let m = gc.blocks;
    let mut dg = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..m).map(|_| dg.add_node(())).collect();
    for &(u, v) in &gc.arcs {
        dg.add_edge(nodes[u], nodes[v], ());
    }
    let mut scc_of = vec![0usize; m];
    let sccs = tarjan_scc(&dg);
    for (k, comp) in sccs.iter().enumerate() {
        for n in comp {
            scc_of[n.index()] = k;
        }
    }

    // Inside a strongly connected part, an arc that breaks the parity of
    // directed distances from a root closes an odd closed walk.
    let mut parity: Vec<Option<bool>> = vec![None; m];
    for comp in &sccs {
        let root = comp[0].index();
        parity[root] = Some(false);
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            for &(a, v) in gc.arcs.range((u, 0)..(u + 1, 0)) {
                debug_assert_eq!(a, u);
                if scc_of[v] == scc_of[u] && parity[v].is_none() {
                    parity[v] = Some(!parity[u].unwrap());
                    stack.push(v);
                }
            }
        }
    }
    let no_odd_directed_cycle = gc.arcs.iter().all(|&(u, v)| scc_of[u] != scc_of[v] || parity[u] != parity[v]);

    let components_strongly_connected = gc.arcs.iter().all(|&(u, v)| scc_of[u] == scc_of[v]);

    let coloring = if no_odd_directed_cycle && components_strongly_connected { two_color(m, &gc.arcs) } else { None };
    GcAnalysis { no_odd_directed_cycle, components_strongly_connected, coloring }
}

/// Colors the underlying undirected graph, smallest block of each component first.
fn two_color(m: usize, arcs: &BTreeSet<(usize, usize)>) -> Option<Vec<bool>> {
    let mut adj = vec![Vec::new(); m];
    for &(u, v) in arcs {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut color: Vec<Option<bool>> = vec![None; m];
    for s in 0..m {
        if color[s].is_some() {
            continue;
        }
        color[s] = Some(false);
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                match color[v] {
                    None => {
                        color[v] = Some(!color[u].unwrap());
                        stack.push(v);
                    }
                    Some(c) if c == color[u].unwrap() => return None,
                    Some(_) => {}
                }
            }
        }
    }
    Some(color.into_iter().map(Option::unwrap).collect())
}

/// Whether a block coloring alternates along the cyclic block order.
pub fn colors_cycle(coloring: &[bool], cycle: &[usize]) -> bool {
    (0..cycle.len()).all(|k| coloring[cycle[k]] != coloring[cycle[(k + 1) % cycle.len()]])
}

/// Node colors on a laid cycle induced by a block coloring: the first node of
/// a block takes the block's color and colors alternate inside the block.
pub fn node_colors(coloring: &[bool], blocks: &[Block], cycle: &[usize]) -> Vec<(u64, bool)> {
    cycle
        .iter()
        .flat_map(|&k| blocks[k].ids().enumerate().map(move |(off, id)| (id, coloring[k] ^ (off % 2 == 1))))
        .collect()
}

/// Rows indexed by certificate, columns by block; each cell is the color
/// `f_c` gives to the block's center node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColoringTable {
    pub rows: Vec<Vec<bool>>,
}

impl ColoringTable {
    pub fn columns(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    fn column(&self, j: usize) -> Vec<bool> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Pairs of blocks whose columns coincide.
    pub fn equal_columns(&self) -> Vec<(usize, usize)> {
        let cols: Vec<Vec<bool>> = (0..self.columns()).map(|j| self.column(j)).collect();
        let mut out = Vec::new();
        for i in 0..cols.len() {
            for j in i + 1..cols.len() {
                if cols[i] == cols[j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn columns_distinct(&self) -> bool {
        self.equal_columns().is_empty()
    }

    /// Balanced strings over the first `n` blocks that no row matches, up to complement.
    pub fn missing_balanced(&self, n: usize) -> Vec<Vec<bool>> {
        let present: BTreeSet<Vec<bool>> = self
            .rows
            .iter()
            .map(|r| {
                let s = r[..n].to_vec();
                if s[0] { s.iter().map(|b| !b).collect() } else { s }
            })
            .collect();
        balanced_strings(n)
            .into_iter()
            .filter(|s| !s[0])
            .filter(|s| !present.contains(s))
            .collect()
    }
}

/// All bit strings of length `n` with as many ones as zeros.
pub fn balanced_strings(n: usize) -> Vec<Vec<bool>> {
    (0u64..1 << n)
        .filter(|x| x.count_ones() as usize * 2 == n)
        .map(|x| (0..n).map(|i| x >> i & 1 == 1).collect())
        .collect()
}

/// Builds the table from `certificates`; fails on the first one whose `G_c`
/// yields no coloring.
pub fn coloring_table(
    verifier: &dyn Verifier,
    certificates: &[Bits],
    blocks: &[Block],
    max_blocks: usize,
) -> Result<ColoringTable, LowerBoundError> {
    let bank = CycleBank::new(verifier, blocks, max_blocks)?;
    let mut rows = Vec::with_capacity(certificates.len());
    for (row, c) in certificates.iter().enumerate() {
        let coloring = analyze_gc(&bank.gc(c)).coloring.ok_or(LowerBoundError::MissingColoring { row })?;
        rows.push(blocks.iter().zip(coloring).map(|(bl, col)| col ^ (bl.r % 2 == 1)).collect());
    }
    Ok(ColoringTable { rows })
}

fn global_certificate(scheme: &dyn Scheme, g: &Graph) -> Result<Bits, LowerBoundError> {
    if scheme.regime() != Regime::Global {
        return Err(LowerBoundError::InvalidParameters(format!("{} is not a global scheme", scheme.name())));
    }
    let p = scheme.prove(g)?;
    Ok(p.global().expect("global proof").bits.clone())
}

/// For every balanced string `s` over the first `n` blocks, the honest
/// certificate of a cycle on those blocks that alternates between the blocks
/// marked 0 and the blocks marked 1 in `s`.
pub fn balanced_probe(scheme: &dyn Scheme, blocks: &[Block], n: usize) -> Result<Vec<(Vec<bool>, Bits)>, LowerBoundError> {
    if n == 0 || n % 2 == 1 || n > blocks.len() {
        return Err(LowerBoundError::InvalidParameters(format!("probe length {n} must be even and at most {}", blocks.len())));
    }
    balanced_strings(n)
        .into_iter()
        .map(|s| {
            let zeros = (0..n).filter(|&i| !s[i]);
            let ones = (0..n).filter(|&i| s[i]);
            let order: Vec<usize> = zeros.zip(ones).flat_map(|(a, b)| [a, b]).collect();
            let c = global_certificate(scheme, &cycle_graph(blocks, &order)?)?;
            Ok((s, c))
        })
        .collect()
}

/// Honest certificates of every even block-based cycle with at most `max_blocks` blocks.
pub fn honest_certificates(scheme: &dyn Scheme, blocks: &[Block], max_blocks: usize) -> Result<Vec<Bits>, LowerBoundError> {
    block_cycles(blocks.len(), max_blocks)
        .into_iter()
        .filter(|c| c.len() % 2 == 0)
        .map(|c| global_certificate(scheme, &cycle_graph(blocks, &c)?))
        .collect()
}

/// A verifier that ignores identifiers and certificates and decides from the
/// shape of its view: it accepts only where it sees an endpoint of a path.
/// It never wrongly accepts an odd cycle, so on block-based cycles it rejects
/// everything, and every block gets the same color under every certificate.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdOblivious;

impl Verifier for IdOblivious {
    fn radius(&self) -> usize {
        1
    }

    fn verify(&self, view: &View) -> bool {
        (0..view.len()).any(|s| view.dist(s) == 0 && view.neighbors(s).len() < 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lowerbound::make_blocks;
    use crate::schemes::BipTable;

    #[test]
    fn cycle_counts() {
        // sum over k of C(m, k) (k-1)!
        assert_eq!(block_cycles(3, 3).len(), 3 + 3 + 2);
        assert_eq!(block_cycles(6, 6).len(), 6 + 15 + 40 + 90 + 144 + 120);
        assert!(block_cycles(4, 2).iter().all(|c| c.len() <= 2 && c[0] == *c.iter().min().unwrap()));
    }

    #[test]
    fn two_cycle_and_three_cycle() {
        let a = analyze_gc(&Gc::from_arcs(2, [(0, 1), (1, 0)]));
        assert!(a.no_odd_directed_cycle && a.components_strongly_connected);
        assert_eq!(a.coloring, Some(vec![false, true]));
        let b = analyze_gc(&Gc::from_arcs(3, [(0, 1), (1, 2), (2, 0)]));
        assert!(!b.no_odd_directed_cycle && b.components_strongly_connected);
        assert_eq!(b.coloring, None);
        let c = analyze_gc(&Gc::from_arcs(3, [(0, 1), (1, 2)]));
        assert!(c.no_odd_directed_cycle && !c.components_strongly_connected);
        let d = analyze_gc(&Gc::from_arcs(2, [(1, 1)]));
        assert!(!d.no_odd_directed_cycle);
    }

    #[test]
    fn empty_gc_for_a_rejected_certificate() {
        let blocks = make_blocks(2, 1).unwrap();
        let table = BipTable::new(9);
        // An all-zero table colors every neighbor pair the same.
        let gc = build_gc(&table, &Bits::zeros(9), &blocks, 3).unwrap();
        assert!(gc.arcs.is_empty());
    }

    #[test]
    fn honest_table_certificate() {
        let blocks = make_blocks(3, 1).unwrap();
        let scheme = BipTable::new(12);
        let c = global_certificate(&scheme, &cycle_graph(&blocks, &[0, 2]).unwrap()).unwrap();
        let gc = build_gc(&scheme, &c, &blocks, 4).unwrap();
        assert!(gc.arcs.contains(&(0, 2)) && gc.arcs.contains(&(2, 0)));
        let a = analyze_gc(&gc);
        let f = a.coloring.unwrap();
        assert_ne!(f[0], f[2]);
        assert!(gc.accepted.iter().all(|cyc| colors_cycle(&f, cyc)));
    }

    #[test]
    fn balanced_strings_count() {
        assert_eq!(balanced_strings(4).len(), 6);
        assert_eq!(balanced_strings(6).len(), 20);
    }

    #[test]
    fn oblivious_verifier_gives_equal_columns() {
        let blocks = make_blocks(3, 1).unwrap();
        let table = coloring_table(&IdOblivious, &[Bits::zeros(1), Bits::from_bools(&[true])], &blocks, 4).unwrap();
        assert!(!table.columns_distinct());
        assert_eq!(table.equal_columns().len(), 6);
    }
}
