//! Block graphs and the permutation fooling attack: harvest accepting
//! certificates of many permuted yes-instances, find two that use the same
//! labeled blocks, and splice a short accepting no-instance out of them.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::blocks::{BlockFamily, LabeledBlock, Variant};
use super::counting::{counting_bound, counting_bound_odd};
use super::{LowerBoundError, MAX_BLOCK_GRAPH_VERTICES};
use crate::bits::Bits;
use crate::graph::{Graph, GraphFile, NodeId};
use crate::harness::{build_proof, run, Evaluator};
use crate::language::{Language, StdLanguage};
use crate::proof::{Proof, ProofFile, Regime};
use crate::schemes::{Scheme, Verifier};
use crate::view::ViewRule;

/// Junction evaluations allowed when building one block graph.
const MAX_JUNCTIONS: u128 = 1 << 28;
/// All permutations are harvested up to this many ordinary blocks.
const MAX_ENUMERATED_BLOCKS: usize = 6;
const MAX_GLOBAL_BITS: usize = 20;

/// Two blocks laid as a path, ready to evaluate the nodes near their junction.
struct Frame<'a> {
    ev: Evaluator<'a>,
    /// For each graph position: which side it is on and its offset in the block.
    slot: Vec<(bool, usize)>,
    check: Vec<usize>,
}

impl<'a> Frame<'a> {
    fn new(verifier: &'a dyn Verifier, family: &BlockFamily, first: usize, second: usize) -> Result<Self, LowerBoundError> {
        if verifier.radius() > family.r {
            return Err(LowerBoundError::RadiusMismatch { verifier: verifier.radius(), r: family.r });
        }
        if first == second {
            return Err(LowerBoundError::SameBlock(first));
        }
        let g = family.lay(&[first, second], false)?;
        let (a, b) = (family.blocks[first], family.blocks[second]);
        let r = family.r as u64;
        let slot = g
            .ids()
            .map(|id| {
                if (a.first_id()..=a.last_id()).contains(&id.0) {
                    (false, (id.0 - a.first_id()) as usize)
                } else {
                    (true, (id.0 - b.first_id()) as usize)
                }
            })
            .collect();
        let near: Vec<u64> = (a.last_id() - r..=a.last_id()).chain(b.first_id()..=b.first_id() + r).collect();
        let check = near.iter().map(|&id| g.index_of(NodeId(id)).expect("laid node")).collect();
        Ok(Frame { ev: Evaluator::new(&g, verifier, ViewRule::Strict), slot, check })
    }

    fn accepts(&self, regime: Regime, la: &[Bits], lb: &[Bits], global: Option<&Bits>) -> bool {
        let labels: Vec<Bits> = if regime == Regime::Global {
            Vec::new()
        } else {
            self.slot.iter().map(|&(second, k)| if second { lb[k].clone() } else { la[k].clone() }).collect()
        };
        self.check.iter().all(|&i| self.ev.decide(i, &labels, global))
    }
}

/// True iff every node within distance `r` of the edge joining `a`'s last
/// node to `b`'s first node accepts. The two blocks are laid as a bare path:
/// nothing farther than `2r` from the junction is inside any of those views.
pub fn junction_accepts(
    verifier: &dyn Verifier,
    regime: Regime,
    family: &BlockFamily,
    a: &LabeledBlock,
    b: &LabeledBlock,
    global: Option<&Bits>,
) -> Result<bool, LowerBoundError> {
    Ok(Frame::new(verifier, family, a.block, b.block)?.accepts(regime, &a.labels, &b.labels, global))
}

/// `G_{B,L}`: labeled blocks of width `f`, with an arc for every accepting
/// junction under the global certificate `global`.
#[derive(Debug, Clone)]
pub struct BlockGraph {
    pub b: usize,
    pub r: usize,
    pub f: usize,
    pub global: Option<Bits>,
    /// Labelings per block, `2^(f(2r+1))`.
    pub per_block: usize,
    /// `junctions[first][second][la * per_block + lb]`; empty when `first == second`.
    junctions: Vec<Vec<Vec<bool>>>,
}

impl BlockGraph {
    pub fn vertex_count(&self) -> usize {
        (self.b + 1) * self.per_block
    }

    pub fn vertex(&self, block: usize, labeling: usize) -> usize {
        block * self.per_block + labeling
    }

    pub fn labeled(&self, v: usize) -> LabeledBlock {
        LabeledBlock::from_index(v / self.per_block, 2 * self.r + 1, self.f, (v % self.per_block) as u64)
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        let (bu, lu) = (u / self.per_block, u % self.per_block);
        let (bv, lv) = (v / self.per_block, v % self.per_block);
        bu != bv && self.junctions[bu][bv][lu * self.per_block + lv]
    }

    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let n = self.vertex_count();
        (0..n).flat_map(|u| (0..n).filter(move |&v| self.has_arc(u, v)).map(move |v| (u, v))).collect()
    }

    pub fn arc_count(&self) -> usize {
        self.junctions.iter().flatten().map(|m| m.iter().filter(|&&x| x).count()).sum()
    }

    fn junction(&self, first: usize, la: usize, second: usize, lb: usize) -> bool {
        self.junctions[first][second][la * self.per_block + lb]
    }

    /// The lowest labelings (in lexicographic order along `order`) that close
    /// `order` into an accepting cycle, if any.
    pub fn accepting_cycle(&self, order: &[usize]) -> Option<Vec<usize>> {
        let m = order.len();
        let p = self.per_block;
        for l0 in 0..p {
            // ok[i][l]: block i labeled l can be continued to the end and closed onto l0.
            let mut ok = vec![vec![false; p]; m];
            for l in 0..p {
                ok[m - 1][l] = if m == 1 { l == l0 } else { self.junction(order[m - 1], l, order[0], l0) };
            }
            for i in (1..m - 1).rev() {
                for l in 0..p {
                    ok[i][l] = (0..p).any(|l2| ok[i + 1][l2] && self.junction(order[i], l, order[i + 1], l2));
                }
            }
            if m > 1 && !(0..p).any(|l2| ok[1][l2] && self.junction(order[0], l0, order[1], l2)) {
                continue;
            }
            let mut chosen = vec![l0];
            for i in 1..m {
                let prev = chosen[i - 1];
                let next = (0..p).find(|&l| ok[i][l] && self.junction(order[i - 1], prev, order[i], l))?;
                chosen.push(next);
            }
            return Some(chosen);
        }
        None
    }

    /// Lays the labeled blocks of `path` (vertices) as an open path graph,
    /// returning the graph and its labels in graph order.
    pub fn fragment(&self, family: &BlockFamily, path: &[usize]) -> Result<(Graph, Vec<Bits>), LowerBoundError> {
        let order: Vec<usize> = path.iter().map(|&v| v / self.per_block).collect();
        let g = family.lay(&order, false)?;
        let labeled: Vec<LabeledBlock> = path.iter().map(|&v| self.labeled(v)).collect();
        let labels = labels_in_graph_order(&g, family, &labeled);
        Ok((g, labels))
    }
}

fn labels_in_graph_order(g: &Graph, family: &BlockFamily, labeled: &[LabeledBlock]) -> Vec<Bits> {
    let mut by_id: HashMap<u64, &Bits> = HashMap::new();
    for lb in labeled {
        for (id, l) in family.blocks[lb.block].ids().zip(&lb.labels) {
            by_id.insert(id, l);
        }
    }
    g.ids().map(|id| by_id.get(&id.0).map(|&l| l.clone()).unwrap_or_default()).collect()
}

/// Computes every junction of labeled blocks of width `f` under `global`.
pub fn build_block_graph(
    verifier: &dyn Verifier,
    regime: Regime,
    family: &BlockFamily,
    f: usize,
    global: Option<&Bits>,
) -> Result<BlockGraph, LowerBoundError> {
    let len = family.block_len();
    let per_block: u128 = 1u128.checked_shl((f * len) as u32).unwrap_or(u128::MAX);
    let vertices = per_block.saturating_mul(family.b as u128 + 1);
    if vertices > MAX_BLOCK_GRAPH_VERTICES as u128 {
        return Err(LowerBoundError::BudgetTooLarge {
            what: "block graph",
            size: vertices,
            limit: MAX_BLOCK_GRAPH_VERTICES as u128,
        });
    }
    let junctions = per_block * per_block * (family.b as u128 + 1) * family.b as u128;
    if junctions > MAX_JUNCTIONS {
        return Err(LowerBoundError::BudgetTooLarge { what: "junction table", size: junctions, limit: MAX_JUNCTIONS });
    }
    let p = per_block as usize;
    let labelings: Vec<Vec<Bits>> =
        (0..p).map(|l| LabeledBlock::from_index(0, len, f, l as u64).labels).collect();
    let types = family.b + 1;
    let mut table = vec![vec![Vec::new(); types]; types];
    for (first, row) in table.iter_mut().enumerate() {
        for (second, cell) in row.iter_mut().enumerate() {
            if first == second {
                continue;
            }
            let frame = Frame::new(verifier, family, first, second)?;
            *cell = (0..p * p)
                .into_par_iter()
                .map(|k| frame.accepts(regime, &labelings[k / p], &labelings[k % p], global))
                .collect();
        }
    }
    Ok(BlockGraph { b: family.b, r: family.r, f, global: global.cloned(), per_block: p, junctions: table })
}

/// How accepting certificates of the permuted instances are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Harvest {
    /// Search all labelings of width `f` and global strings of length `g`
    /// through the block graph; each instance takes the first certificate found.
    Exhaustive,
    /// Use the scheme's own prover.
    Honest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AttackConfig {
    pub b: usize,
    pub r: usize,
    pub f: usize,
    pub g: usize,
    pub harvest: Harvest,
    /// Random permutations drawn when `b` is too large to enumerate.
    pub samples: usize,
    pub seed: u64,
}

impl AttackConfig {
    pub fn new(b: usize, r: usize, f: usize, g: usize) -> Self {
        AttackConfig { b, r, f, g, harvest: Harvest::Exhaustive, samples: 5000, seed: 0 }
    }

    pub fn honest(b: usize, r: usize) -> Self {
        AttackConfig { harvest: Harvest::Honest, ..Self::new(b, r, 0, 0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackOutcome {
    Counterexample,
    NotFound,
}

/// A spliced no-instance with the certificate that fools the verifier.
#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub certificate: ProofFile,
    pub colliding_permutations: [Vec<usize>; 2],
    /// Blocks `(from, to)` joined in the second permutation against the order of the first.
    pub back_edge: (usize, usize),
    pub spliced_cycle: Vec<u64>,
    pub replay_decisions: Vec<(NodeId, bool)>,
    pub accepted: bool,
    pub in_language: bool,
    pub instance: GraphFile,
    #[serde(skip)]
    pub graph: Graph,
    #[serde(skip)]
    pub proof: Proof,
}

#[derive(Debug, Clone, Serialize)]
pub struct AttackReport {
    pub scheme: String,
    pub variant: Variant,
    pub config: AttackConfig,
    pub permutations: usize,
    pub accepted_instances: usize,
    /// Permutations for which no accepting certificate was found.
    pub completeness_failures: Vec<Vec<usize>>,
    /// Whether the counting bound alone forces a collision (exhaustive harvest only).
    pub pigeonhole_guaranteed: Option<bool>,
    pub outcome: AttackOutcome,
    pub counterexample: Option<Counterexample>,
}

impl AttackReport {
    pub fn found(&self) -> bool {
        self.outcome == AttackOutcome::Counterexample
    }
}

fn variant_of(lang: &dyn Language) -> Result<Variant, LowerBoundError> {
    let name = lang.name();
    Ok(match name.parse::<StdLanguage>() {
        Ok(StdLanguage::Alos) => Variant::Alos,
        Ok(StdLanguage::Leader) => Variant::Leader,
        Ok(StdLanguage::SpanningTree) => Variant::SpanningTree,
        Ok(StdLanguage::OddCycle) => Variant::OddCycle,
        _ => return Err(LowerBoundError::InvalidParameters(format!("no block construction for language {name}"))),
    })
}

/// Runs the attack with the block construction matching the scheme's language.
pub fn fooling_attack(scheme: &dyn Scheme, cfg: &AttackConfig) -> Result<AttackReport, LowerBoundError> {
    let variant = variant_of(scheme.language().as_ref())?;
    attack(scheme, variant, cfg)
}

/// The attack on odd cycles: only permutations alternating between the two
/// block colors are harvested, so every splice is an even cycle.
pub fn odd_cycle_attack(scheme: &dyn Scheme, cfg: &AttackConfig) -> Result<AttackReport, LowerBoundError> {
    if cfg.b % 2 == 1 {
        return Err(LowerBoundError::InvalidParameters(format!("the odd-cycle attack needs an even b, got {}", cfg.b)));
    }
    attack(scheme, Variant::OddCycle, cfg)
}

/// Permutations of the ordinary blocks allowed by the variant: all of them
/// when `b` is small, otherwise distinct seeded samples.
fn permutations(family: &BlockFamily, cfg: &AttackConfig) -> Vec<Vec<usize>> {
    let b = family.b;
    if b <= MAX_ENUMERATED_BLOCKS {
        let mut out = Vec::new();
        let mut p: Vec<usize> = (0..b).collect();
        loop {
            if family.check_permutation(&p).is_ok() {
                out.push(p.clone());
            }
            if !next_permutation(&mut p) {
                return out;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for _ in 0..cfg.samples {
        let p = if family.variant == Variant::OddCycle {
            let mut white: Vec<usize> = (0..b / 2).collect();
            let mut black: Vec<usize> = (b / 2..b).collect();
            white.shuffle(&mut rng);
            black.shuffle(&mut rng);
            let (x, y) = if rng.gen::<bool>() { (white, black) } else { (black, white) };
            x.into_iter().zip(y).flat_map(|(u, v)| [u, v]).collect()
        } else {
            let mut p: Vec<usize> = (0..b).collect();
            p.shuffle(&mut rng);
            p
        };
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    out
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else { return false };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("a larger element exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// An accepted permuted instance: its global part and the labels of each
/// ordinary block, indexed by block.
struct Harvested {
    perm: Vec<usize>,
    global: Option<Bits>,
    blocks: Vec<Vec<Bits>>,
}

fn all_globals(regime: Regime, g: usize) -> Result<Vec<Option<Bits>>, LowerBoundError> {
    if regime == Regime::Local {
        if g > 0 {
            return Err(LowerBoundError::InvalidParameters("a local scheme has no global certificate".into()));
        }
        return Ok(vec![None]);
    }
    if g > MAX_GLOBAL_BITS {
        return Err(LowerBoundError::BudgetTooLarge {
            what: "global certificate space",
            size: 1u128 << g,
            limit: 1u128 << MAX_GLOBAL_BITS,
        });
    }
    Ok((0u64..1 << g).map(|v| Some(Bits::from_words(g, [v]))).collect())
}

fn harvest_exhaustive(
    scheme: &dyn Scheme,
    family: &BlockFamily,
    cfg: &AttackConfig,
    perms: &[Vec<usize>],
) -> Result<(Vec<Harvested>, Vec<Vec<usize>>), LowerBoundError> {
    let regime = scheme.regime();
    if regime == Regime::Global && cfg.f > 0 {
        return Err(LowerBoundError::InvalidParameters("a global scheme has no local labels".into()));
    }
    let graphs: Vec<BlockGraph> = all_globals(regime, cfg.g)?
        .iter()
        .map(|gl| build_block_graph(scheme, regime, family, cfg.f, gl.as_ref()))
        .collect::<Result<_, _>>()?;
    let mut got = Vec::new();
    let mut failed = Vec::new();
    for perm in perms {
        let mut order = perm.clone();
        order.push(family.special());
        let found = graphs.iter().find_map(|bg| bg.accepting_cycle(&order).map(|ls| (bg, ls)));
        match found {
            Some((bg, ls)) => {
                let mut blocks = vec![Vec::new(); family.b];
                for (&k, &l) in order.iter().zip(&ls) {
                    if k != family.special() {
                        blocks[k] = bg.labeled(bg.vertex(k, l)).labels;
                    }
                }
                got.push(Harvested { perm: perm.clone(), global: bg.global.clone(), blocks });
            }
            None => failed.push(perm.clone()),
        }
    }
    Ok((got, failed))
}

fn harvest_honest(
    scheme: &dyn Scheme,
    family: &BlockFamily,
    perms: &[Vec<usize>],
) -> Result<(Vec<Harvested>, Vec<Vec<usize>>), LowerBoundError> {
    let mut got = Vec::new();
    let mut failed = Vec::new();
    for perm in perms {
        let inst = family.instance(perm)?;
        let proof = match scheme.prove(&inst.graph) {
            Ok(p) => p,
            Err(_) => {
                failed.push(perm.clone());
                continue;
            }
        };
        if !run(scheme, &inst.graph, &proof)?.accepted {
            failed.push(perm.clone());
            continue;
        }
        let blocks = (0..family.b)
            .map(|k| {
                family.blocks[k]
                    .ids()
                    .map(|id| proof.local().and_then(|l| l.labels.get(&NodeId(id)).cloned()).unwrap_or_default())
                    .collect()
            })
            .collect();
        got.push(Harvested { perm: perm.clone(), global: proof.global().map(|g| g.bits.clone()), blocks });
    }
    Ok((got, failed))
}

fn attack(scheme: &dyn Scheme, variant: Variant, cfg: &AttackConfig) -> Result<AttackReport, LowerBoundError> {
    let family = BlockFamily::new(cfg.b, cfg.r, variant)?;
    if scheme.radius() > cfg.r {
        return Err(LowerBoundError::RadiusMismatch { verifier: scheme.radius(), r: cfg.r });
    }
    let perms = permutations(&family, cfg);
    let (harvested, failed) = match cfg.harvest {
        Harvest::Exhaustive => harvest_exhaustive(scheme, &family, cfg, &perms)?,
        Harvest::Honest => harvest_honest(scheme, &family, &perms)?,
    };
    let pigeonhole_guaranteed = match (cfg.harvest, variant) {
        (Harvest::Honest, _) => None,
        (_, Variant::OddCycle) => Some(counting_bound_odd(cfg.f, cfg.g, cfg.b, cfg.r)?),
        _ => Some(counting_bound(cfg.f, cfg.g, cfg.b, cfg.r)),
    };
    let mut seen: HashMap<(&Option<Bits>, &Vec<Vec<Bits>>), usize> = HashMap::new();
    let mut collision = None;
    for (k, h) in harvested.iter().enumerate() {
        if let Some(&first) = seen.get(&(&h.global, &h.blocks)) {
            collision = Some((first, k));
            break;
        }
        seen.insert((&h.global, &h.blocks), k);
    }
    let counterexample = match collision {
        Some((a, b)) => Some(splice(scheme, &family, &harvested[a], &harvested[b])?),
        None => None,
    };
    Ok(AttackReport {
        scheme: scheme.name(),
        variant,
        config: *cfg,
        permutations: perms.len(),
        accepted_instances: harvested.len(),
        completeness_failures: failed,
        pigeonhole_guaranteed,
        outcome: if counterexample.is_some() { AttackOutcome::Counterexample } else { AttackOutcome::NotFound },
        counterexample,
    })
}

/// Normalizes `first` to the identity order, finds the first back edge of
/// `second`, and closes the stretch of `first` it jumps over into a cycle.
fn splice(
    scheme: &dyn Scheme,
    family: &BlockFamily,
    first: &Harvested,
    second: &Harvested,
) -> Result<Counterexample, LowerBoundError> {
    let mut pos = vec![0usize; family.b];
    for (i, &k) in first.perm.iter().enumerate() {
        pos[k] = i;
    }
    let (from, to) = second
        .perm
        .windows(2)
        .map(|w| (w[0], w[1]))
        .find(|&(u, v)| pos[u] > pos[v])
        .expect("distinct permutations have a back edge");
    let order: Vec<usize> = first.perm[pos[to]..=pos[from]].to_vec();
    let graph = family.lay(&order, true)?;
    let labeled: Vec<LabeledBlock> =
        order.iter().map(|&k| LabeledBlock { block: k, labels: first.blocks[k].clone() }).collect();
    let labels = labels_in_graph_order(&graph, family, &labeled);
    let width = labels.first().map_or(0, Bits::len);
    let proof = build_proof(scheme.regime(), &graph, width, &labels, first.global.clone());
    let replay = run(scheme, &graph, &proof)?;
    let in_language = family.variant.language().contains(&graph).map_err(crate::harness::HarnessError::from)?;
    Ok(Counterexample {
        certificate: proof.to_file(),
        colliding_permutations: [first.perm.clone(), second.perm.clone()],
        back_edge: (from, to),
        spliced_cycle: order.iter().flat_map(|&k| family.blocks[k].ids()).collect(),
        replay_decisions: replay.decisions,
        accepted: replay.accepted,
        in_language,
        instance: graph.to_file(),
        graph,
        proof,
    })
}
