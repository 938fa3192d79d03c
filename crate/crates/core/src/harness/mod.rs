//! Running schemes on instances and searching certificate spaces.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::Bits;
use crate::graph::{Graph, GraphFile, NodeId};
use crate::language::LanguageError;
use crate::proof::{GlobalProof, LocalProof, MixedProof, Proof, ProofError, ProofFile, Regime};
use crate::schemes::{Scheme, SchemeError, Verifier};
use crate::view::{Ball, View, ViewRule};

pub mod corpus;
pub mod report;

pub use corpus::{Corpus, Family, Inputs};
pub use report::{size_report, SizeError};

/// Subspaces larger than `2^EXHAUSTIVE_LOG2` certificates are not enumerated.
pub const EXHAUSTIVE_LOG2: usize = 24;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HarnessError {
    #[error("scheme expects a {expected} proof, got {got}")]
    RegimeMismatch { expected: Regime, got: Regime },
    #[error(transparent)]
    Proof(#[from] ProofError),
    #[error("certificate space of 2^{log2} exceeds the exhaustive limit 2^{EXHAUSTIVE_LOG2}")]
    BudgetTooLarge { log2: usize },
    #[error("instance is in the language; soundness needs a no-instance")]
    NotANoInstance,
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Language(#[from] LanguageError),
}

/// Precomputed balls of one graph for one verifier radius.
pub struct Evaluator<'a> {
    verifier: &'a dyn Verifier,
    balls: Vec<Ball>,
}

impl<'a> Evaluator<'a> {
    pub fn new(g: &Graph, verifier: &'a dyn Verifier, rule: ViewRule) -> Self {
        let balls = (0..g.n()).map(|i| Ball::at_index(g, i, verifier.radius(), rule)).collect();
        Evaluator { verifier, balls }
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    /// Decision of the node at graph position `i`; `labels` in graph order.
    pub fn decide(&self, i: usize, labels: &[Bits], global: Option<&Bits>) -> bool {
        self.verifier.verify(&View::new(&self.balls[i], labels, global))
    }

    pub fn decisions(&self, labels: &[Bits], global: Option<&Bits>) -> Vec<bool> {
        (0..self.balls.len()).map(|i| self.decide(i, labels, global)).collect()
    }

    pub fn all_accept(&self, labels: &[Bits], global: Option<&Bits>) -> bool {
        (0..self.balls.len()).all(|i| self.decide(i, labels, global))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunOutcome {
    pub decisions: Vec<(NodeId, bool)>,
    pub accepted: bool,
}

impl RunOutcome {
    pub fn rejecting(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.decisions.iter().filter(|(_, d)| !d).map(|(id, _)| *id)
    }
}

fn split_proof<'p>(scheme: &dyn Scheme, g: &Graph, p: &'p Proof) -> Result<(Vec<Bits>, Option<&'p Bits>), HarnessError> {
    if p.regime() != scheme.regime() {
        return Err(HarnessError::RegimeMismatch { expected: scheme.regime(), got: p.regime() });
    }
    let labels = match p.local() {
        Some(l) => {
            l.check_covers(g)?;
            l.to_vec(g)
        }
        None => Vec::new(),
    };
    Ok((labels, p.global().map(|gp| &gp.bits)))
}

/// Runs every node's verifier; the graph is accepted iff all nodes accept.
pub fn run(scheme: &dyn Scheme, g: &Graph, p: &Proof) -> Result<RunOutcome, HarnessError> {
    run_with_rule(scheme, g, p, ViewRule::Strict)
}

pub fn run_with_rule(scheme: &dyn Scheme, g: &Graph, p: &Proof, rule: ViewRule) -> Result<RunOutcome, HarnessError> {
    let (labels, global) = split_proof(scheme, g, p)?;
    let ev = Evaluator::new(g, scheme, rule);
    let d = ev.decisions(&labels, global);
    Ok(RunOutcome { accepted: d.iter().all(|&x| x), decisions: g.ids().zip(d).collect() })
}

/// Certificate sizes to search: every local width and global length in the
/// inclusive ranges (only the parts the regime uses).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub local_widths: (usize, usize),
    pub global_lens: (usize, usize),
}

impl Budget {
    pub fn local(max_width: usize) -> Self {
        Budget { local_widths: (0, max_width), global_lens: (0, 0) }
    }

    pub fn global(max_len: usize) -> Self {
        Budget { local_widths: (0, 0), global_lens: (0, max_len) }
    }

    pub fn exact(width: usize, len: usize) -> Self {
        Budget { local_widths: (width, width), global_lens: (len, len) }
    }

    /// Everything up to the scheme's declared sizes on `g`.
    pub fn declared(scheme: &dyn Scheme, g: &Graph) -> Self {
        let s = scheme.shape(g);
        Budget { local_widths: (0, s.local_width.unwrap_or(0)), global_lens: (0, s.global_len.unwrap_or(0)) }
    }

    /// `(width, length)` pairs in enumeration order.
    fn subspaces(&self, regime: Regime) -> Vec<(usize, usize)> {
        let ws: Vec<usize> = match regime {
            Regime::Global => vec![0],
            _ => (self.local_widths.0..=self.local_widths.1).collect(),
        };
        let ls: Vec<usize> = match regime {
            Regime::Local => vec![0],
            _ => (self.global_lens.0..=self.global_lens.1).collect(),
        };
        ws.iter().flat_map(|&w| ls.iter().map(move |&l| (w, l))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    /// Every certificate in the budget, in little-endian index order.
    Exhaustive,
    /// A scheme-supplied space that holds an accepted certificate whenever one exists.
    Structured,
    /// Seeded random certificates from the budget.
    Sampled,
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchMode::Exhaustive => "exhaustive",
            SearchMode::Structured => "structured",
            SearchMode::Sampled => "sampled",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub rule: ViewRule,
    /// Use the scheme's structured space when the budget is too large.
    pub structured: bool,
    /// Fall back to sampling with `(samples, seed)` when nothing exact applies.
    pub sampling: Option<(u64, u64)>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { rule: ViewRule::Strict, structured: true, sampling: None }
    }
}

impl SearchOptions {
    pub fn sampled(samples: u64, seed: u64) -> Self {
        SearchOptions { sampling: Some((samples, seed)), ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub mode: SearchMode,
    /// Certificates (or samples) covered by the search.
    pub space: u128,
    pub witness: Option<Proof>,
}

pub(crate) fn build_proof(regime: Regime, g: &Graph, width: usize, labels: &[Bits], global: Option<Bits>) -> Proof {
    let local = || LocalProof::new(width, g.ids().zip(labels.iter().cloned()).collect());
    match regime {
        Regime::Local => Proof::Local(local()),
        Regime::Global => Proof::Global(GlobalProof::new(global.unwrap_or_default())),
        Regime::Mixed => Proof::Mixed(MixedProof { local: local(), global: GlobalProof::new(global.unwrap_or_default()) }),
    }
}

/// Looks for a certificate within `budget` that makes every node accept.
pub fn search(scheme: &dyn Scheme, g: &Graph, budget: &Budget, opts: &SearchOptions) -> Result<SearchOutcome, HarnessError> {
    let regime = scheme.regime();
    let subspaces = budget.subspaces(regime);
    let n = g.n();
    let log2 = |&(w, l): &(usize, usize)| n * w + l;
    let largest = subspaces.iter().map(log2).max().unwrap_or(0);
    let ev = Evaluator::new(g, scheme, opts.rule);

    if largest <= EXHAUSTIVE_LOG2 {
        let space = subspaces.iter().map(|s| 1u128 << log2(s)).sum();
        for &(w, l) in &subspaces {
            if let Some((labels, global)) = exhaustive(&ev, g, regime, w, l) {
                return Ok(SearchOutcome {
                    mode: SearchMode::Exhaustive,
                    space,
                    witness: Some(build_proof(regime, g, w, &labels, global)),
                });
            }
        }
        return Ok(SearchOutcome { mode: SearchMode::Exhaustive, space, witness: None });
    }
    if opts.structured {
        if let Some(space) = scheme.structured_space(g) {
            let witness = space.iter().find(|p| {
                split_proof(scheme, g, p).is_ok_and(|(labels, global)| ev.all_accept(&labels, global))
            });
            return Ok(SearchOutcome { mode: SearchMode::Structured, space: space.len() as u128, witness: witness.cloned() });
        }
    }
    if let Some((samples, seed)) = opts.sampling {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let (w, l) = subspaces[rng.gen_range(0..subspaces.len())];
            let labels: Vec<Bits> = match regime {
                Regime::Global => Vec::new(),
                _ => (0..n).map(|_| random_bits(&mut rng, w)).collect(),
            };
            let global = (regime != Regime::Local).then(|| random_bits(&mut rng, l));
            if ev.all_accept(&labels, global.as_ref()) {
                return Ok(SearchOutcome {
                    mode: SearchMode::Sampled,
                    space: samples as u128,
                    witness: Some(build_proof(regime, g, w, &labels, global)),
                });
            }
        }
        return Ok(SearchOutcome { mode: SearchMode::Sampled, space: samples as u128, witness: None });
    }
    Err(HarnessError::BudgetTooLarge { log2: largest })
}

fn random_bits(rng: &mut ChaCha8Rng, len: usize) -> Bits {
    Bits::from_words(len, (0..len.div_ceil(64)).map(|_| rng.gen::<u64>()))
}

/// Depth-first search over one `(width, length)` subspace. The global part is
/// the most significant component, then labels from the highest id down, each
/// label counted up as a little-endian integer; so the first accepting
/// assignment found has the lowest index. A node's verifier runs as soon as
/// every label in its ball is fixed.
fn exhaustive(ev: &Evaluator, g: &Graph, regime: Regime, w: usize, l: usize) -> Option<(Vec<Bits>, Option<Bits>)> {
    let n = g.n();
    let has_local = regime != Regime::Global;
    let order: Vec<usize> = if has_local { (0..n).rev().collect() } else { Vec::new() };
    // step[i]: how many labels are fixed once node i has its label.
    let mut step = vec![0usize; n];
    for (k, &i) in order.iter().enumerate() {
        step[i] = k + 1;
    }
    let mut fire: Vec<Vec<usize>> = vec![Vec::new(); order.len() + 1];
    for (i, ball) in ev.balls().iter().enumerate() {
        let at = if has_local { ball.members().iter().map(|&m| step[m]).max().unwrap() } else { 0 };
        fire[at].push(i);
    }
    let mut labels = vec![Bits::zeros(w); if has_local { n } else { 0 }];
    let globals: Box<dyn Iterator<Item = Option<Bits>>> = if regime == Regime::Local {
        Box::new(std::iter::once(None))
    } else {
        Box::new((0u64..1 << l).map(move |v| Some(Bits::from_words(l, [v]))))
    };
    for global in globals {
        if !fire[0].iter().all(|&i| ev.decide(i, &labels, global.as_ref())) {
            continue;
        }
        if dfs(ev, &order, &fire, w, 0, &mut labels, global.as_ref()) {
            return Some((labels, global));
        }
    }
    None
}

fn dfs(ev: &Evaluator, order: &[usize], fire: &[Vec<usize>], w: usize, k: usize, labels: &mut [Bits], global: Option<&Bits>) -> bool {
    if k == order.len() {
        return true;
    }
    for v in 0u64..1 << w {
        labels[order[k]] = Bits::from_words(w, [v]);
        if fire[k + 1].iter().all(|&i| ev.decide(i, labels, global)) && dfs(ev, order, fire, w, k + 1, labels, global) {
            return true;
        }
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Outcome {
    Safe,
    Counterexample,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SoundnessReport {
    pub scheme: String,
    pub instance: GraphFile,
    pub budget: Budget,
    pub mode: SearchMode,
    pub space: u128,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<ProofFile>,
    #[serde(skip)]
    pub witness: Option<Proof>,
}

impl SoundnessReport {
    pub fn is_safe(&self) -> bool {
        self.outcome == Outcome::Safe
    }
}

/// Searches for a certificate that fools the verifier on a no-instance.
pub fn soundness_search(scheme: &dyn Scheme, g: &Graph, budget: &Budget, opts: &SearchOptions) -> Result<SoundnessReport, HarnessError> {
    if scheme.language().contains(g)? {
        return Err(HarnessError::NotANoInstance);
    }
    let found = search(scheme, g, budget, opts)?;
    if let Some(p) = &found.witness {
        debug_assert!(run_with_rule(scheme, g, p, opts.rule).is_ok_and(|o| o.accepted));
    }
    Ok(SoundnessReport {
        scheme: scheme.name(),
        instance: g.to_file(),
        budget: *budget,
        mode: found.mode,
        space: found.space,
        outcome: if found.witness.is_some() { Outcome::Counterexample } else { Outcome::Safe },
        counterexample: found.witness.as_ref().map(Proof::to_file),
        witness: found.witness,
    })
}

/// Whether some certificate within the budget makes every node accept.
/// Only exact searches (exhaustive or structured) can answer.
pub fn decide_nondet(scheme: &dyn Scheme, g: &Graph, budget: &Budget, opts: &SearchOptions) -> Result<bool, HarnessError> {
    let opts = SearchOptions { sampling: None, ..*opts };
    Ok(search(scheme, g, budget, &opts)?.witness.is_some())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletenessFailure {
    pub index: usize,
    pub instance: GraphFile,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletenessReport {
    pub scheme: String,
    pub yes_instances: usize,
    pub pass: bool,
    pub failures: Vec<CompletenessFailure>,
}

/// Runs the honest prover on every yes-instance of `instances`.
pub fn completeness(scheme: &dyn Scheme, instances: &[Graph]) -> Result<CompletenessReport, HarnessError> {
    let lang = scheme.language();
    // Outer `None`: not a yes-instance; inner `None`: accepted.
    let checked: Vec<Option<Option<CompletenessFailure>>> = instances
        .par_iter()
        .enumerate()
        .map(|(index, g)| -> Result<_, HarnessError> {
            if !lang.contains(g)? {
                return Ok(None);
            }
            let fail = |reason: String| Some(CompletenessFailure { index, instance: g.to_file(), reason });
            Ok(Some(match scheme.prove(g) {
                Err(e) => fail(format!("prover: {e}")),
                Ok(p) => {
                    let out = run(scheme, g, &p)?;
                    if out.accepted {
                        None
                    } else {
                        let ids: Vec<String> = out.rejecting().map(|id| id.to_string()).collect();
                        fail(format!("rejected by {}", ids.join(",")))
                    }
                }
            }))
        })
        .collect::<Result<_, _>>()?;
    let yes_instances = checked.iter().filter(|c| c.is_some()).count();
    let failures: Vec<_> = checked.into_iter().flatten().flatten().collect();
    Ok(CompletenessReport { scheme: scheme.name(), yes_instances, pass: failures.is_empty(), failures })
}

/// Soundness over every no-instance of `instances`; reports in input order.
pub fn soundness_corpus(
    scheme: &dyn Scheme,
    instances: &[Graph],
    budget: impl Fn(&Graph) -> Budget + Sync,
    opts: &SearchOptions,
) -> Result<Vec<SoundnessReport>, HarnessError> {
    let lang = scheme.language();
    let reports: Vec<Option<SoundnessReport>> = instances
        .par_iter()
        .map(|g| -> Result<_, HarnessError> {
            if lang.contains(g)? {
                return Ok(None);
            }
            soundness_search(scheme, g, &budget(g), opts).map(Some)
        })
        .collect::<Result<_, _>>()?;
    Ok(reports.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::StdLanguage;
    use crate::schemes::{AlwaysAccept, AmosGlobal, BipLocal, BipTable, StLocal};
    use crate::GraphBuilder;
    use std::sync::Arc;

    #[test]
    fn regime_mismatch() {
        let g = Graph::cycle(4);
        let p = Proof::Local(LocalProof::empty_for(&g));
        assert_eq!(
            run(&AmosGlobal::new(4), &g, &p),
            Err(HarnessError::RegimeMismatch { expected: Regime::Global, got: Regime::Local })
        );
    }

    #[test]
    fn amos_runs() {
        let s = AmosGlobal::new(4);
        let g = Graph::cycle(4).with_selection_mask(0b10);
        let out = run(&s, &g, &s.prove(&g).unwrap()).unwrap();
        assert!(out.accepted);
        assert_eq!(out.decisions.len(), 4);
        let two = Graph::cycle(4).with_selection_mask(0b101);
        let out = run(&s, &two, &Proof::Global(GlobalProof::new(Bits::from_uint(1, 3)))).unwrap();
        assert_eq!(out.rejecting().collect::<Vec<_>>(), vec![NodeId(3)]);
    }

    #[test]
    fn four_cycle_fully_selected_has_no_tree_certificate() {
        let mut b = GraphBuilder::new();
        for (u, v) in [(1, 2), (2, 3), (3, 4), (4, 1)] {
            b = b.edge(u, v).select(u, v);
        }
        let g = b.build().unwrap();
        let r = soundness_search(&StLocal::new(4), &g, &Budget::local(6), &SearchOptions::default()).unwrap();
        assert!(r.is_safe());
        assert_eq!(r.mode, SearchMode::Exhaustive);
    }

    #[test]
    fn five_cycle_has_no_coloring() {
        let r = soundness_search(&BipLocal, &Graph::cycle(5), &Budget::local(1), &SearchOptions::default()).unwrap();
        assert!(r.is_safe());
        assert_eq!(r.space, 1 + 32);
    }

    #[test]
    fn triangle_has_no_table() {
        let g = Graph::cycle(3).with_id_bound(8).unwrap();
        let r = soundness_search(&BipTable::new(8), &g, &Budget::global(8), &SearchOptions::default()).unwrap();
        assert!(r.is_safe());
    }

    #[test]
    fn always_accept_is_fooled_by_the_empty_proof() {
        let s = AlwaysAccept::new(Arc::new(StdLanguage::Alos), 1);
        let r = soundness_search(&s, &Graph::cycle(4), &Budget::local(0), &SearchOptions::default()).unwrap();
        assert_eq!(r.outcome, Outcome::Counterexample);
        assert_eq!(r.witness.unwrap(), Proof::Local(LocalProof::empty_for(&Graph::cycle(4))));
    }

    #[test]
    fn lowest_index_counterexample() {
        // Accepts iff the center's label is "1"; lowest index: every label "1".
        struct OneBit;
        impl Verifier for OneBit {
            fn radius(&self) -> usize {
                0
            }
            fn verify(&self, v: &View) -> bool {
                v.label(0).to_string() == "1"
            }
        }
        impl Scheme for OneBit {
            fn name(&self) -> String {
                "one-bit".into()
            }
            fn regime(&self) -> Regime {
                Regime::Local
            }
            fn language(&self) -> Arc<dyn crate::language::Language> {
                Arc::new(StdLanguage::NoneSelected)
            }
            fn prove(&self, _g: &Graph) -> Result<Proof, SchemeError> {
                unimplemented!()
            }
            fn shape(&self, _g: &Graph) -> crate::schemes::Shape {
                Default::default()
            }
        }
        let g = Graph::path(3).with_selection_mask(1);
        let r = soundness_search(&OneBit, &g, &Budget::local(2), &SearchOptions::default()).unwrap();
        let w = r.witness.unwrap();
        let labels: Vec<String> = w.local().unwrap().labels.values().map(|b| b.to_string()).collect();
        assert_eq!(labels, vec!["1", "1", "1"]);
    }

    #[test]
    fn decide_on_amos() {
        let s = AmosGlobal::new(7);
        let one = Graph::cycle(4).with_selection_mask(0b10).with_id_bound(7).unwrap();
        let two = Graph::cycle(4).with_selection_mask(0b101).with_id_bound(7).unwrap();
        let opts = SearchOptions::default();
        assert!(decide_nondet(&s, &one, &Budget::global(3), &opts).unwrap());
        assert!(!decide_nondet(&s, &two, &Budget::global(3), &opts).unwrap());
        assert!(!decide_nondet(&BipLocal, &Graph::cycle(3), &Budget::local(0), &opts).unwrap());
    }

    #[test]
    fn oversized_budget_needs_sampling() {
        let g = Graph::cycle(8);
        let s = crate::schemes::AlosLocal::new(8);
        let err = search(&s, &g, &Budget::exact(4, 0), &SearchOptions::default()).unwrap_err();
        assert_eq!(err, HarnessError::BudgetTooLarge { log2: 32 });
        let out = search(&s, &g, &Budget::exact(4, 0), &SearchOptions::sampled(1000, 3)).unwrap();
        assert_eq!(out.mode, SearchMode::Sampled);
        assert!(out.witness.is_none());
    }
}
