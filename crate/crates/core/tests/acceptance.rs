//! End-to-end acceptance checks. Each test prints one `criterion N: pass|fail`
//! line straight to stderr so the verdicts show up even when output is captured.

use std::collections::BTreeSet;
use std::io::Write;
use std::sync::Arc;

use locver::ccbridge::{all_vectors, build_lf, compile_protocol, decide, extract_protocol, BoolFunction, NondetProtocol};
use locver::graph::Graph;
use locver::harness::corpus::{Corpus, Family, Inputs};
use locver::harness::report::{power_of_two_bound, size_report};
use locver::harness::{completeness, decide_nondet, run, soundness_search, Budget, SearchMode, SearchOptions};
use locver::language::{two_coloring, Language};
use locver::lowerbound::blocks::make_blocks;
use locver::lowerbound::coloring::{
    analyze_gc, balanced_probe, coloring_table, cycle_graph, honest_certificates, node_colors, CycleBank,
};
use locver::lowerbound::counting::{alternating_count, counting_bound, counting_bound_odd, min_local_width};
use locver::lowerbound::{fooling_attack, odd_cycle_attack, AttackConfig};
use locver::proof::Regime;
use locver::schemes::{AlwaysAccept, BipLocal, BipTable, LocalToGlobal, MstGlobal};
use locver::{build_scheme, Scheme, SchemeParams, StdLanguage};
use num_bigint::BigUint;
use petgraph::algo::min_spanning_tree;
use petgraph::data::Element;
use petgraph::graph::UnGraph;

type Check = Result<(), String>;

fn verdict(k: usize, result: Check) {
    let line = match &result {
        Ok(()) => format!("criterion {k}: pass\n"),
        Err(e) => format!("criterion {k}: fail ({e})\n"),
    };
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(result.is_ok(), "criterion {k}: {}", result.unwrap_err());
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---- 1: completeness and soundness over the corpus ----

const EXHAUSTIVE_LOG2: usize = 24;
const SAMPLES: u64 = 400;

fn corpus(family: Family, lo: usize, hi: usize, inputs: Inputs) -> Vec<Graph> {
    Corpus::new(family, lo, hi, inputs).generate()
}

fn standard_corpus(inputs: Inputs, connected_max: usize) -> Vec<Graph> {
    let mut graphs = corpus(Family::Cycles, 3, 8, inputs);
    graphs.extend(corpus(Family::Paths, 1, 8, inputs));
    graphs.extend(corpus(Family::Connected, 1, connected_max, inputs));
    graphs
}

fn weighted_corpus() -> Vec<Graph> {
    (0..500u64)
        .flat_map(|seed| {
            let n = 2 + (seed % 5) as usize;
            Corpus::new(Family::Connected, n, n, Inputs::Weighted { count: 1 }).seed(seed).generate()
        })
        .collect()
}

fn params(graphs: &[Graph]) -> SchemeParams {
    graphs.iter().map(SchemeParams::for_graph).fold(SchemeParams { id_bound: 1, weight_bound: 1 }, |a, b| SchemeParams {
        id_bound: a.id_bound.max(b.id_bound),
        weight_bound: a.weight_bound.max(b.weight_bound),
    })
}

/// Exhaustive search over the declared sizes when the space has at most
/// 2^24 certificates, then the scheme's structured space, then seeded
/// samples of certificates with exactly the declared sizes.
fn no_instance_is_safe(s: &dyn Scheme, g: &Graph, seed: u64) -> Result<SearchMode, String> {
    let declared = Budget::declared(s, g);
    let (w, l) = (declared.local_widths.1, declared.global_lens.1);
    let log2 = match s.regime() {
        Regime::Local => g.n() * w,
        Regime::Global => l,
        Regime::Mixed => g.n() * w + l,
    };
    let (budget, opts) = if log2 <= EXHAUSTIVE_LOG2 || s.structured_space(g).is_some() {
        (declared, SearchOptions::default())
    } else {
        (Budget::exact(w, l), SearchOptions::sampled(SAMPLES, seed))
    };
    let rep = soundness_search(s, g, &budget, &opts).map_err(|e| e.to_string())?;
    if rep.is_safe() {
        Ok(rep.mode)
    } else {
        Err(format!("{} fooled on {}", s.name(), g.to_json()))
    }
}

fn suite(name: &str, graphs: &[Graph]) -> Result<[usize; 3], String> {
    let s = build_scheme(name, &params(graphs)).map_err(|e| e.to_string())?;
    let rep = completeness(s.as_ref(), graphs).map_err(|e| e.to_string())?;
    ensure(rep.pass, || format!("{name}: completeness failures {:?}", rep.failures.first()))?;
    ensure(rep.yes_instances > 0, || format!("{name}: no yes-instances"))?;
    let lang = s.language();
    let mut modes = [0usize; 3];
    for (i, g) in graphs.iter().enumerate() {
        if lang.contains(g).map_err(|e| e.to_string())? {
            continue;
        }
        modes[match no_instance_is_safe(s.as_ref(), g, i as u64)? {
            SearchMode::Exhaustive => 0,
            SearchMode::Structured => 1,
            SearchMode::Sampled => 2,
        }] += 1;
    }
    let _ = writeln!(
        std::io::stderr(),
        "  {name}: {} instances, {} yes, no-instances searched exhaustive/structured/sampled = {modes:?}",
        graphs.len(),
        rep.yes_instances
    );
    Ok(modes)
}

#[test]
fn criterion_1_scheme_correctness_suite() {
    let result = (|| -> Check {
        let selections = standard_corpus(Inputs::Selections, 6);
        for name in ["amos-global", "alos-local", "leader-mixed"] {
            suite(name, &selections)?;
        }
        suite("st-local", &standard_corpus(Inputs::EdgeMarks, 5))?;
        let plain = standard_corpus(Inputs::Plain, 6);
        for name in ["bip-local", "bip-table", "universal:odd-cycle"] {
            suite(name, &plain)?;
        }
        let modes = suite("mst-global", &weighted_corpus())?;
        ensure(modes[2] == 0, || "mst-global fell back to sampling".into())
    })();
    verdict(1, result);
}

// ---- 2: MST oracle ----

fn oracle_mst(g: &Graph) -> BTreeSet<(usize, usize)> {
    let mut pg = UnGraph::<(), u64>::new_undirected();
    let nodes: Vec<_> = (0..g.n()).map(|_| pg.add_node(())).collect();
    for (a, b) in g.edges() {
        pg.add_edge(nodes[a], nodes[b], g.edge_attr(a, b).unwrap().weight.unwrap());
    }
    min_spanning_tree(&pg)
        .filter_map(|e| match e {
            Element::Edge { source, target, .. } => Some((source.min(target), source.max(target))),
            Element::Node { .. } => None,
        })
        .collect()
}

#[test]
fn criterion_2_mst_matches_kruskal_oracle() {
    let result = (|| -> Check {
        let mut graphs = 0;
        for seed in 0..500u64 {
            let n = 2 + (seed % 7) as usize;
            for g in Corpus::new(Family::Connected, n, n, Inputs::Weighted { count: 1 }).seed(1000 + seed).generate() {
                graphs += 1;
                let s = MstGlobal::new(g.id_bound(), g.edges().len() as u64);
                let selected: BTreeSet<_> = g.selected_edges().into_iter().collect();
                let is_mst = selected == oracle_mst(&g);
                let honest = s.prove(&g).is_ok_and(|p| run(&s, &g, &p).is_ok_and(|o| o.accepted));
                ensure(honest == is_mst, || format!("seed {seed}: honest {honest} vs oracle {is_mst}"))?;
                if !is_mst {
                    let any = decide_nondet(&s, &g, &Budget::declared(&s, &g), &SearchOptions::default())
                        .map_err(|e| e.to_string())?;
                    ensure(!any, || format!("seed {seed}: a certificate accepts a non-minimum selection"))?;
                }
            }
        }
        ensure(graphs >= 500, || format!("only {graphs} graphs"))
    })();
    verdict(2, result);
}

// ---- 3: AMOS sizes ----

fn ceil_log2_plus_one(m: u64) -> usize {
    let mut bits = 0;
    while (1u128 << bits) < m as u128 + 1 {
        bits += 1;
    }
    bits
}

#[test]
fn criterion_3_amos_sizes_and_price_of_locality() {
    let result = (|| -> Check {
        let ns = [4, 8, 16, 32];
        let rows = size_report(StdLanguage::Amos, &ns, power_of_two_bound).map_err(|e| e.to_string())?;
        ensure(rows.len() == ns.len(), || "missing rows".into())?;
        for r in &rows {
            let m = r.id_bound;
            ensure(r.s_global == ceil_log2_plus_one(m), || format!("n={} s_g={} M={m}", r.n, r.s_global))?;
            ensure(r.s_local == ceil_log2_plus_one(m), || format!("n={} s_l={}", r.n, r.s_local))?;
            let pol = (r.n * r.s_local) as f64 / r.s_mixed as f64;
            ensure(pol >= r.n as f64 / 2.0 && pol <= 2.0 * r.n as f64, || format!("n={} pol={pol}", r.n))?;
        }
        Ok(())
    })();
    verdict(3, result);
}

// ---- 4: fooling attacks ----

#[test]
fn criterion_4_fooling_attacks_fire() {
    let result = (|| -> Check {
        let s = AlwaysAccept::new(Arc::new(StdLanguage::Alos), 1);
        let rep = fooling_attack(&s, &AttackConfig::new(2, 1, 0, 0)).map_err(|e| e.to_string())?;
        let cx = rep.counterexample.ok_or("no counterexample")?;
        ensure(cx.graph.n() == 6 && cx.graph.edge_count() == 6, || format!("graph {}", cx.graph.to_json()))?;
        ensure(cx.graph.selected_nodes().is_empty(), || "a node is selected".into())?;
        ensure(!StdLanguage::Alos.contains(&cx.graph).unwrap(), || "instance is in the language".into())?;
        let replay = run(&s, &cx.graph, &cx.proof).map_err(|e| e.to_string())?;
        ensure(replay.accepted, || "replay rejects".into())?;

        let odd = AlwaysAccept::new(Arc::new(StdLanguage::OddCycle), 1);
        let rep = odd_cycle_attack(&odd, &AttackConfig::new(2, 1, 0, 0)).map_err(|e| e.to_string())?;
        let cx = rep.counterexample.ok_or("no odd-cycle counterexample")?;
        ensure(cx.graph.n() % 2 == 0 && two_coloring(&cx.graph).is_some(), || "spliced cycle is not even".into())?;
        ensure(!StdLanguage::OddCycle.contains(&cx.graph).unwrap(), || "instance is an odd cycle".into())?;
        ensure(run(&odd, &cx.graph, &cx.proof).map_err(|e| e.to_string())?.accepted, || "odd replay rejects".into())
    })();
    verdict(4, result);
}

// ---- 5: counting bound ----

fn factorial_u128(n: u128) -> u128 {
    (1..=n).product()
}

#[test]
fn criterion_5_counting_thresholds() {
    let result = (|| -> Check {
        for b in 2..=12usize {
            let fact = factorial_u128(b as u128);
            let oracle = (0..).find(|&f: &usize| 3 * f * b >= 127 || (1u128 << (3 * f * b)) >= fact).unwrap();
            let got = min_local_width(b, 1, 0, false);
            ensure(got == oracle, || format!("b={b}: min f {got}, oracle {oracle}"))?;
            for f in 0..=2 {
                let below = 3 * f * b < 127 && (1u128 << (3 * f * b)) < fact;
                ensure(counting_bound(f, 0, b, 1) == below, || format!("b={b} f={f}"))?;
            }
            if b % 2 == 0 {
                let half = factorial_u128(b as u128 / 2);
                let alt = half * half;
                ensure(alternating_count(b) == BigUint::from(alt), || format!("b={b}: ((b/2)!)^2"))?;
                for g in 0..=12 {
                    let below = (1u128 << g) < alt;
                    ensure(counting_bound_odd(0, g, b, 1).unwrap() == below, || format!("odd b={b} g={g}"))?;
                }
            }
        }
        Ok(())
    })();
    verdict(5, result);
}

// ---- 6: coloring extraction ----

fn extraction(scheme: &dyn Scheme, m: usize) -> Check {
    let blocks = make_blocks(m - 1, 1).map_err(|e| e.to_string())?;
    let mut certs = honest_certificates(scheme, &blocks, m).map_err(|e| e.to_string())?;
    let probe: Vec<_> = balanced_probe(scheme, &blocks, m).map_err(|e| e.to_string())?.into_iter().map(|(_, c)| c).collect();
    certs.extend(probe.iter().cloned());
    let bank = CycleBank::new(scheme, &blocks, m).map_err(|e| e.to_string())?;
    for c in &certs {
        let gc = bank.gc(c);
        let a = analyze_gc(&gc);
        ensure(a.no_odd_directed_cycle && a.components_strongly_connected, || format!("{}: G_c checks fail", scheme.name()))?;
        let f = a.coloring.ok_or("no coloring")?;
        for cycle in &gc.accepted {
            let h = cycle_graph(&blocks, cycle).map_err(|e| e.to_string())?;
            let colors = node_colors(&f, &blocks, cycle);
            let color_of = |id: u64| colors.iter().find(|x| x.0 == id).map(|x| x.1).unwrap();
            for (u, v) in h.edges() {
                ensure(color_of(h.node(u).id.0) != color_of(h.node(v).id.0), || format!("{}: improper coloring", scheme.name()))?;
            }
        }
    }
    let table = coloring_table(scheme, &probe, &blocks, m).map_err(|e| e.to_string())?;
    ensure(table.columns_distinct(), || format!("{}: equal columns {:?}", scheme.name(), table.equal_columns()))
}

#[test]
fn criterion_6_coloring_extraction() {
    let result = (|| -> Check {
        let m = 6;
        let bound = (m * 3) as u64;
        extraction(&BipTable::new(bound), m)?;
        extraction(&LocalToGlobal::new(Arc::new(BipLocal), bound, 1), m)
    })();
    verdict(6, result);
}

// ---- 7: communication complexity bridge ----

#[test]
fn criterion_7_cc_round_trip() {
    let result = (|| -> Check {
        for n in 1..=4 {
            let t = 1;
            let zero = vec![false; n];
            let bound = build_lf(n, t, &zero, &zero).map_err(|e| e.to_string())?.graph.id_bound();
            let s = compile_protocol(BoolFunction::Neq.protocol(n), BoolFunction::Neq, bound).map_err(|e| e.to_string())?;
            for x in all_vectors(n) {
                for y in all_vectors(n) {
                    let g = build_lf(n, t, &x, &y).map_err(|e| e.to_string())?.graph;
                    let got = decide_nondet(&s, &g, &Budget::declared(&s, &g), &SearchOptions::default())
                        .map_err(|e| e.to_string())?;
                    ensure(got == (x != y), || format!("compiled n={n} x={x:?} y={y:?}"))?;
                }
            }
        }
        for n in 1..=3 {
            let t = 2;
            let zero = vec![false; n];
            let bound = build_lf(n, t, &zero, &zero).map_err(|e| e.to_string())?.graph.id_bound();
            let inner = Arc::new(
                compile_protocol(BoolFunction::Neq.protocol(n), BoolFunction::Neq, bound).map_err(|e| e.to_string())?,
            );
            let width = inner.layout().width();
            let global: Arc<dyn Scheme> = Arc::new(LocalToGlobal::new(inner, bound, width));
            let p = extract_protocol(global, n, t).map_err(|e| e.to_string())?;
            ensure(p.n() == n, || "input length".into())?;
            for x in all_vectors(n) {
                for y in all_vectors(n) {
                    let got = decide(&p, &x, &y).map_err(|e| e.to_string())?;
                    ensure(got == (x != y), || format!("extracted n={n} x={x:?} y={y:?}"))?;
                }
            }
        }
        Ok(())
    })();
    verdict(7, result);
}

// ---- 8: size chain ----

#[test]
fn criterion_8_size_chain_after_conversions() {
    let result = (|| -> Check {
        let langs = [
            StdLanguage::Amos,
            StdLanguage::Alos,
            StdLanguage::Leader,
            StdLanguage::SpanningTree,
            StdLanguage::Mst,
            StdLanguage::Bipartite,
            StdLanguage::OddCycle,
        ];
        for lang in langs {
            let ns: Vec<usize> = (2..=8).collect();
            let rows = size_report(lang, &ns, power_of_two_bound).map_err(|e| format!("{lang}: {e}"))?;
            ensure(!rows.is_empty(), || format!("{lang}: no rows"))?;
            for r in &rows {
                let n = r.n;
                let id_bits = ceil_log2_plus_one(r.id_bound);
                ensure(r.s_local <= r.s_mixed, || format!("{lang} n={n}: s_l > s_m"))?;
                ensure(r.s_mixed <= r.s_global, || format!("{lang} n={n}: s_m > s_g"))?;
                ensure(r.s_mixed <= n * r.s_local, || format!("{lang} n={n}: s_m > n s_l"))?;
                ensure(r.s_global <= n * r.s_local + n * id_bits, || format!("{lang} n={n}: s_g too large"))?;
            }
        }
        Ok(())
    })();
    verdict(8, result);
}
