use std::sync::Arc;

use locver::harness::{run, Evaluator};
use locver::language::Language;
use locver::lowerbound::blocks::{BlockFamily, LabeledBlock, Variant};
use locver::lowerbound::coloring::{
    balanced_probe, block_cycles, colors_cycle, cycle_graph, honest_certificates, node_colors, CycleBank,
};
use locver::lowerbound::counting::{alternating_count, certificate_classes, factorial};
use locver::lowerbound::*;
use locver::proof::Regime;
use locver::schemes::alos::AlosLocal;
use locver::schemes::{AlwaysAccept, BipLocal, BipTable, LocalToGlobal, Scheme, Universal};
use locver::{Bits, StdLanguage, ViewRule};

fn always(lang: StdLanguage) -> AlwaysAccept {
    AlwaysAccept::new(Arc::new(lang), 1)
}

fn check_counterexample(report: &AttackReport, lang: StdLanguage) {
    let cx = report.counterexample.as_ref().expect("attack fires");
    assert!(cx.accepted);
    assert!(!cx.in_language);
    let replay = run(&always(lang), &cx.graph, &cx.proof).unwrap();
    assert!(replay.accepted);
    assert!(!lang.contains(&cx.graph).unwrap());
    assert!(cx.spliced_cycle.len() >= 2 * (2 * report.config.r + 1));
}

#[test]
fn always_accept_is_fooled_for_every_variant() {
    for lang in [StdLanguage::Alos, StdLanguage::Leader, StdLanguage::SpanningTree] {
        let report = fooling_attack(&always(lang), &AttackConfig::new(2, 1, 0, 0)).unwrap();
        assert_eq!(report.pigeonhole_guaranteed, Some(true));
        check_counterexample(&report, lang);
        let cx = report.counterexample.unwrap();
        assert_eq!(cx.spliced_cycle, vec![1, 2, 3, 4, 5, 6]);
        assert!(cx.graph.selected_nodes().is_empty());
    }
}

#[test]
fn spanning_tree_splice_selects_every_edge() {
    let report = fooling_attack(&always(StdLanguage::SpanningTree), &AttackConfig::new(3, 1, 0, 0)).unwrap();
    let cx = report.counterexample.unwrap();
    assert_eq!(cx.graph.selected_edges().len(), cx.graph.n());
}

#[test]
fn odd_cycle_attack_yields_even_cycle() {
    let report = odd_cycle_attack(&always(StdLanguage::OddCycle), &AttackConfig::new(2, 1, 0, 0)).unwrap();
    check_counterexample(&report, StdLanguage::OddCycle);
    let cx = report.counterexample.unwrap();
    assert_eq!(cx.graph.n() % 2, 0);
    assert_eq!(cx.spliced_cycle.len(), 6);
}

#[test]
fn odd_cycle_attack_needs_even_b() {
    assert!(matches!(
        odd_cycle_attack(&always(StdLanguage::OddCycle), &AttackConfig::new(3, 1, 0, 0)),
        Err(LowerBoundError::InvalidParameters(_))
    ));
}

#[test]
fn exact_schemes_are_not_fooled() {
    for b in 2..=4 {
        let m = ((b + 1) * 3) as u64;
        let report = fooling_attack(&AlosLocal::new(m), &AttackConfig::honest(b, 1)).unwrap();
        assert!(report.completeness_failures.is_empty());
        assert!(!report.found(), "alos-local b={b}");
    }
    for b in [2, 4] {
        let universal = Universal::new(Arc::new(StdLanguage::OddCycle));
        let report = odd_cycle_attack(&universal, &AttackConfig::honest(b, 1)).unwrap();
        assert!(report.completeness_failures.is_empty());
        assert!(!report.found(), "universal b={b}");
    }
}

#[test]
fn truncated_alos_attack_is_consistent() {
    let scheme = AlosLocal::with_widths(0, 1);
    for b in 2..=5 {
        let report = fooling_attack(&scheme, &AttackConfig::new(b, 1, 1, 0)).unwrap();
        assert_eq!(report.permutations, (1..=b).product::<usize>());
        assert_eq!(report.accepted_instances + report.completeness_failures.len(), report.permutations);
        if let Some(cx) = &report.counterexample {
            assert!(cx.accepted && !cx.in_language);
        }
    }
}

#[test]
fn harvested_labels_replay_on_the_full_instance() {
    // Whatever labeling the block graph picks for C_π must be accepted when
    // laid out on C_π itself.
    let scheme = AlosLocal::with_widths(0, 3);
    let fam = BlockFamily::new(2, 1, Variant::Alos).unwrap();
    let bg = build_block_graph(&scheme, Regime::Local, &fam, 3, None).unwrap();
    for perm in [[0, 1], [1, 0]] {
        let order = [perm[0], perm[1], 2];
        let ls = bg.accepting_cycle(&order).expect("complete at width 3");
        let vertices: Vec<usize> = order.iter().zip(&ls).map(|(&k, &l)| bg.vertex(k, l)).collect();
        let (_, labels) = bg.fragment(&fam, &vertices).unwrap();
        let g = fam.instance(&perm).unwrap().graph;
        let ev = Evaluator::new(&g, &scheme, ViewRule::Strict);
        assert!(ev.all_accept(&labels, None));
    }
}

/// Every path of the block graph, laid out as a path graph, is accepted at
/// all nodes at least `r` away from both ends.
#[test]
fn path_fragments_accept_away_from_the_ends() {
    let scheme = AlosLocal::with_widths(0, 2);
    let fam = BlockFamily::new(3, 1, Variant::Alos).unwrap();
    let bg = build_block_graph(&scheme, Regime::Local, &fam, 2, None).unwrap();
    let n = bg.vertex_count();
    let mut checked = 0;
    let mut stack: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    while let Some(path) = stack.pop() {
        if path.len() >= 2 {
            let (g, labels) = bg.fragment(&fam, &path).unwrap();
            let ev = Evaluator::new(&g, &scheme, ViewRule::Strict);
            let order: Vec<u64> = path.iter().flat_map(|&v| fam.blocks[v / bg.per_block].ids()).collect();
            for &id in &order[1..order.len() - 1] {
                let i = g.index_of(locver::NodeId(id)).unwrap();
                assert!(ev.decide(i, &labels, None), "path {path:?} node {id}");
            }
            checked += 1;
        }
        if path.len() < 4 {
            let last = *path.last().unwrap();
            for v in 0..n {
                let used = path.iter().any(|&u| u / bg.per_block == v / bg.per_block);
                if !used && bg.has_arc(last, v) {
                    let mut p = path.clone();
                    p.push(v);
                    stack.push(p);
                }
            }
        }
    }
    assert!(checked > 100, "{checked}");
}

/// Context beyond the two blocks never changes the decisions near a junction.
#[test]
fn padding_does_not_change_junctions() {
    let scheme = AlosLocal::with_widths(0, 2);
    let fam = BlockFamily::new(3, 1, Variant::Alos).unwrap();
    let bg = build_block_graph(&scheme, Regime::Local, &fam, 2, None).unwrap();
    let p = bg.per_block;
    for la in 0..p {
        for lb in 0..p {
            let path = [bg.vertex(2, 5), bg.vertex(0, la), bg.vertex(1, lb), bg.vertex(3, 3)];
            let (g, labels) = bg.fragment(&fam, &path).unwrap();
            let ev = Evaluator::new(&g, &scheme, ViewRule::Strict);
            let near_ok = [2u64, 3, 4, 5]
                .iter()
                .all(|&id| ev.decide(g.index_of(locver::NodeId(id)).unwrap(), &labels, None));
            let a = LabeledBlock::from_index(0, 3, 2, la as u64);
            let b = LabeledBlock::from_index(1, 3, 2, lb as u64);
            assert_eq!(near_ok, junction_accepts(&scheme, Regime::Local, &fam, &a, &b, None).unwrap());
            assert_eq!(near_ok, bg.has_arc(bg.vertex(0, la), bg.vertex(1, lb)));
        }
    }
}

#[test]
fn counting_bound_matches_direct_multiplication() {
    for b in 2..=12usize {
        let fact: u128 = (1..=b as u128).product();
        assert_eq!(factorial(b), fact.into());
        let min_f = (0..).find(|&f: &u32| 1u128 << (3 * f as usize * b) >= fact).unwrap() as usize;
        assert_eq!(min_local_width(b, 1, 0, false), min_f);
        for f in 0..3 {
            assert_eq!(counting_bound(f, 0, b, 1), (1u128 << (3 * f * b)) < fact);
        }
        if b % 2 == 0 {
            let half: u128 = (1..=(b / 2) as u128).product();
            assert_eq!(alternating_count(b), (half * half).into());
            for g in 0..8 {
                assert_eq!(counting_bound_odd(0, g, b, 1).unwrap(), (1u128 << g) < half * half);
            }
        }
    }
    assert_eq!(certificate_classes(1, 2, 3, 1), (1u128 << 11).into());
}

fn lifted_bip_local(m: u64) -> LocalToGlobal {
    LocalToGlobal::new(Arc::new(BipLocal), m, 1)
}

#[test]
fn honest_certificates_color_their_cycles() {
    let blocks = make_blocks(3, 1).unwrap();
    let table = BipTable::new(12);
    let lifted = lifted_bip_local(12);
    let schemes: [&dyn Scheme; 2] = [&table, &lifted];
    for scheme in schemes {
        let bank = CycleBank::new(scheme, &blocks, 4).unwrap();
        for cycle in block_cycles(4, 4).into_iter().filter(|c| c.len() % 2 == 0) {
            let g = cycle_graph(&blocks, &cycle).unwrap();
            let c = scheme.prove(&g).unwrap().global().unwrap().bits.clone();
            let gc = bank.gc(&c);
            for k in 0..cycle.len() {
                assert!(gc.arcs.contains(&(cycle[k], cycle[(k + 1) % cycle.len()])));
            }
            let honest = locver::language::two_coloring(&g).unwrap();
            for &(u, v) in &gc.arcs {
                // The honest coloring of the first node of each block.
                let cu = honest[g.index_of(locver::NodeId(blocks[u].first_id())).unwrap_or(0)];
                let cv = honest[g.index_of(locver::NodeId(blocks[v].first_id())).unwrap_or(0)];
                if cycle.contains(&u) && cycle.contains(&v) {
                    assert_ne!(cu, cv, "{}: arc {u}->{v}", scheme.name());
                }
            }
            let a = analyze_gc(&gc);
            assert!(a.no_odd_directed_cycle && a.components_strongly_connected);
            let f = a.coloring.unwrap();
            for acc in &gc.accepted {
                assert!(colors_cycle(&f, acc));
                let h = cycle_graph(&blocks, acc).unwrap();
                let nodes = node_colors(&f, &blocks, acc);
                for (a, b) in h.edges() {
                    let ca = nodes.iter().find(|x| x.0 == h.node(a).id.0).unwrap().1;
                    let cb = nodes.iter().find(|x| x.0 == h.node(b).id.0).unwrap().1;
                    assert_ne!(ca, cb);
                }
            }
        }
    }
}

/// Every table certificate over four blocks, not only honest ones.
#[test]
fn every_table_certificate_yields_a_coloring() {
    let blocks = make_blocks(3, 1).unwrap();
    let table = BipTable::new(12);
    let bank = CycleBank::new(&table, &blocks, 4).unwrap();
    let mut nonempty = 0;
    for x in 0u64..1 << 12 {
        let c = Bits::from_bools(&(0..12).map(|i| x >> i & 1 == 1).collect::<Vec<_>>());
        let gc = bank.gc(&c);
        let a = analyze_gc(&gc);
        assert!(a.no_odd_directed_cycle && a.components_strongly_connected, "certificate {c}");
        let f = a.coloring.unwrap();
        assert!(gc.accepted.iter().all(|cyc| colors_cycle(&f, cyc)));
        nonempty += !gc.arcs.is_empty() as usize;
    }
    assert!(nonempty > 0);
}

#[test]
fn table_rows_cover_balanced_strings_and_columns_differ() {
    let blocks = make_blocks(5, 1).unwrap();
    let table = BipTable::new(18);
    let probe = balanced_probe(&table, &blocks, 6).unwrap();
    let certs: Vec<Bits> = probe.iter().map(|(_, c)| c.clone()).collect();
    let t = coloring_table(&table, &certs, &blocks, 6).unwrap();
    assert!(t.missing_balanced(6).is_empty());
    assert!(t.columns_distinct());
    for ((s, _), row) in probe.iter().zip(&t.rows) {
        let comp: Vec<bool> = s.iter().map(|b| !b).collect();
        assert!(row == s || *row == comp);
    }
}

#[test]
fn honest_certificate_count() {
    let blocks = make_blocks(3, 1).unwrap();
    let certs = honest_certificates(&BipTable::new(12), &blocks, 4).unwrap();
    // C(4,2) two-block cycles and 3! / 1 orderings of four blocks.
    assert_eq!(certs.len(), 6 + 6);
}
