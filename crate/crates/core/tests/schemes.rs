use std::collections::BTreeSet;
use std::sync::Arc;

use locver::graph::{Graph, GraphBuilder};
use locver::harness::run;
use locver::language::{two_coloring, Language};
use locver::proof::{Proof, Regime};
use locver::schemes::{AsMixed, BipLocal, LocalToGlobal, MixedToLocal};
use locver::{build_scheme, Bits, Scheme, SchemeParams, StdLanguage};
use proptest::prelude::*;

/// A connected graph on `n` nodes with ids drawn from `1..=2n`: a random
/// tree plus the extra edges chosen by `extra`.
fn arb_graph() -> impl Strategy<Value = Graph> {
    (1usize..=7).prop_flat_map(|n| {
        let parents = (1..n).map(|i| 0..i).collect::<Vec<_>>();
        let ids = Just((1..=2 * n as u64).collect::<Vec<_>>()).prop_shuffle();
        (parents, ids, any::<u32>(), any::<u8>()).prop_map(move |(parents, ids, extra, sel)| {
            let id = |i: usize| ids[i];
            let mut edges = BTreeSet::new();
            for (i, &p) in parents.iter().enumerate() {
                edges.insert((p, i + 1));
            }
            let mut k = 0;
            for j in 1..n {
                for i in 0..j {
                    if k < 32 && extra >> k & 1 == 1 {
                        edges.insert((i, j));
                    }
                    k += 1;
                }
            }
            let mut b = GraphBuilder::new();
            for i in 0..n {
                b = b.node(id(i), Bits::from_uint((sel >> (i % 8) & 1) as u64, 1));
            }
            for (i, j) in edges {
                b = b.edge(id(i), id(j));
            }
            b.build().unwrap()
        })
    })
}

fn conversions(s: Arc<dyn Scheme>, g: &Graph) -> Vec<Arc<dyn Scheme>> {
    let shape = s.shape(g);
    let mut out: Vec<Arc<dyn Scheme>> = vec![s.clone(), Arc::new(AsMixed::new(s.clone()))];
    match s.regime() {
        Regime::Local => out.push(Arc::new(LocalToGlobal::new(s.clone(), g.id_bound(), shape.local_width.unwrap()))),
        Regime::Global => out.push(Arc::new(MixedToLocal::new(s.clone(), 0))),
        Regime::Mixed => out.push(Arc::new(MixedToLocal::new(s.clone(), shape.local_width.unwrap()))),
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn honest_proofs_survive_every_conversion(g in arb_graph()) {
        let params = SchemeParams::for_graph(&g);
        for name in ["amos-global", "alos-local", "leader-mixed", "bip-local", "bip-table"] {
            let s: Arc<dyn Scheme> = Arc::from(build_scheme(name, &params).unwrap());
            let yes = s.language().contains(&g).unwrap();
            for c in conversions(s, &g) {
                match c.prove(&g) {
                    Ok(p) => {
                        prop_assert!(yes, "{} proved a no-instance", c.name());
                        prop_assert!(run(c.as_ref(), &g, &p).unwrap().accepted, "{}", c.name());
                    }
                    Err(_) => prop_assert!(!yes, "{} failed on a yes-instance", c.name()),
                }
            }
        }
    }

    #[test]
    fn graph_and_proof_files_round_trip(g in arb_graph()) {
        let back = Graph::from_json(&g.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), g.to_json());
        let s = build_scheme("leader-mixed", &SchemeParams::for_graph(&g)).unwrap();
        if let Ok(p) = s.prove(&g) {
            prop_assert_eq!(Proof::from_json(&p.to_json()).unwrap(), p);
        }
    }

    #[test]
    fn flipping_one_color_is_caught(g in arb_graph(), pick in any::<usize>()) {
        prop_assume!(g.edge_count() > 0 && two_coloring(&g).is_some());
        let Proof::Local(mut p) = BipLocal.prove(&g).unwrap() else { unreachable!() };
        let id = g.node(pick % g.n()).id;
        let flipped = Bits::from_uint(!p.labels[&id].get(0) as u64, 1);
        p.labels.insert(id, flipped);
        prop_assert!(!run(&BipLocal, &g, &Proof::Local(p)).unwrap().accepted);
    }

    #[test]
    fn amos_membership_matches_selection_count(g in arb_graph()) {
        let selected = g.selected_nodes().len();
        prop_assert_eq!(StdLanguage::Amos.contains(&g).unwrap(), selected <= 1);
        prop_assert_eq!(StdLanguage::Alos.contains(&g).unwrap(), selected >= 1);
        prop_assert_eq!(StdLanguage::Leader.contains(&g).unwrap(), selected == 1);
    }
}
