//! Achieved certificate sizes per regime and the price of locality.

use std::sync::Arc;

use crate::graph::{Graph, GraphBuilder};
use crate::language::StdLanguage;
use crate::proof::{price_of_locality, Proof, Regime, SizeReport};
use crate::schemes::{
    AlosLocal, AmosGlobal, AsMixed, BipLocal, BipTable, LeaderMixed, LocalToGlobal, MixedToLocal, MstGlobal, Scheme,
    SchemeParams, StLocal, Universal,
};

use super::{run, HarnessError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SizeError {
    #[error("no {0} scheme available for {1}")]
    NoScheme(Regime, String),
    #[error("{scheme} rejected its own converted certificate at n={n}")]
    Rejected { scheme: String, n: usize },
    #[error("size chain violated at n={n}: {detail}")]
    Chain { n: usize, detail: String },
    #[error(transparent)]
    Harness(#[from] HarnessError),
}

/// A yes-instance of `lang` on `n` nodes used for size measurements, or
/// `None` when the language has none of that size.
pub fn representative(lang: StdLanguage, n: usize) -> Option<Graph> {
    let n64 = n as u64;
    let base = if n >= 3 { Graph::cycle(n64) } else { Graph::path(n64.max(1)) };
    Some(match lang {
        StdLanguage::Amos | StdLanguage::Alos | StdLanguage::AlosPerComponent | StdLanguage::Leader => {
            base.with_selection_mask(1)
        }
        StdLanguage::NoneSelected => base,
        StdLanguage::SpanningTree | StdLanguage::Mst => {
            let mut b = GraphBuilder::new();
            for i in 1..=n64 {
                b = b.node(i, crate::Bits::from_uint(0, 1));
            }
            for i in 1..n64 {
                b = b.edge(i, i + 1).select(i, i + 1);
                if lang == StdLanguage::Mst {
                    b = b.weight(i, i + 1, i);
                }
            }
            if n >= 3 {
                b = b.edge(n64, 1);
                if lang == StdLanguage::Mst {
                    b = b.weight(n64, 1, n64);
                }
            }
            b.build().expect("representative is valid")
        }
        StdLanguage::Bipartite if n >= 3 && n % 2 == 1 => Graph::path(n64),
        StdLanguage::Bipartite => base,
        StdLanguage::OddCycle if n >= 3 && n % 2 == 1 => base,
        StdLanguage::OddCycle => return None,
    })
}

fn native_schemes(lang: StdLanguage, p: &SchemeParams) -> Vec<Arc<dyn Scheme>> {
    match lang {
        StdLanguage::Amos => vec![Arc::new(AmosGlobal::new(p.id_bound))],
        StdLanguage::Alos => vec![Arc::new(AlosLocal::new(p.id_bound))],
        StdLanguage::Leader => vec![Arc::new(LeaderMixed::new(p.id_bound))],
        StdLanguage::SpanningTree => vec![Arc::new(StLocal::new(p.id_bound))],
        StdLanguage::Mst => vec![Arc::new(MstGlobal::new(p.id_bound, p.weight_bound))],
        StdLanguage::Bipartite => vec![Arc::new(BipLocal), Arc::new(BipTable::new(p.id_bound))],
        other => vec![Arc::new(Universal::new(Arc::new(other)))],
    }
}

/// A certificate produced through a regime conversion, with the verifier
/// that accepted it.
#[derive(Debug, Clone)]
pub struct Measured {
    pub scheme: String,
    pub regime: Regime,
    pub size: usize,
}

/// Every native scheme for `lang` plus every regime conversion of it, each
/// proved and re-verified on `g`.
pub fn measure(lang: StdLanguage, g: &Graph) -> Result<Vec<Measured>, SizeError> {
    let params = SchemeParams::for_graph(g);
    let mut candidates: Vec<Arc<dyn Scheme>> = Vec::new();
    for s in native_schemes(lang, &params) {
        let shape = s.shape(g);
        candidates.push(s.clone());
        match s.regime() {
            Regime::Local => {
                candidates.push(Arc::new(LocalToGlobal::new(s.clone(), g.id_bound(), shape.local_width.unwrap())));
                candidates.push(Arc::new(AsMixed::new(s.clone())));
            }
            Regime::Global => {
                candidates.push(Arc::new(MixedToLocal::new(s.clone(), 0)));
                candidates.push(Arc::new(AsMixed::new(s.clone())));
            }
            Regime::Mixed => {
                let local: Arc<dyn Scheme> = Arc::new(MixedToLocal::new(s.clone(), shape.local_width.unwrap()));
                let width = local.shape(g).local_width.unwrap();
                candidates.push(local.clone());
                candidates.push(Arc::new(LocalToGlobal::new(local, g.id_bound(), width)));
            }
        }
    }
    let mut out = Vec::new();
    for s in candidates {
        let p: Proof = s.prove(g).map_err(HarnessError::from)?;
        if !run(s.as_ref(), g, &p)?.accepted {
            return Err(SizeError::Rejected { scheme: s.name(), n: g.n() });
        }
        let size = match &p {
            Proof::Local(l) => l.width,
            Proof::Global(gp) => gp.size(),
            Proof::Mixed(_) => p.total_size(g.n()),
        };
        out.push(Measured { scheme: s.name(), regime: s.regime(), size });
    }
    Ok(out)
}

/// One row per graph size; `id_bound` maps `n` to the identifier bound `M`.
pub fn size_report(lang: StdLanguage, ns: &[usize], id_bound: impl Fn(usize) -> u64) -> Result<Vec<SizeReport>, SizeError> {
    let mut rows = Vec::new();
    for &n in ns {
        let Some(g) = representative(lang, n) else { continue };
        let g = g.with_id_bound(id_bound(n).max(n as u64)).map_err(|e| SizeError::Chain { n, detail: e.to_string() })?;
        let measured = measure(lang, &g)?;
        let best = |r: Regime| {
            measured.iter().filter(|m| m.regime == r).map(|m| m.size).min().ok_or_else(|| SizeError::NoScheme(r, lang.to_string()))
        };
        let (s_local, s_global, s_mixed) = (best(Regime::Local)?, best(Regime::Global)?, best(Regime::Mixed)?);
        let pol = price_of_locality(s_local as u64, s_mixed.max(1) as u64, n as u64).expect("nonzero");
        let row = SizeReport { language: lang.to_string(), n, id_bound: g.id_bound(), s_local, s_global, s_mixed, pol };
        let violations = row.chain_violations();
        if !violations.is_empty() {
            return Err(SizeError::Chain { n, detail: violations.join("; ") });
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Smallest power of two at least `n`.
pub fn power_of_two_bound(n: usize) -> u64 {
    (n.max(1) as u64).next_power_of_two()
}
