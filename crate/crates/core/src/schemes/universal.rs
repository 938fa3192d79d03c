//! The universal local scheme: every node holds a full description of the
//! graph and checks it against what it sees.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{require_connected, require_member, Scheme, SchemeError, Shape, Verifier};
use crate::bits::{bits_for, push_gamma, read_gamma, Bits};
use crate::graph::{Graph, GraphBuilder};
use crate::language::Language;
use crate::proof::{LocalProof, Proof, Regime};
use crate::view::View;

/// Largest number of node pairs for which the structured space is built.
const MAX_STRUCTURED_PAIRS: usize = 21;

/// Self-delimiting graph description.
///
/// Layout: `gamma(n)`; per node in id order `gamma(id)`, `gamma(|input|+1)`,
/// input bits; one adjacency bit per node pair (pairs ordered by the larger
/// position, then the smaller); one selection bit per pair; a weight flag and,
/// if set, `gamma(w)` followed by a `w`-bit weight per pair (0 for non-edges).
/// The length depends only on the nodes, their inputs and the weight width.
pub fn encode_graph(g: &Graph) -> Bits {
    let ww = g
        .edges()
        .into_iter()
        .filter_map(|(a, b)| g.edge_attr(a, b).unwrap().weight)
        .max()
        .map(bits_for);
    encode_with_weight_width(g, ww)
}

fn encode_with_weight_width(g: &Graph, ww: Option<usize>) -> Bits {
    let n = g.n();
    let mut b = Bits::new();
    push_gamma(&mut b, n as u64);
    for r in g.nodes() {
        push_gamma(&mut b, r.id.0);
        push_gamma(&mut b, r.input.len() as u64 + 1);
        b.extend_from(&r.input);
    }
    let pairs: Vec<(usize, usize)> = (1..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    for &(i, j) in &pairs {
        b.push(g.edge_attr(i, j).is_some());
    }
    for &(i, j) in &pairs {
        b.push(g.edge_attr(i, j).is_some_and(|e| e.selected));
    }
    match ww {
        Some(ww) if ww > 0 => {
            b.push(true);
            push_gamma(&mut b, ww as u64);
            for &(i, j) in &pairs {
                b.push_uint(g.edge_attr(i, j).and_then(|e| e.weight).unwrap_or(0), ww);
            }
        }
        _ => b.push(false),
    }
    b
}

/// Inverse of [`encode_graph`]; `None` on any malformed or inconsistent input.
pub fn decode_graph(bits: &Bits) -> Option<Graph> {
    let mut pos = 0;
    let n = read_gamma(bits, &mut pos)? as usize;
    if n > bits.len() {
        return None;
    }
    let mut ids = Vec::with_capacity(n);
    let mut builder = GraphBuilder::new();
    for _ in 0..n {
        let id = read_gamma(bits, &mut pos)?;
        if ids.last().is_some_and(|&p| p >= id) {
            return None;
        }
        let len = read_gamma(bits, &mut pos)? as usize - 1;
        let input = bits.slice(pos, len)?;
        pos += len;
        ids.push(id);
        builder = builder.node(id, input);
    }
    let pairs: Vec<(usize, usize)> = (1..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    let take = |pos: &mut usize| -> Option<bool> {
        let b = (*pos < bits.len()).then(|| bits.get(*pos))?;
        *pos += 1;
        Some(b)
    };
    let mut present = Vec::with_capacity(pairs.len());
    for &(i, j) in &pairs {
        let e = take(&mut pos)?;
        if e {
            builder = builder.edge(ids[i], ids[j]);
        }
        present.push(e);
    }
    for (k, &(i, j)) in pairs.iter().enumerate() {
        if take(&mut pos)? {
            if !present[k] {
                return None;
            }
            builder = builder.select(ids[i], ids[j]);
        }
    }
    if take(&mut pos)? {
        let ww = read_gamma(bits, &mut pos)? as usize;
        if ww > 64 {
            return None;
        }
        for (k, &(i, j)) in pairs.iter().enumerate() {
            let w = bits.read_uint(pos, ww)?;
            pos += ww;
            match (present[k], w) {
                (true, 0) => return None,
                (true, w) => builder = builder.weight(ids[i], ids[j], w),
                (false, 0) => {}
                (false, _) => return None,
            }
        }
    }
    if pos != bits.len() {
        return None;
    }
    builder.build().ok()
}

pub struct Universal {
    lang: Arc<dyn Language>,
}

impl Universal {
    pub fn new(lang: Arc<dyn Language>) -> Self {
        Universal { lang }
    }
}

impl Verifier for Universal {
    fn radius(&self) -> usize {
        1
    }

    fn verify(&self, view: &View) -> bool {
        let c = view.center();
        let own = view.label(c);
        if view.neighbors(c).iter().any(|&s| view.label(s) != own) {
            return false;
        }
        let Some(h) = decode_graph(own) else { return false };
        if !h.is_connected() {
            return false;
        }
        let Some(me) = h.index_of(view.id(c)) else { return false };
        if h.node(me).input != *view.input(c) {
            return false;
        }
        let seen: BTreeSet<_> = view.neighbors(c).iter().map(|&s| view.id(s)).collect();
        let claimed: BTreeSet<_> = h.neighbors(me).iter().map(|&j| h.node(j).id).collect();
        if seen != claimed {
            return false;
        }
        for &s in view.neighbors(c) {
            let j = h.index_of(view.id(s)).unwrap();
            if view.edge(c, s) != h.edge_attr(me, j) {
                return false;
            }
        }
        self.lang.contains(&h).unwrap_or(false)
    }
}

impl Scheme for Universal {
    fn name(&self) -> String {
        format!("universal:{}", self.lang.name())
    }

    fn regime(&self) -> Regime {
        Regime::Local
    }

    fn language(&self) -> Arc<dyn Language> {
        self.lang.clone()
    }

    fn prove(&self, g: &Graph) -> Result<Proof, SchemeError> {
        require_member(self.lang.as_ref(), g)?;
        require_connected(g)?;
        let enc = encode_graph(g);
        let labels: BTreeMap<_, _> = g.ids().map(|id| (id, enc.clone())).collect();
        Ok(Proof::Local(LocalProof::new(enc.len(), labels)))
    }

    fn shape(&self, g: &Graph) -> Shape {
        Shape { local_width: Some(encode_graph(g).len()), global_len: None }
    }

    /// Neighbors must hold equal labels, so on a connected graph an accepted
    /// labeling is uniform. This space gives every node the description of
    /// each graph on the same nodes and inputs (every edge subset, selection
    /// and weights taken from `g` where the edge exists).
    fn structured_space(&self, g: &Graph) -> Option<Vec<Proof>> {
        let n = g.n();
        let pairs: Vec<(usize, usize)> = (1..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
        if pairs.len() > MAX_STRUCTURED_PAIRS || (g.is_weighted() && !pairs.iter().all(|&(i, j)| g.edge_attr(i, j).is_some())) {
            return None;
        }
        let ww = g.is_weighted().then(|| {
            g.edges().into_iter().filter_map(|(a, b)| g.edge_attr(a, b).unwrap().weight).max().map_or(0, bits_for)
        });
        let mut out = Vec::with_capacity(1 << pairs.len());
        for mask in 0u64..1 << pairs.len() {
            let mut b = GraphBuilder::new();
            for r in g.nodes() {
                b = b.node(r.id.0, r.input.clone());
            }
            for (k, &(i, j)) in pairs.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    let (u, v) = (g.node(i).id.0, g.node(j).id.0);
                    b = b.edge(u, v);
                    if let Some(attr) = g.edge_attr(i, j) {
                        if attr.selected {
                            b = b.select(u, v);
                        }
                        if let Some(w) = attr.weight {
                            b = b.weight(u, v, w);
                        }
                    }
                }
            }
            let Ok(h) = b.build() else { continue };
            let enc = encode_with_weight_width(&h, ww);
            let labels: BTreeMap<_, _> = g.ids().map(|id| (id, enc.clone())).collect();
            out.push(Proof::Local(LocalProof::new(enc.len(), labels)));
        }
        Some(out)
    }
}
