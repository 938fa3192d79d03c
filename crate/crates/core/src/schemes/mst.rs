//! Minimum spanning tree certified by a global list of the tree's edges.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::{require_member, Scheme, SchemeError, Shape, Verifier};
use crate::bits::{bits_for, Bits};
use crate::graph::Graph;
use crate::language::{Language, StdLanguage, UnionFind};
use crate::proof::{GlobalProof, Proof, Regime};
use crate::view::View;

/// One certificate entry: endpoints `u < v` and the edge weight.
pub type Entry = (u64, u64, u64);

/// Largest structured space handed to the soundness search.
const MAX_STRUCTURED: u64 = 1 << 20;

#[derive(Debug, Clone)]
pub struct MstGlobal {
    id_bits: usize,
    weight_bits: usize,
}

impl MstGlobal {
    pub fn new(id_bound: u64, weight_bound: u64) -> Self {
        MstGlobal { id_bits: bits_for(id_bound), weight_bits: bits_for(weight_bound) }
    }

    fn entry_bits(&self) -> usize {
        2 * self.id_bits + self.weight_bits
    }

    pub fn encode(&self, entries: &[Entry]) -> Bits {
        let mut b = Bits::new();
        for &(u, v, w) in entries {
            b.push_uint(u, self.id_bits);
            b.push_uint(v, self.id_bits);
            b.push_uint(w, self.weight_bits);
        }
        b
    }

    /// Check (a): fixed-width entries, `0 < u < v`, positive weights,
    /// strictly increasing by endpoints.
    pub fn decode(&self, bits: &Bits) -> Option<Vec<Entry>> {
        let e = self.entry_bits();
        if e == 0 || !bits.len().is_multiple_of(e) {
            return None;
        }
        let mut out: Vec<Entry> = Vec::with_capacity(bits.len() / e);
        for k in 0..bits.len() / e {
            let u = bits.read_uint(k * e, self.id_bits)?;
            let v = bits.read_uint(k * e + self.id_bits, self.id_bits)?;
            let w = bits.read_uint(k * e + 2 * self.id_bits, self.weight_bits)?;
            if u == 0 || u >= v || w == 0 {
                return None;
            }
            if out.last().is_some_and(|&(pu, pv, _)| (pu, pv) >= (u, v)) {
                return None;
            }
            out.push((u, v, w));
        }
        Some(out)
    }

    fn entries_of(&self, g: &Graph, edges: &[(usize, usize)]) -> Result<Vec<Entry>, SchemeError> {
        let mut out = Vec::new();
        for &(a, b) in edges {
            let (x, y) = (g.node(a).id.0, g.node(b).id.0);
            let w = g.edge_attr(a, b).unwrap().weight.unwrap_or(0);
            for (value, width) in [(x, self.id_bits), (y, self.id_bits), (w, self.weight_bits)] {
                if bits_for(value) > width {
                    return Err(SchemeError::FieldOverflow { value, width });
                }
            }
            out.push((x.min(y), x.max(y), w));
        }
        out.sort_unstable();
        Ok(out)
    }
}

/// The listed edges as a forest over identifiers; `None` if they contain a
/// cycle (check b) or do not form one connected tree (check c).
fn as_tree(entries: &[Entry]) -> Option<HashMap<u64, Vec<(u64, u64)>>> {
    let mut index: BTreeMap<u64, usize> = BTreeMap::new();
    for &(u, v, _) in entries {
        let k = index.len();
        index.entry(u).or_insert(k);
        let k = index.len();
        index.entry(v).or_insert(k);
    }
    let mut uf = UnionFind::new(index.len());
    for &(u, v, _) in entries {
        if !uf.union(index[&u], index[&v]) {
            return None;
        }
    }
    if !entries.is_empty() && index.len() != entries.len() + 1 {
        return None;
    }
    let mut adj: HashMap<u64, Vec<(u64, u64)>> = HashMap::new();
    for &(u, v, w) in entries {
        adj.entry(u).or_default().push((v, w));
        adj.entry(v).or_default().push((u, w));
    }
    Some(adj)
}

/// Weights along the tree path from `from` to `to`, if connected.
fn path_weights(adj: &HashMap<u64, Vec<(u64, u64)>>, from: u64, to: u64) -> Option<Vec<u64>> {
    let mut stack = vec![(from, 0u64, Vec::new())];
    while let Some((x, parent, ws)) = stack.pop() {
        if x == to {
            return Some(ws);
        }
        for &(y, w) in adj.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
            if y != parent {
                let mut next = ws.clone();
                next.push(w);
                stack.push((y, x, next));
            }
        }
    }
    None
}

impl Verifier for MstGlobal {
    fn radius(&self) -> usize {
        1
    }

    fn verify(&self, view: &View) -> bool {
        let Some(entries) = view.global().and_then(|b| self.decode(b)) else {
            return false;
        };
        let Some(tree) = as_tree(&entries) else {
            return false;
        };
        let c = view.center();
        let me = view.id(c).0;
        let nbrs = view.neighbors(c);
        if nbrs.is_empty() {
            return entries.is_empty();
        }
        let listed: HashMap<(u64, u64), u64> = entries.iter().map(|&(u, v, w)| ((u, v), w)).collect();
        // (d) listed edges at this node are real incident edges.
        for &(u, v, _) in &entries {
            if u == me || v == me {
                let other = if u == me { v } else { u };
                if !nbrs.iter().any(|&s| view.id(s).0 == other) {
                    return false;
                }
            }
        }
        let mut has_selected = false;
        for &s in nbrs {
            let other = view.id(s).0;
            let attr = view.edge(c, s).expect("incident edges are visible");
            let Some(weight) = attr.weight else { return false };
            let key = (me.min(other), me.max(other));
            match listed.get(&key) {
                // (d) selection marks and weights match the list.
                Some(&w) => {
                    if !attr.selected || w != weight {
                        return false;
                    }
                }
                None => {
                    if attr.selected {
                        return false;
                    }
                    // (f) cycle property for the non-tree edge.
                    match path_weights(&tree, me, other) {
                        Some(ws) if ws.iter().all(|&x| x < weight) => {}
                        _ => return false,
                    }
                }
            }
            has_selected |= attr.selected;
        }
        // (e)
        has_selected
    }
}

impl Scheme for MstGlobal {
    fn name(&self) -> String {
        "mst-global".into()
    }

    fn regime(&self) -> Regime {
        Regime::Global
    }

    fn language(&self) -> Arc<dyn Language> {
        Arc::new(StdLanguage::Mst)
    }

    fn prove(&self, g: &Graph) -> Result<Proof, SchemeError> {
        require_member(&StdLanguage::Mst, g)?;
        let entries = self.entries_of(g, &g.selected_edges())?;
        Ok(Proof::Global(GlobalProof::new(self.encode(&entries))))
    }

    fn shape(&self, g: &Graph) -> Shape {
        Shape { local_width: None, global_len: Some(g.n().saturating_sub(1) * self.entry_bits()) }
    }

    /// Every accepted list names real edges with their true weights and
    /// spans the graph, so it suffices to try every `(n-1)`-subset of edges.
    fn structured_space(&self, g: &Graph) -> Option<Vec<Proof>> {
        let edges = g.edges();
        let k = g.n().saturating_sub(1);
        if binomial(edges.len() as u64, k as u64) > MAX_STRUCTURED {
            return None;
        }
        let mut out = Vec::new();
        let mut pick = Vec::with_capacity(k);
        subsets(&edges, k, 0, &mut pick, &mut |s| {
            if let Ok(entries) = self.entries_of(g, s) {
                out.push(Proof::Global(GlobalProof::new(self.encode(&entries))));
            }
        });
        Some(out)
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut r: u64 = 1;
    for i in 0..k.min(n - k) {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

fn subsets<T: Copy>(items: &[T], k: usize, from: usize, pick: &mut Vec<T>, f: &mut impl FnMut(&[T])) {
    if pick.len() == k {
        f(pick);
        return;
    }
    for i in from..items.len() {
        if items.len() - i < k - pick.len() {
            break;
        }
        pick.push(items[i]);
        subsets(items, k, i + 1, pick, f);
        pick.pop();
    }
}
