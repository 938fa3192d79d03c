//! Spanning tree given by selected edges: each node holds the root's id and
//! its depth in the tree.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use super::{require_member, Scheme, SchemeError, Shape, Verifier};
use crate::bits::{bits_for, Bits};
use crate::graph::Graph;
use crate::language::{Language, StdLanguage};
use crate::proof::{LocalProof, Proof, Regime};
use crate::view::View;

#[derive(Debug, Clone)]
pub struct StLocal {
    id_bits: usize,
}

impl StLocal {
    pub fn new(id_bound: u64) -> Self {
        StLocal { id_bits: bits_for(id_bound) }
    }

    fn parse(&self, label: &Bits) -> Option<(u64, u64)> {
        if label.len() < self.id_bits || label.len() - self.id_bits > 64 {
            return None;
        }
        Some((label.read_uint(0, self.id_bits)?, label.read_uint(self.id_bits, label.len() - self.id_bits)?))
    }
}

impl Verifier for StLocal {
    fn radius(&self) -> usize {
        1
    }

    fn verify(&self, view: &View) -> bool {
        let c = view.center();
        let own = view.label(c);
        let Some((root, dist)) = self.parse(own) else {
            return false;
        };
        if dist == 0 && root != view.id(c).0 {
            return false;
        }
        let mut parents = 0;
        for &s in view.neighbors(c) {
            let l = view.label(s);
            if l.len() != own.len() {
                return false;
            }
            let Some((r, d)) = self.parse(l) else { return false };
            if r != root {
                return false;
            }
            if view.edge(c, s).is_some_and(|e| e.selected) {
                if d.abs_diff(dist) != 1 {
                    return false;
                }
                if d + 1 == dist {
                    parents += 1;
                }
            }
        }
        dist == 0 || parents == 1
    }
}

impl Scheme for StLocal {
    fn name(&self) -> String {
        "st-local".into()
    }

    fn regime(&self) -> Regime {
        Regime::Local
    }

    fn language(&self) -> Arc<dyn Language> {
        Arc::new(StdLanguage::SpanningTree)
    }

    fn prove(&self, g: &Graph) -> Result<Proof, SchemeError> {
        require_member(&StdLanguage::SpanningTree, g)?;
        let dist_bits = bits_for(g.n() as u64);
        let root_id = g.node(0).id.0;
        let mut dist = vec![None; g.n()];
        dist[0] = Some(0u64);
        let mut queue = VecDeque::from([0]);
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                if dist[w].is_none() && g.edge_attr(u, w).unwrap().selected {
                    dist[w] = Some(dist[u].unwrap() + 1);
                    queue.push_back(w);
                }
            }
        }
        let labels: BTreeMap<_, _> = (0..g.n())
            .map(|i| {
                let mut l = Bits::from_uint(root_id, self.id_bits);
                l.push_uint(dist[i].expect("spanning tree reaches every node"), dist_bits);
                (g.node(i).id, l)
            })
            .collect();
        Ok(Proof::Local(LocalProof::new(self.id_bits + dist_bits, labels)))
    }

    fn shape(&self, g: &Graph) -> Shape {
        Shape { local_width: Some(self.id_bits + bits_for(g.n() as u64)), global_len: None }
    }
}
