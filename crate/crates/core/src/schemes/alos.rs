//! At least one selected node: `(root id, distance)` labels pointing down a
//! BFS tree toward a selected node. Also the leader-election mixed scheme,
//! which adds the leader's id as a global certificate.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{require_connected, require_member, Scheme, SchemeError, Shape, Verifier};
use crate::bits::{bits_for, Bits};
use crate::graph::Graph;
use crate::language::{Language, StdLanguage};
use crate::proof::{GlobalProof, LocalProof, MixedProof, Proof, Regime};
use crate::view::View;

fn low_bits(x: u64, width: usize) -> u64 {
    if width >= 64 {
        x
    } else {
        x & ((1u64 << width) - 1)
    }
}

/// Splits a label into `(root, dist)`; the distance takes the bits after the
/// root field.
fn parse(label: &Bits, id_bits: usize) -> Option<(u64, u64)> {
    if label.len() < id_bits || label.len() - id_bits > 64 {
        return None;
    }
    let root = label.read_uint(0, id_bits)?;
    let dist = label.read_uint(id_bits, label.len() - id_bits)?;
    Some((root, dist))
}

/// The distance-chain check. Returns the center's root field on success.
fn chain_check(view: &View, id_bits: usize) -> Option<u64> {
    let c = view.center();
    let own = view.label(c);
    let (root, dist) = parse(own, id_bits)?;
    let ok = if dist == 0 {
        view.is_selected(c) && root == low_bits(view.id(c).0, id_bits)
    } else {
        view.neighbors(c).iter().any(|&s| {
            let l = view.label(s);
            l.len() == own.len() && parse(l, id_bits) == Some((root, dist - 1))
        })
    };
    ok.then_some(root)
}

/// Honest labels: BFS distances from `root` (graph position), root id and
/// distance written on the given widths.
fn distance_labels(g: &Graph, root: usize, id_bits: usize, dist_bits: usize) -> Result<LocalProof, SchemeError> {
    let dist = g.distances(root);
    let root_field = low_bits(g.node(root).id.0, id_bits);
    let mut labels = BTreeMap::new();
    for (i, d) in dist.iter().enumerate() {
        let d = d.ok_or(SchemeError::Disconnected)? as u64;
        if bits_for(d) > dist_bits {
            return Err(SchemeError::FieldOverflow { value: d, width: dist_bits });
        }
        let mut l = Bits::from_uint(root_field, id_bits);
        l.push_uint(d, dist_bits);
        labels.insert(g.node(i).id, l);
    }
    Ok(LocalProof::new(id_bits + dist_bits, labels))
}

/// Local scheme for "at least one node is selected".
///
/// `dist == 0` requires the node to be selected with its own id as root;
/// `dist > 0` requires a neighbor with the same root and `dist - 1`.
#[derive(Debug, Clone)]
pub struct AlosLocal {
    id_bits: usize,
    dist_bits: Option<usize>,
}

impl AlosLocal {
    pub fn new(id_bound: u64) -> Self {
        AlosLocal { id_bits: bits_for(id_bound), dist_bits: None }
    }

    /// A variant with fixed, possibly too narrow fields. Roots are compared
    /// on the low `id_bits` bits of identifiers.
    pub fn with_widths(id_bits: usize, dist_bits: usize) -> Self {
        AlosLocal { id_bits, dist_bits: Some(dist_bits) }
    }

    fn dist_bits(&self, g: &Graph) -> usize {
        self.dist_bits.unwrap_or_else(|| bits_for(g.n() as u64))
    }
}

impl Verifier for AlosLocal {
    fn radius(&self) -> usize {
        1
    }

    fn verify(&self, view: &View) -> bool {
        chain_check(view, self.id_bits).is_some()
    }
}

impl Scheme for AlosLocal {
    fn name(&self) -> String {
        match self.dist_bits {
            None => "alos-local".into(),
            Some(d) => format!("alos-local[{}+{}]", self.id_bits, d),
        }
    }

    fn regime(&self) -> Regime {
        Regime::Local
    }

    fn language(&self) -> Arc<dyn Language> {
        Arc::new(StdLanguage::Alos)
    }

    fn prove(&self, g: &Graph) -> Result<Proof, SchemeError> {
        require_member(&StdLanguage::Alos, g)?;
        require_connected(g)?;
        let root = g.selected_nodes()[0];
        Ok(Proof::Local(distance_labels(g, root, self.id_bits, self.dist_bits(g))?))
    }

    fn shape(&self, g: &Graph) -> Shape {
        Shape { local_width: Some(self.id_bits + self.dist_bits(g)), global_len: None }
    }
}

/// Exactly one selected node: the global part names the leader, the local
/// part is the distance chain rooted at it.
#[derive(Debug, Clone)]
pub struct LeaderMixed {
    id_bits: usize,
}

impl LeaderMixed {
    pub fn new(id_bound: u64) -> Self {
        LeaderMixed { id_bits: bits_for(id_bound) }
    }
}

impl Verifier for LeaderMixed {
    fn radius(&self) -> usize {
        1
    }

    fn verify(&self, view: &View) -> bool {
        let Some(leader) = view.global().and_then(Bits::as_uint) else {
            return false;
        };
        let c = view.center();
        if view.is_selected(c) && leader != view.id(c).0 {
            return false;
        }
        chain_check(view, self.id_bits) == Some(leader)
    }
}

impl Scheme for LeaderMixed {
    fn name(&self) -> String {
        "leader-mixed".into()
    }

    fn regime(&self) -> Regime {
        Regime::Mixed
    }

    fn language(&self) -> Arc<dyn Language> {
        Arc::new(StdLanguage::Leader)
    }

    fn prove(&self, g: &Graph) -> Result<Proof, SchemeError> {
        require_member(&StdLanguage::Leader, g)?;
        require_connected(g)?;
        let root = g.selected_nodes()[0];
        let local = distance_labels(g, root, self.id_bits, bits_for(g.n() as u64))?;
        let global = GlobalProof::new(Bits::from_uint(g.node(root).id.0, self.id_bits));
        Ok(Proof::Mixed(MixedProof { local, global }))
    }

    fn shape(&self, g: &Graph) -> Shape {
        Shape { local_width: Some(self.id_bits + bits_for(g.n() as u64)), global_len: Some(self.id_bits) }
    }
}
