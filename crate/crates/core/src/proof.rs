//! Certificates in the three regimes, their sizes, and conversions between them.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::bits::{bits_for, Bits};
use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Local,
    Global,
    Mixed,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Local => "local",
            Regime::Global => "global",
            Regime::Mixed => "mixed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProofError {
    #[error("proof covers {covered} nodes but the graph has {expected}")]
    CoverageMismatch { covered: usize, expected: usize },
    #[error("node {0} has no label")]
    MissingLabel(NodeId),
    #[error("label of node {id} has {len} bits, expected {width}")]
    WidthMismatch { id: NodeId, len: usize, width: usize },
    #[error("mixed size is zero")]
    ZeroMixed,
    #[error("cannot decode certificate list: {0}")]
    Decode(String),
    #[error("proof file: {0}")]
    Parse(String),
}

/// One label per node, all of the same width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalProof {
    pub width: usize,
    pub labels: BTreeMap<NodeId, Bits>,
}

impl LocalProof {
    pub fn new(width: usize, labels: BTreeMap<NodeId, Bits>) -> Self {
        LocalProof { width, labels }
    }

    /// Width-0 labels for every node of `g`.
    pub fn empty_for(g: &Graph) -> Self {
        LocalProof { width: 0, labels: g.ids().map(|id| (id, Bits::new())).collect() }
    }

    /// Checks that every node of `g` has a label of the declared width, and nothing else does.
    pub fn check_covers(&self, g: &Graph) -> Result<(), ProofError> {
        for id in g.ids() {
            let l = self.labels.get(&id).ok_or(ProofError::MissingLabel(id))?;
            if l.len() != self.width {
                return Err(ProofError::WidthMismatch { id, len: l.len(), width: self.width });
            }
        }
        if self.labels.len() != g.n() {
            return Err(ProofError::CoverageMismatch { covered: self.labels.len(), expected: g.n() });
        }
        Ok(())
    }

    /// Labels in graph position order (the order [`crate::view::View`] indexes by).
    pub fn to_vec(&self, g: &Graph) -> Vec<Bits> {
        g.ids().map(|id| self.labels.get(&id).cloned().unwrap_or_default()).collect()
    }

    pub fn size(&self) -> usize {
        self.width
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GlobalProof {
    pub bits: Bits,
}

impl GlobalProof {
    pub fn new(bits: Bits) -> Self {
        GlobalProof { bits }
    }

    pub fn size(&self) -> usize {
        self.bits.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedProof {
    pub local: LocalProof,
    pub global: GlobalProof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Proof {
    Local(LocalProof),
    Global(GlobalProof),
    Mixed(MixedProof),
}

impl Proof {
    pub fn regime(&self) -> Regime {
        match self {
            Proof::Local(_) => Regime::Local,
            Proof::Global(_) => Regime::Global,
            Proof::Mixed(_) => Regime::Mixed,
        }
    }

    pub fn local(&self) -> Option<&LocalProof> {
        match self {
            Proof::Local(l) => Some(l),
            Proof::Mixed(m) => Some(&m.local),
            Proof::Global(_) => None,
        }
    }

    pub fn global(&self) -> Option<&GlobalProof> {
        match self {
            Proof::Global(g) => Some(g),
            Proof::Mixed(m) => Some(&m.global),
            Proof::Local(_) => None,
        }
    }

    /// Total size in bits on a graph with `n` nodes.
    pub fn total_size(&self, n: usize) -> usize {
        self.local().map_or(0, |l| n * l.width) + self.global().map_or(0, GlobalProof::size)
    }

    pub fn to_file(&self) -> ProofFile {
        ProofFile {
            width: self.local().map(|l| l.width),
            labels: self.local().map(|l| l.labels.iter().map(|(id, b)| (id.0.to_string(), b.clone())).collect()),
            global: self.global().map(|g| g.bits.clone()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("proof serializes")
    }

    pub fn from_json(text: &str) -> Result<Proof, ProofError> {
        let file: ProofFile = serde_json::from_str(text).map_err(|e| ProofError::Parse(e.to_string()))?;
        file.into_proof()
    }
}

/// On-disk proof format; which keys are present determines the regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<String, Bits>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub global: Option<Bits>,
}

impl ProofFile {
    pub fn into_proof(self) -> Result<Proof, ProofError> {
        let local = match (self.width, self.labels) {
            (None, None) => None,
            (width, Some(labels)) => {
                let mut map = BTreeMap::new();
                for (k, v) in labels {
                    let id: u64 = k.parse().map_err(|_| ProofError::Parse(format!("bad node id {k:?}")))?;
                    map.insert(NodeId(id), v);
                }
                let width = width.unwrap_or_else(|| map.values().next().map_or(0, Bits::len));
                if let Some((id, b)) = map.iter().find(|(_, b)| b.len() != width) {
                    return Err(ProofError::WidthMismatch { id: *id, len: b.len(), width });
                }
                Some(LocalProof { width, labels: map })
            }
            (Some(_), None) => return Err(ProofError::Parse("width given without labels".into())),
        };
        Ok(match (local, self.global) {
            (Some(l), Some(g)) => Proof::Mixed(MixedProof { local: l, global: GlobalProof::new(g) }),
            (Some(l), None) => Proof::Local(l),
            (None, Some(g)) => Proof::Global(GlobalProof::new(g)),
            (None, None) => return Err(ProofError::Parse("proof has neither labels nor global".into())),
        })
    }
}

/// `n * width + |global|`, after checking the local part covers `n` nodes.
pub fn mixed_size(p: &MixedProof, n: usize) -> Result<usize, ProofError> {
    if p.local.labels.len() != n {
        return Err(ProofError::CoverageMismatch { covered: p.local.labels.len(), expected: n });
    }
    Ok(n * p.local.width + p.global.size())
}

/// Appends the global part to every local label.
pub fn mixed_to_local(p: &MixedProof) -> LocalProof {
    LocalProof {
        width: p.local.width + p.global.size(),
        labels: p.local.labels.iter().map(|(id, l)| (*id, l.concat(&p.global.bits))).collect(),
    }
}

/// Encodes a local proof as the ID-sorted list of `(id, label)` couples, ids on
/// `bits_for(M)` bits.
pub fn local_to_global(p: &LocalProof, g: &Graph) -> Result<GlobalProof, ProofError> {
    p.check_covers(g)?;
    let idw = bits_for(g.id_bound());
    let mut bits = Bits::new();
    for (id, label) in &p.labels {
        bits.push_uint(id.0, idw);
        bits.extend_from(label);
    }
    Ok(GlobalProof::new(bits))
}

/// Inverse of [`local_to_global`]: requires strictly increasing ids.
pub fn global_to_local(bits: &Bits, id_bound: u64, width: usize) -> Result<LocalProof, ProofError> {
    let idw = bits_for(id_bound);
    let entry = idw + width;
    if entry == 0 || !bits.len().is_multiple_of(entry) {
        return Err(ProofError::Decode(format!("length {} is not a multiple of {entry}", bits.len())));
    }
    let mut labels = BTreeMap::new();
    let mut last = 0;
    for k in 0..bits.len() / entry {
        let id = bits.read_uint(k * entry, idw).unwrap();
        if id <= last {
            return Err(ProofError::Decode(format!("ids not strictly increasing at entry {k}")));
        }
        last = id;
        labels.insert(NodeId(id), bits.slice(k * entry + idw, width).unwrap());
    }
    Ok(LocalProof { width, labels })
}

/// `n * s_local / s_mixed`.
pub fn price_of_locality(s_local: u64, s_mixed: u64, n: u64) -> Result<Ratio<u64>, ProofError> {
    if s_mixed == 0 {
        return Err(ProofError::ZeroMixed);
    }
    Ok(Ratio::new(n * s_local, s_mixed))
}

/// Achieved certificate sizes for one language at one graph size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SizeReport {
    pub language: String,
    pub n: usize,
    #[serde(rename = "M")]
    pub id_bound: u64,
    pub s_local: usize,
    pub s_global: usize,
    pub s_mixed: usize,
    #[serde(serialize_with = "ratio_as_text")]
    pub pol: Ratio<u64>,
}

fn ratio_as_text<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl SizeReport {
    /// Violated size inequalities, if any.
    pub fn chain_violations(&self) -> Vec<String> {
        let n = self.n;
        let mut out = Vec::new();
        if self.s_local > self.s_mixed {
            out.push(format!("s_local {} > s_mixed {}", self.s_local, self.s_mixed));
        }
        if self.s_mixed > self.s_global {
            out.push(format!("s_mixed {} > s_global {}", self.s_mixed, self.s_global));
        }
        if self.s_mixed > n * self.s_local {
            out.push(format!("s_mixed {} > n*s_local {}", self.s_mixed, n * self.s_local));
        }
        let cap = n * self.s_local + n * bits_for(self.id_bound);
        if self.s_global > cap {
            out.push(format!("s_global {} > {cap}", self.s_global));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;
    use proptest::prelude::*;

    fn labels(pairs: &[(u64, &str)]) -> BTreeMap<NodeId, Bits> {
        pairs.iter().map(|&(id, s)| (NodeId(id), s.parse().unwrap())).collect()
    }

    fn mixed(width: usize, n: usize, global: &str) -> MixedProof {
        let l: BTreeMap<_, _> = (1..=n as u64).map(|i| (NodeId(i), Bits::zeros(width))).collect();
        MixedProof { local: LocalProof::new(width, l), global: GlobalProof::new(global.parse().unwrap()) }
    }

    #[test]
    fn mixed_size_examples() {
        assert_eq!(mixed_size(&mixed(2, 5, "0000000"), 5), Ok(17));
        assert_eq!(mixed_size(&mixed(0, 10, ""), 10), Ok(0));
        assert_eq!(mixed_size(&mixed(3, 4, ""), 4), Ok(12));
        assert!(matches!(mixed_size(&mixed(3, 4, ""), 5), Err(ProofError::CoverageMismatch { .. })));
    }

    #[test]
    fn mixed_to_local_examples() {
        let p = MixedProof {
            local: LocalProof::new(1, labels(&[(1, "0"), (2, "1")])),
            global: GlobalProof::new("10".parse().unwrap()),
        };
        let l = mixed_to_local(&p);
        assert_eq!(l.width, 3);
        assert_eq!(l.labels, labels(&[(1, "010"), (2, "110")]));

        let p = MixedProof { local: LocalProof::new(0, labels(&[(1, ""), (2, "")])), global: GlobalProof::new("1".parse().unwrap()) };
        assert_eq!(mixed_to_local(&p).labels, labels(&[(1, "1"), (2, "1")]));
    }

    #[test]
    fn local_to_global_example() {
        let g = GraphBuilder::new().node(1, Bits::new()).node(3, Bits::new()).edge(1, 3).build().unwrap();
        let p = LocalProof::new(1, labels(&[(1, "0"), (3, "1")]));
        let gp = local_to_global(&p, &g).unwrap();
        assert_eq!(gp.bits.to_string(), "010111");
        assert_eq!(global_to_local(&gp.bits, 3, 1).unwrap(), p);

        let one = GraphBuilder::new().node(1, Bits::new()).build().unwrap();
        let gp = local_to_global(&LocalProof::empty_for(&one), &one).unwrap();
        assert_eq!(gp.size(), 1);
    }

    #[test]
    fn pol_examples() {
        assert_eq!(price_of_locality(4, 4, 16).unwrap(), Ratio::from_integer(16));
        assert_eq!(price_of_locality(3, 24, 8).unwrap(), Ratio::from_integer(1));
        assert_eq!(price_of_locality(1, 0, 8), Err(ProofError::ZeroMixed));
    }

    #[test]
    fn proof_file_regimes() {
        let p = Proof::from_json(r#"{"width":1,"labels":{"1":"0","2":"1"}}"#).unwrap();
        assert_eq!(p.regime(), Regime::Local);
        let p = Proof::from_json(r#"{"global":"0111"}"#).unwrap();
        assert_eq!(p.regime(), Regime::Global);
        let p = Proof::from_json(r#"{"width":0,"labels":{"1":""},"global":"1"}"#).unwrap();
        assert_eq!(p.regime(), Regime::Mixed);
        assert_eq!(Proof::from_json(&p.to_json()).unwrap(), p);
        assert!(Proof::from_json(r#"{"width":2,"labels":{"1":"0"}}"#).is_err());
    }

    proptest! {
        #[test]
        fn couples_round_trip(n in 1usize..=6, width in 0usize..=3, seed in any::<u64>(), extra in 0u64..10) {
            let mut b = GraphBuilder::new().id_bound(n as u64 + extra);
            let mut l = BTreeMap::new();
            for i in 0..n {
                let id = i as u64 + 1;
                b = b.node(id, Bits::new());
                l.insert(NodeId(id), Bits::from_uint(seed.rotate_left(7 * i as u32), width));
            }
            let g = b.build().unwrap();
            let p = LocalProof::new(width, l);
            let gp = local_to_global(&p, &g).unwrap();
            prop_assert!(gp.size() <= n * width + n * bits_for(g.id_bound()));
            prop_assert_eq!(global_to_local(&gp.bits, g.id_bound(), width).unwrap(), p);
        }
    }
}
