//! The graphs `G(n,t,x,y)` and the language `L_f` built on them.
//!
//! A path `v_1 … v_{2t+1}` joins the special nodes `v_A = v_1` and
//! `v_B = v_{2t+1}`; every node of the gadget `G_A` (encoding `x`) is joined
//! to `v_A`, every node of `G_B` (encoding `y`) to `v_B`.

use std::collections::{BTreeMap, BTreeSet};

use super::phi::{gadget_size, phi_decode, phi_encode, Gadget};
use super::{BoolFunction, CcError};
use crate::bits::Bits;
use crate::graph::{Graph, GraphBuilder, NodeId};
use crate::language::{Language, LanguageError};

/// Input of `v_A`.
pub const MARK_A: [bool; 2] = [true, false];
/// Input of `v_B`.
pub const MARK_B: [bool; 2] = [false, true];
pub const MARK_NONE: [bool; 2] = [false, false];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mark {
    A,
    B,
    None,
}

pub fn mark_of(input: &Bits) -> Option<Mark> {
    if input.len() != 2 {
        return None;
    }
    Some(match (input.get(0), input.get(1)) {
        (true, false) => Mark::A,
        (false, true) => Mark::B,
        (false, false) => Mark::None,
        (true, true) => return None,
    })
}

#[derive(Debug, Clone)]
pub struct LfInstance {
    pub n: usize,
    pub t: usize,
    pub x: Vec<bool>,
    pub y: Vec<bool>,
    pub graph: Graph,
    /// `v_1 … v_{2t+1}`.
    pub path: Vec<NodeId>,
    pub gadget_a: Vec<NodeId>,
    pub gadget_b: Vec<NodeId>,
}

impl LfInstance {
    pub fn v_a(&self) -> NodeId {
        self.path[0]
    }

    pub fn v_b(&self) -> NodeId {
        *self.path.last().expect("path is not empty")
    }
}

/// `G(n,t,x,y)` with path ids `1..=2t+1`, then the ids of `G_A`, then those of `G_B`.
pub fn build_lf(n: usize, t: usize, x: &[bool], y: &[bool]) -> Result<LfInstance, CcError> {
    if x.len() != n || y.len() != n {
        return Err(CcError::InvalidParameters(format!("inputs must have {n} bits")));
    }
    let ga = phi_encode(x)?;
    let gb = phi_encode(y)?;
    let mut inst = build_lf_from(t, &ga, &gb)?;
    inst.n = n;
    inst.x = x.to_vec();
    inst.y = y.to_vec();
    Ok(inst)
}

/// The same layout around arbitrary gadgets; `n`, `x` and `y` are left empty.
pub fn build_lf_from(t: usize, ga: &Gadget, gb: &Gadget) -> Result<LfInstance, CcError> {
    if t == 0 {
        return Err(CcError::InvalidParameters("t must be at least 1".into()));
    }
    let len = 2 * t as u64 + 1;
    let mut b = GraphBuilder::new();
    let path: Vec<NodeId> = (1..=len).map(NodeId).collect();
    for id in 1..=len {
        let mark = if id == 1 {
            MARK_A
        } else if id == len {
            MARK_B
        } else {
            MARK_NONE
        };
        b = b.node(id, Bits::from_bools(&mark));
        if id > 1 {
            b = b.edge(id - 1, id);
        }
    }
    let mut next = len + 1;
    let mut attach = |b: GraphBuilder, g: &Gadget, hub: u64| -> (GraphBuilder, Vec<NodeId>) {
        let ids: Vec<u64> = (0..g.k as u64).map(|i| next + i).collect();
        next += g.k as u64;
        let mut b = b;
        for &id in &ids {
            b = b.node(id, Bits::from_bools(&MARK_NONE)).edge(hub, id);
        }
        for &(u, v) in &g.edges {
            b = b.edge(ids[u], ids[v]);
        }
        (b, ids.into_iter().map(NodeId).collect())
    };
    let (b, gadget_a) = attach(b, ga, 1);
    let (b, gadget_b) = attach(b, gb, len);
    Ok(LfInstance { n: 0, t, x: Vec::new(), y: Vec::new(), graph: b.build()?, path, gadget_a, gadget_b })
}

/// The structure of a graph recognized as some `G(n,t,x,y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LfParse {
    /// Graph positions of `v_1 … v_{2t+1}`.
    pub path: Vec<usize>,
    pub gadget_a: Vec<usize>,
    pub gadget_b: Vec<usize>,
    pub x: Vec<bool>,
    pub y: Vec<bool>,
}

impl LfParse {
    pub fn t(&self) -> usize {
        (self.path.len() - 1) / 2
    }
}

fn gadget_of(g: &Graph, nodes: &[usize]) -> Gadget {
    let pos: BTreeMap<usize, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut edges = Vec::new();
    for (i, &v) in nodes.iter().enumerate() {
        for w in g.neighbors(v) {
            if let Some(&j) = pos.get(w) {
                if i < j {
                    edges.push((i, j));
                }
            }
        }
    }
    Gadget { k: nodes.len(), edges }
}

/// Recognizes `G(n,t,x,y)` centrally: the graph is connected, carries exactly
/// one `v_A` and one `v_B` mark, the rest of the graph splits into a path of
/// odd length between them and two gadgets of `k(n)` nodes hanging off each
/// special node, and both gadgets encode vectors.
pub fn parse_lf(g: &Graph, n: usize) -> Result<Option<LfParse>, CcError> {
    let k = gadget_size(n)?;
    let mut marks = Vec::with_capacity(g.n());
    for rec in g.nodes() {
        match mark_of(&rec.input) {
            Some(m) => marks.push(m),
            None => return Ok(None),
        }
    }
    let find = |m: Mark| -> Option<usize> {
        let mut it = (0..g.n()).filter(|&i| marks[i] == m);
        let first = it.next()?;
        it.next().is_none().then_some(first)
    };
    let (Some(va), Some(vb)) = (find(Mark::A), find(Mark::B)) else { return Ok(None) };
    if !g.is_connected() {
        return Ok(None);
    }
    // Components of the graph without the two special nodes.
    let mut comp = vec![usize::MAX; g.n()];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for s in 0..g.n() {
        if s == va || s == vb || comp[s] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut stack = vec![s];
        comp[s] = id;
        let mut members = Vec::new();
        while let Some(u) = stack.pop() {
            members.push(u);
            for &w in g.neighbors(u) {
                if w != va && w != vb && comp[w] == usize::MAX {
                    comp[w] = id;
                    stack.push(w);
                }
            }
        }
        comps.push(members);
    }
    let touches = |c: &[usize], hub: usize| c.iter().any(|&u| g.neighbors(u).contains(&hub));
    let mut interior: Option<&Vec<usize>> = None;
    let (mut ga, mut gb) = (Vec::new(), Vec::new());
    for c in &comps {
        match (touches(c, va), touches(c, vb)) {
            (true, true) => {
                if interior.replace(c).is_some() {
                    return Ok(None);
                }
            }
            (true, false) => ga.extend(c),
            (false, true) => gb.extend(c),
            (false, false) => return Ok(None),
        }
    }
    let Some(interior) = interior else { return Ok(None) };
    // Walk the interior from v_A's unique interior neighbor.
    let starts: Vec<usize> = g.neighbors(va).iter().copied().filter(|&w| comp[w] == comp[interior[0]]).collect();
    if starts.len() != 1 {
        return Ok(None);
    }
    let mut path = vec![va];
    let mut prev = va;
    let mut cur = starts[0];
    loop {
        if g.degree(cur) != 2 || marks[cur] != Mark::None {
            return Ok(None);
        }
        path.push(cur);
        let next = g.neighbors(cur).iter().copied().find(|&w| w != prev).expect("degree two");
        if next == vb {
            break;
        }
        if next == va || path.contains(&next) {
            return Ok(None);
        }
        prev = cur;
        cur = next;
    }
    path.push(vb);
    if path.len() != interior.len() + 2 || path.len() % 2 == 0 {
        return Ok(None);
    }
    if g.neighbors(vb).iter().filter(|&&w| comp.get(w) == Some(&comp[interior[0]])).count() != 1 {
        return Ok(None);
    }
    for (gadget, hub) in [(&mut ga, va), (&mut gb, vb)] {
        gadget.sort_unstable();
        if gadget.len() != k || g.degree(hub) != k + 1 || !gadget.iter().all(|&u| g.neighbors(u).contains(&hub)) {
            return Ok(None);
        }
    }
    let (Some(x), Some(y)) = (phi_decode(n, &gadget_of(g, &ga))?, phi_decode(n, &gadget_of(g, &gb))?) else {
        return Ok(None);
    };
    Ok(Some(LfParse { path, gadget_a: ga, gadget_b: gb, x, y }))
}

/// `L_f`: graphs shaped as some `G(n,t,x,y)` with `f(x,y) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LfLanguage {
    pub n: usize,
    pub f: BoolFunction,
}

impl Language for LfLanguage {
    fn name(&self) -> String {
        format!("lf-{}-{}", self.f, self.n)
    }

    fn contains(&self, g: &Graph) -> Result<bool, LanguageError> {
        let parsed = parse_lf(g, self.n).map_err(|_| LanguageError::Unknown(self.name()))?;
        Ok(parsed.is_some_and(|p| self.f.eval(&p.x, &p.y)))
    }
}

/// Node sets of the two players' sides: `v_1 … v_t` with `G_A`, and the rest.
pub fn sides(inst: &LfInstance) -> (BTreeSet<NodeId>, BTreeSet<NodeId>) {
    let t = inst.t;
    let alice: BTreeSet<NodeId> = inst.path[..t].iter().chain(&inst.gadget_a).copied().collect();
    let bob: BTreeSet<NodeId> = inst.graph.ids().filter(|id| !alice.contains(id)).collect();
    (alice, bob)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ccbridge::phi::all_vectors;

    #[test]
    fn sizes_and_shape() {
        let inst = build_lf(2, 1, &[false, false], &[false, false]).unwrap();
        // Path of 3 plus two gadgets of k(2) = 3 nodes.
        assert_eq!(inst.graph.n(), 9);
        assert_eq!(inst.graph.edge_count(), 2 + 3 + 3);
        assert!(build_lf(2, 0, &[false, false], &[false, false]).is_err());
    }

    #[test]
    fn equal_inputs_give_isomorphic_gadgets() {
        let inst = build_lf(3, 2, &[true, false, true], &[true, false, true]).unwrap();
        let p = parse_lf(&inst.graph, 3).unwrap().unwrap();
        assert_eq!(p.x, p.y);
        assert_eq!(p.t(), 2);
        assert_eq!(p.x, vec![true, false, true]);
    }

    #[test]
    fn parse_recovers_inputs() {
        for x in all_vectors(2) {
            for y in all_vectors(2) {
                let inst = build_lf(2, 2, &x, &y).unwrap();
                let p = parse_lf(&inst.graph, 2).unwrap().unwrap();
                assert_eq!((p.x, p.y), (x.clone(), y.clone()));
                let lang = LfLanguage { n: 2, f: BoolFunction::Neq };
                assert_eq!(lang.contains(&inst.graph).unwrap(), x != y);
            }
        }
    }

    #[test]
    fn malformed_graphs_are_rejected() {
        let inst = build_lf(2, 2, &[true, false], &[false, true]).unwrap();
        let lang = LfLanguage { n: 2, f: BoolFunction::Const1 };
        assert!(lang.contains(&inst.graph).unwrap());
        let ga = inst.gadget_a[0].0;
        let gb = inst.gadget_b[0].0;
        let stray = inst.graph.to_builder().edge(ga, gb).build().unwrap();
        assert!(!lang.contains(&stray).unwrap());
        let chord = inst.graph.to_builder().edge(2, 4).build().unwrap();
        assert!(!lang.contains(&chord).unwrap());
        let even = build_lf_from(1, &phi_encode(&[true, false]).unwrap(), &phi_encode(&[true, true]).unwrap())
            .unwrap()
            .graph
            .to_builder()
            .id_bound(50)
            .node(50, Bits::from_bools(&MARK_NONE))
            .edge(3, 50)
            .build()
            .unwrap();
        assert!(!lang.contains(&even).unwrap());
    }
}
