//! A local scheme for `L_f` built from a protocol for `f`.
//!
//! Every node's label is `path flag | counter | parent id | n | advice`. Path
//! nodes count up from `v_A = 1` along parent pointers; gadget nodes carry
//! zero counters. All nodes carry the same advice, which `v_A` checks against
//! the vector its gadget encodes and `v_B` against its own.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::lf::{mark_of, parse_lf, LfInstance, LfLanguage, LfParse, Mark};
use super::phi::{gadget_size, phi_decode, Gadget};
use super::{BoolFunction, CcError, NondetProtocol};
use crate::bits::{bits_for, Bits};
use crate::graph::{Graph, NodeId};
use crate::language::Language;
use crate::proof::{LocalProof, Proof, Regime};
use crate::schemes::{Scheme, SchemeError, Shape, Verifier};
use crate::view::View;

const N_FIELD: usize = 3;

/// Field widths of a structure label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub n: usize,
    /// Gadget node count `k(n)`.
    pub k: usize,
    pub id_bits: usize,
    pub advice_len: usize,
}

struct Fields {
    path: bool,
    counter: u64,
    parent: u64,
    n: u64,
}

impl Layout {
    pub fn new(n: usize, id_bound: u64, advice_len: usize) -> Result<Layout, CcError> {
        Ok(Layout { n, k: gadget_size(n)?, id_bits: bits_for(id_bound), advice_len })
    }

    pub fn width(&self) -> usize {
        1 + 2 * self.id_bits + N_FIELD + self.advice_len
    }

    fn advice_at(&self) -> usize {
        1 + 2 * self.id_bits + N_FIELD
    }

    pub fn advice(&self, label: &Bits) -> Option<Bits> {
        (label.len() == self.width()).then(|| label.slice(self.advice_at(), self.advice_len).unwrap())
    }

    fn fields(&self, label: &Bits) -> Option<Fields> {
        if label.len() != self.width() {
            return None;
        }
        let w = self.id_bits;
        Some(Fields {
            path: label.get(0),
            counter: label.read_uint(1, w)?,
            parent: label.read_uint(1 + w, w)?,
            n: label.read_uint(1 + 2 * w, N_FIELD)?,
        })
    }

    fn label(&self, path: bool, counter: u64, parent: u64, advice: &Bits) -> Result<Bits, SchemeError> {
        for value in [counter, parent] {
            if bits_for(value) > self.id_bits {
                return Err(SchemeError::FieldOverflow { value, width: self.id_bits });
            }
        }
        let mut b = Bits::new();
        b.push(path);
        b.push_uint(counter, self.id_bits);
        b.push_uint(parent, self.id_bits);
        b.push_uint(if path { self.n as u64 } else { 0 }, N_FIELD);
        b.extend_from(advice);
        Ok(b)
    }
}

/// Honest structure labels for a graph with path `v_1 … v_{2t+1}` (ids).
fn certify(g: &Graph, path: &[NodeId], layout: &Layout, advice: &Bits) -> Result<LocalProof, SchemeError> {
    if advice.len() != layout.advice_len {
        return Err(SchemeError::FieldOverflow { value: advice.len() as u64, width: layout.advice_len });
    }
    let mut labels = g.ids().map(|id| Ok((id, layout.label(false, 0, 0, advice)?))).collect::<Result<std::collections::BTreeMap<_, _>, SchemeError>>()?;
    for (i, id) in path.iter().enumerate() {
        let parent = if i == 0 { 0 } else { path[i - 1].0 };
        labels.insert(*id, layout.label(true, i as u64 + 1, parent, advice)?);
    }
    Ok(LocalProof::new(layout.width(), labels))
}

pub fn structure_certificate(inst: &LfInstance, layout: &Layout, advice: &Bits) -> Result<LocalProof, SchemeError> {
    certify(&inst.graph, &inst.path, layout, advice)
}

fn parsed_certificate(g: &Graph, p: &LfParse, layout: &Layout, advice: &Bits) -> Result<LocalProof, SchemeError> {
    let path: Vec<NodeId> = p.path.iter().map(|&i| g.node(i).id).collect();
    certify(g, &path, layout, advice)
}

/// What the center learned from a structurally consistent view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Role {
    VA(Vec<bool>),
    VB(Vec<bool>),
    Other,
}

/// Gadget neighbors of a special center: unmarked, off the path, closed
/// under adjacency except for the center, and `k` of them. Returns the
/// vector they encode.
fn read_gadget(view: &View, layout: &Layout, gadget: &[usize]) -> Option<Vec<bool>> {
    let c = view.center();
    if gadget.len() != layout.k {
        return None;
    }
    let members: BTreeSet<usize> = gadget.iter().copied().collect();
    let mut edges = Vec::new();
    for (i, &u) in gadget.iter().enumerate() {
        if mark_of(view.input(u)) != Some(Mark::None) {
            return None;
        }
        for &w in view.neighbors(u) {
            if w == c {
                continue;
            }
            if !members.contains(&w) {
                return None;
            }
            let j = gadget.iter().position(|&v| v == w).unwrap();
            if i < j {
                edges.push((i, j));
            }
        }
    }
    phi_decode(layout.n, &Gadget { k: layout.k, edges }).ok().flatten()
}

/// Structure checks at radius 2; `None` means reject.
pub fn verify_structure(view: &View, layout: &Layout) -> Option<Role> {
    let c = view.center();
    let me = layout.fields(view.label(c))?;
    let mark = mark_of(view.input(c))?;
    let advice = layout.advice(view.label(c))?;
    let nbrs = view.neighbors(c);
    let mut info = Vec::with_capacity(nbrs.len());
    for &s in nbrs {
        let f = layout.fields(view.label(s))?;
        if layout.advice(view.label(s))? != advice {
            return None;
        }
        info.push((s, f, mark_of(view.input(s))?));
    }
    let path_nbrs: Vec<&(usize, Fields, Mark)> = info.iter().filter(|(_, f, _)| f.path).collect();
    let gadget: Vec<usize> = info.iter().filter(|(_, f, _)| !f.path).map(|(s, _, _)| *s).collect();
    let my_id = view.id(c).0;
    if me.path && me.n != layout.n as u64 {
        return None;
    }
    match (mark, me.path) {
        (Mark::A, true) => {
            if me.counter != 1 || me.parent != 0 || path_nbrs.len() != 1 {
                return None;
            }
            let (_, next, _) = path_nbrs[0];
            if next.counter != 2 || next.parent != my_id {
                return None;
            }
            read_gadget(view, layout, &gadget).map(Role::VA)
        }
        (Mark::B, true) => {
            if me.counter < 3 || me.counter % 2 == 0 || path_nbrs.len() != 1 {
                return None;
            }
            let (s, prev, _) = path_nbrs[0];
            if prev.counter + 1 != me.counter || me.parent != view.id(*s).0 {
                return None;
            }
            read_gadget(view, layout, &gadget).map(Role::VB)
        }
        (Mark::None, true) => {
            if me.counter < 2 || nbrs.len() != 2 || path_nbrs.len() != 2 {
                return None;
            }
            let up = path_nbrs.iter().any(|(s, f, _)| view.id(*s).0 == me.parent && f.counter + 1 == me.counter);
            let down = path_nbrs.iter().any(|(_, f, _)| f.counter == me.counter + 1 && f.parent == my_id);
            (up && down).then_some(Role::Other)
        }
        (Mark::None, false) => {
            if me.counter != 0 || me.parent != 0 {
                return None;
            }
            let hubs: Vec<usize> = info.iter().filter(|(_, _, m)| *m != Mark::None).map(|(s, _, _)| *s).collect();
            let [hub] = hubs[..] else { return None };
            let siblings_ok = info
                .iter()
                .filter(|(s, _, _)| *s != hub)
                .all(|(s, f, m)| !f.path && *m == Mark::None && view.neighbors(*s).contains(&hub));
            siblings_ok.then_some(Role::Other)
        }
        _ => None,
    }
}

/// Structure checks alone, with no advice.
#[derive(Debug, Clone, Copy)]
pub struct StructureVerifier {
    pub layout: Layout,
}

impl Verifier for StructureVerifier {
    fn radius(&self) -> usize {
        2
    }

    fn verify(&self, view: &View) -> bool {
        verify_structure(view, &self.layout).is_some()
    }
}

pub struct CompiledScheme {
    protocol: Arc<dyn NondetProtocol>,
    f: BoolFunction,
    layout: Layout,
}

impl CompiledScheme {
    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn protocol(&self) -> &dyn NondetProtocol {
        self.protocol.as_ref()
    }
}

/// Compiles `protocol`, which must decide `f`, for graphs with ids up to `id_bound`.
pub fn compile_protocol(protocol: Arc<dyn NondetProtocol>, f: BoolFunction, id_bound: u64) -> Result<CompiledScheme, CcError> {
    if protocol.level() != 1 {
        return Err(CcError::InvalidParameters(format!("level {} protocols are not supported", protocol.level())));
    }
    let layout = Layout::new(protocol.n(), id_bound, protocol.advice_len())?;
    Ok(CompiledScheme { protocol, f, layout })
}

impl Verifier for CompiledScheme {
    fn radius(&self) -> usize {
        2
    }

    fn verify(&self, view: &View) -> bool {
        let Some(role) = verify_structure(view, &self.layout) else { return false };
        let advice = self.layout.advice(view.label(view.center())).unwrap();
        match role {
            Role::VA(x) => self.protocol.accept_a(&x, &advice),
            Role::VB(y) => self.protocol.accept_b(&y, &advice),
            Role::Other => true,
        }
    }
}

impl Scheme for CompiledScheme {
    fn name(&self) -> String {
        format!("compiled-{}", self.protocol.name())
    }

    fn regime(&self) -> Regime {
        Regime::Local
    }

    fn language(&self) -> Arc<dyn Language> {
        Arc::new(LfLanguage { n: self.layout.n, f: self.f })
    }

    fn prove(&self, g: &Graph) -> Result<Proof, SchemeError> {
        let not_in = || SchemeError::NotInLanguage(self.language().name());
        let p = parse_lf(g, self.layout.n).map_err(|_| not_in())?.ok_or_else(not_in)?;
        let advice = super::witness(self.protocol.as_ref(), &p.x, &p.y).map_err(|_| not_in())?.ok_or_else(not_in)?;
        Ok(Proof::Local(parsed_certificate(g, &p, &self.layout, &advice)?))
    }

    fn shape(&self, _g: &Graph) -> Shape {
        Shape { local_width: Some(self.layout.width()), global_len: None }
    }

    /// On a connected graph an accepted certificate forces the honest
    /// structure, so the honest structure with every candidate advice is exact.
    fn structured_space(&self, g: &Graph) -> Option<Vec<Proof>> {
        if !g.is_connected() {
            return None;
        }
        let Some(p) = parse_lf(g, self.layout.n).ok()? else { return Some(Vec::new()) };
        let candidates = self.protocol.candidates(&p.x, &p.y).ok()?;
        candidates.iter().map(|a| parsed_certificate(g, &p, &self.layout, a).ok().map(Proof::Local)).collect()
    }
}
