//! Radius-t views: the only thing a verifier gets to see.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::bits::Bits;
use crate::graph::{EdgeAttr, Graph, NodeId};
use crate::proof::Proof;

/// Which edges between ball members are visible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ViewRule {
    /// Edges joining two nodes that are both at distance exactly `t` are hidden.
    #[default]
    Strict,
    /// Every edge of the induced subgraph is visible.
    Inclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ViewError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
}

/// The certificate-free part of a view: structure, identifiers and inputs.
///
/// Slot 0 is the center; the remaining slots are ordered by distance, then id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    radius: usize,
    rule: ViewRule,
    members: Vec<usize>,
    ids: Vec<NodeId>,
    inputs: Vec<Bits>,
    dist: Vec<usize>,
    adj: Vec<Vec<usize>>,
    attrs: HashMap<(usize, usize), EdgeAttr>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Ball {
    pub fn new(g: &Graph, center: NodeId, radius: usize, rule: ViewRule) -> Result<Ball, ViewError> {
        let c = g.index_of(center).ok_or(ViewError::UnknownNode(center))?;
        Ok(Ball::at_index(g, c, radius, rule))
    }

    /// Ball around the node at graph position `c`.
    pub fn at_index(g: &Graph, c: usize, radius: usize, rule: ViewRule) -> Ball {
        let dists = bounded_bfs(g, c, radius);
        let mut members: Vec<(usize, usize)> = dists.iter().map(|(&i, &d)| (d, i)).collect();
        members.sort_unstable();
        let members: Vec<usize> = members.into_iter().map(|(_, i)| i).collect();
        let slot: HashMap<usize, usize> = members.iter().enumerate().map(|(s, &i)| (i, s)).collect();

        let mut adj = vec![Vec::new(); members.len()];
        let mut attrs = HashMap::new();
        for (s, &i) in members.iter().enumerate() {
            for &j in g.neighbors(i) {
                let Some(&s2) = slot.get(&j) else { continue };
                if s2 <= s {
                    continue;
                }
                let frontier = dists[&i] == radius && dists[&j] == radius;
                if frontier && rule == ViewRule::Strict {
                    continue;
                }
                adj[s].push(s2);
                adj[s2].push(s);
                attrs.insert((s, s2), g.edge_attr(i, j).unwrap());
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ball {
            radius,
            rule,
            ids: members.iter().map(|&i| g.node(i).id).collect(),
            inputs: members.iter().map(|&i| g.node(i).input.clone()).collect(),
            dist: members.iter().map(|&i| dists[&i]).collect(),
            members,
            adj,
            attrs,
        }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Graph positions of the members, slot order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    /// Visible edges as slot pairs `(a, b)`, `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = self.attrs.keys().copied().collect();
        e.sort_unstable();
        e
    }

    pub fn rule(&self) -> ViewRule {
        self.rule
    }

    /// The sub-ball of radius `r <= self.radius()` around the same center,
    /// detached (member positions become slots of the result).
    pub fn restrict(&self, r: usize) -> (Ball, Vec<usize>) {
        let keep: Vec<usize> = (0..self.len()).filter(|&s| self.dist[s] <= r).collect();
        let new_slot: HashMap<usize, usize> = keep.iter().enumerate().map(|(n, &s)| (s, n)).collect();
        let mut adj = vec![Vec::new(); keep.len()];
        let mut attrs = HashMap::new();
        for (&(a, b), attr) in &self.attrs {
            let (Some(&x), Some(&y)) = (new_slot.get(&a), new_slot.get(&b)) else { continue };
            if self.rule == ViewRule::Strict && self.dist[a] == r && self.dist[b] == r {
                continue;
            }
            adj[x].push(y);
            adj[y].push(x);
            attrs.insert(key(x, y), *attr);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let ball = Ball {
            radius: r,
            rule: self.rule,
            members: (0..keep.len()).collect(),
            ids: keep.iter().map(|&s| self.ids[s]).collect(),
            inputs: keep.iter().map(|&s| self.inputs[s].clone()).collect(),
            dist: keep.iter().map(|&s| self.dist[s]).collect(),
            adj,
            attrs,
        };
        (ball, keep)
    }

    /// The same ball detached from its source graph: member positions become
    /// slot numbers, so labels must then be supplied in slot order.
    pub fn detached(&self) -> Ball {
        let mut b = self.clone();
        b.members = (0..self.len()).collect();
        b
    }
}

fn bounded_bfs(g: &Graph, c: usize, radius: usize) -> HashMap<usize, usize> {
    let mut dist = HashMap::from([(c, 0)]);
    let mut frontier = vec![c];
    for d in 1..=radius {
        let mut next = Vec::new();
        for &u in &frontier {
            for &w in g.neighbors(u) {
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(w) {
                    e.insert(d);
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    dist
}

fn empty_bits() -> &'static Bits {
    static EMPTY: OnceLock<Bits> = OnceLock::new();
    EMPTY.get_or_init(Bits::new)
}

/// A ball together with the certificates visible in it.
///
/// `labels` is indexed by graph position (see [`Ball::members`]); it may be
/// empty when the proof has no local part.
#[derive(Debug, Clone, Copy)]
pub struct View<'a> {
    ball: &'a Ball,
    labels: &'a [Bits],
    global: Option<&'a Bits>,
}

impl<'a> View<'a> {
    pub fn new(ball: &'a Ball, labels: &'a [Bits], global: Option<&'a Bits>) -> Self {
        View { ball, labels, global }
    }

    pub fn ball(&self) -> &'a Ball {
        self.ball
    }

    pub fn radius(&self) -> usize {
        self.ball.radius
    }

    pub fn len(&self) -> usize {
        self.ball.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ball.is_empty()
    }

    /// Slot of the center, always 0.
    pub fn center(&self) -> usize {
        0
    }

    pub fn id(&self, slot: usize) -> NodeId {
        self.ball.ids[slot]
    }

    pub fn input(&self, slot: usize) -> &'a Bits {
        &self.ball.inputs[slot]
    }

    pub fn is_selected(&self, slot: usize) -> bool {
        self.ball.inputs[slot].any()
    }

    pub fn dist(&self, slot: usize) -> usize {
        self.ball.dist[slot]
    }

    /// Local certificate of the node in `slot` (empty without a local part).
    pub fn label(&self, slot: usize) -> &'a Bits {
        if self.labels.is_empty() {
            empty_bits()
        } else {
            &self.labels[self.ball.members[slot]]
        }
    }

    pub fn has_local(&self) -> bool {
        !self.labels.is_empty()
    }

    pub fn global(&self) -> Option<&'a Bits> {
        self.global
    }

    /// Visible neighbors of `slot`, as slots.
    pub fn neighbors(&self, slot: usize) -> &'a [usize] {
        &self.ball.adj[slot]
    }

    pub fn edge(&self, a: usize, b: usize) -> Option<EdgeAttr> {
        self.ball.attrs.get(&key(a, b)).copied()
    }

    pub fn find(&self, id: NodeId) -> Option<usize> {
        self.ball.ids.iter().position(|&x| x == id)
    }

    /// A detached view of radius `r` over the same center with replaced
    /// certificates; `labels` is in slot order of this view (or empty).
    pub fn relabeled(&self, r: usize, labels: &[Bits], global: Option<Bits>) -> OwnedView {
        let (ball, keep) = self.ball.restrict(r.min(self.radius()));
        let labels = if labels.is_empty() { Vec::new() } else { keep.iter().map(|&s| labels[s].clone()).collect() };
        OwnedView { ball, labels, global }
    }

    /// Copies everything visible into an owned value, labels in slot order.
    pub fn to_owned_view(&self) -> OwnedView {
        OwnedView {
            ball: self.ball.detached(),
            labels: if self.has_local() {
                (0..self.len()).map(|s| self.label(s).clone()).collect()
            } else {
                Vec::new()
            },
            global: self.global.cloned(),
        }
    }
}

/// A self-contained view, independent of any graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OwnedView {
    pub ball: Ball,
    pub labels: Vec<Bits>,
    pub global: Option<Bits>,
}

impl OwnedView {
    pub fn view(&self) -> View<'_> {
        View::new(&self.ball, &self.labels, self.global.as_ref())
    }
}

/// Extracts the radius-`t` view of `v` under `proof`.
pub fn view(g: &Graph, v: NodeId, t: usize, proof: &Proof, rule: ViewRule) -> Result<OwnedView, ViewError> {
    let ball = Ball::new(g, v, t, rule)?;
    let labels: Vec<Bits> = match proof.local() {
        Some(lp) => ball
            .members()
            .iter()
            .map(|&i| lp.labels.get(&g.node(i).id).cloned().unwrap_or_default())
            .collect(),
        None => Vec::new(),
    };
    Ok(OwnedView { ball: ball.detached(), labels, global: proof.global().map(|gp| gp.bits.clone()) })
}
