//! Identifier-labeled simple graphs with node inputs, edge selection marks and
//! optional edge weights.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRecord {
    pub id: NodeId,
    pub input: Bits,
}

impl NodeRecord {
    /// A node is selected when its input carries any non-zero bit.
    pub fn is_selected(&self) -> bool {
        self.input.any()
    }
}

/// Per-edge input: the selection mark and, for weighted graphs, the weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EdgeAttr {
    pub selected: bool,
    pub weight: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("duplicate node id {0}")]
    DuplicateId(NodeId),
    #[error("loop edge at node {0}")]
    LoopEdge(NodeId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("duplicate edge weight {0}")]
    DuplicateWeight(u64),
    #[error("edge ({0}, {1}) has no weight")]
    MissingWeight(NodeId, NodeId),
    #[error("edge weights must be positive, got {0}")]
    InvalidWeight(u64),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("({0}, {1}) is not an edge")]
    UnknownEdge(NodeId, NodeId),
    #[error("node ids must be positive")]
    ZeroId,
    #[error("node id {id} exceeds the id bound {bound}")]
    IdOutOfRange { id: NodeId, bound: u64 },
    #[error("graph has no nodes")]
    Empty,
    #[error("graph file: {0}")]
    Parse(String),
    #[error("graph file: {0}")]
    Io(String),
}

/// An immutable, validated graph.
///
/// Nodes are kept sorted by identifier; `index` positions refer to that order.
/// The edge list keeps the order and orientation it was built with so that a
/// loaded file saves back unchanged.
#[derive(Debug, Clone)]
pub struct Graph {
    nodes: Vec<NodeRecord>,
    index: HashMap<NodeId, usize>,
    adj: Vec<Vec<usize>>,
    attrs: HashMap<(usize, usize), EdgeAttr>,
    edge_list: Vec<(NodeId, NodeId)>,
    file_node_order: Vec<NodeId>,
    weighted: bool,
    id_bound: u64,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Graph {
    /// Validates an edge list with inputs and optional weights.
    pub fn build(
        edges: &[(u64, u64)],
        inputs: &BTreeMap<u64, Bits>,
        weights: Option<&[(u64, u64, u64)]>,
    ) -> Result<Graph, GraphError> {
        let mut b = GraphBuilder::new();
        for (&id, input) in inputs {
            b = b.node(id, input.clone());
        }
        for &(u, v) in edges {
            b = b.edge(u, v);
        }
        if let Some(ws) = weights {
            for &(u, v, w) in ws {
                b = b.weight(u, v, w);
            }
        }
        b.build()
    }

    /// Cycle on identifiers `1..=n`, all inputs `"0"`.
    pub fn cycle(n: u64) -> Graph {
        assert!(n >= 3, "a simple cycle needs at least 3 nodes");
        let mut b = GraphBuilder::new();
        for i in 1..=n {
            b = b.node(i, Bits::from_uint(0, 1));
        }
        for i in 1..=n {
            b = b.edge(i, i % n + 1);
        }
        b.build().expect("cycle is valid")
    }

    /// Path `1 - 2 - ... - n`, all inputs `"0"`.
    pub fn path(n: u64) -> Graph {
        assert!(n >= 1);
        let mut b = GraphBuilder::new();
        for i in 1..=n {
            b = b.node(i, Bits::from_uint(0, 1));
        }
        for i in 1..n {
            b = b.edge(i, i + 1);
        }
        b.build().expect("path is valid")
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn id_bound(&self) -> u64 {
        self.id_bound
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn node(&self, idx: usize) -> &NodeRecord {
        &self.nodes[idx]
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().map(|r| r.id)
    }

    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn record(&self, id: NodeId) -> Option<&NodeRecord> {
        self.index_of(id).map(|i| &self.nodes[i])
    }

    pub fn neighbors(&self, idx: usize) -> &[usize] {
        &self.adj[idx]
    }

    pub fn degree(&self, idx: usize) -> usize {
        self.adj[idx].len()
    }

    pub fn edge_attr(&self, a: usize, b: usize) -> Option<EdgeAttr> {
        self.attrs.get(&key(a, b)).copied()
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(x), Some(y)) => self.attrs.contains_key(&key(x, y)),
            _ => false,
        }
    }

    /// Edges as index pairs `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = self.attrs.keys().copied().collect();
        e.sort_unstable();
        e
    }

    pub fn edge_count(&self) -> usize {
        self.attrs.len()
    }

    /// The edge list exactly as supplied at construction.
    pub fn edge_list(&self) -> &[(NodeId, NodeId)] {
        &self.edge_list
    }

    pub fn selected_edges(&self) -> Vec<(usize, usize)> {
        self.edges().into_iter().filter(|&(a, b)| self.attrs[&(a, b)].selected).collect()
    }

    pub fn selected_nodes(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.nodes[i].is_selected()).collect()
    }

    /// BFS distances from `src`; unreachable nodes get `None`.
    pub fn distances(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        dist[src] = Some(0);
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Connected components as sorted index lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            let comp: Vec<usize> = self
                .distances(s)
                .iter()
                .enumerate()
                .filter_map(|(i, d)| d.map(|_| i))
                .collect();
            for &i in &comp {
                seen[i] = true;
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.distances(0).iter().all(Option::is_some)
    }

    /// A builder pre-populated with this graph, for deriving variants.
    pub fn to_builder(&self) -> GraphBuilder {
        let mut b = GraphBuilder::new().id_bound(self.id_bound);
        for id in &self.file_node_order {
            b = b.node(id.0, self.record(*id).unwrap().input.clone());
        }
        for &(u, v) in &self.edge_list {
            b = b.edge(u.0, v.0);
            let attr = self.edge_attr(self.index[&u], self.index[&v]).unwrap();
            if attr.selected {
                b = b.select(u.0, v.0);
            }
            if let Some(w) = attr.weight {
                b = b.weight(u.0, v.0, w);
            }
        }
        b
    }

    /// Same structure with node inputs replaced (missing ids keep their input).
    pub fn with_inputs(&self, inputs: &BTreeMap<NodeId, Bits>) -> Graph {
        let mut b = self.to_builder();
        for (id, input) in inputs {
            b = b.set_input(id.0, input.clone());
        }
        b.build().expect("input change keeps graph valid")
    }

    /// Marks node `i` (by position) selected iff bit `i` of `mask` is set.
    pub fn with_selection_mask(&self, mask: u64) -> Graph {
        let inputs = (0..self.n())
            .map(|i| (self.nodes[i].id, Bits::from_uint(mask >> i & 1, 1)))
            .collect();
        self.with_inputs(&inputs)
    }

    /// Same graph with exactly the given edges selected.
    pub fn with_selected(&self, selected: &BTreeSet<(usize, usize)>) -> Graph {
        let mut b = self.to_builder().clear_selection();
        for &(a, c) in selected {
            b = b.select(self.nodes[a].id.0, self.nodes[c].id.0);
        }
        b.build().expect("selection change keeps graph valid")
    }

    /// Same graph with the given weights (keyed by index pair `a < b`).
    pub fn with_weights(&self, weights: &BTreeMap<(usize, usize), u64>) -> Result<Graph, GraphError> {
        let mut b = self.to_builder().clear_weights();
        for (&(a, c), &w) in weights {
            b = b.weight(self.nodes[a].id.0, self.nodes[c].id.0, w);
        }
        b.build()
    }

    pub fn with_id_bound(&self, bound: u64) -> Result<Graph, GraphError> {
        self.to_builder().id_bound(bound).build()
    }

    /// The file representation.
    pub fn to_file(&self) -> GraphFile {
        let nodes = self
            .file_node_order
            .iter()
            .map(|id| FileNode { id: id.0, input: self.record(*id).unwrap().input.clone() })
            .collect();
        let edges = self.edge_list.iter().map(|&(u, v)| [u.0, v.0]).collect();
        let attr = |u: &NodeId, v: &NodeId| self.edge_attr(self.index[u], self.index[v]).unwrap();
        let weights = self.weighted.then(|| {
            self.edge_list.iter().map(|(u, v)| [u.0, v.0, attr(u, v).weight.unwrap()]).collect()
        });
        let selected: Vec<[u64; 2]> = self
            .edge_list
            .iter()
            .filter(|(u, v)| attr(u, v).selected)
            .map(|&(u, v)| [u.0, v.0])
            .collect();
        GraphFile {
            nodes,
            edges,
            weights,
            selected: (!selected.is_empty()).then_some(selected),
            id_bound: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("graph serializes")
    }

    pub fn from_json(text: &str) -> Result<Graph, GraphError> {
        let file: GraphFile = serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;
        file.into_graph()
    }

    pub fn load(path: &Path) -> Result<Graph, GraphError> {
        let text = std::fs::read_to_string(path).map_err(|e| GraphError::Io(e.to_string()))?;
        Graph::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), GraphError> {
        std::fs::write(path, self.to_json()).map_err(|e| GraphError::Io(e.to_string()))
    }
}

/// On-disk graph format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub nodes: Vec<FileNode>,
    pub edges: Vec<[u64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<[u64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selected: Option<Vec<[u64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id_bound: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileNode {
    pub id: u64,
    pub input: Bits,
}

impl GraphFile {
    pub fn into_graph(self) -> Result<Graph, GraphError> {
        let mut b = GraphBuilder::new();
        for n in self.nodes {
            b = b.node(n.id, n.input);
        }
        for [u, v] in self.edges {
            b = b.edge(u, v);
        }
        for [u, v, w] in self.weights.unwrap_or_default() {
            b = b.weight(u, v, w);
        }
        for [u, v] in self.selected.unwrap_or_default() {
            b = b.select(u, v);
        }
        if let Some(m) = self.id_bound {
            b = b.id_bound(m);
        }
        b.build()
    }
}

/// Accumulates nodes and edges; all validation happens in [`GraphBuilder::build`].
#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    nodes: Vec<(u64, Bits)>,
    edges: Vec<(u64, u64)>,
    weights: Vec<(u64, u64, u64)>,
    selected: Vec<(u64, u64)>,
    id_bound: Option<u64>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(mut self, id: u64, input: Bits) -> Self {
        self.nodes.push((id, input));
        self
    }

    pub fn edge(mut self, u: u64, v: u64) -> Self {
        self.edges.push((u, v));
        self
    }

    pub fn weight(mut self, u: u64, v: u64, w: u64) -> Self {
        self.weights.push((u, v, w));
        self
    }

    pub fn select(mut self, u: u64, v: u64) -> Self {
        self.selected.push((u, v));
        self
    }

    pub fn id_bound(mut self, bound: u64) -> Self {
        self.id_bound = Some(bound);
        self
    }

    fn set_input(mut self, id: u64, input: Bits) -> Self {
        if let Some(slot) = self.nodes.iter_mut().find(|(i, _)| *i == id) {
            slot.1 = input;
        }
        self
    }

    fn clear_selection(mut self) -> Self {
        self.selected.clear();
        self
    }

    fn clear_weights(mut self) -> Self {
        self.weights.clear();
        self
    }

    pub fn build(self) -> Result<Graph, GraphError> {
        let mut file_node_order = Vec::new();
        let mut inputs: BTreeMap<NodeId, Bits> = BTreeMap::new();
        for (id, input) in self.nodes {
            if id == 0 {
                return Err(GraphError::ZeroId);
            }
            if inputs.insert(NodeId(id), input).is_some() {
                return Err(GraphError::DuplicateId(NodeId(id)));
            }
            file_node_order.push(NodeId(id));
        }
        // Edge endpoints not listed as nodes join with an empty input.
        for &(u, v) in &self.edges {
            for id in [u, v] {
                if id == 0 {
                    return Err(GraphError::ZeroId);
                }
                if let std::collections::btree_map::Entry::Vacant(e) = inputs.entry(NodeId(id)) {
                    e.insert(Bits::new());
                    file_node_order.push(NodeId(id));
                }
            }
        }
        if inputs.is_empty() {
            return Err(GraphError::Empty);
        }
        let nodes: Vec<NodeRecord> = inputs.into_iter().map(|(id, input)| NodeRecord { id, input }).collect();
        let index: HashMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, r)| (r.id, i)).collect();
        let max_id = nodes.last().unwrap().id.0;
        let id_bound = self.id_bound.unwrap_or(max_id);
        if max_id > id_bound {
            return Err(GraphError::IdOutOfRange { id: NodeId(max_id), bound: id_bound });
        }

        let mut adj = vec![Vec::new(); nodes.len()];
        let mut attrs: HashMap<(usize, usize), EdgeAttr> = HashMap::new();
        let mut edge_list = Vec::new();
        for &(u, v) in &self.edges {
            if u == v {
                return Err(GraphError::LoopEdge(NodeId(u)));
            }
            let (a, b) = (index[&NodeId(u)], index[&NodeId(v)]);
            if attrs.insert(key(a, b), EdgeAttr::default()).is_some() {
                return Err(GraphError::DuplicateEdge(NodeId(u), NodeId(v)));
            }
            adj[a].push(b);
            adj[b].push(a);
            edge_list.push((NodeId(u), NodeId(v)));
        }
        for list in &mut adj {
            list.sort_unstable();
        }

        let weighted = !self.weights.is_empty();
        let mut seen_weights = BTreeSet::new();
        for &(u, v, w) in &self.weights {
            let k = lookup(&index, &attrs, u, v)?;
            if w == 0 {
                return Err(GraphError::InvalidWeight(w));
            }
            if !seen_weights.insert(w) {
                return Err(GraphError::DuplicateWeight(w));
            }
            let attr = attrs.get_mut(&k).unwrap();
            if attr.weight.is_some() {
                return Err(GraphError::DuplicateEdge(NodeId(u), NodeId(v)));
            }
            attr.weight = Some(w);
        }
        if weighted {
            if let Some((&(a, b), _)) = attrs.iter().find(|(_, at)| at.weight.is_none()) {
                return Err(GraphError::MissingWeight(nodes[a].id, nodes[b].id));
            }
        }
        for &(u, v) in &self.selected {
            let k = lookup(&index, &attrs, u, v)?;
            attrs.get_mut(&k).unwrap().selected = true;
        }

        Ok(Graph { nodes, index, adj, attrs, edge_list, file_node_order, weighted, id_bound })
    }
}

fn lookup(
    index: &HashMap<NodeId, usize>,
    attrs: &HashMap<(usize, usize), EdgeAttr>,
    u: u64,
    v: u64,
) -> Result<(usize, usize), GraphError> {
    let a = *index.get(&NodeId(u)).ok_or(GraphError::UnknownNode(NodeId(u)))?;
    let b = *index.get(&NodeId(v)).ok_or(GraphError::UnknownNode(NodeId(v)))?;
    let k = key(a, b);
    if attrs.contains_key(&k) {
        Ok(k)
    } else {
        Err(GraphError::UnknownEdge(NodeId(u), NodeId(v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_inputs() -> BTreeMap<u64, Bits> {
        BTreeMap::new()
    }

    #[test]
    fn triangle_builds() {
        let g = Graph::build(&[(1, 2), (2, 3), (3, 1)], &no_inputs(), None).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.id_bound(), 3);
        assert!(g.is_connected());
    }

    #[test]
    fn rejects_duplicate_edge() {
        let err = Graph::build(&[(1, 2), (1, 2)], &no_inputs(), None).unwrap_err();
        assert_eq!(err, GraphError::DuplicateEdge(NodeId(1), NodeId(2)));
        let err = Graph::build(&[(1, 2), (2, 1)], &no_inputs(), None).unwrap_err();
        assert!(matches!(err, GraphError::DuplicateEdge(..)));
    }

    #[test]
    fn rejects_loops_and_duplicate_ids() {
        assert_eq!(
            Graph::build(&[(1, 1)], &no_inputs(), None).unwrap_err(),
            GraphError::LoopEdge(NodeId(1))
        );
        let err = GraphBuilder::new().node(4, Bits::new()).node(4, Bits::new()).build().unwrap_err();
        assert_eq!(err, GraphError::DuplicateId(NodeId(4)));
    }

    #[test]
    fn rejects_duplicate_weight() {
        let ws = [(1, 2, 1), (2, 3, 2), (3, 1, 2)];
        let err = Graph::build(&[(1, 2), (2, 3), (3, 1)], &no_inputs(), Some(&ws)).unwrap_err();
        assert_eq!(err, GraphError::DuplicateWeight(2));
    }

    #[test]
    fn weights_must_cover_every_edge() {
        let ws = [(1, 2, 1)];
        let err = Graph::build(&[(1, 2), (2, 3)], &no_inputs(), Some(&ws)).unwrap_err();
        assert_eq!(err, GraphError::MissingWeight(NodeId(2), NodeId(3)));
    }

    #[test]
    fn id_bound_is_validated() {
        let err = GraphBuilder::new().node(9, Bits::new()).id_bound(8).build().unwrap_err();
        assert!(matches!(err, GraphError::IdOutOfRange { .. }));
        assert_eq!(Graph::cycle(5).with_id_bound(8).unwrap().id_bound(), 8);
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let g = GraphBuilder::new()
            .node(3, "1".parse().unwrap())
            .node(1, "0".parse().unwrap())
            .node(2, "".parse().unwrap())
            .edge(3, 1)
            .edge(1, 2)
            .weight(3, 1, 7)
            .weight(1, 2, 4)
            .select(1, 2)
            .build()
            .unwrap();
        let text = g.to_json();
        let again = Graph::from_json(&text).unwrap();
        assert_eq!(again.to_json(), text);
        assert!(again.is_weighted());
        assert_eq!(again.selected_edges().len(), 1);
    }

    #[test]
    fn hand_written_file_saves_to_the_same_value() {
        let text = r#"{"edges":[[2,1],[2,3]],"nodes":[{"input":"01","id":2},{"id":1,"input":""},{"id":3,"input":"1"}]}"#;
        let g = Graph::from_json(text).unwrap();
        let a: serde_json::Value = serde_json::from_str(text).unwrap();
        let b: serde_json::Value = serde_json::from_str(&g.to_json()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn components_and_distances() {
        let g = Graph::build(&[(1, 2), (3, 4)], &no_inputs(), None).unwrap();
        assert_eq!(g.components(), vec![vec![0, 1], vec![2, 3]]);
        assert!(!g.is_connected());
        let p = Graph::path(5);
        assert_eq!(p.distances(0)[4], Some(4));
    }
}
