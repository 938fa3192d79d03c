//! Bipartiteness: one color bit per node, or a global table of `M` color cells
//! indexed by identifier.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{require_member, Scheme, SchemeError, Shape, Verifier};
use crate::bits::Bits;
use crate::graph::Graph;
use crate::language::{two_coloring, Language, StdLanguage};
use crate::proof::{GlobalProof, LocalProof, Proof, Regime};
use crate::view::View;

/// Each node holds its color; neighbors must disagree.
#[derive(Debug, Clone, Copy, Default)]
pub struct BipLocal;

impl Verifier for BipLocal {
    fn radius(&self) -> usize {
        1
    }

    fn verify(&self, view: &View) -> bool {
        let c = view.center();
        let own = view.label(c);
        own.len() == 1 && view.neighbors(c).iter().all(|&s| view.label(s).len() == 1 && view.label(s) != own)
    }
}

impl Scheme for BipLocal {
    fn name(&self) -> String {
        "bip-local".into()
    }

    fn regime(&self) -> Regime {
        Regime::Local
    }

    fn language(&self) -> Arc<dyn Language> {
        Arc::new(StdLanguage::Bipartite)
    }

    fn prove(&self, g: &Graph) -> Result<Proof, SchemeError> {
        require_member(&StdLanguage::Bipartite, g)?;
        let colors = two_coloring(g).expect("bipartite graphs are 2-colorable");
        let labels: BTreeMap<_, _> = (0..g.n()).map(|i| (g.node(i).id, Bits::from_bools(&[colors[i]]))).collect();
        Ok(Proof::Local(LocalProof::new(1, labels)))
    }

    fn shape(&self, _g: &Graph) -> Shape {
        Shape { local_width: Some(1), global_len: None }
    }
}

/// Global table whose cell `i` (1-based) is the color of the node with id `i`.
#[derive(Debug, Clone)]
pub struct BipTable {
    id_bound: u64,
}

impl BipTable {
    pub fn new(id_bound: u64) -> Self {
        BipTable { id_bound }
    }

    /// Builds the table for a coloring given as `(id, color)` pairs; unused
    /// cells are 0.
    pub fn table(&self, colors: impl IntoIterator<Item = (u64, bool)>) -> Result<Bits, SchemeError> {
        let mut t = Bits::zeros(self.id_bound as usize);
        for (id, c) in colors {
            if id == 0 || id > self.id_bound {
                return Err(SchemeError::IdOutOfRange { id, bound: self.id_bound });
            }
            t.set(id as usize - 1, c);
        }
        Ok(t)
    }
}

fn cell(table: &Bits, id: u64) -> Option<bool> {
    let i = usize::try_from(id).ok()?.checked_sub(1)?;
    (i < table.len()).then(|| table.get(i))
}

impl Verifier for BipTable {
    fn radius(&self) -> usize {
        1
    }

    fn verify(&self, view: &View) -> bool {
        let Some(table) = view.global() else { return false };
        let c = view.center();
        let Some(own) = cell(table, view.id(c).0) else { return false };
        view.neighbors(c).iter().all(|&s| cell(table, view.id(s).0) == Some(!own))
    }
}

impl Scheme for BipTable {
    fn name(&self) -> String {
        "bip-table".into()
    }

    fn regime(&self) -> Regime {
        Regime::Global
    }

    fn language(&self) -> Arc<dyn Language> {
        Arc::new(StdLanguage::Bipartite)
    }

    fn prove(&self, g: &Graph) -> Result<Proof, SchemeError> {
        require_member(&StdLanguage::Bipartite, g)?;
        let colors = two_coloring(g).expect("bipartite graphs are 2-colorable");
        let t = self.table((0..g.n()).map(|i| (g.node(i).id.0, colors[i])))?;
        Ok(Proof::Global(GlobalProof::new(t)))
    }

    fn shape(&self, _g: &Graph) -> Shape {
        Shape { local_width: None, global_len: Some(self.id_bound as usize) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;
    use crate::harness::run;

    #[test]
    fn local_bits_on_even_cycle() {
        let g = Graph::cycle(6);
        let p = BipLocal.prove(&g).unwrap();
        let bits: String = p.local().unwrap().labels.values().map(|b| b.to_string()).collect();
        assert_eq!(bits, "010101");
        assert!(run(&BipLocal, &g, &p).unwrap().accepted);
        assert!(BipLocal.prove(&Graph::cycle(5)).is_err());
    }

    #[test]
    fn single_node_accepts_either_bit() {
        let g = Graph::path(1);
        for b in ["0", "1"] {
            let p = Proof::Local(LocalProof::new(1, [(g.node(0).id, b.parse().unwrap())].into()));
            assert!(run(&BipLocal, &g, &p).unwrap().accepted);
        }
    }

    #[test]
    fn table_on_four_cycle() {
        let g = Graph::cycle(4);
        let s = BipTable::new(4);
        let p = s.prove(&g).unwrap();
        assert_eq!(p.global().unwrap().bits.to_string(), "0101");
        assert!(run(&s, &g, &p).unwrap().accepted);
    }

    #[test]
    fn edgeless_graph_accepts_any_table() {
        let g = GraphBuilder::new().node(1, Bits::new()).node(2, Bits::new()).build().unwrap();
        let s = BipTable::new(2);
        for t in ["00", "01", "10", "11"] {
            assert!(run(&s, &g, &Proof::Global(GlobalProof::new(t.parse().unwrap()))).unwrap().accepted);
        }
    }

    #[test]
    fn table_rejects_out_of_range_ids() {
        assert!(matches!(BipTable::new(3).table([(4, true)]), Err(SchemeError::IdOutOfRange { .. })));
    }
}
