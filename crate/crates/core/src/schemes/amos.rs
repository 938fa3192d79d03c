//! At most one selected node, certified by a single global identifier.

use std::sync::Arc;

use super::{require_member, Scheme, SchemeError, Shape, Verifier};
use crate::bits::{bits_for, Bits};
use crate::graph::Graph;
use crate::language::{Language, StdLanguage};
use crate::proof::{GlobalProof, Proof, Regime};
use crate::view::View;

/// The global certificate is the identifier of the selected node (empty if
/// none). A selected node rejects unless the certificate is its own id.
#[derive(Debug, Clone)]
pub struct AmosGlobal {
    id_bound: u64,
}

impl AmosGlobal {
    pub fn new(id_bound: u64) -> Self {
        AmosGlobal { id_bound }
    }
}

impl Verifier for AmosGlobal {
    fn radius(&self) -> usize {
        0
    }

    fn verify(&self, view: &View) -> bool {
        let c = view.center();
        if !view.is_selected(c) {
            return true;
        }
        view.global().and_then(Bits::as_uint) == Some(view.id(c).0)
    }
}

impl Scheme for AmosGlobal {
    fn name(&self) -> String {
        "amos-global".into()
    }

    fn regime(&self) -> Regime {
        Regime::Global
    }

    fn language(&self) -> Arc<dyn Language> {
        Arc::new(StdLanguage::Amos)
    }

    fn prove(&self, g: &Graph) -> Result<Proof, SchemeError> {
        require_member(&StdLanguage::Amos, g)?;
        let bits = match g.selected_nodes().first() {
            Some(&i) => Bits::from_uint(g.node(i).id.0, bits_for(self.id_bound)),
            None => Bits::new(),
        };
        Ok(Proof::Global(GlobalProof::new(bits)))
    }

    fn shape(&self, _g: &Graph) -> Shape {
        Shape { local_width: None, global_len: Some(bits_for(self.id_bound)) }
    }
}
