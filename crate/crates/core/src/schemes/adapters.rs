//! Regime conversions as schemes: the converted certificate is accepted by a
//! wrapper verifier that reconstructs the original certificate from its view.

use std::sync::Arc;

use super::{Scheme, SchemeError, Shape, Verifier};
use crate::bits::{bits_for, Bits};
use crate::graph::Graph;
use crate::language::Language;
use crate::proof::{global_to_local, local_to_global, mixed_to_local, LocalProof, MixedProof, Proof, Regime};
use crate::view::View;

fn as_mixed(p: Proof, g: &Graph) -> MixedProof {
    match p {
        Proof::Mixed(m) => m,
        Proof::Local(l) => MixedProof { local: l, global: Default::default() },
        Proof::Global(gp) => MixedProof { local: LocalProof::empty_for(g), global: gp },
    }
}

/// Every node carries its local label followed by a copy of the global part;
/// neighbors check that their copies agree.
pub struct MixedToLocal {
    inner: Arc<dyn Scheme>,
    local_width: usize,
}

impl MixedToLocal {
    /// `local_width` is the inner scheme's local width on the instance.
    pub fn new(inner: Arc<dyn Scheme>, local_width: usize) -> Self {
        MixedToLocal { inner, local_width }
    }
}

impl Verifier for MixedToLocal {
    fn radius(&self) -> usize {
        self.inner.radius().max(1)
    }

    fn verify(&self, view: &View) -> bool {
        let c = view.center();
        let own = view.label(c);
        if own.len() < self.local_width || (0..view.len()).any(|s| view.label(s).len() != own.len()) {
            return false;
        }
        let split = |l: &Bits| {
            (l.slice(0, self.local_width).unwrap(), l.slice(self.local_width, l.len() - self.local_width).unwrap())
        };
        let (_, global) = split(own);
        if view.neighbors(c).iter().any(|&s| split(view.label(s)).1 != global) {
            return false;
        }
        let locals: Vec<Bits> = match self.inner.regime() {
            Regime::Global => Vec::new(),
            _ => (0..view.len()).map(|s| split(view.label(s)).0).collect(),
        };
        let global = (self.inner.regime() != Regime::Local).then_some(global);
        self.inner.verify(&view.relabeled(self.inner.radius(), &locals, global).view())
    }
}

impl Scheme for MixedToLocal {
    fn name(&self) -> String {
        format!("{}>local", self.inner.name())
    }

    fn regime(&self) -> Regime {
        Regime::Local
    }

    fn language(&self) -> Arc<dyn Language> {
        self.inner.language()
    }

    fn prove(&self, g: &Graph) -> Result<Proof, SchemeError> {
        Ok(Proof::Local(mixed_to_local(&as_mixed(self.inner.prove(g)?, g))))
    }

    fn shape(&self, g: &Graph) -> Shape {
        let s = self.inner.shape(g);
        Shape { local_width: Some(s.local_width.unwrap_or(0) + s.global_len.unwrap_or(0)), global_len: None }
    }
}

/// The global certificate is the id-sorted list of `(id, label)` couples;
/// each node looks up the labels of its view in it.
pub struct LocalToGlobal {
    inner: Arc<dyn Scheme>,
    id_bound: u64,
    width: usize,
}

impl LocalToGlobal {
    pub fn new(inner: Arc<dyn Scheme>, id_bound: u64, width: usize) -> Self {
        LocalToGlobal { inner, id_bound, width }
    }
}

impl Verifier for LocalToGlobal {
    fn radius(&self) -> usize {
        self.inner.radius()
    }

    fn verify(&self, view: &View) -> bool {
        let Some(bits) = view.global() else { return false };
        let Ok(list) = global_to_local(bits, self.id_bound, self.width) else { return false };
        let mut labels = Vec::with_capacity(view.len());
        for s in 0..view.len() {
            match list.labels.get(&view.id(s)) {
                Some(l) => labels.push(l.clone()),
                None => return false,
            }
        }
        self.inner.verify(&view.relabeled(self.inner.radius(), &labels, None).view())
    }
}

impl Scheme for LocalToGlobal {
    fn name(&self) -> String {
        format!("{}>global", self.inner.name())
    }

    fn regime(&self) -> Regime {
        Regime::Global
    }

    fn language(&self) -> Arc<dyn Language> {
        self.inner.language()
    }

    fn prove(&self, g: &Graph) -> Result<Proof, SchemeError> {
        let Proof::Local(l) = self.inner.prove(g)? else {
            unreachable!("LocalToGlobal wraps local schemes")
        };
        Ok(Proof::Global(local_to_global(&l, g).expect("honest proofs cover the graph")))
    }

    fn shape(&self, g: &Graph) -> Shape {
        Shape { local_width: None, global_len: Some(g.n() * (self.width + bits_for(self.id_bound))) }
    }

    fn structured_space(&self, g: &Graph) -> Option<Vec<Proof>> {
        self.inner
            .structured_space(g)?
            .into_iter()
            .map(|p| match p {
                Proof::Local(l) => local_to_global(&l, g).ok().map(Proof::Global),
                _ => None,
            })
            .collect()
    }
}

/// A local or global scheme viewed as a mixed one with an empty other part.
pub struct AsMixed {
    inner: Arc<dyn Scheme>,
}

impl AsMixed {
    pub fn new(inner: Arc<dyn Scheme>) -> Self {
        AsMixed { inner }
    }
}

impl Verifier for AsMixed {
    fn radius(&self) -> usize {
        self.inner.radius()
    }

    fn verify(&self, view: &View) -> bool {
        let global = view.global().cloned().unwrap_or_default();
        let r = self.inner.radius();
        match self.inner.regime() {
            Regime::Local => {
                let labels: Vec<Bits> = (0..view.len()).map(|s| view.label(s).clone()).collect();
                global.is_empty() && self.inner.verify(&view.relabeled(r, &labels, None).view())
            }
            Regime::Global => {
                view.label(view.center()).is_empty() && self.inner.verify(&view.relabeled(r, &[], Some(global)).view())
            }
            Regime::Mixed => self.inner.verify(view),
        }
    }
}

impl Scheme for AsMixed {
    fn name(&self) -> String {
        format!("{}>mixed", self.inner.name())
    }

    fn regime(&self) -> Regime {
        Regime::Mixed
    }

    fn language(&self) -> Arc<dyn Language> {
        self.inner.language()
    }

    fn prove(&self, g: &Graph) -> Result<Proof, SchemeError> {
        Ok(Proof::Mixed(as_mixed(self.inner.prove(g)?, g)))
    }

    fn shape(&self, g: &Graph) -> Shape {
        let s = self.inner.shape(g);
        Shape { local_width: Some(s.local_width.unwrap_or(0)), global_len: Some(s.global_len.unwrap_or(0)) }
    }
}
