//! A protocol from a global scheme for `L_f`: each player simulates the
//! nodes on their side of `G(x, y)` with the global certificate as advice.

use std::sync::Arc;

use super::lf::{build_lf, sides, LfInstance};
use super::{all_strings, CcError, NondetProtocol};
use crate::bits::Bits;
use crate::graph::Graph;
use crate::harness::Evaluator;
use crate::proof::{Proof, Regime};
use crate::schemes::Scheme;
use crate::view::{Ball, ViewRule};

pub struct ExtractedProtocol {
    scheme: Arc<dyn Scheme>,
    n: usize,
    t: usize,
    advice_len: usize,
    /// Graph positions simulated by Alice and by Bob.
    alice: Vec<usize>,
    bob: Vec<usize>,
}

/// Alice owns `v_1 … v_t` and `G_A`, Bob the rest. Fails when some owned
/// node's view would reach the other player's gadget.
pub fn extract_protocol(scheme: Arc<dyn Scheme>, n: usize, t: usize) -> Result<ExtractedProtocol, CcError> {
    if scheme.regime() != Regime::Global {
        return Err(CcError::InvalidParameters(format!("{} is not a global scheme", scheme.name())));
    }
    let template = build_lf(n, t, &vec![false; n], &vec![false; n])?;
    let g = &template.graph;
    let (a_ids, b_ids) = sides(&template);
    let alice: Vec<usize> = a_ids.iter().map(|&id| g.index_of(id).unwrap()).collect();
    let bob: Vec<usize> = b_ids.iter().map(|&id| g.index_of(id).unwrap()).collect();
    let private = |inst: &LfInstance, alice_side: bool| -> Vec<usize> {
        let ids = if alice_side { &inst.gadget_a } else { &inst.gadget_b };
        ids.iter().map(|&id| inst.graph.index_of(id).unwrap()).collect()
    };
    for (owned, other) in [(&alice, private(&template, false)), (&bob, private(&template, true))] {
        for &i in owned {
            let ball = Ball::at_index(g, i, scheme.radius(), ViewRule::Strict);
            if ball.members().iter().any(|m| other.contains(m)) {
                return Err(CcError::ViewCrossesCut { node: g.node(i).id.0 });
            }
        }
    }
    let advice_len = scheme.shape(g).global_len.unwrap_or(0);
    Ok(ExtractedProtocol { scheme, n, t, advice_len, alice, bob })
}

impl ExtractedProtocol {
    fn graph(&self, x: &[bool], y: &[bool]) -> Graph {
        build_lf(self.n, self.t, x, y).expect("parameters were checked").graph
    }

    fn side_accepts(&self, g: &Graph, owned: &[usize], advice: &Bits) -> bool {
        let ev = Evaluator::new(g, self.scheme.as_ref(), ViewRule::Strict);
        owned.iter().all(|&i| ev.decide(i, &[], Some(advice)))
    }
}

impl NondetProtocol for ExtractedProtocol {
    fn name(&self) -> String {
        format!("extracted-{}", self.scheme.name())
    }

    fn n(&self) -> usize {
        self.n
    }

    fn advice_len(&self) -> usize {
        self.advice_len
    }

    /// Alice fills Bob's gadget with the zero vector; her nodes never see it.
    fn accept_a(&self, x: &[bool], advice: &Bits) -> bool {
        let g = self.graph(x, &vec![false; self.n]);
        self.side_accepts(&g, &self.alice, advice)
    }

    fn accept_b(&self, y: &[bool], advice: &Bits) -> bool {
        let g = self.graph(&vec![false; self.n], y);
        self.side_accepts(&g, &self.bob, advice)
    }

    /// The scheme's structured space on `G(x, y)` when it has one.
    fn candidates(&self, x: &[bool], y: &[bool]) -> Result<Vec<Bits>, CcError> {
        match self.scheme.structured_space(&self.graph(x, y)) {
            Some(space) => Ok(space
                .into_iter()
                .filter_map(|p| match p {
                    Proof::Global(gp) => Some(gp.bits),
                    _ => None,
                })
                .collect()),
            None => all_strings(self.advice_len),
        }
    }
}
