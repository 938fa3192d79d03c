//! Two-party nondeterministic protocols and their translation to and from
//! verification schemes on the graphs `G(n,t,x,y)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::bits::{bits_for, Bits};
use crate::canon::CanonError;
use crate::graph::GraphError;
use crate::harness::HarnessError;
use crate::proof::ProofError;
use crate::schemes::SchemeError;

pub mod compile;
pub mod extract;
pub mod lf;
pub mod phi;

pub use compile::{compile_protocol, structure_certificate, verify_structure, CompiledScheme, Layout, Role, StructureVerifier};
pub use extract::{extract_protocol, ExtractedProtocol};
pub use lf::{build_lf, build_lf_from, parse_lf, sides, LfInstance, LfLanguage, LfParse};
pub use phi::{all_vectors, gadget_size, phi_decode, phi_encode, Gadget, MAX_BITS};

/// Largest advice space enumerated by [`NondetProtocol::candidates`].
pub const MAX_ADVICE_BITS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CcError {
    #[error("{0}-bit inputs are outside the supported range 1..={MAX_BITS}")]
    TooManyBits(usize),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("node {node} sees past its owner's side")]
    ViewCrossesCut { node: u64 },
    #[error("advice space of 2^{log2} strings is too large to enumerate")]
    BudgetTooLarge { log2: usize },
    #[error(transparent)]
    Canon(#[from] CanonError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error(transparent)]
    Proof(#[from] ProofError),
}

/// Predicates `f(x, y)` on two `n`-bit halves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoolFunction {
    Neq,
    Eq,
    /// All `2n` bits are 1.
    And,
    Const1,
}

impl BoolFunction {
    pub const ALL: [BoolFunction; 4] = [BoolFunction::Neq, BoolFunction::Eq, BoolFunction::And, BoolFunction::Const1];

    pub fn eval(&self, x: &[bool], y: &[bool]) -> bool {
        match self {
            BoolFunction::Neq => x != y,
            BoolFunction::Eq => x == y,
            BoolFunction::And => x.iter().chain(y).all(|&b| b),
            BoolFunction::Const1 => true,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            BoolFunction::Neq => "neq",
            BoolFunction::Eq => "eq",
            BoolFunction::And => "and",
            BoolFunction::Const1 => "const1",
        }
    }

    /// A single-round nondeterministic protocol for the function.
    pub fn protocol(&self, n: usize) -> Arc<dyn NondetProtocol> {
        match self {
            BoolFunction::Neq => Arc::new(NeqProtocol { n }),
            BoolFunction::Eq => Arc::new(EqProtocol { n }),
            BoolFunction::And => Arc::new(AndProtocol { n }),
            BoolFunction::Const1 => Arc::new(ConstProtocol { n }),
        }
    }
}

impl fmt::Display for BoolFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoolFunction {
    type Err = CcError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BoolFunction::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| CcError::InvalidParameters(format!("unknown function {s:?}")))
    }
}

/// Alice and Bob each check one advice string against their own input; the
/// protocol accepts `(x, y)` iff some advice passes both checks.
pub trait NondetProtocol: Send + Sync {
    fn name(&self) -> String;
    /// Input length per side.
    fn n(&self) -> usize;
    fn advice_len(&self) -> usize;
    fn accept_a(&self, x: &[bool], advice: &Bits) -> bool;
    fn accept_b(&self, y: &[bool], advice: &Bits) -> bool;
    /// Quantifier alternations; only existential advice is supported.
    fn level(&self) -> usize {
        1
    }
    /// Advice strings that are tried for `(x, y)`; every string by default.
    fn candidates(&self, _x: &[bool], _y: &[bool]) -> Result<Vec<Bits>, CcError> {
        all_strings(self.advice_len())
    }
}

pub(crate) fn all_strings(len: usize) -> Result<Vec<Bits>, CcError> {
    if len > MAX_ADVICE_BITS {
        return Err(CcError::BudgetTooLarge { log2: len });
    }
    Ok((0..1u64 << len).map(|v| Bits::from_uint(v, len)).collect())
}

/// The advice that convinces both players, if any.
pub fn witness(p: &dyn NondetProtocol, x: &[bool], y: &[bool]) -> Result<Option<Bits>, CcError> {
    Ok(p.candidates(x, y)?.into_iter().find(|a| p.accept_a(x, a) && p.accept_b(y, a)))
}

pub fn decide(p: &dyn NondetProtocol, x: &[bool], y: &[bool]) -> Result<bool, CcError> {
    Ok(witness(p, x, y)?.is_some())
}

/// Advice is a position `i` and two bits `a != b` with `x_i = a`, `y_i = b`.
#[derive(Debug, Clone, Copy)]
pub struct NeqProtocol {
    pub n: usize,
}

impl NeqProtocol {
    fn index_bits(&self) -> usize {
        bits_for(self.n as u64 - 1)
    }

    fn split(&self, advice: &Bits) -> Option<(usize, bool, bool)> {
        let w = self.index_bits();
        if advice.len() != w + 2 {
            return None;
        }
        let i = advice.read_uint(0, w)? as usize;
        (i < self.n).then(|| (i, advice.get(w), advice.get(w + 1)))
    }
}

impl NondetProtocol for NeqProtocol {
    fn name(&self) -> String {
        "neq".into()
    }

    fn n(&self) -> usize {
        self.n
    }

    fn advice_len(&self) -> usize {
        self.index_bits() + 2
    }

    fn accept_a(&self, x: &[bool], advice: &Bits) -> bool {
        self.split(advice).is_some_and(|(i, a, b)| a != b && x[i] == a)
    }

    fn accept_b(&self, y: &[bool], advice: &Bits) -> bool {
        self.split(advice).is_some_and(|(i, _, b)| y[i] == b)
    }
}

/// Advice is Alice's input; both sides compare.
#[derive(Debug, Clone, Copy)]
pub struct EqProtocol {
    pub n: usize,
}

impl NondetProtocol for EqProtocol {
    fn name(&self) -> String {
        "eq".into()
    }

    fn n(&self) -> usize {
        self.n
    }

    fn advice_len(&self) -> usize {
        self.n
    }

    fn accept_a(&self, x: &[bool], advice: &Bits) -> bool {
        advice.len() == x.len() && advice.iter().eq(x.iter().copied())
    }

    fn accept_b(&self, y: &[bool], advice: &Bits) -> bool {
        self.accept_a(y, advice)
    }
}

/// No advice; each side checks its own bits are all 1.
#[derive(Debug, Clone, Copy)]
pub struct AndProtocol {
    pub n: usize,
}

impl NondetProtocol for AndProtocol {
    fn name(&self) -> String {
        "and".into()
    }

    fn n(&self) -> usize {
        self.n
    }

    fn advice_len(&self) -> usize {
        0
    }

    fn accept_a(&self, x: &[bool], _advice: &Bits) -> bool {
        x.iter().all(|&b| b)
    }

    fn accept_b(&self, y: &[bool], _advice: &Bits) -> bool {
        y.iter().all(|&b| b)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConstProtocol {
    pub n: usize,
}

impl NondetProtocol for ConstProtocol {
    fn name(&self) -> String {
        "const1".into()
    }

    fn n(&self) -> usize {
        self.n
    }

    fn advice_len(&self) -> usize {
        0
    }

    fn accept_a(&self, _x: &[bool], _advice: &Bits) -> bool {
        true
    }

    fn accept_b(&self, _y: &[bool], _advice: &Bits) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn protocols_compute_their_functions() {
        for n in 1..=4 {
            for f in BoolFunction::ALL {
                let p = f.protocol(n);
                for x in all_vectors(n) {
                    for y in all_vectors(n) {
                        assert_eq!(decide(p.as_ref(), &x, &y).unwrap(), f.eval(&x, &y), "{f} {x:?} {y:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn neq_advice_width() {
        assert_eq!(NeqProtocol { n: 1 }.advice_len(), 2);
        assert_eq!(NeqProtocol { n: 4 }.advice_len(), 4);
        assert_eq!(NeqProtocol { n: 5 }.advice_len(), 5);
    }

    #[test]
    fn names_round_trip() {
        for f in BoolFunction::ALL {
            assert_eq!(f.as_str().parse::<BoolFunction>().unwrap(), f);
        }
        assert!("or".parse::<BoolFunction>().is_err());
    }

    #[test]
    fn oversized_advice_is_refused() {
        assert_eq!(all_strings(MAX_ADVICE_BITS + 1), Err(CcError::BudgetTooLarge { log2: MAX_ADVICE_BITS + 1 }));
    }
}
