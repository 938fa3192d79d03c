//! Honest provers and radius-bounded verifiers.

use std::sync::Arc;

use crate::bits::bits_for;
use crate::graph::Graph;
use crate::language::{Language, LanguageError, StdLanguage};
use crate::proof::{Proof, Regime};
use crate::view::View;

pub mod adapters;
pub mod alos;
pub mod amos;
pub mod bipartite;
pub mod mst;
pub mod st;
pub mod universal;

pub use adapters::{AsMixed, LocalToGlobal, MixedToLocal};
pub use alos::{AlosLocal, LeaderMixed};
pub use amos::AmosGlobal;
pub use bipartite::{BipLocal, BipTable};
pub use mst::MstGlobal;
pub use st::StLocal;
pub use universal::Universal;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemeError {
    #[error("graph is not in language {0}")]
    NotInLanguage(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("node id {id} exceeds the scheme's id bound {bound}")]
    IdOutOfRange { id: u64, bound: u64 },
    #[error("value {value} does not fit the scheme's {width}-bit field")]
    FieldOverflow { value: u64, width: usize },
    #[error(transparent)]
    Language(#[from] LanguageError),
    #[error("unknown scheme {0:?}")]
    UnknownScheme(String),
}

/// A per-node decision procedure that sees only a [`View`].
pub trait Verifier: Send + Sync {
    fn radius(&self) -> usize;
    fn verify(&self, view: &View) -> bool;
}

/// Certificate sizes a scheme declares for a given instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Shape {
    pub local_width: Option<usize>,
    pub global_len: Option<usize>,
}

impl Shape {
    pub fn size(&self, n: usize) -> usize {
        n * self.local_width.unwrap_or(0) + self.global_len.unwrap_or(0)
    }
}

pub trait Scheme: Verifier {
    fn name(&self) -> String;
    fn regime(&self) -> Regime;
    fn language(&self) -> Arc<dyn Language>;
    /// Honest certificate for a yes-instance.
    fn prove(&self, g: &Graph) -> Result<Proof, SchemeError>;
    /// Declared certificate sizes on `g`.
    fn shape(&self, g: &Graph) -> Shape;
    /// A reduced certificate space that contains an accepted certificate
    /// whenever the verifier accepts any certificate on `g`, when the scheme
    /// knows one.
    fn structured_space(&self, _g: &Graph) -> Option<Vec<Proof>> {
        None
    }
}

/// Parameters every node is assumed to know in advance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeParams {
    /// Upper bound `M` on identifiers.
    pub id_bound: u64,
    /// Upper bound on edge weights.
    pub weight_bound: u64,
}

impl SchemeParams {
    pub fn for_graph(g: &Graph) -> Self {
        let weight_bound = g
            .edges()
            .into_iter()
            .filter_map(|(a, b)| g.edge_attr(a, b).unwrap().weight)
            .max()
            .unwrap_or(1);
        SchemeParams { id_bound: g.id_bound(), weight_bound }
    }

    pub fn id_bits(&self) -> usize {
        bits_for(self.id_bound)
    }
}

pub const SCHEME_NAMES: [&str; 8] =
    ["amos-global", "alos-local", "st-local", "mst-global", "bip-local", "bip-table", "leader-mixed", "universal:<lang>"];

/// Looks up a scheme by registry name.
pub fn build_scheme(name: &str, params: &SchemeParams) -> Result<Box<dyn Scheme>, SchemeError> {
    Ok(match name {
        "amos-global" => Box::new(AmosGlobal::new(params.id_bound)),
        "alos-local" => Box::new(AlosLocal::new(params.id_bound)),
        "st-local" => Box::new(StLocal::new(params.id_bound)),
        "mst-global" => Box::new(MstGlobal::new(params.id_bound, params.weight_bound)),
        "bip-local" => Box::new(BipLocal),
        "bip-table" => Box::new(BipTable::new(params.id_bound)),
        "leader-mixed" => Box::new(LeaderMixed::new(params.id_bound)),
        "always-accept-alos" => Box::new(AlwaysAccept::new(Arc::new(StdLanguage::Alos), 1)),
        "always-accept-odd" => Box::new(AlwaysAccept::new(Arc::new(StdLanguage::OddCycle), 1)),
        other => match other.strip_prefix("universal:") {
            Some(lang) => Box::new(Universal::new(Arc::new(lang.parse::<StdLanguage>()?))),
            None => return Err(SchemeError::UnknownScheme(other.to_string())),
        },
    })
}

/// Fails with `NotInLanguage` unless `g` belongs to `lang`.
pub(crate) fn require_member(lang: &dyn Language, g: &Graph) -> Result<(), SchemeError> {
    if lang.contains(g)? {
        Ok(())
    } else {
        Err(SchemeError::NotInLanguage(lang.name()))
    }
}

pub(crate) fn require_connected(g: &Graph) -> Result<(), SchemeError> {
    if g.is_connected() {
        Ok(())
    } else {
        Err(SchemeError::Disconnected)
    }
}

/// A verifier that accepts everything, paired with an arbitrary language.
/// Useful as the weakest possible adversary target.
pub struct AlwaysAccept {
    lang: Arc<dyn Language>,
    radius: usize,
}

impl AlwaysAccept {
    pub fn new(lang: Arc<dyn Language>, radius: usize) -> Self {
        AlwaysAccept { lang, radius }
    }
}

impl Verifier for AlwaysAccept {
    fn radius(&self) -> usize {
        self.radius
    }

    fn verify(&self, _view: &View) -> bool {
        true
    }
}

impl Scheme for AlwaysAccept {
    fn name(&self) -> String {
        format!("always-accept-{}", self.lang.name())
    }

    fn regime(&self) -> Regime {
        Regime::Local
    }

    fn language(&self) -> Arc<dyn Language> {
        self.lang.clone()
    }

    fn prove(&self, g: &Graph) -> Result<Proof, SchemeError> {
        require_member(self.lang.as_ref(), g)?;
        Ok(Proof::Local(crate::proof::LocalProof::empty_for(g)))
    }

    fn shape(&self, _g: &Graph) -> Shape {
        Shape { local_width: Some(0), global_len: None }
    }
}
