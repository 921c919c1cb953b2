//! Fundamental groups of finite graphs of finitely generated abelian
//! groups: exact arithmetic, the word problem, rationalization into a
//! rational-by-free quotient, Bass-Serre tree and cover exploration,
//! nonpositively-curved metrics, and exhaustion chains.

pub mod abelian;
pub mod bassserre;
pub mod cat0;
pub mod error;
pub mod exhaust;
pub mod gog;
pub mod intmat;
pub mod random;
pub mod ratmat;
pub mod rationalize;
pub mod suite;
pub mod words;

pub use abelian::{
    subgroup_from_generators, torsion_elements, AbElement, AbHom, CosetReducer, FgAbGroup,
    ImageSolver,
};
pub use bassserre::{cover_ball, tree_ball, CoverBall, TreeBall};
pub use cat0::{build_gram, build_gram_with_root_gram, verify_gram, GramAssignment};
pub use error::{Error, Result};
pub use exhaust::{build_chain, verify_chain, ChainStrategy, ExhaustionChain};
pub use gog::{GraphOfGroups, InclusionWitness, InducedMap, SpanningTree};
pub use intmat::{int, Int, IntMat, Smith};
pub use rationalize::{FreeWord, RationalizationContext, SemidirectElement};
pub use ratmat::{rat, rat_int, Rat, RatMat};
pub use words::{GroupWord, Letter, NormalForm, Pi1};
