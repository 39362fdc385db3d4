//! Exact number-field towers, the Galois tree they induce, and bounded model
//! checking of first-order sentences over its finite levels.

pub mod error;
pub mod factor;
pub mod formula;
pub mod galois_tree;
pub mod model_check;
pub mod numberfield;
pub mod poly;
pub mod tower;

pub use error::{Error, Result};
pub use formula::{classify, parse, Class, Formula, Term};
pub use galois_tree::{GaloisTree, PathPrefix, ProductNode, TreeNode};
pub use model_check::{eval_finite, SearchOutcome, SubtreeSpec, TheoryVerdict, VerdictRecord};
pub use numberfield::{FieldElement, NumberField};
pub use poly::{Field, Poly, PolyRing, QPoly, Rational, RationalField};
pub use tower::{extend_tower, Tower, TowerLevel};
