//! p-adic valuation trees of integer polynomials in one and two variables.
//!
//! The crate computes `nu_p(f(x, y))`, builds the labelled `p`-ary
//! (univariate) and `p^2`-ary (bivariate) valuation trees, classifies how
//! every starred vertex splits, and reads closed forms off finite trees.
//!
//! All polynomial machinery is generic over the coefficient type; the
//! aliases below fix it to arbitrary-precision integers ([`Poly`]) or to
//! overflow-checked machine integers ([`Poly64`], [`Poly128`]).

pub mod cli;
pub mod error;
pub mod padic;
pub mod poly;
pub mod render;
pub mod scalar;
pub mod sequences;
pub mod tree;
pub mod verify;

pub use error::{Error, ParseError, ParseErrorKind, Result};
pub use padic::{Prime, Valuation};
pub use poly::{Degree, Monomial, Polynomial, Var};
pub use scalar::Scalar;
pub use tree::{LabelRule, NodeLabel, ResidueClass, SplitAnalysis, SplitKind, TreeBuilder};

use num_bigint::BigInt;

pub type Poly = Polynomial<BigInt>;
pub type Poly64 = Polynomial<i64>;
pub type Poly128 = Polynomial<i128>;

pub type Tree = tree::ValuationTree<BigInt>;
pub type Tree64 = tree::ValuationTree<i64>;

pub type Class = ResidueClass<BigInt>;
