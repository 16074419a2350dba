//! Coherence for free Gray monoids and free braided Gray monoids, with a
//! checker for the calculus of components.
//!
//! - [`freecat`]: 1-cells of the free (braided) Gray monoid on a multigraph.
//! - [`rewrite`]: directed rewriting, normal forms and the decision procedure.
//! - [`measures`]: termination measures.
//! - [`components`]: expressions, typing and equation derivations.
//! - [`interp`]: interpretation in the free model.
//! - [`cli`]: the `graycoh` command-line tool.

pub mod cli;
pub mod components;
pub mod freecat;
pub mod interp;
pub mod lexer;
pub mod measures;
pub mod rewrite;
pub mod signature;

pub use freecat::{BasicCell, Mode, Name, ObjSeq, OneCell};
pub use rewrite::{decide_equal, normal_form, normalize, RewritePath};
pub use signature::{builtin_theory, parse_theory, Multigraph, Theory};
