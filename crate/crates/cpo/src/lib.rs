//! Termination prover for simply-typed higher-order rewrite systems.
//!
//! The ordering implemented here is the computability path ordering: a
//! recursive comparison of typed lambda-terms driven by a precedence on
//! function symbols, statuses for their argument lists, and a quasi-order
//! on types. Two definitions are available: the basic one, and an extension
//! that reaches function-symbol arguments through an accessibility relation.

pub mod access;
pub mod cpo;
pub mod parse;
pub mod prec;
pub mod print;
pub mod rewrite;
pub mod sig;
pub mod system;
pub mod term;
pub mod typeorder;
