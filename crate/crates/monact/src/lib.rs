//! Finitely presented monoids, monoid morphisms, and right M-sets, with
//! enough machinery to verify, step by step, that a particular essential,
//! hyperconnected, local geometric morphism between presheaf toposes on
//! monoids fails to be locally connected.
//!
//! The crate is organized bottom-up:
//!
//! - [`rewriting`]: words, rewrite rules, critical pairs, normal forms;
//! - [`monoid`]: presentations with confluence checked at construction,
//!   and morphisms checked on relations;
//! - [`mset`]: right M-sets (regular, restricted, products, coproducts),
//!   connected components, closed predicates, partitions;
//! - [`predicate`]: the small predicate language used to name sub-M-sets;
//! - [`functors`]: the adjoint triple `f_! -| f^* -| f_*` induced by a
//!   morphism into a free monoid on one generator — tensor partitions,
//!   the binary-product comparison map, hom-sets, retract checks;
//! - [`config`]: the text format declaring all named objects;
//! - [`certify`]: the end-to-end verification pipeline and its report.
//!
//! All computations are bound-qualified where the objects are infinite:
//! results carry the degree bound they were established at, and only
//! statements that are exact (or certified by a closed-partition argument)
//! feed the final conclusion.

pub mod certify;
pub mod config;
pub mod functors;
pub mod monoid;
pub mod mset;
pub mod predicate;
pub mod rewriting;
pub mod uf;

pub use certify::{Report, verify_counterexample};
pub use config::Config;
pub use monoid::{MonoidMorphism, MonoidPresentation};
pub use mset::{Elem, MSet};
pub use rewriting::Word;
