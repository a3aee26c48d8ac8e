//! Runs the guide's code snippets as doc-tests. mdbook cannot resolve crate
//! dependencies in its own test runner, so each chapter is included here as
//! the documentation of an empty module.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/scalars.md")]
pub mod scalars {}
#[doc = include_str!("../../../book/src/series.md")]
pub mod series {}
#[doc = include_str!("../../../book/src/hypergeometric.md")]
pub mod hypergeometric {}
#[doc = include_str!("../../../book/src/closed-form.md")]
pub mod closed_form {}
#[doc = include_str!("../../../book/src/eigenfunctions.md")]
pub mod eigenfunctions {}
#[doc = include_str!("../../../book/src/language.md")]
pub mod language {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
