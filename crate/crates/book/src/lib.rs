//! The guide in `book/` is rendered by mdbook, which cannot run listings that
//! depend on workspace crates. Each chapter is included here so `cargo test`
//! runs its code blocks as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/stress.md")]
pub mod stress {}

#[doc = include_str!("../../../book/src/discretization.md")]
pub mod discretization {}

#[doc = include_str!("../../../book/src/time-stepping.md")]
pub mod time_stepping {}

#[doc = include_str!("../../../book/src/verification.md")]
pub mod verification {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
