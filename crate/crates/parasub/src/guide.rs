//! The mdbook guide under `book/`, compiled chapter by chapter so every
//! code block in the book runs under `cargo test --doc`.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/paraconvexity.md")]
pub mod paraconvexity {}

#[doc = include_str!("../../../book/src/error-bounds.md")]
pub mod error_bounds {}

#[doc = include_str!("../../../book/src/method.md")]
pub mod method {}

#[doc = include_str!("../../../book/src/certificates.md")]
pub mod certificates {}

#[doc = include_str!("../../../book/src/matrix-recovery.md")]
pub mod matrix_recovery {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli_reference {}
