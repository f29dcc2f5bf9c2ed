//! The guide's chapters, compiled so `cargo test` runs their listings.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/fields.md")]
pub mod fields {}
#[doc = include_str!("../../../book/src/plane.md")]
pub mod plane {}
#[doc = include_str!("../../../book/src/pencil.md")]
pub mod pencil {}
#[doc = include_str!("../../../book/src/patterns.md")]
pub mod patterns {}
#[doc = include_str!("../../../book/src/sparsification.md")]
pub mod sparsification {}
#[doc = include_str!("../../../book/src/semisaturation.md")]
pub mod semisaturation {}
#[doc = include_str!("../../../book/src/bounds.md")]
pub mod bounds {}
#[doc = include_str!("../../../book/src/certificates.md")]
pub mod certificates {}
