//! Clique-free color patterns from pencils of Hermitian unitals.
//!
//! The pipeline runs bottom-up through the modules:
//!
//! * [`field`]: `GF(q)` and `GF(q²)` for prime `q`;
//! * [`geometry`]: the projective plane `PG(2, q²)`, Hermitian unitals, and
//!   the affine plane `AG(2, q)`;
//! * [`pencil`]: the pencil `{U_λ}` sharing the tangent `ℓ_∞` at `p_∞`, the
//!   point set `P` and the common secants `L`;
//! * [`coloring`]: random colorings of `P` and their size windows;
//! * [`pattern`]: one graph per color on vertex set `L`, built from
//!   point-cliques, with `K_{k+1}` classification and fan counts;
//! * [`sparsify`]: the random Turánization that kills every degenerate clique
//!   and most fans;
//! * [`semisat`]: affine-plane edge colorings where every extension forces a
//!   new monochromatic clique;
//! * [`bounds`]: large `K_k`-free subsets and the lower-bound table.
//!
//! Every check reports through a [`certificate::Certificate`], and every
//! random draw comes from [`rng::substream`].
//!
//! ```
//! use unital::pencil::build_pencil;
//!
//! let pencil = build_pencil(3, Some(1)).unwrap();
//! assert_eq!(pencil.points().len(), 27);
//! assert_eq!(pencil.common_secants().len(), 63);
//! assert!(pencil.build_checks().passed());
//! ```

pub mod bounds;
pub mod certificate;
pub mod coloring;
pub mod field;
pub mod geometry;
pub mod graph;
pub mod pattern;
pub mod pencil;
pub mod rng;
pub mod semisat;
pub mod sparsify;

pub use certificate::{Certificate, CheckRecord, Verdict};
pub use graph::Graph;
