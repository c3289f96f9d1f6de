//! Invariants of symmetric forms encoded as block designs.
//!
//! A design with blocks of size `n + 1` and point degree `d` encodes, through
//! the symbolic method, an invariant of degree `num_points` of forms of degree
//! `d` in `n + 1` variables. Evaluated at a sum of powers `L_1^d + ... + L_r^d`
//! the invariant becomes a sum over proper `r`-colorings of the collinearity
//! graph of products of block determinants, which is what this crate computes
//! exactly.
//!
//! Modules:
//! - [`design`]: block designs, parsing, validation, collinearity graphs
//! - [`chroma`]: chromatic number, criticality, cliques, coloring enumeration
//! - [`eval`]: exact evaluation at sums of powers of linear forms
//! - [`symmetry`]: automorphism groups and canonical keys
//! - [`census`]: monomial counts, covering bounds, secant codimensions
//! - [`gen`]: isomorph-free generation and the chromatic filter pipeline
//! - [`presets`]: named designs and form sets
//! - [`cli`]: the `chromainv` command line

pub mod census;
pub mod chroma;
pub mod cli;
pub mod design;
pub mod eval;
pub mod gen;
pub mod presets;
pub mod symmetry;

pub use design::{BlockDesign, CollinearityGraph, ValidationReport};
pub use eval::FormSet;
pub use num_bigint::BigInt;
