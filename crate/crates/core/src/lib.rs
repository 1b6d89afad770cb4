//! Exact, law-checked Giry monad machinery on countable discrete spaces.
//!
//! * [`measure`]: probability measures on ℕ, `dirac`, `join`, pushforward.
//! * [`scvx`]: super convex spaces, affine sums and affine maps.
//! * [`algebras`]: barycenter maps and their laws.
//! * [`stdspace`]: finite partition refinement trees.
//! * [`amplitudes`]: ℓ₂-normalized complex rational amplitudes.
//! * [`suites`]: the named law suites behind the `girylab check` command.
//!
//! All arithmetic is exact; every law is checked with `==`.

pub mod algebras;
pub mod amplitudes;
pub mod error;
pub mod eval;
pub mod grid;
pub mod json;
pub mod measure;
pub mod rat;
pub mod report;
pub mod scvx;
pub mod stdspace;
pub mod suites;

pub use error::{Error, Result};
pub use measure::{join, CountableDist, DistOverDist, FinDist, IndexSet};
pub use rat::Rat;
