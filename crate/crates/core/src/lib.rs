//! Finite-group workbench for nilpotency laws.
//!
//! Measures how much of `G^{k+1}` satisfies `[x_1, ..., x_{k+1}] = 1`,
//! checks the twelve-condition commutator lemma that forces
//! `[g_1, g_2, g_3] = 1`, searches its open variants for counterexamples,
//! and replays the translate-intersection argument that produces a
//! class-2 subgroup of finite index.

pub mod catalog;
pub mod certificate;
pub mod density;
pub mod error;
pub mod formats;
pub mod group;
pub mod lemma;
pub mod pattern;
pub mod recheck;
pub mod replay;
pub mod report;
mod sampling;

pub use catalog::{GroupSpec, DEFAULT_ORDER_CAP};
pub use density::DensityEstimate;
pub use error::{Error, Result};
pub use group::{CommutatorTable, Element, Group, GroupError, Subgroup};
pub use pattern::{Side, TranslationPattern};
pub use report::Report;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
