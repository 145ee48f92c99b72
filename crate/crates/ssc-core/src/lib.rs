//! Strong structural controllability of structured networks.
//!
//! A structured network couples single-input single-output node systems,
//! each given by pattern matrices over `{0, *, ?}`, through structured
//! interconnection patterns `W` and `H`. The closed loop is the structured
//! system `x' = (A + BWC)x + BHu`, and the network is controllable exactly
//! when two pattern matrices built from it have structural full row rank.
//! That rank test runs on a graph coloring fixpoint, and each node can first
//! be replaced by a standard node system of dimension one or two, making the
//! test independent of the node state dimensions.
//!
//! Modules:
//! - [`pattern`]: the three-symbol matrix algebra and block assembly;
//! - [`graph`]: the color change rule, derived sets, structural rank,
//!   independence and rank-deficiency witnesses;
//! - [`node`]: node validation, the input-row split, properties S1-S4 and
//!   the C1-C6 classification with its standard node table;
//! - [`network`]: network assembly, the direct and the reduced
//!   controllability tests, verdicts and reports;
//! - [`oracle`]: numeric sampling/enumeration cross-checks (Kalman and
//!   eigenvalue tests, falsification searches);
//! - [`io`]: text/JSON formats for patterns, nodes and networks;
//! - [`gen`]: random generators for property tests and benchmarks.

pub mod error;
pub mod gen;
pub mod graph;
pub mod io;
pub mod network;
pub mod node;
pub mod oracle;
pub mod pattern;

pub use error::{Error, Result};
pub use graph::{derived_set, export_dot, full_row_rank, is_independent, rank_deficiency_witness};
pub use graph::{Coloring, PatternGraph};
pub use network::{Method, StructuredNetwork, Verdict};
pub use node::{Condition, NodeSystem, PropertyFlags};
pub use pattern::{NumericMatrix, PatternMatrix, PatternSymbol};
