//! Single-input single-output structured node systems and their
//! classification into the six interconnection conditions.
//!
//! A node system is a triple `(A, B, C)` of patterns with `A` square, `B` a
//! column and `C` a row. Classification looks at four independence
//! properties of the input row of `A`, the remaining rows and `C`, computed
//! with seeded colorings on the single stacked graph of `col(A, C)` so that
//! no derived set is recomputed from scratch.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{derived_set, full_row_rank, Coloring};
use crate::pattern::{concat_cols, stack_rows, PatternMatrix, PatternSymbol};

/// A SISO structured node system `(A, B, C)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeSystem {
    a: PatternMatrix,
    b: PatternMatrix,
    c: PatternMatrix,
}

/// Violations reported by [`NodeSystem::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeDiagnostic {
    /// `B` must have exactly one `*` entry and zeros elsewhere.
    InputNotSingleStar,
    /// `C` must have exactly one `*` entry and zeros elsewhere.
    OutputNotSingleStar,
    /// `[A B]` is not structurally full row rank, so no interconnection can
    /// make the node controllable.
    NodeUncontrollable,
}

impl fmt::Display for NodeDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeDiagnostic::InputNotSingleStar => {
                write!(f, "input pattern B must contain exactly one * and zeros elsewhere")
            }
            NodeDiagnostic::OutputNotSingleStar => {
                write!(f, "output pattern C must contain exactly one * and zeros elsewhere")
            }
            NodeDiagnostic::NodeUncontrollable => {
                write!(f, "node_uncontrollable: [A B] is not structurally full row rank")
            }
        }
    }
}

/// The input-row split of `A`: row `j` (the `*` position of `B`) and the rest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeSplit {
    /// 1-based index of the `*` entry of `B`.
    pub input_row: usize,
    /// Row `input_row` of `A` as a 1 x n pattern.
    pub a1: PatternMatrix,
    /// The remaining rows of `A` in their original order ((n-1) x n; zero
    /// rows for a one-dimensional node).
    pub a2: PatternMatrix,
}

/// The four independence properties of a node system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyFlags {
    pub s1: bool,
    pub s2: bool,
    pub s3: bool,
    pub s4: bool,
}

impl PropertyFlags {
    /// The unique condition determined by the flags.
    pub fn condition(self) -> Condition {
        let PropertyFlags { s1, s2, s3, s4 } = self;
        debug_assert!(!s1 || s2, "S1 implies S2");
        debug_assert!(!s3 || s4, "S3 implies S4");
        debug_assert!(!(s2 && s3), "S2 and S3 are mutually exclusive");
        debug_assert!(!(s1 && s4), "S1 and S4 are mutually exclusive");
        if s1 {
            Condition::C1
        } else if s3 {
            Condition::C2
        } else if s2 && s4 {
            Condition::C3
        } else if s2 {
            Condition::C4
        } else if s4 {
            Condition::C5
        } else {
            Condition::C6
        }
    }
}

/// The six mutually exclusive node conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
}

impl Condition {
    pub const ALL: [Condition; 6] = [
        Condition::C1,
        Condition::C2,
        Condition::C3,
        Condition::C4,
        Condition::C5,
        Condition::C6,
    ];

    /// The fixed 1- or 2-dimensional representative of this condition.
    pub fn standard_node(self) -> NodeSystem {
        let a = match self {
            Condition::C1 => "0 *\n* 0",
            Condition::C2 => "0",
            Condition::C3 => "*",
            Condition::C4 => "0 *\n* ?",
            Condition::C5 => "?",
            Condition::C6 => "0 0\n* 0",
        };
        let (b, c) = match self {
            Condition::C1 | Condition::C4 | Condition::C6 => ("*\n0", "* 0"),
            Condition::C2 | Condition::C3 | Condition::C5 => ("*", "*"),
        };
        NodeSystem::new(a.parse().unwrap(), b.parse().unwrap(), c.parse().unwrap())
            .expect("standard node shapes are consistent")
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

fn single_star_position(v: &[PatternSymbol]) -> Option<usize> {
    let mut pos = None;
    for (i, &s) in v.iter().enumerate() {
        match s {
            PatternSymbol::Star if pos.is_none() => pos = Some(i),
            PatternSymbol::Zero => {}
            _ => return None,
        }
    }
    pos
}

impl NodeSystem {
    /// Checks shapes only (`A` n x n, `B` n x 1, `C` 1 x n); assumption
    /// violations are reported by [`validate`](Self::validate).
    pub fn new(a: PatternMatrix, b: PatternMatrix, c: PatternMatrix) -> Result<Self> {
        if !a.is_square() || a.rows() == 0 {
            return Err(Error::Shape(format!(
                "node matrix A must be square and nonempty, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        if b.rows() != n || b.cols() != 1 {
            return Err(Error::Shape(format!(
                "node input B must be {}x1, got {}x{}",
                n,
                b.rows(),
                b.cols()
            )));
        }
        if c.rows() != 1 || c.cols() != n {
            return Err(Error::Shape(format!(
                "node output C must be 1x{}, got {}x{}",
                n,
                c.rows(),
                c.cols()
            )));
        }
        Ok(NodeSystem { a, b, c })
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &PatternMatrix {
        &self.a
    }

    pub fn b(&self) -> &PatternMatrix {
        &self.b
    }

    pub fn c(&self) -> &PatternMatrix {
        &self.c
    }

    /// Reports violations of the single-star input/output assumptions and of
    /// the standing hypothesis that `[A B]` is structurally full row rank.
    pub fn validate(&self) -> Vec<NodeDiagnostic> {
        let mut diags = Vec::new();
        if single_star_position(self.b.entries()).is_none() {
            diags.push(NodeDiagnostic::InputNotSingleStar);
        }
        if single_star_position(self.c.entries()).is_none() {
            diags.push(NodeDiagnostic::OutputNotSingleStar);
        }
        let ab = concat_cols(&[self.a.clone(), self.b.clone()])
            .expect("A and B have the same row count");
        if !full_row_rank(&ab) {
            diags.push(NodeDiagnostic::NodeUncontrollable);
        }
        diags
    }

    fn require_valid(&self) -> Result<()> {
        let diags = self.validate();
        if diags.is_empty() {
            Ok(())
        } else {
            let msgs: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
            Err(Error::Invalid(msgs.join("; ")))
        }
    }

    /// Splits `A` at the input row named by `B`'s `*` position.
    pub fn split(&self) -> Result<NodeSplit> {
        let pos = single_star_position(self.b.entries()).ok_or_else(|| {
            Error::Invalid(NodeDiagnostic::InputNotSingleStar.to_string())
        })?;
        let a1 = self.a.row_matrix(pos);
        let a2 = if self.dim() == 1 {
            PatternMatrix::empty(self.a.cols())
        } else {
            self.a.without_row(pos)
        };
        Ok(NodeSplit { input_row: pos + 1, a1, a2 })
    }

    /// The coloring data behind [`properties`](Self::properties): the stacked
    /// pattern `col(A, C)`, its derived set, and the two seeded extensions.
    pub fn coloring_detail(&self) -> Result<NodeColorings> {
        self.require_valid()?;
        let n = self.dim();
        let j = self.split()?.input_row;
        let stacked = stack_rows(&[self.a.clone(), self.c.clone()])?;
        let base = derived_set(&stacked, &BTreeSet::new())?;

        let mut seed_s2: BTreeSet<usize> = base.black().clone();
        seed_s2.insert(n + 1);
        let extended_s2 = derived_set(&stacked, &seed_s2)?;

        let mut seed_s4: BTreeSet<usize> = base.black().clone();
        seed_s4.insert(j);
        let extended_s4 = derived_set(&stacked, &seed_s4)?;

        Ok(NodeColorings { input_row: j, stacked, base, extended_s2, extended_s4 })
    }

    /// Evaluates the four properties with seeded colorings: `S1` and `S3`
    /// read the plain derived set; `S2` re-runs it with the output row node
    /// pre-colored and `S4` with the input row node pre-colored.
    pub fn properties(&self) -> Result<PropertyFlags> {
        let detail = self.coloring_detail()?;
        let n = self.dim();
        let j = detail.input_row;
        let flags = PropertyFlags {
            s1: detail.base.is_black(j),
            s2: detail.extended_s2.is_black(j),
            s3: detail.base.is_black(n + 1),
            s4: detail.extended_s4.is_black(n + 1),
        };

        #[cfg(debug_assertions)]
        {
            let split = self.split()?;
            let direct = PropertyFlags {
                s1: crate::graph::is_independent(
                    &split.a1,
                    &stack_rows(&[split.a2.clone(), self.c.clone()])?,
                )?,
                s2: crate::graph::is_independent(&split.a1, &split.a2)?,
                s3: crate::graph::is_independent(&self.c, &self.a)?,
                s4: crate::graph::is_independent(&self.c, &split.a2)?,
            };
            debug_assert_eq!(flags, direct, "seeded colorings disagree with direct evaluation");
        }

        Ok(flags)
    }

    /// The unique condition of this node system.
    pub fn classify(&self) -> Result<Condition> {
        Ok(self.properties()?.condition())
    }

    /// The node with `A` replaced by its diagonal modification.
    pub fn bar(&self) -> NodeSystem {
        NodeSystem {
            a: self.a.bar().expect("A is square by construction"),
            b: self.b.clone(),
            c: self.c.clone(),
        }
    }
}

/// Intermediate colorings used by classification, exposed for reporting.
#[derive(Clone, Debug)]
pub struct NodeColorings {
    pub input_row: usize,
    pub stacked: PatternMatrix,
    /// Derived set of `col(A, C)` from the all-white start.
    pub base: Coloring,
    /// Fixpoint after additionally seeding the output row node `n + 1`.
    pub extended_s2: Coloring,
    /// Fixpoint after additionally seeding the input row node `j`.
    pub extended_s4: Coloring,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(s: &str) -> PatternMatrix {
        s.parse().unwrap()
    }

    fn node(a: &str, b: &str, c: &str) -> NodeSystem {
        NodeSystem::new(pat(a), pat(b), pat(c)).unwrap()
    }

    fn example_node_one() -> NodeSystem {
        node("0 * 0 0\n* * * 0\n0 0 0 *\n* 0 0 0", "0\n*\n0\n0", "* 0 0 0")
    }

    #[test]
    fn validation_accepts_the_running_example() {
        assert!(example_node_one().validate().is_empty());
    }

    #[test]
    fn validation_flags_assumption_violations() {
        let n = node("0 0\n0 0", "?\n0", "* 0");
        let diags = n.validate();
        assert!(diags.contains(&NodeDiagnostic::InputNotSingleStar));
        assert!(diags.contains(&NodeDiagnostic::NodeUncontrollable));
    }

    #[test]
    fn scalar_quest_node_is_valid() {
        let n = node("?", "*", "*");
        assert!(n.validate().is_empty());
    }

    #[test]
    fn split_locates_the_input_row() {
        let split = example_node_one().split().unwrap();
        assert_eq!(split.input_row, 2);
        assert_eq!(split.a1, pat("* * * 0"));
        assert_eq!(split.a2, pat("0 * 0 0\n0 0 0 *\n* 0 0 0"));
    }

    #[test]
    fn split_of_scalar_node_has_empty_remainder() {
        let split = node("0", "*", "*").split().unwrap();
        assert_eq!(split.input_row, 1);
        assert_eq!(split.a1, pat("0"));
        assert_eq!(split.a2.rows(), 0);
    }

    #[test]
    fn split_respects_star_position() {
        let n = node("0 0 0\n0 0 0\n* * *", "0\n0\n*", "0 0 *");
        assert_eq!(n.split().unwrap().input_row, 3);
    }

    #[test]
    fn properties_of_the_running_example() {
        let flags = example_node_one().properties().unwrap();
        assert_eq!(flags, PropertyFlags { s1: true, s2: true, s3: false, s4: false });
        assert_eq!(flags.condition(), Condition::C1);
    }

    #[test]
    fn scalar_property_table() {
        let f = node("0", "*", "*").properties().unwrap();
        assert_eq!(f, PropertyFlags { s1: false, s2: false, s3: true, s4: true });
        assert_eq!(f.condition(), Condition::C2);

        let f = node("*", "*", "*").properties().unwrap();
        assert_eq!(f, PropertyFlags { s1: false, s2: true, s3: false, s4: true });
        assert_eq!(f.condition(), Condition::C3);

        let f = node("?", "*", "*").properties().unwrap();
        assert_eq!(f, PropertyFlags { s1: false, s2: false, s3: false, s4: true });
        assert_eq!(f.condition(), Condition::C5);
    }

    #[test]
    fn classification_requires_the_standing_hypothesis() {
        let n = node("0 0\n* 0", "0\n*", "* 0");
        assert!(matches!(n.classify(), Err(Error::Invalid(_))));
    }

    #[test]
    fn standard_nodes_classify_to_their_own_condition() {
        for c in Condition::ALL {
            assert_eq!(c.standard_node().classify().unwrap(), c);
        }
    }

    #[test]
    fn bar_node_changes_only_a() {
        let n = node("0 *\n* 0", "*\n0", "* 0").bar();
        assert_eq!(n.a(), &pat("* *\n* *"));
        assert_eq!(n.b(), &pat("*\n0"));
        assert_eq!(n.c(), &pat("* 0"));

        let bar_one = example_node_one().bar();
        assert_eq!(bar_one.a(), &pat("* * 0 0\n* ? * 0\n0 0 * *\n* 0 0 *"));
    }
}
