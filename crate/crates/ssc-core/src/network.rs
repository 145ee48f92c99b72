//! Structured networks: node systems coupled by interconnection patterns,
//! the direct controllability test on the closed-loop pattern and the
//! scalable test on the reduced network of standard node systems.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{full_row_rank, rank_deficiency_witness};
use crate::node::{Condition, NodeDiagnostic, NodeSystem};
use crate::pattern::{block_diag, concat_cols, NumericMatrix, PatternMatrix};

/// `N` node systems, an `N x N` coupling pattern `W` and an `N x m` external
/// input pattern `H`. The closed loop is `x' = (A + BWC)x + BHu`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuredNetwork {
    nodes: Vec<NodeSystem>,
    w: PatternMatrix,
    h: PatternMatrix,
}

/// Violations reported by [`StructuredNetwork::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NetworkDiagnostic {
    /// A node system violates its own assumptions (1-based node index).
    Node { node: usize, diagnostic: NodeDiagnostic },
    /// `[A_k B_k]` (or its bar variant) is not structurally full row rank, so
    /// the whole network is uncontrollable regardless of the interconnection.
    UncontrollableByCorollary { node: usize, bar: bool },
}

impl fmt::Display for NetworkDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetworkDiagnostic::Node { node, diagnostic } => {
                write!(f, "node {}: {}", node, diagnostic)
            }
            NetworkDiagnostic::UncontrollableByCorollary { node, bar } => write!(
                f,
                "network_uncontrollable_by_corollary_1: node {} fails the [{} B] full row rank test",
                node,
                if *bar { "Abar" } else { "A" }
            ),
        }
    }
}

/// Which of the two rank-tested pattern matrices a witness refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixSide {
    /// `[A + BWC  BH]`
    Plain,
    /// `[Abar + BWC  BH]`
    Bar,
}

impl MatrixSide {
    pub fn label(self) -> &'static str {
        match self {
            MatrixSide::Plain => "[A+BWC BH]",
            MatrixSide::Bar => "[Abar+BWC BH]",
        }
    }
}

/// A rank-deficiency certificate for one side of the direct test: a
/// realization of the tested pattern annihilated from the left by `z`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness {
    pub side: MatrixSide,
    /// Realization of the failing `n x (n + m)` pattern.
    pub matrix: NumericMatrix,
    /// Nonzero row vector with `z^T matrix = 0`.
    pub z: Vec<f64>,
}

impl Witness {
    /// Splits the witness realization into its state and input blocks.
    pub fn system(&self) -> Result<(NumericMatrix, NumericMatrix)> {
        self.matrix.split_cols(self.z.len())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Direct,
    Reduced,
}

/// The outcome of a controllability test.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub controllable: bool,
    /// Full row rank of the tested `[A + BWC  BH]`-side matrix.
    pub rank_a: bool,
    /// Full row rank of the tested bar-side matrix.
    pub rank_abar: bool,
    pub method: Method,
    /// `(condition of (A_k, B_k, C_k), condition of (Abar_k, B_k, C_k))` per
    /// node; empty when the per-node necessary test already failed.
    pub per_node_conditions: Vec<(Condition, Condition)>,
    /// Dimensions of the two tested matrices, `(rows, cols)` each.
    pub dims_a: (usize, usize),
    pub dims_abar: (usize, usize),
    /// State dimension of the reduced assemblies (reduced method only).
    pub reduced_rows: Option<usize>,
    /// Nodes whose `[A_k B_k]` or `[Abar_k B_k]` test failed (1-based).
    pub per_node_uncontrollable: Vec<usize>,
    /// Certificate for the first failing matrix, if any.
    pub witness: Option<Witness>,
}

impl StructuredNetwork {
    pub fn new(nodes: Vec<NodeSystem>, w: PatternMatrix, h: PatternMatrix) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Argument("a network needs at least one node".into()));
        }
        let n = nodes.len();
        if w.rows() != n || w.cols() != n {
            return Err(Error::Shape(format!(
                "coupling pattern W must be {}x{} for {} nodes, got {}x{}",
                n,
                n,
                n,
                w.rows(),
                w.cols()
            )));
        }
        if h.rows() != n || h.cols() == 0 {
            return Err(Error::Shape(format!(
                "input pattern H must have {} rows (one per node), got {}x{}",
                n,
                h.rows(),
                h.cols()
            )));
        }
        Ok(StructuredNetwork { nodes, w, h })
    }

    pub fn nodes(&self) -> &[NodeSystem] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Total state dimension across all nodes.
    pub fn state_dim(&self) -> usize {
        self.nodes.iter().map(NodeSystem::dim).sum()
    }

    pub fn input_count(&self) -> usize {
        self.h.cols()
    }

    pub fn w(&self) -> &PatternMatrix {
        &self.w
    }

    pub fn h(&self) -> &PatternMatrix {
        &self.h
    }

    /// Per-node assumption checks plus the necessary per-node rank tests.
    pub fn validate(&self) -> Vec<NetworkDiagnostic> {
        let mut diags = Vec::new();
        for (k, node) in self.nodes.iter().enumerate() {
            for d in node.validate() {
                if d == NodeDiagnostic::NodeUncontrollable {
                    diags.push(NetworkDiagnostic::UncontrollableByCorollary {
                        node: k + 1,
                        bar: false,
                    });
                } else {
                    diags.push(NetworkDiagnostic::Node { node: k + 1, diagnostic: d });
                }
            }
            if node.bar().validate().contains(&NodeDiagnostic::NodeUncontrollable) {
                diags.push(NetworkDiagnostic::UncontrollableByCorollary { node: k + 1, bar: true });
            }
        }
        diags
    }

    fn require_assumptions(&self) -> Result<()> {
        let hard: Vec<String> = self
            .validate()
            .into_iter()
            .filter(|d| matches!(d, NetworkDiagnostic::Node { .. }))
            .map(|d| d.to_string())
            .collect();
        if hard.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(hard.join("; ")))
        }
    }

    /// The closed-loop pattern `[A + BWC  BH]` (with `A` bar-modified when
    /// `use_bar` is set), of dimension `n x (n + m)`.
    pub fn assemble(&self, use_bar: bool) -> PatternMatrix {
        let a_blocks: Vec<PatternMatrix> = self
            .nodes
            .iter()
            .map(|node| {
                if use_bar {
                    node.a().bar().expect("node A is square")
                } else {
                    node.a().clone()
                }
            })
            .collect();
        let a = block_diag(&a_blocks).expect("at least one node");
        let b = block_diag(&self.nodes.iter().map(|n| n.b().clone()).collect::<Vec<_>>())
            .expect("at least one node");
        let c = block_diag(&self.nodes.iter().map(|n| n.c().clone()).collect::<Vec<_>>())
            .expect("at least one node");
        let bwc = b.mul(&self.w).and_then(|bw| bw.mul(&c)).expect("dimensions fixed at construction");
        let closed = a.add(&bwc).expect("same shape");
        let bh = b.mul(&self.h).expect("dimensions fixed at construction");
        concat_cols(&[closed, bh]).expect("same row count")
    }

    /// Replaces every node by the standard node system of its condition; the
    /// second network does the same for the bar-modified nodes. `W` and `H`
    /// carry over unchanged.
    pub fn reduce(&self) -> Result<(StructuredNetwork, StructuredNetwork)> {
        let mut hat_nodes = Vec::with_capacity(self.nodes.len());
        let mut bar_hat_nodes = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            hat_nodes.push(node.classify()?.standard_node());
            bar_hat_nodes.push(node.bar().classify()?.standard_node());
        }
        Ok((
            StructuredNetwork::new(hat_nodes, self.w.clone(), self.h.clone())?,
            StructuredNetwork::new(bar_hat_nodes, self.w.clone(), self.h.clone())?,
        ))
    }

    /// Decides strong structural controllability.
    ///
    /// A node failing its necessary `[A_k B_k]` / `[Abar_k B_k]` test settles
    /// the corresponding side without assembling it; a witness is still
    /// constructed from the assembled pattern so that every negative verdict
    /// carries a replayable numeric certificate.
    pub fn is_controllable(&self, method: Method) -> Result<Verdict> {
        self.require_assumptions()?;

        let mut culprits = Vec::new();
        let mut plain_ok = true;
        let mut bar_ok = true;
        for d in self.validate() {
            if let NetworkDiagnostic::UncontrollableByCorollary { node, bar } = d {
                if bar {
                    bar_ok = false;
                } else {
                    plain_ok = false;
                }
                if !culprits.contains(&node) {
                    culprits.push(node);
                }
            }
        }

        let mut per_node_conditions = Vec::new();
        if culprits.is_empty() {
            for node in &self.nodes {
                per_node_conditions.push((node.classify()?, node.bar().classify()?));
            }
        }

        let (rank_a, rank_abar, dims_a, dims_abar, reduced_rows) = match method {
            Method::Direct => {
                let dims = (self.state_dim(), self.state_dim() + self.input_count());
                let rank_a = plain_ok && full_row_rank(&self.assemble(false));
                let rank_abar = bar_ok && full_row_rank(&self.assemble(true));
                (rank_a, rank_abar, dims, dims, None)
            }
            Method::Reduced => {
                if culprits.is_empty() {
                    let (hat, bar_hat) = self.reduce()?;
                    let m_hat = hat.assemble(false);
                    let m_bar_hat = bar_hat.assemble(false);
                    let rows = hat.state_dim().max(bar_hat.state_dim());
                    (
                        full_row_rank(&m_hat),
                        full_row_rank(&m_bar_hat),
                        (m_hat.rows(), m_hat.cols()),
                        (m_bar_hat.rows(), m_bar_hat.cols()),
                        Some(rows),
                    )
                } else {
                    // classification is refused for a culprit node; the
                    // verdict is already determined by the necessary test
                    let dims = (self.state_dim(), self.state_dim() + self.input_count());
                    let rank_a = plain_ok && full_row_rank(&self.assemble(false));
                    let rank_abar = bar_ok && full_row_rank(&self.assemble(true));
                    (rank_a, rank_abar, dims, dims, None)
                }
            }
        };

        let witness = if !rank_a {
            self.direct_witness(MatrixSide::Plain)
        } else if !rank_abar {
            self.direct_witness(MatrixSide::Bar)
        } else {
            None
        };
        // the reduced and direct tests fail side by side, so a failing
        // verdict always has a certificate on the full closed-loop pattern
        debug_assert!(rank_a && rank_abar || witness.is_some());

        Ok(Verdict {
            controllable: rank_a && rank_abar,
            rank_a,
            rank_abar,
            method,
            per_node_conditions,
            dims_a,
            dims_abar,
            reduced_rows,
            per_node_uncontrollable: culprits,
            witness,
        })
    }

    /// Rank-deficiency certificate for one side of the direct test, built on
    /// the full closed-loop pattern so that it replays as a numeric system.
    fn direct_witness(&self, side: MatrixSide) -> Option<Witness> {
        let pattern = self.assemble(side == MatrixSide::Bar);
        rank_deficiency_witness(&pattern).map(|(matrix, z)| Witness { side, matrix, z })
    }
}

/// Human-readable summary of a verdict.
pub fn verdict_report(v: &Verdict) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "verdict: {}\n",
        if v.controllable { "CONTROLLABLE" } else { "NOT CONTROLLABLE" }
    ));
    out.push_str(&format!(
        "method: {}\n",
        match v.method {
            Method::Direct => "direct",
            Method::Reduced => "reduced",
        }
    ));
    out.push_str(&format!(
        "{} ({}x{}): full row rank: {}\n",
        MatrixSide::Plain.label(),
        v.dims_a.0,
        v.dims_a.1,
        if v.rank_a { "yes" } else { "no" }
    ));
    out.push_str(&format!(
        "{} ({}x{}): full row rank: {}\n",
        MatrixSide::Bar.label(),
        v.dims_abar.0,
        v.dims_abar.1,
        if v.rank_abar { "yes" } else { "no" }
    ));
    if let Some(rows) = v.reduced_rows {
        out.push_str(&format!("reduced state dimension: {}\n", rows));
    }
    if !v.per_node_conditions.is_empty() {
        let conds: Vec<String> = v
            .per_node_conditions
            .iter()
            .enumerate()
            .map(|(k, (c, cb))| format!("{}:({}, {})", k + 1, c, cb))
            .collect();
        out.push_str(&format!("node conditions (plain, bar): {}\n", conds.join(" ")));
    }
    for node in &v.per_node_uncontrollable {
        out.push_str(&format!(
            "node {} is uncontrollable on its own; the network cannot be controllable\n",
            node
        ));
    }
    if let Some(w) = &v.witness {
        out.push_str(&format!("rank-deficiency witness for {}:\n", w.side.label()));
        let z: Vec<String> = w.z.iter().map(|v| format!("{v}")).collect();
        out.push_str(&format!("  z = [{}]\n", z.join(", ")));
        for r in 0..w.matrix.rows() {
            let row: Vec<String> = w.matrix.row(r).iter().map(|v| format!("{v}")).collect();
            out.push_str(&format!("  [{}]\n", row.join(", ")));
        }
    }
    out
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", verdict_report(self))
    }
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

    fn single_node_net(a: &str) -> StructuredNetwork {
        StructuredNetwork::new(vec![node(a, "*", "*")], pat("0"), pat("*")).unwrap()
    }

    #[test]
    fn construction_checks_block_dimensions() {
        let nodes = vec![node("0", "*", "*"), node("0", "*", "*")];
        let err = StructuredNetwork::new(nodes, pat("0"), pat("*\n*")).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn single_node_assembly_appends_the_input_column() {
        let net = single_node_net("?");
        assert_eq!(net.assemble(false), pat("? *"));
        assert_eq!(net.assemble(true), pat("? *"));
    }

    #[test]
    fn single_quest_node_is_controllable() {
        let v = net_verdict(&single_node_net("?"), Method::Direct);
        assert!(v.controllable && v.rank_a && v.rank_abar);
        let v = net_verdict(&single_node_net("?"), Method::Reduced);
        assert!(v.controllable);
    }

    fn net_verdict(net: &StructuredNetwork, method: Method) -> Verdict {
        net.is_controllable(method).unwrap()
    }

    #[test]
    fn scalar_integrator_network_reduces_to_the_interconnection() {
        let nodes = vec![node("0", "*", "*"), node("0", "*", "*")];
        let w = pat("0 *\n? 0");
        let h = pat("*\n0");
        let net = StructuredNetwork::new(nodes, w.clone(), h.clone()).unwrap();
        assert_eq!(net.assemble(false), concat_cols(&[w.clone(), h.clone()]).unwrap());
        assert_eq!(
            net.assemble(true),
            concat_cols(&[w.bar().unwrap(), h.clone()]).unwrap()
        );
        // the reduction maps integrators to themselves
        let (hat, _) = net.reduce().unwrap();
        assert_eq!(hat.nodes(), net.nodes());
    }

    #[test]
    fn validate_reports_corollary_failures() {
        // diagonal star A with B touching only the first state
        let bad = node("* 0\n0 *", "*\n0", "* 0");
        let net = StructuredNetwork::new(vec![bad], pat("0"), pat("*")).unwrap();
        let diags = net.validate();
        assert!(diags
            .iter()
            .any(|d| matches!(d, NetworkDiagnostic::UncontrollableByCorollary { node: 1, bar: true })));
        let v = net.is_controllable(Method::Direct).unwrap();
        assert!(!v.controllable);
        assert_eq!(v.per_node_uncontrollable, vec![1]);
        let w = v.witness.expect("failing verdict carries a witness");
        assert_eq!(w.side, MatrixSide::Bar);
    }

    #[test]
    fn assumption_violations_refuse_the_test() {
        let bad = node("?", "?", "*");
        let net = StructuredNetwork::new(vec![bad], pat("0"), pat("*")).unwrap();
        assert!(matches!(net.is_controllable(Method::Direct), Err(Error::Invalid(_))));
    }

    #[test]
    fn report_contains_rank_lines_and_conditions() {
        let net = single_node_net("?");
        let v = net.is_controllable(Method::Direct).unwrap();
        let report = verdict_report(&v);
        assert_eq!(report.matches("full row rank: yes").count(), 2);
        assert!(report.contains("C5"));

        let bad = StructuredNetwork::new(
            vec![node("* 0\n0 *", "*\n0", "* 0")],
            pat("0"),
            pat("*"),
        )
        .unwrap();
        let v = bad.is_controllable(Method::Direct).unwrap();
        let report = verdict_report(&v);
        assert!(report.contains("full row rank: no"));
        assert!(report.contains("witness"));
        assert!(report.contains(MatrixSide::Bar.label()));
    }

    #[test]
    fn witness_splits_into_a_numeric_system() {
        let bad = StructuredNetwork::new(
            vec![node("* 0\n0 *", "*\n0", "* 0")],
            pat("0"),
            pat("*"),
        )
        .unwrap();
        let v = bad.is_controllable(Method::Direct).unwrap();
        let w = v.witness.unwrap();
        let (a, b) = w.system().unwrap();
        assert_eq!((a.rows(), a.cols()), (2, 2));
        assert_eq!((b.rows(), b.cols()), (2, 1));
        // z annihilates the whole witness matrix
        for c in 0..w.matrix.cols() {
            let dot: f64 = (0..w.matrix.rows()).map(|r| w.z[r] * w.matrix.get(r, c)).sum();
            assert_eq!(dot, 0.0);
        }
    }
}
