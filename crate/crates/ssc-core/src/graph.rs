//! The directed graph of a pattern matrix, the color change rule and the
//! structural rank machinery built on it.
//!
//! For an `p x q` pattern, the graph has nodes `1..=max(p,q)` and an edge
//! `(i, j)` whenever entry `(j, i)` is nonzero; `*` entries form solid edges,
//! `?` entries dashed ones. A node `i` with exactly one white out-neighbor
//! `j`, reached by a `*` edge, forces `j` black. The fixpoint of this rule
//! (the derived set) decides full row rank and row independence, and its
//! complement yields an explicit rank-deficiency certificate.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::pattern::{NumericMatrix, PatternMatrix, PatternSymbol};

/// Graph view of a pattern matrix: node set plus the solid/dashed edge split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternGraph {
    node_count: usize,
    star_edges: BTreeSet<(usize, usize)>,
    quest_edges: BTreeSet<(usize, usize)>,
}

impl PatternGraph {
    /// Builds the graph of a pattern matrix. Nodes are 1-based, matching the
    /// convention used in reports and DOT output.
    pub fn of(m: &PatternMatrix) -> Self {
        let node_count = m.rows().max(m.cols());
        let mut star_edges = BTreeSet::new();
        let mut quest_edges = BTreeSet::new();
        for j in 0..m.rows() {
            for i in 0..m.cols() {
                match m.get(j, i) {
                    PatternSymbol::Star => {
                        star_edges.insert((i + 1, j + 1));
                    }
                    PatternSymbol::Quest => {
                        quest_edges.insert((i + 1, j + 1));
                    }
                    PatternSymbol::Zero => {}
                }
            }
        }
        PatternGraph { node_count, star_edges, quest_edges }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn star_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.star_edges
    }

    pub fn quest_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.quest_edges
    }
}

/// One firing of the color change rule: `forcing` had `forced` as its unique
/// white out-neighbor through a `*` edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ForceStep {
    pub forcing: usize,
    pub forced: usize,
}

/// The black set reached from some initial coloring, with the firing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    black: BTreeSet<usize>,
    trace: Vec<ForceStep>,
}

impl Coloring {
    pub fn black(&self) -> &BTreeSet<usize> {
        &self.black
    }

    pub fn trace(&self) -> &[ForceStep] {
        &self.trace
    }

    pub fn is_black(&self, node: usize) -> bool {
        self.black.contains(&node)
    }

    /// `{1, 2, 3}`-style rendering for reports.
    pub fn black_set_string(&self) -> String {
        let items: Vec<String> = self.black.iter().map(|n| n.to_string()).collect();
        format!("{{{}}}", items.join(", "))
    }
}

/// Runs the color change rule to its fixpoint starting from `initial_black`.
///
/// Candidate forcing nodes are examined in ascending index order and
/// re-examined whenever one of their out-neighbors turns black, so the trace
/// is deterministic. The fixpoint itself is order-independent.
pub fn derived_set(m: &PatternMatrix, initial_black: &BTreeSet<usize>) -> Result<Coloring> {
    let nodes = m.rows().max(m.cols());
    if let Some(&bad) = initial_black.iter().find(|&&n| n == 0 || n > nodes) {
        return Err(Error::Argument(format!(
            "seed node {} out of range 1..={}",
            bad, nodes
        )));
    }

    // out_edges[i] lists (j, is_star) for the edge (i+1, j+1)
    let mut out_edges: Vec<Vec<(usize, bool)>> = vec![Vec::new(); nodes];
    let mut in_nodes: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for j in 0..m.rows() {
        for i in 0..m.cols() {
            let sym = m.get(j, i);
            if sym.is_nonzero() {
                out_edges[i].push((j, sym == PatternSymbol::Star));
                in_nodes[j].push(i);
            }
        }
    }

    let mut black = vec![false; nodes];
    for &n in initial_black {
        black[n - 1] = true;
    }
    let mut trace = Vec::new();
    let mut worklist: BTreeSet<usize> = (0..nodes).collect();
    while let Some(i) = worklist.pop_first() {
        let mut white_iter = out_edges[i].iter().filter(|&&(j, _)| !black[j]);
        let candidate = white_iter.next().copied();
        if white_iter.next().is_some() {
            continue; // more than one white out-neighbor
        }
        if let Some((j, true)) = candidate {
            black[j] = true;
            trace.push(ForceStep { forcing: i + 1, forced: j + 1 });
            for &i2 in &in_nodes[j] {
                worklist.insert(i2);
            }
        }
    }

    let black_set = black
        .iter()
        .enumerate()
        .filter_map(|(idx, &b)| b.then_some(idx + 1))
        .collect();
    Ok(Coloring { black: black_set, trace })
}

/// Structural full row rank: every real matrix in the pattern class has full
/// row rank. Holds exactly when the derived set covers all row indices.
pub fn full_row_rank(m: &PatternMatrix) -> bool {
    if m.rows() > m.cols() {
        return false;
    }
    let coloring = derived_set(m, &BTreeSet::new()).expect("empty seed is always valid");
    (1..=m.rows()).all(|r| coloring.is_black(r))
}

/// Whether the pattern row `m` is independent of `n`: every vanishing left
/// combination of any realization of their stack has zero coefficient on `m`.
/// Decided by membership of node 1 in the derived set of the stacked pattern.
/// `n` may have zero rows, in which case this asks for a `*` entry in `m`.
pub fn is_independent(m: &PatternMatrix, n: &PatternMatrix) -> Result<bool> {
    if m.rows() != 1 {
        return Err(Error::Shape(format!(
            "independence is defined for a single pattern row, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if m.cols() != n.cols() {
        return Err(Error::Shape(format!(
            "row has {} columns but matrix is {}x{}",
            m.cols(),
            n.rows(),
            n.cols()
        )));
    }
    let stacked = crate::pattern::stack_rows(&[m.clone(), n.clone()])?;
    let coloring = derived_set(&stacked, &BTreeSet::new())?;
    Ok(coloring.is_black(1))
}

/// A certificate that a pattern matrix is not structurally full row rank:
/// a realization `t` in the class and a nonzero row vector `z`, supported on
/// the rows missing from the derived set, with `z^T t = 0` exactly.
///
/// Per column, the entries of the missing rows are chosen so that their sum
/// vanishes: `*` entries get value 1 and one designated entry absorbs the
/// negated partial sum (a `?` if present, otherwise the last `*`, which the
/// fixpoint guarantees is not the only nonzero). All values are integers, so
/// the annihilation is exact in floating point.
pub fn rank_deficiency_witness(m: &PatternMatrix) -> Option<(NumericMatrix, Vec<f64>)> {
    let coloring = derived_set(m, &BTreeSet::new()).expect("empty seed is always valid");
    let missing: Vec<usize> = (1..=m.rows()).filter(|&r| !coloring.is_black(r)).collect();
    if missing.is_empty() {
        return None;
    }

    let mut t = NumericMatrix::zeros(m.rows(), m.cols());
    for r in 1..=m.rows() {
        if coloring.is_black(r) {
            for c in 0..m.cols() {
                if m.get(r - 1, c) == PatternSymbol::Star {
                    t.set(r - 1, c, 1.0);
                }
            }
        }
    }
    for c in 0..m.cols() {
        let nonzero: Vec<(usize, PatternSymbol)> = missing
            .iter()
            .map(|&r| (r, m.get(r - 1, c)))
            .filter(|&(_, s)| s.is_nonzero())
            .collect();
        if nonzero.is_empty() {
            continue;
        }
        let designated = nonzero
            .iter()
            .rev()
            .find(|&&(_, s)| s == PatternSymbol::Quest)
            .or_else(|| nonzero.last())
            .copied()
            .expect("nonzero is not empty");
        // A lone * among the missing rows would have fired the rule.
        debug_assert!(
            !(nonzero.len() == 1 && designated.1 == PatternSymbol::Star),
            "column {} has a unique white star out-neighbor at the fixpoint",
            c + 1
        );
        let mut partial = 0.0;
        for &(r, s) in &nonzero {
            if r == designated.0 {
                continue;
            }
            if s == PatternSymbol::Star {
                t.set(r - 1, c, 1.0);
                partial += 1.0;
            }
            // a non-designated ? stays 0
        }
        // keep a designated * nonzero: the rule above makes -partial != 0
        t.set(designated.0 - 1, c, if partial == 0.0 { 0.0 } else { -partial });
    }

    let z: Vec<f64> = (1..=m.rows())
        .map(|r| if coloring.is_black(r) { 0.0 } else { 1.0 })
        .collect();
    debug_assert!(m.contains(&t).unwrap_or(false), "witness left its pattern class");
    debug_assert!((0..m.cols()).all(|c| {
        (0..m.rows()).map(|r| z[r] * t.get(r, c)).sum::<f64>() == 0.0
    }));
    Some((t, z))
}

/// Renders the graph of a pattern matrix as DOT text. `*` edges are solid,
/// `?` edges dashed; nodes of the overlay coloring are filled black.
pub fn export_dot(m: &PatternMatrix, overlay: Option<&Coloring>) -> String {
    let graph = PatternGraph::of(m);
    let mut out = String::from("digraph pattern {\n");
    for node in 1..=graph.node_count() {
        let black = overlay.map(|c| c.is_black(node)).unwrap_or(false);
        if black {
            let _ = writeln!(
                out,
                "  {node} [style=filled, fillcolor=black, fontcolor=white];"
            );
        } else {
            let _ = writeln!(out, "  {node};");
        }
    }
    for &(i, j) in graph.star_edges() {
        let _ = writeln!(out, "  {i} -> {j};");
    }
    for &(i, j) in graph.quest_edges() {
        let _ = writeln!(out, "  {i} -> {j} [style=dashed];");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::stack_rows;

    fn pat(s: &str) -> PatternMatrix {
        s.parse().unwrap()
    }

    fn black(nodes: &[usize]) -> BTreeSet<usize> {
        nodes.iter().copied().collect()
    }

    // node 1 of the running example with its output row stacked below
    fn stacked_node_one() -> PatternMatrix {
        pat("0 * 0 0\n* * * 0\n0 0 0 *\n* 0 0 0\n* 0 0 0")
    }

    #[test]
    fn graph_of_single_star() {
        let g = PatternGraph::of(&pat("*"));
        assert_eq!(g.node_count(), 1);
        let expected: BTreeSet<(usize, usize)> = [(1, 1)].into_iter().collect();
        assert_eq!(g.star_edges(), &expected);
        assert!(g.quest_edges().is_empty());
    }

    #[test]
    fn graph_of_stacked_node_matches_figure() {
        let g = PatternGraph::of(&stacked_node_one());
        assert_eq!(g.node_count(), 5);
        let expected: BTreeSet<(usize, usize)> =
            [(1, 2), (1, 4), (1, 5), (2, 1), (2, 2), (3, 2), (4, 3)]
                .into_iter()
                .collect();
        assert_eq!(g.star_edges(), &expected);
        assert!(g.quest_edges().is_empty());
    }

    #[test]
    fn graph_of_all_zero_is_edgeless() {
        let g = PatternGraph::of(&pat("0 0\n0 0"));
        assert_eq!(g.node_count(), 2);
        assert!(g.star_edges().is_empty() && g.quest_edges().is_empty());
    }

    #[test]
    fn derived_set_of_stacked_node() {
        let coloring = derived_set(&stacked_node_one(), &BTreeSet::new()).unwrap();
        assert_eq!(coloring.black(), &black(&[1, 2, 3]));
        // first firing is the unique forced move available from all-white
        assert_eq!(coloring.trace()[0], ForceStep { forcing: 3, forced: 2 });
    }

    #[test]
    fn derived_set_single_row() {
        let coloring = derived_set(&pat("* 0"), &BTreeSet::new()).unwrap();
        assert_eq!(coloring.black(), &black(&[1]));
    }

    #[test]
    fn derived_set_with_full_seed_is_fixed() {
        let m = pat("* ?\n0 *");
        let seed = black(&[1, 2]);
        let coloring = derived_set(&m, &seed).unwrap();
        assert_eq!(coloring.black(), &seed);
        assert!(coloring.trace().is_empty());
    }

    #[test]
    fn derived_set_rejects_bad_seed() {
        let m = pat("* 0");
        assert!(matches!(
            derived_set(&m, &black(&[5])),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn full_row_rank_basics() {
        assert!(full_row_rank(&pat("*")));
        assert!(!full_row_rank(&pat("?")));
        assert!(full_row_rank(&pat("* 0\n0 *")));
        assert!(!full_row_rank(&pat("* *\n* *")));
        // more rows than columns can never be full row rank
        assert!(!full_row_rank(&pat("*\n*")));
    }

    #[test]
    fn full_row_rank_of_node_one_with_input() {
        // [A_1 B_1] of the running example
        let m = pat("0 * 0 0 0\n* * * 0 *\n0 0 0 * 0\n* 0 0 0 0");
        assert!(full_row_rank(&m));
    }

    #[test]
    fn independence_examples() {
        assert!(is_independent(&pat("* 0"), &pat("0 *")).unwrap());
        assert!(!is_independent(&pat("? 0"), &pat("0 *")).unwrap());

        // input row of node 1 against its remaining rows and output row
        let m = pat("* * * 0");
        let n = pat("0 * 0 0\n0 0 0 *\n* 0 0 0\n* 0 0 0");
        assert!(is_independent(&m, &n).unwrap());

        assert!(matches!(
            is_independent(&pat("* 0"), &pat("*")),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn independence_with_no_constraining_rows() {
        let none = PatternMatrix::empty(2);
        assert!(is_independent(&pat("0 *"), &none).unwrap());
        assert!(!is_independent(&pat("0 ?"), &none).unwrap());
        assert!(!is_independent(&pat("0 0"), &none).unwrap());
    }

    #[test]
    fn witness_for_quest_scalar() {
        let (t, z) = rank_deficiency_witness(&pat("?")).unwrap();
        assert_eq!(t.get(0, 0), 0.0);
        assert_eq!(z, vec![1.0]);
    }

    #[test]
    fn witness_for_repeated_star_rows() {
        let m = pat("* *\n* *");
        let (t, z) = rank_deficiency_witness(&m).unwrap();
        assert!(m.contains(&t).unwrap());
        assert!(z.iter().any(|&v| v != 0.0));
        for c in 0..t.cols() {
            let dot: f64 = (0..t.rows()).map(|r| z[r] * t.get(r, c)).sum();
            assert_eq!(dot, 0.0);
        }
    }

    #[test]
    fn witness_absent_for_structurally_nonsingular() {
        assert!(rank_deficiency_witness(&pat("* 0\n0 *")).is_none());
    }

    #[test]
    fn witness_mixes_stars_and_quests() {
        // star column sums among missing rows must be absorbed by a quest
        let m = pat("* *\n? *\n* ?");
        if let Some((t, z)) = rank_deficiency_witness(&m) {
            assert!(m.contains(&t).unwrap());
            for c in 0..t.cols() {
                let dot: f64 = (0..t.rows()).map(|r| z[r] * t.get(r, c)).sum();
                assert_eq!(dot, 0.0);
            }
        } else {
            panic!("3x2 pattern cannot be full row rank");
        }
    }

    #[test]
    fn dot_output_styles() {
        let dot = export_dot(&pat("*"), None);
        assert!(dot.contains("1 -> 1;"));

        let m = pat("* ?\n0 *");
        let dot = export_dot(&m, None);
        assert!(dot.contains("2 -> 1 [style=dashed];"));
        assert!(dot.contains("1 -> 1;"));

        let coloring = derived_set(&stacked_node_one(), &BTreeSet::new()).unwrap();
        let dot = export_dot(&stacked_node_one(), Some(&coloring));
        assert_eq!(dot.matches("style=filled").count(), 3);
    }
}
