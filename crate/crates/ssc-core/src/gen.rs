//! Random generators for valid node systems and networks, used by the
//! property suites and the benchmark command.

use rand::Rng;

use crate::graph::full_row_rank;
use crate::network::StructuredNetwork;
use crate::node::NodeSystem;
use crate::pattern::{concat_cols, PatternMatrix, PatternSymbol};

fn weighted_symbol<R: Rng>(rng: &mut R, p_zero: f64, p_star: f64) -> PatternSymbol {
    let x: f64 = rng.random();
    if x < p_zero {
        PatternSymbol::Zero
    } else if x < p_zero + p_star {
        PatternSymbol::Star
    } else {
        PatternSymbol::Quest
    }
}

fn random_pattern<R: Rng>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    p_zero: f64,
    p_star: f64,
) -> PatternMatrix {
    let entries = (0..rows * cols)
        .map(|_| weighted_symbol(rng, p_zero, p_star))
        .collect();
    PatternMatrix::new(rows, cols, entries).expect("positive dimensions")
}

fn single_star_column<R: Rng>(rng: &mut R, dim: usize) -> PatternMatrix {
    let pos = rng.random_range(0..dim);
    let entries = (0..dim)
        .map(|i| if i == pos { PatternSymbol::Star } else { PatternSymbol::Zero })
        .collect();
    PatternMatrix::new(dim, 1, entries).expect("dim >= 1")
}

/// A valid node system of the given dimension: `A` entries drawn with
/// weights (0.5, 0.35, 0.15) over `(0, *, ?)`, single-star `B` and `C` at
/// uniform positions, resampled until `[A B]` is structurally full row rank.
pub fn random_node<R: Rng>(rng: &mut R, dim: usize) -> NodeSystem {
    assert!(dim >= 1);
    loop {
        let a = random_pattern(rng, dim, dim, 0.5, 0.35);
        let b = single_star_column(rng, dim);
        let ab = concat_cols(&[a.clone(), b.clone()]).expect("same rows");
        if !full_row_rank(&ab) {
            continue;
        }
        let mut c = single_star_column(rng, dim);
        c = PatternMatrix::new(1, dim, c.entries().to_vec()).expect("transpose of a column");
        return NodeSystem::new(a, b, c).expect("shapes are consistent");
    }
}

/// A network over the given node dimensions: `W` entries drawn with weights
/// (0.6, 0.3, 0.1), `H` likewise but resampled until it has at least one `*`.
pub fn random_network<R: Rng>(rng: &mut R, dims: &[usize], inputs: usize) -> StructuredNetwork {
    assert!(!dims.is_empty() && inputs >= 1);
    let nodes: Vec<NodeSystem> = dims.iter().map(|&d| random_node(rng, d)).collect();
    let n = dims.len();
    let w = random_pattern(rng, n, n, 0.6, 0.3);
    let h = loop {
        let h = random_pattern(rng, n, inputs, 0.6, 0.3);
        if h.count(PatternSymbol::Star) > 0 {
            break h;
        }
    };
    StructuredNetwork::new(nodes, w, h).expect("shapes are consistent")
}

/// A network with random sizes: up to `max_nodes` nodes of dimension up to
/// `max_dim`, and up to `max_inputs` external inputs.
pub fn random_network_sized<R: Rng>(
    rng: &mut R,
    max_nodes: usize,
    max_dim: usize,
    max_inputs: usize,
) -> StructuredNetwork {
    let n = rng.random_range(1..=max_nodes);
    let dims: Vec<usize> = (0..n).map(|_| rng.random_range(1..=max_dim)).collect();
    let inputs = rng.random_range(1..=max_inputs);
    random_network(rng, &dims, inputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_nodes_satisfy_the_standing_hypothesis() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let dim = rng.random_range(1..=5);
            let node = random_node(&mut rng, dim);
            assert!(node.validate().is_empty());
        }
    }

    #[test]
    fn generated_networks_have_consistent_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let net = random_network_sized(&mut rng, 5, 4, 3);
            assert!(net.h().count(PatternSymbol::Star) > 0);
            assert_eq!(net.w().rows(), net.node_count());
        }
    }
}
