//! Numeric ground truth at desk scale: seeded sampling and exhaustive
//! enumeration of pattern classes, rank and controllability tests on real
//! matrices, and falsification searches that cross-check the structural
//! verdicts.
//!
//! Sampling can refute a structural "controllable" verdict but never prove
//! one; enumeration over a finite grid is authoritative only for the grid.

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::StructuredNetwork;
use crate::pattern::{stack_rows, NumericMatrix, PatternMatrix, PatternSymbol};

/// Hard cap on the number of realizations an enumeration may produce.
pub const ENUMERATION_BUDGET: u128 = 1_000_000;

/// Configuration for seeded random sampling of pattern classes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleConfig {
    pub seed: u64,
    pub trials: usize,
    /// Magnitude range for `*` entries; the sign is chosen at random. The
    /// lower bound keeps `*` values boundedly away from zero.
    pub star_range: (f64, f64),
    /// Probability that a `?` entry is realized as exactly zero.
    pub quest_zero_probability: f64,
    /// Magnitude range for nonzero realizations of `?` entries.
    pub quest_range: (f64, f64),
    /// Relative rank tolerance (scaled by the largest singular value).
    pub rank_tolerance: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            seed: 0,
            trials: 200,
            star_range: (0.1, 2.0),
            quest_zero_probability: 0.3,
            quest_range: (0.1, 2.0),
            rank_tolerance: 1e-9,
        }
    }
}

/// Finite value sets used to enumerate a pattern class exhaustively.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationGrid {
    star_values: Vec<f64>,
    quest_values: Vec<f64>,
}

impl EnumerationGrid {
    pub fn new(star_values: Vec<f64>, quest_values: Vec<f64>) -> Result<Self> {
        if star_values.is_empty() || star_values.contains(&0.0) {
            return Err(Error::Argument(
                "star grid values must be nonempty and nonzero".into(),
            ));
        }
        if !quest_values.contains(&0.0) {
            return Err(Error::Argument("quest grid values must contain zero".into()));
        }
        Ok(EnumerationGrid { star_values, quest_values })
    }

    pub fn star_values(&self) -> &[f64] {
        &self.star_values
    }

    pub fn quest_values(&self) -> &[f64] {
        &self.quest_values
    }

    fn values_for(&self, sym: PatternSymbol) -> &[f64] {
        match sym {
            PatternSymbol::Star => &self.star_values,
            PatternSymbol::Quest => &self.quest_values,
            PatternSymbol::Zero => &[],
        }
    }
}

impl Default for EnumerationGrid {
    fn default() -> Self {
        EnumerationGrid {
            star_values: vec![-2.0, -1.0, 1.0, 2.0],
            quest_values: vec![-1.0, 0.0, 1.0],
        }
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&trial.to_le_bytes());
    key[16..].copy_from_slice(b"ssc-class-sample");
    ChaCha8Rng::from_seed(key)
}

fn sample_magnitude<R: Rng>(rng: &mut R, range: (f64, f64)) -> f64 {
    let mag = rng.random_range(range.0..=range.1);
    if rng.random_bool(0.5) {
        -mag
    } else {
        mag
    }
}

/// Draws a member of the pattern class, deterministic in `(cfg.seed, trial)`.
pub fn sample(m: &PatternMatrix, cfg: &SampleConfig, trial: u64) -> NumericMatrix {
    let mut rng = trial_rng(cfg.seed, trial);
    sample_with(m, cfg, &mut rng)
}

fn sample_with<R: Rng>(m: &PatternMatrix, cfg: &SampleConfig, rng: &mut R) -> NumericMatrix {
    let mut out = NumericMatrix::zeros(m.rows(), m.cols());
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let v = match m.get(r, c) {
                PatternSymbol::Zero => 0.0,
                PatternSymbol::Star => sample_magnitude(rng, cfg.star_range),
                PatternSymbol::Quest => {
                    if rng.random_bool(cfg.quest_zero_probability) {
                        0.0
                    } else {
                        sample_magnitude(rng, cfg.quest_range)
                    }
                }
            };
            out.set(r, c, v);
        }
    }
    debug_assert!(m.contains(&out).unwrap_or(false));
    out
}

/// Exhaustive enumeration of the grid realizations of a pattern class.
pub struct ClassEnumeration<'a> {
    pattern: &'a PatternMatrix,
    grid: &'a EnumerationGrid,
    /// (row, col) of each non-`0` entry.
    positions: Vec<(usize, usize)>,
    /// Odometer over value indices; `None` once exhausted.
    state: Option<Vec<usize>>,
    len: u128,
}

impl<'a> ClassEnumeration<'a> {
    /// Total number of realizations.
    pub fn len(&self) -> u128 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

impl Iterator for ClassEnumeration<'_> {
    type Item = NumericMatrix;

    fn next(&mut self) -> Option<NumericMatrix> {
        let state = self.state.as_mut()?;
        let mut out = NumericMatrix::zeros(self.pattern.rows(), self.pattern.cols());
        for (&(r, c), &idx) in self.positions.iter().zip(state.iter()) {
            let sym = self.pattern.get(r, c);
            out.set(r, c, self.grid.values_for(sym)[idx]);
        }
        // advance the odometer
        let mut done = true;
        for (pos, idx) in state.iter_mut().enumerate() {
            let (r, c) = self.positions[pos];
            let radix = self.grid.values_for(self.pattern.get(r, c)).len();
            *idx += 1;
            if *idx < radix {
                done = false;
                break;
            }
            *idx = 0;
        }
        if done {
            self.state = None;
        }
        Some(out)
    }
}

/// Enumerates every grid realization of `m`, failing fast when the product
/// of choices exceeds [`ENUMERATION_BUDGET`].
pub fn enumerate_class<'a>(
    m: &'a PatternMatrix,
    grid: &'a EnumerationGrid,
) -> Result<ClassEnumeration<'a>> {
    let positions: Vec<(usize, usize)> = (0..m.rows())
        .flat_map(|r| (0..m.cols()).map(move |c| (r, c)))
        .filter(|&(r, c)| m.get(r, c).is_nonzero())
        .collect();
    let mut count: u128 = 1;
    for &(r, c) in &positions {
        count = count.saturating_mul(grid.values_for(m.get(r, c)).len() as u128);
        if count > ENUMERATION_BUDGET {
            return Err(Error::Budget { count, limit: ENUMERATION_BUDGET });
        }
    }
    Ok(ClassEnumeration {
        pattern: m,
        grid,
        state: Some(vec![0; positions.len()]),
        positions,
        len: count,
    })
}

fn to_dmatrix(x: &NumericMatrix) -> DMatrix<f64> {
    DMatrix::from_row_iterator(x.rows(), x.cols(), x.entries().iter().copied())
}

fn from_dmatrix(x: &DMatrix<f64>) -> NumericMatrix {
    let mut out = NumericMatrix::zeros(x.nrows(), x.ncols());
    for r in 0..x.nrows() {
        for c in 0..x.ncols() {
            out.set(r, c, x[(r, c)]);
        }
    }
    out
}

fn rank_of(x: &DMatrix<f64>, tol: f64) -> usize {
    debug_assert!(tol > 0.0, "rank tolerance must be positive");
    if x.nrows() == 0 || x.ncols() == 0 {
        return 0;
    }
    let sv = x.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0f64, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max).count()
}

/// Numeric rank with a tolerance relative to the largest singular value.
pub fn numeric_rank(x: &NumericMatrix, tol: f64) -> usize {
    rank_of(&to_dmatrix(x), tol)
}

/// Controllability by the rank of `[B, AB, ..., A^(n-1)B]`. Columns are
/// normalized before the rank test so that the relative tolerance is not
/// dominated by the growth of the powers of `A`.
pub fn kalman_controllable(a: &NumericMatrix, b: &NumericMatrix, tol: f64) -> Result<bool> {
    check_system_shapes(a, b)?;
    let n = a.rows();
    let a = to_dmatrix(a);
    let b = to_dmatrix(b);
    let m = b.ncols();
    let mut ctrb = DMatrix::zeros(n, n * m);
    let mut block = b;
    for k in 0..n {
        ctrb.view_mut((0, k * m), (n, m)).copy_from(&block);
        block = &a * block;
    }
    for mut col in ctrb.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= norm;
        }
    }
    Ok(rank_of(&ctrb, tol) == n)
}

/// Controllability by the eigenvalue test: `[A - lambda I, B]` must have full
/// row rank at every eigenvalue of `A`.
pub fn pbh_controllable(a: &NumericMatrix, b: &NumericMatrix, tol: f64) -> Result<bool> {
    check_system_shapes(a, b)?;
    let n = a.rows();
    let ad = to_dmatrix(a);
    let schur = ad
        .clone()
        .try_schur(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numeric("Schur iteration did not converge".into()))?;
    let eigenvalues = schur.complex_eigenvalues();

    let ac = ad.map(|v| Complex::new(v, 0.0));
    let bc = to_dmatrix(b).map(|v| Complex::new(v, 0.0));
    for lambda in eigenvalues.iter() {
        let mut pencil = DMatrix::<Complex<f64>>::zeros(n, n + bc.ncols());
        let mut shifted = ac.clone();
        for i in 0..n {
            shifted[(i, i)] -= lambda;
        }
        pencil.view_mut((0, 0), (n, n)).copy_from(&shifted);
        pencil.view_mut((0, n), (n, bc.ncols())).copy_from(&bc);
        let sv = pencil.singular_values();
        let max = sv.iter().cloned().fold(0.0f64, f64::max);
        let rank = if max == 0.0 {
            0
        } else {
            sv.iter().filter(|&&s| s > tol * max).count()
        };
        if rank < n {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_system_shapes(a: &NumericMatrix, b: &NumericMatrix) -> Result<()> {
    if a.rows() != a.cols() {
        return Err(Error::Shape(format!(
            "state matrix must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if b.rows() != a.rows() {
        return Err(Error::Shape(format!(
            "input matrix has {} rows but the state dimension is {}",
            b.rows(),
            a.rows()
        )));
    }
    Ok(())
}

/// Searches for a realization of `m` without full row rank. The structural
/// witness is consulted first (it is a guaranteed counterexample); otherwise
/// the grid is enumerated when it fits in `budget`, falling back to seeded
/// random grid draws. `None` means no counterexample was found within the
/// search budget.
pub fn falsify_full_row_rank(
    m: &PatternMatrix,
    grid: &EnumerationGrid,
    budget: usize,
) -> Option<NumericMatrix> {
    let tol = SampleConfig::default().rank_tolerance;
    if let Some((t, _)) = crate::graph::rank_deficiency_witness(m) {
        return Some(t);
    }
    match enumerate_class(m, grid) {
        Ok(iter) if iter.len() <= budget as u128 => {
            for x in iter {
                if numeric_rank(&x, tol) < m.rows() {
                    return Some(x);
                }
            }
            None
        }
        _ => {
            let mut rng = trial_rng(0x5cc0_fa15, 0);
            for _ in 0..budget {
                let mut x = NumericMatrix::zeros(m.rows(), m.cols());
                for r in 0..m.rows() {
                    for c in 0..m.cols() {
                        let vals = grid.values_for(m.get(r, c));
                        if !vals.is_empty() {
                            x.set(r, c, vals[rng.random_range(0..vals.len())]);
                        }
                    }
                }
                if numeric_rank(&x, tol) < m.rows() {
                    return Some(x);
                }
            }
            None
        }
    }
}

/// Brute-force independence: `e_1` must lie in the column space of every
/// grid realization of `col(m, n)`; equivalently no realization admits a
/// left-null vector with nonzero first coefficient.
pub fn oracle_independent(
    m: &PatternMatrix,
    n: &PatternMatrix,
    grid: &EnumerationGrid,
) -> Result<bool> {
    if m.rows() != 1 {
        return Err(Error::Shape(format!(
            "independence is defined for a single pattern row, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let stacked = stack_rows(&[m.clone(), n.clone()])?;
    let tol = SampleConfig::default().rank_tolerance;
    let rows = stacked.rows();
    for t in enumerate_class(&stacked, grid)? {
        let td = to_dmatrix(&t);
        let mut extended = DMatrix::zeros(rows, stacked.cols() + 1);
        extended.view_mut((0, 0), (rows, stacked.cols())).copy_from(&td);
        extended[(0, stacked.cols())] = 1.0;
        if rank_of(&extended, tol) != rank_of(&td, tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Aggregate result of [`network_numeric_check`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NetworkCheckSummary {
    pub trials: usize,
    pub passes: usize,
    pub failures: usize,
    pub seed: u64,
    /// Trial index of the first failing sample, reproducible together with
    /// the seed.
    pub first_failure_trial: Option<u64>,
    pub tolerance: f64,
}

impl NetworkCheckSummary {
    pub fn all_passed(&self) -> bool {
        self.failures == 0
    }
}

/// Samples numeric networks from the pattern classes and runs the Kalman
/// test (plus the eigenvalue test for small state dimensions) on each. A
/// failing trial refutes a structural "controllable" verdict; all passing is
/// supporting evidence only.
pub fn network_numeric_check(
    net: &StructuredNetwork,
    cfg: &SampleConfig,
) -> Result<NetworkCheckSummary> {
    let mut passes = 0;
    let mut failures = 0;
    let mut first_failure = None;
    for trial in 0..cfg.trials as u64 {
        let mut rng = trial_rng(cfg.seed, trial);
        let (a, b) = sample_closed_loop(net, cfg, &mut rng);
        let mut ok = kalman_controllable(&a, &b, cfg.rank_tolerance)?;
        if ok && a.rows() <= 12 {
            ok = pbh_controllable(&a, &b, cfg.rank_tolerance)?;
        }
        if ok {
            passes += 1;
        } else {
            failures += 1;
            first_failure.get_or_insert(trial);
        }
    }
    Ok(NetworkCheckSummary {
        trials: cfg.trials,
        passes,
        failures,
        seed: cfg.seed,
        first_failure_trial: first_failure,
        tolerance: cfg.rank_tolerance,
    })
}

/// One numeric closed loop `(A + BWC, BH)` sampled from the network classes.
fn sample_closed_loop<R: Rng>(
    net: &StructuredNetwork,
    cfg: &SampleConfig,
    rng: &mut R,
) -> (NumericMatrix, NumericMatrix) {
    let n = net.state_dim();
    let nn = net.node_count();
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DMatrix::<f64>::zeros(n, nn);
    let mut c = DMatrix::<f64>::zeros(nn, n);
    let mut offset = 0;
    for (k, node) in net.nodes().iter().enumerate() {
        let dim = node.dim();
        let ak = to_dmatrix(&sample_with(node.a(), cfg, rng));
        let bk = to_dmatrix(&sample_with(node.b(), cfg, rng));
        let ck = to_dmatrix(&sample_with(node.c(), cfg, rng));
        a.view_mut((offset, offset), (dim, dim)).copy_from(&ak);
        b.view_mut((offset, k), (dim, 1)).copy_from(&bk);
        c.view_mut((k, offset), (1, dim)).copy_from(&ck);
        offset += dim;
    }
    let w = to_dmatrix(&sample_with(net.w(), cfg, rng));
    let h = to_dmatrix(&sample_with(net.h(), cfg, rng));
    let closed = &a + &b * &w * &c;
    let inputs = &b * &h;
    (from_dmatrix(&closed), from_dmatrix(&inputs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(s: &str) -> PatternMatrix {
        s.parse().unwrap()
    }

    fn num(rows: &[Vec<f64>]) -> NumericMatrix {
        NumericMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn sampling_is_deterministic_and_in_class() {
        let cfg = SampleConfig { seed: 7, ..SampleConfig::default() };
        let m = pat("0 * ?\n* 0 *");
        let a = sample(&m, &cfg, 3);
        let b = sample(&m, &cfg, 3);
        assert_eq!(a.entries(), b.entries());
        assert!(m.contains(&a).unwrap());
        let c = sample(&m, &cfg, 4);
        assert_ne!(a.entries(), c.entries());
    }

    #[test]
    fn star_samples_stay_away_from_zero() {
        let cfg = SampleConfig::default();
        let m = pat("*");
        for trial in 0..200 {
            let x = sample(&m, &cfg, trial);
            assert!(x.get(0, 0).abs() >= 0.1);
        }
    }

    #[test]
    fn zero_pattern_samples_to_zero() {
        let x = sample(&pat("0"), &SampleConfig::default(), 0);
        assert_eq!(x.get(0, 0), 0.0);
    }

    #[test]
    fn enumeration_counts() {
        let grid = EnumerationGrid::default();
        assert_eq!(enumerate_class(&pat("*"), &grid).unwrap().count(), 4);
        let quests: Vec<NumericMatrix> = enumerate_class(&pat("?"), &grid).unwrap().collect();
        assert_eq!(quests.len(), 3);
        assert!(quests.iter().any(|x| x.get(0, 0) == 0.0));
        assert_eq!(enumerate_class(&pat("* ?"), &grid).unwrap().len(), 12);
        let m = pat("* ?");
        for x in enumerate_class(&m, &grid).unwrap() {
            assert!(m.contains(&x).unwrap());
        }
    }

    #[test]
    fn enumeration_budget_guard() {
        let grid = EnumerationGrid::default();
        // 4^11 > 1e6 realizations
        let big = pat("* * * * * * * * * * *");
        match enumerate_class(&big, &grid) {
            Err(Error::Budget { count, .. }) => assert!(count > ENUMERATION_BUDGET),
            other => panic!("expected budget error, got {:?}", other.map(|e| e.len())),
        }
    }

    #[test]
    fn grid_invariants_are_enforced() {
        assert!(EnumerationGrid::new(vec![0.0, 1.0], vec![0.0]).is_err());
        assert!(EnumerationGrid::new(vec![1.0], vec![1.0]).is_err());
    }

    #[test]
    fn numeric_rank_examples() {
        assert_eq!(
            numeric_rank(&num(&[vec![1., 0., 0.], vec![0., 1., 0.], vec![0., 0., 1.]]), 1e-9),
            3
        );
        assert_eq!(numeric_rank(&num(&[vec![1., 2.], vec![2., 4.]]), 1e-9), 1);
        assert_eq!(numeric_rank(&num(&[vec![0.]]), 1e-9), 0);
    }

    #[test]
    fn kalman_examples() {
        let chain_a = num(&[vec![0., 1.], vec![0., 0.]]);
        let chain_b = num(&[vec![0.], vec![1.]]);
        assert!(kalman_controllable(&chain_a, &chain_b, 1e-9).unwrap());

        let eye = num(&[vec![1., 0.], vec![0., 1.]]);
        let b1 = num(&[vec![1.], vec![0.]]);
        assert!(!kalman_controllable(&eye, &b1, 1e-9).unwrap());

        assert!(matches!(
            kalman_controllable(&chain_b, &chain_b, 1e-9),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn pbh_agrees_on_the_small_cases() {
        let chain_a = num(&[vec![0., 1.], vec![0., 0.]]);
        let chain_b = num(&[vec![0.], vec![1.]]);
        assert!(pbh_controllable(&chain_a, &chain_b, 1e-9).unwrap());

        let eye = num(&[vec![1., 0.], vec![0., 1.]]);
        let b1 = num(&[vec![1.], vec![0.]]);
        assert!(!pbh_controllable(&eye, &b1, 1e-9).unwrap());

        // block-diagonal A with B touching only the first block
        let a = num(&[vec![1., 0.], vec![0., 2.]]);
        let b = num(&[vec![1.], vec![0.]]);
        assert!(!pbh_controllable(&a, &b, 1e-9).unwrap());
    }

    #[test]
    fn falsification_examples() {
        let grid = EnumerationGrid::default();
        let x = falsify_full_row_rank(&pat("?"), &grid, 10_000).unwrap();
        assert_eq!(x.get(0, 0), 0.0);
        assert!(falsify_full_row_rank(&pat("* 0\n0 *"), &grid, 10_000).is_none());
    }

    #[test]
    fn oracle_independence_examples() {
        let grid = EnumerationGrid::default();
        assert!(oracle_independent(&pat("* 0"), &pat("0 *"), &grid).unwrap());
        assert!(!oracle_independent(&pat("? 0"), &pat("0 *"), &grid).unwrap());
    }

    #[test]
    fn network_check_is_deterministic() {
        let node = crate::node::NodeSystem::new(
            pat("0"),
            pat("*"),
            pat("*"),
        )
        .unwrap();
        let net = StructuredNetwork::new(vec![node], pat("0"), pat("*")).unwrap();
        let cfg = SampleConfig { seed: 11, trials: 50, ..SampleConfig::default() };
        let s1 = network_numeric_check(&net, &cfg).unwrap();
        let s2 = network_numeric_check(&net, &cfg).unwrap();
        assert_eq!(s1.passes, s2.passes);
        assert_eq!(s1.failures, 0);
        assert!(s1.all_passed());
    }
}
