//! Pattern matrices over the symbol set `{0, *, ?}` and their algebra.
//!
//! A pattern matrix stands for the set of all real matrices that are zero
//! where the pattern is `0` and nonzero where it is `*`; `?` entries are
//! unconstrained. Addition and multiplication of symbols follow the fixed
//! three-symbol tables, which extend entrywise and by sum-of-products to
//! matrices.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One entry of a pattern matrix: forced zero, forced nonzero, or arbitrary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternSymbol {
    Zero,
    Star,
    Quest,
}

pub use PatternSymbol::{Quest, Star, Zero};

impl PatternSymbol {
    pub const ALL: [PatternSymbol; 3] = [Zero, Star, Quest];

    pub fn as_char(self) -> char {
        match self {
            Zero => '0',
            Star => '*',
            Quest => '?',
        }
    }

    pub fn from_char(ch: char) -> Option<Self> {
        match ch {
            '0' => Some(Zero),
            '*' => Some(Star),
            '?' => Some(Quest),
            _ => None,
        }
    }

    pub fn is_nonzero(self) -> bool {
        self != Zero
    }
}

/// Symbol addition: `0` is the identity; any other combination is
/// indeterminate (`* + *` can cancel).
impl Add for PatternSymbol {
    type Output = PatternSymbol;

    fn add(self, rhs: PatternSymbol) -> PatternSymbol {
        match (self, rhs) {
            (Zero, x) | (x, Zero) => x,
            _ => Quest,
        }
    }
}

/// Symbol multiplication: `0` annihilates, `* * *` stays nonzero, and any
/// product touching `?` is indeterminate.
impl Mul for PatternSymbol {
    type Output = PatternSymbol;

    fn mul(self, rhs: PatternSymbol) -> PatternSymbol {
        match (self, rhs) {
            (Zero, _) | (_, Zero) => Zero,
            (Star, Star) => Star,
            _ => Quest,
        }
    }
}

impl fmt::Display for PatternSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A dense matrix of [`PatternSymbol`]s, stored row-major.
///
/// Zero-row matrices are permitted so that the input-row split of a
/// one-dimensional node system has a well-defined remainder; parsers reject
/// them, so they never cross an external interface.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PatternMatrixRepr", into = "PatternMatrixRepr")]
pub struct PatternMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<PatternSymbol>,
}

impl PatternMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<PatternSymbol>) -> Result<Self> {
        if cols == 0 {
            return Err(Error::Argument("pattern matrix needs at least one column".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{}x{} pattern needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        Ok(PatternMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: &[Vec<PatternSymbol>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Shape("rows of unequal length".into()));
        }
        PatternMatrix::new(nrows, ncols, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        PatternMatrix::new(rows, cols, vec![Zero; rows * cols]).expect("cols >= 1")
    }

    /// A matrix with no rows; the neutral top block of a stack.
    pub fn empty(cols: usize) -> Self {
        PatternMatrix::new(0, cols, Vec::new()).expect("cols >= 1")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> PatternSymbol {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        self.entries[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[PatternSymbol] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn entries(&self) -> &[PatternSymbol] {
        &self.entries
    }

    /// The 1 x cols pattern holding the given row.
    pub fn row_matrix(&self, row: usize) -> PatternMatrix {
        PatternMatrix::new(1, self.cols, self.row(row).to_vec()).expect("row slice")
    }

    /// The pattern obtained by deleting the given row.
    pub fn without_row(&self, row: usize) -> PatternMatrix {
        let mut entries = Vec::with_capacity((self.rows - 1) * self.cols);
        for r in 0..self.rows {
            if r != row {
                entries.extend_from_slice(self.row(r));
            }
        }
        PatternMatrix::new(self.rows - 1, self.cols, entries).expect("row removed")
    }

    /// The pattern obtained by deleting the given column.
    pub fn without_col(&self, col: usize) -> Result<PatternMatrix> {
        if self.cols < 2 {
            return Err(Error::Argument("cannot drop the only column".into()));
        }
        let mut entries = Vec::with_capacity(self.rows * (self.cols - 1));
        for r in 0..self.rows {
            for c in 0..self.cols {
                if c != col {
                    entries.push(self.get(r, c));
                }
            }
        }
        PatternMatrix::new(self.rows, self.cols - 1, entries)
    }

    pub fn count(&self, sym: PatternSymbol) -> usize {
        self.entries.iter().filter(|&&s| s == sym).count()
    }

    /// Entrywise sum per the symbol addition table.
    pub fn add(&self, other: &PatternMatrix) -> Result<PatternMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Shape(format!(
                "cannot add {}x{} and {}x{} patterns",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| a + b)
            .collect();
        PatternMatrix::new(self.rows, self.cols, entries)
    }

    /// Sum-of-products matrix product per the symbol tables.
    pub fn mul(&self, other: &PatternMatrix) -> Result<PatternMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{} (inner dimensions differ)",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Zero;
                for l in 0..self.cols {
                    acc = acc + self.get(i, l) * other.get(l, j);
                }
                entries.push(acc);
            }
        }
        PatternMatrix::new(self.rows, other.cols, entries)
    }

    /// Diagonal modification: `0` becomes `*`, `*` and `?` become `?`;
    /// off-diagonal entries are untouched.
    pub fn bar(&self) -> Result<PatternMatrix> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "bar is defined for square patterns, got {}x{}",
                self.rows, self.cols
            )));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            out.entries[i * self.cols + i] = match self.get(i, i) {
                Zero => Star,
                _ => Quest,
            };
        }
        Ok(out)
    }

    /// Membership of a real matrix in this pattern's class: exact zero where
    /// the pattern is `0`, exact nonzero where it is `*`. This is a symbolic
    /// predicate; no tolerance is involved.
    pub fn contains(&self, x: &NumericMatrix) -> Result<bool> {
        if (self.rows, self.cols) != (x.rows, x.cols) {
            return Err(Error::Shape(format!(
                "pattern is {}x{} but realization is {}x{}",
                self.rows, self.cols, x.rows, x.cols
            )));
        }
        Ok(self.entries.iter().zip(&x.entries).all(|(&s, &v)| match s {
            Zero => v == 0.0,
            Star => v != 0.0,
            Quest => true,
        }))
    }
}

impl fmt::Display for PatternMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            if r > 0 {
                writeln!(f)?;
            }
            let line: Vec<String> = self.row(r).iter().map(|s| s.to_string()).collect();
            write!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PatternMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PatternMatrix({}x{})[{}]", self.rows, self.cols, self)
    }
}

/// Parses the text form: one row per line, entries from `{0,*,?}` separated
/// by spaces. Rows may also be written without separators (`0*?`).
impl FromStr for PatternMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut rows: Vec<Vec<PatternSymbol>> = Vec::new();
        for (lineno, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                if rows.is_empty() {
                    continue;
                }
                break; // blank line terminates the matrix
            }
            let mut row = Vec::new();
            for tok in line.split_whitespace() {
                for ch in tok.chars() {
                    let sym = PatternSymbol::from_char(ch).ok_or_else(|| {
                        Error::Parse(format!("line {}: invalid symbol {:?}", lineno + 1, ch))
                    })?;
                    row.push(sym);
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse("empty pattern matrix".into()));
        }
        PatternMatrix::from_rows(&rows).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// JSON form of a pattern matrix: row strings over `{0,*,?}`.
#[derive(Serialize, Deserialize)]
struct PatternMatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<String>,
}

impl TryFrom<PatternMatrixRepr> for PatternMatrix {
    type Error = Error;

    fn try_from(repr: PatternMatrixRepr) -> Result<Self> {
        if repr.rows == 0 {
            return Err(Error::Parse("pattern matrix needs at least one row".into()));
        }
        if repr.entries.len() != repr.rows {
            return Err(Error::Parse(format!(
                "expected {} row strings, got {}",
                repr.rows,
                repr.entries.len()
            )));
        }
        let mut rows = Vec::with_capacity(repr.rows);
        for (i, line) in repr.entries.iter().enumerate() {
            let row: Option<Vec<PatternSymbol>> =
                line.chars().map(PatternSymbol::from_char).collect();
            let row = row.ok_or_else(|| Error::Parse(format!("row {}: invalid symbol", i + 1)))?;
            if row.len() != repr.cols {
                return Err(Error::Parse(format!(
                    "row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    repr.cols
                )));
            }
            rows.push(row);
        }
        PatternMatrix::from_rows(&rows).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl From<PatternMatrix> for PatternMatrixRepr {
    fn from(m: PatternMatrix) -> Self {
        PatternMatrixRepr {
            rows: m.rows,
            cols: m.cols,
            entries: (0..m.rows)
                .map(|r| m.row(r).iter().map(|s| s.as_char()).collect())
                .collect(),
        }
    }
}

/// True when the pattern class of `m.mul(n)` is exactly the set of products
/// of class members, i.e. when every row of `n` (or every column of `m`) has
/// exactly one `*` and zeros elsewhere.
pub fn product_class_exact(m: &PatternMatrix, n: &PatternMatrix) -> Result<bool> {
    if m.cols != n.rows {
        return Err(Error::Shape(format!(
            "cannot multiply {}x{} by {}x{} (inner dimensions differ)",
            m.rows, m.cols, n.rows, n.cols
        )));
    }
    let single_star = |syms: &mut dyn Iterator<Item = PatternSymbol>| {
        let mut stars = 0usize;
        for s in syms {
            match s {
                Star => stars += 1,
                Zero => {}
                Quest => return false,
            }
        }
        stars == 1
    };
    let cond_rows = (0..n.rows).all(|r| single_star(&mut n.row(r).iter().copied()));
    if cond_rows {
        return Ok(true);
    }
    let cond_cols = (0..m.cols).all(|c| single_star(&mut (0..m.rows).map(|r| m.get(r, c))));
    Ok(cond_cols)
}

/// Block-diagonal assembly; off-block entries are `0`.
pub fn block_diag(blocks: &[PatternMatrix]) -> Result<PatternMatrix> {
    if blocks.is_empty() {
        return Err(Error::Argument("block_diag of an empty list".into()));
    }
    let rows: usize = blocks.iter().map(PatternMatrix::rows).sum();
    let cols: usize = blocks.iter().map(PatternMatrix::cols).sum();
    let mut out = PatternMatrix::zeros(rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        for r in 0..b.rows {
            for c in 0..b.cols {
                out.entries[(r0 + r) * cols + (c0 + c)] = b.get(r, c);
            }
        }
        r0 += b.rows;
        c0 += b.cols;
    }
    Ok(out)
}

/// Vertical concatenation (the `col(...)` stacking).
pub fn stack_rows(blocks: &[PatternMatrix]) -> Result<PatternMatrix> {
    if blocks.is_empty() {
        return Err(Error::Argument("stack_rows of an empty list".into()));
    }
    let cols = blocks[0].cols;
    for b in blocks {
        if b.cols != cols {
            return Err(Error::Shape(format!(
                "stack_rows: block is {}x{} but expected {} columns",
                b.rows, b.cols, cols
            )));
        }
    }
    let rows = blocks.iter().map(PatternMatrix::rows).sum();
    let entries = blocks.iter().flat_map(|b| b.entries.iter().copied()).collect();
    PatternMatrix::new(rows, cols, entries)
}

/// Horizontal concatenation.
pub fn concat_cols(blocks: &[PatternMatrix]) -> Result<PatternMatrix> {
    if blocks.is_empty() {
        return Err(Error::Argument("concat_cols of an empty list".into()));
    }
    let rows = blocks[0].rows;
    for b in blocks {
        if b.rows != rows {
            return Err(Error::Shape(format!(
                "concat_cols: block is {}x{} but expected {} rows",
                b.rows, b.cols, rows
            )));
        }
    }
    let cols = blocks.iter().map(PatternMatrix::cols).sum();
    let mut entries = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for b in blocks {
            entries.extend_from_slice(b.row(r));
        }
    }
    PatternMatrix::new(rows, cols, entries)
}

/// A dense real matrix; a candidate member of some pattern class.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NumericMatrixRepr", into = "NumericMatrixRepr")]
pub struct NumericMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl NumericMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if cols == 0 {
            return Err(Error::Argument("numeric matrix needs at least one column".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("numeric matrix entries must be finite".into()));
        }
        Ok(NumericMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        NumericMatrix::new(rows, cols, vec![0.0; rows * cols]).expect("cols >= 1")
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Shape("rows of unequal length".into()));
        }
        NumericMatrix::new(nrows, ncols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        assert!(value.is_finite(), "numeric matrix entries must be finite");
        self.entries[row * self.cols + col] = value;
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    /// Columns `[0, split)` and `[split, cols)` as separate matrices.
    pub fn split_cols(&self, split: usize) -> Result<(NumericMatrix, NumericMatrix)> {
        if split == 0 || split >= self.cols {
            return Err(Error::Argument(format!(
                "split column {} out of range for a {}x{} matrix",
                split, self.rows, self.cols
            )));
        }
        let mut left = Vec::with_capacity(self.rows * split);
        let mut right = Vec::with_capacity(self.rows * (self.cols - split));
        for r in 0..self.rows {
            left.extend_from_slice(&self.row(r)[..split]);
            right.extend_from_slice(&self.row(r)[split..]);
        }
        Ok((
            NumericMatrix::new(self.rows, split, left)?,
            NumericMatrix::new(self.rows, self.cols - split, right)?,
        ))
    }
}

impl fmt::Debug for NumericMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "NumericMatrix({}x{})", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|v| format!("{v}")).collect();
            writeln!(f, "  [{}]", line.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Display for NumericMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            if r > 0 {
                writeln!(f)?;
            }
            let line: Vec<String> = self.row(r).iter().map(|v| format!("{v}")).collect();
            write!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct NumericMatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<f64>>,
}

impl TryFrom<NumericMatrixRepr> for NumericMatrix {
    type Error = Error;

    fn try_from(repr: NumericMatrixRepr) -> Result<Self> {
        if repr.entries.len() != repr.rows
            || repr.entries.iter().any(|r| r.len() != repr.cols)
        {
            return Err(Error::Parse("numeric matrix rows do not match declared shape".into()));
        }
        NumericMatrix::from_rows(&repr.entries)
    }
}

impl From<NumericMatrix> for NumericMatrixRepr {
    fn from(m: NumericMatrix) -> Self {
        NumericMatrixRepr {
            rows: m.rows,
            cols: m.cols,
            entries: (0..m.rows).map(|r| m.row(r).to_vec()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(s: &str) -> PatternMatrix {
        s.parse().unwrap()
    }

    #[test]
    fn symbol_addition_table() {
        assert_eq!(Star + Star, Quest);
        assert_eq!(Zero + Quest, Quest);
        assert_eq!(Zero + Zero, Zero);
        assert_eq!(Zero + Star, Star);
        assert_eq!(Star + Quest, Quest);
        assert_eq!(Quest + Quest, Quest);
    }

    #[test]
    fn symbol_multiplication_table() {
        assert_eq!(Star * Star, Star);
        assert_eq!(Quest * Star, Quest);
        assert_eq!(Zero * Quest, Zero);
        assert_eq!(Zero * Zero, Zero);
        assert_eq!(Zero * Star, Zero);
        assert_eq!(Quest * Quest, Quest);
    }

    #[test]
    fn symbol_ops_commutative_and_associative() {
        for a in PatternSymbol::ALL {
            for b in PatternSymbol::ALL {
                assert_eq!(a + b, b + a);
                assert_eq!(a * b, b * a);
                for c in PatternSymbol::ALL {
                    assert_eq!((a + b) + c, a + (b + c));
                    assert_eq!((a * b) * c, a * (b * c));
                }
            }
        }
    }

    #[test]
    fn pattern_addition() {
        let m = pat("0 *\n? 0");
        let n = pat("* 0\n0 0");
        assert_eq!(m.add(&n).unwrap(), pat("* *\n? 0"));

        let zero = PatternMatrix::zeros(2, 2);
        assert_eq!(m.add(&zero).unwrap(), m);

        assert_eq!(pat("*").add(&pat("*")).unwrap(), pat("?"));
    }

    #[test]
    fn pattern_addition_shape_error() {
        let err = pat("*").add(&pat("* *")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("1x1") && msg.contains("1x2"), "{msg}");
    }

    #[test]
    fn pattern_multiplication() {
        let col = pat("*\n*");
        let row = pat("* *");
        assert_eq!(col.mul(&row).unwrap(), pat("* *\n* *"));
        assert_eq!(row.mul(&col).unwrap(), pat("?"));

        let m = pat("* ?\n0 *");
        let zero = PatternMatrix::zeros(2, 3);
        assert_eq!(m.mul(&zero).unwrap(), PatternMatrix::zeros(2, 3));

        assert!(matches!(row.mul(&row), Err(Error::Shape(_))));
    }

    #[test]
    fn membership_is_exact() {
        let m = pat("* 0");
        let x = NumericMatrix::from_rows(&[vec![3.0, 0.0]]).unwrap();
        assert!(m.contains(&x).unwrap());
        let x = NumericMatrix::from_rows(&[vec![0.0, 0.0]]).unwrap();
        assert!(!m.contains(&x).unwrap());
        let q = pat("?");
        let x = NumericMatrix::from_rows(&[vec![0.0]]).unwrap();
        assert!(q.contains(&x).unwrap());
        assert!(matches!(m.contains(&NumericMatrix::zeros(2, 2)), Err(Error::Shape(_))));
    }

    #[test]
    fn product_class_exactness_conditions() {
        // identity-shaped star diagonal satisfies the row condition
        let m = pat("? *\n* ?");
        let n = pat("* 0\n0 *");
        assert!(product_class_exact(&m, &n).unwrap());

        // a ? in some row of N defeats condition (i); M's columns fail (ii)
        let n_quest = pat("* ?\n0 *");
        assert!(!product_class_exact(&m, &n_quest).unwrap());

        // block-diagonal single-star columns on the left operand
        let b = block_diag(&[pat("0\n*"), pat("*\n0")]).unwrap();
        let w = pat("? ?\n? ?");
        assert!(product_class_exact(&b, &w).unwrap());

        assert!(matches!(product_class_exact(&n, &b), Err(Error::Shape(_))));
    }

    #[test]
    fn block_diag_assembly() {
        assert_eq!(block_diag(&[pat("*"), pat("?")]).unwrap(), pat("* 0\n0 ?"));
        let single = pat("0 *\n* ?");
        assert_eq!(block_diag(&[single.clone()]).unwrap(), single);
        assert!(matches!(block_diag(&[]), Err(Error::Argument(_))));
    }

    #[test]
    fn stacking_and_concatenation() {
        assert_eq!(stack_rows(&[pat("* 0"), pat("0 *")]).unwrap(), pat("* 0\n0 *"));
        assert_eq!(stack_rows(&[pat("* 0")]).unwrap(), pat("* 0"));
        assert!(matches!(stack_rows(&[pat("*"), pat("* *")]), Err(Error::Shape(_))));

        assert_eq!(concat_cols(&[pat("*"), pat("0")]).unwrap(), pat("* 0"));
        assert_eq!(
            concat_cols(&[pat("0 *\n* 0"), pat("*\n0")]).unwrap(),
            pat("0 * *\n* 0 0")
        );
        assert!(matches!(concat_cols(&[pat("*"), pat("*\n*")]), Err(Error::Shape(_))));

        // stacking a zero-row block is a no-op
        let empty = PatternMatrix::empty(2);
        assert_eq!(stack_rows(&[empty, pat("* 0")]).unwrap(), pat("* 0"));
    }

    #[test]
    fn bar_modifies_only_the_diagonal() {
        assert_eq!(pat("0 *\n* ?").bar().unwrap(), pat("* *\n* ?"));
        assert_eq!(pat("?").bar().unwrap(), pat("?"));
        assert!(matches!(pat("* 0").bar(), Err(Error::Shape(_))));
    }

    #[test]
    fn bar_is_idempotent_once_the_diagonal_avoids_zero() {
        // a diagonal already in {*, ?} maps to all-? and stays there
        let a = pat("* * 0\n* ? *\n0 0 *");
        let b = a.bar().unwrap();
        assert_eq!(b.bar().unwrap(), b);
        // a zero diagonal entry breaks idempotence: 0 -> * -> ?
        let c = pat("0").bar().unwrap();
        assert_eq!(c, pat("*"));
        assert_eq!(c.bar().unwrap(), pat("?"));
    }

    #[test]
    fn text_round_trip() {
        let m = pat("0 * ?\n* 0 0");
        let text = m.to_string();
        assert_eq!(text.parse::<PatternMatrix>().unwrap(), m);
    }

    #[test]
    fn json_round_trip() {
        let m = pat("0 * ?\n* 0 0");
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.contains("\"entries\""));
        let back: PatternMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!("".parse::<PatternMatrix>().is_err());
        assert!("x y".parse::<PatternMatrix>().is_err());
        assert!("* *\n*".parse::<PatternMatrix>().is_err());
        assert!(NumericMatrix::new(1, 1, vec![f64::NAN]).is_err());
    }
}
