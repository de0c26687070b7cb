//! Dense exact linear algebra over GF(q).
//!
//! Everything the family verifier and the decoders need: rank, solving,
//! inversion, left null spaces, prefix-row stacking, and Kronecker products.
//! Elimination pivots on the first nonzero entry scanning top-down (there is
//! no magnitude over a finite field), so echelon forms and the null-space
//! bases derived from them are deterministic.

use std::fmt;

use thiserror::Error;

use crate::gf::{FieldElement, FieldSpec, GfError};

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
    #[error("prefix of {requested} rows exceeds block height {available}")]
    PrefixTooLong { requested: usize, available: usize },
    #[error("identity/reversal prefix needs N <= K, got N = {n}, K = {k}")]
    PrefixWiderThanTall { n: usize, k: usize },
    #[error("singular system: coefficient matrix has rank {rank} < {cols}")]
    SingularSystem { rank: usize, cols: usize },
    #[error("inconsistent system: equation {row} reduces to 0 = nonzero")]
    InconsistentSystem { row: usize },
    #[error("matrix is not square: {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error(transparent)]
    Field(#[from] GfError),
}

/// Dense row-major matrix over a fixed field.
#[derive(Clone, PartialEq, Eq)]
pub struct MatrixGF {
    rows: usize,
    cols: usize,
    entries: Vec<FieldElement>,
}

impl fmt::Debug for MatrixGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatrixGF {}x{}", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for MatrixGF {
    /// Rows of space-separated element values, one row per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|e| e.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl MatrixGF {
    pub fn new(rows: usize, cols: usize, entries: Vec<FieldElement>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        MatrixGF {
            rows,
            cols,
            entries,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatrixGF {
            rows,
            cols,
            entries: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<FieldElement>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        MatrixGF {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    /// K x K identity.
    pub fn identity(k: usize) -> Self {
        Self::identity_nk(k, k).expect("square prefix")
    }

    /// K x K reversal (ones on the anti-diagonal).
    pub fn reversal(k: usize) -> Self {
        Self::reversal_nk(k, k).expect("square prefix")
    }

    /// First N rows of the K x K identity.
    pub fn identity_nk(n: usize, k: usize) -> Result<Self, LinalgError> {
        if n > k {
            return Err(LinalgError::PrefixWiderThanTall { n, k });
        }
        let mut m = Self::zeros(n, k);
        for i in 0..n {
            m.set(i, i, FieldElement::ONE);
        }
        Ok(m)
    }

    /// First N rows of the K x K reversal.
    pub fn reversal_nk(n: usize, k: usize) -> Result<Self, LinalgError> {
        if n > k {
            return Err(LinalgError::PrefixWiderThanTall { n, k });
        }
        let mut m = Self::zeros(n, k);
        for i in 0..n {
            m.set(i, k - 1 - i, FieldElement::ONE);
        }
        Ok(m)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn mat_mul(&self, other: &MatrixGF, spec: &FieldSpec) -> MatrixGF {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for i in 0..self.cols {
                let a = self.get(r, i);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = spec.add(out.get(r, c), spec.mul(a, other.get(i, c)));
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, v: &[FieldElement], spec: &FieldSpec) -> Vec<FieldElement> {
        assert_eq!(self.cols, v.len(), "vector length must match columns");
        (0..self.rows)
            .map(|r| {
                let mut acc = FieldElement::ZERO;
                for c in 0..self.cols {
                    acc = spec.add(acc, spec.mul(self.get(r, c), v[c]));
                }
                acc
            })
            .collect()
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self, spec: &FieldSpec) -> usize {
        let mut m: Vec<Vec<FieldElement>> = (0..self.rows).map(|r| self.row(r).to_vec()).collect();
        forward_eliminate(&mut m, self.cols, spec).len()
    }

    /// Solves A u = y for square or tall A with full column rank, keeping
    /// equations in their given order.
    pub fn solve(&self, y: &[FieldElement], spec: &FieldSpec) -> Result<Vec<FieldElement>, LinalgError> {
        if y.len() != self.rows {
            return Err(LinalgError::DimensionMismatch {
                context: format!(
                    "right-hand side has {} entries for {} equations",
                    y.len(),
                    self.rows
                ),
            });
        }
        // augmented elimination
        let mut m: Vec<Vec<FieldElement>> = (0..self.rows)
            .map(|r| {
                let mut row = self.row(r).to_vec();
                row.push(y[r]);
                row
            })
            .collect();
        let pivots = forward_eliminate(&mut m, self.cols, spec);
        if pivots.len() < self.cols {
            return Err(LinalgError::SingularSystem {
                rank: pivots.len(),
                cols: self.cols,
            });
        }
        // an all-zero coefficient row with nonzero rhs means no solution
        for (r, row) in m.iter().enumerate() {
            if row[..self.cols].iter().all(|e| e.is_zero()) && !row[self.cols].is_zero() {
                return Err(LinalgError::InconsistentSystem { row: r });
            }
        }
        // back-substitute; pivot i sits in row i, column pivots[i] = i
        let mut u = vec![FieldElement::ZERO; self.cols];
        for i in (0..self.cols).rev() {
            let mut acc = m[i][self.cols];
            for c in i + 1..self.cols {
                acc = spec.sub(acc, spec.mul(m[i][c], u[c]));
            }
            let piv = spec.inv(m[i][i]).expect("pivot is nonzero");
            u[i] = spec.mul(acc, piv);
        }
        Ok(u)
    }

    /// Exact inverse of a square full-rank matrix.
    pub fn inverse(&self, spec: &FieldSpec) -> Result<MatrixGF, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut m: Vec<Vec<FieldElement>> = (0..n)
            .map(|r| {
                let mut row = self.row(r).to_vec();
                row.extend((0..n).map(|c| {
                    if c == r {
                        FieldElement::ONE
                    } else {
                        FieldElement::ZERO
                    }
                }));
                row
            })
            .collect();
        let pivots = reduced_echelon(&mut m, n, spec);
        if pivots.len() < n {
            return Err(LinalgError::SingularSystem {
                rank: pivots.len(),
                cols: n,
            });
        }
        let entries = m.into_iter().flat_map(|row| row[n..].to_vec()).collect();
        Ok(MatrixGF::new(n, n, entries))
    }

    /// Deterministic basis of the left null space { b : b^T A = 0 }.
    pub fn left_null_space(&self, spec: &FieldSpec) -> Vec<Vec<FieldElement>> {
        // left null vectors of A are null vectors of A^T
        let t = self.transpose();
        let mut m: Vec<Vec<FieldElement>> = (0..t.rows).map(|r| t.row(r).to_vec()).collect();
        let pivots = reduced_echelon(&mut m, t.cols, spec);
        let mut basis = Vec::new();
        let pivot_set: Vec<Option<usize>> = {
            let mut set = vec![None; t.cols];
            for (i, &c) in pivots.iter().enumerate() {
                set[c] = Some(i);
            }
            set
        };
        for free in 0..t.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut v = vec![FieldElement::ZERO; t.cols];
            v[free] = FieldElement::ONE;
            for (i, &pc) in pivots.iter().enumerate() {
                // reduced echelon: pivot row i gives x_pc = -m[i][free] * x_free
                v[pc] = spec.neg(m[i][free]);
            }
            basis.push(v);
        }
        basis
    }

    /// Kronecker product: block (i, j) is self[i, j] * other.
    pub fn kronecker(&self, other: &MatrixGF, spec: &FieldSpec) -> MatrixGF {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for r in 0..other.rows {
                    for c in 0..other.cols {
                        out.set(
                            i * other.rows + r,
                            j * other.cols + c,
                            spec.mul(a, other.get(r, c)),
                        );
                    }
                }
            }
        }
        out
    }
}

/// Concatenates the leading `count` rows of each block, in order.
pub fn stack_rows(blocks: &[(&MatrixGF, usize)]) -> Result<MatrixGF, LinalgError> {
    let cols = blocks.first().map_or(0, |(m, _)| m.cols());
    let mut rows = Vec::new();
    for (m, count) in blocks {
        if m.cols() != cols {
            return Err(LinalgError::DimensionMismatch {
                context: format!("stacked blocks have widths {} and {}", cols, m.cols()),
            });
        }
        if *count > m.rows() {
            return Err(LinalgError::PrefixTooLong {
                requested: *count,
                available: m.rows(),
            });
        }
        for r in 0..*count {
            rows.push(m.row(r).to_vec());
        }
    }
    if rows.is_empty() {
        return Ok(MatrixGF::zeros(0, cols));
    }
    Ok(MatrixGF::from_rows(rows))
}

/// Forward elimination to row echelon form; returns pivot columns in order.
/// Pivot rows end up in positions 0..rank, and pivot i lives in column
/// pivots[i] with everything below it zero.
fn forward_eliminate(
    m: &mut [Vec<FieldElement>],
    cols: usize,
    spec: &FieldSpec,
) -> Vec<usize> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut next_row = 0;
    for col in 0..cols {
        let Some(p) = (next_row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(next_row, p);
        let inv = spec.inv(m[next_row][col]).expect("pivot nonzero");
        for r in next_row + 1..rows {
            let f = m[r][col];
            if f.is_zero() {
                continue;
            }
            let scale = spec.mul(f, inv);
            let width = m[r].len();
            for c in col..width {
                let sub = spec.mul(scale, m[next_row][c]);
                m[r][c] = spec.sub(m[r][c], sub);
            }
        }
        pivots.push(col);
        next_row += 1;
        if next_row == rows {
            break;
        }
    }
    pivots
}

/// Gauss-Jordan to reduced row echelon form over the first `cols` columns
/// (rows may carry an augmented tail that is transformed along).
fn reduced_echelon(m: &mut [Vec<FieldElement>], cols: usize, spec: &FieldSpec) -> Vec<usize> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut next_row = 0;
    for col in 0..cols {
        let Some(p) = (next_row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(next_row, p);
        let inv = spec.inv(m[next_row][col]).expect("pivot nonzero");
        let width = m[next_row].len();
        for c in col..width {
            m[next_row][c] = spec.mul(m[next_row][c], inv);
        }
        for r in 0..rows {
            if r == next_row {
                continue;
            }
            let f = m[r][col];
            if f.is_zero() {
                continue;
            }
            for c in col..width {
                let sub = spec.mul(f, m[next_row][c]);
                m[r][c] = spec.sub(m[r][c], sub);
            }
        }
        pivots.push(col);
        next_row += 1;
        if next_row == rows {
            break;
        }
    }
    pivots
}
