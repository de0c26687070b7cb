//! Transformations that carry one universally decodable family into another.
//!
//! Row transforms (lower-triangular with nonzero diagonal), column
//! transforms (invertible), and permutations preserve the property outright.
//! Tensor powers preserve it conditionally (guaranteed for the Pascal
//! construction over prime fields). The pair-reversal algorithm rewrites
//! consecutive matrix pairs so their overlapping rows mirror each other,
//! which in turn lets any family be normalized to a leading (I, J) pair, and
//! a normalized family can be reduced from (N, K) to (N-1, K-1).

use thiserror::Error;

use crate::gf::{FieldElement, FieldSpec};
use crate::linalg::{LinalgError, MatrixGF};
use crate::udm::{PatternMode, Provenance, UdmError, UdmFamily};

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("row transform needs a lower-triangular matrix; entry ({r}, {c}) is nonzero")]
    NotLowerTriangular { r: usize, c: usize },
    #[error("row transform needs nonzero diagonal entries; entry ({i}, {i}) is zero")]
    ZeroDiagonal { i: usize },
    #[error("row transform matrix is {rows}x{cols}, expected {n}x{n}")]
    RowTransformShape { rows: usize, cols: usize, n: usize },
    #[error("column transform matrix is {rows}x{cols} with rank {rank}, expected invertible {k}x{k}")]
    ColumnTransformSingular {
        rows: usize,
        cols: usize,
        rank: usize,
        k: usize,
    },
    #[error("permutation {sigma:?} is not a bijection of [{l}]")]
    NotBijective { sigma: Vec<usize>, l: usize },
    #[error("tensor power needs m >= 1")]
    TensorPowerZero,
    #[error("input family fails verification at pattern {pattern}; the transform needs a valid family")]
    NotUdm { pattern: String },
    #[error("pair reversal step n = {n}: left null space has dimension {dim} instead of 1 (input is not a valid family)")]
    DegenerateNullSpace { n: usize, dim: usize },
    #[error("pair reversal step n = {n}: null vector has a zero component at position {pos} (input is not a valid family)")]
    NullVectorZeroComponent { n: usize, pos: usize },
    #[error("basis completion for the normalizing matrix stalled at row {row} (input is not a valid family)")]
    CompletionStalled { row: usize },
    #[error("normalizing matrix is singular (input is not a valid family)")]
    NormalizerSingular,
    #[error("reduction needs N >= 2, got N = {n}")]
    ReduceNeedsRows { n: usize },
    #[error("reduction needs the zeroth row of A_1 to be (0, ..., 0, 1); normalize the leading pair first")]
    ReduceNeedsNormalizedPair,
    #[error(transparent)]
    Udm(#[from] UdmError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Replaces A_l by C * A_l for a lower-triangular C with nonzero diagonal.
pub fn row_transform(
    family: &UdmFamily,
    l: usize,
    c: &MatrixGF,
) -> Result<UdmFamily, TransformError> {
    let n = family.n();
    if c.rows() != n || c.cols() != n {
        return Err(TransformError::RowTransformShape {
            rows: c.rows(),
            cols: c.cols(),
            n,
        });
    }
    for r in 0..n {
        if c.get(r, r).is_zero() {
            return Err(TransformError::ZeroDiagonal { i: r });
        }
        for col in r + 1..n {
            if !c.get(r, col).is_zero() {
                return Err(TransformError::NotLowerTriangular { r, c: col });
            }
        }
    }
    let spec = family.spec();
    let mut out = family.clone();
    out.replace_matrix(l, c.mat_mul(family.matrix(l), spec));
    Ok(out.with_provenance(Provenance::Transformed))
}

/// Replaces every A_l by A_l * B for an invertible K x K matrix B.
pub fn col_transform(family: &UdmFamily, b: &MatrixGF) -> Result<UdmFamily, TransformError> {
    let k = family.k();
    let rank = if b.rows() == k && b.cols() == k {
        b.rank(family.spec())
    } else {
        0
    };
    if b.rows() != k || b.cols() != k || rank != k {
        return Err(TransformError::ColumnTransformSingular {
            rows: b.rows(),
            cols: b.cols(),
            rank,
            k,
        });
    }
    apply_col(family, b)
}

fn apply_col(family: &UdmFamily, b: &MatrixGF) -> Result<UdmFamily, TransformError> {
    let spec = family.spec();
    let matrices = family
        .matrices()
        .iter()
        .map(|m| m.mat_mul(b, spec))
        .collect();
    Ok(UdmFamily::new(spec.clone(), matrices, Provenance::Transformed)?)
}

/// Reorders the family as A_{sigma(0)}, ..., A_{sigma(L-1)}.
pub fn permute(family: &UdmFamily, sigma: &[usize]) -> Result<UdmFamily, TransformError> {
    let l = family.l();
    let mut seen = vec![false; l];
    let valid = sigma.len() == l
        && sigma.iter().all(|&s| {
            if s >= l || seen[s] {
                false
            } else {
                seen[s] = true;
                true
            }
        });
    if !valid {
        return Err(TransformError::NotBijective {
            sigma: sigma.to_vec(),
            l,
        });
    }
    let matrices = sigma.iter().map(|&s| family.matrix(s).clone()).collect();
    Ok(UdmFamily::new(
        family.spec().clone(),
        matrices,
        Provenance::Transformed,
    )?)
}

/// The m-fold Kronecker power of every matrix, lifting (L, N, K) to
/// (L, N^m, K^m).
///
/// This does not by itself guarantee the property for arbitrary inputs; the
/// guarantee holds for Pascal families over prime fields, where the result
/// coincides with the directly constructed family.
pub fn tensor_power(family: &UdmFamily, m: usize) -> Result<UdmFamily, TransformError> {
    if m == 0 {
        return Err(TransformError::TensorPowerZero);
    }
    let spec = family.spec();
    let matrices = family
        .matrices()
        .iter()
        .map(|a| {
            let mut acc = a.clone();
            for _ in 1..m {
                acc = acc.kronecker(a, spec);
            }
            acc
        })
        .collect();
    Ok(UdmFamily::new(spec.clone(), matrices, Provenance::Transformed)?)
}

/// True iff row n of `a0` equals row K-1-n of `a1` for K-N <= n <= N-1.
fn mirror_relation_holds(a0: &MatrixGF, a1: &MatrixGF, n: usize, k: usize) -> bool {
    (k.saturating_sub(n)..n)
        .all(|r| (0..k).all(|c| a0.get(r, c) == a1.get(k - 1 - r, c)))
}

/// The row-replacement loop that makes a matrix pair mirror each other on
/// the overlap rows, using one left-null-space vector per row.
fn mirror_pair(
    a0: &MatrixGF,
    a1: &MatrixGF,
    spec: &FieldSpec,
) -> Result<(MatrixGF, MatrixGF), TransformError> {
    let n = a0.rows();
    let k = a0.cols();
    let mut a0 = a0.clone();
    let mut a1 = a1.clone();
    for row in k.saturating_sub(n)..n {
        // B stacks rows 0..=row of a0 over rows 0..=k-1-row of a1: K+1 rows
        let top = row + 1;
        let bottom = k - row;
        let mut rows: Vec<Vec<FieldElement>> = Vec::with_capacity(k + 1);
        for r in 0..top {
            rows.push(a0.row(r).to_vec());
        }
        for r in 0..bottom {
            rows.push(a1.row(r).to_vec());
        }
        let b_mat = MatrixGF::from_rows(rows);
        let null = b_mat.left_null_space(spec);
        if null.len() != 1 {
            return Err(TransformError::DegenerateNullSpace {
                n: row,
                dim: null.len(),
            });
        }
        let mut b = null.into_iter().next().unwrap();
        // fix the free scalar: last component becomes one
        let last = b[k];
        if last.is_zero() {
            return Err(TransformError::NullVectorZeroComponent { n: row, pos: k });
        }
        if b[row].is_zero() {
            return Err(TransformError::NullVectorZeroComponent { n: row, pos: row });
        }
        let scale = spec.inv(last).expect("nonzero");
        for e in b.iter_mut() {
            *e = spec.mul(*e, scale);
        }
        // replace row `row` of a0 by b0^T B0 and row k-1-row of a1 by
        // -b1^T B1; the two agree because b^T B = 0
        let mut new0 = vec![FieldElement::ZERO; k];
        for (i, coeff) in b[..top].iter().enumerate() {
            for c in 0..k {
                new0[c] = spec.add(new0[c], spec.mul(*coeff, a0.get(i, c)));
            }
        }
        let mut new1 = vec![FieldElement::ZERO; k];
        for (j, coeff) in b[top..].iter().enumerate() {
            for c in 0..k {
                new1[c] = spec.add(new1[c], spec.mul(*coeff, a1.get(j, c)));
            }
        }
        let new1: Vec<FieldElement> = new1.into_iter().map(|e| spec.neg(e)).collect();
        debug_assert_eq!(new0, new1, "null vector must tie the two rows together");
        for c in 0..k {
            a0.set(row, c, new0[c]);
            a1.set(k - 1 - row, c, new1[c]);
        }
    }
    Ok((a0, a1))
}

/// Rewrites each pair (A_{2l'}, A_{2l'+1}) so that row n of the first equals
/// row K-1-n of the second for K-N <= n <= N-1. A no-op when K >= 2N; with
/// odd L the unpaired last matrix passes through.
pub fn pair_reversal(family: &UdmFamily) -> Result<UdmFamily, TransformError> {
    let (n, k) = (family.n(), family.k());
    if k >= 2 * n {
        return Ok(family.clone());
    }
    let spec = family.spec();
    let mut matrices = Vec::with_capacity(family.l());
    let mut iter = family.matrices().chunks_exact(2);
    for pair in iter.by_ref() {
        let (m0, m1) = mirror_pair(&pair[0], &pair[1], spec)?;
        matrices.push(m0);
        matrices.push(m1);
    }
    matrices.extend(iter.remainder().iter().cloned());
    Ok(UdmFamily::new(spec.clone(), matrices, Provenance::Transformed)?)
}

/// Transforms a verified family into an equivalent one with A_0 = I_{N,K}
/// and A_1 = J_{N,K}.
///
/// The normalizing matrix B collects rows of A_0 and A_1 (after mirroring
/// them when they overlap); for K >= 2N its unspecified middle rows are
/// completed greedily with standard basis vectors, lowest index first.
/// Idempotent: an already-normalized family comes back unchanged.
pub fn normalize_leading_pair(family: &UdmFamily) -> Result<UdmFamily, TransformError> {
    let report = crate::udm::verify(family, PatternMode::Exact);
    if let Some(witness) = report.first_failure {
        return Err(TransformError::NotUdm {
            pattern: witness.pattern.to_string(),
        });
    }
    let (n, k) = (family.n(), family.k());
    let spec = family.spec();

    // establish the mirror relation on the leading pair where rows overlap
    let mut a0 = family.matrix(0).clone();
    let mut a1 = if family.l() >= 2 {
        Some(family.matrix(1).clone())
    } else {
        None
    };
    if let Some(m1) = &a1 {
        if k <= 2 * n - 1 && !mirror_relation_holds(&a0, m1, n, k) {
            let (m0, m1) = mirror_pair(&a0, m1, spec)?;
            a0 = m0;
            a1 = Some(m1);
        }
    }

    // assemble B: rows n of A_0 at position n, rows n of A_1 at K-1-n
    let mut b_rows: Vec<Option<Vec<FieldElement>>> = vec![None; k];
    for r in 0..n {
        b_rows[r] = Some(a0.row(r).to_vec());
    }
    if let Some(m1) = &a1 {
        let from_a1 = if k >= 2 * n { n } else { k - n };
        for r in 0..from_a1 {
            b_rows[k - 1 - r] = Some(m1.row(r).to_vec());
        }
    }
    // greedy completion with standard basis vectors where rows are missing
    let mut chosen: Vec<Vec<FieldElement>> = b_rows.iter().flatten().cloned().collect();
    let mut chosen_rank = MatrixGF::from_rows(chosen.clone()).rank(spec);
    for row in 0..k {
        if b_rows[row].is_some() {
            continue;
        }
        let mut placed = false;
        for j in 0..k {
            let mut e = vec![FieldElement::ZERO; k];
            e[j] = FieldElement::ONE;
            chosen.push(e.clone());
            let rank = MatrixGF::from_rows(chosen.clone()).rank(spec);
            if rank > chosen_rank {
                chosen_rank = rank;
                b_rows[row] = Some(e);
                placed = true;
                break;
            }
            chosen.pop();
        }
        if !placed {
            return Err(TransformError::CompletionStalled { row });
        }
    }
    let b = MatrixGF::from_rows(b_rows.into_iter().map(|r| r.unwrap()).collect());
    let b_inv = b
        .inverse(spec)
        .map_err(|_| TransformError::NormalizerSingular)?;

    // the family with the mirrored leading pair, then the column transform
    let mut matrices: Vec<MatrixGF> = family.matrices().to_vec();
    matrices[0] = a0;
    if let Some(m1) = a1 {
        matrices[1] = m1;
    }
    let staged = UdmFamily::new(spec.clone(), matrices, Provenance::Transformed)?;
    let out = apply_col(&staged, &b_inv)?;
    debug_assert_eq!(out.matrix(0), &MatrixGF::identity_nk(n, k)?);
    if family.l() >= 2 {
        debug_assert_eq!(out.matrix(1), &MatrixGF::reversal_nk(n, k)?);
    }
    // an already-normalized input comes back bit-identical; keep its tag
    if out.matrices() == family.matrices() {
        return Ok(family.clone());
    }
    Ok(out)
}

/// Shrinks a family with a normalized leading pair from (L, N, K) to
/// (L, N-1, K-1): matrix 1 loses its first column and last row, every other
/// matrix loses its last column and last row.
///
/// Only the property the shrink actually uses is validated: the zeroth row
/// of A_1 must be (0, ..., 0, 1).
pub fn reduce(family: &UdmFamily) -> Result<UdmFamily, TransformError> {
    let (n, k) = (family.n(), family.k());
    if n < 2 {
        return Err(TransformError::ReduceNeedsRows { n });
    }
    if family.l() >= 2 {
        let a1 = family.matrix(1);
        let ok = (0..k - 1).all(|c| a1.get(0, c).is_zero()) && a1.get(0, k - 1) == FieldElement::ONE;
        if !ok {
            return Err(TransformError::ReduceNeedsNormalizedPair);
        }
    }
    let matrices = family
        .matrices()
        .iter()
        .enumerate()
        .map(|(l, m)| {
            let drop_first_col = l == 1;
            let mut out = MatrixGF::zeros(n - 1, k - 1);
            for r in 0..n - 1 {
                for c in 0..k - 1 {
                    let src = if drop_first_col { c + 1 } else { c };
                    out.set(r, c, m.get(r, src));
                }
            }
            out
        })
        .collect();
    Ok(UdmFamily::new(
        family.spec().clone(),
        matrices,
        Provenance::Transformed,
    )?)
}
