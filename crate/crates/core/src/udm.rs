//! Universally decodable matrix families: the central type, the explicit
//! constructions, and the exhaustive verifier.
//!
//! A family holds L matrices of size N x K over GF(q). It is universally
//! decodable when for every erasure pattern (v_0, ..., v_{L-1}) with
//! 0 <= v_l <= N and sum v_l >= K, the matrix stacking the first v_0 rows of
//! A_0 through the first v_{L-1} rows of A_{L-1} has full rank K. Checking
//! the patterns with sum exactly K suffices; the verifier enumerates those.
//!
//! Constructions provided:
//! - the Pascal family A_0 = I_{N,K}, A_1 = J_{N,K},
//!   [A_{l+2}]_{n,k} = C(k,n) alpha^{l(k-n)}, valid whenever L <= q + 1;
//! - its monomial variant for N = K = p^m with entries
//!   prod_h k_h^{n_h} alpha^{l(k_h-n_h)p^h} over radix-p digits;
//! - the (q+2, 1, 3, q) family over even-characteristic fields that meets
//!   the L <= q + 2 bound for K = 2N + 1.

use std::fmt;

use itertools::Itertools;
use num_bigint::BigUint;
use rayon::prelude::*;
use thiserror::Error;

use crate::gf::{FieldElement, FieldSpec, GfError};
use crate::linalg::{stack_rows, LinalgError, MatrixGF};
use crate::poly::{binomial_mod_p, EvalPoint};

#[derive(Debug, Error)]
pub enum UdmError {
    #[error("L = {l} exceeds the maximal family size for GF({q}): families with 2 <= K <= 2N can only exist for L <= q + 1 = {bound}")]
    BoundViolation { l: usize, q: u64, bound: u64 },
    #[error("family needs N <= K, got N = {n}, K = {k}")]
    KLessThanN { n: usize, k: usize },
    #[error("family parameters must be positive, got L = {l}, N = {n}, K = {k}")]
    EmptyParameters { l: usize, n: usize, k: usize },
    #[error("matrix {index} is {rows}x{cols}, expected {n}x{k}")]
    MatrixShape {
        index: usize,
        rows: usize,
        cols: usize,
        n: usize,
        k: usize,
    },
    #[error("monomial variant needs N = K = p^m with p = {p}, got N = {n}")]
    NotCharacteristicPower { n: usize, p: u64 },
    #[error("the length-(q+2) construction needs characteristic 2, got GF({q}) of characteristic {p}")]
    OddCharacteristic { q: u64, p: u64 },
    #[error("erasure pattern entry v_{index} = {value} exceeds N = {n}")]
    PatternEntryTooLarge {
        index: usize,
        value: usize,
        n: usize,
    },
    #[error("erasure pattern has {len} entries, expected L = {l}")]
    PatternLength { len: usize, l: usize },
    #[error("the zeroth-row MDS check needs L >= K, got L = {l}, K = {k}")]
    MdsCheckInapplicable { l: usize, k: usize },
    #[error("could not build the verification worker pool: {msg}")]
    WorkerPool { msg: String },
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// How a family came to be; drives which decoders apply and is preserved
/// through the file format.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Provenance {
    /// Pascal construction with the recorded primitive element.
    Pascal { alpha: FieldElement },
    /// Monomial variant of the Pascal construction.
    Monomial { alpha: FieldElement },
    /// The (q+2, 1, 3, q) family.
    QPlus2 { alpha: FieldElement },
    /// Output of a transformation.
    Transformed,
    /// Read from a file without construction metadata.
    Loaded,
}

/// L matrices of size N x K over a common field.
#[derive(Clone, PartialEq, Debug)]
pub struct UdmFamily {
    l: usize,
    n: usize,
    k: usize,
    spec: FieldSpec,
    matrices: Vec<MatrixGF>,
    provenance: Provenance,
}

impl UdmFamily {
    /// Validates shapes and the N <= K invariant. K > LN is tolerated (it
    /// only means no pattern can gather K rows); see
    /// [`UdmFamily::parameter_warnings`].
    pub fn new(
        spec: FieldSpec,
        matrices: Vec<MatrixGF>,
        provenance: Provenance,
    ) -> Result<Self, UdmError> {
        let l = matrices.len();
        let (n, k) = match matrices.first() {
            Some(m) => (m.rows(), m.cols()),
            None => (0, 0),
        };
        if l == 0 || n == 0 || k == 0 {
            return Err(UdmError::EmptyParameters { l, n, k });
        }
        if n > k {
            return Err(UdmError::KLessThanN { n, k });
        }
        for (index, m) in matrices.iter().enumerate() {
            if m.rows() != n || m.cols() != k {
                return Err(UdmError::MatrixShape {
                    index,
                    rows: m.rows(),
                    cols: m.cols(),
                    n,
                    k,
                });
            }
        }
        Ok(UdmFamily {
            l,
            n,
            k,
            spec,
            matrices,
            provenance,
        })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn matrices(&self) -> &[MatrixGF] {
        &self.matrices
    }

    pub fn matrix(&self, l: usize) -> &MatrixGF {
        &self.matrices[l]
    }

    /// Replaces one matrix, keeping shape; used by the row transform.
    pub(crate) fn replace_matrix(&mut self, l: usize, m: MatrixGF) {
        assert_eq!((m.rows(), m.cols()), (self.n, self.k));
        self.matrices[l] = m;
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// Soft diagnostics: conditions that do not invalidate the object but
    /// deserve a warning when loading (intermediate transform outputs may
    /// violate K <= LN).
    pub fn parameter_warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.k > self.l * self.n {
            w.push(format!(
                "K = {} exceeds L*N = {}: no erasure pattern can gather K rows",
                self.k,
                self.l * self.n
            ));
        }
        w
    }

    /// Stacks the per-matrix row prefixes given by the pattern.
    pub fn stack(&self, pattern: &ErasurePattern) -> Result<MatrixGF, UdmError> {
        if pattern.v.len() != self.l {
            return Err(UdmError::PatternLength {
                len: pattern.v.len(),
                l: self.l,
            });
        }
        let blocks: Vec<(&MatrixGF, usize)> = self
            .matrices
            .iter()
            .zip(pattern.v.iter().copied())
            .collect();
        Ok(stack_rows(&blocks)?)
    }
}

/// Per-channel non-erased prefix lengths (v_0, ..., v_{L-1}).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ErasurePattern {
    v: Vec<usize>,
}

impl ErasurePattern {
    pub fn new(v: Vec<usize>, n: usize) -> Result<Self, UdmError> {
        for (index, &value) in v.iter().enumerate() {
            if value > n {
                return Err(UdmError::PatternEntryTooLarge { index, value, n });
            }
        }
        Ok(ErasurePattern { v })
    }

    pub fn v(&self) -> &[usize] {
        &self.v
    }

    pub fn sum(&self) -> usize {
        self.v.iter().sum()
    }
}

impl fmt::Display for ErasurePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.v.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Which pattern set an operation ranges over: sums exactly K or at least K.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PatternMode {
    Exact,
    AtLeast,
}

/// The evaluation points of the Pascal construction: beta_0 = 0,
/// beta_1 = infinity, beta_{l+2} = alpha^l. All distinct when alpha is
/// primitive and L <= q + 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BetaSequence {
    points: Vec<EvalPoint>,
    alpha: FieldElement,
}

impl BetaSequence {
    pub fn new(spec: &FieldSpec, alpha: FieldElement, l: usize) -> Result<Self, UdmError> {
        check_length_bound(l, spec)?;
        spec.require_primitive(alpha)?;
        let mut points = Vec::with_capacity(l);
        if l >= 1 {
            points.push(EvalPoint::Finite(FieldElement::ZERO));
        }
        if l >= 2 {
            points.push(EvalPoint::Infinity);
        }
        let mut pw = FieldElement::ONE;
        for _ in 2..l {
            points.push(EvalPoint::Finite(pw));
            pw = spec.mul(pw, alpha);
        }
        Ok(BetaSequence { points, alpha })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, l: usize) -> EvalPoint {
        self.points[l]
    }

    pub fn points(&self) -> &[EvalPoint] {
        &self.points
    }

    pub fn alpha(&self) -> FieldElement {
        self.alpha
    }
}

fn check_length_bound(l: usize, spec: &FieldSpec) -> Result<(), UdmError> {
    let bound = spec.q() + 1;
    if l as u64 > bound {
        return Err(UdmError::BoundViolation {
            l,
            q: spec.q(),
            bound,
        });
    }
    Ok(())
}

fn resolve_alpha(spec: &FieldSpec, alpha: Option<FieldElement>) -> Result<FieldElement, UdmError> {
    match alpha {
        Some(a) => {
            spec.require_primitive(a)?;
            Ok(a)
        }
        None => Ok(spec.alpha()),
    }
}

/// The Pascal construction: A_0 = I_{N,K}, A_1 = J_{N,K}, and
/// [A_{l+2}]_{n,k} = C(k,n) alpha^{l(k-n)}. Valid for any L <= q + 1.
pub fn construct_pascal(
    l: usize,
    n: usize,
    k: usize,
    spec: &FieldSpec,
    alpha: Option<FieldElement>,
) -> Result<UdmFamily, UdmError> {
    if l == 0 || n == 0 || k == 0 {
        return Err(UdmError::EmptyParameters { l, n, k });
    }
    if n > k {
        return Err(UdmError::KLessThanN { n, k });
    }
    check_length_bound(l, spec)?;
    let alpha = resolve_alpha(spec, alpha)?;

    let mut matrices = Vec::with_capacity(l);
    matrices.push(MatrixGF::identity_nk(n, k)?);
    if l >= 2 {
        matrices.push(MatrixGF::reversal_nk(n, k)?);
    }
    for ell in 0..l.saturating_sub(2) {
        let mut m = MatrixGF::zeros(n, k);
        for row in 0..n {
            for col in 0..k {
                let c = binomial_mod_p(col as u64, row as u64, spec);
                if c.is_zero() {
                    continue;
                }
                // col >= row here, so the exponent is non-negative
                let e = (ell * (col - row)) as u64;
                m.set(row, col, spec.mul(c, spec.pow(alpha, e)));
            }
        }
        matrices.push(m);
    }
    UdmFamily::new(spec.clone(), matrices, Provenance::Pascal { alpha })
}

/// The monomial variant for N = K = p^m: entry (n, k) of A_{l+2} is
/// prod_h k_h^{n_h} alpha^{l(k_h-n_h)p^h} over the radix-p digits, with the
/// convention 0^0 = 1.
pub fn construct_monomial_variant(
    l: usize,
    n: usize,
    spec: &FieldSpec,
    alpha: Option<FieldElement>,
) -> Result<UdmFamily, UdmError> {
    if l == 0 || n == 0 {
        return Err(UdmError::EmptyParameters { l, n, k: n });
    }
    check_length_bound(l, spec)?;
    let alpha = resolve_alpha(spec, alpha)?;
    let p = spec.p();
    let m_digits = {
        let mut v = n as u64;
        let mut m = 0u32;
        while v > 1 {
            if v % p != 0 {
                return Err(UdmError::NotCharacteristicPower { n, p });
            }
            v /= p;
            m += 1;
        }
        if m == 0 {
            return Err(UdmError::NotCharacteristicPower { n, p });
        }
        m
    };

    let digits = |mut x: usize| -> Vec<i64> {
        let mut d = Vec::with_capacity(m_digits as usize);
        for _ in 0..m_digits {
            d.push((x as u64 % p) as i64);
            x /= p as usize;
        }
        d
    };

    let mut matrices = Vec::with_capacity(l);
    matrices.push(MatrixGF::identity(n));
    if l >= 2 {
        matrices.push(MatrixGF::reversal(n));
    }
    for ell in 0..l.saturating_sub(2) {
        let mut mat = MatrixGF::zeros(n, n);
        for row in 0..n {
            let nd = digits(row);
            for col in 0..n {
                let kd = digits(col);
                let mut acc = FieldElement::ONE;
                for h in 0..m_digits as usize {
                    // k_h^{n_h} with 0^0 = 1
                    let base = spec.natural_map(kd[h]);
                    let t1 = spec.pow(base, nd[h] as u64);
                    let e = ell as i64 * (kd[h] - nd[h]) * (p as i64).pow(h as u32);
                    let t2 = spec.pow_signed(alpha, e)?;
                    acc = spec.mul(acc, spec.mul(t1, t2));
                }
                mat.set(row, col, acc);
            }
        }
        matrices.push(mat);
    }
    UdmFamily::new(spec.clone(), matrices, Provenance::Monomial { alpha })
}

/// The (q+2, 1, 3, q) family over GF(2^s): row vectors (1,0,0), (0,0,1),
/// (1, alpha^l, alpha^{2l}) for l in [q-1], and (0,1,0).
pub fn construct_q_plus_2(spec: &FieldSpec) -> Result<UdmFamily, UdmError> {
    if spec.p() != 2 {
        return Err(UdmError::OddCharacteristic {
            q: spec.q(),
            p: spec.p(),
        });
    }
    let alpha = spec.alpha();
    let q = spec.q();
    let row = |vals: [FieldElement; 3]| MatrixGF::new(1, 3, vals.to_vec());
    let mut matrices = Vec::with_capacity(q as usize + 2);
    matrices.push(row([
        FieldElement::ONE,
        FieldElement::ZERO,
        FieldElement::ZERO,
    ]));
    matrices.push(row([
        FieldElement::ZERO,
        FieldElement::ZERO,
        FieldElement::ONE,
    ]));
    for ell in 0..q - 1 {
        let a = spec.pow(alpha, ell);
        matrices.push(row([FieldElement::ONE, a, spec.mul(a, a)]));
    }
    matrices.push(row([
        FieldElement::ZERO,
        FieldElement::ONE,
        FieldElement::ZERO,
    ]));
    UdmFamily::new(spec.clone(), matrices, Provenance::QPlus2 { alpha })
}

/// Streams every pattern in the chosen set in lexicographic order.
pub fn enumerate_patterns(
    l: usize,
    n: usize,
    k: usize,
    mode: PatternMode,
) -> impl Iterator<Item = ErasurePattern> {
    PatternIter::new(l, n, k, mode)
}

/// Depth-first enumeration, choosing each position's value in ascending
/// order, which yields lexicographic output without materializing the set.
struct PatternIter {
    l: usize,
    n: usize,
    k: usize,
    mode: PatternMode,
    stack: Vec<Vec<usize>>,
}

impl PatternIter {
    fn new(l: usize, n: usize, k: usize, mode: PatternMode) -> Self {
        PatternIter {
            l,
            n,
            k,
            mode,
            stack: vec![Vec::new()],
        }
    }

    fn admissible(&self, prefix_sum: usize, pos: usize, value: usize) -> bool {
        let capacity_after = (self.l - pos - 1) * self.n;
        let new_sum = prefix_sum + value;
        match self.mode {
            PatternMode::Exact => new_sum <= self.k && new_sum + capacity_after >= self.k,
            PatternMode::AtLeast => new_sum + capacity_after >= self.k,
        }
    }
}

impl Iterator for PatternIter {
    type Item = ErasurePattern;

    fn next(&mut self) -> Option<ErasurePattern> {
        while let Some(prefix) = self.stack.pop() {
            let pos = prefix.len();
            let sum: usize = prefix.iter().sum();
            if pos == self.l {
                let ok = match self.mode {
                    PatternMode::Exact => sum == self.k,
                    PatternMode::AtLeast => sum >= self.k,
                };
                if ok {
                    return Some(ErasurePattern { v: prefix });
                }
                continue;
            }
            // push candidates in descending order so the smallest pops first
            for value in (0..=self.n).rev() {
                if self.admissible(sum, pos, value) {
                    let mut next = prefix.clone();
                    next.push(value);
                    self.stack.push(next);
                }
            }
        }
        None
    }
}

/// Exact size of the chosen pattern set.
pub fn count_patterns(l: usize, n: usize, k: usize, mode: PatternMode) -> BigUint {
    let table = completion_counts(l, n);
    match mode {
        PatternMode::Exact => table[0].get(k).cloned().unwrap_or_default(),
        PatternMode::AtLeast => {
            let mut acc = BigUint::default();
            for sum in k..=l * n {
                acc += table[0].get(sum).cloned().unwrap_or_default();
            }
            acc
        }
    }
}

/// counts[pos][r] = number of ways positions pos..L-1 can sum to r with each
/// entry in [0, N]. The sampler unranks against this table.
pub(crate) fn completion_counts(l: usize, n: usize) -> Vec<Vec<BigUint>> {
    let max = l * n;
    let mut table = vec![vec![BigUint::default(); max + 1]; l + 1];
    table[l][0] = BigUint::from(1u32);
    for pos in (0..l).rev() {
        for r in 0..=(l - pos) * n {
            let mut acc = BigUint::default();
            for value in 0..=n.min(r) {
                acc += &table[pos + 1][r - value];
            }
            table[pos][r] = acc;
        }
    }
    table
}

/// The verifier's verdict, with the lexicographically first counterexample
/// when the family fails.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub passed: bool,
    pub patterns_checked: usize,
    pub first_failure: Option<FailureWitness>,
}

/// A failing pattern together with its stacked matrix and observed rank.
#[derive(Clone, Debug)]
pub struct FailureWitness {
    pub pattern: ErasurePattern,
    pub stacked: MatrixGF,
    pub rank: usize,
}

/// Checks the full-rank condition for every pattern in the chosen set,
/// fanning out across the rayon pool. Failure is reported, not an error.
pub fn verify(family: &UdmFamily, mode: PatternMode) -> VerificationReport {
    let patterns: Vec<ErasurePattern> =
        enumerate_patterns(family.l(), family.n(), family.k(), mode).collect();
    let k = family.k();
    let spec = family.spec();
    let first_failure = patterns
        .par_iter()
        .enumerate()
        .filter_map(|(i, pattern)| {
            let stacked = family.stack(pattern).expect("pattern fits family");
            let rank = stacked.rank(spec);
            if rank == k {
                None
            } else {
                Some((
                    i,
                    FailureWitness {
                        pattern: pattern.clone(),
                        stacked,
                        rank,
                    },
                ))
            }
        })
        .min_by_key(|(i, _)| *i)
        .map(|(_, w)| w);
    VerificationReport {
        passed: first_failure.is_none(),
        patterns_checked: patterns.len(),
        first_failure,
    }
}

/// As [`verify`], but on a dedicated pool of `jobs` workers (None uses the
/// global pool).
pub fn verify_with_jobs(
    family: &UdmFamily,
    mode: PatternMode,
    jobs: Option<usize>,
) -> Result<VerificationReport, UdmError> {
    match jobs {
        None => Ok(verify(family, mode)),
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| UdmError::WorkerPool { msg: e.to_string() })?;
            Ok(pool.install(|| verify(family, mode)))
        }
    }
}

/// What is known about the largest possible family length L for given N, K,
/// and q.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MaxLBound {
    /// A proven bound, with the statement it follows from.
    Bounded { l_max: u64, reason: String },
    /// No bound applies: K = 1 admits families of every length.
    Unbounded,
    /// Open territory (K > 2N + 1).
    Unknown { note: String },
}

impl fmt::Display for MaxLBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxLBound::Bounded { l_max, reason } => write!(f, "L <= {l_max} ({reason})"),
            MaxLBound::Unbounded => write!(f, "unbounded (K = 1 admits every L)"),
            MaxLBound::Unknown { note } => write!(f, "unknown ({note})"),
        }
    }
}

/// The maximal-L facts: q + 1 for 2 <= K <= 2N, q + 2 for K = 2N + 1,
/// unbounded for K = 1, open beyond.
pub fn max_l_bound(n: usize, k: usize, q: u64) -> MaxLBound {
    if k == 1 {
        return MaxLBound::Unbounded;
    }
    if k <= 2 * n {
        return MaxLBound::Bounded {
            l_max: q + 1,
            reason: format!("2 <= K <= 2N bound with q = {q}"),
        };
    }
    if k == 2 * n + 1 {
        return MaxLBound::Bounded {
            l_max: q + 2,
            reason: format!("K = 2N + 1 bound with q = {q}"),
        };
    }
    MaxLBound::Unknown {
        note: format!(
            "no bound is known for K > 2N + 1; for N = 1 this is the MDS existence \
             question, where L <= q + 1 is conjectured for 2 <= K <= L - 2 except the \
             known even-q exceptions (N = {n}, K = {k}, q = {q})"
        ),
    }
}

/// True iff every K x K submatrix of the L x K matrix of zeroth rows is
/// nonsingular, i.e. those rows generate an MDS code. Needs L >= K.
pub fn check_mds_zeroth_rows(family: &UdmFamily) -> Result<bool, UdmError> {
    let (l, k) = (family.l(), family.k());
    if l < k {
        return Err(UdmError::MdsCheckInapplicable { l, k });
    }
    let g: Vec<Vec<FieldElement>> = family
        .matrices()
        .iter()
        .map(|m| m.row(0).to_vec())
        .collect();
    for subset in (0..l).combinations(k) {
        let sub = MatrixGF::from_rows(subset.into_iter().map(|r| g[r].clone()).collect());
        if sub.rank(family.spec()) != k {
            return Ok(false);
        }
    }
    Ok(true)
}
