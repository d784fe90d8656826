//! Row orthonormalization of a matrix by elementary row operations.
//!
//! Both variations share [`orthonormalize`]: rows are visited in order, each
//! row whose norm exceeds the effective threshold is normalized and then
//! projected out of every later row (modified Gram-Schmidt ordering). Rows at
//! or below the threshold are set exactly to zero and left in place. Every
//! operation is mirrored on an attached matrix: `b` for
//! [`rop_transform_rhs`], `I_m` for [`rop_accumulate`].
//!
//! The effective threshold for row `i` is
//! `eps_rel * max(1, ||row_i of the original A||)`. With `eps_rel = 0` any
//! row with a nonzero residual is normalized.

use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::{dot_conj, euclidean_norm, ColumnVector, ComplexMatrix, C64};

/// Default relative rank threshold.
pub const DEFAULT_EPS_REL: f64 = 1e-10;

/// Sorted set of 0-based row indices whose transformed rows are nonzero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        Self(members)
    }

    pub fn full(m: usize) -> Self {
        Self((0..m).collect())
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    fn push(&mut self, i: usize) {
        debug_assert!(self.0.last().is_none_or(|&l| l < i));
        self.0.push(i);
    }
}

/// Transformed rows `A'` together with the set of nonzero rows.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiOrthonormalRows {
    pub a_prime: ComplexMatrix,
    pub w: IndexSet,
    /// Norm of each row of the original matrix, used to scale thresholds.
    pub source_norms: Vec<f64>,
}

impl QuasiOrthonormalRows {
    pub fn rank(&self) -> usize {
        self.w.len()
    }

    /// `eps_rel * max(1, ||original row i||)`.
    pub fn row_threshold(&self, i: usize, eps_rel: f64) -> f64 {
        eps_rel * self.source_norms[i].max(1.0)
    }
}

/// One elementary row operation. Indices are 0-based.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RowOp {
    /// `Row_row <- Row_row / mag`
    Normalize { row: usize, mag: f64 },
    /// `Row_target <- Row_target - prod * Row_source`
    Orthogonalize {
        target: usize,
        source: usize,
        prod: C64,
    },
    /// Row fell below threshold and was set to zero in `A'` only.
    SkipZero { row: usize },
}

impl fmt::Display for RowOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RowOp::Normalize { row, mag } => {
                write!(f, "Row_{} <- Row_{} / {}", row + 1, row + 1, mag)
            }
            RowOp::Orthogonalize {
                target,
                source,
                prod,
            } => write!(
                f,
                "Row_{} <- Row_{} - ({}{:+}i) Row_{}",
                target + 1,
                target + 1,
                prod.re,
                prod.im,
                source + 1
            ),
            RowOp::SkipZero { row } => write!(f, "Row_{} has zero norm, skipped", row + 1),
        }
    }
}

/// Ordered record of the row operations performed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RowOpLog(Vec<RowOp>);

impl RowOpLog {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn push(&mut self, op: RowOp) {
        self.0.push(op);
    }

    pub fn ops(&self) -> &[RowOp] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn check_indices(&self, m: usize) -> Result<()> {
        for op in &self.0 {
            let idx = match *op {
                RowOp::Normalize { row, .. } | RowOp::SkipZero { row } => row,
                RowOp::Orthogonalize { target, source, .. } => target.max(source),
            };
            if idx >= m {
                return Err(Error::IndexOutOfRange { index: idx, len: m });
            }
        }
        Ok(())
    }

    /// Re-applies the log to `a` and `attached`, returning `[A' | attached']`.
    /// Replaying the log of a run on its own input reproduces that run's
    /// output bit for bit.
    pub fn replay(
        &self,
        a: &ComplexMatrix,
        attached: &ComplexMatrix,
    ) -> Result<(ComplexMatrix, ComplexMatrix)> {
        let mut trace = self.trace(a, attached)?;
        Ok(trace.pop().unwrap_or_else(|| (a.clone(), attached.clone())))
    }

    /// Snapshot of `[A | attached]` after every logged operation.
    pub fn trace(
        &self,
        a: &ComplexMatrix,
        attached: &ComplexMatrix,
    ) -> Result<Vec<(ComplexMatrix, ComplexMatrix)>> {
        if a.rows() != attached.rows() {
            return Err(Error::dims("RowOpLog::replay", a.rows(), attached.rows()));
        }
        self.check_indices(a.rows())?;
        let mut a = a.clone();
        let mut attached = attached.clone();
        let mut out = Vec::with_capacity(self.0.len());
        for op in &self.0 {
            apply(&mut a, &mut attached, *op);
            out.push((a.clone(), attached.clone()));
        }
        Ok(out)
    }
}

/// Applies one row operation to `A` and its attached matrix.
fn apply(a: &mut ComplexMatrix, attached: &mut ComplexMatrix, op: RowOp) {
    match op {
        RowOp::Normalize { row, mag } => {
            for z in a.row_mut(row) {
                *z /= mag;
            }
            for z in attached.row_mut(row) {
                *z /= mag;
            }
        }
        RowOp::Orthogonalize {
            target,
            source,
            prod,
        } => {
            for mat in [&mut *a, &mut *attached] {
                let (t, s) = mat.row_pair_mut(target, source);
                for (x, &y) in t.iter_mut().zip(s) {
                    *x -= y * prod;
                }
            }
        }
        RowOp::SkipZero { row } => {
            a.row_mut(row).fill(C64::new(0.0, 0.0));
        }
    }
}

fn check_eps(eps_rel: f64) -> Result<()> {
    if eps_rel.is_finite() && eps_rel >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "eps must be finite and nonnegative, got {eps_rel}"
        )))
    }
}

/// The shared row schedule. Transforms `a` and `attached` in place.
pub(crate) fn orthonormalize(
    a: &mut ComplexMatrix,
    attached: &mut ComplexMatrix,
    eps_rel: f64,
) -> Result<(IndexSet, Vec<f64>, RowOpLog)> {
    check_eps(eps_rel)?;
    debug_assert_eq!(a.rows(), attached.rows());
    let m = a.rows();
    let source_norms: Vec<f64> = (0..m).map(|i| euclidean_norm(a.row(i))).collect();
    let mut w = IndexSet::default();
    let mut log = RowOpLog::new();

    for (i, &source) in source_norms.iter().enumerate() {
        let mag = euclidean_norm(a.row(i));
        if mag > eps_rel * source.max(1.0) {
            let op = RowOp::Normalize { row: i, mag };
            apply(a, attached, op);
            log.push(op);
            w.push(i);
            for k in i + 1..m {
                let prod = dot_conj(a.row(k), a.row(i));
                let op = RowOp::Orthogonalize {
                    target: k,
                    source: i,
                    prod,
                };
                apply(a, attached, op);
                log.push(op);
            }
        } else {
            let op = RowOp::SkipZero { row: i };
            apply(a, attached, op);
            log.push(op);
        }
    }
    Ok((w, source_norms, log))
}

/// Output of [`rop_transform_rhs`]: `A' x = b'`.
#[derive(Clone, Debug, PartialEq)]
pub struct RhsTransform {
    pub rows: QuasiOrthonormalRows,
    pub b_prime: ColumnVector,
    pub log: RowOpLog,
}

/// Output of [`rop_accumulate`]: `A' x = M b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Accumulated {
    pub rows: QuasiOrthonormalRows,
    pub m: ComplexMatrix,
    pub log: RowOpLog,
}

/// Orthonormalizes the rows of `[A | b]`.
pub fn rop_transform_rhs(
    a: &ComplexMatrix,
    b: &ColumnVector,
    eps_rel: f64,
) -> Result<RhsTransform> {
    if b.len() != a.rows() {
        return Err(Error::dims("rop_transform_rhs", a.rows(), b.len()));
    }
    let mut a_prime = a.clone();
    let mut attached = b.to_matrix();
    let (w, source_norms, log) = orthonormalize(&mut a_prime, &mut attached, eps_rel)?;
    Ok(RhsTransform {
        rows: QuasiOrthonormalRows {
            a_prime,
            w,
            source_norms,
        },
        b_prime: attached.column(0),
        log,
    })
}

/// Orthonormalizes the rows of `[A | I_m]`, yielding `[A' | M]` with `M A = A'`.
pub fn rop_accumulate(a: &ComplexMatrix, eps_rel: f64) -> Result<Accumulated> {
    let mut a_prime = a.clone();
    let mut m = ComplexMatrix::identity(a.rows());
    let (w, source_norms, log) = orthonormalize(&mut a_prime, &mut m, eps_rel)?;
    Ok(Accumulated {
        rows: QuasiOrthonormalRows {
            a_prime,
            w,
            source_norms,
        },
        m,
        log,
    })
}

/// Diagonal 0/1 matrix with ones at the members of `w`.
pub fn index_matrix(w: &IndexSet, m: usize) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::zeros(m, m);
    for i in w.iter() {
        if i >= m {
            return Err(Error::IndexOutOfRange { index: i, len: m });
        }
        out.set(i, i, C64::new(1.0, 0.0));
    }
    Ok(out)
}

/// First reason a matrix fails to be quasi-orthonormal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Violation {
    /// Row norm is neither near 0 nor near 1.
    RowNorm { row: usize, norm: f64 },
    /// Two unit rows are not orthogonal.
    NotOrthogonal {
        first: usize,
        second: usize,
        magnitude: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::RowNorm { row, norm } => write!(f, "row {} has norm {norm}", row + 1),
            Violation::NotOrthogonal {
                first,
                second,
                magnitude,
            } => write!(
                f,
                "rows {} and {} have |<.,.>| = {magnitude:e}",
                first + 1,
                second + 1
            ),
        }
    }
}

/// Checks that every row has norm within `tol` of 0 or 1 and that the
/// unit rows are mutually orthogonal within `tol`.
pub fn check_quasi_orthonormal(q: &ComplexMatrix, tol: f64) -> Option<Violation> {
    let mut unit = Vec::new();
    for i in 0..q.rows() {
        let norm = euclidean_norm(q.row(i));
        if (norm - 1.0).abs() <= tol {
            unit.push(i);
        } else if norm > tol {
            return Some(Violation::RowNorm { row: i, norm });
        }
    }
    for (a, &i) in unit.iter().enumerate() {
        for &k in &unit[a + 1..] {
            let magnitude = dot_conj(q.row(k), q.row(i)).norm();
            if magnitude > tol {
                return Some(Violation::NotOrthogonal {
                    first: i,
                    second: k,
                    magnitude,
                });
            }
        }
    }
    None
}

pub fn is_quasi_orthonormal(q: &ComplexMatrix, tol: f64) -> bool {
    check_quasi_orthonormal(q, tol).is_none()
}

/// One `m x m` matrix per non-skip operation in `log`, in application order.
/// Their product `M_s ... M_1` is the accumulated `M`.
pub fn materialize_elementary_factors(log: &RowOpLog, m: usize) -> Result<Vec<ComplexMatrix>> {
    log.check_indices(m)?;
    Ok(log
        .ops()
        .iter()
        .filter_map(|op| match *op {
            RowOp::Normalize { row, mag } => {
                let mut f = ComplexMatrix::identity(m);
                f.set(row, row, C64::new(1.0 / mag, 0.0));
                Some(f)
            }
            RowOp::Orthogonalize {
                target,
                source,
                prod,
            } => {
                let mut f = ComplexMatrix::identity(m);
                f.set(target, source, -prod);
                Some(f)
            }
            RowOp::SkipZero { .. } => None,
        })
        .collect())
}
