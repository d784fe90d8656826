//! Solution artifacts assembled from orthonormalized rows.
//!
//! With `A'` from [`crate::rop`], every solution of a consistent system is
//! `x = (A')* b' + P y` where `P = I - (A')* A'` projects onto `null(A)`.
//! The first term is orthogonal to the null space, hence of minimum norm.

use crate::error::{Error, Result};
use crate::numeric::{ColumnVector, ComplexMatrix, C64};
use crate::rop::{
    orthonormalize, rop_accumulate, rop_transform_rhs, QuasiOrthonormalRows, RowOpLog,
};

/// Which quantity the row operations are mirrored onto.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Variation {
    /// Apply the operations to `b`, giving `A' x = b'`.
    #[default]
    TransformRhs,
    /// Accumulate the operations in `M`, giving `A' x = M b` and `G = (A')* M`.
    AccumulateM,
}

/// Outcome of [`consistency_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Consistency {
    pub consistent: bool,
    /// First zero row of `A'` whose `b'` entry exceeds its threshold.
    pub offending_row: Option<usize>,
    /// Largest `|b'_i|` over zero rows of `A'`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub x_p: ColumnVector,
    pub rank: usize,
    pub consistent: bool,
    pub offending_row: Option<usize>,
    pub projector: ComplexMatrix,
    pub g: Option<ComplexMatrix>,
    pub m_factor: Option<ComplexMatrix>,
    pub rows: QuasiOrthonormalRows,
    pub b_prime: ColumnVector,
    pub log: RowOpLog,
}

/// Solution of `A X = B` for a multi-column right-hand side.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSolveResult {
    pub x_p: ComplexMatrix,
    pub projector: ComplexMatrix,
    pub g: ComplexMatrix,
    pub m_factor: ComplexMatrix,
    pub rank: usize,
    pub columns: Vec<Consistency>,
    pub rows: QuasiOrthonormalRows,
    pub log: RowOpLog,
}

impl MatrixSolveResult {
    pub fn consistent(&self) -> bool {
        self.columns.iter().all(|c| c.consistent)
    }
}

/// `x_p = (A')* b'`.
pub fn particular_solution(
    q: &QuasiOrthonormalRows,
    b_prime: &ColumnVector,
) -> Result<ColumnVector> {
    let a = &q.a_prime;
    if b_prime.len() != a.rows() {
        return Err(Error::dims("particular_solution", a.rows(), b_prime.len()));
    }
    let mut x = ColumnVector::zeros(a.cols());
    let out = x.as_mut_slice();
    for i in 0..a.rows() {
        let bi = b_prime[i];
        for (o, z) in out.iter_mut().zip(a.row(i)) {
            *o += z.conj() * bi;
        }
    }
    Ok(x)
}

/// `P = I_n - (A')* A'`.
pub fn null_projector(q: &QuasiOrthonormalRows) -> ComplexMatrix {
    let a = &q.a_prime;
    let n = a.cols();
    let mut p = ComplexMatrix::identity(n);
    for i in q.w.iter() {
        let r = a.row(i);
        for j in 0..n {
            let cj = r[j].conj();
            for k in 0..n {
                let v = p[(j, k)] - cj * r[k];
                p.set(j, k, v);
            }
        }
    }
    p
}

/// `G = (A')* M`.
pub fn generalized_inverse(
    q: &QuasiOrthonormalRows,
    m_factor: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let m = q.a_prime.rows();
    if m_factor.shape() != (m, m) {
        return Err(Error::dims(
            "generalized_inverse",
            format!("{m}x{m}"),
            format!("{}x{}", m_factor.rows(), m_factor.cols()),
        ));
    }
    q.a_prime.conjugate_transpose().matmul(m_factor)
}

/// `x_h = P y`.
pub fn homogeneous_solution(projector: &ComplexMatrix, y: &ColumnVector) -> Result<ColumnVector> {
    projector.mul_vector(y)
}

/// Orthonormal basis of `range(P)`, i.e. of `null(A)`.
///
/// The rows of a Hermitian `P` are the conjugated columns, so orthonormalizing
/// the rows and conjugating back gives column vectors spanning its range.
/// Basis vectors carry no canonical phase.
pub fn null_space_basis(projector: &ComplexMatrix, tol: f64) -> Result<Vec<ColumnVector>> {
    let n = projector.rows();
    if projector.cols() != n {
        return Err(Error::dims(
            "null_space_basis",
            "square projector",
            format!("{}x{}", projector.rows(), projector.cols()),
        ));
    }
    let residual = projector.matmul(projector)?.max_abs_diff(projector)?;
    if residual > tol {
        return Err(Error::NotIdempotent { residual });
    }
    let mut rows = projector.clone();
    let mut scratch = ComplexMatrix::zeros(n, 1);
    let (w, _, _) = orthonormalize(&mut rows, &mut scratch, tol)?;
    w.iter()
        .map(|i| ColumnVector::new(rows.row(i).iter().map(C64::conj).collect()))
        .collect()
}

/// A system is consistent iff every zero row of `A'` carries a (near) zero
/// entry of `b'`.
///
/// The threshold for row `i` is `eps_rel * max(1, ||a_i||) * max(1, ||b'_W||)`
/// where `a_i` is the original row and `b'_W` the entries of `b'` on nonzero
/// rows (so `||b'_W|| = ||x_p||`). Rounding in `b'_i` grows with both factors.
pub fn consistency_check(
    q: &QuasiOrthonormalRows,
    b_prime: &ColumnVector,
    eps_rel: f64,
) -> Consistency {
    let scale =
        q.w.iter()
            .map(|i| b_prime[i].norm_sqr())
            .sum::<f64>()
            .sqrt()
            .max(1.0);
    let mut out = Consistency {
        consistent: true,
        offending_row: None,
        residual: 0.0,
    };
    for i in (0..q.a_prime.rows()).filter(|&i| !q.w.contains(i)) {
        let r = b_prime[i].norm();
        out.residual = out.residual.max(r);
        if out.consistent && r > q.row_threshold(i, eps_rel) * scale {
            out.consistent = false;
            out.offending_row = Some(i);
        }
    }
    out
}

/// Solves `A x = b`. An inconsistent system still yields `x_p` (the solution
/// of the projected system `I_W A' x = I_W b'`) with `consistent = false`.
pub fn solve(
    a: &ComplexMatrix,
    b: &ColumnVector,
    variation: Variation,
    eps_rel: f64,
) -> Result<SolveResult> {
    if b.len() != a.rows() {
        return Err(Error::dims("solve", a.rows(), b.len()));
    }
    match variation {
        Variation::TransformRhs => {
            let t = rop_transform_rhs(a, b, eps_rel)?;
            let x_p = particular_solution(&t.rows, &t.b_prime)?;
            let check = consistency_check(&t.rows, &t.b_prime, eps_rel);
            Ok(SolveResult {
                x_p,
                rank: t.rows.rank(),
                consistent: check.consistent,
                offending_row: check.offending_row,
                projector: null_projector(&t.rows),
                g: None,
                m_factor: None,
                rows: t.rows,
                b_prime: t.b_prime,
                log: t.log,
            })
        }
        Variation::AccumulateM => {
            let acc = rop_accumulate(a, eps_rel)?;
            let g = generalized_inverse(&acc.rows, &acc.m)?;
            let b_prime = acc.m.mul_vector(b)?;
            let x_p = g.mul_vector(b)?;
            let check = consistency_check(&acc.rows, &b_prime, eps_rel);
            Ok(SolveResult {
                x_p,
                rank: acc.rows.rank(),
                consistent: check.consistent,
                offending_row: check.offending_row,
                projector: null_projector(&acc.rows),
                g: Some(g),
                m_factor: Some(acc.m),
                rows: acc.rows,
                b_prime,
                log: acc.log,
            })
        }
    }
}

/// Solves `A X = B` with one orthonormalization pass: `X_p = G B`.
pub fn solve_matrix_rhs(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    eps_rel: f64,
) -> Result<MatrixSolveResult> {
    if b.rows() != a.rows() {
        return Err(Error::dims("solve_matrix_rhs", a.rows(), b.rows()));
    }
    let acc = rop_accumulate(a, eps_rel)?;
    let g = generalized_inverse(&acc.rows, &acc.m)?;
    let x_p = g.matmul(b)?;
    let b_prime = acc.m.matmul(b)?;
    let columns = (0..b.cols())
        .map(|j| consistency_check(&acc.rows, &b_prime.column(j), eps_rel))
        .collect();
    Ok(MatrixSolveResult {
        x_p,
        projector: null_projector(&acc.rows),
        g,
        m_factor: acc.m,
        rank: acc.rows.rank(),
        columns,
        rows: acc.rows,
        log: acc.log,
    })
}
