//! Independent checks on solver output.
//!
//! Nothing here calls into the row-orthonormalization code. The
//! pseudoinverse oracle inverts `A A*` by Gaussian elimination with partial
//! pivoting and so only applies to matrices of full row rank.

use crate::error::{Error, Result};
use crate::numeric::{ColumnVector, ComplexMatrix, C64};

/// Residual and verdict for one Penrose condition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Condition {
    pub holds: bool,
    pub residual: f64,
}

/// Residuals of `AGA = A`, `GAG = G`, `AG = (AG)*`, `GA = (GA)*`.
#[derive(Clone, Debug, PartialEq)]
pub struct PenroseReport {
    pub p1: Condition,
    pub p2: Condition,
    pub p3: Condition,
    pub p4: Condition,
    pub tol: f64,
}

impl PenroseReport {
    pub fn conditions(&self) -> [Condition; 4] {
        [self.p1, self.p2, self.p3, self.p4]
    }

    /// Numbers (1-based) of the conditions that hold.
    pub fn inferred_class(&self) -> Vec<u8> {
        self.conditions()
            .iter()
            .zip(1u8..)
            .filter(|(c, _)| c.holds)
            .map(|(_, k)| k)
            .collect()
    }

    /// At least a `{1,2,4}`-inverse.
    pub fn is_124(&self) -> bool {
        self.p1.holds && self.p2.holds && self.p4.holds
    }

    pub fn is_moore_penrose(&self) -> bool {
        self.is_124() && self.p3.holds
    }
}

/// Residuals are max-elementwise magnitudes. Conditions 1 and 3 are divided by
/// `max(1, ||A||_F)`, conditions 2 and 4 by `max(1, ||G||_F)`.
pub fn penrose_check(a: &ComplexMatrix, g: &ComplexMatrix, tol: f64) -> Result<PenroseReport> {
    let (m, n) = a.shape();
    if g.shape() != (n, m) {
        return Err(Error::dims(
            "penrose_check",
            format!("{n}x{m} inverse"),
            format!("{}x{}", g.rows(), g.cols()),
        ));
    }
    let a_scale = a.frobenius_norm().max(1.0);
    let g_scale = g.frobenius_norm().max(1.0);
    let ag = a.matmul(g)?;
    let ga = g.matmul(a)?;
    let cond = |residual: f64| Condition {
        holds: residual <= tol,
        residual,
    };
    Ok(PenroseReport {
        p1: cond(ag.matmul(a)?.max_abs_diff(a)? / a_scale),
        p2: cond(ga.matmul(g)?.max_abs_diff(g)? / g_scale),
        p3: cond(ag.hermitian_residual() / a_scale),
        p4: cond(ga.hermitian_residual() / g_scale),
        tol,
    })
}

/// Inverse of a square matrix by Gauss-Jordan elimination with partial pivoting.
/// Fails when a pivot magnitude drops to `1e-12 * ||S||_F` or below.
fn invert_partial_pivot(s: &ComplexMatrix) -> Result<ComplexMatrix> {
    let k = s.rows();
    let threshold = 1e-12 * s.frobenius_norm();
    let mut lhs: Vec<Vec<C64>> = (0..k).map(|i| s.row(i).to_vec()).collect();
    let id = ComplexMatrix::identity(k);
    let mut rhs: Vec<Vec<C64>> = (0..k).map(|i| id.row(i).to_vec()).collect();

    for col in 0..k {
        let (pivot_row, pivot) = (col..k)
            .map(|r| (r, lhs[r][col].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty pivot range");
        if pivot <= threshold {
            return Err(Error::RankDeficient {
                step: col,
                pivot,
                threshold,
            });
        }
        lhs.swap(col, pivot_row);
        rhs.swap(col, pivot_row);

        let inv = C64::new(1.0, 0.0) / lhs[col][col];
        for z in lhs[col].iter_mut().chain(rhs[col].iter_mut()) {
            *z *= inv;
        }
        for r in 0..k {
            if r == col {
                continue;
            }
            let factor = lhs[r][col];
            if factor == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..k {
                let (pl, pr) = (lhs[col][j], rhs[col][j]);
                lhs[r][j] -= factor * pl;
                rhs[r][j] -= factor * pr;
            }
        }
    }
    let data = rhs.into_iter().flatten().collect();
    ComplexMatrix::new(k, k, data)
}

/// Moore-Penrose inverse `A* (A A*)^-1` of a full-row-rank matrix.
pub fn oracle_pseudoinverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let a_h = a.conjugate_transpose();
    let gram = a.matmul(&a_h)?;
    a_h.matmul(&invert_partial_pivot(&gram)?)
}

/// Holds iff `||P x_p|| <= tol * max(1, ||x_p||)`. Returns the verdict and
/// `||P x_p||`.
pub fn minimum_norm_certificate(
    x_p: &ColumnVector,
    projector: &ComplexMatrix,
    tol: f64,
) -> Result<(bool, f64)> {
    let residual = projector.mul_vector(x_p)?.norm();
    Ok((residual <= tol * x_p.norm().max(1.0), residual))
}
