//! Streaming solver: rows of `[A | b]` arrive one at a time.
//!
//! Each new row is orthogonalized against all finalized rows at once
//! (classical Gram-Schmidt), so rows `1..=i` of `A'`, `b'` and `M` are final
//! after the `i`-th ingest. The particular solution then accrues as
//! `x_p = sum_i conj(Row_i[A'])^T b'_i`; the increments are mutually
//! orthogonal, so `||x_p||` never decreases.

use crate::error::{Error, Result};
use crate::numeric::{dot_conj, euclidean_norm, ColumnVector, ComplexMatrix, C64};
use crate::rop::{IndexSet, QuasiOrthonormalRows, RowOp, RowOpLog};
use crate::solver::{null_projector, SolveResult};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Contribution of one ingested row.
#[derive(Clone, Debug, PartialEq)]
pub struct Increment {
    /// 0-based arrival index.
    pub index: usize,
    pub x_p_inc: ColumnVector,
    /// `Col_i[(A')*] Row_i[M]`, `n x rows_seen`; present when G is tracked.
    pub g_inc: Option<ComplexMatrix>,
    pub was_zero_row: bool,
    pub inconsistency_detected: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub x_p: ColumnVector,
    pub rank: usize,
    pub norm: f64,
}

#[derive(Clone, Debug)]
struct FinalRow {
    index: usize,
    unit: Vec<C64>,
    b: C64,
    /// Row of `M`, padded lazily to the current stream length.
    m_row: Vec<C64>,
}

#[derive(Clone, Debug)]
struct ZeroRow {
    index: usize,
    b_residual: C64,
    threshold: f64,
    m_row: Vec<C64>,
}

/// Single-owner streaming state.
#[derive(Clone, Debug)]
pub struct OnlineSolver {
    n: usize,
    eps_rel: f64,
    track_g: bool,
    reorth: bool,
    finalized: Vec<FinalRow>,
    zero_rows: Vec<ZeroRow>,
    source_norms: Vec<f64>,
    x_p: ColumnVector,
    /// `n x rows_seen`, row-major by `n`.
    g: Vec<Vec<C64>>,
    norm_history: Vec<f64>,
    rows_seen: usize,
    log: RowOpLog,
}

impl OnlineSolver {
    pub fn new(n: usize, eps_rel: f64, track_g: bool, reorth: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "column count must be at least 1".into(),
            ));
        }
        if !(eps_rel.is_finite() && eps_rel >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "eps must be finite and nonnegative, got {eps_rel}"
            )));
        }
        Ok(Self {
            n,
            eps_rel,
            track_g,
            reorth,
            finalized: Vec::new(),
            zero_rows: Vec::new(),
            source_norms: Vec::new(),
            x_p: ColumnVector::zeros(n),
            g: vec![Vec::new(); n],
            norm_history: vec![0.0],
            rows_seen: 0,
            log: RowOpLog::new(),
        })
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn rows_seen(&self) -> usize {
        self.rows_seen
    }

    pub fn tracks_g(&self) -> bool {
        self.track_g
    }

    pub fn norm_history(&self) -> &[f64] {
        &self.norm_history
    }

    pub fn log(&self) -> &RowOpLog {
        &self.log
    }

    /// One CGS pass of `row` against every finalized row, mirrored on `b`
    /// and the `M` row.
    fn project_out(&mut self, index: usize, row: &mut [C64], b: &mut C64, m_row: &mut [C64]) {
        let prods: Vec<C64> = self
            .finalized
            .iter()
            .map(|f| dot_conj(row, &f.unit))
            .collect();
        for (f, &prod) in self.finalized.iter().zip(&prods) {
            for (x, &u) in row.iter_mut().zip(&f.unit) {
                *x -= u * prod;
            }
            *b -= f.b * prod;
            if self.track_g {
                for (x, &u) in m_row.iter_mut().zip(&f.m_row) {
                    *x -= u * prod;
                }
            }
            self.log.push(RowOp::Orthogonalize {
                target: index,
                source: f.index,
                prod,
            });
        }
    }

    pub fn ingest_row(&mut self, a_row: &[C64], b_i: C64) -> Result<Increment> {
        if a_row.len() != self.n {
            return Err(Error::dims("ingest_row", self.n, a_row.len()));
        }
        if let Some(j) = a_row
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite {
                row: self.rows_seen,
                col: j,
            });
        }
        if !(b_i.re.is_finite() && b_i.im.is_finite()) {
            return Err(Error::NonFinite {
                row: self.rows_seen,
                col: self.n,
            });
        }

        let index = self.rows_seen;
        self.rows_seen += 1;
        let width = self.rows_seen;
        let source_norm = euclidean_norm(a_row);
        self.source_norms.push(source_norm);

        let mut row = a_row.to_vec();
        let mut b = b_i;
        let mut m_row = Vec::new();
        if self.track_g {
            m_row = vec![ZERO; width];
            m_row[index] = C64::new(1.0, 0.0);
            for f in &mut self.finalized {
                f.m_row.resize(width, ZERO);
            }
        }

        self.project_out(index, &mut row, &mut b, &mut m_row);
        if self.reorth {
            self.project_out(index, &mut row, &mut b, &mut m_row);
        }

        let threshold = self.eps_rel * source_norm.max(1.0);
        let mag = euclidean_norm(&row);
        let increment = if mag > threshold {
            for z in &mut row {
                *z /= mag;
            }
            b /= mag;
            for z in &mut m_row {
                *z /= mag;
            }
            self.log.push(RowOp::Normalize { row: index, mag });

            let x_p_inc = ColumnVector::new(row.iter().map(|z| z.conj() * b).collect())?;
            let g_inc = self.track_g.then(|| {
                let mut g_inc = ComplexMatrix::zeros(self.n, width);
                for (j, z) in row.iter().enumerate() {
                    for (k, mk) in m_row.iter().enumerate() {
                        g_inc.set(j, k, z.conj() * mk);
                    }
                }
                g_inc
            });
            self.finalized.push(FinalRow {
                index,
                unit: row,
                b,
                m_row,
            });
            Increment {
                index,
                x_p_inc,
                g_inc,
                was_zero_row: false,
                inconsistency_detected: false,
            }
        } else {
            self.log.push(RowOp::SkipZero { row: index });
            let scale = self.x_p.norm().max(1.0);
            let inconsistent = b.norm() > threshold * scale;
            self.zero_rows.push(ZeroRow {
                index,
                b_residual: b,
                threshold,
                m_row,
            });
            Increment {
                index,
                x_p_inc: ColumnVector::zeros(self.n),
                g_inc: self.track_g.then(|| ComplexMatrix::zeros(self.n, width)),
                was_zero_row: true,
                inconsistency_detected: inconsistent,
            }
        };

        self.x_p = self.x_p.add(&increment.x_p_inc)?;
        if let Some(g_inc) = &increment.g_inc {
            for (j, g_row) in self.g.iter_mut().enumerate() {
                g_row.resize(width, ZERO);
                for (x, y) in g_row.iter_mut().zip(g_inc.row(j)) {
                    *x += y;
                }
            }
        }
        self.norm_history.push(self.x_p.norm());
        Ok(increment)
    }

    pub fn current_estimate(&self) -> Estimate {
        Estimate {
            x_p: self.x_p.clone(),
            rank: self.finalized.len(),
            norm: self.x_p.norm(),
        }
    }

    /// Assembles the batch result type from the streamed state.
    ///
    /// An empty stream yields a `0 x n` `A'`; `G` and `M` are then `n x 0`
    /// and `0 x 0` when tracked.
    pub fn finalize(&self) -> SolveResult {
        let m = self.rows_seen;
        let n = self.n;
        let mut a_prime = ComplexMatrix::zeros(m, n);
        let mut b_prime = ColumnVector::zeros(m);
        let mut m_factor = ComplexMatrix::zeros(m, m);

        for f in &self.finalized {
            a_prime.row_mut(f.index).copy_from_slice(&f.unit);
            b_prime.as_mut_slice()[f.index] = f.b;
            for (k, &z) in f.m_row.iter().enumerate() {
                m_factor.set(f.index, k, z);
            }
        }
        // reconstructed b' uses the residuals as recorded at ingest time
        let mut offending_row = None;
        let scale = self.x_p.norm().max(1.0);
        for z in &self.zero_rows {
            b_prime.as_mut_slice()[z.index] = z.b_residual;
            for (k, &v) in z.m_row.iter().enumerate() {
                m_factor.set(z.index, k, v);
            }
            if offending_row.is_none() && z.b_residual.norm() > z.threshold * scale {
                offending_row = Some(z.index);
            }
        }

        let rows = QuasiOrthonormalRows {
            a_prime,
            w: IndexSet::new(self.finalized.iter().map(|f| f.index).collect()),
            source_norms: self.source_norms.clone(),
        };
        let g = self.track_g.then(|| {
            let mut g = ComplexMatrix::zeros(n, m);
            for (j, g_row) in self.g.iter().enumerate() {
                for (k, &z) in g_row.iter().enumerate() {
                    g.set(j, k, z);
                }
            }
            g
        });

        SolveResult {
            x_p: self.x_p.clone(),
            rank: self.finalized.len(),
            consistent: offending_row.is_none(),
            offending_row,
            projector: null_projector(&rows),
            g,
            m_factor: self.track_g.then_some(m_factor),
            rows,
            b_prime,
            log: self.log.clone(),
        }
    }
}
