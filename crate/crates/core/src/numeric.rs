//! Dense complex matrices and vectors.
//!
//! **Inner-product convention.** [`inner_product`] conjugates its *second*
//! argument: `<u, v> = sum_j u_j * conj(v_j)`. The orthogonalization step
//! `Row_k <- Row_k - <Row_k, Row_i> Row_i` only removes the component of
//! `Row_k` along the unit row `Row_i` under this convention. Swapping the
//! conjugated side silently breaks every row operation in [`crate::rop`].

use std::fmt;
use std::ops::Index;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar with double-precision components.
pub type C64 = Complex64;

/// `<u, v> = sum_j u_j * conj(v_j)`. The second argument is conjugated.
pub fn inner_product(u: &[C64], v: &[C64]) -> Result<C64> {
    if u.len() != v.len() {
        return Err(Error::dims("inner_product", u.len(), v.len()));
    }
    Ok(dot_conj(u, v))
}

#[inline]
pub(crate) fn dot_conj(u: &[C64], v: &[C64]) -> C64 {
    u.iter()
        .zip(v)
        .fold(C64::new(0.0, 0.0), |acc, (a, b)| acc + a * b.conj())
}

pub fn euclidean_norm(u: &[C64]) -> f64 {
    u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn conjugate_transpose(q: &ComplexMatrix) -> ComplexMatrix {
    q.conjugate_transpose()
}

pub fn matrix_product(p: &ComplexMatrix, q: &ComplexMatrix) -> Result<ComplexMatrix> {
    p.matmul(q)
}

fn check_finite(rows: usize, cols: usize, data: &[C64]) -> Result<()> {
    debug_assert_eq!(data.len(), rows * cols);
    match data
        .iter()
        .position(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        Some(p) => Err(Error::NonFinite {
            row: p / cols.max(1),
            col: p % cols.max(1),
        }),
        None => Ok(()),
    }
}

/// Dense row-major complex matrix.
///
/// Every entry is finite. Matrices built from caller data have at least one
/// row and one column; a zero-row matrix only appears as the transformed
/// matrix of an empty row stream.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::dims("ComplexMatrix::new", rows * cols, data.len()));
        }
        check_finite(rows, cols, &data)?;
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(m * n);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::dims(
                    "ComplexMatrix::from_rows",
                    format!("{n} entries"),
                    format!("{} entries in row {i}", r.len()),
                ));
            }
            data.extend_from_slice(r);
        }
        Self::new(m, n, data)
    }

    /// Real-valued matrix from nested rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in entries.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [C64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Mutable access to two distinct rows, `(target, source)`.
    pub(crate) fn row_pair_mut(&mut self, target: usize, source: usize) -> (&mut [C64], &[C64]) {
        assert_ne!(target, source);
        let c = self.cols;
        if target < source {
            let (lo, hi) = self.data.split_at_mut(source * c);
            (&mut lo[target * c..(target + 1) * c], &hi[..c])
        } else {
            let (lo, hi) = self.data.split_at_mut(target * c);
            (&mut hi[..c], &lo[source * c..(source + 1) * c])
        }
    }

    pub fn column(&self, j: usize) -> ColumnVector {
        ColumnVector((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, z: C64) {
        self.data[i * self.cols + j] = z;
    }

    pub fn conjugate_transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::dims(
                "matrix_product",
                format!("{} rows on the right", self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vector(&self, v: &ColumnVector) -> Result<ColumnVector> {
        if self.cols != v.len() {
            return Err(Error::dims("mul_vector", self.cols, v.len()));
        }
        Ok(ColumnVector(
            (0..self.rows)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(v.as_slice())
                        .map(|(a, b)| a * b)
                        .sum()
                })
                .collect(),
        ))
    }

    fn zip_with(
        &self,
        other: &Self,
        op: &'static str,
        f: impl Fn(C64, C64) -> C64,
    ) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::dims(
                op,
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a * s).collect(),
        }
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest elementwise magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    pub fn frobenius_norm(&self) -> f64 {
        euclidean_norm(&self.data)
    }

    /// Largest elementwise magnitude of `Q - Q*`; infinite for non-square input.
    pub fn hermitian_residual(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Copy of columns `start..end`.
    pub fn columns(&self, start: usize, end: usize) -> Self {
        let mut out = Self::zeros(self.rows, end - start);
        for i in 0..self.rows {
            out.row_mut(i).copy_from_slice(&self.row(i)[start..end]);
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Column vector of complex entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnVector(Vec<C64>);

impl ColumnVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        check_finite(entries.len(), 1, &entries)?;
        Ok(Self(entries))
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![C64::new(0.0, 0.0); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        euclidean_norm(&self.0)
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.0.len(),
            cols: 1,
            data: self.0.clone(),
        }
    }

    /// Column `j` of `m`; same as [`ComplexMatrix::column`].
    pub fn from_column(m: &ComplexMatrix, j: usize) -> Self {
        m.column(j)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::dims("ColumnVector::add", self.len(), other.len()));
        }
        Ok(Self(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::dims("ColumnVector::sub", self.len(), other.len()));
        }
        Ok(Self(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self
            .sub(other)?
            .0
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }
}

impl Index<usize> for ColumnVector {
    type Output = C64;

    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}
