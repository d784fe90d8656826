//! Random instance generators and an independent rank oracle.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rowortho_core::{ColumnVector, ComplexMatrix, C64};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_c64<R: Rng>(rng: &mut R) -> C64 {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_matrix<R: Rng>(rng: &mut R, m: usize, n: usize) -> ComplexMatrix {
    ComplexMatrix::new(m, n, (0..m * n).map(|_| random_c64(rng)).collect()).unwrap()
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> ColumnVector {
    ColumnVector::new((0..n).map(|_| random_c64(rng)).collect()).unwrap()
}

/// `m x n` matrix of rank `rank` (`rank <= min(m, n)`): the first `rank`
/// rows span the row space, the rest are duplicates or random combinations,
/// and the row order is shuffled.
pub fn rank_deficient<R: Rng>(rng: &mut R, m: usize, n: usize, rank: usize) -> ComplexMatrix {
    assert!(rank <= m.min(n));
    let base = random_matrix(rng, rank.max(1), n);
    let mut rows: Vec<Vec<C64>> = Vec::with_capacity(m);
    for i in 0..m {
        if rank == 0 {
            rows.push(vec![c(0.0, 0.0); n]);
        } else if i < rank {
            rows.push(base.row(i).to_vec());
        } else if rng.random_bool(0.5) {
            let k = rng.random_range(0..rank);
            let s = random_c64(rng);
            rows.push(base.row(k).iter().map(|z| z * s).collect());
        } else {
            let coef: Vec<C64> = (0..rank).map(|_| random_c64(rng)).collect();
            rows.push(
                (0..n)
                    .map(|j| (0..rank).map(|k| coef[k] * base[(k, j)]).sum())
                    .collect(),
            );
        }
    }
    for i in (1..m).rev() {
        let j = rng.random_range(0..=i);
        rows.swap(i, j);
    }
    ComplexMatrix::from_rows(&rows).unwrap()
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub a: ComplexMatrix,
    /// Constructed rank (generic, so exact with probability one).
    pub rank: usize,
    pub full_row_rank: bool,
}

/// Sizes in `1..=8`; even seeds are forced rank-deficient by row
/// duplication or combination, odd seeds are generic.
pub fn instance(seed: u64) -> Instance {
    let mut rng = rng(seed);
    let m = rng.random_range(1..=8);
    let n = rng.random_range(1..=8);
    if seed.is_multiple_of(2) {
        let rank = rng.random_range(0..=(m - 1).min(n));
        Instance {
            a: rank_deficient(&mut rng, m, n, rank),
            rank,
            full_row_rank: false,
        }
    } else {
        Instance {
            a: random_matrix(&mut rng, m, n),
            rank: m.min(n),
            full_row_rank: m <= n,
        }
    }
}

/// Rank by Gaussian elimination with complete pivoting; shares no code with
/// the library.
pub fn oracle_rank(a: &ComplexMatrix, rel_tol: f64) -> usize {
    let (m, n) = a.shape();
    let mut w: Vec<Vec<C64>> = (0..m).map(|i| a.row(i).to_vec()).collect();
    let scale = a.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = rel_tol * scale.max(f64::MIN_POSITIVE);
    let mut rank = 0;
    let mut cols: Vec<usize> = (0..n).collect();
    while rank < m.min(n) {
        let mut best = (rank, rank, 0.0);
        for (i, row) in w.iter().enumerate().skip(rank) {
            for jj in rank..n {
                let v = row[cols[jj]].norm();
                if v > best.2 {
                    best = (i, jj, v);
                }
            }
        }
        if best.2 <= tol {
            break;
        }
        w.swap(rank, best.0);
        cols.swap(rank, best.1);
        let pc = cols[rank];
        let pivot = w[rank][pc];
        for i in rank + 1..m {
            let f = w[i][pc] / pivot;
            for &j in &cols {
                let v = w[rank][j];
                w[i][j] -= f * v;
            }
        }
        rank += 1;
    }
    rank
}

/// Component of a random vector orthogonal to `range(A)`, computed with
/// twice-iterated classical Gram-Schmidt on the columns of `A`.
pub fn outside_range<R: Rng>(rng: &mut R, a: &ComplexMatrix) -> ColumnVector {
    let (m, n) = a.shape();
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let scale = a.frobenius_norm().max(1e-300);
    for j in 0..n {
        let mut v: Vec<C64> = (0..m).map(|i| a[(i, j)]).collect();
        for _ in 0..2 {
            for q in &basis {
                let p: C64 = v.iter().zip(q).map(|(x, y)| x * y.conj()).sum();
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= y * p;
                }
            }
        }
        let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nv > 1e-8 * scale {
            basis.push(v.iter().map(|z| z / nv).collect());
        }
    }
    let mut r: Vec<C64> = (0..m).map(|_| random_c64(rng)).collect();
    for _ in 0..2 {
        for q in &basis {
            let p: C64 = r.iter().zip(q).map(|(x, y)| x * y.conj()).sum();
            for (x, y) in r.iter_mut().zip(q) {
                *x -= y * p;
            }
        }
    }
    ColumnVector::new(r).unwrap()
}

pub fn scaled(v: &ColumnVector, s: f64) -> ColumnVector {
    ColumnVector::new(v.as_slice().iter().map(|z| z * s).collect()).unwrap()
}

/// `|<u, v>|` with the library's convention (second argument conjugated).
pub fn overlap(u: &ColumnVector, v: &ColumnVector) -> f64 {
    u.as_slice()
        .iter()
        .zip(v.as_slice())
        .map(|(x, y)| x * y.conj())
        .sum::<C64>()
        .norm()
}

/// Worked 3x3 example of rank 2.
pub fn worked_a() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![c(0.0, 0.0), c(0.0, -3.0), c(0.0, 0.0)],
        vec![c(0.0, 2.0), c(1.0, 0.0), c(-1.0, 0.0)],
        vec![c(0.0, 4.0), c(2.0, -3.0), c(-2.0, 0.0)],
    ])
    .unwrap()
}

pub fn worked_b() -> ColumnVector {
    ColumnVector::new(vec![c(1.0, 0.0), c(0.0, 2.0), c(1.0, 4.0)]).unwrap()
}
