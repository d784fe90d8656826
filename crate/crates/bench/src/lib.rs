//! Seeded problem generators shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rowortho_core::{ColumnVector, ComplexMatrix, C64};

/// A consistent system `A x = b` with `A` of known rank.
pub struct Problem {
    pub a: ComplexMatrix,
    pub b: ColumnVector,
    pub rank: usize,
}

fn entry<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// `m x n` system of rank `rank`, built as a product of random `m x rank`
/// and `rank x n` factors, with `b = A x` for a random `x` so it is
/// consistent.
pub fn problem(seed: u64, m: usize, n: usize, rank: usize) -> Problem {
    assert!(
        rank >= 1 && rank <= m.min(n),
        "rank must lie in 1..=min(m, n)"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random = |r: usize, c: usize| {
        ComplexMatrix::new(r, c, (0..r * c).map(|_| entry(&mut rng)).collect())
            .expect("finite random entries")
    };
    let left = random(m, rank);
    let right = random(rank, n);
    let x = random(n, 1);
    let a = left.matmul(&right).expect("inner dimensions agree");
    let b = a.matmul(&x).expect("inner dimensions agree").column(0);
    Problem { a, b, rank }
}

/// Full-row-rank `m x n` system (`m <= n`).
pub fn full_row_rank(seed: u64, m: usize, n: usize) -> Problem {
    problem(seed, m, n, m)
}
