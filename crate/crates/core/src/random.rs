//! Seeded generators for test instances.
//!
//! All randomness in the crate flows through [`SeededRng`] so that a single
//! integer seed reproduces every sampled frame, symbol and window.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{svd, CMatrix, CVector, C64};

#[derive(Clone, Debug)]
pub struct SeededRng(ChaCha8Rng);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// An independent stream derived from `seed` and a stream label.
    pub fn derived(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        SeededRng(rng)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.random()
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.0.random_range(lo..hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.0.random_range(0..n)
    }

    /// Complex normal sample with independent standard normal parts.
    pub fn gaussian(&mut self) -> C64 {
        C64::new(self.0.sample(StandardNormal), self.0.sample(StandardNormal))
    }

    pub fn gaussian_vector(&mut self, n: usize) -> CVector {
        CVector::from_raw((0..n).map(|_| self.gaussian()).collect())
    }

    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| self.gaussian())
    }

    /// Unit-modulus scalar with uniform phase.
    pub fn phase(&mut self) -> C64 {
        C64::from_polar(1.0, self.uniform(0.0, std::f64::consts::TAU))
    }

    /// Values with moduli uniform in `[lo, hi)` and uniform phases.
    pub fn semi_normalized_values(&mut self, n: usize, lo: f64, hi: f64) -> Vec<C64> {
        (0..n).map(|_| self.phase() * self.uniform(lo, hi)).collect()
    }

    /// Haar-like random unitary from modified Gram–Schmidt on a Gaussian matrix.
    pub fn unitary(&mut self, n: usize) -> CMatrix {
        let g = self.gaussian_matrix(n, n);
        let mut cols: Vec<CVector> = Vec::with_capacity(n);
        for j in 0..n {
            let mut v = g.column(j);
            for q in &cols {
                let proj = v.inner(q);
                v.axpy(-proj, q);
            }
            let norm = v.norm();
            cols.push(v.scale(C64::new(1.0 / norm, 0.0)));
        }
        CMatrix::from_columns(&cols).expect("n >= 1")
    }

    /// Gaussian `rows × cols` matrix conditioned on `σ_max / σ_min ≤ max_condition`,
    /// by rejection.
    pub fn conditioned_matrix(&mut self, rows: usize, cols: usize, max_condition: f64) -> CMatrix {
        loop {
            let m = self.gaussian_matrix(rows, cols);
            let s = svd(&m);
            if s.sigma_min() * max_condition >= s.sigma_max() {
                return m;
            }
        }
    }
}
