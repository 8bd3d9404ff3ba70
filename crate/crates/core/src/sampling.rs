//! Deterministic low-discrepancy sequences used for restarts and validators.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Additive-recurrence (Kronecker) sequence in `[0,1)^dim` with irrational
/// generators from the generalized golden ratio and a seed-dependent shift.
#[derive(Debug, Clone)]
pub struct LowDiscrepancy {
    alphas: Vec<f64>,
    shift: Vec<f64>,
}

impl LowDiscrepancy {
    pub fn new(dim: usize, seed: u64) -> Self {
        let phi = generalized_golden(dim);
        let alphas = (1..=dim).map(|j| (1.0 / phi.powi(j as i32)).fract()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = (0..dim).map(|_| rng.gen::<f64>()).collect();
        Self { alphas, shift }
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    /// The `n`-th point of the sequence.
    pub fn point(&self, n: u64) -> Vec<f64> {
        let nf = n as f64;
        self.alphas
            .iter()
            .zip(&self.shift)
            .map(|(a, s)| (s + nf * a).fract())
            .collect()
    }

    /// Point `n` mapped to `[-1, 1)^dim`.
    pub fn symmetric_point(&self, n: u64) -> Vec<f64> {
        self.point(n).into_iter().map(|v| 2.0 * v - 1.0).collect()
    }
}

// Unique positive root of x^(d+1) = x + 1.
fn generalized_golden(dim: usize) -> f64 {
    let d = dim as f64;
    let mut x = 2.0f64;
    for _ in 0..64 {
        x = (1.0 + x).powf(1.0 / (d + 1.0));
    }
    x
}
