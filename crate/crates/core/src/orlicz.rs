//! Modulars and Luxemburg norms over weighted discrete measure spaces.
//!
//! On a finite space every sample vector has a finite modular, so the
//! distinction between the Orlicz class, the Orlicz space and its closure of
//! bounded functions disappears here. Behavior without the Δ₂ condition only
//! shows up through the Young-function calculus, never as a norm failure.

use crate::error::{check_len, Error, Result};
use crate::quadrature::KahanSum;
use crate::young::YoungFunction;

/// Quadrature points with strictly positive finite weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasureSpace {
    weights: Vec<f64>,
    total_mass: f64,
}

impl DiscreteMeasureSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Config("measure space needs at least one point".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::Config(format!("measure weights must be positive and finite, got {w}")));
        }
        let total_mass = weights.iter().copied().sum::<KahanSum>().value();
        Ok(Self { weights, total_mass })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// `Σ wᵢ M(uᵢ)`.
    pub fn modular(&self, u: &[f64], young: &YoungFunction) -> Result<f64> {
        check_len(self.len(), u.len())?;
        self.scaled_modular(u, 1.0, young)
    }

    fn scaled_modular(&self, u: &[f64], inv_k: f64, young: &YoungFunction) -> Result<f64> {
        let mut acc = KahanSum::default();
        for (w, v) in self.weights.iter().zip(u) {
            acc.add(w * young.value(v * inv_k)?);
        }
        Ok(acc.value())
    }

    /// `inf{k > 0 : Σ wᵢ M(uᵢ/k) ≤ 1}`, by bisection on `k`.
    ///
    /// The returned `k` always satisfies the unit-ball inequality.
    pub fn luxemburg_norm(&self, u: &[f64], young: &YoungFunction) -> Result<f64> {
        check_len(self.len(), u.len())?;
        if let Some(v) = u.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite sample {v}")));
        }
        let umax = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if umax == 0.0 {
            return Ok(0.0);
        }
        let inside = |k: f64| -> Result<bool> { Ok(self.scaled_modular(u, 1.0 / k, young)? <= 1.0) };

        // Σ w M(umax/k₀) = 1 at k₀, so k₀ bounds the norm from above.
        let k0 = umax / young.inverse(1.0 / self.total_mass)?;
        let mut hi = k0;
        let mut guard = 0;
        while !inside(hi)? {
            hi *= 2.0;
            guard += 1;
            if guard > 2000 {
                return Err(Error::RootFinding("Luxemburg bracket expansion failed".into()));
            }
        }
        let mut lo = 0.5 * k0.min(hi);
        while inside(lo)? {
            hi = lo;
            lo *= 0.5;
            guard += 1;
            if guard > 4000 || lo == 0.0 {
                return Err(Error::RootFinding("Luxemburg bracket contraction failed".into()));
            }
        }
        for _ in 0..200 {
            if hi - lo <= 4.0 * f64::EPSILON * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if inside(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Both sides of `Σ wᵢ|uᵢvᵢ| ≤ 2‖u‖_M ‖v‖_M̄`.
    pub fn holder_pairing_bound(&self, u: &[f64], v: &[f64], young: &YoungFunction) -> Result<HolderBound> {
        check_len(self.len(), u.len())?;
        check_len(self.len(), v.len())?;
        let lhs = self
            .weights
            .iter()
            .zip(u.iter().zip(v))
            .map(|(w, (a, b))| w * (a * b).abs())
            .sum::<KahanSum>()
            .value();
        let rhs = 2.0 * self.luxemburg_norm(u, young)? * self.luxemburg_norm(v, &young.conjugate())?;
        Ok(HolderBound { lhs, rhs })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderBound {
    pub lhs: f64,
    pub rhs: f64,
}

impl HolderBound {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol
    }
}
