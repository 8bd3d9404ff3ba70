//! The functionals `𝒜ˢ(u) = ∬ A(x, y, Dˢu) dν₁` and `𝒢(u) = ∫_Ω G(u) dx` on
//! the Galerkin space, their derivatives, and the normalization radius.
//!
//! Pair sums run over the stored half of the symmetric pair quadrature. For
//! a stored node `(x, y)` the mirror `(y, x)` has quotient `−Dˢu(x, y)`, so by
//! evenness of `A` the pair contributes `A(x, y, D) + A(y, x, D)`. Sums are
//! chunked in a fixed order and compensated, so results do not depend on the
//! thread count.

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{check_len, Error, Result};
use crate::fracgrid::{GalerkinBasis, Pair, PairQuadrature, QuadConfig, Stencil};
use crate::kernels::{Kernel, Source};
use crate::orlicz::DiscreteMeasureSpace;
use crate::quadrature::{integrate_adaptive, GaussRule, KahanSum};

const CHUNK: usize = 4096;
const OMEGA_GAUSS_ORDER: usize = 5;

/// Composite Gauss rule on the basis partition.
#[derive(Debug, Clone)]
pub struct OmegaQuadrature {
    points: Vec<f64>,
    stencils: Vec<Stencil>,
    space: DiscreteMeasureSpace,
}

impl OmegaQuadrature {
    pub fn new(basis: &GalerkinBasis) -> Result<Self> {
        let rule = GaussRule::new(OMEGA_GAUSS_ORDER);
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for w in basis.nodes().windows(2) {
            for (x, g) in rule.mapped(w[0], w[1]) {
                points.push(x);
                weights.push(g);
            }
        }
        let stencils = points.iter().map(|&x| basis.stencil(x)).collect();
        Ok(Self { points, stencils, space: DiscreteMeasureSpace::new(weights)? })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        self.space.weights()
    }

    pub fn space(&self) -> &DiscreteMeasureSpace {
        &self.space
    }

    /// `u` at every quadrature point.
    pub fn values(&self, nodal: &[f64]) -> Vec<f64> {
        self.stencils.iter().map(|s| s.eval(nodal)).collect()
    }
}

/// Everything needed to evaluate the functionals on one Galerkin space.
#[derive(Debug, Clone)]
pub struct EnergyContext {
    basis: GalerkinBasis,
    quad: Arc<PairQuadrature>,
    omega: OmegaQuadrature,
    kernel: Kernel,
    source: Source,
}

/// `r(u)` and the point `r(u) u` of the level set `𝒜ˢ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub r: f64,
    pub unit: Vec<f64>,
}

/// Target accuracy of `|𝒜ˢ(r u) − 1|` in [`EnergyContext::normalize`].
pub const NORMALIZE_TOL: f64 = 1e-13;

impl EnergyContext {
    pub fn new(basis: GalerkinBasis, quad: Arc<PairQuadrature>, kernel: Kernel, source: Source) -> Result<Self> {
        if quad.basis_len() != basis.len() {
            return Err(Error::Config(format!(
                "pair quadrature built for k = {}, basis has k = {}",
                quad.basis_len(),
                basis.len()
            )));
        }
        let omega = OmegaQuadrature::new(&basis)?;
        Ok(Self { basis, quad, omega, kernel, source })
    }

    pub fn basis(&self) -> &GalerkinBasis {
        &self.basis
    }

    pub fn quadrature(&self) -> &PairQuadrature {
        &self.quad
    }

    pub fn omega(&self) -> &OmegaQuadrature {
        &self.omega
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn s(&self) -> f64 {
        self.quad.s()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn nodal(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), coeffs.len())?;
        Ok(self.basis.extended(coeffs))
    }

    fn reduce<T: Send>(&self, map: impl Fn(&[Pair]) -> T + Sync) -> Vec<T> {
        self.quad.half_pairs().par_chunks(CHUNK).map(&map).collect()
    }

    #[inline]
    fn quotient(p: &Pair, nodal: &[f64]) -> f64 {
        p.difference(nodal) * p.inv_dist_s
    }

    #[inline]
    fn pair_primitive(&self, p: &Pair, d: f64) -> f64 {
        if self.kernel.is_symmetric() {
            2.0 * self.kernel.primitive(p.x, p.y, d)
        } else {
            self.kernel.primitive(p.x, p.y, d) + self.kernel.primitive(p.y, p.x, d)
        }
    }

    #[inline]
    fn pair_density(&self, p: &Pair, d: f64) -> f64 {
        if self.kernel.is_symmetric() {
            2.0 * self.kernel.a(p.x, p.y, d)
        } else {
            self.kernel.a(p.x, p.y, d) + self.kernel.a(p.y, p.x, d)
        }
    }

    #[inline]
    fn pair_slope(&self, p: &Pair, d: f64) -> f64 {
        if self.kernel.is_symmetric() {
            2.0 * self.kernel.slope(p.x, p.y, d)
        } else {
            self.kernel.slope(p.x, p.y, d) + self.kernel.slope(p.y, p.x, d)
        }
    }

    /// `𝒜ˢ(u)`.
    pub fn energy_a(&self, coeffs: &[f64]) -> Result<f64> {
        let nodal = self.nodal(coeffs)?;
        let parts = self.reduce(|chunk| {
            let mut acc = KahanSum::default();
            for p in chunk {
                acc.add(p.weight * self.pair_primitive(p, Self::quotient(p, &nodal)));
            }
            acc.value()
        });
        finite(parts.into_iter().sum::<KahanSum>().value(), "𝒜ˢ")
    }

    /// `⟨(𝒜ˢ)′(u), φⱼ⟩ = ∬ a(x, y, Dˢu) Dˢφⱼ dν₁` for every `j`.
    pub fn grad_a(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        Ok(self.energy_and_grad_a(coeffs)?.1)
    }

    pub fn energy_and_grad_a(&self, coeffs: &[f64]) -> Result<(f64, Vec<f64>)> {
        let nodal = self.nodal(coeffs)?;
        let n = nodal.len();
        let parts = self.reduce(|chunk| {
            let mut e = KahanSum::default();
            let mut g = vec![0.0; n];
            for p in chunk {
                let d = Self::quotient(p, &nodal);
                e.add(p.weight * self.pair_primitive(p, d));
                let f = p.weight * self.pair_density(p, d) * p.inv_dist_s;
                scatter(&mut g, p, f);
            }
            (e.value(), g)
        });
        let mut e = KahanSum::default();
        let mut g = vec![KahanSum::default(); n];
        for (pe, pg) in parts {
            e.add(pe);
            for (acc, v) in g.iter_mut().zip(pg) {
                acc.add(v);
            }
        }
        let grad: Vec<f64> = g[1..n - 1].iter().map(KahanSum::value).collect();
        if grad.iter().any(|v| !v.is_finite()) {
            return Err(Error::Assembly("non-finite gradient of 𝒜ˢ".into()));
        }
        Ok((finite(e.value(), "𝒜ˢ")?, grad))
    }

    /// `∂²𝒜ˢ/∂cⱼ∂cₗ = ∬ ∂ξa(x, y, Dˢu) Dˢφⱼ Dˢφₗ dν₁`.
    pub fn hessian_a(&self, coeffs: &[f64]) -> Result<DMatrix<f64>> {
        let nodal = self.nodal(coeffs)?;
        self.pair_matrix(|p| self.pair_slope(p, Self::quotient(p, &nodal)))
    }

    /// `Kⱼₗ = ∬ w(x, y) Dˢφⱼ Dˢφₗ dν₁` for kernels linear in `ξ`; then `𝒜ˢ(u) = ½ uᵀKu`.
    pub fn bilinear_stiffness(&self) -> Result<DMatrix<f64>> {
        if !self.kernel.is_linear() {
            return Err(Error::Config(format!("kernel {} is not linear in ξ", self.kernel.spec())));
        }
        let k = &self.kernel;
        self.pair_matrix(|p| k.linear_weight(p.x, p.y).unwrap_or(f64::NAN) + k.linear_weight(p.y, p.x).unwrap_or(f64::NAN))
    }

    /// `∬ Dˢφⱼ Dˢφₗ dν₁`, whatever the kernel; used as a solver metric.
    pub fn fractional_stiffness(&self) -> Result<DMatrix<f64>> {
        self.pair_matrix(|_| 2.0)
    }

    // Σ over half pairs of coef(p) · weight · Dφⱼ Dφₗ, symmetrized.
    fn pair_matrix(&self, coef: impl Fn(&Pair) -> f64 + Sync) -> Result<DMatrix<f64>> {
        let n = self.dim() + 2;
        let parts = self.reduce(|chunk| {
            let mut m = vec![0.0; n * n];
            for p in chunk {
                let c = coef(p) * p.weight * p.inv_dist_s * p.inv_dist_s;
                for &(i, vi) in &p.diff {
                    for &(j, vj) in &p.diff {
                        m[i as usize * n + j as usize] += c * vi * vj;
                    }
                }
            }
            m
        });
        let mut acc = vec![KahanSum::default(); n * n];
        for part in parts {
            for (a, v) in acc.iter_mut().zip(part) {
                a.add(v);
            }
        }
        let k = self.dim();
        let mut out = DMatrix::from_fn(k, k, |i, j| acc[(i + 1) * n + (j + 1)].value());
        symmetrize(&mut out);
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::Assembly("non-finite pair matrix".into()));
        }
        Ok(out)
    }

    /// `𝒢(u)`.
    pub fn energy_g(&self, coeffs: &[f64]) -> Result<f64> {
        let u = self.omega.values(&self.nodal(coeffs)?);
        let v = self
            .omega
            .weights()
            .iter()
            .zip(&u)
            .map(|(w, v)| w * self.source.primitive(*v))
            .sum::<KahanSum>()
            .value();
        finite(v, "𝒢")
    }

    /// `⟨𝒢′(u), φⱼ⟩ = ∫_Ω g(u) φⱼ dx`.
    pub fn grad_g(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        let u = self.omega.values(&self.nodal(coeffs)?);
        Ok(self.omega_vector(|i| self.source.g(u[i])))
    }

    /// `∫_Ω g′(u) φⱼ φₗ dx`.
    pub fn hessian_g(&self, coeffs: &[f64]) -> Result<DMatrix<f64>> {
        let u = self.omega.values(&self.nodal(coeffs)?);
        Ok(self.omega_matrix(|i| self.source.slope(u[i])))
    }

    /// `Bⱼₗ = ∫_Ω φⱼ φₗ dx`.
    pub fn mass_matrix(&self) -> DMatrix<f64> {
        self.omega_matrix(|_| 1.0)
    }

    /// `∫_Ω u v dx`.
    pub fn mass_pairing(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        let uu = self.omega.values(&self.nodal(u)?);
        let vv = self.omega.values(&self.nodal(v)?);
        Ok(self.omega.weights().iter().zip(uu.iter().zip(&vv)).map(|(w, (a, b))| w * a * b).sum::<KahanSum>().value())
    }

    fn omega_vector(&self, f: impl Fn(usize) -> f64) -> Vec<f64> {
        let n = self.dim() + 2;
        let mut acc = vec![KahanSum::default(); n];
        for (i, (st, w)) in self.omega.stencils.iter().zip(self.omega.weights()).enumerate() {
            let c = w * f(i);
            let j = st.node as usize;
            acc[j].add(c * st.wl);
            acc[j + 1].add(c * st.wr);
        }
        acc[1..n - 1].iter().map(KahanSum::value).collect()
    }

    fn omega_matrix(&self, f: impl Fn(usize) -> f64) -> DMatrix<f64> {
        let n = self.dim() + 2;
        let mut m = DMatrix::zeros(n, n);
        for (i, (st, w)) in self.omega.stencils.iter().zip(self.omega.weights()).enumerate() {
            let c = w * f(i);
            let j = st.node as usize;
            let e = [(j, st.wl), (j + 1, st.wr)];
            for &(a, va) in &e {
                for &(b, vb) in &e {
                    m[(a, b)] += c * va * vb;
                }
            }
        }
        let mut out = m.view((1, 1), (n - 2, n - 2)).into_owned();
        symmetrize(&mut out);
        out
    }

    /// `r > 0` with `𝒜ˢ(r u) = 1`.
    ///
    /// Safeguarded Newton on `t = ln r` for `ln 𝒜ˢ(eᵗ u)`, whose slope is
    /// `⟨(𝒜ˢ)′(eᵗu), eᵗu⟩ / 𝒜ˢ(eᵗu)`. This is exact in one step for
    /// homogeneous `A`; a bracket and bisection guard the general case.
    pub fn normalize(&self, coeffs: &[f64]) -> Result<Normalized> {
        check_len(self.dim(), coeffs.len())?;
        if coeffs.iter().all(|c| *c == 0.0) {
            return Err(Error::Degenerate("cannot normalize the zero vector".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("non-finite coefficients".into()));
        }
        let scaled = |t: f64| -> Vec<f64> { coeffs.iter().map(|c| c * t.exp()).collect() };
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        let mut t = 0.0;
        let mut best: Option<(f64, f64)> = None;
        for _ in 0..200 {
            let v = scaled(t);
            let (e, g) = self.energy_and_grad_a(&v)?;
            let err = (e - 1.0).abs();
            if best.map_or(true, |(_, b)| err < b) {
                best = Some((t, err));
            }
            if err <= NORMALIZE_TOL {
                return Ok(Normalized { r: t.exp(), unit: v });
            }
            if e < 1.0 {
                lo = lo.max(t);
            } else {
                hi = hi.min(t);
            }
            let slope = dot(&g, &v) / e;
            let mut next = if e > 0.0 && slope.is_finite() && slope > 0.0 {
                t - e.ln() / slope
            } else {
                f64::NAN
            };
            let inside = next > lo && next < hi && next.is_finite();
            if !inside {
                next = match (lo.is_finite(), hi.is_finite()) {
                    (true, true) => 0.5 * (lo + hi),
                    (true, false) => lo + 2.0f64.max((lo - t).abs()),
                    (false, true) => hi - 2.0f64.max((hi - t).abs()),
                    (false, false) => t,
                };
            }
            if hi - lo <= 4.0 * f64::EPSILON * t.abs().max(1.0) || next == t {
                break;
            }
            t = next;
        }
        let (t, err) = best.expect("at least one evaluation");
        if err <= 1e-10 {
            return Ok(Normalized { r: t.exp(), unit: scaled(t) });
        }
        Err(Error::RootFinding(format!("normalization stalled with |𝒜ˢ − 1| = {err:e}")))
    }

    /// `∬ (a(x, y, Dˢu) − a(x, y, Dˢv)) (Dˢu − Dˢv) dν₁`; nonnegative for monotone kernels.
    pub fn monotone_pairing(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        let nu = self.nodal(u)?;
        let nv = self.nodal(v)?;
        let parts = self.reduce(|chunk| {
            let mut acc = KahanSum::default();
            for p in chunk {
                let (du, dv) = (Self::quotient(p, &nu), Self::quotient(p, &nv));
                acc.add(p.weight * (self.pair_density(p, du) - self.pair_density(p, dv)) * (du - dv));
            }
            acc.value()
        });
        Ok(parts.into_iter().sum::<KahanSum>().value())
    }

    /// `Dˢu` at the stored half pairs, in storage order.
    pub fn quotients(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        let nodal = self.nodal(coeffs)?;
        Ok(self.quad.half_pairs().iter().map(|p| Self::quotient(p, &nodal)).collect())
    }

    /// The folded pair measure: stored half pairs with doubled weights.
    pub fn pair_space(&self) -> Result<DiscreteMeasureSpace> {
        DiscreteMeasureSpace::new(self.quad.half_pairs().iter().map(|p| 2.0 * p.weight).collect())
    }

    /// `θ ∬ M(c Dˢu / 2) dν₁` with the kernel's coercivity constants.
    pub fn coercivity_modular(&self, coeffs: &[f64]) -> Result<f64> {
        let co = self.kernel.coercivity();
        let half: Vec<f64> = self.quotients(coeffs)?.into_iter().map(|d| 0.5 * co.c * d).collect();
        Ok(co.theta * self.pair_space()?.modular(&half, self.kernel.young())?)
    }

    /// `‖Dˢu‖_{M, ν₁}`, the Luxemburg norm of the Hölder quotient.
    pub fn quotient_norm(&self, coeffs: &[f64]) -> Result<f64> {
        self.pair_space()?.luxemburg_norm(&self.quotients(coeffs)?, self.kernel.young())
    }

    /// Estimate of the part of `𝒜ˢ(u)` outside the truncation box.
    ///
    /// For `x ∈ Ω` and `y` beyond the box at distance `r ≥ δ(x)`, substitute
    /// `r = δ eᵗ` so that `∫ A(Dˢu) dr / r = ∫₀^∞ A(u(x) δ^(−s) e^(−st)) dt`.
    pub fn tail_estimate(&self, coeffs: &[f64]) -> Result<f64> {
        let u = self.omega.values(&self.nodal(coeffs)?);
        let (lo, hi) = self.quad.bounds();
        let s = self.s();
        let mut acc = KahanSum::default();
        for ((&x, &w), &ux) in self.omega.points.iter().zip(self.omega.weights()).zip(&u) {
            if ux == 0.0 {
                continue;
            }
            for (delta, side) in [(hi - x, 1.0), (x - lo, -1.0)] {
                let base = ux * delta.powf(-s);
                let t_max = 50.0 / s;
                let f = |t: f64| {
                    let y = x + side * delta * t.exp();
                    let xi = base * (-s * t).exp();
                    self.kernel.primitive(x, y, xi) + self.kernel.primitive(y, x, xi)
                };
                acc.add(w * integrate_adaptive(0.0, t_max, 1e-10, 1e-300, f));
            }
        }
        finite(acc.value(), "tail estimate")
    }
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Assembly(format!("{what} evaluated to {v}")))
    }
}

#[inline]
fn scatter(g: &mut [f64], p: &Pair, f: f64) {
    for &(i, v) in &p.diff {
        g[i as usize] += f * v;
    }
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<KahanSum>().value()
}

/// A problem on `Ω = (α, β)` independent of the Galerkin dimension.
#[derive(Debug, Clone)]
pub struct Problem {
    pub alpha: f64,
    pub beta: f64,
    pub s: f64,
    pub kernel: Kernel,
    pub source: Source,
    pub quad: QuadConfig,
}

impl Problem {
    pub fn new(alpha: f64, beta: f64, s: f64, kernel: Kernel, source: Source) -> Self {
        Self { alpha, beta, s, kernel, source, quad: QuadConfig::default() }
    }

    pub fn with_quad(mut self, quad: QuadConfig) -> Self {
        self.quad = quad;
        self
    }

    /// Assemble basis, pair quadrature and context for dimension `k`.
    pub fn context(&self, k: usize) -> Result<EnergyContext> {
        let basis = GalerkinBasis::new(self.alpha, self.beta, k)?;
        let quad = Arc::new(PairQuadrature::build(&basis, self.s, &self.quad)?);
        EnergyContext::new(basis, quad, self.kernel.clone(), self.source.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ctx(kernel: &str, source: &str, k: usize) -> EnergyContext {
        Problem::new(0.0, 1.0, 0.5, Kernel::parse(kernel).unwrap(), Source::parse(source).unwrap())
            .with_quad(QuadConfig { grading_depth: 5, ..QuadConfig::default() })
            .context(k)
            .unwrap()
    }

    fn sample(k: usize) -> Vec<f64> {
        (0..k).map(|j| ((j as f64 + 1.0) * 0.7).sin() + 0.3).collect()
    }

    #[test]
    fn zero_and_evenness() {
        let c = ctx("plap:3", "power:3", 6);
        let z = vec![0.0; 6];
        assert_eq!(c.energy_a(&z).unwrap(), 0.0);
        assert_eq!(c.energy_g(&z).unwrap(), 0.0);
        assert!(c.grad_a(&z).unwrap().iter().all(|v| *v == 0.0));
        assert!(c.grad_g(&z).unwrap().iter().all(|v| *v == 0.0));
        let u = sample(6);
        let neg: Vec<f64> = u.iter().map(|v| -v).collect();
        assert_relative_eq!(c.energy_a(&u).unwrap(), c.energy_a(&neg).unwrap(), max_relative = 1e-14);
        assert!(c.energy_g(&u).unwrap() > 0.0);
        assert!(matches!(c.energy_a(&[1.0]), Err(Error::Shape { .. })));
    }

    #[test]
    fn omega_weights_sum_to_length() {
        let c = ctx("plap:2", "power:2", 7);
        assert!((c.omega().space().total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalize_examples() {
        let c = ctx("mlap:plog:2", "power:2", 5);
        let u = sample(5);
        let n = c.normalize(&u).unwrap();
        assert!((c.energy_a(&n.unit).unwrap() - 1.0).abs() <= 1e-10);
        let again = c.normalize(&n.unit).unwrap();
        assert!((again.r - 1.0).abs() <= 1e-10);
        let scaled: Vec<f64> = u.iter().map(|v| 37.0 * v).collect();
        let n2 = c.normalize(&scaled).unwrap();
        for (a, b) in n.unit.iter().zip(&n2.unit) {
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
        assert!(matches!(c.normalize(&[0.0; 5]), Err(Error::Degenerate(_))));

        let p = ctx("plap:3", "power:2", 5);
        let e = p.energy_a(&u).unwrap();
        assert_relative_eq!(p.normalize(&u).unwrap().r, e.powf(-1.0 / 3.0), max_relative = 1e-12);
    }

    #[test]
    fn linear_case_matches_matrices() {
        let c = ctx("plap:2", "power:2", 6);
        let k = c.bilinear_stiffness().unwrap();
        let b = c.mass_matrix();
        let u = sample(6);
        let uv = nalgebra::DVector::from_column_slice(&u);
        assert_relative_eq!(c.energy_a(&u).unwrap(), 0.5 * uv.dot(&(&k * &uv)), max_relative = 1e-12);
        assert_relative_eq!(c.energy_g(&u).unwrap(), 0.5 * uv.dot(&(&b * &uv)), max_relative = 1e-12);
        let ku = &k * &uv;
        for (g, v) in c.grad_a(&u).unwrap().iter().zip(ku.iter()) {
            assert_relative_eq!(*g, *v, max_relative = 1e-11, epsilon = 1e-14);
        }
        let h = c.hessian_a(&u).unwrap();
        assert!((&h - &k).abs().max() <= 1e-12 * k.abs().max());
        assert!(ctx("plap:3", "power:2", 3).bilinear_stiffness().is_err());
    }

    #[test]
    fn monotone_pairing_nonnegative() {
        let c = ctx("plap:3", "power:2", 6);
        let u = sample(6);
        let v: Vec<f64> = u.iter().rev().map(|x| 0.5 - x).collect();
        assert!(c.monotone_pairing(&u, &v).unwrap() >= 0.0);
        assert_eq!(c.monotone_pairing(&u, &u).unwrap(), 0.0);
    }

    #[test]
    fn coercivity_chain_on_level_set() {
        for kernel in ["plap:3", "mlap:plog:2"] {
            let c = ctx(kernel, "power:2", 6);
            let n = c.normalize(&sample(6)).unwrap();
            assert!(c.coercivity_modular(&n.unit).unwrap() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn tail_estimate_positive_and_decays() {
        let u = sample(6);
        let t = |factor: f64| {
            Problem::new(0.0, 1.0, 0.5, Kernel::parse("plap:2").unwrap(), Source::parse("power:2").unwrap())
                .with_quad(QuadConfig { grading_depth: 4, tail_radius_factor: factor, ..QuadConfig::default() })
                .context(6)
                .unwrap()
                .tail_estimate(&u)
                .unwrap()
        };
        let (t4, t8) = (t(4.0), t(8.0));
        assert!(t4 > 0.0 && t8 < t4);
    }
}
