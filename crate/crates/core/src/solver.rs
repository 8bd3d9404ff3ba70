//! Eigenpairs of the Galerkin problem: maximize `𝒢` on the level set
//! `𝒩ₖ = {u ∈ V_k : 𝒜ˢ(u) = 1}`.
//!
//! Each restart runs a projected-gradient ascent. The gradient is taken in
//! the metric of the fractional stiffness matrix, projected onto the tangent
//! space `{v : ⟨(𝒜ˢ)′(u), v⟩ = 0}`, and steps are retracted by `u ↦ r(u) u`
//! with Armijo backtracking. The ascent hands over to a Newton iteration on
//!
//! ```text
//! (𝒜ˢ)′(u) − λ 𝒢′(u) = 0,   𝒜ˢ(u) = 1
//! ```
//!
//! which drives the stationarity residual to the requested tolerance. Higher
//! pairs maximize `𝒢` minus a penalty on mass overlap with the pairs already
//! found. The penalty is then released in stages, with Newton at each stage,
//! and the final stage solves the unpenalized system. The genus minimax
//! levels are not computed; pairs beyond the first are reported as candidates.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{dot, EnergyContext, Problem};
use crate::error::{Error, Result};
use crate::sampling::LowDiscrepancy;

/// Solver parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Ascent iterations per restart.
    pub max_iter: usize,
    /// Initial step, relative to `‖u‖ / ‖d‖` for the first direction `d`.
    pub step0: f64,
    /// Backtracking ratio in `(0, 1)`.
    pub backtrack: f64,
    /// Armijo sufficient-increase factor.
    pub armijo: f64,
    /// Target relative stationarity residual.
    pub grad_tol: f64,
    /// Relative projected gradient at which the ascent hands over to Newton.
    pub switch_tol: f64,
    /// Newton iterations after the ascent.
    pub polish_iter: usize,
    pub n_restarts: usize,
    pub rng_seed: u64,
    /// Weight `μ` of the deflation penalty.
    pub deflation_penalty: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iter: 500,
            step0: 1.0,
            backtrack: 0.5,
            armijo: 1e-4,
            grad_tol: 1e-9,
            switch_tol: 1e-3,
            polish_iter: 40,
            n_restarts: 4,
            rng_seed: 0,
            deflation_penalty: 10.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("step0", self.step0),
            ("armijo", self.armijo),
            ("grad_tol", self.grad_tol),
            ("switch_tol", self.switch_tol),
            ("deflation_penalty", self.deflation_penalty),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("solver.{name} must be positive, got {v}")));
            }
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::Config(format!("solver.backtrack must lie in (0, 1), got {}", self.backtrack)));
        }
        if self.armijo >= 1.0 {
            return Err(Error::Config(format!("solver.armijo must be < 1, got {}", self.armijo)));
        }
        if self.max_iter == 0 || self.n_restarts == 0 {
            return Err(Error::Config("solver.max_iter and solver.n_restarts must be >= 1".into()));
        }
        Ok(())
    }
}

/// How much the theory backs a computed pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    /// The maximizer of `𝒢` on the level set.
    First,
    /// Found by deflation; stationarity is verified, the minimax level is not.
    Candidate,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::First => "first",
            Label::Candidate => "candidate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenpairResult {
    /// One-based index `i`.
    pub index: usize,
    pub basis_k: usize,
    pub lambda: f64,
    pub coeffs: Vec<f64>,
    /// `𝒢(u)`.
    pub g_value: f64,
    /// `𝒜ˢ(u)`.
    pub a_value: f64,
    /// `‖(𝒜ˢ)′(u) − λ 𝒢′(u)‖ / ‖(𝒜ˢ)′(u)‖`.
    pub residual: f64,
    /// `⟨(𝒜ˢ)′(u), u⟩`.
    pub a_pairing: f64,
    /// `∫ g(u) u dx`.
    pub g_pairing: f64,
    pub iterations: usize,
    pub newton_steps: usize,
    pub converged: bool,
    pub restart: usize,
    pub label: Label,
    /// `|λᵢ − λᵢ₋₁| < 10⁻⁶ λᵢ₋₁`.
    pub cluster: bool,
    /// `λ` decreased or `𝒢` increased relative to the previous pair.
    pub order_violation: bool,
    /// Smallest monotone pairing between consecutive ascent iterates.
    pub monotone_certificate: f64,
    /// `θ ∬ M(c Dˢu / 2) dν₁`.
    pub coercivity_modular: f64,
}

/// Outcome of [`solve_sequence`]: the converged prefix and, if the sequence
/// stopped early, why.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sequence {
    pub pairs: Vec<EigenpairResult>,
    pub failure: Option<IndexFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexFailure {
    pub index: usize,
    pub reason: String,
    /// Best iterate among the restarts, if any restart produced one.
    pub best_residual: Option<f64>,
}

struct Deflator {
    bu: Vec<f64>,
    ubu: f64,
    weight: f64,
}

struct Workspace<'a> {
    ctx: &'a EnergyContext,
    cfg: &'a SolverConfig,
    stiffness: DMatrix<f64>,
    metric: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    mass: DMatrix<f64>,
    deflators: Vec<Deflator>,
}

struct State {
    u: Vec<f64>,
    f: f64,
    gf: Vec<f64>,
    ga: Vec<f64>,
}

struct Attempt {
    restart: usize,
    u: Vec<f64>,
    residual: f64,
    g_value: f64,
    iterations: usize,
    newton_steps: usize,
    converged: bool,
    monotone: f64,
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn axpy(a: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(xi, yi)| a * xi + yi).collect()
}

/// Penalty weights used while releasing the deflation before the final solve.
const RELEASE: [f64; 6] = [1.0, 0.3, 0.1, 0.03, 0.01, 0.0];

impl<'a> Workspace<'a> {
    fn new(ctx: &'a EnergyContext, cfg: &'a SolverConfig) -> Result<Self> {
        let stiffness = ctx.fractional_stiffness()?;
        let metric = stiffness
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Assembly("fractional stiffness is not positive definite".into()))?;
        Ok(Self { ctx, cfg, stiffness, metric, mass: ctx.mass_matrix(), deflators: Vec::new() })
    }

    fn mass_apply(&self, u: &[f64]) -> Vec<f64> {
        (&self.mass * DVector::from_column_slice(u)).as_slice().to_vec()
    }

    fn precondition(&self, g: &[f64]) -> Vec<f64> {
        self.metric.solve(&DVector::from_column_slice(g)).as_slice().to_vec()
    }

    /// Adds `uⱼ` to the penalty and stiffens the metric along `Buⱼ` by the
    /// factor `1 + μ`, so the penalty does not throttle the step length.
    fn deflate_with(&mut self, u: &[f64], g_value: f64) -> Result<()> {
        let bu = self.mass_apply(u);
        let ubu = dot(u, &bu);
        let b = DVector::from_column_slice(&bu);
        let uv = DVector::from_column_slice(u);
        let uku = uv.dot(&(&self.stiffness * &uv));
        let gamma = self.cfg.deflation_penalty * uku / (ubu * ubu);
        self.stiffness += &b * b.transpose() * gamma;
        self.metric = self
            .stiffness
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Assembly("deflated metric is not positive definite".into()))?;
        self.deflators.push(Deflator { bu, ubu, weight: self.cfg.deflation_penalty * g_value });
        Ok(())
    }

    /// `𝒢(u) − τ Σ μ 𝒢(uⱼ) cos²_B(u, uⱼ)` and its gradient.
    fn objective(&self, u: &[f64], tau: f64) -> Result<(f64, Vec<f64>)> {
        let mut f = self.ctx.energy_g(u)?;
        let mut g = self.ctx.grad_g(u)?;
        if self.deflators.is_empty() || tau == 0.0 {
            return Ok((f, g));
        }
        let bu = self.mass_apply(u);
        let q = dot(u, &bu);
        for d in &self.deflators {
            let s = dot(u, &d.bu);
            let w = tau * d.weight / d.ubu;
            f -= w * s * s / q;
            for ((gi, bj), vi) in g.iter_mut().zip(&d.bu).zip(&bu) {
                *gi -= w * (2.0 * s * bj / q - 2.0 * s * s * vi / (q * q));
            }
        }
        Ok((f, g))
    }

    /// Hessian of the objective.
    fn objective_hessian(&self, u: &[f64], tau: f64) -> Result<DMatrix<f64>> {
        let mut h = self.ctx.hessian_g(u)?;
        if self.deflators.is_empty() || tau == 0.0 {
            return Ok(h);
        }
        let v = &self.mass * DVector::from_column_slice(u);
        let q = v.dot(&DVector::from_column_slice(u));
        for d in &self.deflators {
            let b = DVector::from_column_slice(&d.bu);
            let s = b.dot(&DVector::from_column_slice(u));
            let w = tau * d.weight / d.ubu;
            let cross = &b * v.transpose() + &v * b.transpose();
            let pen = &b * b.transpose() * (2.0 / q) - cross * (4.0 * s / (q * q)) - &self.mass * (2.0 * s * s / (q * q))
                + &v * v.transpose() * (8.0 * s * s / (q * q * q));
            h -= pen * w;
        }
        Ok(h)
    }

    /// `‖(𝒜ˢ)′ − λF′‖ / ‖(𝒜ˢ)′‖` for the objective `F` at weight `τ`.
    fn stationarity(&self, u: &[f64], tau: f64) -> Result<f64> {
        let ga = self.ctx.grad_a(u)?;
        let (_, gf) = self.objective(u, tau)?;
        let lambda = dot(&ga, u) / dot(&gf, u);
        let r = norm(&axpy(-lambda, &gf, &ga)) / norm(&ga);
        Ok(if r.is_finite() { r } else { f64::INFINITY })
    }

    fn state(&self, u: Vec<f64>) -> Result<State> {
        let (f, gf) = self.objective(&u, 1.0)?;
        let ga = self.ctx.grad_a(&u)?;
        Ok(State { u, f, gf, ga })
    }

    /// Projected-gradient ascent from a point of the level set.
    fn ascend(&self, u0: Vec<f64>) -> Result<(State, usize, f64)> {
        let cfg = self.cfg;
        let mut st = self.state(u0)?;
        let mut step = f64::NAN;
        let mut monotone = f64::INFINITY;
        let mut it = 0;
        while it < cfg.max_iter {
            let pf = self.precondition(&st.gf);
            let pa = self.precondition(&st.ga);
            let alpha = dot(&st.ga, &pf) / dot(&st.ga, &pa);
            let d = axpy(-alpha, &pa, &pf);
            let slope = dot(&st.gf, &d);
            if projected_residual(&st.gf, &st.ga) <= cfg.switch_tol || !(slope > 0.0) {
                break;
            }
            if step.is_nan() {
                step = cfg.step0 * norm(&st.u) / norm(&d);
            }
            let mut accepted = None;
            for _ in 0..60 {
                let trial = self.ctx.normalize(&axpy(step, &d, &st.u))?.unit;
                let (ft, _) = self.objective(&trial, 1.0)?;
                if ft >= st.f + cfg.armijo * step * slope {
                    accepted = Some(trial);
                    break;
                }
                step *= cfg.backtrack;
            }
            let Some(next) = accepted else { break };
            monotone = monotone.min(self.ctx.monotone_pairing(&st.u, &next)?);
            st = self.state(next)?;
            step /= cfg.backtrack;
            it += 1;
        }
        Ok((st, it, monotone))
    }

    /// Damped Newton on `(𝒜ˢ)′(u) = λF′(u)`, `𝒜ˢ(u) = 1` at penalty weight `τ`.
    fn newton(&self, mut u: Vec<f64>, tau: f64, tol: f64, max_steps: usize) -> Result<(Vec<f64>, f64, usize)> {
        let ctx = self.ctx;
        let k = ctx.dim();
        let mut res = self.stationarity(&u, tau)?;
        let mut steps = 0;
        while steps < max_steps && res > tol {
            let (a, ga) = ctx.energy_and_grad_a(&u)?;
            let (_, gf) = self.objective(&u, tau)?;
            let lambda = dot(&ga, &u) / dot(&gf, &u);
            let h = ctx.hessian_a(&u)? - self.objective_hessian(&u, tau)? * lambda;
            let mut jac = DMatrix::zeros(k + 1, k + 1);
            jac.view_mut((0, 0), (k, k)).copy_from(&h);
            let mut rhs = DVector::zeros(k + 1);
            for j in 0..k {
                jac[(j, k)] = -gf[j];
                jac[(k, j)] = ga[j];
                rhs[j] = -(ga[j] - lambda * gf[j]);
            }
            rhs[k] = -(a - 1.0);
            let Some(delta) = jac.lu().solve(&rhs) else { break };
            let du = &delta.as_slice()[..k];
            let mut t = 1.0;
            let mut improved = None;
            for _ in 0..12 {
                let cand = ctx.normalize(&axpy(t, du, &u))?.unit;
                let r = self.stationarity(&cand, tau)?;
                if r < res {
                    improved = Some((cand, r));
                    break;
                }
                t *= 0.5;
            }
            steps += 1;
            let Some((cand, r)) = improved else { break };
            u = cand;
            res = r;
        }
        Ok((u, res, steps))
    }

    fn attempt(&self, restart: usize, seq: &LowDiscrepancy) -> Result<Attempt> {
        let start: Vec<f64> = seq.symmetric_point(restart as u64 + 1);
        let u0 = self.ctx.normalize(&start)?.unit;
        let (st, iterations, monotone) = self.ascend(u0)?;
        let mut u = st.u;
        let mut newton_steps = 0;
        if !self.deflators.is_empty() {
            for tau in &RELEASE[..RELEASE.len() - 1] {
                let (v, _, n) = self.newton(u, *tau, RELEASE_TOL, self.cfg.polish_iter)?;
                u = v;
                newton_steps += n;
            }
        }
        let (u, residual, n) = self.newton(u, 0.0, self.cfg.grad_tol, self.cfg.polish_iter)?;
        newton_steps += n;
        let a = self.ctx.energy_a(&u)?;
        Ok(Attempt {
            restart,
            g_value: self.ctx.energy_g(&u)?,
            converged: residual <= self.cfg.grad_tol && (a - 1.0).abs() <= 1e-8,
            u,
            residual,
            iterations,
            newton_steps,
            monotone,
        })
    }

    fn is_duplicate(&self, u: &[f64]) -> bool {
        let bu = self.mass_apply(u);
        let ubu = dot(u, &bu);
        self.deflators.iter().any(|d| dot(u, &d.bu).abs() / (ubu * d.ubu).sqrt() > DUPLICATE_COS)
    }

    /// Best converged, non-duplicate restart for the next index.
    fn next_pair(&self, index: usize) -> std::result::Result<Attempt, IndexFailure> {
        let seq = LowDiscrepancy::new(self.ctx.dim(), self.cfg.rng_seed.wrapping_add(index as u64 * 0x9E37_79B9));
        let attempts: Vec<Result<Attempt>> = (0..self.cfg.n_restarts).into_par_iter().map(|r| self.attempt(r, &seq)).collect();
        let mut best: Option<Attempt> = None;
        let mut best_residual: Option<f64> = None;
        let mut reasons = Vec::new();
        for a in attempts {
            let a = match a {
                Ok(a) => a,
                Err(e) => {
                    reasons.push(e.to_string());
                    continue;
                }
            };
            best_residual = Some(best_residual.map_or(a.residual, |b: f64| b.min(a.residual)));
            if !a.converged {
                reasons.push(format!("restart {} stopped at residual {:.3e}", a.restart, a.residual));
                continue;
            }
            if self.is_duplicate(&a.u) {
                reasons.push(format!("restart {} returned an earlier pair", a.restart));
                continue;
            }
            let better = match &best {
                None => true,
                Some(b) => {
                    let tie = (a.g_value - b.g_value).abs() <= TIE_TOL * b.g_value.abs().max(1.0);
                    if tie {
                        a.residual < b.residual
                    } else {
                        a.g_value > b.g_value
                    }
                }
            };
            if better {
                best = Some(a);
            }
        }
        best.ok_or_else(|| IndexFailure { index, reason: reasons.join("; "), best_residual })
    }
}

const RELEASE_TOL: f64 = 1e-8;

const DUPLICATE_COS: f64 = 0.999;
const TIE_TOL: f64 = 1e-10;

/// `(‖(𝒜ˢ)′ − λ𝒢′‖ / ‖(𝒜ˢ)′‖, λ, ⟨(𝒜ˢ)′(u), u⟩, ⟨𝒢′(u), u⟩)` with `λ` from the ratio.
fn residual(ctx: &EnergyContext, u: &[f64]) -> Result<(f64, f64, f64, f64)> {
    let ga = ctx.grad_a(u)?;
    let gg = ctx.grad_g(u)?;
    let pa = dot(&ga, u);
    let pg = dot(&gg, u);
    let lambda = pa / pg;
    let r = norm(&axpy(-lambda, &gg, &ga)) / norm(&ga);
    Ok((if r.is_finite() { r } else { f64::INFINITY }, lambda, pa, pg))
}

fn projected_residual(gf: &[f64], ga: &[f64]) -> f64 {
    let beta = dot(gf, ga) / dot(ga, ga);
    norm(&axpy(-beta, ga, gf)) / norm(gf)
}

fn finish(ctx: &EnergyContext, index: usize, a: Attempt) -> Result<EigenpairResult> {
    let (residual, lambda, a_pairing, g_pairing) = residual(ctx, &a.u)?;
    Ok(EigenpairResult {
        index,
        basis_k: ctx.dim(),
        lambda,
        a_value: ctx.energy_a(&a.u)?,
        g_value: a.g_value,
        residual,
        a_pairing,
        g_pairing,
        iterations: a.iterations,
        newton_steps: a.newton_steps,
        converged: a.converged,
        restart: a.restart,
        label: if index == 1 { Label::First } else { Label::Candidate },
        cluster: false,
        order_violation: false,
        monotone_certificate: a.monotone,
        coercivity_modular: ctx.coercivity_modular(&a.u)?,
        coeffs: a.u,
    })
}

/// The maximizer of `𝒢` on the level set and its eigenvalue.
pub fn solve_first(ctx: &EnergyContext, cfg: &SolverConfig) -> Result<EigenpairResult> {
    let seq = solve_sequence(ctx, 1, cfg)?;
    match (seq.pairs.into_iter().next(), seq.failure) {
        (Some(p), _) => Ok(p),
        (None, Some(f)) => Err(Error::NonConvergence(format!(
            "index 1: {} (best residual {})",
            f.reason,
            f.best_residual.map_or("n/a".into(), |r| format!("{r:.3e}"))
        ))),
        (None, None) => unreachable!("a sequence without pairs carries a failure"),
    }
}

/// Pairs `1..=i_max` by deflation; stops at the first index that fails.
pub fn solve_sequence(ctx: &EnergyContext, i_max: usize, cfg: &SolverConfig) -> Result<Sequence> {
    cfg.validate()?;
    if i_max == 0 || i_max > ctx.dim() {
        return Err(Error::Config(format!("i_max must lie in 1..={}, got {i_max}", ctx.dim())));
    }
    let mut ws = Workspace::new(ctx, cfg)?;
    let mut pairs: Vec<EigenpairResult> = Vec::new();
    for index in 1..=i_max {
        match ws.next_pair(index) {
            Ok(a) => {
                ws.deflate_with(&a.u, a.g_value)?;
                let mut r = finish(ctx, index, a)?;
                if let Some(prev) = pairs.last() {
                    r.cluster = (r.lambda - prev.lambda).abs() < 1e-6 * prev.lambda;
                    r.order_violation =
                        r.lambda < prev.lambda * (1.0 - 1e-10) || r.g_value > prev.g_value * (1.0 + 1e-10);
                }
                pairs.push(r);
            }
            Err(f) => return Ok(Sequence { pairs, failure: Some(f) }),
        }
    }
    Ok(Sequence { pairs, failure: None })
}

/// One eigenpair of the dense linear problem `K u = λ B u`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OraclePair {
    pub lambda: f64,
    /// Scaled so that `𝒜ˢ(u) = ½ uᵀKu = 1`.
    pub coeffs: Vec<f64>,
}

/// All `k` generalized eigenpairs in ascending order, for kernels linear in
/// `ξ` with the source `power:2`.
pub fn linear_oracle(ctx: &EnergyContext) -> Result<Vec<OraclePair>> {
    if ctx.source().power_exponent() != Some(2.0) {
        return Err(Error::Config(format!("linear oracle needs source power:2, got {}", ctx.source().spec())));
    }
    let k = ctx.bilinear_stiffness()?;
    let b = ctx.mass_matrix();
    let chol = b
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Assembly("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Assembly("singular Cholesky factor".into()))?;
    let mut c = &linv * &k * linv.transpose();
    c = (&c + c.transpose()) * 0.5;
    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    order
        .into_iter()
        .map(|i| {
            let y = eig.eigenvectors.column(i);
            let u = linv.transpose() * y;
            let scale = (u.dot(&(&k * &u)) / 2.0).sqrt();
            if !(scale > 0.0 && scale.is_finite()) {
                return Err(Error::Assembly("stiffness is not positive definite".into()));
            }
            Ok(OraclePair { lambda: eig.eigenvalues[i], coeffs: (u / scale).as_slice().to_vec() })
        })
        .collect()
}

/// Distance of two coefficient vectors after `B`-normalization, up to sign.
pub fn mass_normalized_distance(ctx: &EnergyContext, u: &[f64], v: &[f64]) -> Result<f64> {
    let nu = ctx.mass_pairing(u, u)?.sqrt();
    let nv = ctx.mass_pairing(v, v)?.sqrt();
    let uv = ctx.mass_pairing(u, v)? / (nu * nv);
    // ‖u/‖u‖ ∓ v/‖v‖‖²_B = 2 − 2|cos|
    Ok((2.0 - 2.0 * uv.abs()).max(0.0).sqrt())
}

/// Tables of `c_{i,k} = 𝒢(uᵢ)` and `λᵢ` across Galerkin dimensions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub i_max: usize,
    pub rows: Vec<StudyRow>,
    /// Present when at least two dimensions were studied.
    pub verdicts: Option<Verdicts>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub k: usize,
    pub lambdas: Vec<f64>,
    pub g_values: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Smallest eigenvalues of the dense oracle, in the linear case.
    pub oracle_lambdas: Option<Vec<f64>>,
    pub failure: Option<IndexFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdicts {
    /// `c_{1,k}` nondecreasing in `k` within `10⁻⁸` relative.
    pub c1_nondecreasing: bool,
    /// Linear case: `λ₁` nonincreasing in `k`.
    pub lambda1_nonincreasing: Option<bool>,
    /// Linear case: every `λᵢ` within `10⁻³` relative of the oracle at the same `k`.
    pub oracle_agreement: Option<bool>,
}

pub const STUDY_TOL: f64 = 1e-8;
pub const ORACLE_RTOL: f64 = 1e-3;

pub fn k_study(problem: &Problem, cfg: &SolverConfig, k_list: &[usize], i_max: usize) -> Result<ConvergenceReport> {
    if k_list.is_empty() || k_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!("k_list must be nonempty and increasing, got {k_list:?}")));
    }
    let linear = problem.kernel.is_linear() && problem.source.power_exponent() == Some(2.0);
    let mut rows = Vec::new();
    for &k in k_list {
        let ctx = problem.context(k)?;
        let seq = solve_sequence(&ctx, i_max, cfg)?;
        let oracle_lambdas = if linear {
            Some(linear_oracle(&ctx)?.into_iter().take(i_max).map(|p| p.lambda).collect())
        } else {
            None
        };
        rows.push(StudyRow {
            k,
            lambdas: seq.pairs.iter().map(|p| p.lambda).collect(),
            g_values: seq.pairs.iter().map(|p| p.g_value).collect(),
            residuals: seq.pairs.iter().map(|p| p.residual).collect(),
            oracle_lambdas,
            failure: seq.failure,
        });
    }
    let verdicts = (rows.len() >= 2).then(|| verdicts(&rows, linear));
    Ok(ConvergenceReport { i_max, rows, verdicts })
}

fn verdicts(rows: &[StudyRow], linear: bool) -> Verdicts {
    let firsts: Option<Vec<(f64, f64)>> = rows.iter().map(|r| Some((*r.g_values.first()?, *r.lambdas.first()?))).collect();
    let c1_nondecreasing = firsts
        .as_ref()
        .is_some_and(|v| v.windows(2).all(|w| w[1].0 >= w[0].0 - STUDY_TOL * w[0].0.abs()));
    let lambda1_nonincreasing = linear.then(|| {
        firsts
            .as_ref()
            .is_some_and(|v| v.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + STUDY_TOL)))
    });
    let oracle_agreement = linear.then(|| {
        rows.iter().all(|r| {
            r.failure.is_none()
                && r.oracle_lambdas.as_ref().is_some_and(|o| {
                    o.len() == r.lambdas.len()
                        && o.iter().zip(&r.lambdas).all(|(a, b)| (a - b).abs() <= ORACLE_RTOL * a.abs())
                })
        })
    });
    Verdicts { c1_nondecreasing, lambda1_nonincreasing, oracle_agreement }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracgrid::QuadConfig;
    use crate::kernels::{Kernel, Source};

    fn problem(kernel: &str, source: &str) -> Problem {
        Problem::new(0.0, 1.0, 0.5, Kernel::parse(kernel).unwrap(), Source::parse(source).unwrap())
            .with_quad(QuadConfig { grading_depth: 5, ..QuadConfig::default() })
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        assert!(SolverConfig { backtrack: 1.0, ..Default::default() }.validate().is_err());
        assert!(SolverConfig { grad_tol: 0.0, ..Default::default() }.validate().is_err());
        assert!(SolverConfig { n_restarts: 0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn first_pair_matches_oracle_in_linear_case() {
        let ctx = problem("plap:2", "power:2").context(8).unwrap();
        let r = solve_first(&ctx, &SolverConfig::default()).unwrap();
        let o = linear_oracle(&ctx).unwrap();
        assert!(r.converged && r.residual <= 1e-9);
        assert!((r.lambda - o[0].lambda).abs() <= 1e-8 * o[0].lambda);
        assert!(mass_normalized_distance(&ctx, &r.coeffs, &o[0].coeffs).unwrap() <= 1e-6);
        assert_eq!(r.label, Label::First);
    }

    #[test]
    fn one_dimensional_space_needs_no_iteration() {
        let ctx = problem("plap:3", "power:2").context(1).unwrap();
        let r = solve_first(&ctx, &SolverConfig::default()).unwrap();
        let u = ctx.normalize(&[1.0]).unwrap().unit;
        let lambda = dot(&ctx.grad_a(&u).unwrap(), &u) / dot(&ctx.grad_g(&u).unwrap(), &u);
        assert!((r.lambda - lambda).abs() <= 1e-12 * lambda);
        assert_eq!(r.iterations, 0);
        assert!((r.coeffs[0].abs() - u[0]).abs() <= 1e-12);
    }

    #[test]
    fn sign_symmetry() {
        let ctx = problem("plap:3", "power:3").context(6).unwrap();
        let cfg = SolverConfig { n_restarts: 1, ..Default::default() };
        let ws = Workspace::new(&ctx, &cfg).unwrap();
        let u0 = ctx.normalize(&[0.3, 0.9, 1.0, 0.8, 0.2, 0.1]).unwrap().unit;
        let neg: Vec<f64> = u0.iter().map(|v| -v).collect();
        let (a, _, _) = ws.ascend(u0).unwrap();
        let (b, _, _) = ws.ascend(neg).unwrap();
        for (x, y) in a.u.iter().zip(&b.u) {
            assert!((x + y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn penalty_derivatives_match_differences() {
        let ctx = problem("plap:3", "power:3").context(5).unwrap();
        let cfg = SolverConfig::default();
        let mut ws = Workspace::new(&ctx, &cfg).unwrap();
        ws.deflate_with(&[0.2, 0.5, 0.6, 0.5, 0.2], 0.3).unwrap();
        ws.deflate_with(&[-0.4, -0.3, 0.0, 0.3, 0.4], 0.1).unwrap();
        let u = [0.3, -0.1, 0.7, 0.2, -0.5];
        let tau = 0.7;
        let (_, g) = ws.objective(&u, tau).unwrap();
        let h = ws.objective_hessian(&u, tau).unwrap();
        let eps = 1e-5;
        for j in 0..5 {
            let mut up = u;
            let mut dn = u;
            up[j] += eps;
            dn[j] -= eps;
            let (fp, gp) = ws.objective(&up, tau).unwrap();
            let (fm, gm) = ws.objective(&dn, tau).unwrap();
            assert!(((fp - fm) / (2.0 * eps) - g[j]).abs() <= 1e-7);
            for l in 0..5 {
                assert!(((gp[l] - gm[l]) / (2.0 * eps) - h[(l, j)]).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn oracle_is_ascending_and_normalized() {
        let ctx = problem("plap:2", "power:2").context(6).unwrap();
        let o = linear_oracle(&ctx).unwrap();
        assert_eq!(o.len(), 6);
        assert!(o.windows(2).all(|w| w[0].lambda < w[1].lambda) && o[0].lambda > 0.0);
        for p in &o {
            assert!((ctx.energy_a(&p.coeffs).unwrap() - 1.0).abs() <= 1e-10);
        }
        assert!(linear_oracle(&problem("plap:3", "power:2").context(3).unwrap()).is_err());
        assert!(linear_oracle(&problem("plap:2", "power:3").context(3).unwrap()).is_err());
    }

    #[test]
    fn single_k_study_has_no_verdicts() {
        let cfg = SolverConfig { n_restarts: 1, ..Default::default() };
        let rep = k_study(&problem("plap:2", "power:2"), &cfg, &[4], 1).unwrap();
        assert_eq!(rep.rows.len(), 1);
        assert!(rep.verdicts.is_none());
        assert!(k_study(&problem("plap:2", "power:2"), &cfg, &[8, 4], 1).is_err());
    }
}
