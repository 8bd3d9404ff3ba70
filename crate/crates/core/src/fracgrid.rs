//! Hat-function Galerkin basis on an interval and quadrature of the pair
//! measure `dν₁ = dx dy / |x − y|`.
//!
//! The pair quadrature covers the box `[α − L, β + L]²` minus the diagonal,
//! restricted to pairs with at least one coordinate in `Ω = (α, β)` (every
//! other pair has zero Hölder quotient). Both axes share one partition that
//! contains all basis nodes, a uniform near band of width `min(1, L)` on each
//! side of `Ω`, and log-spaced tail panels out to `L`. Diagonal cells use a
//! rule in `(x+y)/2` and `x−y` graded geometrically toward `x = y`; cells
//! meeting the diagonal at a corner are refined dyadically toward it and the
//! last corner cell is integrated in Duffy coordinates; all
//! other cells are split until their size is at most half their distance to
//! the diagonal.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::quadrature::GaussRule;

/// Uniform hat basis `φ₁ … φ_k` on `(α, β)`, extended by zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinBasis {
    alpha: f64,
    beta: f64,
    k: usize,
    nodes: Vec<f64>,
}

/// Linear interpolation weights of one point: `u(x) = wl·U[node] + wr·U[node+1]`
/// over the extended nodal vector `U` (length `k + 2`, zero at both ends).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Stencil {
    pub node: u32,
    pub wl: f64,
    pub wr: f64,
}

impl Stencil {
    #[inline]
    pub fn eval(&self, nodal: &[f64]) -> f64 {
        let i = self.node as usize;
        self.wl * nodal[i] + self.wr * nodal[i + 1]
    }

    pub fn is_zero(&self) -> bool {
        self.wl == 0.0 && self.wr == 0.0
    }
}

impl GalerkinBasis {
    pub fn new(alpha: f64, beta: f64, k: usize) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && alpha < beta) {
            return Err(Error::Config(format!("degenerate interval ({alpha}, {beta})")));
        }
        if k == 0 {
            return Err(Error::Config("basis needs k >= 1".into()));
        }
        let n = k + 1;
        let nodes = (0..=n)
            .map(|i| if i == n { beta } else { alpha + (beta - alpha) * i as f64 / n as f64 })
            .collect();
        Ok(Self { alpha, beta, k, nodes })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Number of basis functions.
    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    /// Partition points `α = z₀ < … < z_{k+1} = β`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn mesh_size(&self) -> f64 {
        (self.beta - self.alpha) / (self.k + 1) as f64
    }

    /// Lipschitz constant of every hat function.
    pub fn lipschitz(&self) -> f64 {
        1.0 / self.mesh_size()
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.alpha && x < self.beta
    }

    pub fn stencil(&self, x: f64) -> Stencil {
        if !self.contains(x) {
            return Stencil::default();
        }
        let h = self.mesh_size();
        let i = (((x - self.alpha) / h).floor() as usize).min(self.k);
        let xi = ((x - self.nodes[i]) / h).clamp(0.0, 1.0);
        Stencil { node: i as u32, wl: 1.0 - xi, wr: xi }
    }

    /// `φⱼ(x)` for `j` in `0..k`.
    pub fn eval(&self, j: usize, x: f64) -> f64 {
        assert!(j < self.k, "basis index {j} out of range");
        let st = self.stencil(x);
        let node = j + 1;
        match st.node as usize {
            n if n == node => st.wl,
            n if n + 1 == node => st.wr,
            _ => 0.0,
        }
    }

    /// Nodal values `(0, c₁, …, c_k, 0)`.
    pub fn extended(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut u = Vec::with_capacity(self.k + 2);
        u.push(0.0);
        u.extend_from_slice(coeffs);
        u.push(0.0);
        u
    }

    /// `u(x) = Σ cⱼ φⱼ(x)`.
    pub fn eval_combination(&self, coeffs: &[f64], x: f64) -> Result<f64> {
        check_len(self.k, coeffs.len())?;
        let st = self.stencil(x);
        if st.is_zero() {
            return Ok(0.0);
        }
        let i = st.node as usize;
        let at = |n: usize| if n == 0 || n > self.k { 0.0 } else { coeffs[n - 1] };
        Ok(st.wl * at(i) + st.wr * at(i + 1))
    }

    /// `Dˢu(x, y) = (u(x) − u(y)) / |x − y|ˢ`.
    pub fn holder_quotient(&self, coeffs: &[f64], s: f64, x: f64, y: f64) -> Result<f64> {
        if x == y {
            return Err(Error::Diagonal(x));
        }
        let ux = self.eval_combination(coeffs, x)?;
        let uy = self.eval_combination(coeffs, y)?;
        Ok((ux - uy) / (x - y).abs().powf(s))
    }
}

/// Pair-quadrature parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadConfig {
    /// Minimum number of cells across `Ω`; every basis interval is split
    /// evenly so cells stay aligned with the nodes.
    pub cells_per_axis: usize,
    /// Dyadic refinement levels toward the diagonal.
    pub grading_depth: usize,
    /// Gauss–Legendre points per axis per cell.
    pub gauss_order: usize,
    /// Truncation radius `L` as a multiple of `β − α`.
    pub tail_radius_factor: f64,
    /// Log-spaced panels between the near band and `L`.
    pub tail_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { cells_per_axis: 32, grading_depth: 8, gauss_order: 3, tail_radius_factor: 4.0, tail_panels: 4 }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cells_per_axis < 2 {
            return Err(Error::Config(format!("cells_per_axis must be >= 2, got {}", self.cells_per_axis)));
        }
        if !(self.tail_radius_factor > 0.0 && self.tail_radius_factor.is_finite()) {
            return Err(Error::Config(format!("tail radius must be positive, got {}", self.tail_radius_factor)));
        }
        if self.gauss_order == 0 || self.gauss_order > 32 {
            return Err(Error::Config(format!("gauss_order must be in 1..=32, got {}", self.gauss_order)));
        }
        if self.grading_depth > 30 {
            return Err(Error::Config(format!("grading_depth must be <= 30, got {}", self.grading_depth)));
        }
        if self.tail_panels == 0 {
            return Err(Error::Config("tail_panels must be >= 1".into()));
        }
        Ok(())
    }
}

/// One quadrature node of the pair space with `x > y`; its mirror `(y, x)`
/// carries the same weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair {
    pub x: f64,
    pub y: f64,
    /// Approximates `dx dy / |x − y|`.
    pub weight: f64,
    /// `|x − y|^(−s)`.
    pub inv_dist_s: f64,
    /// `u(x) − u(y) = Σ c · U[i]` over `(i, c)`, with `U` the extended nodal
    /// vector. Unused slots are `(0, 0.0)`.
    pub diff: [(u32, f64); 4],
}

impl Pair {
    #[inline]
    pub fn difference(&self, nodal: &[f64]) -> f64 {
        self.diff.iter().map(|&(i, c)| c * nodal[i as usize]).sum()
    }
}

/// Coefficients of `u(x) − u(y)` on the extended nodal vector. When `x` and
/// `y` share a cell or a node the shared entries are merged and built from
/// offsets to the nearest nodes, so they stay accurate as `x − y → 0`
/// instead of cancelling between two values of order one.
fn difference_stencil(basis: &GalerkinBasis, x: f64, y: f64) -> [(u32, f64); 4] {
    let (sx, sy) = (basis.stencil(x), basis.stencil(y));
    let active = |st: &Stencil| st.wl + st.wr > 0.0;
    let h = basis.mesh_size();
    let z = basis.nodes();
    let (ix, iy) = (sx.node, sy.node);
    if active(&sx) && active(&sy) {
        if ix == iy {
            let d = (x - y) / h;
            return [(ix, -d), (ix + 1, d), (0, 0.0), (0, 0.0)];
        }
        if ix == iy + 1 {
            let zc = z[ix as usize];
            let (left, right) = ((zc - y) / h, (x - zc) / h);
            return [(iy, -left), (ix, left - right), (ix + 1, right), (0, 0.0)];
        }
    }
    [(ix, sx.wl), (ix + 1, sx.wr), (iy, -sy.wl), (iy + 1, -sy.wr)]
}

/// Symmetric quadrature of `dν₁` adapted to one basis and one `s`.
#[derive(Debug, Clone)]
pub struct PairQuadrature {
    half: Vec<Pair>,
    s: f64,
    tail_radius: f64,
    lo: f64,
    hi: f64,
    config: QuadConfig,
    basis_len: usize,
}

// Far cells are accepted once size ≤ ADMISSIBILITY · distance to the diagonal.
const ADMISSIBILITY: f64 = 0.5;
const MAX_LEVEL: usize = 60;

struct CellRules<'a> {
    gauss: &'a GaussRule,
    depth: usize,
}

impl CellRules<'_> {
    fn rect(&self, x0: f64, x1: f64, y0: f64, y1: f64, level: usize, out: &mut Vec<(f64, f64, f64)>) {
        let dist = x0 - y1;
        let wx = x1 - x0;
        let wy = y1 - y0;
        let size = wx.max(wy);
        let leaf = if dist > 0.0 { size <= ADMISSIBILITY * dist } else { level >= self.depth };
        if dist == 0.0 && leaf {
            self.corner(x0, wx, y1, wy, out);
            return;
        }
        if leaf || level >= MAX_LEVEL {
            for (x, gx) in self.gauss.mapped(x0, x1) {
                for (y, gy) in self.gauss.mapped(y0, y1) {
                    out.push((x, y, gx * gy / (x - y)));
                }
            }
            return;
        }
        let xm = 0.5 * (x0 + x1);
        let ym = 0.5 * (y0 + y1);
        if wx > 2.0 * wy {
            self.rect(x0, xm, y0, y1, level + 1, out);
            self.rect(xm, x1, y0, y1, level + 1, out);
        } else if wy > 2.0 * wx {
            self.rect(x0, x1, y0, ym, level + 1, out);
            self.rect(x0, x1, ym, y1, level + 1, out);
        } else {
            self.rect(x0, xm, y0, ym, level + 1, out);
            self.rect(x0, xm, ym, y1, level + 1, out);
            self.rect(xm, x1, y0, ym, level + 1, out);
            self.rect(xm, x1, ym, y1, level + 1, out);
        }
    }

    /// Cell `[x0, x0 + wx] × [y1 − wy, y1]` touching the diagonal only at
    /// `(x0, y1)`. With `a = x − x0` and `b = y1 − y`, each half of the cell
    /// split along its diagonal is mapped to a square by a Duffy transform
    /// whose Jacobian cancels the `1/(x − y)` factor.
    fn corner(&self, x0: f64, wx: f64, y1: f64, wy: f64, out: &mut Vec<(f64, f64, f64)>) {
        for (t, gt) in self.gauss.mapped(0.0, 1.0) {
            for (w, gw) in self.gauss.mapped(0.0, 1.0) {
                let (a, b) = (wx * t, wy * t * w);
                out.push((x0 + a, y1 - b, gt * gw * wx * wy * t / (a + b)));
                let (a, b) = (wx * t * w, wy * t);
                out.push((x0 + a, y1 - b, gt * gw * wx * wy * t / (a + b)));
            }
        }
    }

    /// Lower triangle `{a ≤ y < x ≤ b}` of a diagonal cell.
    ///
    /// In `(c, r) = ((x+y)/2, x−y)` (unit Jacobian) the triangle is
    /// `0 < r < h`, `a + r/2 < c < b − r/2`. Basis functions are linear on the
    /// cell, so the integrand is smooth in `c` and singular only in `r`; the
    /// `r` axis is split into panels `[h 2^(−l−1), h 2^(−l)]` down to the depth,
    /// and the remaining panel at the diagonal uses a power substitution.
    fn triangle(&self, a: f64, b: f64, out: &mut Vec<(f64, f64, f64)>) {
        let h = b - a;
        let mut panels = Vec::with_capacity(self.depth + 1);
        let mut hi = h;
        for _ in 0..self.depth {
            panels.push((0.5 * hi, hi));
            hi *= 0.5;
        }
        let mut radial: Vec<(f64, f64)> = panels.into_iter().flat_map(|(r0, r1)| self.gauss.mapped(r0, r1)).collect();
        // r = hi·v⁴ on the innermost panel flattens the r^(p(1−s)−1) singularity.
        radial.extend(self.gauss.mapped(0.0, 1.0).map(|(v, gv)| (hi * v.powi(4), gv * 4.0 * hi * v.powi(3))));
        for (r, gr) in radial {
            for (c, gc) in self.gauss.mapped(a + 0.5 * r, b - 0.5 * r) {
                out.push((c + 0.5 * r, c - 0.5 * r, gr * gc / r));
            }
        }
    }
}

impl PairQuadrature {
    pub fn build(basis: &GalerkinBasis, s: f64, cfg: &QuadConfig) -> Result<Self> {
        cfg.validate()?;
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Config(format!("s must lie in (0, 1), got {s}")));
        }
        let (breaks, in_omega) = axis_partition(basis, cfg);
        let cells = in_omega.len();
        let tasks: Vec<(usize, usize)> = (0..cells)
            .flat_map(|i| (0..=i).map(move |j| (i, j)))
            .filter(|&(i, j)| in_omega[i] || in_omega[j])
            .collect();
        let gauss = GaussRule::new(cfg.gauss_order);
        let rules = CellRules { gauss: &gauss, depth: cfg.grading_depth };
        let raw: Vec<Vec<(f64, f64, f64)>> = tasks
            .par_iter()
            .map(|&(i, j)| {
                let mut out = Vec::new();
                if i == j {
                    rules.triangle(breaks[i], breaks[i + 1], &mut out);
                } else {
                    rules.rect(breaks[i], breaks[i + 1], breaks[j], breaks[j + 1], 0, &mut out);
                }
                out
            })
            .collect();
        let half: Vec<Pair> = raw
            .into_iter()
            .flatten()
            .map(|(x, y, weight)| Pair {
                x,
                y,
                weight,
                inv_dist_s: (x - y).powf(-s),
                diff: difference_stencil(basis, x, y),
            })
            .collect();
        if let Some(p) = half.iter().find(|p| !(p.weight > 0.0 && p.weight.is_finite() && p.x > p.y)) {
            return Err(Error::Assembly(format!("invalid quadrature node ({}, {}) weight {}", p.x, p.y, p.weight)));
        }
        let tail_radius = cfg.tail_radius_factor * (basis.beta() - basis.alpha());
        Ok(Self {
            half,
            s,
            tail_radius,
            lo: basis.alpha() - tail_radius,
            hi: basis.beta() + tail_radius,
            config: *cfg,
            basis_len: basis.len(),
        })
    }

    /// Stored nodes, one per mirrored couple.
    pub fn half_pairs(&self) -> &[Pair] {
        &self.half
    }

    /// Total number of quadrature nodes including mirrors.
    pub fn len(&self) -> usize {
        2 * self.half.len()
    }

    pub fn is_empty(&self) -> bool {
        self.half.is_empty()
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn config(&self) -> &QuadConfig {
        &self.config
    }

    pub fn basis_len(&self) -> usize {
        self.basis_len
    }

    pub fn tail_radius(&self) -> f64 {
        self.tail_radius
    }

    /// The truncation box `[α − L, β + L]`.
    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// All nodes `(x, y, weight)`, each stored pair followed by its mirror.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.half.iter().flat_map(|p| [(p.x, p.y, p.weight), (p.y, p.x, p.weight)])
    }

    /// Quadrature mass of `[x0, x1] × [y0, y1]`.
    pub fn mass_in(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
        self.points()
            .filter(|&(x, y, _)| x >= x0 && x <= x1 && y >= y0 && y <= y1)
            .map(|(_, _, w)| w)
            .sum()
    }
}

/// Shared axis breakpoints and, per cell, whether it lies inside `Ω`.
fn axis_partition(basis: &GalerkinBasis, cfg: &QuadConfig) -> (Vec<f64>, Vec<bool>) {
    let (alpha, beta) = (basis.alpha(), basis.beta());
    let width = beta - alpha;
    let intervals = basis.len() + 1;
    let sub = cfg.cells_per_axis.div_ceil(intervals).max(1);
    let n_omega = intervals * sub;
    let h = width / n_omega as f64;
    let tail = cfg.tail_radius_factor * width;
    let band = tail.min(1.0);
    let n_band = ((band / h).ceil() as usize).max(1);

    let mut outward = Vec::new();
    for i in 1..=n_band {
        outward.push(band * i as f64 / n_band as f64);
    }
    if tail > band {
        let ratio = tail / band;
        for i in 1..=cfg.tail_panels {
            let d = if i == cfg.tail_panels { tail } else { band * ratio.powf(i as f64 / cfg.tail_panels as f64) };
            outward.push(d);
        }
    }

    let mut breaks = Vec::with_capacity(2 * outward.len() + n_omega + 1);
    breaks.extend(outward.iter().rev().map(|d| alpha - d));
    let first_omega = breaks.len();
    for i in 0..=n_omega {
        breaks.push(if i == n_omega { beta } else { alpha + width * i as f64 / n_omega as f64 });
    }
    breaks.extend(outward.iter().map(|d| beta + d));
    let in_omega = (0..breaks.len() - 1).map(|c| c >= first_omega && c < first_omega + n_omega).collect();
    (breaks, in_omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn basis_examples() {
        let b = GalerkinBasis::new(0.0, 1.0, 1).unwrap();
        assert_eq!(b.eval(0, 0.5), 1.0);
        assert_eq!(b.eval(0, 0.25), 0.5);
        let b = GalerkinBasis::new(-1.0, 2.0, 5).unwrap();
        for j in 0..5 {
            for &x in &[-3.0, -1.0, 2.0, 2.5, 10.0] {
                assert_eq!(b.eval(j, x), 0.0);
            }
        }
        for w in b.nodes().windows(2) {
            assert_relative_eq!(w[1] - w[0], 0.5, epsilon = 1e-15);
        }
        assert_relative_eq!(b.lipschitz(), 2.0);
    }

    #[test]
    fn basis_errors() {
        assert!(matches!(GalerkinBasis::new(0.0, 1.0, 0), Err(Error::Config(_))));
        assert!(matches!(GalerkinBasis::new(1.0, 1.0, 3), Err(Error::Config(_))));
    }

    #[test]
    fn hat_functions_are_linearly_independent() {
        // Nodal evaluation matrix is the identity.
        let b = GalerkinBasis::new(0.0, 2.0, 6).unwrap();
        for j in 0..6 {
            for (n, &z) in b.nodes()[1..=6].iter().enumerate() {
                assert_eq!(b.eval(j, z), if n == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn holder_quotient_examples() {
        let b = GalerkinBasis::new(0.0, 1.0, 1).unwrap();
        assert_relative_eq!(b.holder_quotient(&[1.0], 0.5, 0.5, 2.0).unwrap(), 1.0 / 1.5f64.sqrt(), epsilon = 1e-15);
        assert_eq!(b.holder_quotient(&[0.0], 0.5, 0.3, 0.9).unwrap(), 0.0);
        assert!(matches!(b.holder_quotient(&[1.0], 0.5, 0.3, 0.3), Err(Error::Diagonal(_))));
        let b = GalerkinBasis::new(0.0, 1.0, 4).unwrap();
        let c = [0.3, -1.0, 2.0, 0.5];
        let (x, y) = (0.13, 0.77);
        assert_eq!(b.holder_quotient(&c, 0.3, x, y).unwrap(), -b.holder_quotient(&c, 0.3, y, x).unwrap());
    }

    #[test]
    fn config_errors() {
        let b = GalerkinBasis::new(0.0, 1.0, 4).unwrap();
        let bad = QuadConfig { tail_radius_factor: 0.0, ..Default::default() };
        assert!(matches!(PairQuadrature::build(&b, 0.5, &bad), Err(Error::Config(_))));
        let bad = QuadConfig { cells_per_axis: 1, ..Default::default() };
        assert!(matches!(PairQuadrature::build(&b, 0.5, &bad), Err(Error::Config(_))));
        assert!(PairQuadrature::build(&b, 1.0, &QuadConfig::default()).is_err());
    }

    #[test]
    fn partition_aligns_with_nodes_and_box() {
        let b = GalerkinBasis::new(0.0, 1.0, 8).unwrap();
        let cfg = QuadConfig::default();
        let (breaks, in_omega) = axis_partition(&b, &cfg);
        assert_eq!(breaks.first().copied(), Some(-4.0));
        assert_eq!(breaks.last().copied(), Some(5.0));
        for z in b.nodes() {
            assert!(breaks.iter().any(|v| (v - z).abs() < 1e-15));
        }
        assert!(breaks.contains(&2.0) && breaks.contains(&3.0));
        assert_eq!(in_omega.iter().filter(|v| **v).count(), 36);
    }

    #[test]
    fn nodes_avoid_diagonal_and_carry_positive_weight() {
        let b = GalerkinBasis::new(0.0, 1.0, 4).unwrap();
        let q = PairQuadrature::build(&b, 0.4, &QuadConfig { grading_depth: 4, ..Default::default() }).unwrap();
        for (x, y, w) in q.points() {
            assert!(x != y && w > 0.0);
            assert!(b.contains(x) || b.contains(y));
        }
        // mirrored pairs are adjacent with equal weight
        let pts: Vec<_> = q.points().collect();
        for c in pts.chunks(2) {
            assert_eq!((c[0].0, c[0].1, c[0].2), (c[1].1, c[1].0, c[1].2));
        }
    }

    #[test]
    fn far_region_mass_matches_closed_form() {
        // ∫₀¹∫₂³ dy dx / (y − x) = 3 ln 3 − 4 ln 2
        let exact = 3.0 * 3f64.ln() - 4.0 * 2f64.ln();
        let b = GalerkinBasis::new(0.0, 1.0, 16).unwrap();
        let q = PairQuadrature::build(&b, 0.5, &QuadConfig::default()).unwrap();
        let got = q.mass_in(0.0, 1.0, 2.0, 3.0);
        assert!((got - exact).abs() <= 1e-6 * exact, "{got} vs {exact}");
        assert_relative_eq!(q.mass_in(2.0, 3.0, 0.0, 1.0), got, max_relative = 1e-14);
    }

    #[test]
    fn difference_stencil_stays_accurate_near_diagonal() {
        let b = GalerkinBasis::new(0.0, 1.0, 3).unwrap();
        let nodal = b.extended(&[0.3, -1.1, 0.7]);
        let h = b.mesh_size();
        // Same cell, across a node, and far apart.
        for (x, y) in [(0.3 + 1e-12, 0.3), (0.5 + 2e-13, 0.5 - 3e-13), (0.9, 0.1)] {
            let d = difference_stencil(&b, x, y);
            let pair = Pair { x, y, weight: 1.0, inv_dist_s: 1.0, diff: d };
            let slope = |t: f64| {
                let i = (t / h).floor() as usize;
                (nodal[i + 1] - nodal[i]) / h
            };
            let exact = if (x - y) < h {
                slope(x) * (x - b.nodes()[(x / h).floor() as usize]) + slope(y) * (b.nodes()[(x / h).floor() as usize] - y)
            } else {
                b.eval_combination(&[0.3, -1.1, 0.7], x).unwrap() - b.eval_combination(&[0.3, -1.1, 0.7], y).unwrap()
            };
            assert_relative_eq!(pair.difference(&nodal), exact, max_relative = 1e-9);
        }
    }
}
