//! Anisotropic integrands `a(x, y, ξ)`, source nonlinearities `g`, and
//! sampled validators for the structural conditions the theory assumes.
//!
//! Catalog kernels and the constants they carry:
//!
//! | spec                 | `a(x,y,ξ)`            | `M`           | growth `(d, b, c)`          | coercivity `(θ, c)` |
//! |----------------------|-----------------------|---------------|-----------------------------|---------------------|
//! | `plap:p`             | `|ξ|^(p−2) ξ`         | `t^p / p`     | `(0, (p/q)^(1/q), 1)`       | `(p, 1)`            |
//! | `weighted-plap:p:w`  | `w(x,y) |ξ|^(p−2) ξ`  | `t^p / p`     | `(0, w⁺ (p/q)^(1/q), 1)`    | `(p w⁻, 1)`         |
//! | `mlap:<young>`       | `m(ξ)`                | the given `M` | `(0, 1, 2)`                 | `(θ_M, 1)`          |
//! | `expr:<a>[;<A>]`     | user expression       | `power:2`     | `(0, 1, 1)`                 | `(1, 1)`            |
//!
//! For `mlap`, growth follows from `M̄(m(t)) = t m(t) − M(t) ≤ M(2t)`, and
//! `θ_M = p` for `power:p` and `plog:p` (both satisfy `t m(t) ≥ p M(t)`),
//! otherwise `1` (every Young function has `t m(t) ≥ M(t)`). For the weighted
//! kernel `w⁻, w⁺` are sampled bounds of `w` on `[−100, 100]²`, widened by
//! one percent. Expression kernels take their constants from the caller.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Expr, Var};
use crate::quadrature::integrate_adaptive;
use crate::sampling::LowDiscrepancy;
use crate::young::YoungFunction;

/// Constants `(d, b, c)` of `|a(x,y,ξ)| ≤ d + b M̄⁻¹(M(c ξ))`, with `d` constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthConstants {
    pub d: f64,
    pub b: f64,
    pub c: f64,
}

/// Constants `(θ, c)` of `a(x,y,ξ) ξ ≥ θ M(c ξ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoercivityConstants {
    pub theta: f64,
    pub c: f64,
}

#[derive(Debug, Clone)]
enum Form {
    Power { p: f64 },
    Weighted { p: f64, w: Expr },
    Density(YoungFunction),
    User { a: Expr, primitive: Option<Expr> },
    Symmetrized(Arc<Kernel>),
}

/// An integrand `a(x, y, ξ)` with its primitive and documented constants.
#[derive(Debug, Clone)]
pub struct Kernel {
    form: Form,
    young: YoungFunction,
    growth: GrowthConstants,
    coercivity: CoercivityConstants,
    symmetric: bool,
    spec: String,
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec)
    }
}

fn parse_exponent(text: &str, spec: &str) -> Result<f64> {
    let p = text
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("cannot parse exponent `{text}` in `{spec}`")))?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Config(format!("exponent must be > 1 in `{spec}`, got {p}")));
    }
    Ok(p)
}

fn power_growth_b(p: f64) -> f64 {
    let q = p / (p - 1.0);
    (p / q).powf(1.0 / q)
}

#[inline]
fn signed_pow(xi: f64, p: f64) -> f64 {
    // |ξ|^(p−2) ξ
    if p == 2.0 {
        xi
    } else if p == 3.0 {
        xi.abs() * xi
    } else {
        xi.abs().powf(p - 1.0).copysign(xi)
    }
}

#[inline]
fn abs_pow(xi: f64, p: f64) -> f64 {
    if p == 2.0 {
        xi * xi
    } else if p == 3.0 {
        xi.abs() * xi * xi
    } else {
        xi.abs().powf(p)
    }
}

#[inline]
fn slope_pow(xi: f64, p: f64) -> f64 {
    if p == 2.0 {
        1.0
    } else if p == 3.0 {
        2.0 * xi.abs()
    } else {
        (p - 1.0) * xi.abs().powf(p - 2.0)
    }
}

// Bounds of a weight expression on [−R, R]², plus the worst symmetry defect.
fn weight_bounds(w: &Expr) -> (f64, f64, f64) {
    const R: f64 = 100.0;
    const N: usize = 801;
    let step = 2.0 * R / (N - 1) as f64;
    (0..N)
        .into_par_iter()
        .map(|i| {
            let x = -R + step * i as f64;
            let mut acc = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
            for j in 0..N {
                let y = -R + step * j as f64;
                let v = w.eval(x, y, 0.0);
                let v_t = w.eval(y, x, 0.0);
                let lo = if v.is_nan() { f64::NEG_INFINITY } else { v };
                acc.0 = acc.0.min(lo);
                acc.1 = acc.1.max(if v.is_nan() { f64::INFINITY } else { v });
                acc.2 = acc.2.max((v - v_t).abs() / v.abs().max(1.0));
            }
            acc
        })
        .reduce(|| (f64::INFINITY, f64::NEG_INFINITY, 0.0), |a, b| (a.0.min(b.0), a.1.max(b.1), a.2.max(b.2)))
}

impl Kernel {
    /// Parse `plap:p`, `weighted-plap:p:<w(x,y)>`, `mlap:<young spec>` or
    /// `expr:<a(x,y,xi)>[;<A(x,y,xi)>]`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (name, rest) = spec
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("kernel spec `{spec}` needs a parameter")))?;
        match name {
            "plap" => Self::p_laplacian(parse_exponent(rest, spec)?),
            "weighted-plap" => {
                let (p, w) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::Config(format!("`{spec}` needs the form weighted-plap:p:<w(x,y)>")))?;
                Self::weighted_p_laplacian(parse_exponent(p, spec)?, Expr::parse(w)?)
            }
            "mlap" => Ok(Self::from_young(YoungFunction::parse(rest)?)),
            "expr" => {
                let (a, prim) = match rest.split_once(';') {
                    Some((a, prim)) => (a, Some(Expr::parse(prim)?)),
                    None => (rest, None),
                };
                Ok(Self::expression(Expr::parse(a)?, prim))
            }
            _ => Err(Error::Config(format!("unknown kernel `{spec}`"))),
        }
    }

    /// Fractional `p`-Laplacian integrand `|ξ|^(p−2) ξ`.
    pub fn p_laplacian(p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::Config(format!("plap needs p > 1, got {p}")));
        }
        Ok(Self {
            form: Form::Power { p },
            young: YoungFunction::power(p)?,
            growth: GrowthConstants { d: 0.0, b: power_growth_b(p), c: 1.0 },
            coercivity: CoercivityConstants { theta: p, c: 1.0 },
            symmetric: true,
            spec: format!("plap:{p}"),
        })
    }

    /// `w(x, y) |ξ|^(p−2) ξ` with a symmetric, positive, bounded weight.
    pub fn weighted_p_laplacian(p: f64, w: Expr) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::Config(format!("weighted-plap needs p > 1, got {p}")));
        }
        if w.uses(Var::Xi) {
            return Err(Error::Config(format!("weight `{w}` must depend on x and y only")));
        }
        let (lo, hi, asym) = weight_bounds(&w);
        if !(lo > 0.0 && hi.is_finite()) {
            return Err(Error::Config(format!("weight `{w}` must be positive and bounded, sampled range [{lo}, {hi}]")));
        }
        if asym > 1e-12 {
            return Err(Error::Config(format!("weight `{w}` is not symmetric in (x, y)")));
        }
        let (w_min, w_max) = (lo * 0.99, hi * 1.01);
        Ok(Self {
            spec: format!("weighted-plap:{p}:{w}"),
            form: Form::Weighted { p, w },
            young: YoungFunction::power(p)?,
            growth: GrowthConstants { d: 0.0, b: w_max * power_growth_b(p), c: 1.0 },
            coercivity: CoercivityConstants { theta: p * w_min, c: 1.0 },
            symmetric: true,
        })
    }

    /// `a(ξ) = m(ξ)`, `A = M`: the Orlicz fractional Laplacian of `M`.
    pub fn from_young(young: YoungFunction) -> Self {
        let theta = young_coercivity(&young);
        Self {
            spec: format!("mlap:{}", young.spec()),
            form: Form::Density(young.clone()),
            young,
            growth: GrowthConstants { d: 0.0, b: 1.0, c: 2.0 },
            coercivity: CoercivityConstants { theta, c: 1.0 },
            symmetric: true,
        }
    }

    /// User-supplied integrand. Without a primitive, `A` is integrated in `ξ`.
    pub fn expression(a: Expr, primitive: Option<Expr>) -> Self {
        let symmetric = !(a.uses(Var::X) || a.uses(Var::Y));
        let spec = match &primitive {
            Some(prim) => format!("expr:{a};{prim}"),
            None => format!("expr:{a}"),
        };
        Self {
            form: Form::User { a, primitive },
            young: YoungFunction::power(2.0).expect("2 > 1"),
            growth: GrowthConstants { d: 0.0, b: 1.0, c: 1.0 },
            coercivity: CoercivityConstants { theta: 1.0, c: 1.0 },
            symmetric,
            spec,
        }
    }

    /// Replace the Young function and constants, e.g. for user kernels.
    pub fn with_constants(mut self, young: YoungFunction, growth: GrowthConstants, coercivity: CoercivityConstants) -> Self {
        self.young = young;
        self.growth = growth;
        self.coercivity = coercivity;
        self
    }

    /// `a_sym(x, y, ξ) = (a(x, y, ξ) + a(y, x, ξ)) / 2`.
    pub fn symmetrize(&self) -> Kernel {
        if self.symmetric {
            return self.clone();
        }
        Kernel {
            form: Form::Symmetrized(Arc::new(self.clone())),
            young: self.young.clone(),
            growth: self.growth,
            coercivity: self.coercivity,
            symmetric: true,
            spec: format!("sym({})", self.spec),
        }
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn young(&self) -> &YoungFunction {
        &self.young
    }

    pub fn growth(&self) -> GrowthConstants {
        self.growth
    }

    pub fn coercivity(&self) -> CoercivityConstants {
        self.coercivity
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// `a(x, y, ξ)`.
    #[inline]
    pub fn a(&self, x: f64, y: f64, xi: f64) -> f64 {
        match &self.form {
            Form::Power { p } => signed_pow(xi, *p),
            Form::Weighted { p, w } => w.eval(x, y, 0.0) * signed_pow(xi, *p),
            Form::Density(m) => m.density(xi).unwrap_or(f64::NAN),
            Form::User { a, .. } => a.eval(x, y, xi),
            Form::Symmetrized(k) => 0.5 * (k.a(x, y, xi) + k.a(y, x, xi)),
        }
    }

    /// `A(x, y, ξ) = ∫₀^ξ a(x, y, τ) dτ`.
    #[inline]
    pub fn primitive(&self, x: f64, y: f64, xi: f64) -> f64 {
        match &self.form {
            Form::Power { p } => abs_pow(xi, *p) / p,
            Form::Weighted { p, w } => w.eval(x, y, 0.0) * abs_pow(xi, *p) / p,
            Form::Density(m) => m.value(xi).unwrap_or(f64::NAN),
            Form::User { a, primitive } => match primitive {
                Some(prim) => prim.eval(x, y, xi) - prim.eval(x, y, 0.0),
                None => {
                    let v = integrate_adaptive(0.0, xi.abs(), 1e-12, 1e-300, |t| a.eval(x, y, t.copysign(xi)));
                    if xi < 0.0 {
                        -v
                    } else {
                        v
                    }
                }
            },
            Form::Symmetrized(k) => 0.5 * (k.primitive(x, y, xi) + k.primitive(y, x, xi)),
        }
    }

    /// `∂a/∂ξ (x, y, ξ)`.
    #[inline]
    pub fn slope(&self, x: f64, y: f64, xi: f64) -> f64 {
        match &self.form {
            Form::Power { p } => slope_pow(xi, *p),
            Form::Weighted { p, w } => w.eval(x, y, 0.0) * slope_pow(xi, *p),
            Form::Density(m) => m.density_slope(xi).unwrap_or(f64::NAN),
            Form::User { a, .. } => {
                let h = 1e-6 * (1.0 + xi.abs());
                (a.eval(x, y, xi + h) - a.eval(x, y, xi - h)) / (2.0 * h)
            }
            Form::Symmetrized(k) => 0.5 * (k.slope(x, y, xi) + k.slope(y, x, xi)),
        }
    }

    /// `w(x, y)` when `a(x, y, ξ) = w(x, y) ξ` is linear in `ξ`.
    pub fn linear_weight(&self, x: f64, y: f64) -> Option<f64> {
        match &self.form {
            Form::Power { p } if *p == 2.0 => Some(1.0),
            Form::Weighted { p, w } if *p == 2.0 => Some(w.eval(x, y, 0.0)),
            Form::Density(m) if m.power_exponent() == Some(2.0) => Some(1.0),
            Form::Symmetrized(k) => Some(0.5 * (k.linear_weight(x, y)? + k.linear_weight(y, x)?)),
            _ => None,
        }
    }

    pub fn is_linear(&self) -> bool {
        self.linear_weight(0.0, 0.0).is_some()
    }

    /// Homogeneity degree `p` when `A(x, y, rξ) = r^p A(x, y, ξ)`.
    pub fn homogeneity(&self) -> Option<f64> {
        match &self.form {
            Form::Power { p } | Form::Weighted { p, .. } => Some(*p),
            Form::Density(m) => m.power_exponent(),
            Form::Symmetrized(k) => k.homogeneity(),
            Form::User { .. } => None,
        }
    }
}

fn young_coercivity(young: &YoungFunction) -> f64 {
    let spec = young.spec();
    for prefix in ["power:", "plog:"] {
        if let Some(p) = spec.strip_prefix(prefix).and_then(|p| p.parse::<f64>().ok()) {
            return p;
        }
    }
    1.0
}

/// Constants `(e, a₁, a₂, a₃)` of `|g(t)| ≤ e + a₁ M̄⁻¹(a₂ M(a₃ t))`, with `e` constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SourceGrowth {
    pub e: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum SourceForm {
    Power { p: f64 },
    AtanPower { p: f64 },
}

/// Odd continuous source `g` with primitive `G`. Growth constants are stated
/// relative to `M(t) = t^p / p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    form: SourceForm,
    growth: SourceGrowth,
    spec: String,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec)
    }
}

impl Source {
    /// Parse `power:p` or `atan-power:p`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (name, p) = spec
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("source spec `{spec}` needs an exponent")))?;
        let p = parse_exponent(p, spec)?;
        match name {
            "power" => Ok(Self::power(p)),
            "atan-power" => Ok(Self::atan_power(p)),
            _ => Err(Error::Config(format!("unknown source `{spec}`"))),
        }
    }

    /// `g(t) = |t|^(p−2) t`.
    pub fn power(p: f64) -> Self {
        Self {
            form: SourceForm::Power { p },
            growth: SourceGrowth { e: 0.0, a1: power_growth_b(p), a2: 1.0, a3: 1.0 },
            spec: format!("power:{p}"),
        }
    }

    /// `g(t) = arctan(|t|) |t|^(p−2) t`, a bounded perturbation of `power:p`.
    pub fn atan_power(p: f64) -> Self {
        Self {
            form: SourceForm::AtanPower { p },
            growth: SourceGrowth { e: 0.0, a1: FRAC_PI_2 * power_growth_b(p), a2: 1.0, a3: 1.0 },
            spec: format!("atan-power:{p}"),
        }
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn growth(&self) -> SourceGrowth {
        self.growth
    }

    pub fn with_growth(mut self, growth: SourceGrowth) -> Self {
        self.growth = growth;
        self
    }

    /// Exponent `p` for `power:p`, the only source for which `G` is homogeneous.
    pub fn power_exponent(&self) -> Option<f64> {
        match self.form {
            SourceForm::Power { p } => Some(p),
            SourceForm::AtanPower { .. } => None,
        }
    }

    #[inline]
    pub fn g(&self, t: f64) -> f64 {
        match self.form {
            SourceForm::Power { p } => signed_pow(t, p),
            SourceForm::AtanPower { p } => t.abs().atan() * signed_pow(t, p),
        }
    }

    /// `G(t) = ∫₀^t g`.
    pub fn primitive(&self, t: f64) -> f64 {
        match self.form {
            SourceForm::Power { p } => abs_pow(t, p) / p,
            SourceForm::AtanPower { p } => {
                let a = t.abs();
                if p == 2.0 {
                    0.5 * ((a * a + 1.0) * a.atan() - a)
                } else {
                    integrate_adaptive(0.0, a, 1e-13, 1e-300, |s| s.atan() * s.powf(p - 1.0))
                }
            }
        }
    }

    /// `g′(t)`.
    pub fn slope(&self, t: f64) -> f64 {
        match self.form {
            SourceForm::Power { p } => slope_pow(t, p),
            SourceForm::AtanPower { p } => {
                let a = t.abs();
                a.powf(p - 1.0) / (1.0 + a * a) + a.atan() * slope_pow(t, p)
            }
        }
    }
}

/// Outcome of one sampled condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub name: String,
    pub passed: bool,
    /// Smallest normalized slack over the samples; negative means violated.
    pub worst_margin: f64,
    pub violations: usize,
    pub checked: usize,
    /// Samples skipped because an evaluation overflowed.
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub subject: String,
    pub samples: usize,
    pub seed: u64,
    pub conditions: Vec<ConditionReport>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionReport> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} ({} samples, seed {})", self.subject, self.samples, self.seed)?;
        for c in &self.conditions {
            writeln!(
                f,
                "  {:<14} {}  worst margin {:+.3e}, {} violations",
                c.name,
                if c.passed { "pass" } else { "FAIL" },
                c.worst_margin,
                c.violations
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
struct Tally {
    worst: f64,
    violations: usize,
    checked: usize,
    skipped: usize,
}

impl Tally {
    const EMPTY: Tally = Tally { worst: f64::INFINITY, violations: 0, checked: 0, skipped: 0 };

    fn record(&mut self, margin: Option<f64>, tol: f64) {
        match margin {
            Some(m) if m.is_finite() => {
                self.checked += 1;
                self.worst = self.worst.min(m);
                if m < -tol {
                    self.violations += 1;
                }
            }
            Some(_) => {
                // NaN slack from a finite evaluation is a violation.
                self.checked += 1;
                self.violations += 1;
                self.worst = f64::NEG_INFINITY;
            }
            None => self.skipped += 1,
        }
    }

    fn merge(self, o: Tally) -> Tally {
        Tally {
            worst: self.worst.min(o.worst),
            violations: self.violations + o.violations,
            checked: self.checked + o.checked,
            skipped: self.skipped + o.skipped,
        }
    }
}

fn rel(slack: f64, scale: f64) -> f64 {
    slack / scale.max(1e-300)
}

const SAMPLE_BOX: f64 = 10.0;
const CHUNK: usize = 1024;

fn finish(names: &[&str], tallies: Vec<Tally>) -> Vec<ConditionReport> {
    names
        .iter()
        .zip(tallies)
        .map(|(name, t)| ConditionReport {
            name: name.to_string(),
            passed: t.violations == 0,
            worst_margin: if t.checked == 0 { 0.0 } else { t.worst },
            violations: t.violations,
            checked: t.checked,
            skipped: t.skipped,
        })
        .collect()
}

fn run_samples<const N: usize>(samples: usize, seed: u64, dim: usize, eval: impl Fn(&[f64], &mut [Tally; N]) + Sync) -> Vec<Tally> {
    let seq = LowDiscrepancy::new(dim, seed);
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<[Tally; N]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut t = [Tally::EMPTY; N];
            let end = ((c + 1) * CHUNK).min(samples);
            for n in c * CHUNK..end {
                eval(&seq.point(n as u64), &mut t);
            }
            t
        })
        .collect();
    parts
        .into_iter()
        .fold([Tally::EMPTY; N], |acc, t| std::array::from_fn(|i| acc[i].merge(t[i])))
        .to_vec()
}

// ξ = ±10^e with e uniform in [−3, 3].
fn xi_from(u: f64, v: f64) -> f64 {
    let mag = 10f64.powf(6.0 * u - 3.0);
    if v < 0.5 {
        -mag
    } else {
        mag
    }
}

/// Sample oddness, sign, growth, monotonicity, coercivity and the primitive
/// bound `A ≤ ξ a` on deterministic quasi-random `(x, y, ξ, ξ′)`.
pub fn validate_conditions(kernel: &Kernel, samples: usize, seed: u64) -> ValidationReport {
    const NAMES: [&str; 6] = ["oddness", "sign", "growth", "monotonicity", "coercivity", "primitive"];
    const TOLS: [f64; 6] = [1e-12, 0.0, 1e-9, 1e-12, 1e-9, 1e-9];
    let m = kernel.young();
    let conj = m.conjugate();
    let g = kernel.growth();
    let co = kernel.coercivity();
    let samples = samples.max(1);
    let tallies = run_samples(samples, seed, 6, |pt: &[f64], t: &mut [Tally; 6]| {
        let x = SAMPLE_BOX * (2.0 * pt[0] - 1.0);
        let y = SAMPLE_BOX * (2.0 * pt[1] - 1.0);
        let xi = xi_from(pt[2], pt[3]);
        let xi2 = xi_from(pt[4], pt[5]);
        let a = kernel.a(x, y, xi);
        let a_neg = kernel.a(x, y, -xi);
        let a2 = kernel.a(x, y, xi2);
        let finite = a.is_finite() && a_neg.is_finite();

        t[0].record(finite.then(|| -rel((a + a_neg).abs(), a.abs())), TOLS[0]);

        t[1].record(finite.then(|| if a * xi > 0.0 { 1.0 } else { rel(a * xi, a.abs() * xi.abs()).min(-1e-300) }), TOLS[1]);

        let rhs = m.value(g.c * xi).unwrap_or(f64::INFINITY);
        let growth = if !(finite && rhs.is_finite()) {
            None
        } else {
            let excess = (a.abs() - g.d).max(0.0) / g.b;
            conj.value(excess).ok().map(|lhs| rel(rhs - lhs, rhs.max(lhs)))
        };
        t[2].record(growth, TOLS[2]);

        let mono = (finite && a2.is_finite()).then(|| {
            let da = a - a2;
            let dx = xi - xi2;
            if da * dx >= 0.0 {
                1.0
            } else {
                rel(da * dx, da.abs() * dx.abs())
            }
        });
        t[3].record(mono, TOLS[3]);

        let lower = m.value(co.c * xi).unwrap_or(f64::INFINITY);
        let coercive = (finite && lower.is_finite() && (a * xi).is_finite()).then(|| {
            let lhs = a * xi;
            rel(lhs - co.theta * lower, lhs.abs().max(co.theta * lower))
        });
        t[4].record(coercive, TOLS[4]);

        let ax = xi.abs();
        let a_pos = kernel.a(x, y, ax);
        let prim = kernel.primitive(x, y, ax);
        let zero = kernel.primitive(x, y, 0.0);
        let bound = (prim.is_finite() && (ax * a_pos).is_finite()).then(|| {
            if zero != 0.0 {
                -1.0
            } else {
                rel(ax * a_pos - prim, (ax * a_pos).abs().max(prim.abs()))
            }
        });
        t[5].record(bound, TOLS[5]);
    });
    ValidationReport {
        subject: format!("kernel {}", kernel.spec()),
        samples,
        seed,
        conditions: finish(&NAMES, tallies),
    }
}

/// Sample oddness, positivity, monotonicity of `G` and the growth bound
/// `M̄((|g| − e)/a₁) ≤ a₂ M(a₃ t)` against a given Young function.
pub fn validate_source(source: &Source, young: &YoungFunction, samples: usize, seed: u64) -> ValidationReport {
    const NAMES: [&str; 4] = ["oddness", "positivity", "primitive", "growth"];
    const TOLS: [f64; 4] = [1e-12, 0.0, 1e-12, 1e-9];
    let conj = young.conjugate();
    let c = source.growth();
    let samples = samples.max(1);
    let tallies = run_samples(samples, seed, 2, |pt: &[f64], tl: &mut [Tally; 4]| {
        let t = 10f64.powf(6.0 * pt[0] - 3.0);
        let t2 = 10f64.powf(6.0 * pt[1] - 3.0);
        let g = source.g(t);
        let g_neg = source.g(-t);
        tl[0].record(Some(-rel((g + g_neg).abs(), g.abs())), TOLS[0]);
        tl[1].record(Some(if g > 0.0 { 1.0 } else { -1.0 }), TOLS[1]);
        let (lo, hi) = if t < t2 { (t, t2) } else { (t2, t) };
        let (gl, gh) = (source.primitive(lo), source.primitive(hi));
        let even = source.primitive(-lo) == gl;
        tl[2].record(Some(if gh >= gl && even && source.primitive(0.0) == 0.0 { 1.0 } else { -1.0 }), TOLS[2]);
        let rhs = c.a2 * young.value(c.a3 * t).unwrap_or(f64::INFINITY);
        let growth = if !rhs.is_finite() {
            None
        } else {
            conj.value((g.abs() - c.e).max(0.0) / c.a1).ok().map(|lhs| rel(rhs - lhs, rhs.max(lhs)))
        };
        tl[3].record(growth, TOLS[3]);
    });
    ValidationReport {
        subject: format!("source {} against {}", source.spec(), young.spec()),
        samples,
        seed,
        conditions: finish(&NAMES, tallies),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn plap_examples() {
        let k = Kernel::parse("plap:2").unwrap();
        assert_eq!(k.a(0.0, 0.0, 1.5), 1.5);
        assert_eq!(k.primitive(0.0, 0.0, 3.0), 4.5);
        assert_eq!(k.coercivity(), CoercivityConstants { theta: 2.0, c: 1.0 });
        assert_eq!(k.linear_weight(0.3, 0.1), Some(1.0));
        let k3 = Kernel::parse("plap:3").unwrap();
        assert_eq!(k3.a(0.0, 0.0, -2.0), -4.0);
        assert_eq!(k3.slope(0.0, 0.0, -2.0), 4.0);
        assert_eq!(k3.primitive(0.0, 0.0, -2.0), 8.0 / 3.0);
        assert!(!k3.is_linear());
    }

    #[test]
    fn catalog_errors() {
        for bad in ["plap:1", "plap:x", "foo:2", "plap", "weighted-plap:2", "weighted-plap:2:-1", "weighted-plap:2:x-y", "mlap:power:0.5"] {
            assert!(matches!(Kernel::parse(bad), Err(Error::Config(_))), "{bad}");
        }
        assert!(Source::parse("cubic:3").is_err());
        assert!(Source::parse("power:1").is_err());
    }

    #[test]
    fn weighted_kernel_bounds() {
        let k = Kernel::parse("weighted-plap:2:1 + 0.5*sin(x+y)").unwrap();
        assert_relative_eq!(k.a(0.2, 0.3, 2.0), 2.0 * (1.0 + 0.5 * 0.5f64.sin()));
        assert!(k.coercivity().theta <= 2.0 * 0.5 && k.coercivity().theta > 0.98);
        assert!(k.growth().b >= 1.5);
    }

    #[test]
    fn symmetrization_averages() {
        let k = Kernel::parse("expr:(1 + x) * xi").unwrap();
        assert!(!k.is_symmetric());
        let s = k.symmetrize();
        assert!(s.is_symmetric());
        let (x, y, xi) = (0.4, -1.2, 1.7);
        assert_relative_eq!(s.a(x, y, xi), (1.0 + 0.5 * (x + y)) * xi, max_relative = 1e-15);
        assert_eq!(s.a(x, y, -xi), -s.a(x, y, xi));
        let p = Kernel::parse("plap:3").unwrap();
        assert_eq!(p.symmetrize().a(0.1, 0.2, 0.7), p.a(0.1, 0.2, 0.7));
    }

    #[test]
    fn numeric_primitive_matches_closed_form() {
        let k = Kernel::parse("expr:abs(xi)*xi").unwrap();
        assert_relative_eq!(k.primitive(0.0, 0.0, -1.5), 1.125, max_relative = 1e-12);
        let k = Kernel::parse("expr:xi;0.5*xi^2 + 7").unwrap();
        assert_eq!(k.primitive(0.0, 0.0, 2.0), 2.0);
    }

    #[test]
    fn mlap_carries_young_function() {
        let k = Kernel::parse("mlap:plog:2").unwrap();
        let m = YoungFunction::power_log(2.0).unwrap();
        assert_eq!(k.a(0.0, 0.0, -0.7), m.density(-0.7).unwrap());
        assert_eq!(k.primitive(0.0, 0.0, 0.7), m.value(0.7).unwrap());
        assert_eq!(k.coercivity().theta, 2.0);
        assert_eq!(k.growth().c, 2.0);
    }

    #[test]
    fn catalog_kernels_validate() {
        for spec in ["plap:2", "plap:3", "plap:1.5", "mlap:plog:2", "mlap:exp", "weighted-plap:3:1 + 0.5*sin(x+y)"] {
            let r = validate_conditions(&Kernel::parse(spec).unwrap(), 4000, 7);
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn cubic_fixture_fails_sign_and_monotonicity() {
        let r = validate_conditions(&Kernel::parse("expr:xi - xi^3").unwrap(), 4000, 7);
        assert!(!r.condition("sign").unwrap().passed);
        assert!(!r.condition("monotonicity").unwrap().passed);
        assert!(r.condition("oddness").unwrap().passed);
    }

    #[test]
    fn validation_is_deterministic() {
        let k = Kernel::parse("mlap:plog:2").unwrap();
        assert_eq!(validate_conditions(&k, 3000, 11), validate_conditions(&k, 3000, 11));
    }

    #[test]
    fn sources() {
        let s = Source::parse("power:2").unwrap();
        assert_eq!((s.g(1.5), s.primitive(-2.0)), (1.5, 2.0));
        let a = Source::parse("atan-power:2").unwrap();
        assert_eq!(a.g(-1.0), -a.g(1.0));
        let quad = integrate_adaptive(0.0, 1.7, 1e-13, 0.0, |t| a.g(t));
        assert_relative_eq!(a.primitive(1.7), quad, max_relative = 1e-12);
        let a3 = Source::parse("atan-power:3").unwrap();
        let h = 1e-5;
        assert_relative_eq!((a3.primitive(0.8 + h) - a3.primitive(0.8 - h)) / (2.0 * h), a3.g(0.8), max_relative = 1e-8);
        assert_relative_eq!((a3.g(0.8 + h) - a3.g(0.8 - h)) / (2.0 * h), a3.slope(0.8), max_relative = 1e-8);
        for src in [s, a, a3] {
            let r = validate_source(&src, &YoungFunction::power(src.spec().rsplit(':').next().unwrap().parse().unwrap()).unwrap(), 2000, 3);
            assert!(r.passed(), "{r}");
        }
    }
}
