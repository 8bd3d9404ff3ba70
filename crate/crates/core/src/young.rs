//! Young functions, their complementary functions, and inverses.
//!
//! A Young function is stored through its density `m` on `[0, ∞)`; the
//! primitive `M(t) = ∫₀^|t| m` is either closed form or (for tabulated
//! densities) integrated exactly from the piecewise-linear table. The
//! complementary function is
//!
//! ```text
//! M̄(t) = sup_{τ ≥ 0} (τ|t| − M(τ)) = |t|·m⁻¹(|t|) − M(m⁻¹(|t|))
//! ```
//!
//! using analytic formulas where a closed-form pair exists and monotone
//! bisection on the density otherwise.

use std::fmt;
use std::sync::Arc;

use crate::error::{check_finite, Error, Result};

/// Stopping rule for the scalar monotone root finders in this module.
#[derive(Debug, Clone, Copy)]
pub struct Bisection {
    pub rtol: f64,
    pub atol: f64,
    pub max_iter: usize,
}

impl Default for Bisection {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-14, max_iter: 200 }
    }
}

impl Bisection {
    /// Solve `f(τ) = target` for a nondecreasing `f` with `f(0) = 0`.
    ///
    /// Terminates once `|f(τ) − target| ≤ atol + rtol·target` or the bracket
    /// has collapsed to machine precision.
    pub fn solve_increasing(&self, target: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
        if target == 0.0 {
            return Ok(0.0);
        }
        let tol = self.atol + self.rtol * target;
        let mut lo = 0.0;
        let mut hi = 1.0;
        let mut expansions = 0;
        loop {
            let v = f(hi)?;
            if v.is_nan() {
                return Err(Error::RootFinding(format!("NaN while bracketing target {target}")));
            }
            if v >= target {
                if (v - target).abs() <= tol {
                    return Ok(hi);
                }
                break;
            }
            lo = hi;
            hi *= 2.0;
            expansions += 1;
            if expansions > 1100 || !hi.is_finite() {
                return Err(Error::UnboundedConjugate { target });
            }
        }
        // Shrink from below when the root is tiny.
        while lo == 0.0 && hi > f64::MIN_POSITIVE {
            let half = 0.5 * hi;
            let v = f(half)?;
            if v >= target {
                if (v - target).abs() <= tol {
                    return Ok(half);
                }
                hi = half;
            } else {
                lo = half;
            }
        }
        for _ in 0..self.max_iter {
            let mid = 0.5 * (lo + hi);
            let v = f(mid)?;
            if (v - target).abs() <= tol {
                return Ok(mid);
            }
            if v.is_nan() {
                return Err(Error::RootFinding(format!("NaN at {mid}")));
            }
            if v > target {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= f64::EPSILON * hi {
                return Ok(0.5 * (lo + hi));
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Whether the conjugate and inverses have analytic formulas or go through
/// root-finding on the density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    ClosedForm,
    Numeric,
}

/// Piecewise-linear density table `(tᵢ, m(tᵢ))`, extrapolated linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    t: Vec<f64>,
    m: Vec<f64>,
    cumulative: Vec<f64>,
}

impl DensityTable {
    /// Build from `(t, m(t))` rows strictly increasing in both columns.
    /// A leading `(0, 0)` row is inserted when missing.
    pub fn new(rows: &[(f64, f64)]) -> Result<Self> {
        let mut t = Vec::with_capacity(rows.len() + 1);
        let mut m = Vec::with_capacity(rows.len() + 1);
        match rows.first() {
            None => return Err(Error::Config("empty density table".into())),
            Some(&(t0, m0)) if t0 == 0.0 => {
                if m0 != 0.0 {
                    return Err(Error::Config(format!("density must vanish at 0, got m(0) = {m0}")));
                }
            }
            Some(&(t0, _)) if t0 < 0.0 => {
                return Err(Error::Config(format!("density table starts at negative t = {t0}")));
            }
            Some(_) => {
                t.push(0.0);
                m.push(0.0);
            }
        }
        for &(ti, mi) in rows {
            if !ti.is_finite() || !mi.is_finite() {
                return Err(Error::Config(format!("non-finite density row ({ti}, {mi})")));
            }
            if let (Some(&tp), Some(&mp)) = (t.last(), m.last()) {
                if ti <= tp || mi <= mp {
                    return Err(Error::Config(format!(
                        "density table must be strictly increasing in both columns (plateau or reversal at t = {ti})"
                    )));
                }
            }
            t.push(ti);
            m.push(mi);
        }
        if t.len() < 2 {
            return Err(Error::Config("density table needs at least one positive row".into()));
        }
        let mut cumulative = vec![0.0; t.len()];
        for i in 1..t.len() {
            cumulative[i] = cumulative[i - 1] + 0.5 * (t[i] - t[i - 1]) * (m[i] + m[i - 1]);
        }
        Ok(Self { t, m, cumulative })
    }

    /// Parse `t,m` CSV text. Blank lines, `#` comments and a non-numeric
    /// header row are skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split(',').map(str::trim);
            let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::Config(format!("line {}: expected two columns", lineno + 1)));
            };
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(t), Ok(m)) => rows.push((t, m)),
                _ if rows.is_empty() && lineno == 0 => continue,
                _ => return Err(Error::Config(format!("line {}: cannot parse `{line}`", lineno + 1))),
            }
        }
        Self::new(&rows)
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.t.len();
        match self.t.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    fn density(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let slope = (self.m[i + 1] - self.m[i]) / (self.t[i + 1] - self.t[i]);
        self.m[i] + slope * (t - self.t[i])
    }

    fn primitive(&self, t: f64) -> f64 {
        let i = self.segment(t);
        self.cumulative[i] + 0.5 * (t - self.t[i]) * (self.m[i] + self.density(t))
    }
}

#[derive(Debug, Clone)]
enum Repr {
    /// `M(t) = |t|^p / p`
    Power { p: f64 },
    /// `M(t) = |t|^p log(1 + |t|)`
    PowerLog { p: f64 },
    /// `m(t) = e^t − 1`
    Exp,
    /// `M(t) = (1+|t|) log(1+|t|) − |t|`, the conjugate of `Exp`
    ExpConjugate,
    Tabulated(Arc<DensityTable>),
    /// Numeric complementary function of the wrapped Young function.
    Conjugate(Arc<YoungFunction>),
}

/// An N-function `M` given by its density.
///
/// Immutable; every evaluation is a pure function of the arguments.
#[derive(Debug, Clone)]
pub struct YoungFunction {
    repr: Repr,
    solver: Bisection,
}

impl PartialEq for YoungFunction {
    fn eq(&self, other: &Self) -> bool {
        self.spec() == other.spec()
    }
}

impl fmt::Display for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec())
    }
}

impl YoungFunction {
    /// `M(t) = |t|^p / p`, `p > 1`.
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::Config(format!("power Young function needs p > 1, got {p}")));
        }
        Ok(Self::from_repr(Repr::Power { p }))
    }

    /// `M(t) = |t|^p log(1 + |t|)`, `p ≥ 1`.
    pub fn power_log(p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::Config(format!("plog Young function needs p >= 1, got {p}")));
        }
        Ok(Self::from_repr(Repr::PowerLog { p }))
    }

    /// Density `m(t) = e^t − 1`; fails the Δ₂ condition.
    pub fn exponential() -> Self {
        Self::from_repr(Repr::Exp)
    }

    pub fn tabulated(table: DensityTable) -> Self {
        Self::from_repr(Repr::Tabulated(Arc::new(table)))
    }

    /// Parse a catalog name: `power:p`, `plog:p` or `exp`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (spec, None),
        };
        let param = |a: Option<&str>| -> Result<f64> {
            let a = a.ok_or_else(|| Error::Config(format!("`{spec}` needs an exponent")))?;
            a.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("cannot parse exponent in `{spec}`")))
        };
        match name {
            "power" => Self::power(param(arg)?),
            "plog" => Self::power_log(param(arg)?),
            "exp" if arg.is_none() => Ok(Self::exponential()),
            _ => Err(Error::Config(format!("unknown Young function `{spec}`"))),
        }
    }

    fn from_repr(repr: Repr) -> Self {
        Self { repr, solver: Bisection::default() }
    }

    /// Override the root-finding tolerances.
    pub fn with_bisection(mut self, solver: Bisection) -> Self {
        self.solver = solver;
        self
    }

    pub fn kind(&self) -> Kind {
        match self.repr {
            Repr::Power { .. } | Repr::Exp | Repr::ExpConjugate => Kind::ClosedForm,
            Repr::PowerLog { .. } | Repr::Tabulated(_) | Repr::Conjugate(_) => Kind::Numeric,
        }
    }

    /// Canonical name, also used for equality.
    pub fn spec(&self) -> String {
        match &self.repr {
            Repr::Power { p } => format!("power:{p}"),
            Repr::PowerLog { p } => format!("plog:{p}"),
            Repr::Exp => "exp".into(),
            Repr::ExpConjugate => "conj(exp)".into(),
            Repr::Tabulated(t) => format!("table[{}]", t.t.len()),
            Repr::Conjugate(inner) => format!("conj({})", inner.spec()),
        }
    }

    /// Exponent `p` of a pure power function.
    pub fn power_exponent(&self) -> Option<f64> {
        match self.repr {
            Repr::Power { p } => Some(p),
            _ => None,
        }
    }

    /// `M(t)`; even in `t`.
    pub fn value(&self, t: f64) -> Result<f64> {
        check_finite(t, "argument of M")?;
        self.value_abs(t.abs())
    }

    /// Odd extension of the density, `sign(t)·m(|t|)`.
    pub fn density(&self, t: f64) -> Result<f64> {
        check_finite(t, "argument of m")?;
        let v = self.density_abs(t.abs())?;
        Ok(if t < 0.0 { -v } else { v })
    }

    /// Derivative of the density at `|t|`, used by Newton-type solvers.
    pub fn density_slope(&self, t: f64) -> Result<f64> {
        let t = t.abs();
        match &self.repr {
            Repr::Power { p } => Ok((p - 1.0) * t.powf(p - 2.0)),
            Repr::PowerLog { p } => {
                let l = t.ln_1p();
                let q = 1.0 + t;
                let mut v = p * t.powf(p - 1.0) / q * 2.0 - t.powf(*p) / (q * q);
                if *p != 1.0 {
                    v += p * (p - 1.0) * t.powf(p - 2.0) * l;
                }
                Ok(v)
            }
            Repr::Exp => Ok(t.exp()),
            Repr::ExpConjugate => Ok(1.0 / (1.0 + t)),
            Repr::Tabulated(tab) => {
                let i = tab.segment(t);
                Ok((tab.m[i + 1] - tab.m[i]) / (tab.t[i + 1] - tab.t[i]))
            }
            Repr::Conjugate(inner) => {
                let tau = inner.density_inverse(t)?;
                Ok(1.0 / inner.density_slope(tau)?)
            }
        }
    }

    pub(crate) fn value_abs(&self, t: f64) -> Result<f64> {
        Ok(match &self.repr {
            Repr::Power { p } => t.powf(*p) / p,
            Repr::PowerLog { p } => t.powf(*p) * t.ln_1p(),
            Repr::Exp => {
                if t < 1e-3 {
                    let t2 = t * t;
                    t2 * (0.5 + t * (1.0 / 6.0 + t * (1.0 / 24.0 + t * (1.0 / 120.0 + t / 720.0))))
                } else {
                    t.exp_m1() - t
                }
            }
            Repr::ExpConjugate => {
                if t < 1e-3 {
                    // Σ_{n≥2} (−1)^n tⁿ / (n(n−1))
                    let t2 = t * t;
                    t2 * (0.5 - t * (1.0 / 6.0 - t * (1.0 / 12.0 - t * (1.0 / 20.0 - t / 30.0))))
                } else {
                    (1.0 + t) * t.ln_1p() - t
                }
            }
            Repr::Tabulated(tab) => tab.primitive(t),
            Repr::Conjugate(inner) => {
                if t == 0.0 {
                    return Ok(0.0);
                }
                let tau = inner.density_inverse(t)?;
                t * tau - inner.value_abs(tau)?
            }
        })
    }

    pub(crate) fn density_abs(&self, t: f64) -> Result<f64> {
        Ok(match &self.repr {
            Repr::Power { p } => t.powf(p - 1.0),
            Repr::PowerLog { p } => {
                let tp1 = t.powf(p - 1.0);
                p * tp1 * t.ln_1p() + tp1 * t / (1.0 + t)
            }
            Repr::Exp => t.exp_m1(),
            Repr::ExpConjugate => t.ln_1p(),
            Repr::Tabulated(tab) => tab.density(t),
            Repr::Conjugate(inner) => inner.density_inverse(t)?,
        })
    }

    /// `m⁻¹(y)` for `y ≥ 0`: the maximizer in the conjugate supremum.
    pub fn density_inverse(&self, y: f64) -> Result<f64> {
        check_finite(y, "argument of m⁻¹")?;
        if y < 0.0 {
            return Err(Error::Domain(format!("m⁻¹ needs y >= 0, got {y}")));
        }
        match &self.repr {
            Repr::Power { p } => Ok(y.powf(1.0 / (p - 1.0))),
            Repr::Exp => Ok(y.ln_1p()),
            Repr::ExpConjugate => Ok(y.exp_m1()),
            Repr::Conjugate(inner) => inner.density_abs(y),
            _ => self.solver.solve_increasing(y, |tau| self.density_abs(tau)),
        }
    }

    /// `M⁻¹(y)` for `y ≥ 0`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        check_finite(y, "argument of M⁻¹")?;
        if y < 0.0 {
            return Err(Error::Domain(format!("M⁻¹ needs y >= 0, got {y}")));
        }
        match &self.repr {
            Repr::Power { p } => Ok((p * y).powf(1.0 / p)),
            _ => self.solver.solve_increasing(y, |t| self.value_abs(t)),
        }
    }

    /// The complementary function `M̄`, analytic where available.
    pub fn conjugate(&self) -> YoungFunction {
        let repr = match &self.repr {
            Repr::Power { p } => Repr::Power { p: p / (p - 1.0) },
            Repr::Exp => Repr::ExpConjugate,
            Repr::ExpConjugate => Repr::Exp,
            _ => Repr::Conjugate(Arc::new(self.clone())),
        };
        Self { repr, solver: self.solver }
    }

    /// The complementary function evaluated through `m⁻¹` root-finding even
    /// when an analytic pair exists.
    pub fn conjugate_numeric(&self) -> YoungFunction {
        Self { repr: Repr::Conjugate(Arc::new(self.clone())), solver: self.solver }
    }

    /// `M(t) + M̄(τ) − τt`; nonnegative, zero exactly when `τ = m(t)`.
    pub fn young_gap(&self, t: f64, tau: f64) -> Result<f64> {
        let conj = self.conjugate();
        Ok(self.value(t)? + conj.value(tau)? - tau * t)
    }

    /// Empirical doubling diagnostic on `t = T·2^j ≤ t_max`.
    ///
    /// The ratio `M(2t)/M(t)` is sampled on the geometric grid. The verdict is
    /// negative when the ratio overflows or grows strictly at every step over
    /// the last decade of the grid. This is a heuristic, not a certificate.
    pub fn check_delta2(&self, t_start: f64, t_max: f64) -> Result<Delta2Diagnostic> {
        if !(t_start > 0.0 && t_max > t_start && t_max.is_finite()) {
            return Err(Error::Domain(format!("need 0 < T < t_max, got T = {t_start}, t_max = {t_max}")));
        }
        let mut ratios = Vec::new();
        let mut t = t_start;
        while t <= t_max * (1.0 + 1e-12) {
            let r = self.value_abs(2.0 * t)? / self.value_abs(t)?;
            ratios.push((t, r));
            t *= 2.0;
        }
        let unbounded = ratios.iter().any(|&(_, r)| !r.is_finite());
        let tail_start = ratios.iter().position(|&(t, _)| t >= t_max / 10.0).unwrap_or(0);
        let tail_start = tail_start.min(ratios.len().saturating_sub(3));
        let tail = &ratios[tail_start..];
        let growing = tail.len() >= 2 && tail.windows(2).all(|w| w[1].1 > w[0].1 * (1.0 + 1e-9));
        let constant_estimate = if unbounded {
            f64::INFINITY
        } else {
            ratios.iter().map(|&(_, r)| r).fold(0.0, f64::max)
        };
        Ok(Delta2Diagnostic { satisfied: !(unbounded || growing), constant_estimate, ratios })
    }
}

/// Outcome of [`YoungFunction::check_delta2`]; empirical by construction.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Delta2Diagnostic {
    pub satisfied: bool,
    pub constant_estimate: f64,
    /// Sampled `(t, M(2t)/M(t))`.
    pub ratios: Vec<(f64, f64)>,
}

impl fmt::Display for Delta2Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "empirical Δ₂ check over {} samples: {} (max ratio {})",
            self.ratios.len(),
            if self.satisfied { "bounded" } else { "growing" },
            self.constant_estimate
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn catalog() -> Vec<YoungFunction> {
        vec![
            YoungFunction::power(2.0).unwrap(),
            YoungFunction::power(1.5).unwrap(),
            YoungFunction::power_log(2.0).unwrap(),
            YoungFunction::exponential(),
        ]
    }

    #[test]
    fn eval_examples() {
        let p2 = YoungFunction::power(2.0).unwrap();
        assert_eq!(p2.value(2.0).unwrap(), 2.0);
        assert_eq!(p2.value(-2.0).unwrap(), 2.0);
        for y in catalog() {
            assert_eq!(y.value(0.0).unwrap(), 0.0);
            assert_eq!(y.density(0.0).unwrap(), 0.0);
        }
        let e = YoungFunction::exponential();
        assert_relative_eq!(e.value(1.0).unwrap(), std::f64::consts::E - 2.0, epsilon = 1e-15);
        let p3 = YoungFunction::power(3.0).unwrap();
        assert_eq!(p3.density(2.0).unwrap(), 4.0);
        for y in catalog() {
            assert_eq!(y.density(-1.0).unwrap(), -y.density(1.0).unwrap());
        }
    }

    #[test]
    fn non_finite_is_domain_error() {
        let y = YoungFunction::exponential();
        assert!(matches!(y.value(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(y.density(f64::INFINITY), Err(Error::Domain(_))));
        assert!(matches!(y.inverse(f64::INFINITY), Err(Error::Domain(_))));
    }

    #[test]
    fn catalog_parsing() {
        assert_eq!(YoungFunction::parse("power:2").unwrap().power_exponent(), Some(2.0));
        assert_eq!(YoungFunction::parse("plog:2").unwrap().kind(), Kind::Numeric);
        assert_eq!(YoungFunction::parse("exp").unwrap().kind(), Kind::ClosedForm);
        assert!(YoungFunction::parse("power:1").is_err());
        assert!(YoungFunction::parse("cosh").is_err());
    }

    #[test]
    fn power_conjugate_is_dual_power() {
        let y = YoungFunction::power(3.0).unwrap();
        let c = y.conjugate();
        assert_relative_eq!(c.power_exponent().unwrap(), 1.5, epsilon = 1e-15);
        let numeric = y.conjugate_numeric();
        for &t in &[0.01, 0.3, 1.0, 4.0, 25.0] {
            assert_relative_eq!(numeric.value(t).unwrap(), c.value(t).unwrap(), max_relative = 1e-9);
        }
    }

    #[test]
    fn exponential_conjugate_closed_form() {
        let c = YoungFunction::exponential().conjugate();
        let numeric = YoungFunction::exponential().conjugate_numeric();
        for &t in &[1e-6, 0.5, 1.0, 10.0, 300.0] {
            let expect = (1.0 + t) * f64::ln(1.0 + t) - t;
            assert_relative_eq!(c.value(t).unwrap(), expect, max_relative = 1e-9);
            assert_relative_eq!(numeric.value(t).unwrap(), expect, max_relative = 1e-8);
        }
    }

    #[test]
    fn inverse_examples() {
        let p2 = YoungFunction::power(2.0).unwrap();
        assert_relative_eq!(p2.inverse(2.0).unwrap(), 2.0, epsilon = 1e-15);
        for y in catalog() {
            assert_eq!(y.inverse(0.0).unwrap(), 0.0);
            for &v in &[0.1, 1.0, 10.0] {
                let t = y.inverse(v).unwrap();
                assert!((y.value(t).unwrap() - v).abs() <= 1e-14 + 1e-10 * v, "{y} at {v}");
            }
        }
    }

    #[test]
    fn delta2_examples() {
        let d = YoungFunction::power(2.0).unwrap().check_delta2(1.0, 1024.0).unwrap();
        assert!(d.satisfied);
        assert_relative_eq!(d.constant_estimate, 4.0, epsilon = 1e-12);
        let d = YoungFunction::power(1.5).unwrap().check_delta2(1.0, 1024.0).unwrap();
        assert!(d.satisfied);
        assert_relative_eq!(d.constant_estimate, 2f64.powf(1.5), epsilon = 1e-12);
        let d = YoungFunction::power_log(2.0).unwrap().check_delta2(1.0, 1e6).unwrap();
        assert!(d.satisfied);
        assert!(YoungFunction::parse("exp").unwrap().check_delta2(1.0, 0.5).is_err());
    }

    #[test]
    fn delta2_fails_for_exponential() {
        // Oracle: log of M(2t)/M(t) with M(t) = e^t − 1 − t, written in a
        // cancellation-free form, increases strictly on t = 2^j.
        let log_m = |t: f64| t + (1.0 - (1.0 + t) * (-t).exp()).ln();
        let logs: Vec<f64> = (0..=20).map(|j| 2f64.powi(j)).map(|t| log_m(2.0 * t) - log_m(t)).collect();
        assert!(logs.windows(2).all(|w| w[1] > w[0]));
        let d = YoungFunction::exponential().check_delta2(1.0, 2f64.powi(20)).unwrap();
        assert!(!d.satisfied);
        assert!(d.constant_estimate.is_infinite());
        // Before overflow the sampled ratios follow the oracle.
        for (j, &(t, r)) in d.ratios.iter().enumerate().take(8) {
            assert_eq!(t, 2f64.powi(j as i32));
            assert_relative_eq!(r.ln(), logs[j], max_relative = 1e-10);
        }
    }

    #[test]
    fn young_gap_examples() {
        let p2 = YoungFunction::power(2.0).unwrap();
        assert_relative_eq!(p2.young_gap(2.0, 2.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_eq!(p2.young_gap(0.0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(p2.young_gap(1.0, 3.0).unwrap(), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn tabulated_density() {
        let tab = DensityTable::from_csv("t,m\n1,1\n2,3\n").unwrap();
        let y = YoungFunction::tabulated(tab);
        assert_eq!(y.kind(), Kind::Numeric);
        assert_relative_eq!(y.value(1.0).unwrap(), 0.5);
        assert_relative_eq!(y.value(2.0).unwrap(), 2.5);
        // linear extrapolation with slope 2 beyond the table
        assert_relative_eq!(y.density(3.0).unwrap(), 5.0);
        assert_relative_eq!(y.value(3.0).unwrap(), 6.5);
        assert_relative_eq!(y.inverse(2.5).unwrap(), 2.0, max_relative = 1e-9);
        let c = y.conjugate();
        // M̄(1) with m⁻¹(1) = 1: 1·1 − M(1) = 0.5
        assert_relative_eq!(c.value(1.0).unwrap(), 0.5, max_relative = 1e-9);
    }

    #[test]
    fn tabulated_rejects_plateaus() {
        assert!(DensityTable::new(&[(1.0, 1.0), (2.0, 1.0)]).is_err());
        assert!(DensityTable::new(&[(1.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(DensityTable::new(&[(0.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(DensityTable::from_csv("0,0\n1,x\n").is_err());
    }

    #[test]
    fn sublinear_at_zero_superlinear_at_infinity() {
        for y in catalog() {
            let small: Vec<f64> = (1..=30).map(|j| 2f64.powi(-j)).map(|t| y.value(t).unwrap() / t).collect();
            assert!(small.windows(2).all(|w| w[1] < w[0]), "{y}");
            assert!(*small.last().unwrap() < 1e-4);
            let large: Vec<f64> = (1..=9).map(|j| 2f64.powi(j)).map(|t| y.value(t).unwrap() / t).collect();
            assert!(large.windows(2).all(|w| w[1] > w[0]), "{y}");
        }
    }
}
