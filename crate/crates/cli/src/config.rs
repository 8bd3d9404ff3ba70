//! Run configuration: TOML text, schema checks and line-anchored errors.

use std::ops::Range;

use frac_orlicz::kernels::{CoercivityConstants, GrowthConstants};
use frac_orlicz::{Kernel, Problem, QuadConfig, SolverConfig, Source, YoungFunction};
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Solve,
    Study,
    Oracle,
    Validate,
}

/// Explicit constants for `expr:` kernels, whose catalog defaults are only
/// placeholders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConstants {
    pub young: String,
    pub d: f64,
    pub b: f64,
    pub c: f64,
    pub theta: f64,
    pub coercivity_c: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Option<Spanned<Mode>>,
    omega: Option<Spanned<[f64; 2]>>,
    s: Spanned<f64>,
    k: Option<Spanned<usize>>,
    k_list: Option<Spanned<Vec<usize>>>,
    kernel: Spanned<String>,
    source: Option<Spanned<String>>,
    young: Option<Spanned<String>>,
    i_max: Option<Spanned<usize>>,
    samples: Option<Spanned<usize>>,
    quad: Option<QuadConfig>,
    solver: Option<SolverConfig>,
    kernel_constants: Option<KernelConstants>,
}

/// A validated run, echoed verbatim into `results.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub omega: [f64; 2],
    pub s: f64,
    pub k: Option<usize>,
    pub k_list: Option<Vec<usize>>,
    pub kernel: String,
    pub source: String,
    pub young: String,
    pub i_max: usize,
    pub samples: usize,
    pub quad: QuadConfig,
    pub solver: SolverConfig,
    pub kernel_constants: Option<KernelConstants>,
}

/// Maps byte offsets of the config text to `name:line:col` prefixes.
struct Locator<'a> {
    name: &'a str,
    text: &'a str,
}

impl Locator<'_> {
    fn at(&self, offset: usize) -> String {
        let before = &self.text[..offset.min(self.text.len())];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        format!("{}:{line}:{col}", self.name)
    }

    fn span<T>(&self, v: &Spanned<T>) -> String {
        self.at(v.span().start)
    }

    /// Location of a `[table]` header, or of the file when it is absent.
    fn table(&self, name: &str) -> String {
        let header = format!("[{name}]");
        let mut offset = 0;
        for line in self.text.split_inclusive('\n') {
            if line.trim_start().starts_with(&header) {
                return self.at(offset + line.len() - line.trim_start().len());
            }
            offset += line.len();
        }
        format!("{}:1:1", self.name)
    }

    fn err(&self, location: String, message: impl Into<String>) -> RunError {
        RunError::Config { location, message: message.into() }
    }

    fn toml_error(&self, e: toml::de::Error) -> RunError {
        let location = e.span().map_or_else(|| format!("{}:1:1", self.name), |r: Range<usize>| self.at(r.start));
        self.err(location, e.message().trim().to_string())
    }
}

impl RunConfig {
    /// Parses and validates a configuration; `name` prefixes error locations.
    pub fn parse(text: &str, name: &str) -> Result<Self, RunError> {
        let loc = Locator { name, text };
        let raw: RawConfig = toml::from_str(text).map_err(|e| loc.toml_error(e))?;

        let s = *raw.s.get_ref();
        if !(s > 0.0 && s < 1.0) {
            return Err(loc.err(loc.span(&raw.s), format!("s must lie strictly inside (0, 1), got {s}")));
        }
        let omega = raw.omega.as_ref().map_or([0.0, 1.0], |o| *o.get_ref());
        if !(omega[0].is_finite() && omega[1].is_finite() && omega[0] < omega[1]) {
            let at = raw.omega.as_ref().map_or_else(|| format!("{name}:1:1"), |o| loc.span(o));
            return Err(loc.err(at, format!("omega must be an interval [alpha, beta] with alpha < beta, got {omega:?}")));
        }
        let mode = raw.mode.as_ref().map_or(Mode::Solve, |m| *m.get_ref());
        let mode_at = raw.mode.as_ref().map_or_else(|| format!("{name}:1:1"), |m| loc.span(m));

        let kernel_spec = raw.kernel.get_ref().trim().to_string();
        let kernel = Kernel::parse(&kernel_spec).map_err(|e| loc.err(loc.span(&raw.kernel), e.to_string()))?;
        let source_spec = raw.source.as_ref().map_or("power:2".to_string(), |s| s.get_ref().trim().to_string());
        let source_at = raw.source.as_ref().map_or_else(|| format!("{name}:1:1"), |s| loc.span(s));
        Source::parse(&source_spec).map_err(|e| loc.err(source_at.clone(), e.to_string()))?;

        let kernel = match &raw.kernel_constants {
            Some(kc) => {
                let at = loc.table("kernel_constants");
                if !kernel_spec.starts_with("expr:") {
                    return Err(loc.err(at, "kernel_constants only apply to expr: kernels"));
                }
                let young = YoungFunction::parse(&kc.young).map_err(|e| loc.err(at.clone(), e.to_string()))?;
                let all = [kc.d, kc.b, kc.c, kc.theta, kc.coercivity_c];
                if all.iter().any(|v| !v.is_finite()) || kc.d < 0.0 || all[1..].iter().any(|v| *v <= 0.0) {
                    return Err(loc.err(at, "kernel constants need d >= 0 and b, c, theta, coercivity_c > 0"));
                }
                kernel.with_constants(
                    young,
                    GrowthConstants { d: kc.d, b: kc.b, c: kc.c },
                    CoercivityConstants { theta: kc.theta, c: kc.coercivity_c },
                )
            }
            None => kernel,
        };
        let kernel_young = kernel.young().spec();
        let young = match &raw.young {
            Some(y) => {
                let given = YoungFunction::parse(y.get_ref()).map_err(|e| loc.err(loc.span(y), e.to_string()))?;
                if given.spec() != kernel_young {
                    return Err(loc.err(
                        loc.span(y),
                        format!("young `{}` does not match the kernel's Young function `{kernel_young}`", given.spec()),
                    ));
                }
                given.spec()
            }
            None => kernel_young,
        };

        let quad = raw.quad.unwrap_or_default();
        quad.validate().map_err(|e| loc.err(loc.table("quad"), e.to_string()))?;
        let solver = raw.solver.unwrap_or_default();
        solver.validate().map_err(|e| loc.err(loc.table("solver"), e.to_string()))?;

        let k = raw.k.as_ref().map(|v| *v.get_ref());
        if let Some(kv) = &raw.k {
            if *kv.get_ref() == 0 {
                return Err(loc.err(loc.span(kv), "k must be >= 1"));
            }
        }
        let k_list = raw.k_list.as_ref().map(|v| v.get_ref().clone());
        if let Some(kl) = &raw.k_list {
            let v = kl.get_ref();
            if v.is_empty() || v[0] == 0 || v.windows(2).any(|w| w[0] >= w[1]) {
                return Err(loc.err(loc.span(kl), format!("k_list must be nonempty, positive and increasing, got {v:?}")));
            }
        }
        let i_max = raw.i_max.as_ref().map_or(1, |v| *v.get_ref());
        let i_max_at = raw.i_max.as_ref().map_or_else(|| format!("{name}:1:1"), |v| loc.span(v));
        if i_max == 0 {
            return Err(loc.err(i_max_at, "i_max must be >= 1"));
        }
        match mode {
            Mode::Solve | Mode::Oracle => {
                let Some(kv) = k else {
                    return Err(loc.err(mode_at, "this mode needs `k`"));
                };
                if i_max > kv {
                    return Err(loc.err(i_max_at, format!("i_max = {i_max} exceeds k = {kv}")));
                }
            }
            Mode::Study => {
                let Some(list) = &k_list else {
                    return Err(loc.err(mode_at, "mode = \"study\" needs `k_list`"));
                };
                if i_max > list[0] {
                    return Err(loc.err(i_max_at, format!("i_max = {i_max} exceeds the smallest k = {}", list[0])));
                }
            }
            Mode::Validate => {}
        }
        if mode == Mode::Oracle && !(kernel.is_linear() && source_spec == "power:2") {
            return Err(loc.err(mode_at, "mode = \"oracle\" needs a kernel linear in xi and source = \"power:2\""));
        }
        let samples = raw.samples.as_ref().map_or(100_000, |v| *v.get_ref());
        if samples == 0 {
            return Err(loc.err(loc.span(raw.samples.as_ref().expect("zero came from the file")), "samples must be >= 1"));
        }

        Ok(Self {
            mode,
            omega,
            s,
            k,
            k_list,
            kernel: kernel_spec,
            source: source_spec,
            young,
            i_max,
            samples,
            quad,
            solver,
            kernel_constants: raw.kernel_constants,
        })
    }

    pub fn kernel(&self) -> Kernel {
        let kernel = Kernel::parse(&self.kernel).expect("validated at parse time");
        match &self.kernel_constants {
            Some(kc) => kernel.with_constants(
                YoungFunction::parse(&kc.young).expect("validated at parse time"),
                GrowthConstants { d: kc.d, b: kc.b, c: kc.c },
                CoercivityConstants { theta: kc.theta, c: kc.coercivity_c },
            ),
            None => kernel,
        }
    }

    pub fn source(&self) -> Source {
        Source::parse(&self.source).expect("validated at parse time")
    }

    pub fn problem(&self) -> Problem {
        Problem::new(self.omega[0], self.omega[1], self.s, self.kernel(), self.source()).with_quad(self.quad)
    }
}
