//! Executes a validated configuration and writes its artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use frac_orlicz::kernels::{validate_conditions, validate_source, ValidationReport};
use frac_orlicz::solver::{self, ConvergenceReport, EigenpairResult, IndexFailure, OraclePair, Sequence};
use frac_orlicz::{EnergyContext, Error, YoungFunction};
use serde::Serialize;
use serde_json::json;

use crate::config::{Mode, RunConfig};
use crate::RunError;

#[derive(Debug, Clone, Default)]
pub struct Options {
    /// Overrides `solver.rng_seed`.
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub quiet: bool,
}

/// What a finished run produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

#[derive(Serialize)]
struct PairRecord<'a> {
    i: usize,
    lambda: f64,
    g_value: f64,
    a_value: f64,
    residual: f64,
    converged: bool,
    label: String,
    cluster: bool,
    order_violation: bool,
    a_pairing: f64,
    g_pairing: f64,
    coercivity_modular: f64,
    monotone_certificate: Option<f64>,
    iterations: usize,
    newton_steps: usize,
    restart: usize,
    coeffs: &'a [f64],
}

impl<'a> From<&'a EigenpairResult> for PairRecord<'a> {
    fn from(p: &'a EigenpairResult) -> Self {
        Self {
            i: p.index,
            lambda: p.lambda,
            g_value: p.g_value,
            a_value: p.a_value,
            residual: p.residual,
            converged: p.converged,
            label: p.label.to_string(),
            cluster: p.cluster,
            order_violation: p.order_violation,
            a_pairing: p.a_pairing,
            g_pairing: p.g_pairing,
            coercivity_modular: p.coercivity_modular,
            // No ascent step was taken when the start was already stationary.
            monotone_certificate: p.monotone_certificate.is_finite().then_some(p.monotone_certificate),
            iterations: p.iterations,
            newton_steps: p.newton_steps,
            restart: p.restart,
            coeffs: &p.coeffs,
        }
    }
}

fn counters(pairs: &[EigenpairResult]) -> serde_json::Value {
    json!({
        "ascent_iterations": pairs.iter().map(|p| p.iterations).sum::<usize>(),
        "newton_steps": pairs.iter().map(|p| p.newton_steps).sum::<usize>(),
    })
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn write(&mut self, name: &str, contents: &str) -> Result<(), RunError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| RunError::Io(format!("writing {}: {e}", path.display())))?;
        self.files.push(path);
        Ok(())
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), RunError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| RunError::Io(e.to_string()))?;
        text.push('\n');
        self.write(name, &text)
    }
}

fn quadrature_block(ctx: &EnergyContext, pairs: &[EigenpairResult]) -> Result<serde_json::Value, Error> {
    let mut tail = 0.0f64;
    for p in pairs {
        tail = tail.max(ctx.tail_estimate(&p.coeffs)?);
    }
    Ok(json!({
        "pair_count": ctx.quadrature().len(),
        "tail_radius": ctx.quadrature().tail_radius(),
        "tail_bound": tail,
    }))
}

fn eigenfunctions_csv(ctx: &EnergyContext, pairs: &[Vec<f64>]) -> String {
    let basis = ctx.basis();
    let mut out = String::from("x");
    for i in 1..=pairs.len() {
        let _ = write!(out, ",u{i}");
    }
    out.push('\n');
    let nodal: Vec<Vec<f64>> = pairs.iter().map(|c| basis.extended(c)).collect();
    for (n, x) in basis.nodes().iter().enumerate() {
        let _ = write!(out, "{x}");
        for u in &nodal {
            let _ = write!(out, ",{}", u[n]);
        }
        out.push('\n');
    }
    out
}

fn failure_text(f: &IndexFailure) -> String {
    format!("index {}: {}", f.index, f.reason)
}

fn pair_lines(pairs: &[EigenpairResult]) -> String {
    let mut s = String::new();
    for p in pairs {
        let _ = writeln!(
            s,
            "  i={:<3} lambda={:<22} G={:<22} residual={:.2e} {}",
            p.index, p.lambda, p.g_value, p.residual, p.label
        );
    }
    s
}

/// Runs `cfg` and writes artifacts into `opts.out`.
pub fn execute(mut cfg: RunConfig, opts: &Options) -> Result<Outcome, RunError> {
    if let Some(seed) = opts.seed {
        cfg.solver.rng_seed = seed;
    }
    fs::create_dir_all(&opts.out).map_err(|e| RunError::Io(format!("creating {}: {e}", opts.out.display())))?;
    let mut w = Writer { dir: &opts.out, files: Vec::new() };
    let started = Instant::now();
    let outcome = match cfg.mode {
        Mode::Solve => solve(&cfg, &mut w, started)?,
        Mode::Oracle => oracle(&cfg, &mut w, started)?,
        Mode::Study => study(&cfg, &mut w, started)?,
        Mode::Validate => validate(&cfg, &mut w)?,
    };
    Ok(Outcome { files: w.files, summary: outcome })
}

fn timings(w: &mut Writer<'_>, assembly: f64, total: f64) -> Result<(), RunError> {
    w.json("timings.json", &json!({ "assembly_seconds": assembly, "total_seconds": total }))
}

fn solve(cfg: &RunConfig, w: &mut Writer<'_>, started: Instant) -> Result<String, RunError> {
    let k = cfg.k.expect("validated");
    let ctx = cfg.problem().context(k)?;
    let assembly = started.elapsed().as_secs_f64();
    let seq = solver::solve_sequence(&ctx, cfg.i_max, &cfg.solver)?;
    write_sequence(cfg, w, &ctx, &seq, serde_json::Value::Null)?;
    timings(w, assembly, started.elapsed().as_secs_f64())?;
    sequence_status(&seq, format!("solve k={k}\n{}", pair_lines(&seq.pairs)))
}

fn write_sequence(
    cfg: &RunConfig,
    w: &mut Writer<'_>,
    ctx: &EnergyContext,
    seq: &Sequence,
    extra: serde_json::Value,
) -> Result<(), RunError> {
    let records: Vec<PairRecord> = seq.pairs.iter().map(PairRecord::from).collect();
    let mut results = json!({
        "config_echo": cfg,
        "eigenpairs": records,
        "failure": seq.failure,
        "quadrature": quadrature_block(ctx, &seq.pairs)?,
        "timings": counters(&seq.pairs),
    });
    if let serde_json::Value::Object(extra) = extra {
        results.as_object_mut().expect("object literal").extend(extra);
    }
    w.json("results.json", &results)?;
    let coeffs: Vec<Vec<f64>> = seq.pairs.iter().map(|p| p.coeffs.clone()).collect();
    w.write("eigenfunctions.csv", &eigenfunctions_csv(ctx, &coeffs))
}

fn sequence_status(seq: &Sequence, summary: String) -> Result<String, RunError> {
    match &seq.failure {
        Some(f) => Err(RunError::NonConvergence(format!("{summary}{}", failure_text(f)))),
        None => Ok(summary),
    }
}

fn oracle(cfg: &RunConfig, w: &mut Writer<'_>, started: Instant) -> Result<String, RunError> {
    let k = cfg.k.expect("validated");
    let ctx = cfg.problem().context(k)?;
    let assembly = started.elapsed().as_secs_f64();
    let oracle: Vec<OraclePair> = solver::linear_oracle(&ctx)?;
    let seq = solver::solve_sequence(&ctx, cfg.i_max, &cfg.solver)?;
    let mut deltas = Vec::new();
    for (p, o) in seq.pairs.iter().zip(&oracle) {
        deltas.push(json!({
            "i": p.index,
            "lambda_solver": p.lambda,
            "lambda_oracle": o.lambda,
            "lambda_relative_error": (p.lambda - o.lambda).abs() / o.lambda,
            "vector_distance": solver::mass_normalized_distance(&ctx, &p.coeffs, &o.coeffs)?,
        }));
    }
    let oracle_records: Vec<_> =
        oracle.iter().enumerate().map(|(i, o)| json!({ "i": i + 1, "lambda": o.lambda, "coeffs": o.coeffs })).collect();
    write_sequence(cfg, w, &ctx, &seq, json!({ "oracle": oracle_records, "deltas": deltas }))?;
    timings(w, assembly, started.elapsed().as_secs_f64())?;
    let mut summary = format!("oracle k={k}: {} eigenvalues, smallest {}\n", oracle.len(), oracle[0].lambda);
    summary.push_str(&pair_lines(&seq.pairs));
    sequence_status(&seq, summary)
}

fn study(cfg: &RunConfig, w: &mut Writer<'_>, started: Instant) -> Result<String, RunError> {
    let k_list = cfg.k_list.as_ref().expect("validated");
    let report: ConvergenceReport = solver::k_study(&cfg.problem(), &cfg.solver, k_list, cfg.i_max)?;
    let mut csv = String::from("k,i,lambda,g_value,residual,oracle_lambda\n");
    let mut summary = String::from("study\n");
    for row in &report.rows {
        for i in 0..row.lambdas.len() {
            let oracle = row.oracle_lambdas.as_ref().and_then(|o| o.get(i)).map_or(String::new(), |v| v.to_string());
            let _ = writeln!(csv, "{},{},{},{},{},{}", row.k, i + 1, row.lambdas[i], row.g_values[i], row.residuals[i], oracle);
        }
        let _ = writeln!(summary, "  k={:<4} lambda_1={:?} G_1={:?}", row.k, row.lambdas.first(), row.g_values.first());
    }
    w.json("results.json", &json!({ "config_echo": cfg, "study": report }))?;
    w.write("study.csv", &csv)?;
    timings(w, 0.0, started.elapsed().as_secs_f64())?;
    if let Some(v) = &report.verdicts {
        let _ = writeln!(summary, "  verdicts: {v:?}");
    }
    match report.rows.iter().find_map(|r| r.failure.as_ref().map(|f| (r.k, f))) {
        Some((k, f)) => Err(RunError::NonConvergence(format!("{summary}k={k} {}", failure_text(f)))),
        None => Ok(summary),
    }
}

fn validate(cfg: &RunConfig, w: &mut Writer<'_>) -> Result<String, RunError> {
    let kernel = cfg.kernel();
    let kernel_report: ValidationReport = validate_conditions(&kernel, cfg.samples, cfg.solver.rng_seed);
    let young = YoungFunction::parse(&cfg.young)?;
    let source_report = validate_source(&cfg.source(), &young, cfg.samples, cfg.solver.rng_seed);
    w.json(
        "results.json",
        &json!({ "config_echo": cfg, "validation": { "kernel": kernel_report, "source": source_report } }),
    )?;
    Ok(format!("{kernel_report}\n{source_report}"))
}
