//! The four subcommands, independent of argument parsing.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use subsynth::metrics::{sll_from_scan, DEFAULT_MERGE_TOL, DEFAULT_SLL_STEP_DEG};
use subsynth::{
    chi_metric, layout_from_weights, measure_sll, metric_grid, ogomp_synthesis, omp_synthesis,
    AngleGrid, Error, PatternSamples, PatternSource, PatternSpec, SynthesisResult,
};

use crate::config::{RunConfig, Solver};
use crate::document::{ResultDocument, FORMAT, METADATA_FILE, PATTERN_FILE, RESULT_FILE};
use crate::error::{exit, CliError};

/// Relative tolerance of the stored-versus-recomputed comparison.
pub const DRIFT_TOL: f64 = 1e-8;

pub struct PatternOutcome {
    pub rows: usize,
    pub sll_db: f64,
}

/// Samples the desired pattern on the metric grid and writes it as CSV.
pub fn cmd_pattern(
    spec: &PatternSpec,
    metric_step_deg: f64,
    out: &Path,
) -> Result<PatternOutcome, CliError> {
    let source = PatternSource::from_spec(spec)?;
    let grid = metric_grid(metric_step_deg)?;
    let desired = source.sample(&grid)?;
    let sll_db = match &source {
        PatternSource::Array { geometry, weights } => {
            measure_sll(geometry, weights, DEFAULT_SLL_STEP_DEG)?.sll_db
        }
        PatternSource::Sampled(samples) => {
            let scan = AngleGrid::uniform_step_degrees(-90.0, 90.0, DEFAULT_SLL_STEP_DEG)?;
            let mag: Vec<f64> = samples.resample(&scan)?.iter().map(|v| v.norm()).collect();
            sll_from_scan(scan.degrees(), &mag).sll_db
        }
    };
    let samples = PatternSamples::from_grid(&grid, desired.values().to_vec())?;
    let mut buf = Vec::new();
    samples.write_csv(&mut buf)?;
    write_file(out, &buf)?;
    Ok(PatternOutcome {
        rows: grid.len(),
        sll_db,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent.display(), e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path.display(), e))
}

/// A finished synthesis; `infeasible` marks the best effort of a failed mode-2 search.
pub struct Synthesis {
    pub result: SynthesisResult,
    pub infeasible: bool,
    pub runtime_ms: u128,
}

pub fn run_synthesis(config: &RunConfig) -> Result<Synthesis, CliError> {
    let mode = config.synthesis_mode()?;
    let problem = config.problem()?;
    let start = Instant::now();
    let outcome = match config.solver {
        Solver::Omp => omp_synthesis(&problem, mode, config.omp_config()),
        Solver::Ogomp => ogomp_synthesis(&problem, mode, &config.ogomp_config()),
    };
    let runtime_ms = start.elapsed().as_millis();
    match outcome {
        Ok(result) => Ok(Synthesis {
            result,
            infeasible: false,
            runtime_ms,
        }),
        Err(Error::InfeasibleSynthesis(best)) => Ok(Synthesis {
            result: *best,
            infeasible: true,
            runtime_ms,
        }),
        Err(e) => Err(e.into()),
    }
}

pub fn format_db(v: f64) -> String {
    if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v:.2}")
    }
}

pub fn summary_line(config: &RunConfig, s: &Synthesis) -> String {
    let m = &s.result.metrics;
    format!(
        "solver={} mode={} K={} chi={} xi={:.4e} sll_db={} runtime_ms={}",
        config.solver.name(),
        config.mode,
        s.result.solution.support.len(),
        m.chi,
        m.xi,
        format_db(m.sll_db),
        s.runtime_ms
    )
}

pub struct SynthOutcome {
    pub synthesis: Synthesis,
    pub document: ResultDocument,
    pub summary: String,
}

/// Runs one synthesis and writes result, achieved pattern and metadata into `out_dir`.
pub fn cmd_synth(config: &RunConfig, out_dir: &Path) -> Result<SynthOutcome, CliError> {
    let synthesis = run_synthesis(config)?;
    let document = ResultDocument::from_result(config, &synthesis.result, synthesis.infeasible);
    let grid = metric_grid(config.metric_step_deg)?;
    let samples = PatternSamples::from_grid(&grid, synthesis.result.achieved.clone())?;
    let mut csv = Vec::new();
    samples.write_csv(&mut csv)?;
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let metadata = format!(
        "{{\n  \"runtime_ms\": {},\n  \"finished_unix_s\": {}\n}}\n",
        synthesis.runtime_ms, started
    );
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir.display(), e))?;
    write_file(&out_dir.join(RESULT_FILE), document.to_json().as_bytes())?;
    write_file(&out_dir.join(PATTERN_FILE), &csv)?;
    write_file(&out_dir.join(METADATA_FILE), metadata.as_bytes())?;
    let summary = summary_line(config, &synthesis);
    Ok(SynthOutcome {
        synthesis,
        document,
        summary,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Axis {
    #[value(name = "K", alias = "k")]
    K,
    #[value(name = "xi_target", alias = "xi-target")]
    XiTarget,
    #[value(name = "Q", alias = "q")]
    Q,
    #[value(name = "sll_db", alias = "sll-db")]
    SllDb,
}

fn parse_token<T: std::str::FromStr>(token: &str) -> Result<T, CliError> {
    token
        .parse()
        .map_err(|_| CliError::config(format!("cannot parse sweep value '{token}'")))
}

/// `base` with the swept field set to `token`.
pub fn apply_axis(base: &RunConfig, axis: Axis, token: &str) -> Result<RunConfig, CliError> {
    let mut c = base.clone();
    match axis {
        Axis::K => {
            c.mode = 1;
            c.k = Some(parse_token(token)?);
        }
        Axis::XiTarget => {
            c.mode = 2;
            c.xi_target = Some(parse_token(token)?);
            c.epsilon = None;
        }
        Axis::Q => c.q = parse_token(token)?,
        Axis::SllDb => {
            let v: f64 = parse_token(token)?;
            match &mut c.pattern {
                PatternSpec::Chebyshev { sll_db, .. } | PatternSpec::Taylor { sll_db, .. } => {
                    *sll_db = v
                }
                PatternSpec::File { .. } => {
                    return Err(CliError::config("sll_db sweep needs a generated pattern"))
                }
            }
        }
    }
    Ok(c)
}

pub const SWEEP_HEADER: [&str; 6] = ["value", "chi", "xi", "sll_db", "runtime_ms", "status"];

/// One synthesis per value; rows keep input order whatever the thread count.
pub fn cmd_sweep(
    base: &RunConfig,
    axis: Axis,
    values: &[String],
    threads: Option<usize>,
) -> Result<String, CliError> {
    let run_row = |token: &String| -> [String; 6] {
        let outcome = apply_axis(base, axis, token).and_then(|c| run_synthesis(&c));
        match outcome {
            Ok(s) => {
                let m = s.result.metrics;
                [
                    token.clone(),
                    m.chi.to_string(),
                    m.xi.to_string(),
                    if m.sll_db == f64::NEG_INFINITY {
                        "-inf".into()
                    } else {
                        m.sll_db.to_string()
                    },
                    s.runtime_ms.to_string(),
                    if s.infeasible {
                        "infeasible".into()
                    } else {
                        "ok".into()
                    },
                ]
            }
            Err(e) => [
                token.clone(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                format!("error: {e}"),
            ],
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    let rows: Vec<[String; 6]> = pool.install(|| values.par_iter().map(run_row).collect());
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(SWEEP_HEADER)
        .map_err(|e| CliError::io("sweep", e))?;
    for row in &rows {
        w.write_record(row).map_err(|e| CliError::io("sweep", e))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::io("sweep", e))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Splits a comma-separated value list; an empty string gives no values.
pub fn parse_values(list: &str) -> Vec<String> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

pub struct EvalReport {
    pub document: ResultDocument,
    /// `(field path, description)` for every mismatch.
    pub drift: Vec<(String, String)>,
}

impl EvalReport {
    pub fn passed(&self) -> bool {
        self.drift.is_empty()
    }
}

fn close(a: f64, b: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= DRIFT_TOL * 1f64.max(a.abs()).max(b.abs())
}

/// Reloads a result document and recomputes everything derivable from it.
pub fn cmd_eval(path: &Path) -> Result<EvalReport, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
    let doc = ResultDocument::from_json(&text).map_err(|e| {
        CliError::config(format!("{}: invalid result document: {e}", path.display()))
    })?;
    if doc.format != FORMAT {
        return Err(CliError::config(format!(
            "{}: unsupported format '{}', expected '{FORMAT}'",
            path.display(),
            doc.format
        )));
    }
    let mut drift = Vec::new();
    let mut flag = |p: String, d: String| drift.push((p, d));

    if doc.positions.len() != doc.n {
        flag(
            "positions".into(),
            format!("{} positions for n = {}", doc.positions.len(), doc.n),
        );
    }
    if doc.excitations.len() != doc.n {
        flag(
            "excitations".into(),
            format!("{} entries for n = {}", doc.excitations.len(), doc.n),
        );
    }
    let geometry = match doc.geometry() {
        Ok(g) => Some(g),
        Err(e) => {
            flag("positions".into(), e.to_string());
            None
        }
    };
    let w = doc.excitation_vector();
    for (i, (e, m)) in doc
        .excitations
        .iter()
        .zip(w.normalized_magnitudes())
        .enumerate()
    {
        if e.element != i + 1 {
            flag(
                format!("excitations[{i}].element"),
                format!("expected {}, found {}", i + 1, e.element),
            );
        }
        if !close(e.magnitude, m) {
            flag(
                format!("excitations[{i}].magnitude"),
                format!("stored {} recomputed {m}", e.magnitude),
            );
        }
    }

    match doc.solution() {
        Some(sol)
            if sol.support.iter().all(|&s| s < doc.n) && sol.support.len() == sol.coeffs.len() =>
        {
            if let Ok(expanded) = sol.excitations(doc.n) {
                let scale = expanded
                    .weights()
                    .iter()
                    .map(|v| v.norm())
                    .fold(0.0, f64::max)
                    .max(1.0);
                for (i, (a, b)) in expanded.weights().iter().zip(w.weights()).enumerate() {
                    if (a - b).norm() > DRIFT_TOL * scale {
                        flag(
                            format!("excitations[{i}]"),
                            format!(
                                "stored ({}, {}) but support/coefficients give ({}, {})",
                                b.re, b.im, a.re, a.im
                            ),
                        );
                    }
                }
            }
            match chi_metric(sol.support.len(), doc.n) {
                Ok(chi) if close(chi, doc.metrics.chi) => {}
                Ok(chi) => flag(
                    "metrics.chi".into(),
                    format!("stored {} recomputed {chi}", doc.metrics.chi),
                ),
                Err(e) => flag("support".into(), e.to_string()),
            }
        }
        _ => flag(
            "support".into(),
            "indices must be 1..=n and match the coefficients".into(),
        ),
    }

    let layout = layout_from_weights(&w, DEFAULT_MERGE_TOL);
    if layout.count() != doc.layout.len() {
        flag(
            "layout".into(),
            format!(
                "stored {} runs, recomputed {}",
                doc.layout.len(),
                layout.count()
            ),
        );
    } else {
        for (j, (run, stored)) in layout.runs.iter().zip(&doc.layout).enumerate() {
            let same = run.first + 1 == stored.first
                && run.last + 1 == stored.last
                && run.size() == stored.size
                && close(run.weight.re, stored.re)
                && close(run.weight.im, stored.im);
            if !same {
                flag(
                    format!("layout[{j}]"),
                    format!("recomputed elements {}-{}", run.first + 1, run.last + 1),
                );
            }
        }
    }

    if let (Some(geom), true) = (
        geometry,
        doc.excitations.len() == doc.n && doc.positions.len() == doc.n,
    ) {
        let problem = doc.config.problem()?;
        let achieved = problem.reference().evaluator(&geom).pattern(&w)?;
        let xi = problem.reference().xi_of_pattern(&achieved)?;
        if !close(xi, doc.metrics.xi) {
            flag(
                "metrics.xi".into(),
                format!("stored {} recomputed {xi}", doc.metrics.xi),
            );
        }
        let sll = measure_sll(&geom, &w, doc.config.sll_step_deg)?;
        if !close(sll.sll_db, doc.metrics.sll_db) {
            flag(
                "metrics.sll_db".into(),
                format!("stored {} recomputed {}", doc.metrics.sll_db, sll.sll_db),
            );
        }
        if !close(sll.mainlobe_peak_deg, doc.metrics.mainlobe_peak_deg) {
            flag(
                "metrics.mainlobe_peak_deg".into(),
                format!(
                    "stored {} recomputed {}",
                    doc.metrics.mainlobe_peak_deg, sll.mainlobe_peak_deg
                ),
            );
        }
        let csv_path = path
            .parent()
            .unwrap_or(Path::new("."))
            .join(&doc.achieved_pattern.file);
        if let Ok(samples) = PatternSamples::load(&csv_path) {
            let scale = achieved
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max)
                .max(1e-300);
            let consistent = samples.values.len() == achieved.len()
                && samples
                    .values
                    .iter()
                    .zip(&achieved)
                    .all(|(a, b)| (a - b).norm() <= DRIFT_TOL * scale);
            if !consistent {
                flag(
                    "achieved_pattern".into(),
                    format!("{} differs from the recomputed pattern", csv_path.display()),
                );
            }
        }
    }
    Ok(EvalReport {
        document: doc,
        drift,
    })
}

/// Human-readable eval report; the last line is `drift: pass` or `drift: fail`.
pub fn render_eval(report: &EvalReport) -> String {
    let d = &report.document;
    let m = &d.metrics;
    let mut out = format!(
        "xi={:.4e} chi={} sll_db={} mainlobe_peak_deg={}\nlayout: K={}\n",
        m.xi,
        m.chi,
        format_db(m.sll_db),
        m.mainlobe_peak_deg,
        d.layout.len()
    );
    for (j, run) in d.layout.iter().enumerate() {
        out.push_str(&format!(
            "  subarray {}: elements {}-{} (size {}) weight {:.4}{:+.4}j\n",
            j + 1,
            run.first,
            run.last,
            run.size,
            run.re,
            run.im
        ));
    }
    if report.passed() {
        out.push_str("drift: pass\n");
    } else {
        out.push_str("drift: fail\n");
        for (path, what) in &report.drift {
            out.push_str(&format!("  {path}: {what}\n"));
        }
    }
    out
}

pub fn eval_exit_code(report: &EvalReport) -> u8 {
    if report.passed() {
        exit::SUCCESS
    } else {
        exit::DRIFT
    }
}

pub fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}
