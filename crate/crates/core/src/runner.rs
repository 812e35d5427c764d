//! Config-driven execution and tabular output.
//!
//! A run directory holds
//!
//! * `density_n.tsv`, `density_n1.tsv`, ... : one row per instant, one column
//!   per site;
//! * `series.tsv`: scalar observables per instant;
//! * `manifest.json`: resolved config, solver diagnostics and leak flags.
//!
//! Ensemble runs add `density_*_stderr.tsv` and `_se` columns in
//! `series.tsv`. Numbers are written in shortest round-trip scientific
//! notation.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analysis::{dominant_frequency, linear_fit};
use crate::bundled;
use crate::config::ExperimentConfig;
use crate::ensemble::{run_ensemble, run_single, AveragedSeries, FlaggedRealization, RunOutput};
use crate::error::{Error, Result};
use crate::fock::multiset_count;
use crate::observables::{InvariantDiagnostics, LeakEvent, ObservableSeries};

/// Environment variable naming the default output root.
pub const OUTPUT_ROOT_ENV: &str = "QWALK_OUTPUT_ROOT";

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SERIES_FILE: &str = "series.tsv";
pub const SWEEP_SUMMARY_FILE: &str = "sweep_summary.tsv";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub output_dir: Option<PathBuf>,
    /// Worker threads for ensemble realizations; all cores when `None`.
    pub workers: Option<usize>,
    /// Replaces `ensemble.seed`.
    pub seed: Option<u64>,
}

/// Conventions a reader needs to interpret the tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub site_labels: String,
    pub entropy: String,
    pub width: String,
    pub ensemble_average: String,
    pub edge_leakage: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            site_labels: "columns are sites -L..=L; subsystem A is -L..=cut".into(),
            entropy: "von Neumann entropy of rho_A, natural log, eigenvalues below 1e-14 dropped"
                .into(),
            width: "centroid and width of the density divided by N; width is the standard deviation in sites"
                .into(),
            ensemble_average: "pointwise mean over realizations, then moments of the mean; _se is the standard error of the mean"
                .into(),
            edge_leakage: "summed density on the outermost 2 sites at each end".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub name: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub dimension: usize,
    pub residual_max: f64,
    pub realizations: usize,
    /// Phase of a single run; `None` for ensembles.
    pub phase: Option<f64>,
    pub leak: Option<LeakEvent>,
    /// Whether a single run stopped early on an edge leak.
    pub truncated: bool,
    pub flagged: Vec<FlaggedRealization>,
    pub flagged_fraction: f64,
    pub invariants: InvariantDiagnostics,
    pub conventions: Conventions,
    pub files: Vec<String>,
    pub wall_time_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub directory: PathBuf,
    pub manifest: RunManifest,
    pub series: ObservableSeries,
}

/// A config source named on the command line: a file path, or the name of
/// a bundled config when no such file exists.
pub fn load_config(source: &str) -> Result<(ExperimentConfig, String)> {
    let path = Path::new(source);
    if path.is_file() {
        let text = fs::read_to_string(path)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".into());
        let config = ExperimentConfig::from_toml_str(&text)
            .map_err(|e| Error::Config(format!("{}: {}", path.display(), strip(e))))?;
        return Ok((config, name));
    }
    match bundled::get(source) {
        Some(text) => Ok((ExperimentConfig::from_toml_str(text)?, source.to_string())),
        None => Err(Error::Config(format!(
            "{source:?} is neither a file nor a bundled config (try `list`)"
        ))),
    }
}

fn strip(e: Error) -> String {
    match e {
        Error::Config(msg) => msg,
        other => other.to_string(),
    }
}

/// Validation that must pass before anything is written.
pub fn preflight(config: &ExperimentConfig) -> Result<()> {
    config.validate()?;
    let sites = 2 * config.lattice.half_length + 1;
    let dimension = multiset_count(sites, config.particles.count);
    if dimension > config.lattice.dimension_cap as u128 {
        return Err(Error::DimensionCap {
            dimension,
            cap: config.lattice.dimension_cap,
        });
    }
    Ok(())
}

fn output_directory(config: &ExperimentConfig, name: &str, opts: &RunOptions) -> PathBuf {
    if let Some(d) = &opts.output_dir {
        return d.clone();
    }
    if let Some(d) = &config.output.directory {
        return PathBuf::from(d);
    }
    let root = std::env::var_os(OUTPUT_ROOT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("output"));
    root.join(name)
}

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(Error::Config("--workers must be positive".into())),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Config(format!("cannot start {k} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

enum Outcome {
    Single(Box<RunOutput>),
    Ensemble(Box<AveragedSeries>),
}

/// Runs `config` and writes its output directory.
pub fn run(config: &ExperimentConfig, name: &str, opts: &RunOptions) -> Result<RunReport> {
    let mut config = config.clone();
    if let (Some(seed), Some(e)) = (opts.seed, config.ensemble.as_mut()) {
        e.seed = seed;
    }
    preflight(&config)?;
    let dir = output_directory(&config, name, opts);
    let resolved = config.resolve()?;

    let start = Instant::now();
    let outcome = with_workers(opts.workers, || -> Result<Outcome> {
        Ok(match &resolved.ensemble {
            Some(spec) => Outcome::Ensemble(Box::new(run_ensemble(&resolved.experiment, spec)?)),
            None => Outcome::Single(Box::new(run_single(&resolved.experiment, resolved.phase)?)),
        })
    })??;
    let wall = start.elapsed().as_secs_f64();

    fs::create_dir_all(&dir)?;
    let (series, stderr) = match &outcome {
        Outcome::Single(out) => (&out.series, None),
        Outcome::Ensemble(avg) => (&avg.mean, Some(&avg.stderr)),
    };
    let files = write_tables(&dir, series, stderr)?;

    let mut manifest = RunManifest {
        name: name.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        dimension: 0,
        residual_max: 0.0,
        realizations: 1,
        phase: None,
        leak: series.leak,
        truncated: series.truncated,
        flagged: Vec::new(),
        flagged_fraction: 0.0,
        invariants: series.diagnostics,
        conventions: Conventions::default(),
        files,
        wall_time_seconds: wall,
    };
    match &outcome {
        Outcome::Single(out) => {
            manifest.phase = Some(out.phase);
            manifest.residual_max = out.residual_max;
            manifest.dimension = out.dimension;
            manifest.flagged_fraction = if series.leak.is_some() { 1.0 } else { 0.0 };
        }
        Outcome::Ensemble(avg) => {
            manifest.residual_max = avg.residual_max;
            manifest.dimension = avg.dimension;
            manifest.realizations = avg.realizations;
            manifest.flagged = avg.flagged.clone();
            manifest.flagged_fraction = avg.flagged_fraction();
        }
    }
    write_manifest(&dir, &manifest)?;
    let series = match outcome {
        Outcome::Single(out) => out.series,
        Outcome::Ensemble(avg) => avg.mean,
    };
    Ok(RunReport {
        directory: dir,
        manifest,
        series,
    })
}

fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<()> {
    let json = serde_json::to_string_pretty(manifest)
        .map_err(|e| Error::Config(format!("manifest serialization: {e}")))?;
    let tmp = dir.join(format!(".{MANIFEST_FILE}.tmp"));
    fs::write(&tmp, json + "\n")?;
    fs::rename(&tmp, dir.join(MANIFEST_FILE))?;
    Ok(())
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

/// Heatmap table: a `# quantity` line, a `# t` line listing the site labels,
/// then one row per instant.
pub fn density_table(quantity: &str, series: &ObservableSeries, rows: &[Vec<f64>]) -> String {
    let mut out = format!("# quantity: {quantity}\n# t");
    for i in series.lattice.labels() {
        write!(out, "\t{i}").unwrap();
    }
    out.push('\n');
    for (t, row) in series.times.iter().zip(rows) {
        out.push_str(&num(*t));
        for v in row {
            out.push('\t');
            out.push_str(&num(*v));
        }
        out.push('\n');
    }
    out
}

/// Column names of `series.tsv`.
pub fn series_columns(series: &ObservableSeries, with_stderr: bool) -> Vec<String> {
    let mut cols: Vec<String> = ["t", "entropy", "centroid", "width", "leakage", "norm"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for k in 1..=series.components.len() {
        for q in ["weight", "centroid", "width"] {
            cols.push(format!("n{k}_{q}"));
        }
    }
    if with_stderr {
        for q in ["entropy", "centroid", "width", "leakage"] {
            cols.push(format!("{q}_se"));
        }
    }
    cols
}

pub fn series_table(series: &ObservableSeries, stderr: Option<&ObservableSeries>) -> String {
    let cols = series_columns(series, stderr.is_some());
    let mut out = format!("# {}\n", cols.join("\t"));
    let component_moments: Vec<_> = (1..=series.components.len())
        .map(|k| series.component_moments(k).unwrap_or_default())
        .collect();
    for i in 0..series.len() {
        let mut row = vec![
            series.times[i],
            series.entropy[i],
            series.centroid[i],
            series.width[i],
            series.leakage[i],
            series.norm[i],
        ];
        for m in &component_moments {
            row.extend([m[i].weight, m[i].centroid, m[i].width]);
        }
        if let Some(se) = stderr {
            row.extend([se.entropy[i], se.centroid[i], se.width[i], se.leakage[i]]);
        }
        let line: Vec<String> = row.into_iter().map(num).collect();
        out.push_str(&line.join("\t"));
        out.push('\n');
    }
    out
}

fn write_tables(
    dir: &Path,
    series: &ObservableSeries,
    stderr: Option<&ObservableSeries>,
) -> Result<Vec<String>> {
    let mut files = Vec::new();
    let mut emit = |file: String, body: String| -> Result<()> {
        fs::write(dir.join(&file), body)?;
        files.push(file);
        Ok(())
    };
    let mut tables: Vec<(String, &ObservableSeries, &Vec<Vec<f64>>)> = Vec::new();
    if !series.density.is_empty() {
        tables.push(("n".into(), series, &series.density));
    }
    for (k, rows) in series.components.iter().enumerate() {
        tables.push((format!("n{}", k + 1), series, rows));
    }
    for (q, s, rows) in tables {
        emit(format!("density_{q}.tsv"), density_table(&q, s, rows))?;
    }
    if let Some(se) = stderr {
        if !se.density.is_empty() {
            emit(
                "density_n_stderr.tsv".into(),
                density_table("n stderr", se, &se.density),
            )?;
        }
        for (k, rows) in se.components.iter().enumerate() {
            let q = format!("n{}", k + 1);
            emit(
                format!("density_{q}_stderr.tsv"),
                density_table(&format!("{q} stderr"), se, rows),
            )?;
        }
    }
    emit(SERIES_FILE.into(), series_table(series, stderr))?;
    Ok(files)
}

/// Endpoint scalars of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub final_width: f64,
    pub final_entropy: f64,
    /// Angular frequency of the strongest centroid oscillation.
    pub dominant_frequency: f64,
    /// Slope of the doubly occupied component's width over the second half
    /// of the run.
    pub n2_width_rate: f64,
}

impl SweepRow {
    fn from_series(value: f64, s: &ObservableSeries) -> Self {
        let last = |v: &[f64]| v.last().copied().unwrap_or(f64::NAN);
        let dt = if s.times.len() > 1 {
            s.times[1] - s.times[0]
        } else {
            f64::NAN
        };
        let n2_width_rate = s
            .component_moments(2)
            .and_then(|m| {
                let half = s.times.len() / 2;
                let w: Vec<f64> = m[half..].iter().map(|m| m.width).collect();
                linear_fit(&s.times[half..], &w)
            })
            .map_or(f64::NAN, |(slope, _)| slope);
        Self {
            value,
            final_width: last(&s.width),
            final_entropy: last(&s.entropy),
            dominant_frequency: dominant_frequency(&s.centroid, dt).unwrap_or(f64::NAN),
            n2_width_rate,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub directory: PathBuf,
    pub parameter: String,
    pub rows: Vec<SweepRow>,
    pub runs: Vec<PathBuf>,
}

pub const SWEEP_COLUMNS: [&str; 5] = [
    "value",
    "final_width",
    "final_entropy",
    "dominant_frequency",
    "n2_width_rate",
];

/// One run per value in `{dir}/{param}_{value}`, plus a summary table.
/// Every point is validated before the first one runs.
pub fn sweep(
    config: &ExperimentConfig,
    name: &str,
    parameter: &str,
    values: &[f64],
    opts: &RunOptions,
) -> Result<SweepReport> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    let key = parameter
        .rsplit('.')
        .next()
        .unwrap_or(parameter)
        .to_string();
    let mut points = Vec::with_capacity(values.len());
    for &v in values {
        let mut c = config.clone();
        c.set_scalar(parameter, v)?;
        c.output.directory = None;
        if let (Some(seed), Some(e)) = (opts.seed, c.ensemble.as_mut()) {
            e.seed = seed;
        }
        preflight(&c).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{key} = {v}: {msg}")),
            other => other,
        })?;
        points.push((v, c));
    }

    let dir = output_directory(config, &format!("{name}_sweep_{key}"), opts);
    let mut rows = Vec::new();
    let mut runs = Vec::new();
    for (v, c) in points {
        let sub = RunOptions {
            output_dir: Some(dir.join(format!("{key}_{v}"))),
            ..opts.clone()
        };
        let report = run(&c, &format!("{name}_{key}_{v}"), &sub)?;
        rows.push(SweepRow::from_series(v, &report.series));
        runs.push(report.directory);
    }

    let mut out = format!("# parameter: {key}\n# {}\n", SWEEP_COLUMNS.join("\t"));
    for r in &rows {
        let cells = [
            r.value,
            r.final_width,
            r.final_entropy,
            r.dominant_frequency,
            r.n2_width_rate,
        ];
        let line: Vec<String> = cells.into_iter().map(num).collect();
        out.push_str(&line.join("\t"));
        out.push('\n');
    }
    fs::write(dir.join(SWEEP_SUMMARY_FILE), out)?;
    Ok(SweepReport {
        directory: dir,
        parameter: key,
        rows,
        runs,
    })
}

/// Parses a table written by this module: `#` lines are skipped, the last
/// one before the data is returned as the header.
pub fn read_table(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut header = Vec::new();
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if let Some(h) = line.strip_prefix('#') {
            header = h.trim().split('\t').map(str::to_string).collect();
            continue;
        }
        let row = line
            .split('\t')
            .map(|c| c.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Config(format!("line {}: {e}", n + 1)))?;
        rows.push(row);
    }
    Ok((header, rows))
}

/// Summary of every bundled config for the `list` command.
pub fn bundled_overview() -> Vec<(&'static str, String)> {
    bundled::CONFIGS
        .iter()
        .map(|(name, text)| {
            let line = match ExperimentConfig::from_toml_str(text) {
                Ok(c) => {
                    let m = &c.model;
                    let ens = c
                        .ensemble
                        .as_ref()
                        .map(|e| format!(" x{}", e.n_realizations))
                        .unwrap_or_default();
                    format!(
                        "N={} L={} U={} F={} V={} lambda={} t_max={}{ens}",
                        c.particles.count,
                        c.lattice.half_length,
                        m.u,
                        m.f,
                        m.v,
                        m.lambda,
                        c.grid.t_max
                    )
                }
                Err(e) => format!("invalid: {e}"),
            };
            (*name, line)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ExperimentConfig {
        ExperimentConfig::from_toml_str(
            "[lattice]\nL = 3\n[particles]\nN = 2\n[grid]\nt_max = 0.3\n[initial]\ntype = \"adjacent\"\n[observables]\nentropy = true\nhalt_on_leak = false\n",
        )
        .unwrap()
    }

    #[test]
    fn writes_expected_files() {
        let tmp = tempfile::tempdir().unwrap();
        let opts = RunOptions {
            output_dir: Some(tmp.path().join("out")),
            ..Default::default()
        };
        let report = run(&tiny(), "tiny", &opts).unwrap();
        assert_eq!(
            report.manifest.files,
            [
                "density_n.tsv",
                "density_n1.tsv",
                "density_n2.tsv",
                "series.tsv"
            ]
        );
        let text = fs::read_to_string(report.directory.join("density_n.tsv")).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# quantity: n"));
        assert_eq!(lines.next(), Some("# t\t-3\t-2\t-1\t0\t1\t2\t3"));
        let (header, rows) = read_table(&text).unwrap();
        assert_eq!(header.len(), 8);
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.len() == 8));
        assert!((rows[0][4] - 1.0).abs() < 1e-12);
        let manifest: RunManifest = serde_json::from_str(
            &fs::read_to_string(report.directory.join(MANIFEST_FILE)).unwrap(),
        )
        .unwrap();
        assert_eq!(manifest.config, tiny());
        assert_eq!(manifest.dimension, 28);
    }

    #[test]
    fn nothing_written_on_cap_violation() {
        let tmp = tempfile::tempdir().unwrap();
        let mut c = tiny();
        c.lattice.dimension_cap = 10;
        let out = tmp.path().join("out");
        let err = run(
            &c,
            "x",
            &RunOptions {
                output_dir: Some(out.clone()),
                ..Default::default()
            },
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(!out.exists());
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.0, 1.0, -2.5e-17, 0.1 + 0.2, f64::MIN_POSITIVE] {
            assert_eq!(num(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
