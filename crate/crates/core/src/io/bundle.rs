//! Executes a [`RunConfig`] and writes its result bundle.
//!
//! A bundle is the data file(s) plus two TOML sidecars: `<name>.bundle.toml`
//! with provenance and diagnostics, and `<name>.config.toml` echoing the
//! effective configuration so the run can be repeated.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::{DtcError, Result};
use crate::oracle;
use crate::sweep::{run_sweep, PhaseDiagram};

use super::svg::{heatmap, line_plot, Series};
use super::table::{write_diagram_csv, write_trace_csv};
use super::{run_trace, JobKind, RunConfig, TraceRequest, TraceResult};

pub const DEFAULT_OUT_DIR: &str = "dtc-out";

#[derive(Debug, Clone, Serialize)]
pub struct BundleRecord {
    pub version: String,
    pub job: String,
    pub master_seed: Option<u64>,
    pub realizations: Option<usize>,
    pub created_unix: u64,
    pub outputs: Vec<String>,
    pub missing_cells: usize,
    pub failed_checks: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_norm_error: Option<f64>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub kind: JobKind,
    pub dir: PathBuf,
    pub outputs: Vec<PathBuf>,
    pub missing_cells: usize,
    pub failed_checks: usize,
    pub diagnostics: Vec<String>,
}

impl RunOutcome {
    /// 0 on full success, 3 when cells failed or checks did not pass.
    pub fn exit_code(&self) -> i32 {
        if self.missing_cells > 0 || self.failed_checks > 0 {
            3
        } else {
            0
        }
    }
}

struct Writer {
    dir: PathBuf,
    name: String,
    outputs: Vec<PathBuf>,
}

impl Writer {
    fn path(&self, ext: &str) -> PathBuf {
        self.dir.join(format!("{}.{ext}", self.name))
    }

    fn create(&mut self, ext: &str) -> Result<fs::File> {
        let p = self.path(ext);
        let f = fs::File::create(&p)?;
        self.outputs.push(p);
        Ok(f)
    }

    fn text(&mut self, ext: &str, body: &str) -> Result<()> {
        let p = self.path(ext);
        fs::write(&p, body)?;
        self.outputs.push(p);
        Ok(())
    }
}

fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn file_names(paths: &[PathBuf]) -> Vec<String> {
    paths
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect()
}

fn diagram_metadata(d: &PhaseDiagram) -> Vec<(&'static str, String)> {
    vec![
        ("version", d.provenance.version.clone()),
        ("master_seed", d.provenance.master_seed.to_string()),
        ("realizations", d.n_realizations.to_string()),
        ("observable", d.provenance.plan.observable.label()),
    ]
}

fn trace_series(req: &TraceRequest, trace: &TraceResult) -> Vec<Series> {
    let mut series: Vec<Series> = req
        .sites()
        .into_iter()
        .map(|site| Series {
            label: format!("site {site} z"),
            points: trace
                .site_rows(site)
                .map(|r| (r.time, r.vector[2]))
                .collect(),
        })
        .collect();
    if let Some(first) = req.sites().first() {
        series.push(Series {
            label: format!("site {first} |s|"),
            points: trace
                .site_rows(*first)
                .map(|r| (r.time, r.length()))
                .collect(),
        });
    }
    series
}

/// Runs the job described by `cfg` with `workers` threads (0 = all cores).
pub fn execute(cfg: &RunConfig, workers: usize) -> Result<RunOutcome> {
    cfg.validate()?;
    let kind = cfg.kind()?;
    let dir = cfg
        .output
        .dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    fs::create_dir_all(&dir)?;
    let name = cfg
        .output
        .name
        .clone()
        .unwrap_or_else(|| kind.name().to_string());
    if name.is_empty() || name.contains(['/', '\\']) {
        return Err(DtcError::Config(format!("invalid output name {name:?}")));
    }
    let format = cfg.output.format;
    let mut w = Writer {
        dir: dir.clone(),
        name,
        outputs: Vec::new(),
    };

    let mut record = BundleRecord {
        version: crate::VERSION.to_string(),
        job: kind.name().to_string(),
        master_seed: None,
        realizations: None,
        created_unix: now_unix(),
        outputs: Vec::new(),
        missing_cells: 0,
        failed_checks: 0,
        max_norm_error: None,
        diagnostics: Vec::new(),
    };

    match kind {
        JobKind::Sweep | JobKind::Purity => {
            let plan = cfg
                .sweep
                .as_ref()
                .or(cfg.purity.as_ref())
                .expect("kind checked");
            let diagram = run_sweep(plan, workers)?;
            if format.csv() {
                write_diagram_csv(&diagram, w.create("csv")?)?;
            }
            if format.svg() {
                let svg = heatmap(
                    &diagram,
                    &plan.observable.label(),
                    &diagram_metadata(&diagram),
                );
                w.text("svg", &svg)?;
            }
            record.master_seed = Some(plan.master_seed);
            record.realizations = Some(plan.realizations);
            record.missing_cells = diagram.missing_cells();
            record.diagnostics = diagram
                .diagnostics
                .iter()
                .map(|d| format!("cell ({}, {}): {}", d.x_index, d.y_index, d.message))
                .collect();
        }
        JobKind::Trace | JobKind::Protocol => {
            let req = cfg
                .trace
                .as_ref()
                .or(cfg.protocol.as_ref())
                .expect("kind checked");
            let trace = run_trace(req)?;
            if format.csv() {
                write_trace_csv(&trace, w.create("csv")?)?;
            }
            if format.svg() {
                let meta = [
                    ("version", crate::VERSION.to_string()),
                    ("master_seed", req.master_seed.to_string()),
                    ("realizations", req.realizations.to_string()),
                ];
                let svg = line_plot(
                    &trace_series(req, &trace),
                    "t / T",
                    "spin",
                    kind.name(),
                    &meta,
                );
                w.text("svg", &svg)?;
            }
            record.master_seed = Some(req.master_seed);
            record.realizations = Some(req.realizations);
            record.max_norm_error = Some(trace.max_norm_error);
        }
        JobKind::Verify => {
            let checks = oracle::run_all()?;
            let mut csv = csv::Writer::from_writer(w.create("csv")?);
            csv.write_record(["check", "value", "tolerance", "passed"])?;
            for c in &checks {
                csv.write_record([
                    c.name.clone(),
                    c.value.to_string(),
                    c.tolerance.to_string(),
                    c.passed().to_string(),
                ])?;
                if !c.passed() {
                    record.diagnostics.push(format!(
                        "{}: value {:e} vs tolerance {:e}",
                        c.name, c.value, c.tolerance
                    ));
                }
            }
            csv.flush()?;
            record.failed_checks = checks.iter().filter(|c| !c.passed()).count();
        }
    }

    w.text("config.toml", &cfg.to_toml_string()?)?;
    record.outputs = file_names(&w.outputs);
    record.outputs.push(format!("{}.bundle.toml", w.name));
    let body = toml::to_string(&record)
        .map_err(|e| DtcError::Config(format!("cannot serialize bundle record: {e}")))?;
    w.text("bundle.toml", &body)?;

    Ok(RunOutcome {
        kind,
        dir,
        outputs: w.outputs,
        missing_cells: record.missing_cells,
        failed_checks: record.failed_checks,
        diagnostics: record.diagnostics,
    })
}

/// Loads and executes a configuration file.
pub fn execute_path(path: &Path, workers: usize) -> Result<RunOutcome> {
    execute(&RunConfig::from_path(path)?, workers)
}
