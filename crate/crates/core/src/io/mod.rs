//! Run configuration, trace execution and result emission.
//!
//! A run is described by a TOML document holding exactly one job table
//! (`[sweep]`, `[trace]`, `[protocol]`, `[purity]` or `[verify]`) and an
//! optional `[output]` table.

pub mod bundle;
pub mod svg;
pub mod table;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::ensemble_spin_vectors;
use crate::error::{DtcError, Result};
use crate::floquet::{run_protocol, SampleTag, Sampling};
use crate::hilbert::Model;
use crate::spinmodel::{derive_seed, sample_disorder, ChainSpec, DriveProtocol, InitialStateSpec};
use crate::sweep::{Observable, SweepPlan};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Svg,
    #[default]
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn svg(self) -> bool {
        matches!(self, OutputFormat::Svg | OutputFormat::Both)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    /// File stem for every output of the run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

fn default_one() -> usize {
    1
}

fn default_sampling() -> Sampling {
    Sampling::EveryPeriod
}

/// A single disorder-averaged time trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceRequest {
    pub model: Model,
    pub chain: ChainSpec,
    pub protocol: DriveProtocol,
    pub initial: InitialStateSpec,
    pub n_periods: usize,
    #[serde(default = "default_sampling")]
    pub sampling: Sampling,
    #[serde(default = "default_one")]
    pub realizations: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Sites to record; every site when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sites: Option<Vec<usize>>,
}

impl TraceRequest {
    pub fn sites(&self) -> Vec<usize> {
        self.sites
            .clone()
            .unwrap_or_else(|| (1..=self.chain.n_sites).collect())
    }

    pub fn validate(&self) -> Result<()> {
        self.chain.validate()?;
        self.protocol.validate(self.chain.n_sites)?;
        self.initial.validate(self.chain.n_sites)?;
        if self.n_periods == 0 {
            return Err(DtcError::Config("n_periods must be at least 1".into()));
        }
        if self.realizations == 0 {
            return Err(DtcError::Config("realizations must be at least 1".into()));
        }
        if let Some(&site) = self
            .sites()
            .iter()
            .find(|&&s| s == 0 || s > self.chain.n_sites)
        {
            return Err(DtcError::SiteOutOfRange {
                site,
                n_sites: self.chain.n_sites,
            });
        }
        if let Some(ev) = self
            .protocol
            .events
            .iter()
            .find(|e| e.period > self.n_periods)
        {
            return Err(DtcError::EventOutOfRange {
                period: ev.period,
                n_periods: self.n_periods,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyRequest {}

/// One row of a trace: the realization-averaged spin vector of one site.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub period: usize,
    pub tag: SampleTag,
    pub time: f64,
    pub site: usize,
    pub vector: [f64; 3],
}

impl TraceRow {
    pub fn length(&self) -> f64 {
        let [x, y, z] = self.vector;
        (x * x + y * y + z * z).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceResult {
    pub rows: Vec<TraceRow>,
    pub realizations: usize,
    pub max_norm_error: f64,
}

impl TraceResult {
    pub fn site_rows(&self, site: usize) -> impl Iterator<Item = &TraceRow> {
        self.rows.iter().filter(move |r| r.site == site)
    }
}

pub fn tag_label(tag: SampleTag) -> String {
    match tag {
        SampleTag::PostPulse => "post".into(),
        SampleTag::PrePulse => "pre".into(),
        SampleTag::Segment(k) => format!("segment{k}"),
    }
}

pub fn run_trace(req: &TraceRequest) -> Result<TraceResult> {
    req.validate()?;
    let mut trajs = Vec::with_capacity(req.realizations);
    for r in 0..req.realizations {
        let real = sample_disorder(&req.chain, derive_seed(req.master_seed, 0, r as u64));
        trajs.push(run_protocol(
            req.model,
            &req.chain,
            &real,
            &req.protocol,
            &req.initial,
            req.n_periods,
            req.sampling,
        )?);
    }
    let max_norm_error = trajs.iter().map(|t| t.max_norm_error).fold(0.0, f64::max);
    let sites = req.sites();
    let per_site: Vec<Vec<[f64; 3]>> = sites
        .iter()
        .map(|&s| ensemble_spin_vectors(&trajs, s))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(per_site.len() * trajs[0].samples.len());
    for (i, sample) in trajs[0].samples.iter().enumerate() {
        for (k, &site) in sites.iter().enumerate() {
            rows.push(TraceRow {
                period: sample.period,
                tag: sample.tag,
                time: sample.time,
                site,
                vector: per_site[k][i],
            });
        }
    }
    Ok(TraceResult {
        rows,
        realizations: req.realizations,
        max_norm_error,
    })
}

/// The job a configuration asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JobKind {
    Sweep,
    Trace,
    Protocol,
    Purity,
    Verify,
}

impl JobKind {
    pub fn name(self) -> &'static str {
        match self {
            JobKind::Sweep => "sweep",
            JobKind::Trace => "trace",
            JobKind::Protocol => "protocol",
            JobKind::Purity => "purity",
            JobKind::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub output: OutputOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepPlan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceRequest>,
    /// A trace whose protocol carries timed events (axis switching).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<TraceRequest>,
    /// A sweep whose observable is the Bloch-averaged purity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub purity: Option<SweepPlan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyRequest>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| DtcError::Config(e.to_string()))?;
        cfg.kind()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| DtcError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            DtcError::Config(msg) => DtcError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| DtcError::Config(format!("cannot serialize config: {e}")))
    }

    pub fn kind(&self) -> Result<JobKind> {
        let present: Vec<JobKind> = [
            (self.sweep.is_some(), JobKind::Sweep),
            (self.trace.is_some(), JobKind::Trace),
            (self.protocol.is_some(), JobKind::Protocol),
            (self.purity.is_some(), JobKind::Purity),
            (self.verify.is_some(), JobKind::Verify),
        ]
        .into_iter()
        .filter_map(|(p, k)| p.then_some(k))
        .collect();
        match present.as_slice() {
            [k] => Ok(*k),
            [] => Err(DtcError::Config(
                "config needs one of [sweep], [trace], [protocol], [purity], [verify]".into(),
            )),
            _ => Err(DtcError::Config(format!(
                "config holds several jobs: {}",
                present
                    .iter()
                    .map(|k| k.name())
                    .collect::<Vec<_>>()
                    .join(", ")
            ))),
        }
    }

    /// Schema checks beyond parsing.
    pub fn validate(&self) -> Result<()> {
        match self.kind()? {
            JobKind::Sweep => self.sweep.as_ref().expect("kind checked").validate(),
            JobKind::Purity => {
                let plan = self.purity.as_ref().expect("kind checked");
                if !matches!(plan.observable, Observable::BlochPurity { .. }) {
                    return Err(DtcError::Config(
                        "[purity] needs observable kind = \"bloch_purity\"".into(),
                    ));
                }
                plan.validate()
            }
            JobKind::Trace => self.trace.as_ref().expect("kind checked").validate(),
            JobKind::Protocol => self.protocol.as_ref().expect("kind checked").validate(),
            JobKind::Verify => Ok(()),
        }
    }

    pub fn plan_mut(&mut self) -> Option<&mut SweepPlan> {
        self.sweep.as_mut().or(self.purity.as_mut())
    }

    pub fn trace_mut(&mut self) -> Option<&mut TraceRequest> {
        self.trace.as_mut().or(self.protocol.as_mut())
    }
}
