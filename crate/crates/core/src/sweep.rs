//! Disorder-averaged parameter sweeps ("phase diagrams").
//!
//! Cells run in parallel on a private rayon pool; realizations inside a cell
//! run sequentially and are reduced in index order, so the result does not
//! depend on the number of workers.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    bloch_purity_cell, evolve_batch, time_averaged_component, PurityAccumulator, DEFAULT_ELL,
};
use crate::error::{DtcError, Result};
use crate::floquet::{run_protocol, Sampling};
use crate::hilbert::{Model, StateVector};
use crate::spinmodel::{
    derive_seed, sample_disorder, Axis, ChainSpec, DriveProtocol, InitialStateSpec, MAX_SITES,
};

/// Value above which a cell counts as time-crystalline.
pub const AREA_THRESHOLD: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    JMean,
    /// Floquet pulse error ε.
    Epsilon,
    JWidth,
    FieldWidthX,
    FieldWidthY,
    FieldWidthZ,
    H2iCount,
    NSites,
}

impl SweepParam {
    pub const ALL: [SweepParam; 8] = [
        SweepParam::JMean,
        SweepParam::Epsilon,
        SweepParam::JWidth,
        SweepParam::FieldWidthX,
        SweepParam::FieldWidthY,
        SweepParam::FieldWidthZ,
        SweepParam::H2iCount,
        SweepParam::NSites,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::JMean => "j_mean",
            SweepParam::Epsilon => "epsilon",
            SweepParam::JWidth => "j_width",
            SweepParam::FieldWidthX => "field_width_x",
            SweepParam::FieldWidthY => "field_width_y",
            SweepParam::FieldWidthZ => "field_width_z",
            SweepParam::H2iCount => "h2i_count",
            SweepParam::NSites => "n_sites",
        }
    }

    pub fn is_integral(self) -> bool {
        matches!(self, SweepParam::H2iCount | SweepParam::NSites)
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl GridAxis {
    /// `count` evenly spaced values from `lo` to `hi` inclusive.
    pub fn linspace(param: SweepParam, lo: f64, hi: f64, count: usize) -> Self {
        let values = match count {
            0 => Vec::new(),
            1 => vec![lo],
            _ => (0..count)
                .map(|i| {
                    let t = i as f64 / (count - 1) as f64;
                    lo * (1.0 - t) + hi * t
                })
                .collect(),
        };
        GridAxis { param, values }
    }

    pub fn single(param: SweepParam, value: f64) -> Self {
        GridAxis {
            param,
            values: vec![value],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same range, new point count.
    pub fn resampled(&self, count: usize) -> Self {
        match (self.values.first(), self.values.last()) {
            (Some(&lo), Some(&hi)) => GridAxis::linspace(self.param, lo, hi, count),
            _ => self.clone(),
        }
    }

    fn validate(&self, which: &str) -> Result<()> {
        if self.values.is_empty() {
            return Err(DtcError::InvalidPlan(format!("{which} grid is empty")));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(DtcError::InvalidPlan(format!(
                "{which} grid has non-finite values"
            )));
        }
        let increasing = self.values.windows(2).all(|w| w[1] > w[0]);
        let decreasing = self.values.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(DtcError::InvalidPlan(format!(
                "{which} grid must be strictly monotone"
            )));
        }
        if self.param.is_integral() && self.values.iter().any(|v| v.fract() != 0.0 || *v < 0.0) {
            return Err(DtcError::InvalidPlan(format!(
                "{which} grid for {} must hold non-negative integers",
                self.param
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Observable {
    /// `⟨⟨σ_site^z⟩⟩`: time average over `t = 2mT`, then disorder mean.
    TimeAverageZ {
        site: usize,
    },
    TimeAverageX {
        site: usize,
    },
    /// Length of the disorder-averaged spin vector, averaged over every
    /// post-pulse period.
    MeanEndPurity {
        site: usize,
    },
    /// [`MeanEndPurity`](Observable::MeanEndPurity) of site 1, further
    /// averaged over product initial states on a Bloch-sphere grid. The
    /// plan's initial state is ignored.
    BlochPurity {
        n_theta: usize,
        n_chi: usize,
    },
}

impl Observable {
    pub fn site(self) -> usize {
        match self {
            Observable::TimeAverageZ { site }
            | Observable::TimeAverageX { site }
            | Observable::MeanEndPurity { site } => site,
            Observable::BlochPurity { .. } => 1,
        }
    }

    /// Closed interval every cell value must lie in.
    pub fn range(self) -> (f64, f64) {
        match self {
            Observable::TimeAverageZ { .. } | Observable::TimeAverageX { .. } => (-1.0, 1.0),
            _ => (0.0, 1.0),
        }
    }

    pub fn label(self) -> String {
        match self {
            Observable::TimeAverageZ { site } => format!("time-averaged sigma_z, site {site}"),
            Observable::TimeAverageX { site } => format!("time-averaged sigma_x, site {site}"),
            Observable::MeanEndPurity { site } => format!("spin-vector length, site {site}"),
            Observable::BlochPurity { n_theta, n_chi } => {
                format!("Bloch-averaged purity ({n_theta}x{n_chi} states)")
            }
        }
    }
}

fn default_ell() -> usize {
    DEFAULT_ELL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub model: Model,
    pub chain: ChainSpec,
    pub protocol: DriveProtocol,
    pub initial: InitialStateSpec,
    pub x_axis: GridAxis,
    pub y_axis: GridAxis,
    pub realizations: usize,
    pub master_seed: u64,
    pub observable: Observable,
    /// Runs last `2ℓ` periods.
    #[serde(default = "default_ell")]
    pub ell: usize,
    /// When set, `epsilon` also sets the H2I pulse error.
    #[serde(default)]
    pub h2i_error_follows_epsilon: bool,
}

/// Fully resolved inputs of one grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellConfig {
    pub chain: ChainSpec,
    pub protocol: DriveProtocol,
    pub initial: InitialStateSpec,
}

impl SweepPlan {
    pub fn n_cells(&self) -> usize {
        self.x_axis.len() * self.y_axis.len()
    }

    pub fn n_periods(&self) -> usize {
        2 * self.ell
    }

    /// Cell index `iy·|x| + ix`; also the seed stream of the cell.
    pub fn cell_index(&self, ix: usize, iy: usize) -> usize {
        iy * self.x_axis.len() + ix
    }

    pub fn cell_config(&self, ix: usize, iy: usize) -> Result<CellConfig> {
        let mut cfg = CellConfig {
            chain: self.chain.clone(),
            protocol: self.protocol.clone(),
            initial: self.initial.clone(),
        };
        for (axis, i) in [(&self.x_axis, ix), (&self.y_axis, iy)] {
            let v = *axis.values.get(i).ok_or_else(|| {
                DtcError::InvalidPlan(format!("grid index {i} out of range for {}", axis.param))
            })?;
            self.apply(&mut cfg, axis.param, v);
        }
        cfg.chain.validate()?;
        cfg.protocol.validate(cfg.chain.n_sites)?;
        cfg.initial.validate(cfg.chain.n_sites)?;
        let site = self.observable.site();
        if site == 0 || site > cfg.chain.n_sites {
            return Err(DtcError::SiteOutOfRange {
                site,
                n_sites: cfg.chain.n_sites,
            });
        }
        Ok(cfg)
    }

    fn apply(&self, cfg: &mut CellConfig, param: SweepParam, v: f64) {
        match param {
            SweepParam::JMean => cfg.chain.j_mean = v,
            SweepParam::Epsilon => {
                cfg.protocol.floquet_error = v;
                if self.h2i_error_follows_epsilon {
                    cfg.protocol.h2i_error = v;
                }
            }
            SweepParam::JWidth => cfg.chain.j_width = v,
            SweepParam::FieldWidthX => cfg.chain.field_width[0] = v,
            SweepParam::FieldWidthY => cfg.chain.field_width[1] = v,
            SweepParam::FieldWidthZ => cfg.chain.field_width[2] = v,
            SweepParam::H2iCount => cfg.protocol.h2i_count = v as usize,
            SweepParam::NSites => {
                let n = v as usize;
                cfg.chain.n_sites = n;
                cfg.initial = cfg.initial.resized(n);
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.x_axis.validate("x")?;
        self.y_axis.validate("y")?;
        if self.x_axis.param == self.y_axis.param && self.x_axis.len() * self.y_axis.len() > 1 {
            return Err(DtcError::InvalidPlan(format!(
                "x and y both sweep {}",
                self.x_axis.param
            )));
        }
        if self.realizations == 0 {
            return Err(DtcError::InvalidPlan(
                "realizations must be at least 1".into(),
            ));
        }
        if self.ell == 0 {
            return Err(DtcError::InvalidPlan("ell must be at least 1".into()));
        }
        if let Observable::BlochPurity { n_theta, n_chi } = self.observable {
            if n_theta < 2 || n_chi < 2 {
                return Err(DtcError::InvalidPlan(
                    "Bloch grid needs at least 2x2 states".into(),
                ));
            }
        }
        for axis in [&self.x_axis, &self.y_axis] {
            if axis.param == SweepParam::NSites {
                if let Some(&v) = axis
                    .values
                    .iter()
                    .find(|&&v| v < 1.0 || v > MAX_SITES as f64)
                {
                    return Err(DtcError::InvalidPlan(format!(
                        "n_sites value {v} outside 1..={MAX_SITES}"
                    )));
                }
            }
        }
        for iy in 0..self.y_axis.len() {
            for ix in 0..self.x_axis.len() {
                self.cell_config(ix, iy)
                    .map_err(|e| DtcError::InvalidPlan(format!("cell ({ix}, {iy}): {e}")))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellDiagnostic {
    pub x_index: usize,
    pub y_index: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub plan: SweepPlan,
    pub master_seed: u64,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagram {
    pub x_param: SweepParam,
    pub x_values: Vec<f64>,
    pub y_param: SweepParam,
    pub y_values: Vec<f64>,
    /// Row-major, `values[iy·|x| + ix]`; `None` marks a failed cell.
    pub values: Vec<Option<f64>>,
    pub stderr: Vec<Option<f64>>,
    pub n_realizations: usize,
    pub diagnostics: Vec<CellDiagnostic>,
    pub provenance: Provenance,
}

impl PhaseDiagram {
    pub fn value(&self, ix: usize, iy: usize) -> Option<f64> {
        self.values[iy * self.x_values.len() + ix]
    }

    pub fn stderr_at(&self, ix: usize, iy: usize) -> Option<f64> {
        self.stderr[iy * self.x_values.len() + ix]
    }

    pub fn missing_cells(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    /// Indices of the grid point nearest to `(x, y)`.
    pub fn nearest(&self, x: f64, y: f64) -> (usize, usize) {
        let near = |vals: &[f64], t: f64| {
            vals.iter()
                .enumerate()
                .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
                .map_or(0, |(i, _)| i)
        };
        (near(&self.x_values, x), near(&self.y_values, y))
    }

    /// Fraction of cells above `threshold`; failed cells count as below.
    pub fn area_fraction(&self, threshold: f64) -> f64 {
        let above = self
            .values
            .iter()
            .filter(|v| v.is_some_and(|x| x > threshold))
            .count();
        above as f64 / self.values.len() as f64
    }

    /// `(x, y, value)` over every cell, row-major.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, Option<f64>)> + '_ {
        self.y_values.iter().enumerate().flat_map(move |(iy, &y)| {
            self.x_values
                .iter()
                .enumerate()
                .map(move |(ix, &x)| (x, y, self.value(ix, iy)))
        })
    }
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let r = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / r;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r - 1.0);
    (mean, (var / r).sqrt())
}

/// Runs one cell: `(value, standard error)`.
pub fn evaluate_cell(plan: &SweepPlan, ix: usize, iy: usize) -> Result<(f64, f64)> {
    let cfg = plan.cell_config(ix, iy)?;
    let cell = plan.cell_index(ix, iy) as u64;
    let n_periods = plan.n_periods();
    let seed = |r: usize| derive_seed(plan.master_seed, cell, r as u64);
    let (value, stderr) = match plan.observable {
        Observable::TimeAverageZ { site } | Observable::TimeAverageX { site } => {
            let axis = if matches!(plan.observable, Observable::TimeAverageZ { .. }) {
                Axis::Z
            } else {
                Axis::X
            };
            let mut per = Vec::with_capacity(plan.realizations);
            for r in 0..plan.realizations {
                let real = sample_disorder(&cfg.chain, seed(r));
                let traj = run_protocol(
                    plan.model,
                    &cfg.chain,
                    &real,
                    &cfg.protocol,
                    &cfg.initial,
                    n_periods,
                    Sampling::Stroboscopic2T,
                )?;
                per.push(time_averaged_component(&traj, site, axis, plan.ell)?.value);
            }
            mean_and_stderr(&per)
        }
        Observable::MeanEndPurity { site } => {
            let psi = StateVector::from_initial(&cfg.initial, cfg.chain.n_sites)?;
            let mut acc = PurityAccumulator::new();
            for r in 0..plan.realizations {
                let real = sample_disorder(&cfg.chain, seed(r));
                acc.push(evolve_batch(
                    plan.model,
                    &cfg.chain,
                    &real,
                    &cfg.protocol,
                    std::slice::from_ref(&psi),
                    n_periods,
                    site,
                )?);
            }
            acc.finish()
        }
        Observable::BlochPurity { n_theta, n_chi } => {
            let p = bloch_purity_cell(
                plan.model,
                &cfg.chain,
                &cfg.protocol,
                n_periods,
                (n_theta, n_chi),
                plan.realizations,
                plan.master_seed,
                cell,
            )?;
            (p.value, p.stderr)
        }
    };
    if !value.is_finite() {
        return Err(DtcError::Numerical(format!("cell value {value}")));
    }
    let (lo, hi) = plan.observable.range();
    let slack = 1e-9;
    if value < lo - slack || value > hi + slack {
        return Err(DtcError::Numerical(format!(
            "cell value {value} outside [{lo}, {hi}]"
        )));
    }
    // roundoff overshoot within the slack is clamped back into range
    Ok((value.clamp(lo, hi), stderr))
}

/// Evaluates every cell of `plan` on `workers` threads (0 = rayon default).
pub fn run_sweep(plan: &SweepPlan, workers: usize) -> Result<PhaseDiagram> {
    plan.validate()?;
    let nx = plan.x_axis.len();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| DtcError::Config(format!("thread pool: {e}")))?;
    let results: Vec<Result<(f64, f64)>> = pool.install(|| {
        (0..plan.n_cells())
            .into_par_iter()
            .map(|c| evaluate_cell(plan, c % nx, c / nx))
            .collect()
    });
    let mut values = Vec::with_capacity(results.len());
    let mut stderr = Vec::with_capacity(results.len());
    let mut diagnostics = Vec::new();
    for (c, res) in results.into_iter().enumerate() {
        match res {
            Ok((v, s)) => {
                values.push(Some(v));
                stderr.push(Some(s));
            }
            Err(e) => {
                values.push(None);
                stderr.push(None);
                diagnostics.push(CellDiagnostic {
                    x_index: c % nx,
                    y_index: c / nx,
                    message: e.to_string(),
                });
            }
        }
    }
    Ok(PhaseDiagram {
        x_param: plan.x_axis.param,
        x_values: plan.x_axis.values.clone(),
        y_param: plan.y_axis.param,
        y_values: plan.y_axis.values.clone(),
        values,
        stderr,
        n_realizations: plan.realizations,
        diagnostics,
        provenance: Provenance {
            plan: plan.clone(),
            master_seed: plan.master_seed,
            version: crate::VERSION.to_string(),
        },
    })
}

/// Time-crystal area fraction of `base` for each H2I pulse count.
pub fn h2i_saturation_curve(
    base: &SweepPlan,
    n_values: &[usize],
    workers: usize,
) -> Result<Vec<(usize, f64)>> {
    if n_values.iter().any(|n| n % 2 != 0) {
        return Err(DtcError::InvalidPlan("H2I counts must be even".into()));
    }
    if n_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(DtcError::InvalidPlan("H2I counts must be ascending".into()));
    }
    if [&base.x_axis, &base.y_axis]
        .iter()
        .any(|a| a.param == SweepParam::H2iCount)
    {
        return Err(DtcError::InvalidPlan(
            "base plan already sweeps h2i_count".into(),
        ));
    }
    n_values
        .iter()
        .map(|&n| {
            let mut plan = base.clone();
            plan.protocol.h2i_count = n;
            let diagram = run_sweep(&plan, workers)?;
            Ok((n, diagram.area_fraction(AREA_THRESHOLD)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinmodel::Geometry;

    fn tiny_plan(observable: Observable) -> SweepPlan {
        SweepPlan {
            model: Model::Ising,
            chain: ChainSpec::open(4, 0.6, 0.05, 0.05).unwrap(),
            protocol: DriveProtocol::floquet_only(0.1),
            initial: InitialStateSpec::neel(4),
            x_axis: GridAxis::linspace(SweepParam::JMean, 0.2, 1.0, 3),
            y_axis: GridAxis::linspace(SweepParam::Epsilon, 0.0, 0.2, 2),
            realizations: 3,
            master_seed: 5,
            observable,
            ell: 10,
            h2i_error_follows_epsilon: false,
        }
    }

    #[test]
    fn single_cell_matches_direct_run() {
        let mut plan = tiny_plan(Observable::TimeAverageZ { site: 1 });
        plan.x_axis = GridAxis::single(SweepParam::JMean, 0.6);
        plan.y_axis = GridAxis::single(SweepParam::Epsilon, 0.1);
        plan.realizations = 1;
        let d = run_sweep(&plan, 1).unwrap();
        let real = sample_disorder(&plan.chain, derive_seed(5, 0, 0));
        let traj = run_protocol(
            Model::Ising,
            &plan.chain,
            &real,
            &plan.protocol,
            &plan.initial,
            20,
            Sampling::Stroboscopic2T,
        )
        .unwrap();
        let direct = time_averaged_component(&traj, 1, Axis::Z, 10)
            .unwrap()
            .value;
        assert_eq!(d.value(0, 0), Some(direct));
        assert_eq!(d.stderr_at(0, 0), Some(0.0));
    }

    #[test]
    fn worker_count_does_not_change_results() {
        for obs in [
            Observable::TimeAverageZ { site: 1 },
            Observable::MeanEndPurity { site: 1 },
            Observable::BlochPurity {
                n_theta: 2,
                n_chi: 2,
            },
        ] {
            let plan = tiny_plan(obs);
            let a = run_sweep(&plan, 1).unwrap();
            let b = run_sweep(&plan, 3).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.values.len(), 6);
            assert!(a.diagnostics.is_empty());
        }
    }

    #[test]
    fn row_major_layout() {
        let plan = tiny_plan(Observable::TimeAverageZ { site: 1 });
        let d = run_sweep(&plan, 2).unwrap();
        let cells: Vec<_> = d.cells().map(|(x, y, _)| (x, y)).collect();
        assert_eq!(cells[1], (0.6, 0.0));
        assert_eq!(cells[3], (0.2, 0.2));
        assert_eq!(d.nearest(0.55, 0.19), (1, 1));
    }

    #[test]
    fn plan_validation() {
        let mut plan = tiny_plan(Observable::TimeAverageZ { site: 1 });
        plan.x_axis.values = vec![0.1, 0.1];
        assert!(matches!(plan.validate(), Err(DtcError::InvalidPlan(_))));

        let mut plan = tiny_plan(Observable::TimeAverageZ { site: 5 });
        assert!(plan.validate().is_err());
        plan.observable = Observable::TimeAverageZ { site: 1 };
        plan.y_axis = GridAxis {
            param: SweepParam::H2iCount,
            values: vec![0.0, 3.0],
        };
        assert!(plan.validate().is_err());
        plan.y_axis.values = vec![0.0, 2.5];
        assert!(plan.validate().is_err());
        plan.y_axis.values = vec![0.0, 2.0];
        plan.model = Model::Heisenberg;
        assert!(plan.validate().is_ok());

        let mut plan = tiny_plan(Observable::TimeAverageZ { site: 1 });
        plan.realizations = 0;
        assert!(plan.validate().is_err());
    }

    #[test]
    fn n_sites_axis_resizes_initial_state() {
        let mut plan = tiny_plan(Observable::TimeAverageZ { site: 1 });
        plan.x_axis = GridAxis::linspace(SweepParam::NSites, 2.0, 5.0, 4);
        let cfg = plan.cell_config(3, 0).unwrap();
        assert_eq!(cfg.chain.n_sites, 5);
        assert_eq!(cfg.initial, InitialStateSpec::neel(5));
        let d = run_sweep(&plan, 2).unwrap();
        assert_eq!(d.missing_cells(), 0);
    }

    #[test]
    fn epsilon_can_drive_h2i_error() {
        let mut plan = tiny_plan(Observable::TimeAverageZ { site: 1 });
        plan.h2i_error_follows_epsilon = true;
        let cfg = plan.cell_config(0, 1).unwrap();
        assert_eq!(cfg.protocol.h2i_error, 0.2);
        assert_eq!(cfg.protocol.floquet_error, 0.2);
    }

    #[test]
    fn area_fraction_counts_missing_as_below() {
        let plan = tiny_plan(Observable::TimeAverageZ { site: 1 });
        let mut d = run_sweep(&plan, 1).unwrap();
        d.values = vec![
            Some(0.95),
            Some(0.5),
            None,
            Some(0.91),
            Some(0.9),
            Some(-1.0),
        ];
        assert!((d.area_fraction(AREA_THRESHOLD) - 2.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn saturation_curve_rejects_bad_counts() {
        let mut plan = tiny_plan(Observable::TimeAverageZ { site: 1 });
        plan.model = Model::Heisenberg;
        assert!(h2i_saturation_curve(&plan, &[2, 3], 1).is_err());
        assert!(h2i_saturation_curve(&plan, &[4, 2], 1).is_err());
        plan.chain.geometry = Geometry::OpenChain;
        let curve = h2i_saturation_curve(&plan, &[0, 2], 1).unwrap();
        assert_eq!(curve.len(), 2);
    }
}
