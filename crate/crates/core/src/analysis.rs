//! Scalar diagnostics computed from trajectories.
//!
//! Quasistatic noise enters as an ensemble: the physical single-spin state is
//! the realization average, so purity-type quantities are lengths of the
//! *averaged* spin vector, not averages of per-realization lengths.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{DtcError, Result};
use crate::floquet::{ProtocolDriver, TrajectoryRecord};
use crate::hilbert::{apply_site_gate_left, spin_vector_of, CMatrix, Model, StateVector};
use crate::spinmodel::{
    derive_seed, sample_disorder, Axis, ChainSpec, DisorderRealization, DriveProtocol,
};

/// Number of `2T` steps averaged by default (200 periods).
pub const DEFAULT_ELL: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeAverage {
    pub value: f64,
    pub ell: usize,
    pub site: usize,
    pub axis: Axis,
}

/// `(1/(ℓ+1)) Σ_{m=0}^{ℓ} ⟨σ_site^axis(2mT)⟩` over post-pulse samples.
pub fn time_averaged_component(
    traj: &TrajectoryRecord,
    site: usize,
    axis: Axis,
    ell: usize,
) -> Result<TimeAverage> {
    if site == 0 || site > traj.n_sites {
        return Err(DtcError::SiteOutOfRange {
            site,
            n_sites: traj.n_sites,
        });
    }
    let values: Vec<f64> = traj
        .stroboscopic_2t()
        .filter(|s| s.period <= 2 * ell)
        .map(|s| s.spins[site - 1][axis.index()])
        .collect();
    if values.len() != ell + 1 {
        return Err(DtcError::InsufficientSamples {
            needed: ell + 1,
            available: values.len(),
        });
    }
    let value = values.iter().sum::<f64>() / (ell + 1) as f64;
    Ok(TimeAverage {
        value,
        ell,
        site,
        axis,
    })
}

fn length(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Spin-vector length of `site` at every sample of one trajectory.
pub fn end_spin_purity(traj: &TrajectoryRecord, site: usize) -> Result<Vec<f64>> {
    traj.samples
        .iter()
        .map(|s| {
            s.spin(site).map(length).ok_or(DtcError::SiteOutOfRange {
                site,
                n_sites: traj.n_sites,
            })
        })
        .collect()
}

/// Realization-averaged spin vector of `site` at every sample. All
/// trajectories must share the same sample layout.
pub fn ensemble_spin_vectors(trajs: &[TrajectoryRecord], site: usize) -> Result<Vec<[f64; 3]>> {
    let first = trajs.first().ok_or(DtcError::InsufficientSamples {
        needed: 1,
        available: 0,
    })?;
    if site == 0 || site > first.n_sites {
        return Err(DtcError::SiteOutOfRange {
            site,
            n_sites: first.n_sites,
        });
    }
    let mut acc = vec![[0.0; 3]; first.samples.len()];
    for t in trajs {
        if t.samples.len() != acc.len() {
            return Err(DtcError::Mismatch(
                "trajectories have different sample layouts".into(),
            ));
        }
        for (a, s) in acc.iter_mut().zip(&t.samples) {
            for c in 0..3 {
                a[c] += s.spins[site - 1][c];
            }
        }
    }
    let r = trajs.len() as f64;
    Ok(acc
        .into_iter()
        .map(|a| [a[0] / r, a[1] / r, a[2] / r])
        .collect())
}

/// Length of the realization-averaged spin vector at every sample.
pub fn ensemble_purity(trajs: &[TrajectoryRecord], site: usize) -> Result<Vec<f64>> {
    Ok(ensemble_spin_vectors(trajs, site)?
        .into_iter()
        .map(length)
        .collect())
}

/// Initial single-spin states `(θ, χ)` uniform on the Bloch sphere:
/// midpoints in `cos 2θ ∈ [-1, 1]` times equispaced `χ ∈ [0, 2π)`.
pub fn bloch_grid(n_theta: usize, n_chi: usize) -> Vec<(f64, f64)> {
    let mut grid = Vec::with_capacity(n_theta * n_chi);
    for a in 0..n_theta {
        let cos2 = 1.0 - (2 * a + 1) as f64 / n_theta as f64;
        let theta = 0.5 * cos2.clamp(-1.0, 1.0).acos();
        for b in 0..n_chi {
            grid.push((theta, 2.0 * PI * b as f64 / n_chi as f64));
        }
    }
    grid
}

/// Per-realization spin vectors of one site for a batch of initial states.
///
/// `vectors[g * n_periods + (k - 1)]` is the post-pulse vector of initial
/// state `g` after period `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchSeries {
    pub n_states: usize,
    pub n_periods: usize,
    pub vectors: Vec<[f64; 3]>,
}

/// Evolves several initial states under one realization at once (states as
/// matrix columns) and records `site`'s post-pulse spin vector every period.
pub fn evolve_batch(
    model: Model,
    spec: &ChainSpec,
    real: &DisorderRealization,
    protocol: &DriveProtocol,
    initial: &[StateVector],
    n_periods: usize,
    site: usize,
) -> Result<BatchSeries> {
    let n = spec.n_sites;
    if site == 0 || site > n {
        return Err(DtcError::SiteOutOfRange { site, n_sites: n });
    }
    if n_periods == 0 || initial.is_empty() {
        return Err(DtcError::InsufficientSamples {
            needed: 1,
            available: 0,
        });
    }
    if let Some(ev) = protocol.events.iter().find(|e| e.period > n_periods) {
        return Err(DtcError::EventOutOfRange {
            period: ev.period,
            n_periods,
        });
    }
    let dim = spec.dim();
    let g = initial.len();
    let mut states = CMatrix::zeros(dim, g);
    for (j, s) in initial.iter().enumerate() {
        if s.n_sites() != n {
            return Err(DtcError::Mismatch("initial state size".into()));
        }
        states.set_column(j, s.amplitudes());
    }
    let mut driver = ProtocolDriver::new(model, spec, real, protocol)?;
    let mut vectors = vec![[0.0; 3]; g * n_periods];
    for k in 0..n_periods {
        let op = driver.begin_period(k, |gate| {
            for s in 1..=n {
                apply_site_gate_left(&mut states, n, s, gate);
            }
        })?;
        states = op.unitary.matrix() * &states;
        for (j, col) in states.column_iter().enumerate() {
            vectors[j * n_periods + k] = spin_vector_of(col.as_slice(), n, site);
        }
    }
    for (j, col) in states.column_iter().enumerate() {
        let norm: f64 = col.norm();
        if (norm - 1.0).abs() > crate::floquet::NORM_TOLERANCE {
            return Err(DtcError::Numerical(format!(
                "state {j} norm drifted by {:e}",
                norm - 1.0
            )));
        }
    }
    Ok(BatchSeries {
        n_states: g,
        n_periods,
        vectors,
    })
}

/// Accumulates realization batches and reduces them to
/// `mean_g mean_k |⟨v⟩_r(g, k)|` with a jackknife standard error.
#[derive(Debug, Clone)]
pub(crate) struct PurityAccumulator {
    per_realization: Vec<Vec<[f64; 3]>>,
}

impl PurityAccumulator {
    pub fn new() -> Self {
        PurityAccumulator {
            per_realization: Vec::new(),
        }
    }

    pub fn push(&mut self, batch: BatchSeries) {
        self.per_realization.push(batch.vectors);
    }

    fn reduce(sum: &[[f64; 3]], count: f64) -> f64 {
        sum.iter()
            .map(|v| length([v[0] / count, v[1] / count, v[2] / count]))
            .sum::<f64>()
            / sum.len() as f64
    }

    /// Returns `(value, standard error)`; realizations are summed in push order.
    pub fn finish(&self) -> (f64, f64) {
        let r = self.per_realization.len();
        let len = self.per_realization.first().map_or(0, |v| v.len());
        let mut total = vec![[0.0; 3]; len];
        for vs in &self.per_realization {
            for (t, v) in total.iter_mut().zip(vs) {
                for c in 0..3 {
                    t[c] += v[c];
                }
            }
        }
        let value = Self::reduce(&total, r as f64);
        if r < 2 {
            return (value, 0.0);
        }
        let loo: Vec<f64> = self
            .per_realization
            .iter()
            .map(|vs| {
                let sum: Vec<[f64; 3]> = total
                    .iter()
                    .zip(vs)
                    .map(|(t, v)| [t[0] - v[0], t[1] - v[1], t[2] - v[2]])
                    .collect();
                Self::reduce(&sum, (r - 1) as f64)
            })
            .collect();
        let mean = loo.iter().sum::<f64>() / r as f64;
        let var = loo.iter().map(|x| (x - mean).powi(2)).sum::<f64>() * (r - 1) as f64 / r as f64;
        (value, var.sqrt())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurityAverage {
    pub value: f64,
    pub stderr: f64,
    pub grid: Vec<(f64, f64)>,
    pub n_periods: usize,
    pub realizations: usize,
}

/// End-spin purity averaged over product initial states `|ψψ…ψ⟩` drawn
/// uniformly from the Bloch sphere, over `n_periods` post-pulse samples and
/// over the disorder ensemble.
#[allow(clippy::too_many_arguments)]
pub fn bloch_averaged_purity(
    model: Model,
    spec: &ChainSpec,
    protocol: &DriveProtocol,
    n_periods: usize,
    bloch_grid_size: (usize, usize),
    realizations: usize,
    master_seed: u64,
) -> Result<PurityAverage> {
    bloch_purity_cell(
        model,
        spec,
        protocol,
        n_periods,
        bloch_grid_size,
        realizations,
        master_seed,
        0,
    )
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn bloch_purity_cell(
    model: Model,
    spec: &ChainSpec,
    protocol: &DriveProtocol,
    n_periods: usize,
    (n_theta, n_chi): (usize, usize),
    realizations: usize,
    master_seed: u64,
    cell: u64,
) -> Result<PurityAverage> {
    if n_theta < 2 || n_chi < 2 {
        return Err(DtcError::Domain(format!(
            "Bloch grid {n_theta}x{n_chi} needs at least 2 points per angle"
        )));
    }
    if realizations == 0 {
        return Err(DtcError::Domain("at least one realization required".into()));
    }
    spec.validate()?;
    let grid = bloch_grid(n_theta, n_chi);
    let states: Vec<StateVector> = grid
        .iter()
        .map(|&(t, c)| StateVector::product_bloch(spec.n_sites, t, c))
        .collect();
    let mut acc = PurityAccumulator::new();
    for r in 0..realizations {
        let real = sample_disorder(spec, derive_seed(master_seed, cell, r as u64));
        acc.push(evolve_batch(
            model, spec, &real, protocol, &states, n_periods, 1,
        )?);
    }
    let (value, stderr) = acc.finish();
    Ok(PurityAverage {
        value,
        stderr,
        grid,
        n_periods,
        realizations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::{run_protocol, Sample, SampleTag, Sampling};
    use crate::spinmodel::{Geometry, InitialStateSpec};

    fn record(values: &[f64]) -> TrajectoryRecord {
        TrajectoryRecord {
            n_sites: 1,
            sampling: Sampling::Stroboscopic2T,
            samples: values
                .iter()
                .enumerate()
                .map(|(m, &z)| Sample {
                    period: 2 * m,
                    tag: SampleTag::PostPulse,
                    time: (2 * m) as f64,
                    spins: vec![[0.0, 0.0, z]],
                })
                .collect(),
            max_norm_error: 0.0,
        }
    }

    #[test]
    fn constant_samples_average_to_one() {
        let t = record(&[1.0; 101]);
        let avg = time_averaged_component(&t, 1, Axis::Z, 100).unwrap();
        assert_eq!(avg.value, 1.0);
        assert!(matches!(
            time_averaged_component(&t, 1, Axis::Z, 101),
            Err(DtcError::InsufficientSamples {
                needed: 102,
                available: 101
            })
        ));
        let short = time_averaged_component(&t, 1, Axis::Z, 3).unwrap();
        assert_eq!(short.value, 1.0);
    }

    #[test]
    fn exact_return_averages_to_one() {
        let spec = ChainSpec {
            n_sites: 4,
            geometry: Geometry::OpenChain,
            j_mean: 1.1,
            j_width: 0.0,
            field_mean: [0.0, 0.0, 0.2],
            field_width: [0.0, 0.0, 0.6],
        };
        let real = sample_disorder(&spec, 4);
        let traj = run_protocol(
            Model::Ising,
            &spec,
            &real,
            &DriveProtocol::floquet_only(0.0),
            &InitialStateSpec::neel(4),
            200,
            Sampling::Stroboscopic2T,
        )
        .unwrap();
        let avg = time_averaged_component(&traj, 1, Axis::Z, DEFAULT_ELL).unwrap();
        assert!((avg.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn purity_of_product_and_bell() {
        let t = record(&[1.0, -1.0, 0.5]);
        assert_eq!(end_spin_purity(&t, 1).unwrap(), vec![1.0, 1.0, 0.5]);
        // two opposite pure realizations average to a fully mixed spin
        let mut flipped = t.clone();
        for s in &mut flipped.samples {
            s.spins[0][2] = -s.spins[0][2];
        }
        let p = ensemble_purity(&[t, flipped], 1).unwrap();
        assert!(p.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn bloch_grid_is_uniform_on_sphere() {
        let g = bloch_grid(8, 8);
        assert_eq!(g.len(), 64);
        // uniform sphere measure: mean of cos 2θ vanishes, all θ in [0, π/2]
        let mean_cos: f64 = g.iter().map(|(t, _)| (2.0 * t).cos()).sum::<f64>() / 64.0;
        assert!(mean_cos.abs() < 1e-12);
        assert!(g
            .iter()
            .all(|&(t, c)| (0.0..=PI / 2.0).contains(&t) && (0.0..2.0 * PI).contains(&c)));
    }

    #[test]
    fn free_spins_with_perfect_pulses_stay_pure() {
        let spec = ChainSpec {
            n_sites: 4,
            geometry: Geometry::OpenChain,
            j_mean: 0.0,
            j_width: 0.0,
            field_mean: [0.0, 0.0, 0.3],
            field_width: [0.0; 3],
        };
        let p = DriveProtocol::floquet_only(0.0).with_h2i(4, Axis::Z);
        let avg = bloch_averaged_purity(Model::Heisenberg, &spec, &p, 20, (3, 3), 2, 1).unwrap();
        assert!((avg.value - 1.0).abs() < 1e-10, "{}", avg.value);
        assert!(avg.stderr < 1e-10);
        assert!(bloch_averaged_purity(Model::Heisenberg, &spec, &p, 20, (1, 3), 2, 1).is_err());
    }

    #[test]
    fn batch_matches_single_runs() {
        let spec = ChainSpec {
            n_sites: 3,
            geometry: Geometry::OpenChain,
            j_mean: 0.7,
            j_width: 0.1,
            field_mean: [0.0, 0.0, 0.2],
            field_width: [0.3, 0.3, 0.3],
        };
        let real = sample_disorder(&spec, 6);
        let p = DriveProtocol::floquet_only(0.1).with_h2i(4, Axis::Z);
        let inits = [(0.3, 1.0), (1.2, 4.0)];
        let states: Vec<StateVector> = inits
            .iter()
            .map(|&(t, c)| StateVector::product_bloch(3, t, c))
            .collect();
        let batch = evolve_batch(Model::Heisenberg, &spec, &real, &p, &states, 6, 1).unwrap();
        for (g, &(theta, chi)) in inits.iter().enumerate() {
            let traj = run_protocol(
                Model::Heisenberg,
                &spec,
                &real,
                &p,
                &InitialStateSpec::ProductBloch { theta, chi },
                6,
                Sampling::EveryPeriod,
            )
            .unwrap();
            for (k, s) in traj.post_pulse().skip(1).enumerate() {
                let b = batch.vectors[g * 6 + k];
                for c in 0..3 {
                    assert!((b[c] - s.spins[0][c]).abs() < 1e-12);
                }
            }
        }
    }
}
