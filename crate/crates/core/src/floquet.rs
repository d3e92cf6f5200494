//! Pulse unitaries, one-period (Floquet) operators and protocol execution.
//!
//! Sign conventions: a δ-kick `-(π/2 - ε)·δ(t - kT)·Σσ^α` integrates to
//! `exp(+i(π/2 - ε)Σσ^α)`. With `π/2` and no error that is `∏(iσ^α)`, a
//! perfect global π flip up to a global phase.
//!
//! Time order within one period: `n` H2I pulses interleaved with free
//! evolution for `T/n` (evolve, `P⁻`, evolve, `P⁺`, repeated `n/2` times),
//! then the Floquet pulse at `t = kT`. The operator is therefore
//! `F · [P⁺ U_H(T/n) P⁻ U_H(T/n)]^{n/2}`, or `F · U_H(T)` without H2I pulses.
//! H2I pulse errors follow [`H2iErrorSense`].

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{DtcError, Result};
use crate::hilbert::{
    apply_site_gate_left, build_hamiltonian, propagator, site_rotation, spin_vector, CMatrix,
    HermitianOperator, Model, StateVector, UnitaryOperator, C64,
};
use crate::spinmodel::{
    Axis, ChainSpec, DisorderRealization, DriveProtocol, EventAction, H2iErrorSense,
    InitialStateSpec,
};

/// Tolerated drift of the state norm before a run is declared failed.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct PulseUnitary {
    pub unitary: UnitaryOperator,
    pub axis: Axis,
    pub nominal_angle: f64,
    pub error: f64,
    pub targets: Vec<usize>,
    /// Set when the target list was empty and the pulse is the identity.
    pub empty_targets: bool,
}

impl PulseUnitary {
    pub fn net_angle(&self) -> f64 {
        self.nominal_angle - self.error
    }
}

/// `exp(+i·(nominal_angle - error)·Σ_{targets} σ^axis)`.
pub fn global_pulse(
    n_sites: usize,
    axis: Axis,
    nominal_angle: f64,
    error: f64,
    targets: &[usize],
) -> Result<PulseUnitary> {
    if let Some(&site) = targets.iter().find(|&&s| s == 0 || s > n_sites) {
        return Err(DtcError::SiteOutOfRange { site, n_sites });
    }
    let mut m = UnitaryOperator::identity(n_sites).into_matrix();
    let gate = site_rotation(axis, nominal_angle - error);
    for &site in targets {
        apply_site_gate_left(&mut m, n_sites, site, &gate);
    }
    Ok(PulseUnitary {
        unitary: UnitaryOperator::from_matrix_unchecked(n_sites, m),
        axis,
        nominal_angle,
        error,
        targets: targets.to_vec(),
        empty_targets: targets.is_empty(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentKind {
    Evolution,
    H2iPulse,
    FloquetPulse,
}

#[derive(Debug, Clone)]
pub struct Segment {
    pub kind: SegmentKind,
    pub op: Arc<UnitaryOperator>,
    /// Fraction of the period spent in this segment (0 for pulses).
    pub duration: f64,
}

/// One full drive period, stored both as a single unitary and as its
/// time-ordered segments.
#[derive(Debug, Clone)]
pub struct PeriodOperator {
    pub unitary: UnitaryOperator,
    /// Everything before the Floquet pulse.
    pub interaction: UnitaryOperator,
    pub floquet: Arc<UnitaryOperator>,
    /// Segments in time order (first applied first).
    pub segments: Vec<Segment>,
    pub floquet_axis: Axis,
    pub h2i_axis: Axis,
}

impl PeriodOperator {
    /// Ordered product of the segments, computed one factor at a time.
    pub fn segment_product(&self) -> UnitaryOperator {
        let n = self.unitary.n_sites();
        self.segments
            .iter()
            .fold(UnitaryOperator::identity(n), |acc, seg| {
                seg.op.then_after(&acc)
            })
    }
}

/// Holds the realization-specific pieces (Hamiltonian, free-evolution step)
/// so period operators for different pulse axes share one eigendecomposition.
#[derive(Debug, Clone)]
pub struct PeriodBuilder {
    n_sites: usize,
    hamiltonian: HermitianOperator,
    step: Arc<UnitaryOperator>,
    protocol: DriveProtocol,
    targets: Vec<usize>,
}

impl PeriodBuilder {
    pub fn new(
        model: Model,
        spec: &ChainSpec,
        real: &DisorderRealization,
        protocol: &DriveProtocol,
    ) -> Result<Self> {
        protocol.validate(spec.n_sites)?;
        let hamiltonian = build_hamiltonian(model, spec, real)?;
        let dt = if protocol.h2i_count == 0 {
            1.0
        } else {
            1.0 / protocol.h2i_count as f64
        };
        let step = Arc::new(propagator(&hamiltonian, dt)?);
        Ok(PeriodBuilder {
            n_sites: spec.n_sites,
            hamiltonian,
            step,
            targets: protocol.h2i_target_sites(spec.n_sites),
            protocol: protocol.clone(),
        })
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn protocol(&self) -> &DriveProtocol {
        &self.protocol
    }

    pub fn build(&self, floquet_axis: Axis, h2i_axis: Axis) -> Result<PeriodOperator> {
        let n = self.n_sites;
        let p = &self.protocol;
        let all: Vec<usize> = (1..=n).collect();
        let floquet = if p.floquet_enabled {
            global_pulse(n, floquet_axis, FRAC_PI_2, p.floquet_error, &all)?.unitary
        } else {
            UnitaryOperator::identity(n)
        };
        let floquet = Arc::new(floquet);

        let mut segments = Vec::with_capacity(2 * p.h2i_count + 2);
        let interaction = if p.h2i_count == 0 {
            segments.push(Segment {
                kind: SegmentKind::Evolution,
                op: self.step.clone(),
                duration: 1.0,
            });
            (*self.step).clone()
        } else {
            let angle = FRAC_PI_2 - p.h2i_error;
            let plus_gate = site_rotation(h2i_axis, angle);
            let (minus_nominal, minus_error) = match p.h2i_error_sense {
                H2iErrorSense::Same => (FRAC_PI_2, p.h2i_error),
                H2iErrorSense::Alternating => (-FRAC_PI_2, -p.h2i_error),
            };
            let minus_gate = site_rotation(h2i_axis, minus_nominal - minus_error);
            let plus =
                Arc::new(global_pulse(n, h2i_axis, FRAC_PI_2, p.h2i_error, &self.targets)?.unitary);
            let minus = Arc::new(
                global_pulse(n, h2i_axis, minus_nominal, minus_error, &self.targets)?.unitary,
            );
            let dt = 1.0 / p.h2i_count as f64;
            for _ in 0..p.h2i_count / 2 {
                for (kind, op, duration) in [
                    (SegmentKind::Evolution, &self.step, dt),
                    (SegmentKind::H2iPulse, &minus, 0.0),
                    (SegmentKind::Evolution, &self.step, dt),
                    (SegmentKind::H2iPulse, &plus, 0.0),
                ] {
                    segments.push(Segment {
                        kind,
                        op: op.clone(),
                        duration,
                    });
                }
            }
            // block = P⁺ · U · P⁻ · U, with the local pulses applied row-wise
            let mut block: CMatrix = self.step.matrix().clone();
            self.apply_targets(&mut block, &minus_gate);
            let mut block = self.step.matrix() * block;
            self.apply_targets(&mut block, &plus_gate);
            // squaring amplifies roundoff in long pulse trains
            UnitaryOperator::from_matrix_unchecked(n, block)
                .reunitarized()
                .pow(p.h2i_count / 2)
                .reunitarized()
        };
        segments.push(Segment {
            kind: SegmentKind::FloquetPulse,
            op: floquet.clone(),
            duration: 0.0,
        });
        let unitary = floquet.then_after(&interaction);
        Ok(PeriodOperator {
            unitary,
            interaction,
            floquet,
            segments,
            floquet_axis,
            h2i_axis,
        })
    }

    fn apply_targets(&self, m: &mut CMatrix, gate: &Matrix2<C64>) {
        for &site in &self.targets {
            apply_site_gate_left(m, self.n_sites, site, gate);
        }
    }
}

/// One-period operator for the given pulse axes (the protocol's own axes
/// are ignored in favour of the explicit arguments).
pub fn assemble_period(
    model: Model,
    spec: &ChainSpec,
    real: &DisorderRealization,
    protocol: &DriveProtocol,
    floquet_axis: Axis,
    h2i_axis: Axis,
) -> Result<PeriodOperator> {
    PeriodBuilder::new(model, spec, real, protocol)?.build(floquet_axis, h2i_axis)
}

/// Steps through a protocol period by period, applying timed events and
/// caching one period operator per axis pair.
pub struct ProtocolDriver {
    builder: PeriodBuilder,
    cache: Vec<Arc<PeriodOperator>>,
    floquet_axis: Axis,
    h2i_axis: Axis,
    next_event: usize,
}

impl ProtocolDriver {
    pub fn new(
        model: Model,
        spec: &ChainSpec,
        real: &DisorderRealization,
        protocol: &DriveProtocol,
    ) -> Result<Self> {
        let builder = PeriodBuilder::new(model, spec, real, protocol)?;
        Ok(ProtocolDriver {
            floquet_axis: protocol.floquet_axis,
            h2i_axis: protocol.h2i_axis,
            builder,
            cache: Vec::new(),
            next_event: 0,
        })
    }

    pub fn builder(&self) -> &PeriodBuilder {
        &self.builder
    }

    /// Fires every event scheduled at `period` (in list order), handing each
    /// global rotation's single-site gate to `rotate`, and returns the
    /// operator for the period starting at `t = period·T`.
    ///
    /// Periods must be visited in increasing order.
    pub fn begin_period(
        &mut self,
        period: usize,
        mut rotate: impl FnMut(&Matrix2<C64>),
    ) -> Result<Arc<PeriodOperator>> {
        let events = &self.builder.protocol.events;
        while let Some(ev) = events.get(self.next_event) {
            if ev.period > period {
                break;
            }
            match ev.action {
                EventAction::GlobalRotation { axis, angle } => {
                    rotate(&site_rotation(axis, -angle / 2.0));
                }
                EventAction::SetFloquetAxis { axis } => self.floquet_axis = axis,
                EventAction::SetH2iAxis { axis } => self.h2i_axis = axis,
            }
            self.next_event += 1;
        }
        self.current()
    }

    /// Applies events scheduled exactly at the end of the run.
    pub fn finish(&mut self, period: usize, rotate: impl FnMut(&Matrix2<C64>)) -> Result<()> {
        self.begin_period(period, rotate).map(|_| ())
    }

    fn current(&mut self) -> Result<Arc<PeriodOperator>> {
        let (fa, ha) = (self.floquet_axis, self.h2i_axis);
        if let Some(op) = self
            .cache
            .iter()
            .find(|op| op.floquet_axis == fa && op.h2i_axis == ha)
        {
            return Ok(op.clone());
        }
        let op = Arc::new(self.builder.build(fa, ha)?);
        self.cache.push(op.clone());
        Ok(op)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Post-pulse states at `t = 2mT`.
    Stroboscopic2T,
    /// Pre- and post-pulse states at every `t = kT`.
    EveryPeriod,
    /// Every segment boundary.
    IntraPeriod,
}

/// Position of a sample within the period that ends at `t = period·T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleTag {
    /// After segment `k` (0-based) of the period.
    Segment(usize),
    PrePulse,
    PostPulse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    /// Integer period index `k`; the sample lies in `((k-1)T, kT]`.
    /// The initial state is `(0, PostPulse)`.
    pub period: usize,
    pub tag: SampleTag,
    /// Time in units of T.
    pub time: f64,
    /// `(⟨σˣ⟩, ⟨σʸ⟩, ⟨σᶻ⟩)` for sites 1..=N.
    pub spins: Vec<[f64; 3]>,
}

impl Sample {
    pub fn key(&self) -> (usize, SampleTag) {
        (self.period, self.tag)
    }

    pub fn spin(&self, site: usize) -> Option<[f64; 3]> {
        site.checked_sub(1).and_then(|i| self.spins.get(i)).copied()
    }

    /// Spin-vector length of site 1, the tracked end of the chain.
    pub fn end_length(&self) -> f64 {
        let [x, y, z] = self.spins[0];
        (x * x + y * y + z * z).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub n_sites: usize,
    pub sampling: Sampling,
    pub samples: Vec<Sample>,
    /// Largest `|‖ψ‖ - 1|` seen along the run.
    pub max_norm_error: f64,
}

impl TrajectoryRecord {
    /// Post-pulse samples at `t = 2mT`, in order.
    pub fn stroboscopic_2t(&self) -> impl Iterator<Item = &Sample> {
        self.samples
            .iter()
            .filter(|s| s.tag == SampleTag::PostPulse && s.period % 2 == 0)
    }

    pub fn post_pulse(&self) -> impl Iterator<Item = &Sample> {
        self.samples
            .iter()
            .filter(|s| s.tag == SampleTag::PostPulse)
    }
}

fn snapshot(state: &StateVector, period: usize, tag: SampleTag, time: f64) -> Sample {
    let n = state.n_sites();
    let spins = (1..=n)
        .map(|site| spin_vector(state, site).expect("site in range"))
        .collect();
    Sample {
        period,
        tag,
        time,
        spins,
    }
}

fn check_norm(state: &StateVector, worst: &mut f64, period: usize) -> Result<()> {
    let err = (state.norm() - 1.0).abs();
    *worst = worst.max(err);
    if err > NORM_TOLERANCE || !err.is_finite() {
        return Err(DtcError::Numerical(format!(
            "state norm drifted by {err:e} at period {period}"
        )));
    }
    Ok(())
}

/// Evolves `initial` for `n_periods` and records spin vectors per `sampling`.
#[allow(clippy::too_many_arguments)]
pub fn run_protocol(
    model: Model,
    spec: &ChainSpec,
    real: &DisorderRealization,
    protocol: &DriveProtocol,
    initial: &InitialStateSpec,
    n_periods: usize,
    sampling: Sampling,
) -> Result<TrajectoryRecord> {
    let state = StateVector::from_initial(initial, spec.n_sites)?;
    run_protocol_from(model, spec, real, protocol, state, n_periods, sampling)
}

/// Like [`run_protocol`] but starting from an arbitrary state.
pub fn run_protocol_from(
    model: Model,
    spec: &ChainSpec,
    real: &DisorderRealization,
    protocol: &DriveProtocol,
    mut state: StateVector,
    n_periods: usize,
    sampling: Sampling,
) -> Result<TrajectoryRecord> {
    if n_periods == 0 {
        return Err(DtcError::InvalidProtocol(
            "n_periods must be at least 1".into(),
        ));
    }
    if let Some(ev) = protocol.events.iter().find(|e| e.period > n_periods) {
        return Err(DtcError::EventOutOfRange {
            period: ev.period,
            n_periods,
        });
    }
    let n = spec.n_sites;
    let mut driver = ProtocolDriver::new(model, spec, real, protocol)?;
    let mut samples = vec![snapshot(&state, 0, SampleTag::PostPulse, 0.0)];
    let mut worst = (state.norm() - 1.0).abs();

    let rotate_state = |state: &mut StateVector, gate: &Matrix2<C64>| {
        for site in 1..=n {
            state.apply_site_gate(site, gate).expect("site in range");
        }
    };

    for k in 0..n_periods {
        let mut pending = Vec::new();
        let op = driver.begin_period(k, |g| pending.push(*g))?;
        for g in &pending {
            rotate_state(&mut state, g);
        }
        let end = k + 1;
        match sampling {
            Sampling::Stroboscopic2T => {
                state.apply(&op.unitary);
                if end % 2 == 0 {
                    samples.push(snapshot(&state, end, SampleTag::PostPulse, end as f64));
                }
            }
            Sampling::EveryPeriod => {
                state.apply(&op.interaction);
                samples.push(snapshot(&state, end, SampleTag::PrePulse, end as f64));
                state.apply(&op.floquet);
                samples.push(snapshot(&state, end, SampleTag::PostPulse, end as f64));
            }
            Sampling::IntraPeriod => {
                let last = op.segments.len() - 1;
                let mut t = k as f64;
                for (j, seg) in op.segments.iter().enumerate() {
                    state.apply(&seg.op);
                    t += seg.duration;
                    let tag = if j == last {
                        SampleTag::PostPulse
                    } else if j + 1 == last {
                        SampleTag::PrePulse
                    } else {
                        SampleTag::Segment(j)
                    };
                    let time = if j + 1 >= last { end as f64 } else { t };
                    samples.push(snapshot(&state, end, tag, time));
                }
            }
        }
        check_norm(&state, &mut worst, end)?;
    }
    let mut pending = Vec::new();
    driver.finish(n_periods, |g| pending.push(*g))?;
    for g in &pending {
        rotate_state(&mut state, g);
    }
    Ok(TrajectoryRecord {
        n_sites: n,
        sampling,
        samples,
        max_norm_error: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{distance_up_to_phase, expectation, spectral_norm, I};
    use crate::spinmodel::{sample_disorder, Geometry, ProtocolEvent, SpinPattern};

    fn spec(n: usize, j: f64, h: f64, dh: f64) -> ChainSpec {
        ChainSpec {
            n_sites: n,
            geometry: Geometry::OpenChain,
            j_mean: j,
            j_width: 0.0,
            field_mean: [0.0, 0.0, h],
            field_width: [0.0, 0.0, dh],
        }
    }

    #[test]
    fn h2i_error_sense() {
        let s = spec(2, 0.0, 0.0, 0.0);
        let real = sample_disorder(&s, 1);
        let mut p = DriveProtocol::floquet_only(0.0).with_h2i(2, Axis::Z);
        p.floquet_enabled = false;
        p.h2i_error = 0.2;
        let find = |op: &PeriodOperator| {
            op.segments
                .iter()
                .filter(|seg| seg.kind == SegmentKind::H2iPulse)
                .map(|seg| seg.op.clone())
                .collect::<Vec<_>>()
        };
        let same = assemble_period(Model::Heisenberg, &s, &real, &p, Axis::X, Axis::Z).unwrap();
        let pulses = find(&same);
        assert!((pulses[0].matrix() - pulses[1].matrix()).camax() < 1e-15);
        // no couplings or fields: the period is (P⁺)², relative phase e^{4i(π/2 - e)} on site 1
        let z1 = same.unitary.matrix()[(0, 0)] / same.unitary.matrix()[(2, 2)];
        assert!((z1.arg() + 0.8).abs() < 1e-12);

        p.h2i_error_sense = H2iErrorSense::Alternating;
        let alt = assemble_period(Model::Heisenberg, &s, &real, &p, Axis::X, Axis::Z).unwrap();
        let id = UnitaryOperator::identity(2);
        assert!(distance_up_to_phase(alt.unitary.matrix(), id.matrix()) < 1e-12);
    }

    #[test]
    fn perfect_pi_pulse_phase() {
        let p = global_pulse(1, Axis::X, FRAC_PI_2, 0.0, &[1]).unwrap();
        let mut st = StateVector::basis(1, 0);
        st.apply(&p.unitary);
        assert!(st.amplitudes()[0].norm() < 1e-15);
        assert!((st.amplitudes()[1] - I).norm() < 1e-15);
    }

    #[test]
    fn full_error_is_identity() {
        let p = global_pulse(3, Axis::Y, FRAC_PI_2, FRAC_PI_2, &[1, 2, 3]).unwrap();
        let id = UnitaryOperator::identity(3);
        assert!((p.unitary.matrix() - id.matrix()).camax() < 1e-15);
        let empty = global_pulse(3, Axis::X, FRAC_PI_2, 0.0, &[]).unwrap();
        assert!(empty.empty_targets);
        assert_eq!(empty.unitary, id);
        assert!(global_pulse(3, Axis::X, FRAC_PI_2, 0.0, &[4]).is_err());
    }

    #[test]
    fn imperfect_flip_rotates_by_twice_the_net_angle() {
        let p = global_pulse(4, Axis::X, FRAC_PI_2, 0.1, &[1, 2, 3, 4]).unwrap();
        let mut st = StateVector::basis(4, 0);
        st.apply(&p.unitary);
        for site in 1..=4 {
            let z = expectation(&st, site, Axis::Z).unwrap();
            assert!((z - (-(0.2f64).cos())).abs() < 1e-12, "{z}");
        }
        st.apply(&p.unitary);
        for site in 1..=4 {
            let z = expectation(&st, site, Axis::Z).unwrap();
            assert!((z - 0.4f64.cos()).abs() < 1e-12, "{z}");
        }
    }

    #[test]
    fn segments_multiply_to_period() {
        let s = ChainSpec {
            j_width: 0.2,
            ..spec(4, 0.9, 0.3, 0.4)
        };
        let real = sample_disorder(&s, 5);
        for n in [0, 2, 8, 32] {
            let mut p = DriveProtocol::floquet_only(0.07).with_h2i(n, Axis::Z);
            p.h2i_error = 0.03;
            let op = assemble_period(Model::Heisenberg, &s, &real, &p, Axis::X, Axis::Y).unwrap();
            let seq = op.segment_product();
            assert!(
                (seq.matrix() - op.unitary.matrix()).camax() < 1e-9,
                "n = {n}"
            );
            assert!(op.unitary.unitarity_defect() < 1e-10);
            assert_eq!(op.segments.len(), 2 * n + if n == 0 { 2 } else { 1 });
        }
    }

    #[test]
    fn odd_h2i_count_rejected() {
        let s = spec(4, 1.0, 0.0, 0.0);
        let real = DisorderRealization::mean_of(&s);
        let p = DriveProtocol::floquet_only(0.0).with_h2i(5, Axis::Z);
        assert!(matches!(
            assemble_period(Model::Heisenberg, &s, &real, &p, Axis::X, Axis::Z),
            Err(DtcError::OddH2ICount(5))
        ));
    }

    #[test]
    fn two_h2i_pulses_give_exact_ising_bond() {
        // uniform fields commute with both halves of the H2I pair
        let s = spec(2, 0.83, 0.21, 0.0);
        let real = DisorderRealization::mean_of(&s);
        let p = DriveProtocol::floquet_only(0.0).with_h2i(2, Axis::Z);
        let heis = assemble_period(Model::Heisenberg, &s, &real, &p, Axis::X, Axis::Z).unwrap();
        let ising = assemble_period(
            Model::Ising,
            &s,
            &real,
            &DriveProtocol::floquet_only(0.0),
            Axis::X,
            Axis::Z,
        )
        .unwrap();
        let d = distance_up_to_phase(heis.unitary.matrix(), ising.unitary.matrix());
        assert!(d < 1e-10, "{d}");
    }

    #[test]
    fn free_spins_echo_back() {
        let s = spec(4, 0.0, 0.37, 0.0);
        let real = DisorderRealization::mean_of(&s);
        let op = assemble_period(
            Model::Ising,
            &s,
            &real,
            &DriveProtocol::floquet_only(0.0),
            Axis::X,
            Axis::Z,
        )
        .unwrap();
        let start = StateVector::basis(4, SpinPattern::neel(4).basis_index());
        let mut st = start.clone();
        st.apply(&op.unitary);
        st.apply(&op.unitary);
        assert!((st.inner(&start).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trotter_error_halves() {
        let s = ChainSpec {
            field_width: [0.0, 0.0, 0.3],
            ..spec(4, 0.8, 0.2, 0.0)
        };
        let real = sample_disorder(&s, 11);
        let ising = assemble_period(
            Model::Ising,
            &s,
            &real,
            &DriveProtocol::floquet_only(0.0),
            Axis::X,
            Axis::Z,
        )
        .unwrap();
        let dist = |n: usize| {
            let p = DriveProtocol::floquet_only(0.0).with_h2i(n, Axis::Z);
            let op = assemble_period(Model::Heisenberg, &s, &real, &p, Axis::X, Axis::Z).unwrap();
            spectral_norm(&(op.unitary.matrix() - ising.unitary.matrix()))
        };
        let ratio = dist(64) / dist(128);
        assert!((1.7..=2.3).contains(&ratio), "{ratio}");
    }

    #[test]
    fn exact_ising_return_at_zero_error() {
        let s = ChainSpec {
            j_width: 0.0,
            ..spec(4, 0.7, 0.3, 2.0)
        };
        let real = sample_disorder(&s, 3);
        let traj = run_protocol(
            Model::Ising,
            &s,
            &real,
            &DriveProtocol::floquet_only(0.0),
            &InitialStateSpec::neel(4),
            200,
            Sampling::Stroboscopic2T,
        )
        .unwrap();
        assert_eq!(traj.samples.len(), 101);
        for smp in traj.stroboscopic_2t() {
            assert!((smp.spins[0][2] - 1.0).abs() < 1e-8);
        }
        assert!(traj.max_norm_error < 1e-10);
    }

    #[test]
    fn every_period_alternates() {
        let s = spec(4, 0.6, 0.05, 0.05);
        let real = sample_disorder(&s, 1);
        let traj = run_protocol(
            Model::Ising,
            &s,
            &real,
            &DriveProtocol::floquet_only(0.0),
            &InitialStateSpec::neel(4),
            6,
            Sampling::EveryPeriod,
        )
        .unwrap();
        let post: Vec<f64> = traj.post_pulse().map(|s| s.spins[0][2]).collect();
        assert_eq!(post.len(), 7);
        for (k, z) in post.iter().enumerate() {
            let expected = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((z - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn intra_period_samples_are_ordered() {
        let s = spec(3, 0.4, 0.1, 0.2);
        let real = sample_disorder(&s, 2);
        let p = DriveProtocol::floquet_only(0.1).with_h2i(4, Axis::Z);
        let traj = run_protocol(
            Model::Heisenberg,
            &s,
            &real,
            &p,
            &InitialStateSpec::neel(3),
            3,
            Sampling::IntraPeriod,
        )
        .unwrap();
        assert_eq!(traj.samples.len(), 1 + 3 * 9);
        for w in traj.samples.windows(2) {
            assert!(w[0].key() < w[1].key());
            assert!(w[0].time <= w[1].time);
        }
        // the last intra-period sample agrees with a stroboscopic run
        let strobe = run_protocol(
            Model::Heisenberg,
            &s,
            &real,
            &p,
            &InitialStateSpec::neel(3),
            3,
            Sampling::EveryPeriod,
        )
        .unwrap();
        let a = traj.samples.last().unwrap();
        let b = strobe.samples.last().unwrap();
        assert_eq!(a.key(), b.key());
        for (u, v) in a.spins.iter().zip(&b.spins) {
            for c in 0..3 {
                assert!((u[c] - v[c]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn events_rotate_and_switch_axes() {
        let s = spec(2, 0.0, 0.0, 0.0);
        let real = DisorderRealization::mean_of(&s);
        let mut p = DriveProtocol::floquet_only(0.0);
        p.floquet_enabled = false;
        p.events = vec![ProtocolEvent {
            period: 2,
            action: EventAction::GlobalRotation {
                axis: Axis::Y,
                angle: FRAC_PI_2,
            },
        }];
        let init = InitialStateSpec::ProductZ {
            spins: SpinPattern::all_up(2),
        };
        let traj = run_protocol(
            Model::Heisenberg,
            &s,
            &real,
            &p,
            &init,
            4,
            Sampling::EveryPeriod,
        )
        .unwrap();
        let at = |k: usize| traj.post_pulse().find(|s| s.period == k).unwrap().spins[0];
        assert!((at(2)[2] - 1.0).abs() < 1e-12);
        assert!((at(3)[0] - 1.0).abs() < 1e-12, "{:?}", at(3));

        let mut bad = p.clone();
        bad.events[0].period = 9;
        assert!(matches!(
            run_protocol(
                Model::Heisenberg,
                &s,
                &real,
                &bad,
                &init,
                4,
                Sampling::EveryPeriod
            ),
            Err(DtcError::EventOutOfRange { period: 9, .. })
        ));
    }

    #[test]
    fn driver_reuses_operators() {
        let s = spec(3, 0.5, 0.0, 0.1);
        let real = sample_disorder(&s, 8);
        let mut p = DriveProtocol::floquet_only(0.05).with_h2i(4, Axis::Z);
        p.events = vec![
            ProtocolEvent {
                period: 1,
                action: EventAction::SetFloquetAxis { axis: Axis::Y },
            },
            ProtocolEvent {
                period: 1,
                action: EventAction::SetH2iAxis { axis: Axis::X },
            },
        ];
        let mut d = ProtocolDriver::new(Model::Heisenberg, &s, &real, &p).unwrap();
        let a = d.begin_period(0, |_| {}).unwrap();
        assert_eq!((a.floquet_axis, a.h2i_axis), (Axis::X, Axis::Z));
        let b = d.begin_period(1, |_| {}).unwrap();
        assert_eq!((b.floquet_axis, b.h2i_axis), (Axis::Y, Axis::X));
        let c = d.begin_period(2, |_| {}).unwrap();
        assert!(Arc::ptr_eq(&b, &c));
    }
}
