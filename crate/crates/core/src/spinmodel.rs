//! Chain, noise and drive descriptions, quasistatic disorder sampling and
//! the seed-derivation scheme used by every sweep.
//!
//! All energies are stored as dimensionless products with the drive period
//! (`J·T`, `h·T`), matching the axes of the phase diagrams.

use std::f64::consts::{LN_2, PI};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{DtcError, Result};

/// Largest chain the dense algebra is allowed to build (4096 x 4096 operators).
pub const MAX_SITES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    OpenChain,
    ClosedLoop,
}

/// The disorder ensemble: sizes, mean couplings and fields, and the
/// half-widths of the uniform distributions around them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub n_sites: usize,
    pub geometry: Geometry,
    pub j_mean: f64,
    #[serde(default)]
    pub j_width: f64,
    #[serde(default)]
    pub field_mean: [f64; 3],
    #[serde(default)]
    pub field_width: [f64; 3],
}

impl ChainSpec {
    /// Open chain with z-only fields, the most common configuration.
    pub fn open(n_sites: usize, j_mean: f64, field_z: f64, field_width_z: f64) -> Result<Self> {
        let spec = ChainSpec {
            n_sites,
            geometry: Geometry::OpenChain,
            j_mean,
            j_width: 0.0,
            field_mean: [0.0, 0.0, field_z],
            field_width: [0.0, 0.0, field_width_z],
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites == 0 || self.n_sites > MAX_SITES {
            return Err(DtcError::InvalidSpec(format!(
                "n_sites = {} outside 1..={MAX_SITES}",
                self.n_sites
            )));
        }
        if self.geometry == Geometry::ClosedLoop && self.n_sites < 3 {
            return Err(DtcError::InvalidSpec(
                "a closed loop needs at least 3 sites".into(),
            ));
        }
        let finite = self.j_mean.is_finite()
            && self.j_width.is_finite()
            && self
                .field_mean
                .iter()
                .chain(&self.field_width)
                .all(|v| v.is_finite());
        if !finite {
            return Err(DtcError::InvalidSpec("non-finite parameter".into()));
        }
        if self.j_width < 0.0 {
            return Err(DtcError::InvalidSpec(format!(
                "j_width = {} < 0",
                self.j_width
            )));
        }
        if let Some(w) = self.field_width.iter().find(|w| **w < 0.0) {
            return Err(DtcError::InvalidSpec(format!("field width {w} < 0")));
        }
        Ok(())
    }

    /// Bonds as 1-based site pairs: `N-1` for an open chain, `N` for a loop.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let n = self.n_sites;
        let mut bonds: Vec<(usize, usize)> = (1..n).map(|i| (i, i + 1)).collect();
        if self.geometry == Geometry::ClosedLoop {
            bonds.push((n, 1));
        }
        bonds
    }

    pub fn bond_count(&self) -> usize {
        match self.geometry {
            Geometry::OpenChain => self.n_sites - 1,
            Geometry::ClosedLoop => self.n_sites,
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }
}

/// One concrete quasistatic noise draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderRealization {
    /// Dimensionless `J_i·T`, one per bond in [`ChainSpec::bonds`] order.
    pub couplings: Vec<f64>,
    /// Per-site `(h^x, h^y, h^z)·T`.
    pub fields: Vec<[f64; 3]>,
    pub seed: u64,
}

impl DisorderRealization {
    /// A realization with every parameter at its ensemble mean.
    pub fn mean_of(spec: &ChainSpec) -> Self {
        DisorderRealization {
            couplings: vec![spec.j_mean; spec.bond_count()],
            fields: vec![spec.field_mean; spec.n_sites],
            seed: 0,
        }
    }

    pub fn check_matches(&self, spec: &ChainSpec) -> Result<()> {
        if self.couplings.len() != spec.bond_count() {
            return Err(DtcError::Mismatch(format!(
                "{} couplings for {} bonds",
                self.couplings.len(),
                spec.bond_count()
            )));
        }
        if self.fields.len() != spec.n_sites {
            return Err(DtcError::Mismatch(format!(
                "{} field vectors for {} sites",
                self.fields.len(),
                spec.n_sites
            )));
        }
        Ok(())
    }
}

/// Draws one realization: every coupling and every site-axis field is an
/// independent uniform sample on `[mean - width, mean + width]`.
///
/// Draw order is fixed (couplings in bond order, then fields site by site in
/// x, y, z order) and a draw is consumed even for zero widths, so the stream
/// layout does not depend on which widths are set.
pub fn sample_disorder(spec: &ChainSpec, seed: u64) -> DisorderRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut uniform = |mean: f64, width: f64| {
        let u: f64 = rng.gen();
        let v = mean + width * (2.0 * u - 1.0);
        // rounding can push mean+width*(1-2^-53) past the bound
        v.clamp(mean - width, mean + width)
    };
    let couplings = (0..spec.bond_count())
        .map(|_| uniform(spec.j_mean, spec.j_width))
        .collect();
    let fields = (0..spec.n_sites)
        .map(|_| {
            let mut h = [0.0; 3];
            for (a, slot) in h.iter_mut().enumerate() {
                *slot = uniform(spec.field_mean[a], spec.field_width[a]);
            }
            h
        })
        .collect();
    DisorderRealization {
        couplings,
        fields,
        seed,
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for realization `realization` of grid cell `cell` under `master`.
///
/// A pure function of its three keys, so any unit of a sweep can be
/// regenerated independently of execution order.
pub fn derive_seed(master: u64, cell: u64, realization: u64) -> u64 {
    let a = splitmix64(master);
    let b = splitmix64(a ^ cell.wrapping_mul(0xD1B5_4A32_D192_ED03));
    splitmix64(b ^ realization.wrapping_mul(0x8CB9_2BA7_2F3D_8DD7))
}

/// Pulse-angle error from detuning noise: `(2 ln 2 / π)·(τ / T₂*)²`.
pub fn estimate_pulse_error(pulse_duration: f64, dephasing_time: f64) -> Result<f64> {
    if !dephasing_time.is_finite() || dephasing_time <= 0.0 {
        return Err(DtcError::Domain(format!(
            "dephasing time must be positive, got {dephasing_time}"
        )));
    }
    if !pulse_duration.is_finite() || pulse_duration < 0.0 {
        return Err(DtcError::Domain(format!(
            "pulse duration must be non-negative, got {pulse_duration}"
        )));
    }
    let ratio = pulse_duration / dephasing_time;
    Ok(2.0 * LN_2 / PI * ratio * ratio)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EventAction {
    /// Instantaneous error-free rotation `exp(-i·angle/2·σ^axis)` on every site.
    GlobalRotation {
        axis: Axis,
        angle: f64,
    },
    SetFloquetAxis {
        axis: Axis,
    },
    SetH2iAxis {
        axis: Axis,
    },
}

/// An action that fires at `t = period·T`, before the segments of the
/// period that starts there. Events sharing a period apply in list order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolEvent {
    pub period: usize,
    pub action: EventAction,
}

fn default_true() -> bool {
    true
}

fn default_z() -> Axis {
    Axis::Z
}

/// How the rotation-angle error enters the two H2I pulse families.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum H2iErrorSense {
    /// Every H2I pulse is the same physical rotation by `π - 2e` about the
    /// pulse axis. `P⁺` and `P⁻` coincide; the ideal factors differ only by
    /// a global sign per pulsed site.
    #[default]
    Same,
    /// `P^± = exp(±i(π/2 - e)Σσ)`: each factor loses `e` in magnitude, so
    /// consecutive errors undo each other when nothing happens in between.
    Alternating,
}

/// Per-period pulse schedule plus timed events.
///
/// One period is `n` H2I pulses on the target sites interleaved with free
/// evolution for `T/n`, followed by the Floquet pulse at the end of the
/// period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveProtocol {
    pub floquet_axis: Axis,
    /// Floquet pulse rotation error ε in radians.
    pub floquet_error: f64,
    /// When false the Floquet pulse is replaced by the identity (undriven runs).
    #[serde(default = "default_true")]
    pub floquet_enabled: bool,
    #[serde(default)]
    pub h2i_count: usize,
    #[serde(default = "default_z")]
    pub h2i_axis: Axis,
    #[serde(default)]
    pub h2i_error: f64,
    #[serde(default)]
    pub h2i_error_sense: H2iErrorSense,
    /// 1-based pulsed sites; `None` means every odd site (1, 3, 5, ...).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h2i_targets: Option<Vec<usize>>,
    #[serde(default)]
    pub events: Vec<ProtocolEvent>,
}

impl DriveProtocol {
    /// A single Floquet pulse about `x` per period with error `epsilon`.
    pub fn floquet_only(epsilon: f64) -> Self {
        DriveProtocol {
            floquet_axis: Axis::X,
            floquet_error: epsilon,
            floquet_enabled: true,
            h2i_count: 0,
            h2i_axis: Axis::Z,
            h2i_error: 0.0,
            h2i_error_sense: H2iErrorSense::Same,
            h2i_targets: None,
            events: Vec::new(),
        }
    }

    pub fn with_h2i(mut self, count: usize, axis: Axis) -> Self {
        self.h2i_count = count;
        self.h2i_axis = axis;
        self
    }

    pub fn h2i_target_sites(&self, n_sites: usize) -> Vec<usize> {
        match &self.h2i_targets {
            Some(t) => t.clone(),
            None => (1..=n_sites).step_by(2).collect(),
        }
    }

    pub fn validate(&self, n_sites: usize) -> Result<()> {
        if !self.h2i_count.is_multiple_of(2) {
            return Err(DtcError::OddH2ICount(self.h2i_count));
        }
        if !self.floquet_error.is_finite() || !self.h2i_error.is_finite() {
            return Err(DtcError::InvalidProtocol("non-finite pulse error".into()));
        }
        if let Some(targets) = &self.h2i_targets {
            if let Some(&site) = targets.iter().find(|&&s| s == 0 || s > n_sites) {
                return Err(DtcError::SiteOutOfRange { site, n_sites });
            }
        }
        let mut last = 0;
        for ev in &self.events {
            if ev.period < last {
                return Err(DtcError::InvalidProtocol(format!(
                    "event periods must be non-decreasing ({} after {last})",
                    ev.period
                )));
            }
            last = ev.period;
            if let EventAction::GlobalRotation { angle, .. } = ev.action {
                if !(angle > -PI && angle <= PI) {
                    return Err(DtcError::InvalidProtocol(format!(
                        "rotation angle {angle} outside (-pi, pi]"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Product-basis spin pattern, written as a string of `u`/`d` characters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinPattern(pub Vec<bool>);

impl SpinPattern {
    /// `true` marks a down spin.
    pub fn parse(s: &str) -> Result<Self> {
        let spins = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                'u' | 'U' | '↑' | '0' => Ok(false),
                'd' | 'D' | '↓' | '1' => Ok(true),
                other => Err(DtcError::InvalidInitialState(format!(
                    "unknown spin symbol {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        if spins.is_empty() {
            return Err(DtcError::InvalidInitialState("empty spin pattern".into()));
        }
        Ok(SpinPattern(spins))
    }

    /// Néel pattern `↑↓↑↓…` of length `n`.
    pub fn neel(n: usize) -> Self {
        SpinPattern((0..n).map(|i| i % 2 == 1).collect())
    }

    pub fn all_up(n: usize) -> Self {
        SpinPattern(vec![false; n])
    }

    /// Repeats the pattern cyclically to length `n`.
    pub fn tiled(&self, n: usize) -> Self {
        SpinPattern((0..n).map(|i| self.0[i % self.0.len()]).collect())
    }

    pub fn basis_index(&self) -> usize {
        self.0
            .iter()
            .fold(0, |acc, &down| (acc << 1) | down as usize)
    }
}

impl fmt::Display for SpinPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &down in &self.0 {
            write!(f, "{}", if down { 'd' } else { 'u' })?;
        }
        Ok(())
    }
}

impl Serialize for SpinPattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SpinPattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        SpinPattern::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialStateSpec {
    ProductZ {
        spins: SpinPattern,
    },
    /// `cos θ|↑⟩ + sin θ e^{iχ}|↓⟩` on every site.
    ProductBloch {
        theta: f64,
        chi: f64,
    },
}

impl InitialStateSpec {
    pub fn neel(n: usize) -> Self {
        InitialStateSpec::ProductZ {
            spins: SpinPattern::neel(n),
        }
    }

    pub fn validate(&self, n_sites: usize) -> Result<()> {
        match self {
            InitialStateSpec::ProductZ { spins } => {
                if spins.0.len() != n_sites {
                    return Err(DtcError::InvalidInitialState(format!(
                        "pattern {spins} has {} sites, chain has {n_sites}",
                        spins.0.len()
                    )));
                }
            }
            InitialStateSpec::ProductBloch { theta, chi } => {
                if !(0.0..=PI / 2.0 + 1e-12).contains(theta) {
                    return Err(DtcError::InvalidInitialState(format!(
                        "theta = {theta} outside [0, pi/2]"
                    )));
                }
                if !(0.0..2.0 * PI).contains(chi) {
                    return Err(DtcError::InvalidInitialState(format!(
                        "chi = {chi} outside [0, 2pi)"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Adapts a product-z pattern to a new chain length by tiling it.
    pub fn resized(&self, n_sites: usize) -> Self {
        match self {
            InitialStateSpec::ProductZ { spins } => InitialStateSpec::ProductZ {
                spins: spins.tiled(n_sites),
            },
            other => other.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> ChainSpec {
        ChainSpec {
            n_sites: 4,
            geometry: Geometry::OpenChain,
            j_mean: 0.6,
            j_width: 0.006,
            field_mean: [0.0, 0.0, 0.05],
            field_width: [0.0, 0.0, 0.05],
        }
    }

    #[test]
    fn zero_width_gives_means() {
        let mut s = spec();
        s.j_width = 0.0;
        s.field_width = [0.0; 3];
        s.field_mean = [0.1, -0.2, 0.3];
        for seed in 0..20 {
            let r = sample_disorder(&s, seed);
            assert!(r.couplings.iter().all(|&j| j == 0.6));
            assert!(r.fields.iter().all(|h| *h == [0.1, -0.2, 0.3]));
        }
    }

    #[test]
    fn one_percent_charge_noise_stays_in_window() {
        let s = spec();
        for seed in 0..500 {
            for j in sample_disorder(&s, seed).couplings {
                assert!((0.594..=0.606).contains(&j), "{j}");
            }
        }
    }

    #[test]
    fn sampling_is_pure_and_seed_sensitive() {
        let s = spec();
        for seed in 0..100u64 {
            let a = sample_disorder(&s, seed);
            assert_eq!(a, sample_disorder(&s, seed));
            assert_eq!(a.seed, seed);
            let b = sample_disorder(&s, seed + 1000);
            let differs = a.fields.iter().zip(&b.fields).any(|(x, y)| x != y);
            assert!(differs, "seeds {seed} and {} collide", seed + 1000);
        }
    }

    #[test]
    fn coupling_mean_converges() {
        let s = spec();
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|seed| sample_disorder(&s, seed).couplings[0])
            .sum::<f64>()
            / n as f64;
        // uniform on [a-w, a+w] has std w/sqrt(3)
        let stderr = s.j_width / 3f64.sqrt() / (n as f64).sqrt();
        assert!((mean - s.j_mean).abs() < 3.0 * stderr, "{mean}");
    }

    #[test]
    fn bond_count_follows_geometry() {
        for n in 1..=MAX_SITES {
            let mut s = spec();
            s.n_sites = n;
            assert_eq!(sample_disorder(&s, 1).couplings.len(), n - 1);
            assert_eq!(s.bonds().len(), n - 1);
            if n >= 3 {
                s.geometry = Geometry::ClosedLoop;
                assert_eq!(sample_disorder(&s, 1).couplings.len(), n);
                assert_eq!(s.bonds().len(), n);
            }
        }
    }

    #[test]
    fn spec_validation() {
        let mut s = spec();
        s.n_sites = 13;
        assert!(s.validate().is_err());
        s.n_sites = 2;
        s.geometry = Geometry::ClosedLoop;
        assert!(s.validate().is_err());
        let mut s = spec();
        s.j_width = -0.1;
        assert!(s.validate().is_err());
        let mut s = spec();
        s.field_width[0] = -1.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn pulse_error_estimate() {
        let eps = estimate_pulse_error(4.0, 10.0).unwrap();
        assert!((eps - 0.0706).abs() < 5e-4, "{eps}");
        assert_eq!(estimate_pulse_error(0.0, 10.0).unwrap(), 0.0);
        let full = estimate_pulse_error(7.0, 7.0).unwrap();
        assert!((full - 0.4413).abs() < 1e-4);
        assert!(estimate_pulse_error(1.0, 0.0).is_err());
        assert!(estimate_pulse_error(1.0, -2.0).is_err());
    }

    #[test]
    fn derived_seeds_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for cell in 0..50 {
            for r in 0..50 {
                assert!(seen.insert(derive_seed(7, cell, r)));
            }
        }
        assert_ne!(derive_seed(1, 0, 0), derive_seed(2, 0, 0));
    }

    #[test]
    fn protocol_validation() {
        assert!(matches!(
            DriveProtocol::floquet_only(0.1)
                .with_h2i(3, Axis::Z)
                .validate(4),
            Err(DtcError::OddH2ICount(3))
        ));
        let mut p = DriveProtocol::floquet_only(0.1);
        p.h2i_targets = Some(vec![1, 5]);
        assert!(matches!(
            p.validate(4),
            Err(DtcError::SiteOutOfRange { site: 5, .. })
        ));
        let mut p = DriveProtocol::floquet_only(0.1);
        p.events = vec![
            ProtocolEvent {
                period: 5,
                action: EventAction::SetFloquetAxis { axis: Axis::Y },
            },
            ProtocolEvent {
                period: 3,
                action: EventAction::SetH2iAxis { axis: Axis::X },
            },
        ];
        assert!(p.validate(4).is_err());
        p.events[1].period = 5;
        assert!(p.validate(4).is_ok());
        assert_eq!(
            DriveProtocol::floquet_only(0.0).h2i_target_sites(5),
            vec![1, 3, 5]
        );
    }

    #[test]
    fn spin_patterns() {
        let p = SpinPattern::parse("udud").unwrap();
        assert_eq!(p, SpinPattern::neel(4));
        assert_eq!(p.basis_index(), 0b0101);
        assert_eq!(p.tiled(6).to_string(), "ududud");
        assert!(SpinPattern::parse("uxd").is_err());
        let init = InitialStateSpec::ProductZ { spins: p };
        assert!(init.validate(4).is_ok());
        assert!(init.validate(5).is_err());
        assert!(InitialStateSpec::ProductBloch {
            theta: 2.0,
            chi: 0.0
        }
        .validate(4)
        .is_err());
    }

    #[test]
    fn axis_serializes_lowercase() {
        #[derive(Serialize, Deserialize)]
        struct W {
            a: Axis,
        }
        let s = toml::to_string(&W { a: Axis::Y }).unwrap();
        assert_eq!(s.trim(), "a = \"y\"");
        let w: W = toml::from_str("a = \"z\"").unwrap();
        assert_eq!(w.a, Axis::Z);
    }
}
