//! Built-in run configurations, one per named panel.
//!
//! Sweeps default to a 20×20 grid over `J·T ∈ [0, π]`, `ε ∈ [0, 0.5]` with
//! 50 disorder realizations; the command line can override grid, seed and
//! realization count. A bare name such as `fig12` resolves to its
//! first panel.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{DtcError, Result};
use crate::floquet::Sampling;
use crate::hilbert::Model;
use crate::io::{RunConfig, TraceRequest, VerifyRequest};
use crate::spinmodel::{
    Axis, ChainSpec, DriveProtocol, EventAction, Geometry, InitialStateSpec, ProtocolEvent,
    SpinPattern,
};
use crate::sweep::{GridAxis, Observable, SweepParam, SweepPlan};

pub const GRID: usize = 20;
pub const REALIZATIONS: usize = 50;
pub const GAAS_FIELD: f64 = 2.0e4;
pub const GAAS_WIDTH: f64 = 50.0;

const SEED: u64 = 2018;

struct Preset {
    name: &'static str,
    about: &'static str,
    build: fn() -> RunConfig,
}

fn chain(n: usize, j: f64, field: f64, width: f64) -> ChainSpec {
    ChainSpec {
        n_sites: n,
        geometry: Geometry::OpenChain,
        j_mean: j,
        j_width: 0.0,
        field_mean: [0.0, 0.0, field],
        field_width: [0.0, 0.0, width],
    }
}

fn gaas(n: usize) -> ChainSpec {
    chain(n, 0.0, GAAS_FIELD, GAAS_WIDTH)
}

fn pattern(s: &str) -> InitialStateSpec {
    InitialStateSpec::ProductZ {
        spins: SpinPattern::parse(s).expect("valid preset pattern"),
    }
}

fn up_x() -> InitialStateSpec {
    InitialStateSpec::ProductBloch {
        theta: FRAC_PI_4,
        chi: 0.0,
    }
}

fn h2i(count: usize, axis: Axis) -> DriveProtocol {
    DriveProtocol::floquet_only(0.0).with_h2i(count, axis)
}

fn diagram(
    model: Model,
    chain: ChainSpec,
    protocol: DriveProtocol,
    initial: InitialStateSpec,
    observable: Observable,
) -> SweepPlan {
    SweepPlan {
        model,
        chain,
        protocol,
        initial,
        x_axis: GridAxis::linspace(SweepParam::JMean, 0.0, PI, GRID),
        y_axis: GridAxis::linspace(SweepParam::Epsilon, 0.0, 0.5, GRID),
        realizations: REALIZATIONS,
        master_seed: SEED,
        observable,
        ell: 100,
        h2i_error_follows_epsilon: false,
    }
}

fn sweep(plan: SweepPlan) -> RunConfig {
    RunConfig {
        sweep: Some(plan),
        ..Default::default()
    }
}

fn purity(plan: SweepPlan) -> RunConfig {
    RunConfig {
        purity: Some(plan),
        ..Default::default()
    }
}

fn z1() -> Observable {
    Observable::TimeAverageZ { site: 1 }
}

fn ising_map(ch: ChainSpec) -> RunConfig {
    sweep(diagram(
        Model::Ising,
        ch,
        DriveProtocol::floquet_only(0.0),
        InitialStateSpec::neel(4),
        z1(),
    ))
}

fn heis_map(ch: ChainSpec, n_h2i: usize, initial: InitialStateSpec) -> RunConfig {
    sweep(diagram(
        Model::Heisenberg,
        ch,
        h2i(n_h2i, Axis::Z),
        initial,
        z1(),
    ))
}

fn trace(
    model: Model,
    chain: ChainSpec,
    protocol: DriveProtocol,
    initial: InitialStateSpec,
    n_periods: usize,
    sampling: Sampling,
) -> TraceRequest {
    TraceRequest {
        model,
        chain,
        protocol,
        initial,
        n_periods,
        sampling,
        realizations: REALIZATIONS,
        master_seed: SEED,
        sites: Some(vec![1]),
    }
}

fn trace_cfg(req: TraceRequest) -> RunConfig {
    RunConfig {
        trace: Some(req),
        ..Default::default()
    }
}

fn ising_trace(j: f64, eps: f64, field: f64, width: f64) -> RunConfig {
    trace_cfg(trace(
        Model::Ising,
        chain(4, j, field, width),
        DriveProtocol::floquet_only(eps),
        InitialStateSpec::neel(4),
        400,
        Sampling::Stroboscopic2T,
    ))
}

/// Axis-switching protocol: `π/2` about `y` at period 66, about `z` at 132.
pub fn rotation_protocol(j: f64) -> (ChainSpec, DriveProtocol) {
    let ch = ChainSpec {
        n_sites: 4,
        geometry: Geometry::OpenChain,
        j_mean: j,
        j_width: 0.0,
        field_mean: [0.0; 3],
        field_width: [10.0; 3],
    };
    let mut p = DriveProtocol::floquet_only(0.05).with_h2i(128, Axis::Z);
    p.h2i_error = 0.05;
    let ev = |period, action| ProtocolEvent { period, action };
    p.events = vec![
        ev(
            66,
            EventAction::GlobalRotation {
                axis: Axis::Y,
                angle: FRAC_PI_2,
            },
        ),
        ev(66, EventAction::SetFloquetAxis { axis: Axis::Y }),
        ev(66, EventAction::SetH2iAxis { axis: Axis::X }),
        ev(
            132,
            EventAction::GlobalRotation {
                axis: Axis::Z,
                angle: FRAC_PI_2,
            },
        ),
        ev(132, EventAction::SetFloquetAxis { axis: Axis::Z }),
        ev(132, EventAction::SetH2iAxis { axis: Axis::Y }),
    ];
    (ch, p)
}

fn rotation_trace(j: f64) -> RunConfig {
    let (ch, p) = rotation_protocol(j);
    RunConfig {
        protocol: Some(trace(
            Model::Heisenberg,
            ch,
            p,
            pattern("uuuu"),
            200,
            Sampling::Stroboscopic2T,
        )),
        ..Default::default()
    }
}

fn rotation_vs_n() -> RunConfig {
    let (ch, p) = rotation_protocol(PI);
    let mut plan = diagram(
        Model::Heisenberg,
        ch,
        p,
        pattern("uuuu"),
        Observable::MeanEndPurity { site: 1 },
    );
    plan.x_axis = GridAxis {
        param: SweepParam::NSites,
        values: (1..=8).map(f64::from).collect(),
    };
    plan.y_axis = GridAxis::single(SweepParam::JMean, PI);
    plan.h2i_error_follows_epsilon = false;
    sweep(plan)
}

fn coherence(protocol: DriveProtocol) -> RunConfig {
    sweep(diagram(
        Model::Heisenberg,
        gaas(4),
        protocol,
        up_x(),
        Observable::TimeAverageX { site: 1 },
    ))
}

fn purity_plan() -> SweepPlan {
    let mut plan = diagram(
        Model::Heisenberg,
        gaas(4),
        h2i(128, Axis::Z),
        pattern("uuuu"),
        Observable::BlochPurity {
            n_theta: 8,
            n_chi: 8,
        },
    );
    plan.realizations = 20;
    plan
}

fn purity_cut() -> RunConfig {
    let mut plan = purity_plan();
    plan.x_axis = GridAxis::linspace(SweepParam::Epsilon, 0.0, 0.5, 21);
    plan.y_axis = GridAxis {
        param: SweepParam::JMean,
        values: vec![0.0, 0.8],
    };
    purity(plan)
}

fn charge_noise(width: f64) -> RunConfig {
    let mut ch = gaas(4);
    ch.j_width = width;
    heis_map(ch, 128, pattern("uuuu"))
}

const PRESETS: &[Preset] = &[
    Preset {
        name: "fig2a",
        about: "Ising open chain, h=0.05",
        build: || ising_map(chain(4, 0.0, 0.05, 0.05)),
    },
    Preset {
        name: "fig2b",
        about: "Ising open chain, h=1",
        build: || ising_map(chain(4, 0.0, 1.0, 0.05)),
    },
    Preset {
        name: "fig2c",
        about: "Ising 2x2 loop, h=0.05",
        build: || {
            let mut ch = chain(4, 0.0, 0.05, 0.05);
            ch.geometry = Geometry::ClosedLoop;
            ising_map(ch)
        },
    },
    Preset {
        name: "fig3a",
        about: "Ising trace, time-crystal point",
        build: || ising_trace(0.6, 0.1, 0.05, 0.05),
    },
    Preset {
        name: "fig3b",
        about: "Ising trace, thermal point",
        build: || ising_trace(FRAC_PI_2, 0.3, 0.05, 0.05),
    },
    Preset {
        name: "fig3c",
        about: "Ising trace, MBL point",
        build: || ising_trace(0.05, 0.2, 0.05, 0.05),
    },
    Preset {
        name: "fig4a",
        about: "Ising trace, J=0, weak fields",
        build: || ising_trace(0.0, 0.1, 0.05, 0.05),
    },
    Preset {
        name: "fig4b",
        about: "Ising trace, J=0, strong fields",
        build: || ising_trace(0.0, 0.1, 0.5, 0.5),
    },
    Preset {
        name: "fig6a",
        about: "Heisenberg, 0 H2I",
        build: || heis_map(chain(4, 0.0, 0.05, 0.05), 0, InitialStateSpec::neel(4)),
    },
    Preset {
        name: "fig6b",
        about: "Heisenberg, 2 H2I",
        build: || heis_map(chain(4, 0.0, 0.05, 0.05), 2, InitialStateSpec::neel(4)),
    },
    Preset {
        name: "fig6c",
        about: "Heisenberg, 16 H2I",
        build: || heis_map(chain(4, 0.0, 0.05, 0.05), 16, InitialStateSpec::neel(4)),
    },
    Preset {
        name: "fig6d",
        about: "Heisenberg, 64 H2I",
        build: || heis_map(chain(4, 0.0, 0.05, 0.05), 64, InitialStateSpec::neel(4)),
    },
    Preset {
        name: "fig6e",
        about: "Heisenberg, 128 H2I",
        build: || heis_map(chain(4, 0.0, 0.05, 0.05), 128, InitialStateSpec::neel(4)),
    },
    Preset {
        name: "fig7a",
        about: "GaAs, 0 H2I",
        build: || heis_map(gaas(4), 0, InitialStateSpec::neel(4)),
    },
    Preset {
        name: "fig7b",
        about: "GaAs, 2 H2I",
        build: || heis_map(gaas(4), 2, InitialStateSpec::neel(4)),
    },
    Preset {
        name: "fig7c",
        about: "GaAs, 16 H2I",
        build: || heis_map(gaas(4), 16, InitialStateSpec::neel(4)),
    },
    Preset {
        name: "fig7d",
        about: "GaAs, 64 H2I",
        build: || heis_map(gaas(4), 64, InitialStateSpec::neel(4)),
    },
    Preset {
        name: "fig7e",
        about: "GaAs, 128 H2I",
        build: || heis_map(gaas(4), 128, InitialStateSpec::neel(4)),
    },
    Preset {
        name: "fig8a",
        about: "GaAs, 16 H2I, init uddu",
        build: || heis_map(gaas(4), 16, pattern("uddu")),
    },
    Preset {
        name: "fig8b",
        about: "GaAs, 16 H2I, init uudd",
        build: || heis_map(gaas(4), 16, pattern("uudd")),
    },
    Preset {
        name: "fig8c",
        about: "GaAs, 16 H2I, init uuud",
        build: || heis_map(gaas(4), 16, pattern("uuud")),
    },
    Preset {
        name: "fig8d",
        about: "GaAs, 16 H2I, init uuuu",
        build: || heis_map(gaas(4), 16, pattern("uuuu")),
    },
    Preset {
        name: "fig9a",
        about: "axis-switching protocol, J=pi",
        build: || rotation_trace(PI),
    },
    Preset {
        name: "fig9b",
        about: "axis-switching protocol, J=0",
        build: || rotation_trace(0.0),
    },
    Preset {
        name: "fig9c",
        about: "end-spin purity against chain length",
        build: rotation_vs_n,
    },
    Preset {
        name: "fig10a",
        about: "coherence map, undriven",
        build: || {
            let mut p = h2i(0, Axis::Z);
            p.floquet_enabled = false;
            coherence(p)
        },
    },
    Preset {
        name: "fig10b",
        about: "coherence map, Floquet only",
        build: || coherence(h2i(0, Axis::Z)),
    },
    Preset {
        name: "fig10c",
        about: "coherence map, 128 H2I about z",
        build: || coherence(h2i(128, Axis::Z)),
    },
    Preset {
        name: "fig10d",
        about: "coherence map, 128 H2I about x",
        build: || coherence(h2i(128, Axis::X)),
    },
    Preset {
        name: "fig11a",
        about: "Bloch-averaged purity map",
        build: || purity(purity_plan()),
    },
    Preset {
        name: "fig11b",
        about: "Bloch-averaged purity, epsilon cut at J=0 and 0.8",
        build: purity_cut,
    },
    Preset {
        name: "fig12a",
        about: "Ising per-period trace",
        build: || {
            let mut cfg = ising_trace(0.6, 0.1, 0.05, 0.05);
            let t = cfg.trace.as_mut().expect("trace preset");
            t.n_periods = 200;
            t.sampling = Sampling::EveryPeriod;
            cfg
        },
    },
    Preset {
        name: "fig12b",
        about: "GaAs per-period trace, 64 H2I",
        build: || {
            let mut ch = gaas(4);
            ch.j_mean = 0.6;
            let mut p = h2i(64, Axis::Z);
            p.floquet_error = 0.1;
            trace_cfg(trace(
                Model::Heisenberg,
                ch,
                p,
                InitialStateSpec::neel(4),
                200,
                Sampling::EveryPeriod,
            ))
        },
    },
    Preset {
        name: "fig13a",
        about: "GaAs, 128 H2I, N=2",
        build: || heis_map(gaas(2), 128, InitialStateSpec::neel(2)),
    },
    Preset {
        name: "fig13b",
        about: "GaAs, 128 H2I, N=3",
        build: || heis_map(gaas(3), 128, InitialStateSpec::neel(3)),
    },
    Preset {
        name: "fig13c",
        about: "GaAs, 128 H2I, N=4",
        build: || heis_map(gaas(4), 128, InitialStateSpec::neel(4)),
    },
    Preset {
        name: "fig13d",
        about: "GaAs, 128 H2I, N=5",
        build: || heis_map(gaas(5), 128, InitialStateSpec::neel(5)),
    },
    Preset {
        name: "fig13e",
        about: "GaAs, 128 H2I, N=6",
        build: || heis_map(gaas(6), 128, InitialStateSpec::neel(6)),
    },
    Preset {
        name: "fig14a",
        about: "GaAs, 128 H2I, dJ=0.1",
        build: || charge_noise(0.1),
    },
    Preset {
        name: "fig14b",
        about: "GaAs, 128 H2I, dJ=0.5",
        build: || charge_noise(0.5),
    },
    Preset {
        name: "fig14c",
        about: "GaAs, 128 H2I, dJ=1",
        build: || charge_noise(1.0),
    },
    Preset {
        name: "fig14d",
        about: "GaAs, 128 H2I, dJ=5",
        build: || charge_noise(5.0),
    },
    Preset {
        name: "oracles",
        about: "built-in consistency checks",
        build: || RunConfig {
            verify: Some(VerifyRequest {}),
            ..Default::default()
        },
    },
];

/// `(name, description)` for every preset.
pub fn list() -> Vec<(&'static str, &'static str)> {
    PRESETS.iter().map(|p| (p.name, p.about)).collect()
}

pub fn preset(name: &str) -> Result<RunConfig> {
    let lower = name.to_ascii_lowercase();
    let found = PRESETS
        .iter()
        .find(|p| p.name == lower)
        .or_else(|| PRESETS.iter().find(|p| p.name == format!("{lower}a")));
    match found {
        Some(p) => {
            let mut cfg = (p.build)();
            cfg.output.name = Some(p.name.to_string());
            Ok(cfg)
        }
        None => Err(DtcError::Config(format!(
            "unknown preset {name:?}; run `dtc presets` for the list"
        ))),
    }
}
