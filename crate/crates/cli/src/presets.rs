use crate::config::{ExperimentConfig, Mode, SimulatorSpec, SystemKind, TargetSpec, TimesSpec, TrotterSpec};
use crate::CliError;

#[derive(Clone, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub config: ExperimentConfig,
}

const DEFAULT_SEED: u64 = 20_240_601;

fn target(u: f64, x: f64, y: Option<f64>) -> TargetSpec {
    TargetSpec {
        u: Some(u),
        x: Some(x),
        y,
        ..Default::default()
    }
}

fn sim(omega: f64, delta: f64, v0: f64) -> SimulatorSpec {
    SimulatorSpec {
        omega: Some(omega),
        delta: Some(delta),
        v0: Some(v0),
        ..Default::default()
    }
}

fn window(end: f64, points: usize) -> TimesSpec {
    TimesSpec {
        start: Some(0.0),
        end: Some(end),
        points: Some(points),
    }
}

fn base(name: &str, mode: Mode, system: SystemKind) -> ExperimentConfig {
    ExperimentConfig {
        mode: Some(mode),
        preset: Some(name.to_string()),
        system: Some(system),
        seed: Some(DEFAULT_SEED),
        ..Default::default()
    }
}

/// The bundled figure-reproduction presets.
pub fn presets() -> Vec<Preset> {
    let four_atom = |name: &str, v2_override: Option<f64>| ExperimentConfig {
        target: target(1.0, 1.2, Some(0.2)),
        simulator: SimulatorSpec {
            v0: Some(64.0),
            v2_override,
            ..Default::default()
        },
        times: window(10.0, 1001),
        ..base(name, Mode::Compare, SystemKind::FourAtom)
    };
    vec![
        Preset {
            name: "fig3-top",
            description: "two-atom qutrit: U=1, X=0.5; Omega=-0.5, Delta=-0.5, V0=32; t in [0,10]",
            config: ExperimentConfig {
                target: target(1.0, 0.5, None),
                simulator: sim(-0.5, -0.5, 32.0),
                times: window(10.0, 1001),
                ..base("fig3-top", Mode::Compare, SystemKind::TwoAtom)
            },
        },
        Preset {
            name: "fig3-bottom",
            description: "two-atom qutrit: U=1, X=1.5; Omega=-1.5, Delta=-0.5, V0=96; t in [0,10]",
            config: ExperimentConfig {
                target: target(1.0, 1.5, None),
                simulator: sim(-1.5, -0.5, 96.0),
                times: window(10.0, 1001),
                ..base("fig3-bottom", Mode::Compare, SystemKind::TwoAtom)
            },
        },
        Preset {
            name: "fig4",
            description: "three-atom qutrit: U=0.064, X=0.067; Omega=1, Delta=15, Delta0=0, V0=30; K=1; t in [0,100]",
            config: ExperimentConfig {
                target: target(0.064, 0.067, None),
                simulator: SimulatorSpec {
                    delta0: Some(0.0),
                    ..sim(1.0, 15.0, 30.0)
                },
                times: window(100.0, 1001),
                k: Some(1.0),
                ..base("fig4", Mode::Compare, SystemKind::ThreeAtom)
            },
        },
        Preset {
            name: "fig7-top",
            description: "four-atom ladder: U=1, X=1.2, Y=0.2; V0=64, V1=0.2, V2=-0.2 override; t in [0,10]",
            config: four_atom("fig7-top", Some(-0.2)),
        },
        Preset {
            name: "fig7-bottom",
            description: "four-atom ladder: U=1, X=1.2, Y=0.2; V0=64, V1=0.2, geometric V2=0.13; t in [0,10]",
            config: four_atom("fig7-bottom", None),
        },
        Preset {
            name: "fig8",
            description: "six-atom ladder: U=1, X=1.2, Y=0.2; Omega=1, Delta=15, V0=30, rho=0.326, K=0.05464; t in [0,100]",
            config: ExperimentConfig {
                target: target(1.0, 1.2, Some(0.2)),
                simulator: SimulatorSpec {
                    rho: Some(0.326),
                    ..sim(1.0, 15.0, 30.0)
                },
                times: window(100.0, 1001),
                k: Some(0.05464),
                ..base("fig8", Mode::Compare, SystemKind::SixAtom)
            },
        },
        Preset {
            name: "fig10",
            description: "two-qubit Trotter: Omega=-1.5, Delta=-0.5, V0=10, dt=0.1, 1000 shots; t in [0,3]",
            config: ExperimentConfig {
                target: target(1.0, 1.5, None),
                simulator: sim(-1.5, -0.5, 10.0),
                times: TimesSpec {
                    start: Some(0.0),
                    end: Some(3.0),
                    points: None,
                },
                trotter: TrotterSpec {
                    dt: Some(0.1),
                    shots: Some(1000),
                },
                ..base("fig10", Mode::Trotter, SystemKind::TwoAtom)
            },
        },
    ]
}

pub fn preset(name: &str) -> Result<Preset, CliError> {
    presets().into_iter().find(|p| p.name == name).ok_or_else(|| {
        let known: Vec<&str> = presets().iter().map(|p| p.name).collect();
        CliError::config("preset", format!("unknown preset `{name}` (known: {})", known.join(", ")))
    })
}
