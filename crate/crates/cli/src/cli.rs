use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{ExperimentConfig, Mode, SystemKind};
use crate::presets::{preset, presets};
use crate::run::run;
use crate::CliError;

#[derive(Parser, Debug)]
#[command(name = "cahm", version, about = "Quantum-link simulator design: match, evolve, compare, Trotterize")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Target and simulator spectra.
    Spectrum(RunArgs),
    /// Simulator parameters for a target.
    Match(RunArgs),
    /// Target and simulator traces.
    Evolve(RunArgs),
    /// Traces plus deviation metrics.
    Compare(RunArgs),
    /// Trotter circuit against exact evolution, with sampled shots.
    Trotter(RunArgs),
    /// List the bundled presets.
    Presets,
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    #[arg(long)]
    preset: Option<String>,
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    system: Option<SystemArg>,
    #[arg(long, allow_hyphen_values = true)]
    u: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    y: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta0: Option<f64>,
    #[arg(long)]
    v0: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    v2_override: Option<f64>,
    /// Simulator time is target time divided by K.
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    shots: Option<u64>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
#[allow(clippy::enum_variant_names)]
enum SystemArg {
    TwoAtom,
    ThreeAtom,
    FourAtom,
    SixAtom,
}

impl From<SystemArg> for SystemKind {
    fn from(s: SystemArg) -> Self {
        match s {
            SystemArg::TwoAtom => SystemKind::TwoAtom,
            SystemArg::ThreeAtom => SystemKind::ThreeAtom,
            SystemArg::FourAtom => SystemKind::FourAtom,
            SystemArg::SixAtom => SystemKind::SixAtom,
        }
    }
}

impl RunArgs {
    fn flags(&self) -> ExperimentConfig {
        let mut c = ExperimentConfig {
            preset: self.preset.clone(),
            system: self.system.map(Into::into),
            k: self.k,
            seed: self.seed,
            out: self.out.clone(),
            ..Default::default()
        };
        c.target.u = self.u;
        c.target.x = self.x;
        c.target.y = self.y;
        c.simulator.omega = self.omega;
        c.simulator.delta = self.delta;
        c.simulator.delta0 = self.delta0;
        c.simulator.v0 = self.v0;
        c.simulator.rho = self.rho;
        c.simulator.v2_override = self.v2_override;
        c.times.end = self.t_end;
        c.times.points = self.points;
        c.trotter.dt = self.dt;
        c.trotter.shots = self.shots;
        c
    }
}

/// Layers preset < config file < flags; the subcommand fixes the mode.
fn resolve(mode: Mode, args: &RunArgs) -> Result<ExperimentConfig, CliError> {
    let file = match &args.config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    let flags = args.flags();
    let preset_name = flags.preset.clone().or(file.preset.clone());
    let base = match preset_name {
        Some(name) => preset(&name)?.config,
        None => ExperimentConfig::default(),
    };
    let mut cfg = base.merge(&file).merge(&flags);
    cfg.mode = Some(mode);
    Ok(cfg)
}

/// Parses `args` (program name first), runs, and returns the exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let (mode, args) = match cli.command {
        Command::Presets => {
            for p in presets() {
                println!("{:<12} {}", p.name, p.description);
            }
            return 0;
        }
        Command::Spectrum(a) => (Mode::Spectrum, a),
        Command::Match(a) => (Mode::Match, a),
        Command::Evolve(a) => (Mode::Evolve, a),
        Command::Compare(a) => (Mode::Compare, a),
        Command::Trotter(a) => (Mode::Trotter, a),
    };
    match resolve(mode, &args).and_then(|cfg| run(&cfg)) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("cahm: {e}");
            e.exit_code()
        }
    }
}
