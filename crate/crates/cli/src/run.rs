use std::path::{Path, PathBuf};

use cahm_core::evolution::{
    blockade_leakage, compare_spectral, fmt_num, joined_csv, EvolutionTrace, SpectralTracer, TimeGrid,
};
use cahm_core::matching::{
    approx_three_atom_match, match_four_atom, match_six_atom, match_two_atom, one_spin_levels,
    perturbative_three_atom_levels, solve_three_atom_newton, spin_sector_levels, two_spin_probe, Configuration,
    GeometryDescriptor, MatchReport, NewtonProblem, SixAtomOptions, ThreeAtomPoint, DEFAULT_BLOCKADE_RATIO,
};
use cahm_core::rydberg::{embed_spin_state, GeometryFile, LadderCouplings, PairCoupling, RungSize, RydbergParams};
use cahm_core::target::{analytic_one_spin, build_chain_h, build_h1t, build_h2t, Boundary, SpinTruncation, TargetCouplings};
use cahm_core::trotter::{bitstring, sample_shots, trotter_states, trotter_step};
use cahm_core::{eig_hermitian, Propagator, StateVector};
use serde_json::{json, Value};

use crate::config::{need, ExperimentConfig, Mode, SystemKind};
use crate::{CliError, TOOL_NAME, TOOL_VERSION};

pub const MANIFEST: &str = "manifest.json";
pub const DEFAULT_OUT: &str = "cahm-out";
const DEFAULT_SHOTS: u64 = 1000;
const DEFAULT_SEED: u64 = 0;

/// An output file, held in memory until written.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    fn new(name: &str, contents: String) -> Self {
        Self {
            name: name.to_string(),
            contents,
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

struct Ctx {
    mode: Mode,
    system: SystemKind,
    cfg: ExperimentConfig,
}

impl Ctx {
    fn target(&self) -> Result<TargetCouplings, CliError> {
        let t = &self.cfg.target;
        let u = need(t.u, "target.u", self.mode)?;
        let x = need(t.x, "target.x", self.mode)?;
        let y = if self.system.two_spin() {
            need(t.y, "target.y", self.mode)?
        } else {
            t.y.unwrap_or(0.0)
        };
        let mut c = TargetCouplings::new(u, x, y);
        if t.periodic == Some(true) {
            c.boundary = Boundary::Periodic;
        }
        c.validate()?;
        Ok(c)
    }

    fn grid(&self) -> Result<TimeGrid, CliError> {
        let default_end = match self.system {
            SystemKind::TwoAtom | SystemKind::FourAtom => 10.0,
            SystemKind::ThreeAtom | SystemKind::SixAtom => 100.0,
        };
        let t = &self.cfg.times;
        TimeGrid::new(t.start.unwrap_or(0.0), t.end.unwrap_or(default_end), t.points.unwrap_or(1001))
            .map_err(|e| CliError::config("times", e.to_string()))
    }

    fn wants_k_fit(&self) -> bool {
        self.cfg.k.is_none() && matches!(self.mode, Mode::Match | Mode::Evolve | Mode::Compare)
    }

    /// Simulator parameters: explicit values where given, the matching
    /// prescription for whatever is left out.
    fn simulator(&self, target: &TargetCouplings) -> Result<MatchReport, CliError> {
        let s = &self.cfg.simulator;
        let mode = self.mode;
        let report = match self.system {
            SystemKind::TwoAtom => match (s.omega, s.delta, s.v0) {
                (None, None, None) => match_two_atom(target, s.blockade_ratio.unwrap_or(DEFAULT_BLOCKADE_RATIO))?,
                _ => explicit(
                    Configuration::TwoAtom,
                    target,
                    RydbergParams::new(need(s.omega, "simulator.omega", mode)?, need(s.delta, "simulator.delta", mode)?),
                    line(need(s.v0, "simulator.v0", mode)?),
                ),
            },
            SystemKind::ThreeAtom => {
                let omega = need(s.omega, "simulator.omega", mode)?;
                let delta = need(s.delta, "simulator.delta", mode)?;
                match (s.v0, mode) {
                    (None, _) => approx_three_atom_match(omega, delta)?,
                    (Some(v0), Mode::Match) => {
                        let start = ThreeAtomPoint {
                            omega,
                            delta,
                            delta0: need(s.delta0, "simulator.delta0", mode)?,
                            v0,
                        };
                        solve_three_atom_newton(&NewtonProblem::fixed_v0(*target, v0).with_start(start))?
                    }
                    (Some(v0), _) => explicit(
                        Configuration::ThreeAtom,
                        target,
                        RydbergParams::new(omega, delta).with_delta0(s.delta0.unwrap_or(0.0), vec![1]),
                        line(v0),
                    ),
                }
            }
            SystemKind::FourAtom => {
                let v0 = need(s.v0, "simulator.v0", mode)?;
                let mut r = match_four_atom(target, v0)?;
                if let Some(o) = s.omega {
                    r.params.omega = o;
                }
                if let Some(d) = s.delta {
                    r.params.delta = d;
                }
                if let Some(rho) = s.rho {
                    if !(rho > 0.0 && rho < 1.0) {
                        return Err(CliError::config("simulator.rho", format!("must lie in (0, 1), got {rho}")));
                    }
                    r.geometry = ladder(&LadderCouplings::new(RungSize::Two, rho, v0));
                    r.params.pair_overrides.clear();
                    r.notes.push(format!("rho = {rho} set explicitly"));
                }
                if let Some(v2) = s.v2_override {
                    r.params.pair_overrides.retain(|o| !matches!((o.i, o.j), (0, 2) | (1, 3)));
                    r.params
                        .pair_overrides
                        .extend([PairCoupling { i: 0, j: 2, v: v2 }, PairCoupling { i: 1, j: 3, v: v2 }]);
                    r.geometry.v2 = Some(v2);
                    r.notes.push(format!("V2 = {v2} override on pairs (0,2) and (1,3)"));
                }
                r
            }
            SystemKind::SixAtom => {
                let opts = SixAtomOptions {
                    rho_fixed: s.rho,
                    listed_couplings_only: s.listed_couplings_only.unwrap_or(false),
                    fit_k: self.wants_k_fit(),
                    window: self.grid()?,
                    ..Default::default()
                };
                match_six_atom(
                    target,
                    need(s.omega, "simulator.omega", mode)?,
                    need(s.delta, "simulator.delta", mode)?,
                    need(s.v0, "simulator.v0", mode)?,
                    &opts,
                )?
            }
        };
        Ok(report)
    }

    fn k(&self, report: &MatchReport) -> Result<f64, CliError> {
        let k = self.cfg.k.or(report.time_rescale_k).unwrap_or(1.0);
        if !(k > 0.0) || !k.is_finite() {
            return Err(CliError::config("k", format!("must be positive, got {k}")));
        }
        Ok(k)
    }

    fn initial_m(&self) -> Result<i32, CliError> {
        let m = self.cfg.initial_m.unwrap_or(1);
        if self.system.two_spin() && self.cfg.initial_m.is_some() {
            return Err(CliError::config("initial_m", "two-spin runs start from |0,0>"));
        }
        if !(-1..=1).contains(&m) {
            return Err(CliError::config("initial_m", format!("must be -1, 0 or 1, got {m}")));
        }
        Ok(m)
    }
}

fn line(v0: f64) -> GeometryDescriptor {
    GeometryDescriptor {
        v0,
        rho: None,
        v1: None,
        v2: None,
        v3: None,
    }
}

fn ladder(lc: &LadderCouplings) -> GeometryDescriptor {
    GeometryDescriptor {
        v0: lc.v0,
        rho: Some(lc.rho),
        v1: Some(lc.v1),
        v2: Some(lc.v2),
        v3: lc.v3,
    }
}

fn explicit(
    configuration: Configuration,
    target: &TargetCouplings,
    params: RydbergParams,
    geometry: GeometryDescriptor,
) -> MatchReport {
    MatchReport {
        configuration,
        target: *target,
        params,
        geometry,
        residuals: vec![],
        predicted: vec![],
        time_rescale_k: None,
        notes: vec!["simulator parameters given explicitly".to_string()],
        iterations: None,
    }
}

/// Target and simulator tracers with a common labeling.
fn tracers(ctx: &Ctx, target: &TargetCouplings, report: &MatchReport) -> Result<(SpectralTracer, SpectralTracer), CliError> {
    let map = report.spin_map();
    let h_sim = report.system()?.hamiltonian();
    if ctx.system.two_spin() {
        let (t0, tf) = two_spin_probe(None)?;
        let (s0, sf) = two_spin_probe(Some(&map))?;
        Ok((
            SpectralTracer::new(&build_h2t(target), &t0, &tf)?.with_tag("target"),
            SpectralTracer::new(&h_sim, &s0, &sf)?.with_tag("simulator"),
        ))
    } else {
        let trunc = SpinTruncation::QUTRIT;
        let psi = StateVector::basis(trunc.dim(), trunc.index_of(ctx.initial_m()?));
        Ok((
            SpectralTracer::spin_basis(&build_h1t(target, trunc), &psi, &map)?.with_tag("target"),
            SpectralTracer::spin_sector(&h_sim, &embed_spin_state(&map, &psi)?, &map)?.with_tag("simulator"),
        ))
    }
}

/// The simulator sampled at `t/K` but indexed by target time.
fn rescaled_trace(sim: &SpectralTracer, times: &[f64], k: f64) -> EvolutionTrace {
    let scaled: Vec<f64> = times.iter().map(|t| t / k).collect();
    let mut tr = sim.trace(&scaled);
    tr.times = times.to_vec();
    tr
}

fn spectrum(ctx: &Ctx) -> Result<(Vec<Artifact>, MatchReport), CliError> {
    let target = ctx.target()?;
    let t = &ctx.cfg.target;
    let trunc = SpinTruncation::new(t.m_max.unwrap_or(1)).map_err(|e| CliError::config("target.m_max", e.to_string()))?;
    let h_t = match t.n_sites {
        Some(n) => build_chain_h(&target, trunc, n)?,
        None if ctx.system.two_spin() => build_h2t(&target),
        None => build_h1t(&target, trunc),
    };
    let mut target_json = json!({
        "dim": h_t.dim(),
        "eigenvalues": eig_hermitian(&h_t).eigenvalues,
    });
    if t.n_sites.is_none() && !ctx.system.two_spin() && trunc == SpinTruncation::QUTRIT {
        target_json["analytic"] = serde_json::to_value(analytic_one_spin(&target)).unwrap();
    }

    let report = ctx.simulator(&target)?;
    let sys = report.system()?;
    let map = report.spin_map();
    let levels = spin_sector_levels(&sys, &map)?;
    let mut sim_json = json!({
        "dim": sys.dim(),
        "eigenvalues": eig_hermitian(&sys.hamiltonian()).eigenvalues,
        "spin_sector_levels": levels,
    });
    if !ctx.system.two_spin() {
        let (e0, ep, em) = one_spin_levels(&levels)?;
        sim_json["one_spin"] = json!({"e0": e0, "eplus": ep, "eminus": em, "gap_ratio": (ep - e0) / (em - e0)});
    }
    if ctx.system == SystemKind::ThreeAtom {
        let p = &report.params;
        let mut pert = serde_json::Map::new();
        for (key, tail) in [("without_tail", false), ("with_tail", true)] {
            let (e0, ep, em) = perturbative_three_atom_levels(p.omega, p.delta, report.geometry.v0, tail)?;
            pert.insert(
                key.into(),
                json!({"e0": e0, "eplus": ep, "eminus": em, "gap_ratio": (ep - e0) / (em - e0)}),
            );
        }
        sim_json["perturbative"] = Value::Object(pert);
    }
    let doc = json!({"target": target_json, "simulator": sim_json});
    Ok((vec![Artifact::new("spectrum.json", pretty(&doc))], report))
}

fn evolve(ctx: &Ctx, with_comparison: bool) -> Result<(Vec<Artifact>, MatchReport, f64), CliError> {
    let target = ctx.target()?;
    let report = ctx.simulator(&target)?;
    let k = ctx.k(&report)?;
    let times = ctx.grid()?.times();
    let (tt, st) = tracers(ctx, &target, &report)?;
    let t_trace = tt.trace(&times);
    let s_trace = rescaled_trace(&st, &times, k);
    let csv = joined_csv(&[&t_trace.clone().prefixed("target"), &s_trace.clone().prefixed("simulator")])?;
    let mut files = vec![Artifact::new("traces.csv", csv)];
    if with_comparison {
        let cmp = compare_spectral(&t_trace, &st, Some(k), None)?;
        let mut doc = json!({"deviation": cmp});
        if !ctx.system.two_spin() {
            let physical: Vec<&str> = t_trace.labels();
            doc["max_blockade_leakage"] = json!(blockade_leakage(&s_trace, &physical)?);
        }
        files.push(Artifact::new("comparison.json", pretty(&doc)));
    }
    Ok((files, report, k))
}

struct TrotterRun {
    dt: f64,
    steps: usize,
    shots: u64,
    seed: u64,
}

fn trotter(ctx: &Ctx) -> Result<(Vec<Artifact>, MatchReport, TrotterRun), CliError> {
    let target = ctx.target()?;
    let report = ctx.simulator(&target)?;
    let sys = report.system()?;
    let dt = ctx.cfg.trotter.dt.unwrap_or(1.0 / report.geometry.v0);
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(CliError::config("trotter.dt", format!("must be positive, got {dt}")));
    }
    let start = ctx.cfg.times.start.unwrap_or(0.0);
    if start != 0.0 {
        return Err(CliError::config("times.start", "Trotter runs start at t = 0"));
    }
    let end = ctx.cfg.times.end.unwrap_or(3.0);
    let steps = (end / dt).round();
    if !(steps >= 1.0) || (steps * dt - end).abs() > 1e-9 * end.abs().max(1.0) {
        return Err(CliError::config("times.end", format!("{end} is not a positive multiple of dt = {dt}")));
    }
    let steps = steps as usize;
    let shots = ctx.cfg.trotter.shots.unwrap_or(DEFAULT_SHOTS);
    let seed = ctx.cfg.seed.unwrap_or(DEFAULT_SEED);

    let map = report.spin_map();
    let psi0 = if ctx.system.two_spin() {
        two_spin_probe(Some(&map))?.0
    } else {
        let trunc = SpinTruncation::QUTRIT;
        embed_spin_state(&map, &StateVector::basis(trunc.dim(), trunc.index_of(ctx.initial_m()?)))?
    };
    let step = trotter_step(&sys, dt)?;
    let states = trotter_states(&step, &psi0, steps)?;
    let prop = Propagator::new(&sys.hamiltonian());

    let n = sys.n_atoms();
    let dim = sys.dim();
    let bits: Vec<String> = (0..dim).map(|b| bitstring(b, n)).collect();
    let mut csv = String::from("t");
    for kind in ["trotter", "exact", "shots"] {
        for b in &bits {
            csv.push_str(&format!(",{kind}:{b}"));
        }
    }
    csv.push('\n');
    let mut shot_docs = vec![];
    let mut max_dev = 0.0_f64;
    for (j, psi) in states.iter().enumerate() {
        let t = j as f64 * dt;
        let exact = prop.evolve(t, &psi0)?.probabilities();
        let trot = psi.probabilities();
        let sample = sample_shots(psi, shots, seed.wrapping_add(j as u64))?;
        csv.push_str(&fmt_num(t));
        for p in &trot {
            csv.push(',');
            csv.push_str(&fmt_num(*p));
        }
        for p in &exact {
            csv.push(',');
            csv.push_str(&fmt_num(*p));
        }
        for b in &bits {
            csv.push(',');
            csv.push_str(&fmt_num(sample.frequency(b)));
        }
        csv.push('\n');
        for (a, b) in trot.iter().zip(&exact) {
            max_dev = max_dev.max((a - b).abs());
        }
        shot_docs.push(json!({"t": t, "seed": sample.seed, "shots": sample.shots, "counts": sample.counts}));
    }
    let summary = json!({
        "dt": dt,
        "steps": steps,
        "max_abs_dev": max_dev,
        "step_gates": step.gates.len(),
    });
    let files = vec![
        Artifact::new("trotter.csv", csv),
        Artifact::new("shots.json", pretty(&Value::Array(shot_docs))),
        Artifact::new("circuit.json", format!("{}\n", step.to_json())),
        Artifact::new("trotter_summary.json", pretty(&summary)),
    ];
    Ok((files, report, TrotterRun { dt, steps, shots, seed }))
}

fn manifest(ctx: &Ctx, report: &MatchReport, extra: Value, files: &[Artifact]) -> Result<Artifact, CliError> {
    let geometry = report.atom_geometry()?;
    let mut config = ctx.cfg.clone();
    // The output location does not affect the results.
    config.out = None;
    config.mode = Some(ctx.mode);
    let g = &report.geometry;
    let mut resolved = json!({
        "system": ctx.system,
        "target": report.target,
        "simulator": {
            "omega": report.params.omega,
            "delta": report.params.delta,
            "delta0": report.params.delta0,
            "V0": g.v0,
            "V1": g.v1,
            "V2": g.v2,
            "V3": g.v3,
            "rho": g.rho,
            "pair_overrides": report.params.pair_overrides,
            "v2_override": ctx.cfg.simulator.v2_override,
            "listed_couplings_only": ctx.cfg.simulator.listed_couplings_only.unwrap_or(false),
        },
        "geometry_file": GeometryFile::from_parts(&geometry, &report.params),
        "notes": report.notes,
    });
    if let (Value::Object(r), Value::Object(e)) = (&mut resolved, extra) {
        r.extend(e);
    }
    let doc = json!({
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "mode": ctx.mode,
        "preset": ctx.cfg.preset,
        "config": config,
        "resolved": resolved,
        "files": files.iter().map(|f| f.name.clone()).collect::<Vec<_>>(),
    });
    Ok(Artifact::new(MANIFEST, pretty(&doc)))
}

/// Validates the config and computes every artifact, manifest last,
/// without touching the filesystem.
pub fn execute(cfg: &ExperimentConfig) -> Result<Vec<Artifact>, CliError> {
    let mode = cfg.mode.ok_or_else(|| CliError::config("mode", "missing"))?;
    let system = need(cfg.system, "system", mode)?;
    let ctx = Ctx {
        mode,
        system,
        cfg: cfg.clone(),
    };
    let (mut files, report, extra) = match mode {
        Mode::Spectrum => {
            let (f, r) = spectrum(&ctx)?;
            (f, r, json!({}))
        }
        Mode::Match => {
            let target = ctx.target()?;
            let r = ctx.simulator(&target)?;
            let f = vec![Artifact::new("match.json", format!("{}\n", r.to_json()))];
            (f, r, json!({"K": cfg.k}))
        }
        Mode::Evolve | Mode::Compare => {
            let (f, r, k) = evolve(&ctx, mode == Mode::Compare)?;
            let g = ctx.grid()?;
            let extra = json!({
                "K": k,
                "K_fitted": cfg.k.is_none() && r.time_rescale_k.is_some(),
                "times": {"start": g.start, "end": g.end, "points": g.points},
                "initial": if system.two_spin() { "|0,0>".to_string() } else { format!("m={}", ctx.initial_m()?) },
            });
            (f, r, extra)
        }
        Mode::Trotter => {
            let (f, r, t) = trotter(&ctx)?;
            let extra = json!({"dt": t.dt, "steps": t.steps, "shots": t.shots, "seed": t.seed});
            (f, r, extra)
        }
    };
    let m = manifest(&ctx, &report, extra, &files)?;
    files.push(m);
    Ok(files)
}

pub fn write_artifacts(dir: &Path, files: &[Artifact]) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    files
        .iter()
        .map(|f| {
            let p = dir.join(&f.name);
            std::fs::write(&p, &f.contents).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            Ok(p)
        })
        .collect()
}

/// Executes `cfg` and writes the artifacts into its output directory.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, CliError> {
    let files = execute(cfg)?;
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    write_artifacts(&dir, &files)
}
