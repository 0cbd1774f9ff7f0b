//! Labeled transition-probability traces, time rescaling and trace scoring.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::{HermitianOperator, Propagator, StateVector, TransitionAmplitude, C64};
use crate::rydberg::SpinAtomMap;

pub const LEAKAGE_LABEL: &str = "leakage";

/// Tolerance for "probabilities sum to one".
pub const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn new(start: f64, end: f64, points: usize) -> Result<Self> {
        let g = Self { start, end, points };
        g.validate()?;
        Ok(g)
    }

    /// 1001 points on `[0, end]`.
    pub fn standard(end: f64) -> Self {
        Self {
            start: 0.0,
            end,
            points: 1001,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.start.is_finite() || !self.end.is_finite() || self.end < self.start {
            return Err(invalid("times", format!("bad window [{}, {}]", self.start, self.end)));
        }
        if self.points == 0 || (self.points == 1 && self.end > self.start) {
            return Err(invalid("times", "need at least two points for a non-empty window"));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    self.end
                } else {
                    self.start + step * k as f64
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledState {
    pub label: String,
    pub state: StateVector,
}

impl LabeledState {
    pub fn new(label: impl Into<String>, state: StateVector) -> Self {
        Self {
            label: label.into(),
            state,
        }
    }
}

/// `"m=1"` for one spin, `"|1,-1>"` for several.
pub fn spin_label(ms: &[i32]) -> String {
    if let [m] = ms {
        format!("m={m}")
    } else {
        let inner: Vec<String> = ms.iter().map(i32::to_string).collect();
        format!("|{}>", inner.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionTrace {
    pub system_tag: String,
    pub times: Vec<f64>,
    pub series: Vec<Series>,
    /// Whether the series partition the full basis.
    #[serde(default)]
    pub complete: bool,
}

impl EvolutionTrace {
    pub fn labels(&self) -> Vec<&str> {
        self.series.iter().map(|s| s.label.as_str()).collect()
    }

    pub fn get(&self, label: &str) -> Result<&[f64]> {
        self.series
            .iter()
            .find(|s| s.label == label)
            .map(|s| s.values.as_slice())
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Checks the per-time sum for complete traces and the `[0, 1]` range.
    pub fn check(&self) -> Result<()> {
        for (k, &t) in self.times.iter().enumerate() {
            let mut sum = 0.0;
            for s in &self.series {
                let p = s.values[k];
                if !(-NORMALIZATION_TOL..=1.0 + NORMALIZATION_TOL).contains(&p) {
                    return Err(Error::IncompleteTrace { time: t, sum: p });
                }
                sum += p;
            }
            if self.complete && (sum - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::IncompleteTrace { time: t, sum });
            }
        }
        Ok(())
    }

    /// Linear interpolation of one series.
    pub fn interpolate(&self, label: &str, t: f64) -> Result<f64> {
        let values = self.get(label)?;
        let (start, end) = (self.times[0], *self.times.last().unwrap());
        let slack = 1e-12 * end.abs().max(1.0);
        if t < start - slack || t > end + slack {
            return Err(Error::TimeOutOfRange { time: t, start, end });
        }
        let t = t.clamp(start, end);
        let hi = self.times.partition_point(|&s| s < t).min(self.times.len() - 1);
        if hi == 0 || self.times[hi] == t {
            return Ok(values[hi]);
        }
        let lo = hi - 1;
        let w = (t - self.times[lo]) / (self.times[hi] - self.times[lo]);
        Ok(values[lo] + w * (values[hi] - values[lo]))
    }

    /// Header `t,label…`, 12 significant digits, `\n` endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for s in &self.series {
            out.push(',');
            out.push_str(&s.label);
        }
        out.push('\n');
        for (k, t) in self.times.iter().enumerate() {
            write!(out, "{}", fmt_num(*t)).unwrap();
            for s in &self.series {
                write!(out, ",{}", fmt_num(s.values[k])).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    /// Renames every series to `prefix:label`.
    pub fn prefixed(mut self, prefix: &str) -> Self {
        for s in &mut self.series {
            s.label = format!("{prefix}:{}", s.label);
        }
        self
    }
}

pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

/// Several traces on one time grid joined column-wise.
pub fn joined_csv(traces: &[&EvolutionTrace]) -> Result<String> {
    let first = traces.first().ok_or_else(|| invalid("traces", "nothing to join"))?;
    let mut all = EvolutionTrace {
        system_tag: String::new(),
        times: first.times.clone(),
        series: vec![],
        complete: false,
    };
    for t in traces {
        if t.times != first.times {
            return Err(invalid("traces", "time grids differ"));
        }
        all.series.extend(t.series.iter().cloned());
    }
    Ok(all.to_csv())
}

enum Observable {
    Overlap(TransitionAmplitude),
    Population(Vec<usize>),
}

/// Evaluates labeled probabilities at arbitrary times from one spectral
/// decomposition.
pub struct SpectralTracer {
    tag: String,
    propagator: Propagator,
    psi0: StateVector,
    observables: Vec<(String, Observable)>,
    complete: bool,
}

impl SpectralTracer {
    /// Overlap observables `|⟨f|U(t)|ψ₀⟩|²`.
    pub fn new(h: &HermitianOperator, psi0: &StateVector, finals: &[LabeledState]) -> Result<Self> {
        let propagator = Propagator::new(h);
        let observables = finals
            .iter()
            .map(|f| Ok((f.label.clone(), Observable::Overlap(propagator.transition(psi0, &f.state)?))))
            .collect::<Result<_>>()?;
        Ok(Self {
            tag: String::new(),
            propagator,
            psi0: psi0.clone(),
            observables,
            complete: false,
        })
    }

    /// Every basis state as its own series.
    pub fn basis(h: &HermitianOperator, psi0: &StateVector, labels: &[String]) -> Result<Self> {
        if labels.len() != h.dim() {
            return Err(Error::DimensionMismatch {
                expected: h.dim(),
                found: labels.len(),
            });
        }
        let finals: Vec<LabeledState> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| LabeledState::new(l.clone(), StateVector::basis(h.dim(), i)))
            .collect();
        let mut t = Self::new(h, psi0, &finals)?;
        t.complete = true;
        Ok(t)
    }

    /// Spin-sector series for an atom Hamiltonian, with the unmapped
    /// product states summed under `"leakage"`.
    pub fn spin_sector(h: &HermitianOperator, psi0: &StateVector, map: &SpinAtomMap) -> Result<Self> {
        if h.dim() != map.atom_dim() {
            return Err(Error::DimensionMismatch {
                expected: map.atom_dim(),
                found: h.dim(),
            });
        }
        let states = map.spin_states();
        let finals: Vec<LabeledState> = states
            .iter()
            .map(|&(k, a)| LabeledState::new(spin_label(&map.spin_numbers(k)), StateVector::basis(h.dim(), a)))
            .collect();
        let mut t = Self::new(h, psi0, &finals)?;
        let leak: Vec<usize> = (0..h.dim()).filter(|a| !states.iter().any(|s| s.1 == *a)).collect();
        t.observables.push((LEAKAGE_LABEL.to_string(), Observable::Population(leak)));
        t.complete = true;
        Ok(t)
    }

    /// Series over the full spin basis of a target Hamiltonian.
    pub fn spin_basis(h: &HermitianOperator, psi0: &StateVector, map: &SpinAtomMap) -> Result<Self> {
        let labels: Vec<String> = (0..map.spin_dim()).map(|k| spin_label(&map.spin_numbers(k))).collect();
        Self::basis(h, psi0, &labels)
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = tag.into();
        self
    }

    pub fn labels(&self) -> Vec<&str> {
        self.observables.iter().map(|o| o.0.as_str()).collect()
    }

    pub fn probabilities(&self, t: f64) -> Vec<f64> {
        let needs_state = self
            .observables
            .iter()
            .any(|o| matches!(o.1, Observable::Population(_)));
        let state = if needs_state {
            Some(self.propagator.evolve(t, &self.psi0).expect("dimensions checked"))
        } else {
            None
        };
        self.observables
            .iter()
            .map(|(_, o)| match o {
                Observable::Overlap(a) => a.probability(t),
                Observable::Population(idx) => {
                    let amps = state.as_ref().unwrap().amplitudes();
                    idx.iter().map(|&i| amps[i].norm_sqr()).sum()
                }
            })
            .collect()
    }

    pub fn trace(&self, times: &[f64]) -> EvolutionTrace {
        let mut series: Vec<Series> = self
            .observables
            .iter()
            .map(|(l, _)| Series {
                label: l.clone(),
                values: Vec::with_capacity(times.len()),
            })
            .collect();
        for &t in times {
            for (s, p) in series.iter_mut().zip(self.probabilities(t)) {
                s.values.push(p);
            }
        }
        EvolutionTrace {
            system_tag: self.tag.clone(),
            times: times.to_vec(),
            series,
            complete: self.complete,
        }
    }
}

/// `P_f(t) = |⟨f|U(t)|ψ₀⟩|²` for each labeled final state.
pub fn trace(h: &HermitianOperator, psi0: &StateVector, finals: &[LabeledState], times: &[f64]) -> Result<EvolutionTrace> {
    Ok(SpectralTracer::new(h, psi0, finals)?.trace(times))
}

/// `(|0,1⟩ + |0,−1⟩ + |1,0⟩ + |−1,0⟩)/2` in the two-qutrit basis.
pub fn symmetric_state_two_spin() -> StateVector {
    let mut amps = vec![C64::new(0.0, 0.0); 9];
    // index = 3·(1 − m₁) + (1 − m₂)
    for k in [3, 5, 1, 7] {
        amps[k] = C64::new(0.5, 0.0);
    }
    StateVector::from_amplitudes(amps).expect("nonzero")
}

/// Largest total probability outside `physical` over the trace.
pub fn blockade_leakage(trace: &EvolutionTrace, physical: &[&str]) -> Result<f64> {
    if !trace.complete {
        return Err(invalid("trace", "leakage needs a complete-basis trace"));
    }
    for l in physical {
        trace.get(l)?;
    }
    let outside: Vec<&Series> = trace
        .series
        .iter()
        .filter(|s| !physical.contains(&s.label.as_str()))
        .collect();
    Ok((0..trace.times.len())
        .map(|k| outside.iter().map(|s| s.values[k]).sum::<f64>())
        .fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelDeviation {
    pub label: String,
    pub max_abs_dev: f64,
    pub rms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceComparison {
    pub max_abs_dev: f64,
    pub rms: f64,
    pub per_label: Vec<LabelDeviation>,
    pub time_window: (f64, f64),
    pub time_rescale_k: Option<f64>,
}

impl TraceComparison {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("comparison serializes")
    }

    fn from_deviations(labels: Vec<String>, devs: Vec<Vec<f64>>, window: (f64, f64), k: Option<f64>) -> Self {
        let per_label: Vec<LabelDeviation> = labels
            .into_iter()
            .zip(&devs)
            .map(|(label, d)| LabelDeviation {
                label,
                max_abs_dev: d.iter().fold(0.0, |m, x| m.max(x.abs())),
                rms: rms(d),
            })
            .collect();
        let all: Vec<f64> = devs.into_iter().flatten().collect();
        Self {
            max_abs_dev: per_label.iter().fold(0.0, |m, l| m.max(l.max_abs_dev)),
            rms: rms(&all),
            per_label,
            time_window: window,
            time_rescale_k: k,
        }
    }
}

fn rms(d: &[f64]) -> f64 {
    if d.is_empty() {
        return 0.0;
    }
    (d.iter().map(|x| x * x).sum::<f64>() / d.len() as f64).sqrt()
}

fn common_labels(target: &[&str], sim: &[&str]) -> Result<Vec<String>> {
    let labels: Vec<String> = target
        .iter()
        .filter(|l| sim.contains(l))
        .map(|l| l.to_string())
        .collect();
    if labels.is_empty() {
        return Err(Error::NoCommonLabels);
    }
    Ok(labels)
}

fn check_k(k: Option<f64>) -> Result<f64> {
    match k {
        Some(k) if !(k > 0.0) || !k.is_finite() => Err(invalid("K", format!("must be positive, got {k}"))),
        Some(k) => Ok(k),
        None => Ok(1.0),
    }
}

fn window_times(times: &[f64], window: Option<(f64, f64)>) -> (Vec<usize>, (f64, f64)) {
    let (lo, hi) = window.unwrap_or((times[0], *times.last().unwrap()));
    let idx = (0..times.len())
        .filter(|&k| times[k] >= lo && times[k] <= hi)
        .collect();
    (idx, (lo, hi))
}

/// Deviations on the target grid, reading the simulator at `t/K` by linear
/// interpolation. `window` restricts the target times used.
pub fn compare(
    target: &EvolutionTrace,
    sim: &EvolutionTrace,
    k: Option<f64>,
    window: Option<(f64, f64)>,
) -> Result<TraceComparison> {
    let kv = check_k(k)?;
    let labels = common_labels(&target.labels(), &sim.labels())?;
    let (idx, win) = window_times(&target.times, window);
    let mut devs = vec![];
    for l in &labels {
        let tv = target.get(l)?;
        let d = idx
            .iter()
            .map(|&i| Ok(sim.interpolate(l, target.times[i] / kv)? - tv[i]))
            .collect::<Result<Vec<f64>>>()?;
        devs.push(d);
    }
    Ok(TraceComparison::from_deviations(labels, devs, win, k))
}

/// Like [`compare`] but evaluates the simulator exactly at `t/K`.
pub fn compare_spectral(
    target: &EvolutionTrace,
    sim: &SpectralTracer,
    k: Option<f64>,
    window: Option<(f64, f64)>,
) -> Result<TraceComparison> {
    let kv = check_k(k)?;
    let sim_labels = sim.labels();
    let labels = common_labels(&target.labels(), &sim_labels)?;
    let cols: Vec<usize> = labels
        .iter()
        .map(|l| sim_labels.iter().position(|s| s == l).unwrap())
        .collect();
    let (idx, win) = window_times(&target.times, window);
    let mut devs = vec![Vec::with_capacity(idx.len()); labels.len()];
    for &i in &idx {
        let p = sim.probabilities(target.times[i] / kv);
        for (j, l) in labels.iter().enumerate() {
            devs[j].push(p[cols[j]] - target.get(l)?[i]);
        }
    }
    Ok(TraceComparison::from_deviations(labels, devs, win, k))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RescaleFit {
    pub k: f64,
    pub rms: f64,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of `f` on `[a, b]`.
pub fn golden_section(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Finds the `K` in `[k_lo, k_hi]` minimizing the RMS between the target and
/// the simulator read at `t/K`: a uniform scan, then golden-section
/// refinement around the best scan point.
pub fn fit_time_rescale(
    target: &EvolutionTrace,
    sim: &SpectralTracer,
    k_lo: f64,
    k_hi: f64,
    window: Option<(f64, f64)>,
) -> Result<RescaleFit> {
    if !(k_lo > 0.0) || !(k_hi > k_lo) {
        return Err(Error::Bracket(format!("invalid K range [{k_lo}, {k_hi}]")));
    }
    common_labels(&target.labels(), &sim.labels())?;
    const SCAN: usize = 401;
    let cost = |k: f64| compare_spectral(target, sim, Some(k), window).map(|c| c.rms);
    let step = (k_hi - k_lo) / (SCAN - 1) as f64;
    let mut best = (0, f64::INFINITY);
    for j in 0..SCAN {
        let r = cost(k_lo + step * j as f64)?;
        if r < best.1 {
            best = (j, r);
        }
    }
    let a = k_lo + step * best.0.saturating_sub(1) as f64;
    let b = (k_lo + step * (best.0 + 1) as f64).min(k_hi);
    let (k, r) = golden_section(|k| cost(k).unwrap_or(f64::INFINITY), a, b, 1e-10 * k_hi);
    if !r.is_finite() {
        return Err(Error::Bracket("RMS not finite in the K bracket".into()));
    }
    Ok(if r <= best.1 {
        RescaleFit { k, rms: r }
    } else {
        RescaleFit {
            k: k_lo + step * best.0 as f64,
            rms: best.1,
        }
    })
}
