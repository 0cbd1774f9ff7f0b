//! Target ↔ simulator parameter matching for the two-, three-, four- and
//! six-atom arrays.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::evolution::{fit_time_rescale, golden_section, symmetric_state_two_spin, LabeledState, SpectralTracer, TimeGrid};
use crate::numerics::{eig_hermitian, StateVector};
use crate::rydberg::{
    embed_spin_state, geometry_mirrored_ladder, geometry_three_atom_line, geometry_two_atom, listed_couplings_only,
    AtomGeometry, Encoding, LadderCouplings, PairCoupling, RungSize, RydbergParams, RydbergSystem, SpinAtomMap,
};
use crate::target::{analytic_one_spin, build_h2t, TargetCouplings};

pub const DEFAULT_BLOCKADE_RATIO: f64 = 64.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Configuration {
    TwoAtom,
    ThreeAtom,
    FourAtom,
    SixAtom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Named {
    pub name: String,
    pub value: f64,
}

fn named(pairs: &[(&str, f64)]) -> Vec<Named> {
    pairs
        .iter()
        .map(|&(name, value)| Named {
            name: name.to_string(),
            value,
        })
        .collect()
}

/// Nearest-neighbor interaction and, for ladders, the cross couplings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryDescriptor {
    pub v0: f64,
    pub rho: Option<f64>,
    pub v1: Option<f64>,
    pub v2: Option<f64>,
    pub v3: Option<f64>,
}

impl GeometryDescriptor {
    fn line(v0: f64) -> Self {
        Self {
            v0,
            rho: None,
            v1: None,
            v2: None,
            v3: None,
        }
    }

    fn ladder(lc: &LadderCouplings) -> Self {
        Self {
            v0: lc.v0,
            rho: Some(lc.rho),
            v1: Some(lc.v1),
            v2: Some(lc.v2),
            v3: lc.v3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub configuration: Configuration,
    pub target: TargetCouplings,
    pub params: RydbergParams,
    pub geometry: GeometryDescriptor,
    pub residuals: Vec<Named>,
    pub predicted: Vec<Named>,
    pub time_rescale_k: Option<f64>,
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
}

impl MatchReport {
    pub fn residual(&self, name: &str) -> Option<f64> {
        self.residuals.iter().find(|r| r.name == name).map(|r| r.value)
    }

    pub fn predicted_value(&self, name: &str) -> Option<f64> {
        self.predicted.iter().find(|r| r.name == name).map(|r| r.value)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Atom positions with `a_r = 1`.
    pub fn atom_geometry(&self) -> Result<AtomGeometry> {
        let v0 = self.geometry.v0;
        match self.configuration {
            Configuration::TwoAtom => geometry_two_atom(1.0, v0),
            Configuration::ThreeAtom => geometry_three_atom_line(1.0, v0),
            Configuration::FourAtom | Configuration::SixAtom => {
                let rung = if self.configuration == Configuration::FourAtom {
                    RungSize::Two
                } else {
                    RungSize::Three
                };
                let rho = self.geometry.rho.unwrap_or(0.0);
                // ρ = 0 columns are decoupled by overrides on a nominal spacing.
                let a_s = if rho > 0.0 { 1.0 / rho } else { 1.0 };
                geometry_mirrored_ladder(rung, 1.0, a_s, v0)
            }
        }
    }

    pub fn system(&self) -> Result<RydbergSystem> {
        RydbergSystem::new(self.atom_geometry()?, self.params.clone())
    }

    pub fn encoding(&self) -> Encoding {
        match self.configuration {
            Configuration::TwoAtom | Configuration::FourAtom => Encoding::TwoAtom,
            Configuration::ThreeAtom | Configuration::SixAtom => Encoding::ThreeAtom,
        }
    }

    pub fn spin_map(&self) -> SpinAtomMap {
        let spins = match self.configuration {
            Configuration::TwoAtom | Configuration::ThreeAtom => 1,
            Configuration::FourAtom | Configuration::SixAtom => 2,
        };
        SpinAtomMap::new(self.encoding(), spins)
    }
}

/// `Δ = −U/2`, `Ω = −X`, `V₀ = ratio·|Ω|` (or `ratio·|U|/2` when `X = 0`).
pub fn match_two_atom(c: &TargetCouplings, blockade_ratio: f64) -> Result<MatchReport> {
    c.validate()?;
    if !(blockade_ratio > 0.0) {
        return Err(invalid("blockade_ratio", "must be positive"));
    }
    let omega = -c.x;
    let delta = -c.u / 2.0;
    let v0 = if c.x == 0.0 {
        blockade_ratio * c.u.abs() / 2.0
    } else {
        blockade_ratio * omega.abs()
    };
    let s = analytic_one_spin(c);
    let mut notes = vec![];
    if c.x == 0.0 {
        notes.push("X = 0: no drive, dynamics diagonal".to_string());
    }
    Ok(MatchReport {
        configuration: Configuration::TwoAtom,
        target: *c,
        params: RydbergParams::new(omega, delta),
        geometry: GeometryDescriptor::line(v0),
        residuals: named(&[("delta + U/2", delta + c.u / 2.0), ("omega + X", omega + c.x)]),
        predicted: named(&[("E0", s.e0), ("E+", s.eplus), ("E-", s.eminus), ("phi", s.phi)]),
        time_rescale_k: None,
        notes,
        iterations: None,
    })
}

/// Parameter point of the three-atom line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreeAtomPoint {
    pub omega: f64,
    pub delta: f64,
    pub delta0: f64,
    pub v0: f64,
}

impl ThreeAtomPoint {
    fn get(&self, u: Unknown) -> f64 {
        match u {
            Unknown::Omega => self.omega,
            Unknown::Delta => self.delta,
            Unknown::Delta0 => self.delta0,
            Unknown::V0 => self.v0,
        }
    }

    fn set(&mut self, u: Unknown, v: f64) {
        match u {
            Unknown::Omega => self.omega = v,
            Unknown::Delta => self.delta = v,
            Unknown::Delta0 => self.delta0 = v,
            Unknown::V0 => self.v0 = v,
        }
    }
}

fn denominator(name: &'static str, value: f64, scale: f64) -> Result<f64> {
    if value.abs() <= 1e-12 * scale || !value.is_finite() {
        return Err(Error::Singular { denominator: name, value });
    }
    Ok(value)
}

/// Residuals of the two energy-difference conditions and the mixing-angle
/// condition of the three-atom perturbative match.
pub fn three_atom_residuals(p: &ThreeAtomPoint, c: &TargetCouplings) -> Result<[f64; 3]> {
    let u = denominator("U", c.u, c.u.abs().max(1.0))?;
    let s2 = 2.0_f64.sqrt();
    if p.omega == 0.0 {
        return Ok([c.x * c.x / u, u / 2.0 + c.x * c.x / u - p.delta0, s2 * c.x / u]);
    }
    let scale = [p.delta, p.delta0, p.v0, 1.0].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let d = denominator("delta", p.delta, scale)?;
    let d_tail = denominator("delta - V0/64", p.delta - p.v0 / 64.0, scale)?;
    let d_plus = denominator("delta + delta0", p.delta + p.delta0, scale)?;
    let v_minus = denominator("V0 - delta", p.v0 - p.delta, scale)?;
    let v_minus0 = denominator("V0 - delta - delta0", p.v0 - p.delta - p.delta0, scale)?;
    let d0 = denominator("delta0", p.delta0, scale)?;
    let w = p.omega * p.omega;
    let r1 = c.x * c.x / u - (w / 2.0) * (1.0 / d_tail - 1.0 / d);
    let r2 = u / 2.0 + c.x * c.x / u - p.delta0 - (w / 4.0) * (1.0 / d_plus + 2.0 / v_minus - 1.0 / v_minus0);
    let r3 = s2 * c.x / u - (w / (2.0 * s2 * d0)) * (1.0 / d + 1.0 / v_minus0);
    Ok([r1, r2, r3])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unknown {
    Omega,
    Delta,
    Delta0,
    V0,
}

impl Unknown {
    fn name(self) -> &'static str {
        match self {
            Self::Omega => "omega",
            Self::Delta => "delta",
            Self::Delta0 => "delta0",
            Self::V0 => "V0",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonProblem {
    pub unknowns: Vec<Unknown>,
    /// Values of the fixed parameters, and the starting values of the unknowns.
    pub start: ThreeAtomPoint,
    /// Indices into `(r₁, r₂, r₃)`; one per unknown.
    pub equations: Vec<usize>,
    pub targets: TargetCouplings,
}

impl NewtonProblem {
    /// Solve for `(Ω, Δ, Δ₀)` at fixed `V₀` from the default start
    /// `Ω = −X`, `Δ = −U/2`, `Δ₀ = U/2`.
    pub fn fixed_v0(targets: TargetCouplings, v0: f64) -> Self {
        Self {
            unknowns: vec![Unknown::Omega, Unknown::Delta, Unknown::Delta0],
            start: ThreeAtomPoint {
                omega: -targets.x,
                delta: -targets.u / 2.0,
                delta0: targets.u / 2.0,
                v0,
            },
            equations: vec![0, 1, 2],
            targets,
        }
    }

    pub fn with_start(mut self, start: ThreeAtomPoint) -> Self {
        self.start = start;
        self
    }

    fn validate(&self) -> Result<()> {
        self.targets.validate()?;
        let n = self.unknowns.len();
        if n == 0 || n > 3 || self.equations.len() != n {
            return Err(invalid("unknowns", "need one equation per unknown, at most three"));
        }
        for (k, u) in self.unknowns.iter().enumerate() {
            if self.unknowns[..k].contains(u) {
                return Err(invalid("unknowns", format!("{} listed twice", u.name())));
            }
        }
        let mut eq = self.equations.clone();
        eq.sort();
        eq.dedup();
        if eq.len() != n || eq.iter().any(|&e| e > 2) {
            return Err(invalid("equations", "indices must be distinct and in 0..3"));
        }
        Ok(())
    }
}

pub const NEWTON_TOL: f64 = 1e-10;
pub const NEWTON_MAX_ITER: usize = 100;
const MAX_HALVINGS: usize = 20;
const POLISH_STEPS: usize = 3;

fn residual_names() -> [&'static str; 3] {
    ["r1", "r2", "r3"]
}

fn newton_step(
    prob: &NewtonProblem,
    eval: &impl Fn(&ThreeAtomPoint) -> Result<DVector<f64>>,
    p: &ThreeAtomPoint,
    r: &DVector<f64>,
    iteration: usize,
) -> Result<DVector<f64>> {
    let n = prob.unknowns.len();
    let singular = Error::SingularJacobian { iteration };
    let mut jac = DMatrix::zeros(n, n);
    for (j, &u) in prob.unknowns.iter().enumerate() {
        let x = p.get(u);
        let h = 1e-6 * x.abs().max(1.0);
        let (mut plus, mut minus) = (*p, *p);
        plus.set(u, x + h);
        minus.set(u, x - h);
        let (rp, rm) = match (eval(&plus), eval(&minus)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return Err(singular),
        };
        jac.set_column(j, &((rp - rm) / (2.0 * h)));
    }
    if jac.iter().any(|v| !v.is_finite()) || jac.amax() == 0.0 {
        return Err(singular);
    }
    let svd = jac.svd(true, true);
    let cutoff = 1e-13 * svd.singular_values.max();
    svd.solve(&(-r), cutoff).map_err(|_| singular)
}

/// Damped Newton iteration with a central-difference Jacobian.
pub fn solve_three_atom_newton(prob: &NewtonProblem) -> Result<MatchReport> {
    prob.validate()?;
    let n = prob.unknowns.len();
    let eval = |p: &ThreeAtomPoint| -> Result<DVector<f64>> {
        let r = three_atom_residuals(p, &prob.targets)?;
        Ok(DVector::from_iterator(n, prob.equations.iter().map(|&e| r[e])))
    };
    let diagnostic = |iterations: usize, p: &ThreeAtomPoint, norm: f64, reason: &str| {
        let residuals = three_atom_residuals(p, &prob.targets)
            .map(|r| residual_names().iter().map(|s| s.to_string()).zip(r).collect())
            .unwrap_or_default();
        Error::NonConvergence {
            iterations,
            residual_norm: norm,
            residuals,
            reason: reason.to_string(),
        }
    };

    let mut p = prob.start;
    let mut r = eval(&p)?;
    let mut iterations = 0;
    let mut polish = 0;
    loop {
        let converged = r.norm() <= NEWTON_TOL;
        // A few extra steps past the tolerance tighten the parameters, which
        // are less well conditioned than the residuals.
        if converged && (polish == POLISH_STEPS || r.norm() == 0.0) {
            break;
        }
        if converged {
            polish += 1;
        }
        if iterations == NEWTON_MAX_ITER {
            if converged {
                break;
            }
            return Err(diagnostic(iterations, &p, r.norm(), "iteration limit"));
        }
        let step = match newton_step(prob, &eval, &p, &r, iterations) {
            Ok(step) => step,
            Err(_) if converged => break,
            Err(e) => return Err(e),
        };

        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let mut trial = p;
            for (j, &u) in prob.unknowns.iter().enumerate() {
                trial.set(u, p.get(u) + lambda * step[j]);
            }
            if let Ok(rt) = eval(&trial) {
                if rt.norm() < r.norm() {
                    accepted = Some((trial, rt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((trial, rt)) => {
                p = trial;
                r = rt;
            }
            None if converged => break,
            None => return Err(diagnostic(iterations, &p, r.norm(), "damped step did not reduce the residual")),
        }
        iterations += 1;
    }

    // Residuals depend on Ω², so fix the sign by the Ω = −X convention.
    p.omega = if prob.targets.x == 0.0 {
        -p.omega.abs()
    } else {
        -prob.targets.x.signum() * p.omega.abs()
    };
    let full = three_atom_residuals(&p, &prob.targets)?;
    let s = analytic_one_spin(&prob.targets);
    Ok(MatchReport {
        configuration: Configuration::ThreeAtom,
        target: prob.targets,
        params: RydbergParams::new(p.omega, p.delta).with_delta0(p.delta0, vec![1]),
        geometry: GeometryDescriptor::line(p.v0),
        residuals: named(&[("r1", full[0]), ("r2", full[1]), ("r3", full[2])]),
        predicted: named(&[("E0", s.e0), ("E+", s.eplus), ("E-", s.eminus), ("phi", s.phi)]),
        time_rescale_k: None,
        notes: vec![],
        iterations: Some(iterations),
    })
}

/// Second-order energy matrix of the even sector `{|grg⟩, (|rgg⟩+|ggr⟩)/√2}`
/// at `Δ₀ = 0`, so that `E = −Δ − (Ω²/4)·eig(𝕄)`. Dropping the tail replaces
/// `Δ − V₀/64` by `Δ`.
pub fn degenerate_matrix_m(delta: f64, v0: f64, include_tail: bool) -> Result<[[f64; 2]; 2]> {
    let scale = delta.abs().max(v0.abs()).max(1.0);
    let d = denominator("delta", delta, scale)?;
    let vd = denominator("V0 - delta", v0 - delta, scale)?;
    let tail = if include_tail {
        denominator("delta - V0/64", delta - v0 / 64.0, scale)?
    } else {
        d
    };
    let s2 = 2.0_f64.sqrt();
    let m11 = 1.0 / d + 2.0 / vd;
    let m12 = s2 / d + s2 / vd;
    let m22 = 2.0 / d + 1.0 / vd - 2.0 / tail;
    Ok([[m11, m12], [m12, m22]])
}

pub fn symmetric_eigenvalues(m: &[[f64; 2]; 2]) -> (f64, f64) {
    let mean = 0.5 * (m[0][0] + m[1][1]);
    let half = 0.5 * (m[0][0] - m[1][1]);
    let r = half.hypot(m[0][1]);
    (mean + r, mean - r)
}

/// Second-order three-atom levels `(E₀, E₊, E₋)` at `Δ₀ = 0`.
pub fn perturbative_three_atom_levels(omega: f64, delta: f64, v0: f64, include_tail: bool) -> Result<(f64, f64, f64)> {
    let m = degenerate_matrix_m(delta, v0, include_tail)?;
    let (hi, lo) = symmetric_eigenvalues(&m);
    let w = omega * omega / 4.0;
    let odd = 1.0 / (v0 - delta);
    let (e_a, e_b) = (-delta - w * hi, -delta - w * lo);
    Ok((e_a.min(e_b), e_a.max(e_b), -delta - w * odd))
}

/// `(E₊ − E₀)/(E₋ − E₀)`.
pub fn predicted_gap_ratio(omega: f64, delta: f64, v0: f64, include_tail: bool) -> Result<f64> {
    let (e0, ep, em) = perturbative_three_atom_levels(omega, delta, v0, include_tail)?;
    Ok((ep - e0) / (em - e0))
}

/// Approximate match at `V₀ = 2Δ`, `Δ₀ = 0`: the perturbative spectrum has
/// the target's gap structure with `U = Ω²/Δ`, `tan φ = 1/√2`.
pub fn approx_three_atom_match(omega: f64, delta: f64) -> Result<MatchReport> {
    if delta == 0.0 || !delta.is_finite() || !omega.is_finite() {
        return Err(Error::Singular {
            denominator: "delta",
            value: delta,
        });
    }
    let v0 = 2.0 * delta;
    let u = omega * omega / delta;
    let ratio_approx = predicted_gap_ratio(omega, delta, v0, false)?;
    let ratio_full = predicted_gap_ratio(omega, delta, v0, true)?;
    let mut notes = vec!["X is of order U in this regime".to_string()];
    if omega == 0.0 {
        notes.push("omega = 0: degenerate limit, U = 0".to_string());
    }
    Ok(MatchReport {
        configuration: Configuration::ThreeAtom,
        target: TargetCouplings::one_spin(u, u),
        params: RydbergParams::new(omega, delta).with_delta0(0.0, vec![1]),
        geometry: GeometryDescriptor::line(v0),
        residuals: vec![],
        predicted: named(&[
            ("U", u),
            ("gap_ratio", ratio_approx),
            ("gap_ratio_with_tail", ratio_full),
            ("tan_phi", 0.5_f64.sqrt()),
            ("E+ - E0", 1.5 * u),
            ("E- - E0", u),
        ]),
        time_rescale_k: None,
        notes,
        iterations: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorLevel {
    pub energy: f64,
    /// Weight of the eigenvector on the mapped spin states.
    pub spin_weight: f64,
    /// Expectation of the mirror permutation, ±1 for symmetric levels.
    pub parity: f64,
}

/// Eigenlevels with the largest weight on the spin states, one per spin
/// basis state, sorted by energy.
pub fn spin_sector_levels(sys: &RydbergSystem, map: &SpinAtomMap) -> Result<Vec<SectorLevel>> {
    if sys.dim() != map.atom_dim() {
        return Err(Error::DimensionMismatch {
            expected: map.atom_dim(),
            found: sys.dim(),
        });
    }
    let spec = eig_hermitian(&sys.hamiltonian());
    let mirror = sys.mirror_permutation()?;
    let states: Vec<usize> = map.spin_states().iter().map(|s| s.1).collect();
    let mut levels: Vec<SectorLevel> = (0..spec.dim())
        .map(|k| {
            let v = spec.eigenvector(k);
            let w = states.iter().map(|&a| v[a].norm_sqr()).sum();
            let mv = mirror.apply(&v);
            let parity = v.iter().zip(&mv).map(|(a, b)| (a.conj() * b).re).sum();
            SectorLevel {
                energy: spec.eigenvalues[k],
                spin_weight: w,
                parity,
            }
        })
        .collect();
    levels.sort_by(|a, b| b.spin_weight.total_cmp(&a.spin_weight));
    levels.truncate(states.len());
    levels.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(levels)
}

/// `(E₀, E₊, E₋)` from three spin-sector levels: `E₋` is the mirror-odd
/// level, `E₀ < E₊` the even ones.
pub fn one_spin_levels(levels: &[SectorLevel]) -> Result<(f64, f64, f64)> {
    let even: Vec<f64> = levels.iter().filter(|l| l.parity > 0.0).map(|l| l.energy).collect();
    let odd: Vec<f64> = levels.iter().filter(|l| l.parity < 0.0).map(|l| l.energy).collect();
    match (even.as_slice(), odd.as_slice()) {
        ([a, b], [c]) => Ok((a.min(*b), a.max(*b), *c)),
        _ => Err(invalid("levels", "expected two mirror-even levels and one odd level")),
    }
}

/// `Δ = −(U+Y)/2`, `Ω = −X`, `ρ = (Y/V₀)^{1/6}` so that `V₁ = Y`. The
/// condition `V₂ = −Y` has no solution with repulsive couplings; the report
/// carries the geometric `V₂` and its residual.
pub fn match_four_atom(c: &TargetCouplings, v0: f64) -> Result<MatchReport> {
    c.validate()?;
    if !(v0 > 0.0) {
        return Err(invalid("V0", "must be positive"));
    }
    if c.y < 0.0 {
        return Err(invalid("Y", "must be nonnegative"));
    }
    if c.y > v0 {
        return Err(invalid("Y", format!("Y = {} exceeds V0 = {v0}: rho ≥ 1", c.y)));
    }
    let rho = (c.y / v0).powf(1.0 / 6.0);
    let lc = LadderCouplings::new(RungSize::Two, rho, v0);
    let omega = -c.x;
    let delta = -(c.u + c.y) / 2.0;
    let mut params = RydbergParams::new(omega, delta);
    let mut notes = vec![format!("V2 sign unrealizable: target -Y = {}, geometric V2 = {}", -c.y, lc.v2)];
    if c.y == 0.0 {
        notes.push("Y = 0: columns decoupled, two independent two-atom matches".to_string());
        params.pair_overrides = ladder_cross_pairs(RungSize::Two)
            .into_iter()
            .map(|(i, j)| PairCoupling { i, j, v: 0.0 })
            .collect();
    }
    Ok(MatchReport {
        configuration: Configuration::FourAtom,
        target: *c,
        params,
        geometry: GeometryDescriptor::ladder(&lc),
        residuals: named(&[
            ("delta + (U+Y)/2", delta + (c.u + c.y) / 2.0),
            ("omega + X", omega + c.x),
            ("V1 - Y", lc.v1 - c.y),
            ("V2 + Y", lc.v2 + c.y),
        ]),
        predicted: vec![],
        time_rescale_k: None,
        notes,
        iterations: None,
    })
}

/// The four-atom match with `V₂ = −Y` forced on both diagonal pairs.
pub fn match_four_atom_ideal(c: &TargetCouplings, v0: f64) -> Result<MatchReport> {
    let mut r = match_four_atom(c, v0)?;
    let v2 = -c.y;
    r.params.pair_overrides.retain(|o| !matches!((o.i, o.j), (0, 2) | (1, 3)));
    r.params.pair_overrides.extend([PairCoupling { i: 0, j: 2, v: v2 }, PairCoupling { i: 1, j: 3, v: v2 }]);
    r.geometry.v2 = Some(v2);
    for n in &mut r.residuals {
        if n.name == "V2 + Y" {
            n.value = 0.0;
        }
    }
    r.notes = vec![format!("ideal mode: V2 = {v2} override on pairs (0,2) and (1,3)")];
    Ok(r)
}

fn ladder_cross_pairs(rung: RungSize) -> Vec<(usize, usize)> {
    let n = rung.atoms();
    (0..n).flat_map(|i| (n..2 * n).map(move |j| (i, j))).collect()
}

/// `|0,0⟩` and the probes `|0,0⟩`, `|S⟩` in the target basis, or embedded
/// with `map` in an atom basis.
pub fn two_spin_probe(map: Option<&SpinAtomMap>) -> Result<(StateVector, Vec<LabeledState>)> {
    let zero = StateVector::basis(9, 4);
    let s = symmetric_state_two_spin();
    let (zero, s) = match map {
        Some(m) => (embed_spin_state(m, &zero)?, embed_spin_state(m, &s)?),
        None => (zero, s),
    };
    Ok((zero.clone(), vec![LabeledState::new("|0,0>", zero), LabeledState::new("S", s)]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SixAtomOptions {
    pub rho_hint: Option<f64>,
    /// Use this `ρ` instead of tuning.
    pub rho_fixed: Option<f64>,
    /// Drop the facing `m = 0` pair that the listed couplings omit.
    pub listed_couplings_only: bool,
    pub fit_k: bool,
    /// Target-time window for the `K` fit.
    pub window: TimeGrid,
}

impl Default for SixAtomOptions {
    fn default() -> Self {
        Self {
            rho_hint: None,
            rho_fixed: None,
            listed_couplings_only: false,
            fit_k: true,
            window: TimeGrid::standard(100.0),
        }
    }
}

fn six_atom_objective(rho: f64, v0: f64, ke: f64, y: f64) -> f64 {
    let lc = LadderCouplings::new(RungSize::Three, rho, v0);
    let a = lc.v1 - lc.v2 - ke * y / 2.0;
    let b = lc.v1 - lc.v3.unwrap() - ke * 2.0 * y;
    a * a + b * b
}

/// Golden-section ρ tune of `V₁ − V₂ = K_e·Y/2`, `V₁ − V₃ = 2K_e·Y` with
/// `K_e = Ω²/(Δ·U)`.
pub fn tune_six_atom_rho(c: &TargetCouplings, omega: f64, delta: f64, v0: f64, rho_hint: Option<f64>) -> Result<f64> {
    let ke = omega * omega / (delta * c.u);
    if !ke.is_finite() {
        return Err(Error::Singular {
            denominator: "delta * U",
            value: delta * c.u,
        });
    }
    let (lo, hi) = match rho_hint {
        Some(h) if h > 0.0 && h < 1.0 => ((0.5 * h).max(1e-3), (1.5 * h).min(0.999)),
        Some(h) => return Err(invalid("rho_hint", format!("must lie in (0, 1), got {h}"))),
        None => (1e-3, 0.999),
    };
    const SCAN: usize = 200;
    let f = |r: f64| six_atom_objective(r, v0, ke, c.y);
    let step = (hi - lo) / SCAN as f64;
    let best = (0..=SCAN)
        .map(|j| (j, f(lo + step * j as f64)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
        .0;
    if best == 0 || best == SCAN {
        return Err(Error::Bracket(format!(
            "rho objective minimal at the edge of [{lo}, {hi}]"
        )));
    }
    let a = lo + step * (best - 1) as f64;
    let b = lo + step * (best + 1) as f64;
    Ok(golden_section(f, a, b, 1e-12).0)
}

/// Six-atom ladder at the three-atom approximate point: tuned `ρ` and a
/// fitted time rescale `K`.
pub fn match_six_atom(c: &TargetCouplings, omega: f64, delta: f64, v0: f64, opts: &SixAtomOptions) -> Result<MatchReport> {
    c.validate()?;
    if !(v0 > 0.0) || delta == 0.0 {
        return Err(invalid("delta", "need delta ≠ 0 and V0 > 0"));
    }
    let ke = omega * omega / (delta * c.u);
    let mut notes = vec![];
    let rho = match opts.rho_fixed {
        Some(r) if r > 0.0 && r < 1.0 => r,
        Some(r) => return Err(invalid("rho", format!("must lie in (0, 1), got {r}"))),
        None if c.y == 0.0 => {
            notes.push("Y = 0: conditions need V1 = V2 = V3, met only as rho → 0; columns decoupled".to_string());
            0.0
        }
        None => tune_six_atom_rho(c, omega, delta, v0, opts.rho_hint)?,
    };
    let lc = LadderCouplings::new(RungSize::Three, rho, v0);
    let mut params = RydbergParams::new(omega, delta);
    if rho == 0.0 {
        params.pair_overrides = ladder_cross_pairs(RungSize::Three)
            .into_iter()
            .map(|(i, j)| PairCoupling { i, j, v: 0.0 })
            .collect();
    } else if opts.listed_couplings_only {
        params.pair_overrides = listed_couplings_only(RungSize::Three);
        notes.push("facing m = 0 pair coupling dropped".to_string());
    }
    let v3 = lc.v3.unwrap();
    let mut report = MatchReport {
        configuration: Configuration::SixAtom,
        target: *c,
        params,
        geometry: GeometryDescriptor::ladder(&lc),
        residuals: named(&[
            ("V1 - V2 - Ke*Y/2", lc.v1 - lc.v2 - ke * c.y / 2.0),
            ("V1 - V3 - 2*Ke*Y", lc.v1 - v3 - 2.0 * ke * c.y),
        ]),
        predicted: named(&[("Ke", ke)]),
        time_rescale_k: None,
        notes,
        iterations: None,
    };
    if opts.fit_k {
        let fit = fit_six_atom_k(&report, &opts.window)?;
        report.time_rescale_k = Some(fit.k);
        report.residuals.push(Named {
            name: "trace_rms".into(),
            value: fit.rms,
        });
    }
    Ok(report)
}

/// Fits `K` in `[Ke/2, 3Ke/2]` between the two-spin target and the ladder.
pub fn fit_six_atom_k(report: &MatchReport, window: &TimeGrid) -> Result<crate::evolution::RescaleFit> {
    let ke = report
        .predicted_value("Ke")
        .ok_or_else(|| invalid("report", "missing Ke"))?;
    if !(ke > 0.0) {
        return Err(Error::Bracket(format!("Ke = {ke} is not positive")));
    }
    let (t0, tf) = two_spin_probe(None)?;
    let target = SpectralTracer::new(&build_h2t(&report.target), &t0, &tf)?.trace(&window.times());
    let map = report.spin_map();
    let (s0, sf) = two_spin_probe(Some(&map))?;
    let sim = SpectralTracer::new(&report.system()?.hamiltonian(), &s0, &sf)?;
    fit_time_rescale(&target, &sim, 0.5 * ke, 1.5 * ke, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_atom_examples() {
        let r = match_two_atom(&TargetCouplings::one_spin(1.0, 0.5), 64.0).unwrap();
        assert_eq!((r.params.omega, r.params.delta, r.geometry.v0), (-0.5, -0.5, 32.0));
        let r = match_two_atom(&TargetCouplings::one_spin(1.0, 1.5), 64.0).unwrap();
        assert_eq!((r.params.omega, r.params.delta, r.geometry.v0), (-1.5, -0.5, 96.0));
        assert!(r.residuals.iter().all(|n| n.value == 0.0));
        let r = match_two_atom(&TargetCouplings::one_spin(1.0, 0.0), 64.0).unwrap();
        assert_eq!(r.params.omega, 0.0);
        assert_eq!(r.geometry.v0, 32.0);
        let h = r.system().unwrap().hamiltonian();
        assert!(h.matrix().is_diagonal());
    }

    fn low_sector(r: &MatchReport) -> Vec<f64> {
        let sys = r.system().unwrap();
        let mut e: Vec<f64> = spin_sector_levels(&sys, &r.spin_map())
            .unwrap()
            .iter()
            .map(|l| l.energy)
            .collect();
        e.sort_by(f64::total_cmp);
        e
    }

    fn max_eig_discrepancy(u: f64, x: f64, v0: f64) -> (f64, f64) {
        let c = TargetCouplings::one_spin(u, x);
        let mut r = match_two_atom(&c, 64.0).unwrap();
        r.geometry.v0 = v0;
        let s = analytic_one_spin(&c);
        let mut exact = [s.e0, s.eplus, s.eminus];
        exact.sort_by(f64::total_cmp);
        let got = low_sector(&r);
        let d = exact.iter().zip(&got).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        (d, r.params.omega.powi(2) / v0)
    }

    #[test]
    fn two_atom_eigenvalues_within_leakage_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let u: f64 = rng.random_range(0.2..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let x: f64 = rng.random_range(-2.0..2.0) * u.abs();
            if x.abs() < 0.05 {
                continue;
            }
            let c = TargetCouplings::one_spin(u, x);
            let v0 = match_two_atom(&c, 64.0).unwrap().geometry.v0;
            let (d, bound) = max_eig_discrepancy(u, x, v0);
            assert!(d <= 2.0 * bound, "u={u} x={x}: {d} > 2·{bound}");
        }
    }

    #[test]
    fn two_atom_discrepancy_shrinks_with_v0() {
        for (u, x) in [(1.0, 0.5), (1.0, 1.5), (-0.7, 0.9)] {
            let v0 = 64.0 * f64::abs(x);
            let (d1, _) = max_eig_discrepancy(u, x, v0);
            let (d2, _) = max_eig_discrepancy(u, x, 2.0 * v0);
            let (d4, _) = max_eig_discrepancy(u, x, 4.0 * v0);
            assert!(d2 < d1 && d4 < d2);
            // Leading behavior Ω²/V₀: each doubling is close to a halving.
            assert!(d2 / d1 < 0.55 && d4 / d2 < 0.55, "{} {}", d2 / d1, d4 / d2);
        }
    }

    #[test]
    fn residuals_at_zero_drive() {
        let c = TargetCouplings::one_spin(1.0, 0.3);
        let p = ThreeAtomPoint {
            omega: 0.0,
            delta: 15.0,
            delta0: 0.2,
            v0: 30.0,
        };
        let r = three_atom_residuals(&p, &c).unwrap();
        assert!((r[0] - 0.09).abs() < 1e-15);
        assert!((r[1] - (0.5 + 0.09 - 0.2)).abs() < 1e-15);
        assert!((r[2] - 2f64.sqrt() * 0.3).abs() < 1e-15);
        let c0 = TargetCouplings::one_spin(1.0, 0.0);
        let p0 = ThreeAtomPoint { delta0: 0.5, ..p };
        assert!(three_atom_residuals(&p0, &c0).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn residual_singularities_are_named() {
        let c = TargetCouplings::one_spin(1.0, 0.3);
        let p = ThreeAtomPoint {
            omega: 1.0,
            delta: 15.0,
            delta0: 0.0,
            v0: 30.0,
        };
        assert!(matches!(
            three_atom_residuals(&p, &c),
            Err(Error::Singular { denominator: "delta0", .. })
        ));
        let p = ThreeAtomPoint {
            delta0: 1.0,
            v0: 15.0,
            ..p
        };
        assert!(matches!(
            three_atom_residuals(&p, &c),
            Err(Error::Singular { denominator: "V0 - delta", .. })
        ));
        let p = ThreeAtomPoint { delta: 0.0, ..p };
        assert!(matches!(
            three_atom_residuals(&p, &c),
            Err(Error::Singular { denominator: "delta", .. })
        ));
    }

    fn point(omega: f64, delta: f64, delta0: f64, v0: f64) -> ThreeAtomPoint {
        ThreeAtomPoint { omega, delta, delta0, v0 }
    }

    /// Targets for which `p` solves all three conditions. With
    /// `A = X²/U`, `B = √2 X/U` the first and third conditions fix `U` and
    /// `X`; `Δ₀` is chosen by bisection so the second holds.
    pub(crate) fn generate_point(rng: &mut ChaCha8Rng) -> (ThreeAtomPoint, TargetCouplings) {
        loop {
            let omega: f64 = rng.random_range(-2.0..-0.5);
            let delta: f64 = rng.random_range(5.0..20.0);
            let v0: f64 = rng.random_range(1.5 * delta..3.0 * delta);
            let w = omega * omega;
            let a = (w / 2.0) * (1.0 / (delta - v0 / 64.0) - 1.0 / delta);
            let b = |d0: f64| (w / (2.0 * 2f64.sqrt() * d0)) * (1.0 / delta + 1.0 / (v0 - delta - d0));
            let cc = |d0: f64| (w / 4.0) * (1.0 / (delta + d0) + 2.0 / (v0 - delta) - 1.0 / (v0 - delta - d0));
            let h = |d0: f64| a / b(d0).powi(2) + a - d0 - cc(d0);
            let (mut lo, mut hi) = (1e-6, 0.5 * (v0 - delta));
            if !(h(lo) < 0.0 && h(hi) > 0.0) {
                continue;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if h(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let d0 = 0.5 * (lo + hi);
            let bb = b(d0);
            let u = 2.0 * a / (bb * bb);
            let x = 2f64.sqrt() * a / bb;
            let x = -omega.signum() * x.abs();
            return (point(omega, delta, d0, v0), TargetCouplings::one_spin(u, x));
        }
    }

    #[test]
    fn generated_points_solve_the_conditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let (p, c) = generate_point(&mut rng);
            let r = three_atom_residuals(&p, &c).unwrap();
            let scale = c.u.abs() + c.x.abs();
            assert!(r.iter().all(|x| x.abs() < 1e-12 * scale.max(1.0)), "{r:?}");
        }
    }

    #[test]
    fn newton_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let (p, c) = generate_point(&mut rng);
            let mut start = p;
            start.omega *= 1.0 + rng.random_range(-0.1..0.1);
            start.delta *= 1.0 + rng.random_range(-0.1..0.1);
            start.delta0 *= 1.0 + rng.random_range(-0.1..0.1);
            let r = solve_three_atom_newton(&NewtonProblem::fixed_v0(c, p.v0).with_start(start)).unwrap();
            assert!(r.residuals.iter().all(|n| n.value.abs() <= NEWTON_TOL));
            assert!((r.params.omega - p.omega).abs() < 1e-8);
            assert!((r.params.delta - p.delta).abs() < 1e-8);
            assert!((r.params.delta0 - p.delta0).abs() < 1e-8);
        }
    }

    #[test]
    fn newton_zero_x_branch() {
        let c = TargetCouplings::one_spin(0.8, 0.0);
        let r = solve_three_atom_newton(&NewtonProblem::fixed_v0(c, 30.0)).unwrap();
        assert_eq!(r.params.omega, 0.0);
        assert!((r.params.delta0 - 0.4).abs() < 1e-15);
        assert_eq!(r.iterations, Some(0));
    }

    #[test]
    fn newton_infeasible_reports() {
        let c = TargetCouplings::one_spin(1.0, 0.3);
        let start = ThreeAtomPoint {
            omega: -0.3,
            delta: 10.0,
            delta0: 0.5,
            v0: 0.0,
        };
        // With V₀ = 0 the first condition loses its drive term.
        let err = solve_three_atom_newton(&NewtonProblem::fixed_v0(c, 0.0).with_start(start)).unwrap_err();
        match err {
            Error::NonConvergence { residuals, .. } => {
                assert_eq!(residuals.len(), 3);
                assert!((residuals[0].1 - 0.09).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn default_start_hits_named_singularity() {
        // Δ = −U/2 and Δ₀ = U/2 put the start on Δ + Δ₀ = 0.
        let c = TargetCouplings::one_spin(1.0, 0.3);
        assert!(matches!(
            solve_three_atom_newton(&NewtonProblem::fixed_v0(c, 30.0)),
            Err(Error::Singular { denominator: "delta + delta0", .. })
        ));
    }

    #[test]
    fn newton_problem_validation() {
        let c = TargetCouplings::one_spin(1.0, 0.3);
        let mut p = NewtonProblem::fixed_v0(c, 30.0);
        p.equations = vec![0, 1];
        assert!(solve_three_atom_newton(&p).is_err());
        p.equations = vec![0, 1, 1];
        assert!(solve_three_atom_newton(&p).is_err());
    }

    #[test]
    fn degenerate_matrix_limit() {
        let delta = 7.0;
        let m = degenerate_matrix_m(delta, 2.0 * delta, false).unwrap();
        let s = 2.0 * 2f64.sqrt();
        let expected = [[3.0 / delta, s / delta], [s / delta, 1.0 / delta]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[i][j] - expected[i][j]).abs() < 1e-15);
            }
        }
        let (hi, lo) = symmetric_eigenvalues(&m);
        assert!((hi - 5.0 / delta).abs() < 1e-14);
        assert!((lo + 1.0 / delta).abs() < 1e-14);
        assert!((predicted_gap_ratio(1.0, delta, 2.0 * delta, false).unwrap() - 1.5).abs() < 1e-12);
        assert!(degenerate_matrix_m(5.0, 5.0, true).is_err());
    }

    #[test]
    fn full_matrix_close_to_limit() {
        let full = degenerate_matrix_m(15.0, 30.0, true).unwrap();
        let approx = degenerate_matrix_m(15.0, 30.0, false).unwrap();
        let scale = approx.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
        for i in 0..2 {
            for j in 0..2 {
                assert!((full[i][j] - approx[i][j]).abs() <= 0.05 * scale);
            }
        }
    }

    #[test]
    fn approx_match_values() {
        let r = approx_three_atom_match(1.0, 15.0).unwrap();
        assert!((r.predicted_value("U").unwrap() - 1.0 / 15.0).abs() < 1e-15);
        assert!((r.predicted_value("gap_ratio").unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(r.geometry.v0, 30.0);
        let z = approx_three_atom_match(0.0, 15.0).unwrap();
        assert_eq!(z.predicted_value("U"), Some(0.0));
        assert!(approx_three_atom_match(1.0, 0.0).is_err());
    }

    #[test]
    fn three_atom_sector_levels() {
        let r = approx_three_atom_match(1.0, 15.0).unwrap();
        let levels = spin_sector_levels(&r.system().unwrap(), &r.spin_map()).unwrap();
        assert_eq!(levels.len(), 3);
        assert!(levels.iter().all(|l| l.spin_weight > 0.9 && (l.parity.abs() - 1.0).abs() < 1e-9));
        let (e0, ep, em) = one_spin_levels(&levels).unwrap();
        let (p0, pp, pm) = perturbative_three_atom_levels(1.0, 15.0, 30.0, true).unwrap();
        // Next order is Ω⁴/Δ³.
        let tol = 10.0 / 15f64.powi(3);
        assert!((e0 - p0).abs() < tol && (ep - pp).abs() < tol && (em - pm).abs() < tol);
    }

    #[test]
    fn four_atom_examples() {
        let c = TargetCouplings::new(1.0, 1.2, 0.2);
        let r = match_four_atom(&c, 64.0).unwrap();
        assert_eq!((r.params.omega, r.params.delta), (-1.2, -0.6));
        assert!((r.geometry.v1.unwrap() - 0.2).abs() < 1e-14);
        assert!((r.geometry.v2.unwrap() - 0.13).abs() < 0.005);
        assert!(r.notes[0].contains("V2 sign unrealizable"));
        let sys = r.system().unwrap();
        assert!((sys.coupling(0, 3) - 0.2).abs() < 1e-14);
        assert!((sys.coupling(0, 2) - r.geometry.v2.unwrap()).abs() < 1e-14);

        let ideal = match_four_atom_ideal(&c, 64.0).unwrap();
        let sys = ideal.system().unwrap();
        assert_eq!(sys.coupling(0, 2), -0.2);
        assert_eq!(sys.coupling(1, 3), -0.2);
        assert!((sys.coupling(0, 3) - 0.2).abs() < 1e-14);

        assert!(match_four_atom(&TargetCouplings::new(1.0, 1.2, 65.0), 64.0).is_err());

        let z = match_four_atom(&TargetCouplings::new(1.0, 1.2, 0.0), 64.0).unwrap();
        assert_eq!(z.geometry.rho, Some(0.0));
        let sys = z.system().unwrap();
        for (i, j) in ladder_cross_pairs(RungSize::Two) {
            assert_eq!(sys.coupling(i, j), 0.0);
        }
        assert!(z.notes.iter().any(|n| n.contains("decoupled")));
    }

    #[test]
    fn four_atom_ideal_tracks_target() {
        let c = TargetCouplings::new(1.0, 1.2, 0.2);
        let r = match_four_atom_ideal(&c, 64.0).unwrap();
        let (t0, tf) = two_spin_probe(None).unwrap();
        let times = TimeGrid::standard(3.0).times();
        let target = SpectralTracer::new(&build_h2t(&c), &t0, &tf).unwrap().trace(&times);
        let (s0, sf) = two_spin_probe(Some(&r.spin_map())).unwrap();
        let sim = SpectralTracer::new(&r.system().unwrap().hamiltonian(), &s0, &sf).unwrap().trace(&times);
        let cmp = crate::evolution::compare(&target, &sim, None, None).unwrap();
        assert!(cmp.max_abs_dev <= 0.02, "{}", cmp.max_abs_dev);
    }

    #[test]
    fn six_atom_rho() {
        let c = TargetCouplings::new(1.0, 1.2, 0.2);
        let rho = tune_six_atom_rho(&c, 1.0, 15.0, 30.0, None).unwrap();
        assert!((rho - 0.326).abs() < 0.01, "{rho}");
        let hinted = tune_six_atom_rho(&c, 1.0, 15.0, 30.0, Some(0.3)).unwrap();
        assert!((hinted - rho).abs() < 1e-8);
        let opts = SixAtomOptions {
            fit_k: false,
            ..SixAtomOptions::default()
        };
        let r = match_six_atom(&TargetCouplings::new(1.0, 1.2, 0.0), 1.0, 15.0, 30.0, &opts).unwrap();
        assert_eq!(r.geometry.rho, Some(0.0));
        assert!(r.notes[0].contains("decoupled"));
    }

    #[test]
    fn six_atom_listed_mode_drops_facing_zero_pair() {
        let c = TargetCouplings::new(1.0, 1.2, 0.2);
        let opts = SixAtomOptions {
            fit_k: false,
            listed_couplings_only: true,
            rho_fixed: Some(0.326),
            ..SixAtomOptions::default()
        };
        let r = match_six_atom(&c, 1.0, 15.0, 30.0, &opts).unwrap();
        let sys = r.system().unwrap();
        assert_eq!(sys.coupling(1, 4), 0.0);
        assert!((sys.coupling(0, 5) - r.geometry.v1.unwrap()).abs() < 1e-15);
    }

    #[test]
    fn report_json_round_trip() {
        let r = match_four_atom(&TargetCouplings::new(1.0, 1.2, 0.2), 64.0).unwrap();
        let back: MatchReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_json().contains("\"V1 - Y\""));
    }

    proptest! {
        #[test]
        fn matrix_symmetric(delta in 1.0f64..30.0, ratio in 1.2f64..5.0, tail in any::<bool>()) {
            let m = degenerate_matrix_m(delta, ratio * delta, tail).unwrap();
            prop_assert_eq!(m[0][1], m[1][0]);
        }

        #[test]
        fn gap_ratio_limit(delta in 1.0f64..30.0, eps in 1e-7f64..1e-4) {
            let r = predicted_gap_ratio(1.0, delta, (2.0 + eps) * delta, false).unwrap();
            prop_assert!((r - 1.5).abs() < 10.0 * eps, "{}", r);
        }

        #[test]
        fn four_atom_v1_exact(y in 1e-3f64..10.0, v0 in 10.0f64..100.0) {
            let r = match_four_atom(&TargetCouplings::new(1.0, 1.0, y), v0).unwrap();
            prop_assert!((r.geometry.v1.unwrap() - y).abs() <= 1e-14 * y.max(1.0));
        }
    }
}
