//! Rydberg-array Hamiltonians built from atom geometry.
//!
//! Product basis: atom 0 is the most significant bit, `|g⟩ = 0`, `|r⟩ = 1`.
//! The Hamiltonian is
//!
//! ```text
//! H = (Ω/2) Σ_i σ^x_i − Σ_i (Δ + Δ₀·[i ∈ D]) n_i + Σ_{i<j} V_ij n_i n_j,
//! V_ij = scale / r_ij⁶,
//! ```
//!
//! where `scale` is the interaction at unit distance. Explicit pair overrides
//! replace the geometric `V_ij`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::{ComplexMatrix, HermitianOperator, StateVector, C64};

pub const MAX_ATOMS: usize = 12;

/// Interaction `scale / r⁶`.
pub fn pair_interaction(scale: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(invalid("r", format!("distance must be positive, got {r}")));
    }
    Ok(scale / r.powi(6))
}

/// Scale that puts `v_nearest` at distance `a_r`.
pub fn scale_for(v_nearest: f64, a_r: f64) -> f64 {
    v_nearest * a_r.powi(6)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomGeometry {
    pub positions: Vec<[f64; 2]>,
    /// Interaction energy at unit distance.
    pub scale: f64,
}

impl AtomGeometry {
    pub fn new(positions: Vec<[f64; 2]>, scale: f64) -> Result<Self> {
        let g = Self { positions, scale };
        g.validate()?;
        Ok(g)
    }

    pub fn n_atoms(&self) -> usize {
        self.positions.len()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.positions[i], self.positions[j]);
        (a[0] - b[0]).hypot(a[1] - b[1])
    }

    pub fn validate(&self) -> Result<()> {
        if !self.scale.is_finite() {
            return Err(invalid("scale", "must be finite"));
        }
        if self.positions.iter().flatten().any(|c| !c.is_finite()) {
            return Err(invalid("positions", "coordinates must be finite"));
        }
        for i in 0..self.n_atoms() {
            for j in i + 1..self.n_atoms() {
                if !(self.distance(i, j) > 0.0) {
                    return Err(invalid("positions", format!("atoms {i} and {j} coincide")));
                }
            }
        }
        Ok(())
    }

    pub fn interaction(&self, i: usize, j: usize) -> f64 {
        self.scale / self.distance(i, j).powi(6)
    }

    /// Atom permutation for the reflection `y → −y` about the array's
    /// horizontal mid-line, if the geometry is mirror symmetric.
    pub fn mirror_map(&self) -> Result<Vec<usize>> {
        let ys = self.positions.iter().map(|p| p[1]);
        let (lo, hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| (lo.min(y), hi.max(y)));
        let axis = 0.5 * (lo + hi);
        let extent = self
            .positions
            .iter()
            .flatten()
            .fold(1.0_f64, |m, c| m.max(c.abs()));
        let tol = 1e-9 * extent;
        self.positions
            .iter()
            .map(|p| {
                let target = [p[0], 2.0 * axis - p[1]];
                self.positions
                    .iter()
                    .position(|q| (q[0] - target[0]).abs() <= tol && (q[1] - target[1]).abs() <= tol)
                    .ok_or_else(|| invalid("positions", "geometry is not mirror symmetric"))
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCoupling {
    pub i: usize,
    pub j: usize,
    pub v: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RydbergParams {
    pub omega: f64,
    pub delta: f64,
    #[serde(default)]
    pub delta0: f64,
    #[serde(default)]
    pub delta0_atoms: Vec<usize>,
    #[serde(default)]
    pub pair_overrides: Vec<PairCoupling>,
}

impl RydbergParams {
    pub fn new(omega: f64, delta: f64) -> Self {
        Self {
            omega,
            delta,
            ..Self::default()
        }
    }

    pub fn with_delta0(mut self, delta0: f64, atoms: Vec<usize>) -> Self {
        self.delta0 = delta0;
        self.delta0_atoms = atoms;
        self
    }

    pub fn with_overrides(mut self, overrides: Vec<PairCoupling>) -> Self {
        self.pair_overrides = overrides;
        self
    }

    fn validate(&self, n_atoms: usize) -> Result<()> {
        for (name, v) in [("omega", self.omega), ("delta", self.delta), ("delta0", self.delta0)] {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        if let Some(&k) = self.delta0_atoms.iter().find(|&&k| k >= n_atoms) {
            return Err(invalid("delta0_atoms", format!("atom {k} out of range for {n_atoms} atoms")));
        }
        for o in &self.pair_overrides {
            if o.i >= n_atoms || o.j >= n_atoms || o.i == o.j {
                return Err(invalid("pair_overrides", format!("invalid pair ({}, {})", o.i, o.j)));
            }
            if !o.v.is_finite() {
                return Err(invalid("pair_overrides", "coupling must be finite"));
            }
        }
        Ok(())
    }
}

/// Geometry plus drive parameters with the resolved pair couplings.
#[derive(Clone, Debug, PartialEq)]
pub struct RydbergSystem {
    geometry: AtomGeometry,
    params: RydbergParams,
    couplings: Vec<f64>,
}

impl RydbergSystem {
    pub fn new(geometry: AtomGeometry, params: RydbergParams) -> Result<Self> {
        geometry.validate()?;
        let n = geometry.n_atoms();
        if n == 0 || n > MAX_ATOMS {
            return Err(Error::DimensionOverflow {
                dim: 1usize.checked_shl(n as u32).unwrap_or(usize::MAX),
                limit: 1 << MAX_ATOMS,
            });
        }
        params.validate(n)?;
        let mut couplings = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = geometry.interaction(i, j);
                couplings[i * n + j] = v;
                couplings[j * n + i] = v;
            }
        }
        for o in &params.pair_overrides {
            couplings[o.i * n + o.j] = o.v;
            couplings[o.j * n + o.i] = o.v;
        }
        Ok(Self {
            geometry,
            params,
            couplings,
        })
    }

    pub fn geometry(&self) -> &AtomGeometry {
        &self.geometry
    }

    pub fn params(&self) -> &RydbergParams {
        &self.params
    }

    pub fn n_atoms(&self) -> usize {
        self.geometry.n_atoms()
    }

    pub fn dim(&self) -> usize {
        1 << self.n_atoms()
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings[i * self.n_atoms() + j]
    }

    /// Per-atom detuning `Δ + Δ₀·[i ∈ D]`.
    pub fn detunings(&self) -> Vec<f64> {
        (0..self.n_atoms())
            .map(|i| {
                if self.params.delta0_atoms.contains(&i) {
                    self.params.delta + self.params.delta0
                } else {
                    self.params.delta
                }
            })
            .collect()
    }

    pub fn occupation(&self, state: usize, atom: usize) -> bool {
        (state >> (self.n_atoms() - 1 - atom)) & 1 == 1
    }

    /// Energy of a product state at `Ω = 0`.
    pub fn diagonal_energy(&self, state: usize) -> f64 {
        let n = self.n_atoms();
        let det = self.detunings();
        let mut e = 0.0;
        for (i, d) in det.iter().enumerate() {
            if !self.occupation(state, i) {
                continue;
            }
            e -= d;
            for j in i + 1..n {
                if self.occupation(state, j) {
                    e += self.coupling(i, j);
                }
            }
        }
        e
    }

    pub fn hamiltonian(&self) -> HermitianOperator {
        let n = self.n_atoms();
        let dim = self.dim();
        let mut m = ComplexMatrix::zeros(dim);
        let half = C64::new(self.params.omega / 2.0, 0.0);
        for s in 0..dim {
            m[(s, s)] = C64::new(self.diagonal_energy(s), 0.0);
            if self.params.omega != 0.0 {
                for i in 0..n {
                    m[(s, s ^ (1 << (n - 1 - i)))] = half;
                }
            }
        }
        HermitianOperator::from_matrix_unchecked(m)
    }

    /// Permutation of product states induced by the geometric mirror.
    pub fn mirror_permutation(&self) -> Result<ComplexMatrix> {
        let map = self.geometry.mirror_map()?;
        let n = self.n_atoms();
        let dim = self.dim();
        let mut p = ComplexMatrix::zeros(dim);
        for s in 0..dim {
            let mut image = 0usize;
            for (i, &k) in map.iter().enumerate() {
                if self.occupation(s, i) {
                    image |= 1 << (n - 1 - k);
                }
            }
            p[(image, s)] = C64::new(1.0, 0.0);
        }
        Ok(p)
    }
}

pub fn build_rydberg_h(geometry: &AtomGeometry, params: &RydbergParams) -> Result<HermitianOperator> {
    Ok(RydbergSystem::new(geometry.clone(), params.clone())?.hamiltonian())
}

fn check_spacing(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(invalid(name, format!("spacing must be positive, got {v}")));
    }
    Ok(())
}

/// Two atoms stacked vertically: `m = +1` on top, `m = −1` below.
pub fn geometry_two_atom(a_r: f64, scale: f64) -> Result<AtomGeometry> {
    check_spacing("a_r", a_r)?;
    AtomGeometry::new(vec![[0.0, a_r / 2.0], [0.0, -a_r / 2.0]], scale)
}

/// Three equidistant atoms on a vertical line: `m = +1, 0, −1` top to bottom.
pub fn geometry_three_atom_line(a_r: f64, scale: f64) -> Result<AtomGeometry> {
    check_spacing("a_r", a_r)?;
    AtomGeometry::new(vec![[0.0, a_r], [0.0, 0.0], [0.0, -a_r]], scale)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RungSize {
    Two,
    Three,
}

impl RungSize {
    pub fn atoms(self) -> usize {
        match self {
            Self::Two => 2,
            Self::Three => 3,
        }
    }

    pub fn encoding(self) -> Encoding {
        match self {
            Self::Two => Encoding::TwoAtom,
            Self::Three => Encoding::ThreeAtom,
        }
    }
}

/// Two columns `a_s` apart. Within each column the atoms are ordered
/// `m = +1, (0), −1`; the right column is flipped vertically so atoms of
/// opposite `m` face each other across the gap.
pub fn geometry_mirrored_ladder(rung: RungSize, a_r: f64, a_s: f64, scale: f64) -> Result<AtomGeometry> {
    check_spacing("a_r", a_r)?;
    check_spacing("a_s", a_s)?;
    let ys: Vec<f64> = match rung {
        RungSize::Two => vec![a_r / 2.0, -a_r / 2.0],
        RungSize::Three => vec![a_r, 0.0, -a_r],
    };
    let mut positions: Vec<[f64; 2]> = ys.iter().map(|&y| [0.0, y]).collect();
    positions.extend(ys.iter().map(|&y| [a_s, -y]));
    AtomGeometry::new(positions, scale)
}

/// Cross-column couplings of a mirrored ladder with `ρ = a_r/a_s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderCouplings {
    pub rho: f64,
    pub v0: f64,
    /// Opposite `m` facing each other, distance `a_s`.
    pub v1: f64,
    /// One rung step apart vertically.
    pub v2: f64,
    /// Two rung steps apart vertically; three-atom rungs only.
    pub v3: Option<f64>,
}

impl LadderCouplings {
    pub fn new(rung: RungSize, rho: f64, v0: f64) -> Self {
        let r2 = rho * rho;
        Self {
            rho,
            v0,
            v1: v0 * rho.powi(6),
            v2: v0 * (r2 / (1.0 + r2)).powi(3),
            v3: match rung {
                RungSize::Two => None,
                RungSize::Three => Some(v0 * (r2 / (1.0 + 4.0 * r2)).powi(3)),
            },
        }
    }
}

/// Pairs across the ladder that the listed `V₁/V₂/V₃` terms leave out. For
/// three-atom rungs this is the facing pair of `m = 0` atoms.
pub fn unlisted_cross_pairs(rung: RungSize) -> Vec<(usize, usize)> {
    match rung {
        RungSize::Two => vec![],
        RungSize::Three => vec![(1, 4)],
    }
}

/// Overrides that zero the unlisted cross pairs.
pub fn listed_couplings_only(rung: RungSize) -> Vec<PairCoupling> {
    unlisted_cross_pairs(rung)
        .into_iter()
        .map(|(i, j)| PairCoupling { i, j, v: 0.0 })
        .collect()
}

/// How one spin-1 is carried by a column of atoms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Encoding {
    /// `|1⟩ → |rg⟩, |0⟩ → |gg⟩, |−1⟩ → |gr⟩`.
    TwoAtom,
    /// `|1⟩ → |rgg⟩, |0⟩ → |grg⟩, |−1⟩ → |ggr⟩`.
    ThreeAtom,
    /// Spin-2 with one excitation per column of five atoms.
    FiveAtom,
}

impl Encoding {
    pub fn atoms_per_spin(self) -> usize {
        match self {
            Self::TwoAtom => 2,
            Self::ThreeAtom => 3,
            Self::FiveAtom => 5,
        }
    }

    pub fn m_max(self) -> i32 {
        match self {
            Self::TwoAtom | Self::ThreeAtom => 1,
            Self::FiveAtom => 2,
        }
    }

    /// Column bit pattern of spin state `m`.
    pub fn block_index(self, m: i32) -> usize {
        assert!(m.abs() <= self.m_max(), "m = {m} outside encoding");
        match self {
            Self::TwoAtom => match m {
                1 => 0b10,
                0 => 0b00,
                _ => 0b01,
            },
            Self::ThreeAtom | Self::FiveAtom => {
                let n = self.atoms_per_spin() as i32;
                1 << (n - 1 - (self.m_max() - m))
            }
        }
    }
}

/// Correspondence between spin product states and atom product states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinAtomMap {
    pub encoding: Encoding,
    pub n_spins: usize,
}

impl SpinAtomMap {
    pub fn new(encoding: Encoding, n_spins: usize) -> Self {
        assert!(n_spins >= 1);
        Self { encoding, n_spins }
    }

    pub fn n_atoms(&self) -> usize {
        self.encoding.atoms_per_spin() * self.n_spins
    }

    pub fn spin_dim(&self) -> usize {
        ((2 * self.encoding.m_max() + 1) as usize).pow(self.n_spins as u32)
    }

    pub fn atom_dim(&self) -> usize {
        1 << self.n_atoms()
    }

    /// Atom product index of spin product state `ms` (left spin first).
    pub fn atom_index(&self, ms: &[i32]) -> usize {
        assert_eq!(ms.len(), self.n_spins);
        let bits = self.encoding.atoms_per_spin();
        ms.iter()
            .fold(0, |acc, &m| (acc << bits) | self.encoding.block_index(m))
    }

    /// Spin quantum numbers of spin-basis index `k` (descending `m`).
    pub fn spin_numbers(&self, k: usize) -> Vec<i32> {
        let m_max = self.encoding.m_max();
        let d = (2 * m_max + 1) as usize;
        let mut out = vec![0; self.n_spins];
        let mut rest = k;
        for slot in out.iter_mut().rev() {
            *slot = m_max - (rest % d) as i32;
            rest /= d;
        }
        out
    }

    /// `(spin index, atom index)` for every spin basis state.
    pub fn spin_states(&self) -> Vec<(usize, usize)> {
        (0..self.spin_dim())
            .map(|k| (k, self.atom_index(&self.spin_numbers(k))))
            .collect()
    }

    pub fn is_physical(&self, atom_index: usize) -> bool {
        self.spin_states().iter().any(|&(_, a)| a == atom_index)
    }
}

/// Copies spin amplitudes onto the mapped atom product states.
pub fn embed_spin_state(map: &SpinAtomMap, spin_state: &StateVector) -> Result<StateVector> {
    if spin_state.dim() != map.spin_dim() {
        return Err(Error::DimensionMismatch {
            expected: map.spin_dim(),
            found: spin_state.dim(),
        });
    }
    let mut amps = vec![C64::new(0.0, 0.0); map.atom_dim()];
    for (k, a) in map.spin_states() {
        amps[a] = spin_state.amplitudes()[k];
    }
    StateVector::from_amplitudes(amps)
}

/// `g`/`r` string for an atom product state, atom 0 first.
pub fn atom_label(state: usize, n_atoms: usize) -> String {
    (0..n_atoms)
        .map(|i| if (state >> (n_atoms - 1 - i)) & 1 == 1 { 'r' } else { 'g' })
        .collect()
}

/// On-disk geometry description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryFile {
    pub positions: Vec<[f64; 2]>,
    pub scale: f64,
    pub omega: f64,
    pub delta: f64,
    #[serde(default)]
    pub delta0: f64,
    #[serde(default)]
    pub delta0_atoms: Vec<usize>,
    /// `[i, j, V_ij]` triples.
    #[serde(default)]
    pub overrides: Vec<(usize, usize, f64)>,
}

impl GeometryFile {
    pub fn from_parts(geometry: &AtomGeometry, params: &RydbergParams) -> Self {
        Self {
            positions: geometry.positions.clone(),
            scale: geometry.scale,
            omega: params.omega,
            delta: params.delta,
            delta0: params.delta0,
            delta0_atoms: params.delta0_atoms.clone(),
            overrides: params.pair_overrides.iter().map(|o| (o.i, o.j, o.v)).collect(),
        }
    }

    pub fn into_system(self) -> Result<RydbergSystem> {
        let geometry = AtomGeometry::new(self.positions, self.scale)?;
        let params = RydbergParams {
            omega: self.omega,
            delta: self.delta,
            delta0: self.delta0,
            delta0_atoms: self.delta0_atoms,
            pair_overrides: self
                .overrides
                .into_iter()
                .map(|(i, j, v)| PairCoupling { i, j, v })
                .collect(),
        };
        RydbergSystem::new(geometry, params)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("geometry serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| invalid("geometry", e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn idx(label: &str) -> usize {
        label
            .chars()
            .fold(0, |acc, c| (acc << 1) | usize::from(c == 'r'))
    }

    #[test]
    fn power_law() {
        let v0 = 3.7;
        assert!((pair_interaction(v0, 2.0).unwrap() - v0 / 64.0).abs() < 1e-15);
        assert!((pair_interaction(v0, 10.0).unwrap() - v0 * 1e-6).abs() < 1e-18);
        let rho: f64 = 0.4;
        let r = (1.0 + rho * rho).sqrt() / rho;
        let expected = v0 * (rho / (1.0 + rho * rho).sqrt()).powi(6);
        assert!((pair_interaction(v0, r).unwrap() - expected).abs() < 1e-15);
        assert!(pair_interaction(1.0, 0.0).is_err());
        assert!(pair_interaction(1.0, -1.0).is_err());
    }

    #[test]
    fn two_atom_table() {
        let (delta, v0) = (-0.7, 32.0);
        let sys = RydbergSystem::new(geometry_two_atom(1.0, v0).unwrap(), RydbergParams::new(0.0, delta)).unwrap();
        let h = sys.hamiltonian();
        assert!(h.matrix().is_diagonal());
        let d = h.diagonal();
        assert_eq!(d[idx("rg")], -delta);
        assert_eq!(d[idx("gg")], 0.0);
        assert_eq!(d[idx("gr")], -delta);
        assert!((d[idx("rr")] - (-2.0 * delta + v0)).abs() < 1e-14);
    }

    #[test]
    fn three_atom_tables() {
        let (delta, delta0, v0) = (15.0, 0.4, 30.0);
        let g = geometry_three_atom_line(1.0, v0).unwrap();
        let p = RydbergParams::new(0.0, delta).with_delta0(delta0, vec![1]);
        let d = build_rydberg_h(&g, &p).unwrap().diagonal();
        let close = |a: f64, b: f64| (a - b).abs() < 1e-13;
        assert!(close(d[idx("rgg")], -delta));
        assert!(close(d[idx("grg")], -delta - delta0));
        assert!(close(d[idx("ggr")], -delta));
        assert!(close(d[idx("ggg")], 0.0));
        assert!(close(d[idx("rrg")], -2.0 * delta - delta0 + v0));
        assert!(close(d[idx("rgr")], -2.0 * delta + v0 / 64.0));
        assert!(close(d[idx("grr")], -2.0 * delta - delta0 + v0));
        assert!(close(d[idx("rrr")], -3.0 * delta - delta0 + 2.0 * v0 + v0 / 64.0));
    }

    #[test]
    fn line_geometries() {
        let g = geometry_two_atom(1.0, 5.0).unwrap();
        assert_eq!(g.interaction(0, 1), 5.0);
        let g = geometry_three_atom_line(1.0, 5.0).unwrap();
        assert!((g.interaction(0, 2) - 5.0 / 64.0).abs() < 1e-15);
        let g2 = geometry_three_atom_line(2.0, 5.0).unwrap();
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            assert!((g2.interaction(i, j) - g.interaction(i, j) / 64.0).abs() < 1e-15);
        }
        assert!(geometry_two_atom(0.0, 1.0).is_err());
    }

    #[test]
    fn ladder_couplings_match_geometry() {
        let (y, v0) = (0.2_f64, 64.0);
        let rho = (y / v0).powf(1.0 / 6.0);
        assert!((rho - 0.38239).abs() < 5e-5);
        let lc = LadderCouplings::new(RungSize::Two, rho, v0);
        assert!((lc.v1 - y).abs() < 1e-14);
        assert!((lc.v2 - 0.1329).abs() < 1e-3);

        let g = geometry_mirrored_ladder(RungSize::Two, 1.0, 1.0 / rho, v0).unwrap();
        // L+1 = 0, L−1 = 1, R+1 = 2, R−1 = 3.
        assert!((g.interaction(0, 3) - lc.v1).abs() < 1e-14);
        assert!((g.interaction(1, 2) - lc.v1).abs() < 1e-14);
        assert!((g.interaction(0, 2) - lc.v2).abs() < 1e-14);
        assert!((g.interaction(1, 3) - lc.v2).abs() < 1e-14);
        assert!((g.interaction(0, 1) - v0).abs() < 1e-12);

        let lc = LadderCouplings::new(RungSize::Three, 0.326, 30.0);
        assert!((lc.v1 - 0.03601).abs() < 1e-5);
        let v3 = 30.0 * (0.326 / (1.0 + 4.0 * 0.326 * 0.326_f64).sqrt()).powi(6);
        assert!((lc.v3.unwrap() - v3).abs() < 1e-15);
        let g = geometry_mirrored_ladder(RungSize::Three, 1.0, 1.0 / 0.326, 30.0).unwrap();
        // L+1 = 0, L0 = 1, L−1 = 2, R+1 = 3, R0 = 4, R−1 = 5.
        assert!((g.interaction(0, 5) - lc.v1).abs() < 1e-14);
        assert!((g.interaction(1, 4) - lc.v1).abs() < 1e-14);
        assert!((g.interaction(1, 3) - lc.v2).abs() < 1e-14);
        assert!((g.interaction(0, 4) - lc.v2).abs() < 1e-14);
        assert!((g.interaction(0, 3) - v3).abs() < 1e-14);
        assert!((g.interaction(0, 2) - 30.0 / 64.0).abs() < 1e-12);
    }

    #[test]
    fn spin_maps() {
        let two = SpinAtomMap::new(Encoding::TwoAtom, 1);
        assert_eq!(two.atom_index(&[0]), idx("gg"));
        assert_eq!(two.atom_index(&[1]), idx("rg"));
        let three = SpinAtomMap::new(Encoding::ThreeAtom, 1);
        assert_eq!(three.atom_index(&[1]), idx("rgg"));
        assert_eq!(three.atom_index(&[0]), idx("grg"));
        let five = SpinAtomMap::new(Encoding::FiveAtom, 1);
        assert_eq!(five.atom_index(&[2]), idx("rgggg"));
        assert_eq!(five.atom_index(&[-2]), idx("ggggr"));
        let pair = SpinAtomMap::new(Encoding::ThreeAtom, 2);
        assert_eq!(pair.atom_index(&[1, -1]), idx("rggggr"));

        for map in [two, three, five, pair, SpinAtomMap::new(Encoding::TwoAtom, 2)] {
            let mut seen: Vec<usize> = map.spin_states().iter().map(|s| s.1).collect();
            seen.sort();
            seen.dedup();
            assert_eq!(seen.len(), map.spin_dim(), "map must be injective");
        }
    }

    #[test]
    fn embedding() {
        let two = SpinAtomMap::new(Encoding::TwoAtom, 1);
        let plus = StateVector::from_real(&[1.0, 0.0, 1.0]).unwrap();
        let e = embed_spin_state(&two, &plus).unwrap();
        let r = 0.5_f64.sqrt();
        assert!((e.amplitudes()[idx("rg")].re - r).abs() < 1e-15);
        assert!((e.amplitudes()[idx("gr")].re - r).abs() < 1e-15);
        assert!((e.norm() - 1.0).abs() < 1e-15);
        let zero = embed_spin_state(&two, &StateVector::basis(3, 1)).unwrap();
        assert_eq!(zero, StateVector::basis(4, idx("gg")));
        assert!(embed_spin_state(&two, &StateVector::basis(9, 0)).is_err());
    }

    #[test]
    fn overrides_reproduce_geometry_bitwise() {
        let g = geometry_mirrored_ladder(RungSize::Three, 1.0, 3.0, 30.0).unwrap();
        let base = RydbergParams::new(1.0, 15.0).with_delta0(0.3, vec![1, 4]);
        let plain = RydbergSystem::new(g.clone(), base.clone()).unwrap();
        let mut overrides = vec![];
        for i in 0..6 {
            for j in i + 1..6 {
                overrides.push(PairCoupling { i, j, v: plain.coupling(i, j) });
            }
        }
        let forced = RydbergSystem::new(g, base.with_overrides(overrides)).unwrap();
        assert_eq!(plain.hamiltonian(), forced.hamiltonian());
    }

    #[test]
    fn invalid_parameters() {
        let g = geometry_two_atom(1.0, 1.0).unwrap();
        assert!(RydbergSystem::new(g.clone(), RydbergParams::new(0.0, 0.0).with_delta0(1.0, vec![2])).is_err());
        let bad = RydbergParams::new(0.0, 0.0).with_overrides(vec![PairCoupling { i: 0, j: 0, v: 1.0 }]);
        assert!(RydbergSystem::new(g, bad).is_err());
        assert!(AtomGeometry::new(vec![[0.0, 0.0], [0.0, 0.0]], 1.0).is_err());
        let many: Vec<[f64; 2]> = (0..13).map(|k| [k as f64, 0.0]).collect();
        let g = AtomGeometry::new(many, 1.0).unwrap();
        assert!(matches!(
            RydbergSystem::new(g, RydbergParams::new(1.0, 0.0)),
            Err(Error::DimensionOverflow { .. })
        ));
    }

    #[test]
    fn geometry_json_round_trip() {
        let g = geometry_mirrored_ladder(RungSize::Two, 1.0, 2.5, 64.0).unwrap();
        let p = RydbergParams::new(-1.2, -0.6).with_overrides(vec![PairCoupling { i: 0, j: 2, v: -0.2 }]);
        let file = GeometryFile::from_parts(&g, &p);
        let json = file.to_json();
        assert!(json.contains("\"delta0_atoms\""));
        let back = GeometryFile::from_json(&json).unwrap();
        assert_eq!(back, file);
        let sys = back.into_system().unwrap();
        assert_eq!(sys.coupling(0, 2), -0.2);
    }

    #[test]
    fn atom_labels() {
        assert_eq!(atom_label(idx("rgg"), 3), "rgg");
        assert_eq!(atom_label(0, 2), "gg");
    }

    proptest! {
        #[test]
        fn ladder_couplings_ordered(rho in 1e-3f64..5.0, v0 in 0.1f64..100.0) {
            let lc = LadderCouplings::new(RungSize::Three, rho, v0);
            let v3 = lc.v3.unwrap();
            prop_assert!(lc.v1 > lc.v2 && lc.v2 > v3 && v3 > 0.0);
        }

        #[test]
        fn mirrored_ladders_commute_with_reflection(
            rho in 0.1f64..0.9,
            omega in -2.0f64..2.0,
            delta in -20.0f64..20.0,
            delta0 in -1.0f64..1.0,
            three in any::<bool>(),
            truncate in any::<bool>(),
        ) {
            let rung = if three { RungSize::Three } else { RungSize::Two };
            let g = geometry_mirrored_ladder(rung, 1.0, 1.0 / rho, 30.0).unwrap();
            let mut p = RydbergParams::new(omega, delta);
            if three {
                p = p.with_delta0(delta0, vec![1, 4]);
            }
            if truncate {
                p = p.with_overrides(listed_couplings_only(rung));
            }
            let sys = RydbergSystem::new(g, p).unwrap();
            let h = sys.hamiltonian();
            let tol = 1e-14 * h.matrix().max_abs();
            prop_assert!(h.matrix().hermiticity_deviation() <= tol);
            let mirror = sys.mirror_permutation().unwrap();
            prop_assert!(h.matrix().commutator(&mirror).max_abs() <= tol);
        }

        #[test]
        fn zero_drive_is_diagonal_table(delta in -5.0f64..5.0, delta0 in -2.0f64..2.0, v0 in 1.0f64..100.0) {
            let g = geometry_three_atom_line(1.0, v0).unwrap();
            let sys = RydbergSystem::new(g, RydbergParams::new(0.0, delta).with_delta0(delta0, vec![1])).unwrap();
            let h = sys.hamiltonian();
            prop_assert!(h.matrix().is_diagonal());
            let d = h.diagonal();
            prop_assert!((d[idx("rgr")] - (-2.0 * delta + v0 / 64.0)).abs() <= 1e-12 * v0);
            prop_assert!((d[idx("rrg")] - (-2.0 * delta - delta0 + v0)).abs() <= 1e-12 * v0);
        }
    }
}
