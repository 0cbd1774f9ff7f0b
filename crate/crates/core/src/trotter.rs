//! First-order Trotter circuits for Rydberg Hamiltonians, statevector
//! execution and seeded shot sampling.
//!
//! Qubit `q` is atom `q`; qubit 0 is the most significant bit and bitstrings
//! list qubit 0 first, `1` meaning `|r⟩`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::{ComplexMatrix, StateVector, C64};
use crate::rydberg::{geometry_two_atom, RydbergParams, RydbergSystem};

pub const MAX_QUBITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateKind {
    /// `exp(−iλX/2)`
    RX,
    /// `diag(1, e^{iφ})`
    P,
    /// `diag(1, 1, 1, e^{iφ})`
    CP,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            Self::RX | Self::P => 1,
            Self::CP => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub gate: GateKind,
    pub q: Vec<usize>,
    pub angle: f64,
}

impl Gate {
    pub fn rx(q: usize, angle: f64) -> Self {
        Self {
            gate: GateKind::RX,
            q: vec![q],
            angle,
        }
    }

    pub fn p(q: usize, angle: f64) -> Self {
        Self {
            gate: GateKind::P,
            q: vec![q],
            angle,
        }
    }

    pub fn cp(a: usize, b: usize, angle: f64) -> Self {
        Self {
            gate: GateKind::CP,
            q: vec![a, b],
            angle,
        }
    }

    /// Matrix on the gate's own qubits, first listed qubit most significant.
    pub fn matrix(&self) -> ComplexMatrix {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        match self.gate {
            GateKind::RX => {
                let (c, s) = ((self.angle / 2.0).cos(), (self.angle / 2.0).sin());
                ComplexMatrix::from_fn(2, |i, j| if i == j { C64::new(c, 0.0) } else { C64::new(0.0, -s) })
            }
            GateKind::P => {
                ComplexMatrix::from_fn(2, |i, j| match (i, j) {
                    (0, 0) => one,
                    (1, 1) => C64::from_polar(1.0, self.angle),
                    _ => z,
                })
            }
            GateKind::CP => ComplexMatrix::from_fn(4, |i, j| match (i == j, i) {
                (true, 3) => C64::from_polar(1.0, self.angle),
                (true, _) => one,
                _ => z,
            }),
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.q.len() != self.gate.arity() {
            return Err(invalid("gate", format!("{:?} takes {} qubits", self.gate, self.gate.arity())));
        }
        if self.q.iter().any(|&q| q >= n_qubits) {
            return Err(invalid("gate", format!("qubit out of range for {n_qubits} qubits")));
        }
        if self.q.len() == 2 && self.q[0] == self.q[1] {
            return Err(invalid("gate", "two-qubit gate on a single qubit"));
        }
        if !self.angle.is_finite() {
            return Err(invalid("gate", "angle must be finite"));
        }
        Ok(())
    }

    fn apply(&self, amps: &mut [C64], n_qubits: usize) {
        let bit = |q: usize| 1usize << (n_qubits - 1 - q);
        match self.gate {
            GateKind::RX => {
                let m = bit(self.q[0]);
                let (c, s) = ((self.angle / 2.0).cos(), (self.angle / 2.0).sin());
                let off = C64::new(0.0, -s);
                for i in (0..amps.len()).filter(|i| i & m == 0) {
                    let (a, b) = (amps[i], amps[i | m]);
                    amps[i] = a * c + b * off;
                    amps[i | m] = a * off + b * c;
                }
            }
            GateKind::P => {
                let m = bit(self.q[0]);
                let ph = C64::from_polar(1.0, self.angle);
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & m != 0 {
                        *a *= ph;
                    }
                }
            }
            GateKind::CP => {
                let m = bit(self.q[0]) | bit(self.q[1]);
                let ph = C64::from_polar(1.0, self.angle);
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & m == m {
                        *a *= ph;
                    }
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::DimensionOverflow {
                dim: 1usize.checked_shl(n_qubits as u32).unwrap_or(usize::MAX),
                limit: 1 << MAX_QUBITS,
            });
        }
        Ok(Self {
            n_qubits,
            gates: vec![],
        })
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// `steps` copies of this circuit in sequence.
    pub fn repeated(&self, steps: usize) -> Self {
        Self {
            n_qubits: self.n_qubits,
            gates: (0..steps).flat_map(|_| self.gates.iter().cloned()).collect(),
        }
    }

    pub fn unitary(&self) -> ComplexMatrix {
        let dim = self.dim();
        let mut u = ComplexMatrix::zeros(dim);
        for j in 0..dim {
            let col = self.run(StateVector::basis(dim, j).amplitudes().to_vec());
            for (i, z) in col.into_iter().enumerate() {
                u[(i, j)] = z;
            }
        }
        u
    }

    fn run(&self, mut amps: Vec<C64>) -> Vec<C64> {
        for g in &self.gates {
            g.apply(&mut amps, self.n_qubits);
        }
        amps
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.gates).expect("circuit serializes")
    }

    pub fn from_json(n_qubits: usize, s: &str) -> Result<Self> {
        let gates: Vec<Gate> = serde_json::from_str(s).map_err(|e| invalid("circuit", e.to_string()))?;
        let mut c = Self::new(n_qubits)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }
}

pub fn apply_circuit(c: &Circuit, psi0: &StateVector) -> Result<StateVector> {
    if psi0.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: psi0.dim(),
        });
    }
    Ok(StateVector::from_unitary_image(c.run(psi0.amplitudes().to_vec())))
}

/// One step `exp(−i·dt·H)`: an RX layer, a phase layer carrying the
/// detunings, then one CP per interacting pair.
pub fn trotter_step(sys: &RydbergSystem, dt: f64) -> Result<Circuit> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(invalid("dt", format!("must be positive, got {dt}")));
    }
    let n = sys.n_atoms();
    let mut c = Circuit::new(n)?;
    let omega = sys.params().omega;
    for q in 0..n {
        c.push(Gate::rx(q, omega * dt))?;
    }
    for (q, det) in sys.detunings().into_iter().enumerate() {
        c.push(Gate::p(q, det * dt))?;
    }
    for i in 0..n {
        for j in i + 1..n {
            let v = sys.coupling(i, j);
            if v != 0.0 {
                c.push(Gate::cp(i, j, -v * dt))?;
            }
        }
    }
    Ok(c)
}

/// Trotter step of the two-atom simulator.
pub fn trotter_step_h2r(omega: f64, delta: f64, v0: f64, dt: f64) -> Result<Circuit> {
    let sys = RydbergSystem::new(geometry_two_atom(1.0, v0)?, RydbergParams::new(omega, delta))?;
    trotter_step(&sys, dt)
}

/// States after `0, 1, …, steps` applications of `step`.
pub fn trotter_states(step: &Circuit, psi0: &StateVector, steps: usize) -> Result<Vec<StateVector>> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(psi0.clone());
    let mut psi = psi0.clone();
    for _ in 0..steps {
        psi = apply_circuit(step, &psi)?;
        out.push(psi.clone());
    }
    Ok(out)
}

pub fn bitstring(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .map(|q| if (index >> (n_qubits - 1 - q)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotResult {
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
    pub seed: u64,
}

impl ShotResult {
    pub fn frequency(&self, bits: &str) -> f64 {
        *self.counts.get(bits).unwrap_or(&0) as f64 / self.shots as f64
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("shots serialize")
    }
}

/// Draws `shots` outcomes from `|ψ|²` with ChaCha8 seeded by
/// `seed_from_u64(seed)`: one uniform `f64` per shot, mapped through the
/// cumulative distribution in basis order.
pub fn sample_shots(psi: &StateVector, shots: u64, seed: u64) -> Result<ShotResult> {
    if shots == 0 {
        return Err(invalid("shots", "must be positive"));
    }
    let dim = psi.dim();
    if !dim.is_power_of_two() {
        return Err(invalid("psi", format!("dimension {dim} is not a qubit register")));
    }
    let n_qubits = dim.trailing_zeros() as usize;
    let probs = psi.probabilities();
    let total: f64 = probs.iter().sum();
    let mut cdf = Vec::with_capacity(dim);
    let mut acc = 0.0;
    for p in &probs {
        acc += p / total;
        cdf.push(acc);
    }
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(dim - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = vec![0u64; dim];
    for _ in 0..shots {
        let u: f64 = rng.random();
        let k = cdf.partition_point(|&c| c <= u).min(last);
        tally[k] += 1;
    }
    let counts = tally
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(k, c)| (bitstring(k, n_qubits), c))
        .collect();
    Ok(ShotResult { counts, shots, seed })
}
