//! Spin-truncated link operators and the target Hamiltonians.
//!
//! Basis order is descending `m` (`|m_max⟩` first). For several links the
//! left-most link is the most significant tensor factor.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::{ComplexMatrix, HermitianOperator, C64};

/// Largest total Hilbert space `build_chain_h` will assemble.
pub const MAX_CHAIN_DIM: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinTruncation {
    m_max: u32,
}

impl SpinTruncation {
    pub const QUTRIT: Self = Self { m_max: 1 };

    pub fn new(m_max: u32) -> Result<Self> {
        if m_max == 0 || m_max > 5 {
            return Err(invalid("m_max", format!("must be in 1..=5, got {m_max}")));
        }
        Ok(Self { m_max })
    }

    pub fn m_max(self) -> u32 {
        self.m_max
    }

    pub fn dim(self) -> usize {
        2 * self.m_max as usize + 1
    }

    /// Basis index of quantum number `m`.
    pub fn index_of(self, m: i32) -> usize {
        assert!(m.unsigned_abs() <= self.m_max, "m = {m} outside truncation");
        (self.m_max as i32 - m) as usize
    }

    /// Quantum number held at basis index `i`.
    pub fn m_at(self, i: usize) -> i32 {
        self.m_max as i32 - i as i32
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    /// Plain nearest-neighbour ring; experimental.
    Periodic,
}

/// Target couplings `(U, X, Y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetCouplings {
    pub u: f64,
    pub x: f64,
    #[serde(default)]
    pub y: f64,
    #[serde(default)]
    pub boundary: Boundary,
}

impl TargetCouplings {
    pub fn new(u: f64, x: f64, y: f64) -> Self {
        Self {
            u,
            x,
            y,
            boundary: Boundary::Open,
        }
    }

    pub fn one_spin(u: f64, x: f64) -> Self {
        Self::new(u, x, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("U", self.u), ("X", self.x), ("Y", self.y)] {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        Ok(())
    }
}

/// Closed-form or perturbative one-spin energies and mixing angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneSpinSpectrum {
    pub e0: f64,
    pub eplus: f64,
    pub eminus: f64,
    pub phi: f64,
}

impl OneSpinSpectrum {
    /// `(E₊ − E₀) / (E₋ − E₀)`.
    pub fn gap_ratio(&self) -> f64 {
        (self.eplus - self.e0) / (self.eminus - self.e0)
    }
}

/// Euclidean lattice couplings feeding the continuous-time limit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LagrangianCouplings {
    pub beta_pl: f64,
    pub kappa_tau: f64,
    pub kappa_s: f64,
    /// Temporal lattice spacing.
    pub a: f64,
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `L^z = diag(m_max, …, −m_max)`.
pub fn op_lz(trunc: SpinTruncation) -> HermitianOperator {
    let diag: Vec<f64> = (0..trunc.dim()).map(|i| trunc.m_at(i) as f64).collect();
    HermitianOperator::from_real_diagonal(&diag)
}

/// `U^x = (U^+ + U^-)/2`, with `U^±` truncated at `±m_max`.
pub fn op_ux(trunc: SpinTruncation) -> HermitianOperator {
    let n = trunc.dim();
    let m = ComplexMatrix::from_fn(n, |i, j| {
        if i.abs_diff(j) == 1 {
            real(0.5)
        } else {
            real(0.0)
        }
    });
    HermitianOperator::new(m).expect("U^x is symmetric")
}

/// `C|m⟩ = |−m⟩`, the anti-diagonal permutation.
pub fn op_charge_conjugation(trunc: SpinTruncation) -> ComplexMatrix {
    let n = trunc.dim();
    ComplexMatrix::from_fn(n, |i, j| if i + j == n - 1 { real(1.0) } else { real(0.0) })
}

/// `C ⊗ C ⊗ …` over `n_sites` links.
pub fn global_charge_conjugation(trunc: SpinTruncation, n_sites: usize) -> ComplexMatrix {
    let c = op_charge_conjugation(trunc);
    (1..n_sites).fold(c.clone(), |acc, _| crate::numerics::kron(&acc, &c))
}

/// `H^{1T} = (U/2)(L^z)² − X U^x`.
pub fn build_h1t(c: &TargetCouplings, trunc: SpinTruncation) -> HermitianOperator {
    let lz2 = op_lz(trunc).squared();
    &lz2.scaled(c.u / 2.0) - &op_ux(trunc).scaled(c.x)
}

/// Exact spin-1 spectrum of `H^{1T}` and the mixing angle of its ground state.
pub fn analytic_one_spin(c: &TargetCouplings) -> OneSpinSpectrum {
    let root = (c.u * c.u + 8.0 * c.x * c.x).sqrt();
    let e0 = (c.u - root) / 4.0;
    let eplus = (c.u + root) / 4.0;
    let phi = if c.x == 0.0 {
        0.0
    } else {
        (-(2.0_f64).sqrt() * e0 / c.x).atan()
    };
    OneSpinSpectrum {
        e0,
        eplus,
        eminus: c.u / 2.0,
        phi,
    }
}

/// Lowest nontrivial order in `X/U`.
pub fn perturbative_one_spin(c: &TargetCouplings) -> Result<OneSpinSpectrum> {
    if c.u == 0.0 {
        return Err(Error::Singular {
            denominator: "U",
            value: 0.0,
        });
    }
    let shift = c.x * c.x / c.u;
    Ok(OneSpinSpectrum {
        e0: -shift,
        eplus: c.u / 2.0 + shift,
        eminus: c.u / 2.0,
        phi: (2.0_f64).sqrt() * c.x / c.u,
    })
}

/// Two spin-1 links coupled by `(Y/2)(L^z_L − L^z_R)²`, without the terms
/// that open boundaries add in `build_chain_h`.
pub fn build_h2t(c: &TargetCouplings) -> HermitianOperator {
    let t = SpinTruncation::QUTRIT;
    let h1 = build_h1t(c, t);
    let id = HermitianOperator::identity(t.dim());
    let lz = op_lz(t);
    let diff = &lz.kron(&id) - &id.kron(&lz);
    let local = &h1.kron(&id) + &id.kron(&h1);
    &local + &diff.squared().scaled(c.y / 2.0)
}

/// Full `N_s`-link Hamiltonian. Open boundaries add `(L^z_1)² + (L^z_N)²`
/// inside the `Y/2` sum; periodic boundaries close the chain into a ring.
pub fn build_chain_h(
    c: &TargetCouplings,
    trunc: SpinTruncation,
    n_sites: usize,
) -> Result<HermitianOperator> {
    if n_sites == 0 {
        return Err(invalid("N_s", "need at least one link"));
    }
    let d = trunc.dim();
    let dim = (0..n_sites).try_fold(1usize, |acc, _| acc.checked_mul(d));
    match dim {
        Some(dim) if dim <= MAX_CHAIN_DIM => {}
        _ => {
            return Err(Error::DimensionOverflow {
                dim: dim.unwrap_or(usize::MAX),
                limit: MAX_CHAIN_DIM,
            })
        }
    }

    let lz = op_lz(trunc);
    let lz2 = lz.squared();
    let ux = op_ux(trunc);
    let total = d.pow(n_sites as u32);
    let mut h = HermitianOperator::zeros(total);

    for i in 0..n_sites {
        let local = &lz2.scaled(c.u / 2.0) - &ux.scaled(c.x);
        h = &h + &local.on_site(i, n_sites);
    }

    let mut bonds: Vec<(usize, usize)> = (0..n_sites.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    if c.boundary == Boundary::Periodic && n_sites > 2 {
        bonds.push((n_sites - 1, 0));
    }
    for (i, j) in bonds {
        let diff = &lz.on_site(j, n_sites) - &lz.on_site(i, n_sites);
        h = &h + &diff.squared().scaled(c.y / 2.0);
    }
    if c.boundary == Boundary::Open {
        let ends = if n_sites == 1 {
            lz2.on_site(0, 1).scaled(2.0)
        } else {
            &lz2.on_site(0, n_sites) + &lz2.on_site(n_sites - 1, n_sites)
        };
        h = &h + &ends.scaled(c.y / 2.0);
    }
    Ok(h)
}

/// `U = 1/(β_pl a)`, `Y = 1/(2κ_τ a)`, `X = 2κ_s/a`.
pub fn couplings_from_lagrangian(l: &LagrangianCouplings) -> Result<TargetCouplings> {
    if !(l.a > 0.0) {
        return Err(invalid("a", format!("temporal spacing must be positive, got {}", l.a)));
    }
    if l.beta_pl == 0.0 {
        return Err(invalid("beta_pl", "must be nonzero"));
    }
    if l.kappa_tau == 0.0 {
        return Err(invalid("kappa_tau", "must be nonzero"));
    }
    Ok(TargetCouplings::new(
        1.0 / (l.beta_pl * l.a),
        2.0 * l.kappa_s / l.a,
        1.0 / (2.0 * l.kappa_tau * l.a),
    ))
}

/// The `C`-eigenstates `|±⟩ = (|1⟩ ± |−1⟩)/√2` of a qutrit.
pub fn qutrit_parity_states() -> (Vec<f64>, Vec<f64>) {
    let r = 0.5_f64.sqrt();
    (vec![r, 0.0, r], vec![r, 0.0, -r])
}
