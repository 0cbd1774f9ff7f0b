//! Dense complex linear algebra for small Hamiltonians.
//!
//! Every operator in this crate is at most a few thousand states wide and the
//! ones that get diagonalized are at most 64 wide, so everything is stored as a
//! dense row-major matrix. Diagonalization uses cyclic complex Jacobi
//! rotations, and time evolution goes through the spectral decomposition
//! `exp(-iHt) = V exp(-iΛt) V†`.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const HERMITIAN_RTOL: f64 = 1e-12;
const JACOBI_RTOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;
/// Eigenvalues closer than this (relative to ‖H‖) share one canonical basis.
const DEGENERACY_RTOL: f64 = 1e-10;
/// Relative margin used when picking the "largest" entry, so that values
/// equal up to rounding resolve to the lowest index.
const PIVOT_MARGIN: f64 = 1e-8;

/// Square, dense, row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries, checking shape and finiteness.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows != cols || data.len() != rows * cols || rows == 0 {
            return Err(Error::NotSquare { rows, cols });
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(Self { dim: rows, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: r.len(),
                });
            }
            data.extend(r.iter().map(|&x| C64::new(x, 0.0)));
        }
        Self::from_rows(n, n, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len(), "apply dimension mismatch");
        let n = self.dim;
        (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// `U A U†`.
    pub fn conjugated_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim;
        (0..n).all(|i| (0..n).all(|j| i == j || self[(i, j)] == C64::new(0.0, 0.0)))
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        let m = nalgebra::DMatrix::from_row_slice(self.dim, self.dim, &self.data);
        m.singular_values().max()
    }

    /// `max |U†U − 1|`.
    pub fn unitarity_deviation(&self) -> f64 {
        (&self.adjoint().matmul(self) - &Self::identity(self.dim)).max_abs()
    }

    /// Spectral 2-norm estimate used for tolerances: the Frobenius norm, which
    /// bounds it from above.
    pub fn norm_bound(&self) -> f64 {
        self.frobenius_norm()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Kronecker product; the left factor is the most significant index.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim, b.dim);
    let n = na * nb;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..na {
        for j in 0..na {
            let aij = a[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    out.data[(i * nb + k) * n + j * nb + l] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// `1 ⊗ … ⊗ op ⊗ … ⊗ 1` with `op` on `site` out of `n_sites` equal factors.
pub fn site_operator(op: &ComplexMatrix, site: usize, n_sites: usize) -> ComplexMatrix {
    assert!(site < n_sites);
    let d = op.dim();
    let left = ComplexMatrix::identity(d.pow(site as u32));
    let right = ComplexMatrix::identity(d.pow((n_sites - site - 1) as u32));
    kron(&kron(&left, op), &right)
}

/// A matrix known to satisfy `H = H†` within `1e-12 · max|H|`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let deviation = matrix.hermiticity_deviation();
        if deviation > HERMITIAN_RTOL * matrix.max_abs() {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { matrix })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self {
            matrix: ComplexMatrix::from_diagonal(diag),
        }
    }

    /// Real symmetric input given by rows; fails if not symmetric.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_rows(rows)?)
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.hermiticity_deviation() <= 1e-10 * matrix.max_abs().max(1.0));
        Self { matrix }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.scale(C64::new(s, 0.0)),
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            matrix: kron(&self.matrix, &other.matrix),
        }
    }

    /// Operator square `H·H`, still Hermitian.
    pub fn squared(&self) -> Self {
        Self {
            matrix: self.matrix.matmul(&self.matrix),
        }
    }

    pub fn on_site(&self, site: usize, n_sites: usize) -> Self {
        Self {
            matrix: site_operator(&self.matrix, site, n_sites),
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

/// Normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    /// Normalizes the given amplitudes.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::from_amplitudes(amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Wraps amplitudes produced by a unitary map; no renormalization.
    pub(crate) fn from_unitary_image(amplitudes: Vec<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn apply(&self, op: &ComplexMatrix) -> Result<Self> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: op.dim(),
                found: self.dim(),
            });
        }
        Ok(Self {
            amplitudes: op.apply(&self.amplitudes),
        })
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Eigenvalues in ascending order with orthonormal eigenvector columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        (0..self.dim()).map(|i| self.eigenvectors[(i, k)]).collect()
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)].conj())
                .sum()
        })
    }
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Sweeps visit pairs `(p, q)`, `p < q`, in index order until the off-diagonal
/// Frobenius norm drops below `1e-13 · ‖H‖`. Eigenvectors of degenerate
/// clusters are replaced by a column-pivoted Gram–Schmidt basis of the
/// cluster projector, and every vector's largest component is made real and
/// positive, so identical inputs always produce identical output.
pub fn eig_hermitian(h: &HermitianOperator) -> Spectrum {
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let norm = a.frobenius_norm();
    let tol = JACOBI_RTOL * norm;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut columns: Vec<Vec<C64>> = order
        .iter()
        .map(|&k| (0..n).map(|i| v[(i, k)]).collect())
        .collect();

    let deg_tol = DEGENERACY_RTOL * norm.max(f64::MIN_POSITIVE);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eigenvalues[end] - eigenvalues[end - 1] <= deg_tol {
            end += 1;
        }
        if end - start > 1 {
            let basis = canonical_cluster_basis(&columns[start..end]);
            columns.splice(start..end, basis);
        }
        start = end;
    }
    for col in &mut columns {
        fix_phase(col);
    }

    let eigenvectors = ComplexMatrix::from_fn(n, |i, k| columns[k][i]);
    Spectrum {
        eigenvalues,
        eigenvectors,
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation `A ← G†AG`, `V ← VG` annihilating `A[p][q]`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if r < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let phase = apq / r;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // G = [[c, s·e], [−s·ē, c]] on the (p, q) plane.
    let g_pq = phase * s;
    let g_qp = -phase.conj() * s;
    let n = a.dim();

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * g_qp.conj();
        a[(q, k)] = apk * g_pq.conj() + aqk * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(app - t * r, 0.0);
    a[(q, q)] = C64::new(aqq + t * r, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * c;
    }
}

/// Orthonormal basis of span(cluster) built from the projected unit vectors
/// `P e_j`, picking the largest remaining candidate at each step.
fn canonical_cluster_basis(cluster: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let n = cluster[0].len();
    let m = cluster.len();
    let mut candidates: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| cluster.iter().map(|col| col[i] * col[j].conj()).sum())
                .collect()
        })
        .collect();
    let mut basis = Vec::with_capacity(m);
    for _ in 0..m {
        let norms: Vec<f64> = candidates.iter().map(|c| vec_norm(c)).collect();
        let best = norms.iter().cloned().fold(0.0, f64::max);
        let pick = norms
            .iter()
            .position(|&x| x >= best * (1.0 - PIVOT_MARGIN))
            .expect("cluster projector has rank m");
        let q: Vec<C64> = candidates[pick].iter().map(|z| z / norms[pick]).collect();
        for cand in &mut candidates {
            let overlap: C64 = q.iter().zip(cand.iter()).map(|(a, b)| a.conj() * b).sum();
            for (c, qi) in cand.iter_mut().zip(&q) {
                *c -= overlap * qi;
            }
        }
        basis.push(q);
    }
    basis
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn fix_phase(col: &mut [C64]) {
    let best = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if best == 0.0 {
        return;
    }
    let k = col
        .iter()
        .position(|z| z.norm() >= best * (1.0 - PIVOT_MARGIN))
        .unwrap();
    let rot = col[k].conj() / col[k].norm();
    for z in col.iter_mut() {
        *z *= rot;
    }
}

/// Cached spectral decomposition for repeated evolution of one Hamiltonian.
#[derive(Clone, Debug)]
pub struct Propagator {
    spectrum: Spectrum,
}

impl Propagator {
    pub fn new(h: &HermitianOperator) -> Self {
        Self {
            spectrum: eig_hermitian(h),
        }
    }

    pub fn from_spectrum(spectrum: Spectrum) -> Self {
        Self { spectrum }
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.spectrum.dim()
    }

    fn modes(&self, psi: &StateVector) -> Vec<C64> {
        let n = self.dim();
        let v = &self.spectrum.eigenvectors;
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|i| v[(i, k)].conj() * psi.amplitudes()[i])
                    .sum()
            })
            .collect()
    }

    fn check_dim(&self, psi: &StateVector) -> Result<()> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.dim(),
            });
        }
        Ok(())
    }

    /// `exp(−iHt) ψ`.
    pub fn evolve(&self, t: f64, psi: &StateVector) -> Result<StateVector> {
        self.check_dim(psi)?;
        let n = self.dim();
        let modes: Vec<C64> = self
            .modes(psi)
            .into_iter()
            .zip(&self.spectrum.eigenvalues)
            .map(|(c, &e)| c * C64::from_polar(1.0, -e * t))
            .collect();
        let v = &self.spectrum.eigenvectors;
        let out = (0..n)
            .map(|i| (0..n).map(|k| v[(i, k)] * modes[k]).sum())
            .collect();
        Ok(StateVector::from_unitary_image(out))
    }

    /// The matrix `exp(−iHt)`.
    pub fn unitary(&self, t: f64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.spectrum.eigenvectors;
        let phases: Vec<C64> = self
            .spectrum
            .eigenvalues
            .iter()
            .map(|&e| C64::from_polar(1.0, -e * t))
            .collect();
        ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| v[(i, k)] * phases[k] * v[(j, k)].conj()).sum())
    }

    /// Precomputes `⟨f|exp(−iHt)|ψ⟩ = Σ_k w_k e^{−iλ_k t}` for fast sampling.
    pub fn transition(&self, psi: &StateVector, f: &StateVector) -> Result<TransitionAmplitude> {
        self.check_dim(psi)?;
        self.check_dim(f)?;
        let weights = self
            .modes(f)
            .iter()
            .zip(self.modes(psi))
            .map(|(fk, pk)| fk.conj() * pk)
            .collect();
        Ok(TransitionAmplitude {
            energies: self.spectrum.eigenvalues.clone(),
            weights,
        })
    }
}

/// Closed-form transition amplitude as a sum over eigenmodes.
#[derive(Clone, Debug)]
pub struct TransitionAmplitude {
    energies: Vec<f64>,
    weights: Vec<C64>,
}

impl TransitionAmplitude {
    pub fn amplitude(&self, t: f64) -> C64 {
        self.energies
            .iter()
            .zip(&self.weights)
            .map(|(&e, w)| w * C64::from_polar(1.0, -e * t))
            .sum()
    }

    pub fn probability(&self, t: f64) -> f64 {
        self.amplitude(t).norm_sqr()
    }
}

/// `exp(−iHt) ψ₀` via the spectral decomposition of `H`.
pub fn evolve(h: &HermitianOperator, t: f64, psi0: &StateVector) -> Result<StateVector> {
    if psi0.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psi0.dim(),
        });
    }
    Propagator::new(h).evolve(t, psi0)
}
