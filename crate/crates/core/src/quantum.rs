//! Hilbert-space layer of the finite system attached to `Z(n)`.
//!
//! The system of dimension `n` carries a position basis indexed by `Z(n)`.
//! For each divisor `m` of `n` the order-`m` subgroup spans a subsystem,
//! and every projector of interest here is diagonal in the position basis.
//! Projectors are therefore represented canonically by their index support;
//! dense materialization exists only for cross-validation.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{DivisorLattice, LatticeError, SubgroupView};

/// Tolerance for state normalization.
pub const NORM_TOL: f64 = 1e-10;
/// Tolerance for Hermiticity of density matrices.
pub const HERM_TOL: f64 = 1e-10;
/// Tolerance for the unit-trace condition.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalue floor for positive semidefiniteness.
pub const PSD_TOL: f64 = 1e-9;
/// Tolerance for unitarity of the Fourier matrix.
pub const UNITARY_TOL: f64 = 1e-12;

/// Errors from state and operator construction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    /// Dimension 0 carries no system.
    #[error("dimension must be at least 1")]
    ZeroDimension,
    /// State amplitudes must have unit norm.
    #[error("state is not normalized: |amplitudes|^2 = {norm}")]
    NotNormalized { norm: f64 },
    /// Matrix rows must all have the same length as the row count.
    #[error("matrix is not square: row {row} has {found} entries, expected {expected}")]
    NotSquare {
        row: usize,
        found: usize,
        expected: usize,
    },
    /// Density matrices must be Hermitian.
    #[error("matrix is not Hermitian: max |M - M^dagger| = {max_deviation:.3e}")]
    NotHermitian { max_deviation: f64 },
    /// Density matrices must have unit trace.
    #[error("trace is not 1: Re(trace) = {trace}")]
    TraceNotOne { trace: f64 },
    /// Density matrices must be positive semidefinite.
    #[error("matrix is not PSD: min eigenvalue = {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64 },
    /// Diagonal densities must have nonnegative entries.
    #[error("negative probability at index {index}: {value}")]
    NegativeProbability { index: usize, value: f64 },
    /// Operands must live in the same dimension.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    /// Malformed serialized input.
    #[error("invalid density file: {0}")]
    Format(String),
    /// Index arithmetic delegates divisor checks to the lattice.
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// A normalized state in the position basis of dimension `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Validate and wrap amplitudes; the squared norm must be 1 within
    /// [`NORM_TOL`].
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self, QuantumError> {
        if amplitudes.is_empty() {
            return Err(QuantumError::ZeroDimension);
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QuantumError::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    /// The basis state `|r>` of dimension `n`.
    pub fn basis(n: usize, r: usize) -> Result<Self, QuantumError> {
        if n == 0 {
            return Err(QuantumError::ZeroDimension);
        }
        if r >= n {
            return Err(QuantumError::DimensionMismatch { expected: n, found: r });
        }
        let mut amplitudes = vec![Complex64::ZERO; n];
        amplitudes[r] = Complex64::ONE;
        Ok(Self { amplitudes })
    }

    /// Dimension of the carrier space.
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Amplitudes in basis order.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Inner product `<self|other>` (conjugate-linear in `self`).
    pub fn inner(&self, other: &Self) -> Result<Complex64, QuantumError> {
        if self.dim() != other.dim() {
            return Err(QuantumError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// Embed a state of the dimension-`m` system into dimension `k`, for
/// `m | k`: the amplitude at index `r` moves to index `(k/m) * r`.
///
/// The map is an exact isometry (amplitudes are moved, not rescaled) and
/// composes transitively along divisibility.
pub fn embed_state(v: &StateVector, k: usize) -> Result<StateVector, QuantumError> {
    let m = v.dim();
    if k == 0 {
        return Err(QuantumError::ZeroDimension);
    }
    if k % m != 0 {
        return Err(QuantumError::Lattice(LatticeError::NoEmbedding {
            from: m as u64,
            into: k as u64,
        }));
    }
    let step = k / m;
    let mut amplitudes = vec![Complex64::ZERO; k];
    for (r, &a) in v.amplitudes().iter().enumerate() {
        amplitudes[r * step] = a;
    }
    Ok(StateVector { amplitudes })
}

/// Dense complex matrix, row-major; used for the Fourier transform and for
/// cross-validation of support-set projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DenseOperator {
    /// The identity operator.
    pub fn identity(n: usize) -> Result<Self, QuantumError> {
        if n == 0 {
            return Err(QuantumError::ZeroDimension);
        }
        let mut entries = vec![Complex64::ZERO; n * n];
        for r in 0..n {
            entries[r * n + r] = Complex64::ONE;
        }
        Ok(Self { dim: n, entries })
    }

    /// The finite Fourier transform `F[r][s] = n^(-1/2) exp(i 2 pi r s / n)`.
    ///
    /// The phase is reduced modulo `n` before evaluation so large indices
    /// lose no precision.
    pub fn fourier(n: usize) -> Result<Self, QuantumError> {
        if n == 0 {
            return Err(QuantumError::ZeroDimension);
        }
        let scale = 1.0 / (n as f64).sqrt();
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for s in 0..n {
                let phase = ((r as u128 * s as u128) % n as u128) as f64;
                let angle = std::f64::consts::TAU * phase / n as f64;
                entries.push(Complex64::from_polar(scale, angle));
            }
        }
        Ok(Self { dim: n, entries })
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry at row `r`, column `s`.
    pub fn entry(&self, r: usize, s: usize) -> Complex64 {
        self.entries[r * self.dim + s]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut entries = vec![Complex64::ZERO; n * n];
        for r in 0..n {
            for s in 0..n {
                entries[s * n + r] = self.entries[r * n + s].conj();
            }
        }
        Self { dim: n, entries }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self, QuantumError> {
        if self.dim != other.dim {
            return Err(QuantumError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let n = self.dim;
        let mut entries = vec![Complex64::ZERO; n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.entries[r * n + k];
                if a == Complex64::ZERO {
                    continue;
                }
                for s in 0..n {
                    entries[r * n + s] += a * other.entries[k * n + s];
                }
            }
        }
        Ok(Self { dim: n, entries })
    }

    /// Apply to a state: `|out> = M |v>`.
    pub fn apply(&self, v: &StateVector) -> Result<StateVector, QuantumError> {
        if self.dim != v.dim() {
            return Err(QuantumError::DimensionMismatch {
                expected: self.dim,
                found: v.dim(),
            });
        }
        let n = self.dim;
        let amplitudes = (0..n)
            .map(|r| {
                (0..n)
                    .map(|s| self.entries[r * n + s] * v.amplitudes()[s])
                    .sum()
            })
            .collect();
        Ok(StateVector { amplitudes })
    }

    /// Largest entrywise deviation of `self * self^dagger` from the
    /// identity.
    pub fn unitarity_defect(&self) -> f64 {
        let product = self.mul(&self.adjoint()).expect("dims match");
        let n = self.dim;
        let mut worst = 0.0f64;
        for r in 0..n {
            for s in 0..n {
                let target = if r == s { Complex64::ONE } else { Complex64::ZERO };
                worst = worst.max((product.entries[r * n + s] - target).norm());
            }
        }
        worst
    }

    /// Whether the operator is unitary within `tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }
}

/// Symbolic tag describing how a support set was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportLabel {
    /// `P(m)`: the order-`m` subsystem.
    Subsystem(u64),
    /// `Pt(m)`: the subsystem with the shared lowest state removed.
    Reduced(u64),
    /// `T(m1,m2)`: union of two subsystem supports.
    Union(u64, u64),
    /// `S(m1,m2)`: the part of the join support outside the union.
    Excess(u64, u64),
    /// `D(m)`: indices that witness neither `m` nor its negation.
    DontKnow(u64),
    /// `U(m)`: complement of the reduced negation support.
    Upper(u64),
}

impl fmt::Display for SupportLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Subsystem(m) => write!(f, "P({m})"),
            Self::Reduced(m) => write!(f, "Pt({m})"),
            Self::Union(a, b) => write!(f, "T({a},{b})"),
            Self::Excess(a, b) => write!(f, "S({a},{b})"),
            Self::DontKnow(m) => write!(f, "D({m})"),
            Self::Upper(m) => write!(f, "U({m})"),
        }
    }
}

/// A diagonal projector given by its position-basis support.
///
/// All projectors in this layer are diagonal 0/1 matrices, so the index set
/// determines the operator; traces against it cost `O(|support|)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectorSupport {
    dim: u64,
    indices: BTreeSet<u64>,
    label: SupportLabel,
}

impl ProjectorSupport {
    /// Support of the order-`m` subsystem projector: the multiples of
    /// `n / m`.
    pub fn subsystem(m: u64, n: u64) -> Result<Self, QuantumError> {
        let sub = SubgroupView::new(m, n)?;
        Ok(Self {
            dim: n,
            indices: sub.elements().into_iter().collect(),
            label: SupportLabel::Subsystem(m),
        })
    }

    /// Subsystem support with index 0 removed.
    ///
    /// Index 0 lies in every subsystem, so removing it isolates what is
    /// specific to order `m`; for `m = 1` the result is empty.
    pub fn reduced(m: u64, n: u64) -> Result<Self, QuantumError> {
        let mut base = Self::subsystem(m, n)?;
        base.indices.remove(&0);
        base.label = SupportLabel::Reduced(m);
        Ok(base)
    }

    /// Union of the two subsystem supports.
    pub fn span_union(m1: u64, m2: u64, n: u64) -> Result<Self, QuantumError> {
        let a = Self::subsystem(m1, n)?;
        let b = Self::subsystem(m2, n)?;
        Ok(Self {
            dim: n,
            indices: a.indices.union(&b.indices).copied().collect(),
            label: SupportLabel::Union(m1, m2),
        })
    }

    /// Indices of the join subsystem that lie outside both arguments.
    ///
    /// Always computed as a set difference; its size is
    /// `join - m1 - m2 + meet` by inclusion-exclusion, and it is empty
    /// exactly when the arguments are comparable.
    pub fn join_excess(m1: u64, m2: u64, n: u64) -> Result<Self, QuantumError> {
        let lattice = DivisorLattice::new(n)?;
        let join = lattice.join(m1, m2)?;
        let top = Self::subsystem(join, n)?;
        let union = Self::span_union(m1, m2, n)?;
        Ok(Self {
            dim: n,
            indices: top.indices.difference(&union.indices).copied().collect(),
            label: SupportLabel::Excess(m1, m2),
        })
    }

    /// Indices witnessing neither membership in the order-`m` subsystem nor
    /// membership in the reduced negation subsystem.
    pub fn dont_know(m: u64, n: u64) -> Result<Self, QuantumError> {
        let lattice = DivisorLattice::new(n)?;
        let neg = lattice.negation(m)?;
        let inside = Self::subsystem(m, n)?;
        let excluded = Self::reduced(neg, n)?;
        let indices = (0..n)
            .filter(|r| !inside.indices.contains(r) && !excluded.indices.contains(r))
            .collect();
        Ok(Self {
            dim: n,
            indices,
            label: SupportLabel::DontKnow(m),
        })
    }

    /// Complement of the reduced negation support: the region whose
    /// frequency estimates the upper probability of `m`.
    pub fn upper_region(m: u64, n: u64) -> Result<Self, QuantumError> {
        let lattice = DivisorLattice::new(n)?;
        let neg = lattice.negation(m)?;
        let excluded = Self::reduced(neg, n)?;
        let indices = (0..n).filter(|r| !excluded.indices.contains(r)).collect();
        Ok(Self {
            dim: n,
            indices,
            label: SupportLabel::Upper(m),
        })
    }

    /// Ambient dimension.
    pub fn dim(&self) -> u64 {
        self.dim
    }

    /// The support set in increasing order.
    pub fn indices(&self) -> &BTreeSet<u64> {
        &self.indices
    }

    /// Number of supported indices (the rank of the projector).
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    /// Whether the projector is 0.
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Membership test.
    pub fn contains(&self, r: u64) -> bool {
        self.indices.contains(&r)
    }

    /// Construction tag.
    pub fn label(&self) -> SupportLabel {
        self.label
    }

    /// Dense 0/1 diagonal materialization, for cross-validation only.
    pub fn to_operator(&self) -> DenseOperator {
        let n = self.dim as usize;
        let mut op = DenseOperator {
            dim: n,
            entries: vec![Complex64::ZERO; n * n],
        };
        for &r in &self.indices {
            op.entries[r as usize * n + r as usize] = Complex64::ONE;
        }
        op
    }
}

/// Serialized form: exactly one of `diagonal` / `entries` must be present.
#[derive(Serialize, Deserialize)]
struct DensityFile {
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    diagonal: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    entries: Option<Vec<Vec<[f64; 2]>>>,
}

/// A validated density matrix: Hermitian, unit trace, positive
/// semidefinite (all within the module tolerances).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    /// Validate a full complex matrix.
    pub fn new(rows: Vec<Vec<Complex64>>) -> Result<Self, QuantumError> {
        let n = rows.len();
        if n == 0 {
            return Err(QuantumError::ZeroDimension);
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(QuantumError::NotSquare {
                    row: i,
                    found: row.len(),
                    expected: n,
                });
            }
            entries.extend_from_slice(row);
        }
        let rho = Self { dim: n, entries };
        rho.validate()?;
        Ok(rho)
    }

    /// Build a diagonal density from probabilities; entries must be
    /// nonnegative and sum to 1 within [`TRACE_TOL`].
    pub fn from_diagonal(probabilities: &[f64]) -> Result<Self, QuantumError> {
        let n = probabilities.len();
        if n == 0 {
            return Err(QuantumError::ZeroDimension);
        }
        for (index, &value) in probabilities.iter().enumerate() {
            if value < 0.0 {
                return Err(QuantumError::NegativeProbability { index, value });
            }
        }
        let trace: f64 = probabilities.iter().sum();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(QuantumError::TraceNotOne { trace });
        }
        let mut entries = vec![Complex64::ZERO; n * n];
        for (i, &p) in probabilities.iter().enumerate() {
            entries[i * n + i] = Complex64::new(p, 0.0);
        }
        Ok(Self { dim: n, entries })
    }

    /// The pure state `|v><v|`.
    pub fn pure(v: &StateVector) -> Self {
        let n = v.dim();
        let amps = v.amplitudes();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(amps[i] * amps[j].conj());
            }
        }
        Self { dim: n, entries }
    }

    /// The maximally mixed state `I / n`.
    pub fn maximally_mixed(n: usize) -> Result<Self, QuantumError> {
        if n == 0 {
            return Err(QuantumError::ZeroDimension);
        }
        Self::from_diagonal(&vec![1.0 / n as f64; n])
    }

    /// Seeded random full-rank state: `G G^dagger / Tr(G G^dagger)` with
    /// `G` an `n x n` matrix of independent standard complex Gaussians.
    ///
    /// Valid by construction (Hermitian, PSD, trace 1 up to rounding), so
    /// no eigen-decomposition is run here.
    pub fn random(n: usize, seed: u64) -> Result<Self, QuantumError> {
        if n == 0 {
            return Err(QuantumError::ZeroDimension);
        }
        let g = gaussian_matrix(n, seed);
        let mut entries = vec![Complex64::ZERO; n * n];
        for i in 0..n {
            for j in i..n {
                let (mut re, mut im) = (0.0f64, 0.0f64);
                let ri = &g[i * n..(i + 1) * n];
                let rj = &g[j * n..(j + 1) * n];
                for k in 0..n {
                    let a = ri[k];
                    let b = rj[k];
                    re += a.re * b.re + a.im * b.im;
                    im += a.im * b.re - a.re * b.im;
                }
                entries[i * n + j] = Complex64::new(re, im);
                entries[j * n + i] = Complex64::new(re, -im);
            }
        }
        let trace: f64 = (0..n).map(|i| entries[i * n + i].re).sum();
        for e in &mut entries {
            *e /= trace;
        }
        Ok(Self { dim: n, entries })
    }

    /// The diagonal that [`DensityMatrix::random`] would produce for the
    /// same seed, without forming off-diagonal entries.
    ///
    /// Row norms of `G` are accumulated in the same order as the full
    /// product, so the result is bit-identical to the diagonal of
    /// [`DensityMatrix::random`]; sweeps over functionals that only read
    /// the diagonal use this to avoid the `O(n^3)` product.
    pub fn random_diagonal(n: usize, seed: u64) -> Result<Vec<f64>, QuantumError> {
        if n == 0 {
            return Err(QuantumError::ZeroDimension);
        }
        let g = gaussian_matrix(n, seed);
        let mut diag = Vec::with_capacity(n);
        for i in 0..n {
            let mut re = 0.0f64;
            for k in 0..n {
                let a = g[i * n + k];
                re += a.re * a.re + a.im * a.im;
            }
            diag.push(re);
        }
        let trace: f64 = diag.iter().sum();
        for d in &mut diag {
            *d /= trace;
        }
        Ok(diag)
    }

    /// Dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry at `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    /// Real parts of the diagonal, in index order.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.entries[i * self.dim + i].re).collect()
    }

    /// Real part of the trace.
    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i].re).sum()
    }

    /// Largest entrywise deviation from the conjugate transpose.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let dev = (self.entries[i * n + j] - self.entries[j * n + i].conj()).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian-symmetrized matrix.
    ///
    /// The Hermitian `H = A + iB` embeds as the real symmetric
    /// `[[A, -B], [B, A]]` whose spectrum is that of `H` with doubled
    /// multiplicities, so the minimum is unchanged.
    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.dim;
        let mut big = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let h = (self.entries[i * n + j] + self.entries[j * n + i].conj()) * 0.5;
                big[(i, j)] = h.re;
                big[(i, n + j)] = -h.im;
                big[(n + i, j)] = h.im;
                big[(n + i, n + j)] = h.re;
            }
        }
        big.symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |acc, &x| acc.min(x))
    }

    /// Check all density-matrix invariants against the module tolerances.
    pub fn validate(&self) -> Result<(), QuantumError> {
        let herm = self.hermiticity_defect();
        if herm > HERM_TOL {
            return Err(QuantumError::NotHermitian { max_deviation: herm });
        }
        let trace = self.trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(QuantumError::TraceNotOne { trace });
        }
        let min = self.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(QuantumError::NotPsd { min_eigenvalue: min });
        }
        Ok(())
    }

    /// Whether the matrix has no off-diagonal entry other than exact zero.
    pub fn is_diagonal(&self) -> bool {
        let n = self.dim;
        (0..n).all(|i| {
            (0..n).all(|j| i == j || self.entries[i * n + j] == Complex64::ZERO)
        })
    }

    /// Parse the JSON file form; exactly one of `diagonal` / `entries`
    /// must be present, and the result is fully validated.
    pub fn from_json(text: &str) -> Result<Self, QuantumError> {
        let file: DensityFile =
            serde_json::from_str(text).map_err(|e| QuantumError::Format(e.to_string()))?;
        match (file.diagonal, file.entries) {
            (Some(diag), None) => {
                if diag.len() != file.n {
                    return Err(QuantumError::DimensionMismatch {
                        expected: file.n,
                        found: diag.len(),
                    });
                }
                Self::from_diagonal(&diag)
            }
            (None, Some(rows)) => {
                if rows.len() != file.n {
                    return Err(QuantumError::DimensionMismatch {
                        expected: file.n,
                        found: rows.len(),
                    });
                }
                let complex_rows = rows
                    .into_iter()
                    .map(|row| {
                        row.into_iter()
                            .map(|[re, im]| Complex64::new(re, im))
                            .collect()
                    })
                    .collect();
                Self::new(complex_rows)
            }
            _ => Err(QuantumError::Format(
                "exactly one of \"diagonal\" or \"entries\" must be present".into(),
            )),
        }
    }

    /// Serialize to the JSON file form, using the `diagonal` shape when the
    /// matrix is exactly diagonal.
    pub fn to_json(&self) -> String {
        let n = self.dim;
        let file = if self.is_diagonal() {
            DensityFile {
                n,
                diagonal: Some(self.diagonal()),
                entries: None,
            }
        } else {
            DensityFile {
                n,
                diagonal: None,
                entries: Some(
                    (0..n)
                        .map(|i| {
                            (0..n)
                                .map(|j| {
                                    let e = self.entries[i * n + j];
                                    [e.re, e.im]
                                })
                                .collect()
                        })
                        .collect(),
                ),
            }
        };
        serde_json::to_string_pretty(&file).expect("plain data serializes")
    }
}

/// Row-major `n x n` matrix of standard complex Gaussians from a seeded
/// stream. Entries are generated row by row, real part before imaginary.
fn gaussian_matrix(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    (0..n * n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect()
}

/// Sum of diagonal entries of `rho` over the support: the trace of
/// `rho * P`. Indices are visited in increasing order, so the result is
/// deterministic. The raw (unclamped) value is returned.
pub fn trace_against(rho: &DensityMatrix, support: &ProjectorSupport) -> Result<f64, QuantumError> {
    if support.dim() as usize != rho.dim() {
        return Err(QuantumError::DimensionMismatch {
            expected: rho.dim(),
            found: support.dim() as usize,
        });
    }
    let n = rho.dim();
    Ok(support
        .indices()
        .iter()
        .map(|&r| rho.entries[r as usize * n + r as usize].re)
        .sum())
}
