//! Dense product-basis algebra for chains of spin-1/2 sites.
//!
//! Basis index bits: site 1 is the most significant bit and a 0 bit is
//! `|↑⟩` (σᶻ eigenvalue +1). Site indices are 1-based everywhere.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{DtcError, Result};
use crate::spinmodel::{Axis, ChainSpec, DisorderRealization, InitialStateSpec};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

const HERMITICITY_TOL: f64 = 1e-12;

#[inline]
fn bit_shift(n_sites: usize, site: usize) -> usize {
    n_sites - site
}

fn check_site(n_sites: usize, site: usize) -> Result<()> {
    if site == 0 || site > n_sites {
        Err(DtcError::SiteOutOfRange { site, n_sites })
    } else {
        Ok(())
    }
}

/// 2x2 Pauli matrix in the `(↑, ↓)` basis.
pub fn pauli(axis: Axis) -> Matrix2<C64> {
    match axis {
        Axis::X => Matrix2::new(ZERO, ONE, ONE, ZERO),
        Axis::Y => Matrix2::new(ZERO, -I, I, ZERO),
        Axis::Z => Matrix2::new(ONE, ZERO, ZERO, -ONE),
    }
}

/// `exp(i·angle·σ^axis) = cos(angle)·1 + i·sin(angle)·σ^axis`.
pub fn site_rotation(axis: Axis, angle: f64) -> Matrix2<C64> {
    let (s, c) = angle.sin_cos();
    Matrix2::identity() * C64::new(c, 0.0) + pauli(axis) * C64::new(0.0, s)
}

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
    n_sites: usize,
}

impl StateVector {
    pub fn from_amplitudes(n_sites: usize, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != 1 << n_sites {
            return Err(DtcError::Mismatch(format!(
                "{} amplitudes for {n_sites} sites",
                amplitudes.len()
            )));
        }
        Ok(StateVector {
            amplitudes,
            n_sites,
        })
    }

    pub fn basis(n_sites: usize, index: usize) -> Self {
        let mut amplitudes = DVector::from_element(1 << n_sites, ZERO);
        amplitudes[index] = ONE;
        StateVector {
            amplitudes,
            n_sites,
        }
    }

    /// Identical single-site state `cos θ|↑⟩ + sin θ e^{iχ}|↓⟩` on every site.
    pub fn product(n_sites: usize, up: C64, down: C64) -> Self {
        let dim = 1 << n_sites;
        let amplitudes = DVector::from_fn(dim, |i, _| {
            let downs = i.count_ones() as i32;
            up.powi(n_sites as i32 - downs) * down.powi(downs)
        });
        StateVector {
            amplitudes,
            n_sites,
        }
    }

    pub fn product_bloch(n_sites: usize, theta: f64, chi: f64) -> Self {
        let up = C64::new(theta.cos(), 0.0);
        let down = C64::from_polar(theta.sin(), chi);
        Self::product(n_sites, up, down)
    }

    pub fn from_initial(spec: &InitialStateSpec, n_sites: usize) -> Result<Self> {
        spec.validate(n_sites)?;
        Ok(match spec {
            InitialStateSpec::ProductZ { spins } => Self::basis(n_sites, spins.basis_index()),
            InitialStateSpec::ProductBloch { theta, chi } => {
                Self::product_bloch(n_sites, *theta, *chi)
            }
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amplitudes /= C64::new(n, 0.0);
        }
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn apply(&mut self, op: &UnitaryOperator) {
        self.amplitudes = &op.matrix * &self.amplitudes;
    }

    /// Applies a 2x2 gate on one site without building the full operator.
    pub fn apply_site_gate(&mut self, site: usize, gate: &Matrix2<C64>) -> Result<()> {
        check_site(self.n_sites, site)?;
        let mask = 1usize << bit_shift(self.n_sites, site);
        let a = &mut self.amplitudes;
        for i in 0..a.len() {
            if i & mask == 0 {
                let (u, d) = (a[i], a[i | mask]);
                a[i] = gate[(0, 0)] * u + gate[(0, 1)] * d;
                a[i | mask] = gate[(1, 0)] * u + gate[(1, 1)] * d;
            }
        }
        Ok(())
    }
}

/// Left-multiplies `m` by a 2x2 gate acting on one site (every column is
/// treated as a state vector).
pub fn apply_site_gate_left(m: &mut CMatrix, n_sites: usize, site: usize, gate: &Matrix2<C64>) {
    let mask = 1usize << bit_shift(n_sites, site);
    for mut col in m.column_iter_mut() {
        for i in 0..col.len() {
            if i & mask == 0 {
                let (u, d) = (col[i], col[i | mask]);
                col[i] = gate[(0, 0)] * u + gate[(0, 1)] * d;
                col[i | mask] = gate[(1, 0)] * u + gate[(1, 1)] * d;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

/// Eigendecomposition `H = V·diag(λ)·V†`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

#[derive(Debug, Clone)]
pub struct HermitianOperator {
    matrix: CMatrix,
    n_sites: usize,
    spectrum: OnceLock<Spectrum>,
}

impl HermitianOperator {
    pub fn new(n_sites: usize, matrix: CMatrix) -> Result<Self> {
        let dim = 1 << n_sites;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(DtcError::Mismatch(format!(
                "{}x{} matrix for {n_sites} sites",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let scale = matrix.iter().fold(1.0f64, |m, z| m.max(z.norm()));
        let defect = hermiticity_defect(&matrix);
        if defect >= HERMITICITY_TOL * scale {
            return Err(DtcError::Numerical(format!(
                "operator is not Hermitian (max |M - M†| = {defect:e})"
            )));
        }
        Ok(HermitianOperator {
            matrix,
            n_sites,
            spectrum: OnceLock::new(),
        })
    }

    pub fn zeros(n_sites: usize) -> Self {
        let dim = 1 << n_sites;
        HermitianOperator {
            matrix: CMatrix::zeros(dim, dim),
            n_sites,
            spectrum: OnceLock::new(),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Eigendecomposition, computed on first use and cached on the operator.
    pub fn spectrum(&self) -> Result<&Spectrum> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let dim = self.matrix.nrows();
        let eig = SymmetricEigen::try_new(self.matrix.clone(), f64::EPSILON, 1_000_000)
            .ok_or_else(|| DtcError::EigenFailure {
                dim,
                diagnostics: format!(
                    "no convergence; max |entry| = {:e}",
                    self.matrix.iter().fold(0.0f64, |m, z| m.max(z.norm()))
                ),
            })?;
        if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(DtcError::EigenFailure {
                dim,
                diagnostics: "non-finite eigenvalue".into(),
            });
        }
        let spectrum = Spectrum {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        };
        Ok(self.spectrum.get_or_init(|| spectrum))
    }

    /// Commutator `[self, other]` as a plain matrix.
    pub fn commutator(&self, other: &HermitianOperator) -> CMatrix {
        &self.matrix * &other.matrix - &other.matrix * &self.matrix
    }
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: CMatrix,
    n_sites: usize,
}

impl UnitaryOperator {
    pub fn identity(n_sites: usize) -> Self {
        let dim = 1 << n_sites;
        UnitaryOperator {
            matrix: CMatrix::identity(dim, dim),
            n_sites,
        }
    }

    /// Wraps a matrix the caller knows to be unitary.
    pub fn from_matrix_unchecked(n_sites: usize, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), 1 << n_sites);
        UnitaryOperator { matrix, n_sites }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Operator product `self · other` (`other` acts first).
    pub fn then_after(&self, other: &UnitaryOperator) -> UnitaryOperator {
        UnitaryOperator {
            matrix: &self.matrix * &other.matrix,
            n_sites: self.n_sites,
        }
    }

    pub fn adjoint(&self) -> UnitaryOperator {
        UnitaryOperator {
            matrix: self.matrix.adjoint(),
            n_sites: self.n_sites,
        }
    }

    /// `self^k` by repeated squaring.
    pub fn pow(&self, mut k: usize) -> UnitaryOperator {
        let mut result = UnitaryOperator::identity(self.n_sites);
        let mut base = self.matrix.clone();
        let mut first = true;
        while k > 0 {
            if k & 1 == 1 {
                if first {
                    result.matrix = base.clone();
                    first = false;
                } else {
                    result.matrix = &result.matrix * &base;
                }
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Pulls a nearly unitary matrix back onto the unitary group with
    /// Newton-Schulz polar iterations `U ← U(3 - U†U)/2`.
    pub fn reunitarized(mut self) -> Self {
        let dim = self.matrix.nrows();
        for _ in 0..4 {
            if self.unitarity_defect() < 1e-15 {
                break;
            }
            let gram = self.matrix.adjoint() * &self.matrix;
            let correction =
                (CMatrix::identity(dim, dim) * C64::new(3.0, 0.0) - gram) * C64::new(0.5, 0.0);
            self.matrix = &self.matrix * correction;
        }
        self
    }

    /// `max |U†U - 1|`.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.matrix.adjoint() * &self.matrix;
        let dim = prod.nrows();
        let mut worst = 0.0f64;
        for j in 0..dim {
            for i in 0..dim {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((prod[(i, j)] - target).norm());
            }
        }
        worst
    }
}

/// Max-norm distance `min_φ max|A - e^{iφ}B|`, with φ fixed by `Tr(B†A)`.
pub fn distance_up_to_phase(a: &CMatrix, b: &CMatrix) -> f64 {
    let overlap: C64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    a.iter()
        .zip(b.iter())
        .fold(0.0f64, |m, (x, y)| m.max((x - phase * y).norm()))
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    let gram = m.adjoint() * m;
    let eig = SymmetricEigen::new(gram);
    eig.eigenvalues
        .iter()
        .fold(0.0f64, |a, &b| a.max(b))
        .max(0.0)
        .sqrt()
}

// ---------------------------------------------------------------------------
// Pauli strings and Hamiltonians
// ---------------------------------------------------------------------------

/// Adds `coeff · ⊗_s σ_s^{α_s}` to `m` in O(2^N).
pub fn add_pauli_term(
    m: &mut CMatrix,
    n_sites: usize,
    coeff: f64,
    factors: &[(usize, Axis)],
) -> Result<()> {
    let mut flip = 0usize;
    for &(site, axis) in factors {
        check_site(n_sites, site)?;
        if axis != Axis::Z {
            flip ^= 1 << bit_shift(n_sites, site);
        }
    }
    for col in 0..(1usize << n_sites) {
        let mut phase = C64::new(coeff, 0.0);
        // factors on the same site compose right to left
        let mut bits = col;
        for &(site, axis) in factors.iter().rev() {
            let mask = 1 << bit_shift(n_sites, site);
            let down = bits & mask != 0;
            match axis {
                Axis::X => bits ^= mask,
                Axis::Y => {
                    phase *= if down { -I } else { I };
                    bits ^= mask;
                }
                Axis::Z => {
                    if down {
                        phase = -phase;
                    }
                }
            }
        }
        debug_assert_eq!(bits, col ^ flip);
        m[(bits, col)] += phase;
    }
    Ok(())
}

/// Tensor product of the given Paulis with identity on all other sites.
pub fn pauli_string(n_sites: usize, factors: &[(usize, Axis)]) -> Result<HermitianOperator> {
    let dim = 1 << n_sites;
    let mut m = CMatrix::zeros(dim, dim);
    add_pauli_term(&mut m, n_sites, 1.0, factors)?;
    HermitianOperator::new(n_sites, m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Ising,
    Heisenberg,
}

/// Static Hamiltonian of one realization.
///
/// Ising: `Σ J_b σᶻσᶻ + Σ h_i·σ_i`; Heisenberg: `Σ J_b (σˣσˣ+σʸσʸ+σᶻσᶻ) + Σ h_i·σ_i`.
pub fn build_hamiltonian(
    model: Model,
    spec: &ChainSpec,
    real: &DisorderRealization,
) -> Result<HermitianOperator> {
    real.check_matches(spec)?;
    let n = spec.n_sites;
    let dim = spec.dim();
    let mut m = CMatrix::zeros(dim, dim);
    for (&(a, b), &j) in spec.bonds().iter().zip(&real.couplings) {
        if j == 0.0 {
            continue;
        }
        let axes: &[Axis] = match model {
            Model::Ising => &[Axis::Z],
            Model::Heisenberg => &Axis::ALL,
        };
        for &axis in axes {
            add_pauli_term(&mut m, n, j, &[(a, axis), (b, axis)])?;
        }
    }
    for (i, h) in real.fields.iter().enumerate() {
        for axis in Axis::ALL {
            let coeff = h[axis.index()];
            if coeff != 0.0 {
                add_pauli_term(&mut m, n, coeff, &[(i + 1, axis)])?;
            }
        }
    }
    HermitianOperator::new(n, m)
}

/// `exp(-i·H·duration)` through the (cached) eigendecomposition of `h`.
pub fn propagator(h: &HermitianOperator, duration: f64) -> Result<UnitaryOperator> {
    let spec = h.spectrum()?;
    let mut scaled = spec.vectors.clone();
    for (k, &lambda) in spec.values.iter().enumerate() {
        let phase = C64::from_polar(1.0, -lambda * duration);
        for z in scaled.column_mut(k).iter_mut() {
            *z *= phase;
        }
    }
    let matrix = scaled * spec.vectors.adjoint();
    if matrix
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(DtcError::Numerical("non-finite propagator entry".into()));
    }
    Ok(UnitaryOperator {
        matrix,
        n_sites: h.n_sites,
    })
}

// ---------------------------------------------------------------------------
// Observables
// ---------------------------------------------------------------------------

/// `(⟨σˣ⟩, ⟨σʸ⟩, ⟨σᶻ⟩)` of one site by bit-indexed accumulation.
pub fn spin_vector(state: &StateVector, site: usize) -> Result<[f64; 3]> {
    check_site(state.n_sites, site)?;
    Ok(spin_vector_of(
        state.amplitudes.as_slice(),
        state.n_sites,
        site,
    ))
}

pub(crate) fn spin_vector_of(amps: &[C64], n_sites: usize, site: usize) -> [f64; 3] {
    let mask = 1usize << bit_shift(n_sites, site);
    let (mut off, mut sz) = (ZERO, 0.0);
    for i in 0..amps.len() {
        if i & mask == 0 {
            let (u, d) = (amps[i], amps[i | mask]);
            off += u.conj() * d;
            sz += u.norm_sqr() - d.norm_sqr();
        }
    }
    [2.0 * off.re, 2.0 * off.im, sz]
}

pub fn expectation(state: &StateVector, site: usize, axis: Axis) -> Result<f64> {
    Ok(spin_vector(state, site)?[axis.index()])
}

/// Single-site density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSpin {
    pub rho: Matrix2<C64>,
}

impl ReducedSpin {
    pub fn spin_vector(&self) -> [f64; 3] {
        let off = self.rho[(0, 1)];
        [
            2.0 * off.re,
            -2.0 * off.im,
            (self.rho[(0, 0)] - self.rho[(1, 1)]).re,
        ]
    }

    pub fn vector_length(&self) -> f64 {
        let [x, y, z] = self.spin_vector();
        (x * x + y * y + z * z).sqrt()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        (self.rho * self.rho).trace().re
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }
}

/// Partial trace over every site except `site`.
pub fn reduce_to_site(state: &StateVector, site: usize) -> Result<ReducedSpin> {
    check_site(state.n_sites, site)?;
    let mask = 1usize << bit_shift(state.n_sites, site);
    let amps = &state.amplitudes;
    let mut rho = Matrix2::<C64>::zeros();
    for i in 0..amps.len() {
        if i & mask == 0 {
            let (u, d) = (amps[i], amps[i | mask]);
            rho[(0, 0)] += u * u.conj();
            rho[(0, 1)] += u * d.conj();
            rho[(1, 0)] += d * u.conj();
            rho[(1, 1)] += d * d.conj();
        }
    }
    Ok(ReducedSpin { rho })
}
