//! Truncated qubit ⊗ Fock space.
//!
//! Basis ordering is photon-major, qubit-minor: `|g,n⟩ ↦ 2n`, `|e,n⟩ ↦ 2n + 1`.
//! With this layout a red-sideband rung `{|e,n⟩, |g,n+1⟩}` occupies the
//! adjacent flat indices `2n + 1, 2n + 2`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{self, lit, tol, Real};

/// Qubit charge state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Qubit {
    Ground,
    Excited,
}

impl Qubit {
    #[inline]
    pub fn bit(self) -> usize {
        match self {
            Qubit::Ground => 0,
            Qubit::Excited => 1,
        }
    }

    pub fn label(self) -> char {
        match self {
            Qubit::Ground => 'g',
            Qubit::Excited => 'e',
        }
    }
}

/// Hilbert-space dimension for a photon truncation `n_max`.
#[inline]
pub fn dimension(n_max: usize) -> usize {
    2 * (n_max + 1)
}

/// Flat offset of `|q,n⟩` without range checks.
#[inline]
pub(crate) fn idx(qubit: Qubit, photons: usize) -> usize {
    2 * photons + qubit.bit()
}

/// Label `|q,n⟩` together with the truncation it lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    pub qubit: Qubit,
    pub photons: usize,
    pub truncation: usize,
}

impl BasisIndex {
    pub fn new(qubit: Qubit, photons: usize, truncation: usize) -> Self {
        Self { qubit, photons, truncation }
    }

    pub fn flat_index(&self) -> Result<usize> {
        if self.photons > self.truncation {
            return Err(Error::IndexOutOfRange { photons: self.photons, truncation: self.truncation });
        }
        Ok(idx(self.qubit, self.photons))
    }

    pub fn from_flat(index: usize, truncation: usize) -> Result<Self> {
        let dim = dimension(truncation);
        if index >= dim {
            return Err(Error::FlatIndexOutOfRange { index, dim });
        }
        let qubit = if index.is_multiple_of(2) { Qubit::Ground } else { Qubit::Excited };
        Ok(Self { qubit, photons: index / 2, truncation })
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{}>", self.qubit.label(), self.photons)
    }
}

/// Flat index of `|q,n⟩` in a space truncated at `n_max`.
pub fn flat_index(b: BasisIndex) -> Result<usize> {
    b.flat_index()
}

/// State vector over the qubit ⊗ Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket<T: Real> {
    amplitudes: DVector<Complex<T>>,
    n_max: usize,
}

impl<T: Real> Ket<T> {
    pub fn zeros(n_max: usize) -> Self {
        Self { amplitudes: DVector::zeros(dimension(n_max)), n_max }
    }

    /// The basis vector `|q,n⟩`.
    pub fn basis(qubit: Qubit, photons: usize, n_max: usize) -> Result<Self> {
        let i = BasisIndex::new(qubit, photons, n_max).flat_index()?;
        let mut k = Self::zeros(n_max);
        k.amplitudes[i] = Complex::one();
        Ok(k)
    }

    /// `|g,0⟩`, the state every protocol starts from.
    pub fn vacuum(n_max: usize) -> Self {
        let mut k = Self::zeros(n_max);
        k.amplitudes[0] = Complex::one();
        k
    }

    pub fn from_amplitudes(amplitudes: DVector<Complex<T>>, n_max: usize) -> Result<Self> {
        let expected = dimension(n_max);
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: amplitudes.len() });
        }
        if !amplitudes.iter().all(|z| scalar::is_finite(*z)) {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        Ok(Self { amplitudes, n_max })
    }

    /// `|g⟩ ⊗ Σ c_n |n⟩`; the coefficients are taken as given, not normalized.
    pub fn cavity(coefficients: &[Complex<T>], n_max: usize) -> Result<Self> {
        if coefficients.len() > n_max + 1 {
            return Err(Error::IndexOutOfRange { photons: coefficients.len() - 1, truncation: n_max });
        }
        let mut k = Self::zeros(n_max);
        for (n, c) in coefficients.iter().enumerate() {
            k.amplitudes[idx(Qubit::Ground, n)] = *c;
        }
        if !k.amplitudes.iter().all(|z| scalar::is_finite(*z)) {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        Ok(k)
    }

    #[inline]
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex<T>> {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut DVector<Complex<T>> {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<Complex<T>> {
        self.amplitudes
    }

    pub fn amplitude(&self, qubit: Qubit, photons: usize) -> Result<Complex<T>> {
        let i = BasisIndex::new(qubit, photons, self.n_max).flat_index()?;
        Ok(self.amplitudes[i])
    }

    pub fn population(&self, qubit: Qubit, photons: usize) -> Result<T> {
        self.amplitude(qubit, photons).map(|z| z.norm_sqr())
    }

    /// Total probability of the qubit being in `qubit`, summed over photons.
    pub fn qubit_population(&self, qubit: Qubit) -> T {
        (0..=self.n_max).fold(T::zero(), |acc, n| acc + self.amplitudes[idx(qubit, n)].norm_sqr())
    }

    pub fn norm(&self) -> T {
        self.amplitudes.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n <= T::zero() {
            return Err(Error::InvalidParameter("cannot normalize the zero vector".into()));
        }
        let inv = T::one() / n;
        for z in self.amplitudes.iter_mut() {
            *z = z.scale(inv);
        }
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b))
    }

    /// Highest photon number carrying nonzero amplitude (0 for the zero vector).
    pub fn highest_populated_level(&self) -> usize {
        (0..self.dim())
            .rev()
            .find(|&i| !self.amplitudes[i].is_zero())
            .map(|i| i / 2)
            .unwrap_or(0)
    }

    pub fn cast<U: Real>(&self) -> Ket<U> {
        let amplitudes = self
            .amplitudes
            .map(|z| Complex::new(lit::<U>(scalar::to_f64(z.re)), lit::<U>(scalar::to_f64(z.im))));
        Ket { amplitudes, n_max: self.n_max }
    }
}

/// `|⟨x|y⟩|²`.
pub fn fidelity<T: Real>(x: &Ket<T>, y: &Ket<T>) -> Result<T> {
    Ok(x.inner(y)?.norm_sqr())
}

/// Dense complex operator on the truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<T: Real> {
    matrix: DMatrix<Complex<T>>,
    n_max: usize,
}

impl<T: Real> Operator<T> {
    pub fn zeros(n_max: usize) -> Self {
        let d = dimension(n_max);
        Self { matrix: DMatrix::zeros(d, d), n_max }
    }

    pub fn identity(n_max: usize) -> Self {
        let d = dimension(n_max);
        Self { matrix: DMatrix::identity(d, d), n_max }
    }

    pub fn from_matrix(matrix: DMatrix<Complex<T>>, n_max: usize) -> Result<Self> {
        let d = dimension(n_max);
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: matrix.nrows().max(matrix.ncols()) });
        }
        if !matrix.iter().all(|z| scalar::is_finite(*z)) {
            return Err(Error::InvalidParameter("non-finite operator entry".into()));
        }
        Ok(Self { matrix, n_max })
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<Complex<T>>, n_max: usize) -> Self {
        Self { matrix, n_max }
    }

    #[inline]
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex<T>> {
        self.matrix
    }

    pub fn entry(&self, row: BasisIndex, col: BasisIndex) -> Result<Complex<T>> {
        Ok(self.matrix[(row.flat_index()?, col.flat_index()?)])
    }

    pub fn dagger(&self) -> Self {
        Self { matrix: self.matrix.adjoint(), n_max: self.n_max }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self { matrix: self.matrix.map(|z| z * s), n_max: self.n_max }
    }

    pub fn apply(&self, ket: &Ket<T>) -> Result<Ket<T>> {
        if ket.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: ket.dim() });
        }
        Ok(Ket { amplitudes: &self.matrix * &ket.amplitudes, n_max: self.n_max })
    }

    /// Largest entrywise modulus.
    pub fn max_norm(&self) -> T {
        self.matrix.iter().fold(T::zero(), |m, z| m.max(scalar::modulus(*z)))
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .fold(T::zero(), |m, (a, b)| m.max(scalar::modulus(*a - *b)))
    }

    pub fn hermiticity_deviation(&self) -> T {
        let n = self.dim();
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                worst = worst.max(scalar::modulus(self.matrix[(i, j)] - self.matrix[(j, i)].conj()));
            }
        }
        worst
    }

    /// `‖A†A − I‖` in the max norm.
    pub fn unitarity_deviation(&self) -> T {
        let prod = self.matrix.adjoint() * &self.matrix;
        let n = self.dim();
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { Complex::one() } else { Complex::zero() };
                worst = worst.max(scalar::modulus(prod[(i, j)] - target));
            }
        }
        worst
    }

    /// Hermitian within 1e-12, relative to the operator's own scale.
    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_deviation() <= tol::<T>(1e-12) * self.max_norm().max(T::one())
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_deviation() <= tol::<T>(1e-12)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self { matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix, n_max: self.n_max }
    }

    /// Fails with [`Error::HermiticityViolation`] unless Hermitian.
    pub fn ensure_hermitian(&self) -> Result<()> {
        if self.is_hermitian() {
            Ok(())
        } else {
            Err(Error::HermiticityViolation { deviation: scalar::to_f64(self.hermiticity_deviation()) })
        }
    }

    /// Largest |eigenvalue| of a Hermitian operator.
    pub fn spectral_radius_hermitian(&self) -> Result<T> {
        self.ensure_hermitian()?;
        let eig = SymmetricEigen::new(self.matrix.clone());
        Ok(eig.eigenvalues.iter().fold(T::zero(), |m, l| m.max(scalar::abs(*l))))
    }
}

impl<T: Real> Mul for &Operator<T> {
    type Output = Operator<T>;
    fn mul(self, rhs: Self) -> Operator<T> {
        Operator { matrix: &self.matrix * &rhs.matrix, n_max: self.n_max }
    }
}

impl<T: Real> Add for &Operator<T> {
    type Output = Operator<T>;
    fn add(self, rhs: Self) -> Operator<T> {
        Operator { matrix: &self.matrix + &rhs.matrix, n_max: self.n_max }
    }
}

impl<T: Real> Sub for &Operator<T> {
    type Output = Operator<T>;
    fn sub(self, rhs: Self) -> Operator<T> {
        Operator { matrix: &self.matrix - &rhs.matrix, n_max: self.n_max }
    }
}

fn require_truncation(n_max: usize) -> Result<()> {
    if n_max == 0 {
        return Err(Error::TruncationTooSmall { n_max, required: 1 });
    }
    Ok(())
}

/// Photon annihilation and creation operators, identity on the qubit.
pub fn ladder_operators<T: Real>(n_max: usize) -> Result<(Operator<T>, Operator<T>)> {
    require_truncation(n_max)?;
    let mut a = Operator::zeros(n_max);
    for n in 1..=n_max {
        let amp = Complex::from(lit::<T>(n as f64).sqrt());
        for q in [Qubit::Ground, Qubit::Excited] {
            a.matrix[(idx(q, n - 1), idx(q, n))] = amp;
        }
    }
    let a_dagger = a.dagger();
    Ok((a, a_dagger))
}

/// `a†a`.
pub fn number_operator<T: Real>(n_max: usize) -> Operator<T> {
    let mut op = Operator::zeros(n_max);
    for n in 0..=n_max {
        let v = Complex::from(lit::<T>(n as f64));
        op.matrix[(idx(Qubit::Ground, n), idx(Qubit::Ground, n))] = v;
        op.matrix[(idx(Qubit::Excited, n), idx(Qubit::Excited, n))] = v;
    }
    op
}

/// `σ₊ = |e⟩⟨g|` on every photon sector.
pub fn sigma_plus<T: Real>(n_max: usize) -> Operator<T> {
    let mut op = Operator::zeros(n_max);
    for n in 0..=n_max {
        op.matrix[(idx(Qubit::Excited, n), idx(Qubit::Ground, n))] = Complex::one();
    }
    op
}

/// `σ₋ = |g⟩⟨e|`.
pub fn sigma_minus<T: Real>(n_max: usize) -> Operator<T> {
    sigma_plus(n_max).dagger()
}

/// `σ_x = σ₊ + σ₋`.
pub fn sigma_x<T: Real>(n_max: usize) -> Operator<T> {
    &sigma_plus(n_max) + &sigma_minus(n_max)
}

/// `σ_z = |g⟩⟨g| − |e⟩⟨e|` (ground state is spin-up).
pub fn sigma_z<T: Real>(n_max: usize) -> Operator<T> {
    let mut op = Operator::zeros(n_max);
    for n in 0..=n_max {
        op.matrix[(idx(Qubit::Ground, n), idx(Qubit::Ground, n))] = Complex::one();
        op.matrix[(idx(Qubit::Excited, n), idx(Qubit::Excited, n))] = -Complex::<T>::one();
    }
    op
}

/// `|e⟩⟨e|`.
pub fn excited_projector<T: Real>(n_max: usize) -> Operator<T> {
    let mut op = Operator::zeros(n_max);
    for n in 0..=n_max {
        op.matrix[(idx(Qubit::Excited, n), idx(Qubit::Excited, n))] = Complex::one();
    }
    op
}

/// Eigendecomposition of a Hermitian generator, reusable for many times.
#[derive(Debug, Clone)]
pub struct SpectralPropagator<T: Real> {
    eigenvalues: DVector<T>,
    eigenvectors: DMatrix<Complex<T>>,
    n_max: usize,
}

impl<T: Real> SpectralPropagator<T> {
    pub fn new(h: &Operator<T>) -> Result<Self> {
        h.ensure_hermitian()?;
        let eig = SymmetricEigen::new(h.matrix.clone());
        Ok(Self { eigenvalues: eig.eigenvalues, eigenvectors: eig.eigenvectors, n_max: h.n_max })
    }

    pub fn eigenvalues(&self) -> &DVector<T> {
        &self.eigenvalues
    }

    /// `exp(−i H t)`.
    pub fn at(&self, t: T) -> Operator<T> {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, lambda) in self.eigenvalues.iter().enumerate() {
            let phase = scalar::cis(-(*lambda * t));
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= phase);
        }
        Operator { matrix: scaled * v.adjoint(), n_max: self.n_max }
    }
}

/// `exp(−i H t)` for a Hermitian `H` given in angular-frequency units
/// (energy / ħ), by eigendecomposition.
pub fn expm_hermitian<T: Real>(h: &Operator<T>, t: T) -> Result<Operator<T>> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter("non-finite evolution time".into()));
    }
    Ok(SpectralPropagator::new(h)?.at(t))
}
