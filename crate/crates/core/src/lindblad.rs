//! Open-system evolution of the qubit–cavity density matrix under
//! zero-temperature amplitude damping and qubit dephasing.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;

use crate::compiler::PulseSequence;
use crate::dynamics::rwa_hamiltonian;
use crate::error::{Error, Result};
use crate::hilbert::{self, idx, Ket, Operator, Qubit};
use crate::physics::{photon_lifetime, CavityParams, DeviceParams};
use crate::scalar::{self, abs, c, lit, tol, Real};

/// Fraction of the fastest timescale allowed per integration step.
const STEP_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    matrix: DMatrix<Complex<T>>,
    n_max: usize,
}

impl<T: Real> DensityMatrix<T> {
    /// Requires Hermiticity within `1e-10`, unit trace within `1e-8`, and no
    /// eigenvalue below `−1e-8`.
    pub fn new(matrix: DMatrix<Complex<T>>, n_max: usize) -> Result<Self> {
        let dim = hilbert::dimension(n_max);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: matrix.nrows().max(matrix.ncols()) });
        }
        let rho = Self { matrix, n_max };
        let deviation = rho.hermiticity_deviation();
        if deviation > tol(1e-10) {
            return Err(Error::HermiticityViolation { deviation: scalar::to_f64(deviation) });
        }
        let tr = rho.trace();
        if abs(tr - T::one()) > tol(1e-8) {
            return Err(Error::InvalidParameter(format!("density matrix trace {}", scalar::to_f64(tr))));
        }
        let min = rho.min_eigenvalue();
        if min < -tol::<T>(1e-8) {
            return Err(Error::InvalidParameter(format!("density matrix eigenvalue {}", scalar::to_f64(min))));
        }
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ|` for a normalized ket.
    pub fn pure(ket: &Ket<T>) -> Result<Self> {
        let v = ket.amplitudes();
        Self::new(v * v.adjoint(), ket.n_max())
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn trace(&self) -> T {
        self.matrix.diagonal().iter().fold(T::zero(), |acc, z| acc + z.re)
    }

    pub fn population(&self, qubit: Qubit, photons: usize) -> Result<T> {
        if photons > self.n_max {
            return Err(Error::IndexOutOfRange { photons, truncation: self.n_max });
        }
        let i = idx(qubit, photons);
        Ok(self.matrix[(i, i)].re)
    }

    /// Photon-number distribution, summed over the qubit.
    pub fn photon_population(&self, photons: usize) -> Result<T> {
        Ok(self.population(Qubit::Ground, photons)? + self.population(Qubit::Excited, photons)?)
    }

    pub fn hermiticity_deviation(&self) -> T {
        let d = &self.matrix - self.matrix.adjoint();
        d.iter().fold(T::zero(), |acc, z| acc.max(scalar::modulus(*z)))
    }

    pub fn min_eigenvalue(&self) -> T {
        let h = (&self.matrix + self.matrix.adjoint()).map(|z| z.unscale(lit(2.0)));
        SymmetricEigen::new(h).eigenvalues.iter().fold(T::max_value().unwrap_or(T::one()), |acc, x| acc.min(*x))
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation_fidelity(&self, ket: &Ket<T>) -> Result<T> {
        if ket.n_max() != self.n_max {
            return Err(Error::DimensionMismatch { expected: self.n_max, found: ket.n_max() });
        }
        let v = ket.amplitudes();
        Ok((v.adjoint() * &self.matrix * v)[(0, 0)].re)
    }

    fn symmetrize(&mut self) {
        let half = lit::<T>(0.5);
        self.matrix = (&self.matrix + self.matrix.adjoint()).map(|z| z.scale(half));
    }
}

/// Decay rates (1/s) of the three collapse channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayChannels<T: Real> {
    /// Cavity decay `1/τ_p`, collapse operator `√κ a`.
    pub kappa: T,
    /// Qubit relaxation `1/T₁`, collapse operator `√γ₁ σ₋`.
    pub gamma1: T,
    /// Pure dephasing, collapse operator `√(γ_φ/2) σ_z`.
    pub gamma_phi: T,
}

impl<T: Real> DecayChannels<T> {
    pub fn new(kappa: T, gamma1: T, gamma_phi: T) -> Result<Self> {
        for (name, x) in [("kappa", kappa), ("gamma1", gamma1), ("gamma_phi", gamma_phi)] {
            if !x.is_finite() || x < T::zero() {
                return Err(Error::InvalidParameter(format!("{name} must be nonnegative, got {}", scalar::to_f64(x))));
            }
        }
        Ok(Self { kappa, gamma1, gamma_phi })
    }

    pub fn none() -> Self {
        Self { kappa: T::zero(), gamma1: T::zero(), gamma_phi: T::zero() }
    }

    /// Rates from lifetimes; `γ_φ = max(1/T₂ − 1/(2T₁), 0)`.
    pub fn from_times(tau_p: T, t1: T, t2: T) -> Result<Self> {
        for (name, x) in [("tau_p", tau_p), ("T1", t1), ("T2", t2)] {
            if !(x > T::zero()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive")));
            }
        }
        let two = lit::<T>(2.0);
        let gamma_phi = (T::one() / t2 - T::one() / (two * t1)).max(T::zero());
        Self::new(T::one() / tau_p, T::one() / t1, gamma_phi)
    }

    /// The same channels with pure dephasing removed.
    pub fn without_dephasing(self) -> Self {
        Self { gamma_phi: T::zero(), ..self }
    }

    pub fn max_rate(&self) -> T {
        self.kappa.max(self.gamma1).max(self.gamma_phi)
    }
}

impl DecayChannels<f64> {
    pub fn from_physics(dev: &DeviceParams, cav: &CavityParams) -> Result<Self> {
        dev.validate()?;
        Self::from_times(photon_lifetime(cav.q, cav.lambda)?, dev.t1, dev.t2)
    }
}

/// Hamiltonian plus dissipator, with the collapse operators precomputed.
struct Generator<T: Real> {
    h: DMatrix<Complex<T>>,
    collapse: Vec<DMatrix<Complex<T>>>,
    /// `½ Σ L†L`.
    half_sum: DMatrix<Complex<T>>,
}

impl<T: Real> Generator<T> {
    fn new(h: &Operator<T>, ch: &DecayChannels<T>) -> Result<Self> {
        h.ensure_hermitian()?;
        let n_max = h.n_max();
        let mut collapse = Vec::new();
        if ch.kappa > T::zero() && n_max > 0 {
            let (a, _) = hilbert::ladder_operators::<T>(n_max)?;
            collapse.push(a.into_matrix().map(|z| z.scale(ch.kappa.sqrt())));
        }
        if ch.gamma1 > T::zero() {
            collapse.push(hilbert::sigma_minus::<T>(n_max).into_matrix().map(|z| z.scale(ch.gamma1.sqrt())));
        }
        if ch.gamma_phi > T::zero() {
            let s = (ch.gamma_phi / lit(2.0)).sqrt();
            collapse.push(hilbert::sigma_z::<T>(n_max).into_matrix().map(|z| z.scale(s)));
        }
        let dim = h.dim();
        let mut half_sum = DMatrix::zeros(dim, dim);
        for l in &collapse {
            half_sum += l.adjoint() * l;
        }
        let half_sum = half_sum.map(|z| z.scale(lit(0.5)));
        Ok(Self { h: h.matrix().clone(), collapse, half_sum })
    }

    fn apply(&self, rho: &DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
        let minus_i = c(T::zero(), -T::one());
        let mut out = (&self.h * rho - rho * &self.h).map(|z| z * minus_i);
        for l in &self.collapse {
            out += l * rho * l.adjoint();
        }
        out -= &self.half_sum * rho + rho * &self.half_sum;
        out
    }
}

/// `dρ/dt = −i[H,ρ] + Σ_k (L_k ρ L_k† − ½{L_k†L_k, ρ})` with `H` in rad/s.
pub fn lindblad_rhs<T: Real>(
    rho: &DensityMatrix<T>,
    h: &Operator<T>,
    ch: &DecayChannels<T>,
) -> Result<DMatrix<Complex<T>>> {
    if h.n_max() != rho.n_max() {
        return Err(Error::DimensionMismatch { expected: rho.n_max(), found: h.n_max() });
    }
    Ok(Generator::new(h, ch)?.apply(rho.matrix()))
}

/// Largest admissible step: `0.01 / max(rate, ‖H‖)`, or `None` when both vanish.
pub fn step_limit<T: Real>(h: &Operator<T>, ch: &DecayChannels<T>) -> Result<Option<T>> {
    let fastest = ch.max_rate().max(h.spectral_radius_hermitian()?);
    Ok(if fastest > T::zero() { Some(lit::<T>(STEP_FRACTION) / fastest) } else { None })
}

/// Fixed-step fourth-order Runge–Kutta from `rho0` over `t_final` seconds.
/// The step is shortened so that a whole number of steps lands on `t_final`.
pub fn evolve_density<T: Real>(
    rho0: &DensityMatrix<T>,
    h: &Operator<T>,
    ch: &DecayChannels<T>,
    t_final: T,
    dt: T,
) -> Result<DensityMatrix<T>> {
    if h.n_max() != rho0.n_max() {
        return Err(Error::DimensionMismatch { expected: rho0.n_max(), found: h.n_max() });
    }
    if !(dt > T::zero()) || !t_final.is_finite() || t_final < T::zero() {
        return Err(Error::InvalidParameter("need dt > 0 and a finite t_final ≥ 0".into()));
    }
    if let Some(limit) = step_limit(h, ch)? {
        if dt > limit {
            return Err(Error::StepTooLarge { dt: scalar::to_f64(dt), limit: scalar::to_f64(limit) });
        }
    }
    let generator = Generator::new(h, ch)?;
    let steps = scalar::to_f64(t_final / dt).ceil() as usize;
    let mut rho = rho0.clone();
    if steps == 0 {
        return Ok(rho);
    }
    let dt = t_final / lit::<T>(steps as f64);
    let half = dt / lit::<T>(2.0);
    let sixth = dt / lit::<T>(6.0);
    let two = lit::<T>(2.0);
    for _ in 0..steps {
        let r = &rho.matrix;
        let k1 = generator.apply(r);
        let k2 = generator.apply(&(r + k1.map(|z| z.scale(half))));
        let k3 = generator.apply(&(r + k2.map(|z| z.scale(half))));
        let k4 = generator.apply(&(r + k3.map(|z| z.scale(dt))));
        let incr = (k1 + (k2 + k3).map(|z| z.scale(two)) + k4).map(|z| z.scale(sixth));
        rho.matrix += incr;
        rho.symmetrize();
    }
    Ok(rho)
}

/// Runs `seq` from `|g,0⟩⟨g,0|` with each step's Hamiltonian and the given
/// dissipators active throughout, and returns `⟨g,m|ρ|g,m⟩`.
pub fn dissipative_fock_fidelity<T: Real>(seq: &PulseSequence<T>, ch: &DecayChannels<T>, m: usize) -> Result<T> {
    let rho = run_dissipative(seq, ch)?;
    rho.population(Qubit::Ground, m)
}

/// Final density matrix of `seq` applied to `|g,0⟩⟨g,0|` under `ch`.
pub fn run_dissipative<T: Real>(seq: &PulseSequence<T>, ch: &DecayChannels<T>) -> Result<DensityMatrix<T>> {
    let n_max = seq.n_max();
    let required = seq.required_n_max(0);
    if n_max < required {
        return Err(Error::TruncationTooSmall { n_max, required });
    }
    let mut rho = DensityMatrix::pure(&Ket::vacuum(n_max))?;
    for step in seq.steps() {
        if step.duration <= T::zero() {
            continue;
        }
        let h = rwa_hamiltonian(step.kind, seq.rates(), n_max)?;
        let dt = step_limit(&h, ch)?.unwrap_or(step.duration);
        rho = evolve_density(&rho, &h, ch, step.duration, dt)?;
    }
    Ok(rho)
}
