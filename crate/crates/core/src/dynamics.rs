//! Closed-form propagators for the four pulse kinds and the rotating-wave
//! Hamiltonians they exponentiate.
//!
//! All Hamiltonians are expressed in angular-frequency units (H/ħ, rad/s), so
//! `expm_hermitian(rwa_hamiltonian(kind, r, n), t)` is directly comparable with
//! the closed-form `propagator(kind, t, r, n)`.
//!
//! Conventions, with `σ₊ = |e⟩⟨g|` and `Ω₂ = |Ω₂| e^{iθ}`:
//!
//! * carrier: `U_C(t) = cos(Ω₁t) I + i sin(Ω₁t) (|g⟩⟨e| + |e⟩⟨g|)`
//! * red: on each rung `{|e,n⟩, |g,n+1⟩}` a rotation by `|Ω₂| t √(n+1)` with
//!   `⟨e,n|U|g,n+1⟩ = −i e^{iθ} sin`, `⟨g,n+1|U|e,n⟩ = −i e^{−iθ} sin`
//! * blue: the same on rungs `{|g,n⟩, |e,n+1⟩}`, with `⟨g,n|U|e,n+1⟩ = −i e^{iθ} sin`
//! * idle: `|q,n⟩ ↦ e^{−inωt} |q,n⟩`
//!
//! The unpaired state at the truncation edge of each sideband (`|e,N⟩` for red,
//! `|g,N⟩` for blue) is left untouched so every propagator stays exactly
//! unitary.

use nalgebra::DVector;
use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{self, idx, Operator, Qubit};
use crate::scalar::{self, c, cis, lit, Real};

/// Rabi and cavity frequencies driving the propagators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiRates<T: Real> {
    /// Carrier Rabi frequency Ω₁ = E_J/ħ (rad/s).
    pub omega1: T,
    /// Sideband coupling |Ω₂| (rad/s).
    pub omega2_mag: T,
    /// Phase θ of Ω₂, in (−π, π].
    pub theta: T,
    /// Cavity angular frequency ω (rad/s), used by idle steps.
    pub omega_cavity: T,
}

impl<T: Real> RabiRates<T> {
    pub fn new(omega1: T, omega2_mag: T, theta: T, omega_cavity: T) -> Result<Self> {
        let finite = omega1.is_finite() && omega2_mag.is_finite() && theta.is_finite() && omega_cavity.is_finite();
        if !finite {
            return Err(Error::InvalidParameter("non-finite Rabi rate".into()));
        }
        if omega1 <= T::zero() {
            return Err(Error::InvalidParameter("omega1 must be positive".into()));
        }
        if omega2_mag < T::zero() {
            return Err(Error::InvalidParameter("omega2_mag must be nonnegative".into()));
        }
        if omega_cavity < T::zero() {
            return Err(Error::InvalidParameter("omega_cavity must be nonnegative".into()));
        }
        Ok(Self { omega1, omega2_mag, theta: scalar::wrap_phase(theta), omega_cavity })
    }

    /// Unit rates (Ω₁ = |Ω₂| = ω = 1) with the given phase; convenient when
    /// only dimensionless angles matter.
    pub fn unit(theta: T) -> Self {
        Self { omega1: T::one(), omega2_mag: T::one(), theta: scalar::wrap_phase(theta), omega_cavity: T::one() }
    }

    /// Complex sideband coupling Ω₂.
    pub fn omega2(&self) -> Complex<T> {
        cis(self.theta).scale(self.omega2_mag)
    }

    pub fn cast<U: Real>(&self) -> RabiRates<U> {
        let f = |x: T| lit::<U>(scalar::to_f64(x));
        RabiRates {
            omega1: f(self.omega1),
            omega2_mag: f(self.omega2_mag),
            theta: f(self.theta),
            omega_cavity: f(self.omega_cavity),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PulseKind {
    Carrier,
    RedSideband,
    BlueSideband,
    /// Coupling switched off; free cavity evolution. Not one of the three
    /// physical operation modes; it exists to supply photon-number phases.
    Idle,
}

impl PulseKind {
    pub const ALL: [PulseKind; 4] = [PulseKind::Carrier, PulseKind::RedSideband, PulseKind::BlueSideband, PulseKind::Idle];

    pub fn is_sideband(self) -> bool {
        matches!(self, PulseKind::RedSideband | PulseKind::BlueSideband)
    }

    /// Rotation rate that converts a duration into the step's angle: Ω₁ for
    /// the carrier, |Ω₂| for sidebands (angle on the lowest rung), ω for idle.
    pub fn angular_rate<T: Real>(self, r: &RabiRates<T>) -> T {
        match self {
            PulseKind::Carrier => r.omega1,
            PulseKind::RedSideband | PulseKind::BlueSideband => r.omega2_mag,
            PulseKind::Idle => r.omega_cavity,
        }
    }
}

impl std::fmt::Display for PulseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PulseKind::Carrier => "Carrier",
            PulseKind::RedSideband => "RedSideband",
            PulseKind::BlueSideband => "BlueSideband",
            PulseKind::Idle => "Idle",
        };
        f.write_str(s)
    }
}

#[inline]
fn sqrt_n<T: Real>(n: usize) -> T {
    lit::<T>(n as f64).sqrt()
}

/// `U_C(t)`.
pub fn carrier_propagator<T: Real>(t: T, r: &RabiRates<T>, n_max: usize) -> Operator<T> {
    let mut u = Operator::zeros(n_max).into_matrix();
    let s = r.omega1 * t;
    let (cs, sn) = (Complex::from(s.cos()), c(T::zero(), s.sin()));
    for n in 0..=n_max {
        let (g, e) = (idx(Qubit::Ground, n), idx(Qubit::Excited, n));
        u[(g, g)] = cs;
        u[(e, e)] = cs;
        u[(g, e)] = sn;
        u[(e, g)] = sn;
    }
    Operator::from_matrix_unchecked(u, n_max)
}

/// Writes a 2×2 sideband rotation on the pair (`upper`, `lower`) where
/// `⟨upper|U|lower⟩ = −i e^{iθ} sin φ`.
fn write_rung<T: Real>(u: &mut nalgebra::DMatrix<Complex<T>>, upper: usize, lower: usize, phi: T, theta: T) {
    let cs = Complex::from(phi.cos());
    let minus_i_sin = c(T::zero(), -phi.sin());
    u[(upper, upper)] = cs;
    u[(lower, lower)] = cs;
    u[(upper, lower)] = minus_i_sin * cis(theta);
    u[(lower, upper)] = minus_i_sin * cis(-theta);
}

/// `U_R(t)`.
pub fn red_propagator<T: Real>(t: T, r: &RabiRates<T>, n_max: usize) -> Operator<T> {
    let mut u = Operator::identity(n_max).into_matrix();
    for n in 0..n_max {
        let phi = r.omega2_mag * t * sqrt_n::<T>(n + 1);
        write_rung(&mut u, idx(Qubit::Excited, n), idx(Qubit::Ground, n + 1), phi, r.theta);
    }
    Operator::from_matrix_unchecked(u, n_max)
}

/// `U_B(t)`.
pub fn blue_propagator<T: Real>(t: T, r: &RabiRates<T>, n_max: usize) -> Operator<T> {
    let mut u = Operator::identity(n_max).into_matrix();
    for n in 0..n_max {
        let phi = r.omega2_mag * t * sqrt_n::<T>(n + 1);
        write_rung(&mut u, idx(Qubit::Ground, n), idx(Qubit::Excited, n + 1), phi, r.theta);
    }
    Operator::from_matrix_unchecked(u, n_max)
}

/// Free cavity evolution with the coupling off.
pub fn idle_propagator<T: Real>(t: T, r: &RabiRates<T>, n_max: usize) -> Operator<T> {
    let mut u = Operator::zeros(n_max).into_matrix();
    for n in 0..=n_max {
        let phase = cis(-(lit::<T>(n as f64) * r.omega_cavity * t));
        u[(idx(Qubit::Ground, n), idx(Qubit::Ground, n))] = phase;
        u[(idx(Qubit::Excited, n), idx(Qubit::Excited, n))] = phase;
    }
    Operator::from_matrix_unchecked(u, n_max)
}

/// Closed-form propagator of `kind` for duration `t`.
pub fn propagator<T: Real>(kind: PulseKind, t: T, r: &RabiRates<T>, n_max: usize) -> Operator<T> {
    match kind {
        PulseKind::Carrier => carrier_propagator(t, r, n_max),
        PulseKind::RedSideband => red_propagator(t, r, n_max),
        PulseKind::BlueSideband => blue_propagator(t, r, n_max),
        PulseKind::Idle => idle_propagator(t, r, n_max),
    }
}

/// Rotating-wave Hamiltonian (H/ħ, rad/s) whose exponential reproduces the
/// closed-form propagator of the same kind:
///
/// * carrier: `−Ω₁ (σ₊ + σ₋)`
/// * red: `Ω₂ a σ₊ + Ω₂* a† σ₋`
/// * blue: `Ω₂ a σ₋ + Ω₂* a† σ₊`
/// * idle: `ω a†a`
pub fn rwa_hamiltonian<T: Real>(kind: PulseKind, r: &RabiRates<T>, n_max: usize) -> Result<Operator<T>> {
    let h = match kind {
        PulseKind::Carrier => hilbert::sigma_x(n_max).scale(Complex::from(-r.omega1)),
        PulseKind::RedSideband | PulseKind::BlueSideband => {
            let (a, a_dagger) = hilbert::ladder_operators(n_max)?;
            let (sp, sm) = (hilbert::sigma_plus(n_max), hilbert::sigma_minus(n_max));
            let (raise_qubit, lower_qubit) = if kind == PulseKind::RedSideband { (&sp, &sm) } else { (&sm, &sp) };
            let forward = (&a * raise_qubit).scale(r.omega2());
            let backward = (&a_dagger * lower_qubit).scale(r.omega2().conj());
            &forward + &backward
        }
        PulseKind::Idle => hilbert::number_operator(n_max).scale(Complex::from(r.omega_cavity)),
    };
    Ok(h)
}

// In-place actions on amplitude vectors, parameterized by dimensionless
// angles. These are the hot path of simulation and synthesis.

/// Carrier by angle `s = Ω₁t`.
pub(crate) fn apply_carrier_angle<T: Real>(v: &mut DVector<Complex<T>>, s: T) {
    let (cs, sn) = (s.cos(), s.sin());
    let i_sin = c(T::zero(), sn);
    for n in 0..v.len() / 2 {
        let (g, e) = (v[2 * n], v[2 * n + 1]);
        v[2 * n] = g.scale(cs) + e * i_sin;
        v[2 * n + 1] = e.scale(cs) + g * i_sin;
    }
}

fn rotate_pair<T: Real>(v: &mut DVector<Complex<T>>, upper: usize, lower: usize, phi: T, theta: T) {
    let (cs, sn) = (phi.cos(), phi.sin());
    let (x, y) = (v[upper], v[lower]);
    let minus_i_sin = c(T::zero(), -sn);
    v[upper] = x.scale(cs) + minus_i_sin * cis(theta) * y;
    v[lower] = y.scale(cs) + minus_i_sin * cis(-theta) * x;
}

/// Red sideband with lowest-rung angle `phi = |Ω₂|t`.
pub(crate) fn apply_red_angle<T: Real>(v: &mut DVector<Complex<T>>, phi: T, theta: T) {
    let n_max = v.len() / 2 - 1;
    for n in 0..n_max {
        rotate_pair(v, 2 * n + 1, 2 * n + 2, phi * sqrt_n::<T>(n + 1), theta);
    }
}

/// Blue sideband with lowest-rung angle `phi = |Ω₂|t`.
pub(crate) fn apply_blue_angle<T: Real>(v: &mut DVector<Complex<T>>, phi: T, theta: T) {
    let n_max = v.len() / 2 - 1;
    for n in 0..n_max {
        rotate_pair(v, 2 * n, 2 * n + 3, phi * sqrt_n::<T>(n + 1), theta);
    }
}

/// Idle by phase `vartheta = ωt`.
pub(crate) fn apply_idle_phase<T: Real>(v: &mut DVector<Complex<T>>, vartheta: T) {
    for n in 0..v.len() / 2 {
        let p = cis(-(lit::<T>(n as f64) * vartheta));
        v[2 * n] *= p;
        v[2 * n + 1] *= p;
    }
}

/// Applies the closed-form step of `kind` lasting `t` to `v`.
pub(crate) fn apply_step<T: Real>(v: &mut DVector<Complex<T>>, kind: PulseKind, t: T, r: &RabiRates<T>) {
    let angle = kind.angular_rate(r) * t;
    match kind {
        PulseKind::Carrier => apply_carrier_angle(v, angle),
        PulseKind::RedSideband => apply_red_angle(v, angle, r.theta),
        PulseKind::BlueSideband => apply_blue_angle(v, angle, r.theta),
        PulseKind::Idle => apply_idle_phase(v, angle),
    }
}

/// `d/dangle` of the unit-rate generator action, i.e. `−i G v` where the step
/// is `exp(−i angle G)`.
pub(crate) fn generator_action<T: Real>(v: &DVector<Complex<T>>, kind: PulseKind, theta: T) -> DVector<Complex<T>> {
    let mut out = DVector::from_element(v.len(), Complex::zero());
    let minus_i = c(T::zero(), -T::one());
    match kind {
        PulseKind::Carrier => {
            // G = −σ_x, so −iG = iσ_x.
            let i = c(T::zero(), T::one());
            for n in 0..v.len() / 2 {
                out[2 * n] = i * v[2 * n + 1];
                out[2 * n + 1] = i * v[2 * n];
            }
        }
        PulseKind::RedSideband | PulseKind::BlueSideband => {
            let n_max = v.len() / 2 - 1;
            for n in 0..n_max {
                let (upper, lower) = if kind == PulseKind::RedSideband { (2 * n + 1, 2 * n + 2) } else { (2 * n, 2 * n + 3) };
                let k = sqrt_n::<T>(n + 1);
                out[upper] += minus_i * cis(theta).scale(k) * v[lower];
                out[lower] += minus_i * cis(-theta).scale(k) * v[upper];
            }
        }
        PulseKind::Idle => {
            for i in 0..v.len() {
                out[i] = minus_i.scale(lit::<T>((i / 2) as f64)) * v[i];
            }
        }
    }
    out
}

/// Excitation number conserved by the red sideband: `a†a + |e⟩⟨e|`.
pub fn red_conserved_quantity<T: Real>(n_max: usize) -> Operator<T> {
    &hilbert::number_operator(n_max) + &hilbert::excited_projector(n_max)
}

/// Quantity conserved by the blue sideband: `a†a − |e⟩⟨e|`.
pub fn blue_conserved_quantity<T: Real>(n_max: usize) -> Operator<T> {
    &hilbert::number_operator(n_max) - &hilbert::excited_projector(n_max)
}
