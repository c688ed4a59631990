//! Pulse-sequence synthesis and simulation.
//!
//! Sequences always start from `|g,0⟩`. Idle-free synthesis uses alternating
//! carrier and red-sideband pulses found by an exact back-evolution solver;
//! targets whose relative phases fall outside the fixed-axis lattice need idle
//! steps and are handled by [`synthesize`] with `allow_idle`.

mod backsolve;
mod document;
mod refine;

pub use document::{from_json, to_json};

use nalgebra::DVector;
use num_complex::Complex;
use num_traits::Zero;

use crate::dynamics::{apply_step, rwa_hamiltonian, PulseKind, RabiRates};
use crate::error::{Error, Result};
use crate::hilbert::{expm_hermitian, fidelity, Ket};
use crate::scalar::{self, abs, lit, tol, Real};
use backsolve::{back_solve, zero_tol, LevelAngles};

/// Seed for the random restarts of the idle-assisted solver.
const REFINE_SEED: u64 = 0x5eed_cafe;
const REFINE_RESTARTS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseStep<T: Real> {
    pub kind: PulseKind,
    /// Seconds.
    pub duration: T,
}

impl<T: Real> PulseStep<T> {
    pub fn new(kind: PulseKind, duration: T) -> Result<Self> {
        if !duration.is_finite() || duration < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "{kind} duration must be finite and nonnegative, got {}",
                scalar::to_f64(duration)
            )));
        }
        Ok(Self { kind, duration })
    }

    /// Dimensionless rotation angle of the step.
    pub fn angle(&self, r: &RabiRates<T>) -> T {
        self.kind.angular_rate(r) * self.duration
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence<T: Real> {
    steps: Vec<PulseStep<T>>,
    rates: RabiRates<T>,
    n_max: usize,
}

impl<T: Real> PulseSequence<T> {
    pub fn new(steps: Vec<PulseStep<T>>, rates: RabiRates<T>, n_max: usize) -> Result<Self> {
        for s in &steps {
            PulseStep::new(s.kind, s.duration)?;
            if s.kind == PulseKind::Idle && s.duration > T::zero() && rates.omega_cavity <= T::zero() {
                return Err(Error::InvalidParameter("idle step with zero cavity frequency".into()));
            }
        }
        Ok(Self { steps, rates, n_max })
    }

    pub fn empty(rates: RabiRates<T>, n_max: usize) -> Self {
        Self { steps: Vec::new(), rates, n_max }
    }

    pub fn steps(&self) -> &[PulseStep<T>] {
        &self.steps
    }

    pub fn rates(&self) -> &RabiRates<T> {
        &self.rates
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn sideband_count(&self) -> usize {
        self.steps.iter().filter(|s| s.kind.is_sideband()).count()
    }

    pub fn total_duration(&self) -> T {
        self.steps.iter().fold(T::zero(), |acc, s| acc + s.duration)
    }

    /// Highest photon number the sequence can populate when started from a
    /// state supported on photon numbers `≤ top`.
    pub fn peak_level(&self, top: usize) -> usize {
        // Highest populated level on the |g⟩ and |e⟩ ladders; `e` may be -1.
        let (mut g, mut e) = (top as i64, top as i64);
        let mut peak = top as i64;
        for s in &self.steps {
            (g, e) = match s.kind {
                PulseKind::Carrier => (g.max(e), g.max(e)),
                PulseKind::RedSideband => (g.max(e + 1), e.max(g - 1)),
                PulseKind::BlueSideband => (g.max(e - 1), e.max(g + 1)),
                PulseKind::Idle => (g, e),
            };
            peak = peak.max(g).max(e);
        }
        peak as usize
    }

    /// Smallest truncation keeping a two-level guard band above every level
    /// the sequence can reach from a state supported on `≤ top` photons.
    pub fn required_n_max(&self, top: usize) -> usize {
        self.peak_level(top) + 2
    }
}

/// Cavity state `Σ c_n |n⟩` to be prepared with the qubit in `|g⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetState<T: Real> {
    coefficients: Vec<Complex<T>>,
}

impl<T: Real> TargetState<T> {
    /// Requires `Σ|c_n|² = 1` within `1e-10`. Trailing zeros are dropped.
    pub fn new(coefficients: Vec<Complex<T>>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidTarget("no coefficients".into()));
        }
        if !coefficients.iter().all(|z| scalar::is_finite(*z)) {
            return Err(Error::InvalidTarget("non-finite coefficient".into()));
        }
        let norm2 = coefficients.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
        if abs(norm2 - T::one()) > tol(1e-10) {
            return Err(Error::InvalidTarget(format!(
                "coefficients are not normalized (sum of squares {})",
                scalar::to_f64(norm2)
            )));
        }
        let mut coefficients = coefficients;
        while coefficients.len() > 1 && coefficients.last().is_some_and(|z| z.is_zero()) {
            coefficients.pop();
        }
        Ok(Self { coefficients })
    }

    pub fn fock(m: usize) -> Self {
        let mut coefficients = vec![Complex::zero(); m + 1];
        coefficients[m] = Complex::from(T::one());
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coefficients
    }

    /// Highest photon number `N` with a nonzero coefficient.
    pub fn max_photons(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn to_ket(&self, n_max: usize) -> Result<Ket<T>> {
        Ket::cavity(&self.coefficients, n_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    /// Closed-form propagators applied in place.
    #[default]
    ClosedForm,
    /// Dense `exp(−iHt)` of the rotating-wave Hamiltonians.
    ExpmOracle,
}

pub fn simulate_sequence<T: Real>(seq: &PulseSequence<T>, initial: &Ket<T>) -> Result<Ket<T>> {
    simulate_sequence_with(seq, initial, Engine::ClosedForm)
}

/// Applies the steps of `seq` to `initial` in order.
pub fn simulate_sequence_with<T: Real>(seq: &PulseSequence<T>, initial: &Ket<T>, engine: Engine) -> Result<Ket<T>> {
    if initial.n_max() != seq.n_max() {
        return Err(Error::DimensionMismatch { expected: seq.n_max(), found: initial.n_max() });
    }
    let norm = initial.norm();
    if abs(norm - T::one()) > tol(1e-10) {
        return Err(Error::InvalidParameter(format!("initial state has norm {}", scalar::to_f64(norm))));
    }
    let required = seq.required_n_max(initial.highest_populated_level());
    if seq.n_max() < required {
        return Err(Error::TruncationTooSmall { n_max: seq.n_max(), required });
    }

    let mut state = initial.clone();
    match engine {
        Engine::ClosedForm => {
            let v = state.amplitudes_mut();
            for s in seq.steps() {
                apply_step(v, s.kind, s.duration, seq.rates());
            }
        }
        Engine::ExpmOracle => {
            for s in seq.steps() {
                let h = rwa_hamiltonian(s.kind, seq.rates(), seq.n_max())?;
                state = expm_hermitian(&h, s.duration)?.apply(&state)?;
            }
        }
    }
    Ok(state)
}

fn need_sideband<T: Real>(r: &RabiRates<T>) -> Result<()> {
    if r.omega2_mag <= T::zero() {
        return Err(Error::InvalidParameter("sideband coupling is zero".into()));
    }
    Ok(())
}

/// Carrier `π/(2Ω₁)` and red `π/(2|Ω₂|√l)` for `l = 1..m`, giving `|g,m⟩`.
pub fn fock_sequence<T: Real>(m: usize, r: &RabiRates<T>) -> Result<PulseSequence<T>> {
    if m > 0 {
        need_sideband(r)?;
    }
    let half_pi = T::frac_pi_2();
    let mut steps = Vec::with_capacity(2 * m);
    for l in 1..=m {
        steps.push(PulseStep { kind: PulseKind::Carrier, duration: half_pi / r.omega1 });
        let root = lit::<T>(l as f64).sqrt();
        steps.push(PulseStep { kind: PulseKind::RedSideband, duration: half_pi / (r.omega2_mag * root) });
    }
    Ok(PulseSequence { steps, rates: *r, n_max: m + 2 })
}

/// Two-step protocol for `α₁|0⟩ + α₂|1⟩`: a carrier of angle `s` then a full
/// red transfer, reaching `cos s |0⟩ + e^{−iθ} sin s |1⟩`.
pub fn binary_superposition<T: Real>(
    alpha1: Complex<T>,
    alpha2: Complex<T>,
    r: &RabiRates<T>,
) -> Result<PulseSequence<T>> {
    let target = TargetState::new(vec![alpha1, alpha2])?;
    let levels = back_solve(target.coefficients(), r.theta).map_err(|level| Error::PhaseUnreachable { level })?;
    if levels.is_empty() {
        return Ok(PulseSequence::empty(*r, 3));
    }
    need_sideband(r)?;
    sequence_from_angles(&level_angles(&levels), r, 3)
}

fn level_angles<T: Real>(levels: &[LevelAngles<T>]) -> Vec<(PulseKind, T)> {
    levels
        .iter()
        .flat_map(|lv| [(PulseKind::Carrier, lv.carrier), (PulseKind::RedSideband, lv.red)])
        .collect()
}

/// Merges neighbouring steps of the same kind, reduces angles to their
/// periods, drops zero steps, and converts angles into durations.
fn sequence_from_angles<T: Real>(
    angles: &[(PulseKind, T)],
    r: &RabiRates<T>,
    n_max: usize,
) -> Result<PulseSequence<T>> {
    let zt = zero_tol::<T>();
    let mut merged: Vec<(PulseKind, T)> = Vec::with_capacity(angles.len());
    for &(kind, angle) in angles {
        let angle = match kind {
            PulseKind::Carrier => scalar::reduce_angle(angle, T::pi()),
            PulseKind::Idle => scalar::reduce_angle(angle, T::two_pi()),
            PulseKind::RedSideband | PulseKind::BlueSideband => angle,
        };
        if abs(angle) <= zt || (kind == PulseKind::Carrier && T::pi() - angle <= zt) {
            continue;
        }
        match merged.last_mut() {
            Some((k, a)) if *k == kind => {
                *a += angle;
                let reduced = match kind {
                    PulseKind::Carrier => scalar::reduce_angle(*a, T::pi()),
                    PulseKind::Idle => scalar::reduce_angle(*a, T::two_pi()),
                    _ => *a,
                };
                *a = reduced;
                if abs(*a) <= zt {
                    merged.pop();
                }
            }
            _ => merged.push((kind, angle)),
        }
    }
    let steps = merged
        .into_iter()
        .map(|(kind, angle)| PulseStep::new(kind, angle / kind.angular_rate(r)))
        .collect::<Result<Vec<_>>>()?;
    PulseSequence::new(steps, *r, n_max)
}

fn sequence_fidelity<T: Real>(seq: &PulseSequence<T>, target: &TargetState<T>) -> Result<T> {
    let out = simulate_sequence(seq, &Ket::vacuum(seq.n_max()))?;
    fidelity(&target.to_ket(seq.n_max())?, &out)
}

/// Builds a sequence taking `|g,0⟩` to `|g⟩ ⊗ target`.
///
/// Targets on the fixed-axis phase lattice are solved exactly by back
/// evolution. Others fail with [`Error::PhaseUnreachable`] unless `allow_idle`
/// is set, in which case layered `Carrier · Idle · Red` sequences are fitted
/// numerically; the result is checked by forward simulation.
pub fn synthesize<T: Real>(
    target: &TargetState<T>,
    r: &RabiRates<T>,
    n_max: usize,
    allow_idle: bool,
) -> Result<PulseSequence<T>> {
    let n = target.max_photons();
    if n_max < n + 2 {
        return Err(Error::TruncationTooSmall { n_max, required: n + 2 });
    }
    if n > 0 {
        need_sideband(r)?;
    }
    let accept = T::one() - tol::<T>(1e-10);

    let seq = match back_solve(target.coefficients(), r.theta) {
        Ok(levels) => sequence_from_angles(&level_angles(&levels), r, n_max)?,
        Err(level) if !allow_idle => return Err(Error::PhaseUnreachable { level }),
        Err(_) => {
            if r.omega_cavity <= T::zero() {
                return Err(Error::InvalidParameter("idle steps need a positive cavity frequency".into()));
            }
            return synthesize_with_idle(target, r, n_max, accept);
        }
    };
    let f = sequence_fidelity(&seq, target)?;
    if f < accept {
        return Err(Error::NotConverged { infidelity: scalar::to_f64(T::one() - f) });
    }
    Ok(seq)
}

fn synthesize_with_idle<T: Real>(
    target: &TargetState<T>,
    r: &RabiRates<T>,
    n_max: usize,
    accept: T,
) -> Result<PulseSequence<T>> {
    let n = target.max_photons();
    let coeffs = target.coefficients();
    let mut best_infidelity = T::one();
    let max_layers = (n_max - 2).min(n + 2);
    for layers in n.max(1)..=max_layers {
        let restarts = REFINE_RESTARTS;
        let fit = refine::fit(coeffs, r.theta, n_max, layers, restarts, REFINE_SEED, tol(1e-12));
        let angles = nonnegative_reds(fit.steps);
        let seq = sequence_from_angles(&angles, r, n_max)?;
        let f = sequence_fidelity(&seq, target)?;
        if f >= accept {
            return Ok(seq);
        }
        best_infidelity = best_infidelity.min(T::one() - f);
    }
    Err(Error::NotConverged { infidelity: scalar::to_f64(best_infidelity) })
}

/// Makes every red angle nonnegative: `Red(−φ) = P Red(φ) P` for the photon
/// parity `P = Idle(π)`, and `P` commutes with the carrier, so each sign flip
/// moves a `π` into the nearest idle on either side.
fn nonnegative_reds<T: Real>(mut steps: Vec<(PulseKind, T)>) -> Vec<(PulseKind, T)> {
    for i in 0..steps.len() {
        if steps[i].0 != PulseKind::RedSideband || steps[i].1 >= T::zero() {
            continue;
        }
        steps[i].1 = -steps[i].1;
        let before = (0..i).rev().find(|&j| steps[j].0 == PulseKind::Idle);
        let after = (i + 1..steps.len()).find(|&j| steps[j].0 == PulseKind::Idle);
        for j in [before, after].into_iter().flatten() {
            steps[j].1 += T::pi();
        }
    }
    steps
}

/// Outcome of an idle-free reachability check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reachability {
    pub reachable: bool,
    /// First photon level whose merge needs a phase the fixed axes lack.
    pub level: Option<usize>,
}

/// Whether carrier and red pulses alone can prepare `target` at sideband
/// phase `theta`.
pub fn reachable<T: Real>(target: &TargetState<T>, theta: T) -> Reachability {
    match back_solve(target.coefficients(), theta) {
        Ok(_) => Reachability { reachable: true, level: None },
        Err(level) => Reachability { reachable: false, level: Some(level) },
    }
}

impl<T: Real> PulseSequence<T> {
    /// Final state of the sequence applied to `|g,0⟩`.
    pub fn run(&self) -> Result<Ket<T>> {
        simulate_sequence(self, &Ket::vacuum(self.n_max))
    }

    /// Closed-form state after every step, starting with `|g,0⟩`.
    pub fn trajectory(&self) -> Result<Vec<Ket<T>>> {
        let initial = Ket::vacuum(self.n_max);
        let required = self.required_n_max(0);
        if self.n_max < required {
            return Err(Error::TruncationTooSmall { n_max: self.n_max, required });
        }
        let mut v: DVector<Complex<T>> = initial.amplitudes().clone();
        let mut out = vec![initial];
        for s in &self.steps {
            apply_step(&mut v, s.kind, s.duration, &self.rates);
            out.push(Ket::from_amplitudes(v.clone(), self.n_max)?);
        }
        Ok(out)
    }
}
