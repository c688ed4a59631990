//! Idle-assisted synthesis for targets outside the fixed-axis phase lattice.
//!
//! An idle step only shifts phases between photon numbers; it cannot change
//! the relative phase of `|g,n⟩` and `|e,n⟩`, so a single idle per level is not
//! enough to rescue the exact back-solver. Instead the forward sequence is
//! laid out in layers `Carrier · Idle · Red · Idle · Red` followed by a final
//! idle (two reds separated by an idle act as one red with a tunable phase and
//! a rung-dependent twist), and the angles are fitted with a damped Gauss–Newton (Levenberg–Marquardt)
//! iteration on the residual `ψ(angles) − e^{iγ} target`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::backsolve::back_solve;
use crate::dynamics::{apply_carrier_angle, apply_idle_phase, apply_red_angle, generator_action, PulseKind};
use crate::hilbert::dimension;
use crate::scalar::{self, c, cis, lit, Real};

const MAX_ITERATIONS: usize = 400;

const LAYER: [PulseKind; 5] =
    [PulseKind::Carrier, PulseKind::Idle, PulseKind::RedSideband, PulseKind::Idle, PulseKind::RedSideband];

/// Fitted angles, flattened in forward order.
#[derive(Debug, Clone)]
pub(crate) struct Fit<T> {
    pub steps: Vec<(PulseKind, T)>,
    pub infidelity: T,
}

fn kind_of(k: usize, n_params: usize) -> PulseKind {
    if k + 1 == n_params {
        PulseKind::Idle
    } else {
        LAYER[k % LAYER.len()]
    }
}

fn param_count(layers: usize) -> usize {
    LAYER.len() * layers + 1
}

fn apply<T: Real>(v: &mut DVector<Complex<T>>, kind: PulseKind, angle: T, theta: T) {
    match kind {
        PulseKind::Carrier => apply_carrier_angle(v, angle),
        PulseKind::Idle => apply_idle_phase(v, angle),
        PulseKind::RedSideband => apply_red_angle(v, angle, theta),
        PulseKind::BlueSideband => unreachable!("blue sideband is not used by the layered ansatz"),
    }
}

struct Problem<'a, T: Real> {
    target: &'a DVector<Complex<T>>,
    theta: T,
    n_max: usize,
}

impl<T: Real> Problem<'_, T> {
    /// States after every step; the last one is the output.
    fn trajectory(&self, params: &[T]) -> Vec<DVector<Complex<T>>> {
        let n = params.len();
        let mut v = DVector::from_element(dimension(self.n_max), Complex::zero());
        v[0] = Complex::from(T::one());
        let mut states = Vec::with_capacity(n);
        for (k, &angle) in params.iter().enumerate() {
            apply(&mut v, kind_of(k, n), angle, self.theta);
            states.push(v.clone());
        }
        states
    }

    fn output(&self, params: &[T]) -> DVector<Complex<T>> {
        self.trajectory(params).pop().expect("at least one step")
    }

    /// Residual stacked as `[Re; Im]`.
    fn residual(&self, out: &DVector<Complex<T>>, gamma: T) -> DVector<T> {
        let d = out.len();
        let phase = cis(gamma);
        DVector::from_fn(2 * d, |i, _| {
            let z = out[i % d] - phase * self.target[i % d];
            if i < d {
                z.re
            } else {
                z.im
            }
        })
    }

    fn cost(&self, params: &[T], gamma: T) -> T {
        self.residual(&self.output(params), gamma).norm_squared()
    }

    fn jacobian(&self, params: &[T], gamma: T, states: &[DVector<Complex<T>>]) -> DMatrix<T> {
        let n = params.len();
        let d = states[0].len();
        let mut jac = DMatrix::zeros(2 * d, n + 1);
        for k in 0..n {
            let mut w = generator_action(&states[k], kind_of(k, n), self.theta);
            for (j, &angle) in params.iter().enumerate().skip(k + 1) {
                apply(&mut w, kind_of(j, n), angle, self.theta);
            }
            for i in 0..d {
                jac[(i, k)] = w[i].re;
                jac[(d + i, k)] = w[i].im;
            }
        }
        let dphase = c(T::zero(), -T::one()) * cis(gamma);
        for i in 0..d {
            let z = dphase * self.target[i];
            jac[(i, n)] = z.re;
            jac[(d + i, n)] = z.im;
        }
        jac
    }

    fn best_gamma(&self, params: &[T]) -> T {
        let out = self.output(params);
        let overlap = self.target.iter().zip(out.iter()).fold(Complex::zero(), |acc, (t, o)| acc + t.conj() * o);
        scalar::argument(overlap)
    }

    /// Levenberg–Marquardt from `params`; returns the final cost.
    fn solve(&self, params: &mut Vec<T>) -> (T, T) {
        let n = params.len();
        let mut gamma = self.best_gamma(params);
        let mut cost = self.cost(params, gamma);
        let target_cost = T::default_epsilon() * lit::<T>(64.0);
        let mut lambda = lit::<T>(1e-3);
        let mut stalled = 0;

        for _ in 0..MAX_ITERATIONS {
            if cost <= target_cost {
                break;
            }
            let states = self.trajectory(params);
            let r = self.residual(states.last().expect("nonempty"), gamma);
            let jac = self.jacobian(params, gamma, &states);
            let jt = jac.transpose();
            let normal = &jt * &jac;
            let grad = &jt * &r;
            let scale = normal.diagonal().max().max(T::one());

            let mut accepted = false;
            while lambda < lit::<T>(1e12) {
                let mut damped = normal.clone();
                for i in 0..=n {
                    damped[(i, i)] += lambda * scale;
                }
                let Some(chol) = damped.cholesky() else {
                    lambda *= lit::<T>(4.0);
                    continue;
                };
                let step = chol.solve(&(-grad.clone()));
                let trial: Vec<T> = params.iter().zip(step.iter()).map(|(p, s)| *p + *s).collect();
                let trial_gamma = gamma + step[n];
                let trial_cost = self.cost(&trial, trial_gamma);
                if trial_cost < cost {
                    let improvement = (cost - trial_cost) / cost;
                    stalled = if improvement < lit::<T>(1e-10) { stalled + 1 } else { 0 };
                    *params = trial;
                    gamma = trial_gamma;
                    cost = trial_cost;
                    lambda = (lambda / lit::<T>(3.0)).max(lit::<T>(1e-15));
                    accepted = true;
                    break;
                }
                lambda *= lit::<T>(4.0);
            }
            if !accepted || stalled > 8 {
                break;
            }
        }
        (cost, gamma)
    }
}

/// Starting point from the nearest phase-lattice state: strip the best linear
/// photon-number phase, project the rest onto the lattice, and back-solve.
fn lattice_guess<T: Real>(target: &[Complex<T>], theta: T, layers: usize) -> Vec<T> {
    let mut drift = Complex::zero();
    for w in target.windows(2) {
        drift += w[1] * w[0].conj();
    }
    let final_idle = if drift.is_zero() { T::zero() } else { -theta - scalar::argument(drift) };

    let rotated: Vec<Complex<T>> = target
        .iter()
        .enumerate()
        .map(|(k, z)| *z * cis(lit::<T>(k as f64) * (final_idle + theta)))
        .collect();
    let square = rotated.iter().fold(Complex::zero(), |acc: Complex<T>, z| acc + *z * *z);
    let half = scalar::argument(square) / lit::<T>(2.0);
    let mut projected: Vec<Complex<T>> = rotated
        .iter()
        .enumerate()
        .map(|(k, z)| cis(-(lit::<T>(k as f64) * theta)).scale((*z * cis(-half)).re))
        .collect();
    let norm = projected.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
    if norm > T::zero() {
        projected.iter_mut().for_each(|z| *z = z.unscale(norm));
    }

    let mut params = vec![T::zero(); param_count(layers)];
    if let Ok(levels) = back_solve(&projected, theta) {
        for (l, lv) in levels.iter().enumerate().take(layers) {
            params[LAYER.len() * l] = lv.carrier;
            params[LAYER.len() * l + 2] = lv.red;
        }
    }
    params[LAYER.len() * layers] = final_idle;
    params
}

fn random_guess<T: Real>(rng: &mut ChaCha8Rng, layers: usize) -> Vec<T> {
    (0..param_count(layers))
        .map(|k| {
            let upper = match kind_of(k, param_count(layers)) {
                PulseKind::Idle => std::f64::consts::TAU,
                _ => std::f64::consts::PI,
            };
            lit::<T>(rng.gen_range(0.0..upper))
        })
        .collect()
}

/// Fits a layered sequence reaching `target` (cavity amplitudes, qubit in
/// `|g⟩`) using `layers` layers. Tries the lattice guess first, then
/// `restarts` seeded random starts; returns the best fit found.
pub(crate) fn fit<T: Real>(
    target: &[Complex<T>],
    theta: T,
    n_max: usize,
    layers: usize,
    restarts: usize,
    seed: u64,
    accept: T,
) -> Fit<T> {
    let mut full = DVector::from_element(dimension(n_max), Complex::zero());
    for (k, z) in target.iter().enumerate() {
        full[2 * k] = *z;
    }
    let problem = Problem { target: &full, theta, n_max };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (layers as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));

    let mut best: Option<Fit<T>> = None;
    for attempt in 0..=restarts {
        let mut params = if attempt == 0 { lattice_guess(target, theta, layers) } else { random_guess(&mut rng, layers) };
        problem.solve(&mut params);
        let out = problem.output(&params);
        let overlap = full.iter().zip(out.iter()).fold(Complex::zero(), |acc, (t, o)| acc + t.conj() * o);
        let infidelity = T::one() - overlap.norm_sqr();
        let n = params.len();
        let candidate = Fit { steps: params.iter().enumerate().map(|(k, a)| (kind_of(k, n), *a)).collect(), infidelity };
        let better = best.as_ref().is_none_or(|b| candidate.infidelity < b.infidelity);
        if better {
            best = Some(candidate);
        }
        if best.as_ref().is_some_and(|b| b.infidelity <= accept) {
            break;
        }
    }
    best.expect("at least one attempt")
}
