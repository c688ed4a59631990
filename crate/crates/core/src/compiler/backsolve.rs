//! Exact back-evolution solver for carrier + red-sideband synthesis.
//!
//! Starting from the target `|g⟩ ⊗ Σ c_n|n⟩`, each level `n = N..1` is peeled
//! off in two moves: an inverse red pulse empties `|g,n⟩` into `|e,n−1⟩`, then
//! an inverse carrier empties `|e,n−1⟩` into `|g,n−1⟩`. Both rotations have
//! fixed axes, so each move only works when the two amplitudes it merges carry
//! the right relative phase; the first level where that fails is reported.

use nalgebra::DVector;
use num_complex::Complex;
use num_traits::Zero;

use crate::dynamics::{apply_carrier_angle, apply_red_angle};
use crate::hilbert::dimension;
use crate::scalar::{abs, c, cis, lit, tol, Real};

/// Forward pulse angles for one photon level: carrier angle `Ω₁t` followed
/// by red angle `|Ω₂|t` (lowest-rung convention).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LevelAngles<T> {
    pub carrier: T,
    pub red: T,
}

/// Amplitudes below this are treated as exactly zero.
pub(crate) fn zero_tol<T: Real>() -> T {
    tol(1e-13)
}

/// Largest amplitude a merge may leave behind before the target counts as
/// phase-incompatible.
fn leftover_tol<T: Real>() -> T {
    tol(1e-9)
}

/// Angle in [0, π) whose tangent is `num / den` (den > 0).
fn half_turn_atan<T: Real>(num: T, den: T) -> T {
    let a = num.atan2(den);
    if a < T::zero() {
        a + T::pi()
    } else {
        a
    }
}

/// Runs the back-solver on `coefficients` (cavity amplitudes with the qubit in
/// `|g⟩`). Returns per-level angles in forward order (level 1 first), or the
/// photon level at which a fixed-axis merge would need an extra phase.
pub(crate) fn back_solve<T: Real>(coefficients: &[Complex<T>], theta: T) -> Result<Vec<LevelAngles<T>>, usize> {
    let top = match coefficients.iter().rposition(|z| !z.is_zero()) {
        Some(n) => n,
        None => return Ok(Vec::new()),
    };
    let mut v = DVector::from_element(dimension(top.max(1)), Complex::<T>::zero());
    for (n, z) in coefficients.iter().take(top + 1).enumerate() {
        v[2 * n] = *z;
    }

    let zt = zero_tol::<T>();
    let lt = leftover_tol::<T>();
    let mut levels = Vec::with_capacity(top);
    for n in (1..=top).rev() {
        let (ie, ig) = (2 * n - 1, 2 * n);

        // Inverse red: empty |g,n⟩ into |e,n−1⟩.
        let (a, b) = (v[ie], v[ig]);
        let rung_angle = if b.norm_sqr().sqrt() <= zt {
            T::zero()
        } else if a.norm_sqr().sqrt() <= zt {
            T::frac_pi_2()
        } else {
            let x = c(T::zero(), T::one()) * cis(theta) * b * a.conj();
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            if abs(x.im) > lt * r {
                return Err(n);
            }
            half_turn_atan(x.re, a.norm_sqr())
        };
        let red = rung_angle / lit::<T>(n as f64).sqrt();
        apply_red_angle(&mut v, -red, theta);
        v[ig] = Complex::zero();

        // Inverse carrier: empty |e,n−1⟩ into |g,n−1⟩.
        let (d, e) = (v[ig - 2], v[ie]);
        let carrier = if e.norm_sqr().sqrt() <= zt {
            T::zero()
        } else if d.norm_sqr().sqrt() <= zt {
            T::frac_pi_2()
        } else {
            let y = c(T::zero(), -T::one()) * e * d.conj();
            let r = (d.norm_sqr() + e.norm_sqr()).sqrt();
            if abs(y.im) > lt * r {
                return Err(n);
            }
            half_turn_atan(y.re, d.norm_sqr())
        };
        apply_carrier_angle(&mut v, -carrier);
        v[ie] = Complex::zero();

        levels.push(LevelAngles { carrier, red });
    }
    levels.reverse();
    Ok(levels)
}
