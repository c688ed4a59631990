//! Device and cavity physics: couplings, timescales, thermal occupancy,
//! operating points, and feasibility verdicts.
//!
//! Everything here is concrete `f64`: thermal occupancies at millimetre
//! wavelengths are around `1e-208`, far below the range of `f32`.

use std::ops::RangeInclusive;

use serde::Serialize;

use crate::dynamics::{PulseKind, RabiRates};
use crate::error::{Error, Result};

/// Physical constants (SI, CODATA 2018).
pub mod constants {
    use std::f64::consts::PI;

    pub const PLANCK: f64 = 6.626_070_15e-34;
    pub const HBAR: f64 = PLANCK / (2.0 * PI);
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
    pub const BOLTZMANN: f64 = 1.380_649e-23;
    pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
    /// Superconducting flux quantum `h/2e`.
    pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELEMENTARY_CHARGE);
}

use constants::*;
use std::f64::consts::PI;

/// Relative mismatch between `4E_ch/ħ` and the cavity frequency above which
/// [`DerivedParams::resonance_warning`] is raised.
pub const RESONANCE_TOLERANCE: f64 = 0.05;

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {x}")))
    }
}

fn nonnegative(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be nonnegative and finite, got {x}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviceParams {
    /// Single-junction Josephson energy (J).
    pub ej: f64,
    /// Gate capacitance (F).
    pub cg: f64,
    /// Junction capacitance (F).
    pub cj: f64,
    /// Dimensionless gate charge.
    pub ng: f64,
    /// Control flux in units of Φ₀.
    pub phi_c: f64,
    /// SQUID loop area (m²).
    pub s: f64,
    pub t1: f64,
    pub t2: f64,
    /// Relative permeability enhancement, ≥ 1.
    pub mu: f64,
}

impl DeviceParams {
    /// Charge qubit with `2E_J/h = 13 GHz`, a 10 μm square loop, `T₁ = 1.3 μs`
    /// and `T₂ = 5 ns`, with capacitances placing `4E_ch/ħ` on the 0.1 cm
    /// cavity resonance.
    pub fn reference_device() -> Self {
        Self {
            ej: PLANCK * 6.5e9,
            cg: 5.8e-17,
            cj: 1.0e-16,
            ng: 0.5,
            phi_c: 0.5,
            s: 1.0e-10,
            t1: 1.3e-6,
            t2: 5.0e-9,
            mu: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("EJ", self.ej)?;
        positive("Cg", self.cg)?;
        positive("CJ", self.cj)?;
        if !(0.0..=1.5).contains(&self.ng) {
            return Err(Error::InvalidParameter(format!("ng must lie in [0, 1.5], got {}", self.ng)));
        }
        if !self.phi_c.is_finite() {
            return Err(Error::InvalidParameter("phi_c must be finite".into()));
        }
        nonnegative("S", self.s)?;
        positive("T1", self.t1)?;
        positive("T2", self.t2)?;
        if !(self.mu.is_finite() && self.mu >= 1.0) {
            return Err(Error::InvalidParameter(format!("mu must be at least 1, got {}", self.mu)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CavityParams {
    /// Wavelength (m).
    pub lambda: f64,
    pub q: f64,
    /// Temperature (K).
    pub temperature: f64,
    /// Mode volume (m³); `None` means the full-wave volume `λ³`.
    pub volume: Option<f64>,
    /// Phase θ of the sideband coupling.
    pub theta: f64,
}

impl CavityParams {
    /// Full-wave cavity: mode volume `λ³`, θ = 0.
    pub fn full_wave(lambda: f64, q: f64, temperature: f64) -> Self {
        Self { lambda, q, temperature, volume: None, theta: 0.0 }
    }

    /// 0.1 cm cavity with `Q = 3×10⁸` at 30 mK.
    pub fn reference_cavity() -> Self {
        Self::full_wave(1.0e-3, 3.0e8, 0.030)
    }

    pub fn mode_volume(&self) -> f64 {
        self.volume.unwrap_or(self.lambda.powi(3))
    }

    /// `ω = 2πc/λ`.
    pub fn omega(&self) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT / self.lambda
    }

    pub fn validate(&self) -> Result<()> {
        positive("lambda", self.lambda)?;
        positive("Q", self.q)?;
        nonnegative("T", self.temperature)?;
        positive("V", self.mode_volume())?;
        if !self.theta.is_finite() {
            return Err(Error::InvalidParameter("theta must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedParams {
    /// Charging energy `e²/2(C_g + 2C_J)` (J).
    pub e_ch: f64,
    /// Cavity angular frequency (rad/s).
    pub omega: f64,
    /// `−2E_ch(1 − 2n_g)` (J).
    pub e_z: f64,
    /// Flux per photon threading the loop (Wb).
    pub eta_mag: f64,
    /// Photon-qubit coupling `(π|η|E_J/Φ₀)·μ·|sin(πΦ_c/Φ₀)|` (J).
    pub beta_mag: f64,
    /// `E_J cos(πΦ_c/Φ₀)` (J).
    pub xi: f64,
    #[serde(skip)]
    pub rates: RabiRates<f64>,
    /// `|4E_ch/ħ − ω| / ω`.
    pub resonance_mismatch: f64,
}

impl DerivedParams {
    /// The charging resonance `4E_ch/ħ` is off the cavity frequency by more
    /// than [`RESONANCE_TOLERANCE`].
    pub fn resonance_warning(&self) -> bool {
        self.resonance_mismatch > RESONANCE_TOLERANCE
    }
}

/// `|η| = (S/c)·√(ħω/ε₀V)`, uniform mode field over the loop.
pub fn eta_magnitude(s: f64, cav: &CavityParams) -> Result<f64> {
    nonnegative("S", s)?;
    cav.validate()?;
    Ok(s / SPEED_OF_LIGHT * (HBAR * cav.omega() / (VACUUM_PERMITTIVITY * cav.mode_volume())).sqrt())
}

/// Dimensionless coupling `π|η|/Φ₀`.
pub fn flux_coupling(s: f64, cav: &CavityParams) -> Result<f64> {
    Ok(PI * eta_magnitude(s, cav)? / FLUX_QUANTUM)
}

pub fn derive(dev: &DeviceParams, cav: &CavityParams) -> Result<DerivedParams> {
    dev.validate()?;
    cav.validate()?;
    let e = ELEMENTARY_CHARGE;
    let e_ch = e * e / (2.0 * (dev.cg + 2.0 * dev.cj));
    let omega = cav.omega();
    let e_z = -2.0 * e_ch * (1.0 - 2.0 * dev.ng);
    let eta_mag = eta_magnitude(dev.s, cav)?;
    let coupling = PI * eta_mag * dev.ej * dev.mu / FLUX_QUANTUM;
    let beta_mag = coupling * (PI * dev.phi_c).sin().abs();
    let xi = dev.ej * (PI * dev.phi_c).cos();
    let rates = RabiRates::new(dev.ej / HBAR, coupling / HBAR, cav.theta, omega)?;
    let resonance_mismatch = (4.0 * e_ch / HBAR - omega).abs() / omega;
    Ok(DerivedParams { e_ch, omega, e_z, eta_mag, beta_mag, xi, rates, resonance_mismatch })
}

/// Bose–Einstein occupancy `1/(e^{ħω/k_BT} − 1)` of the mode at wavelength
/// `lambda` (m) and temperature `t` (K).
pub fn thermal_occupation(lambda: f64, t: f64) -> Result<f64> {
    positive("lambda", lambda)?;
    nonnegative("T", t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * 2.0 * PI * SPEED_OF_LIGHT / (lambda * BOLTZMANN * t);
    Ok(1.0 / x.exp_m1())
}

/// `τ_p = Q/f = Qλ/c`.
pub fn photon_lifetime(q: f64, lambda: f64) -> Result<f64> {
    positive("Q", q)?;
    positive("lambda", lambda)?;
    Ok(q * lambda / SPEED_OF_LIGHT)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperationTimes {
    /// Full carrier excitation `π/(2Ω₁)`.
    pub tau_e: f64,
    /// `τ_c[n] = π/(2|Ω₂|√(n+1))` for `n = 0..=n_max`.
    pub tau_c: Vec<f64>,
}

pub fn operation_times(d: &DerivedParams, n_max: usize) -> Result<OperationTimes> {
    positive("omega1", d.rates.omega1)?;
    positive("omega2", d.rates.omega2_mag)?;
    let tau_e = PI / (2.0 * d.rates.omega1);
    let tau_c = (0..=n_max).map(|n| transfer_time(d, n)).collect();
    Ok(OperationTimes { tau_e, tau_c })
}

fn transfer_time(d: &DerivedParams, n: usize) -> f64 {
    PI / (2.0 * d.rates.omega2_mag * ((n + 1) as f64).sqrt())
}

/// `(τ_p/n)/τ_c⁽ⁿ⁾`.
fn fock_ratio(d: &DerivedParams, tau_p: f64, n: usize) -> f64 {
    (tau_p / n as f64) / transfer_time(d, n)
}

/// Fock lifetime over transfer time, `(τ_p/n)/τ_c⁽ⁿ⁾`, for each `n`.
pub fn fock_ratio_curve(d: &DerivedParams, cav: &CavityParams, n_range: RangeInclusive<usize>) -> Result<Vec<(usize, f64)>> {
    if *n_range.start() == 0 {
        return Err(Error::InvalidParameter("photon numbers start at 1".into()));
    }
    positive("omega2", d.rates.omega2_mag)?;
    let tau_p = photon_lifetime(cav.q, cav.lambda)?;
    Ok(n_range.map(|n| (n, fock_ratio(d, tau_p, n))).collect())
}

/// Gate charge and control flux (in Φ₀) that select a pulse kind.
pub fn knob_settings(kind: PulseKind) -> Result<(f64, f64)> {
    match kind {
        PulseKind::Carrier => Ok((0.5, 0.0)),
        PulseKind::RedSideband => Ok((1.0, 0.5)),
        PulseKind::BlueSideband => Ok((0.0, 0.5)),
        PulseKind::Idle => Err(Error::NotAPhysicalKnob),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportOptions {
    /// Required ratio of `T₁`, `T₂`, `τ_p` to the carrier time `τ_e`.
    pub margin: f64,
    /// Required ratio of `T₁`, `T₂` to each transfer time `τ_c⁽ⁿ⁾`, and of
    /// the Fock lifetime `τ_p/n` to `τ_c⁽ⁿ⁾`.
    pub transfer_margin: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { margin: 10.0, transfer_margin: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub target_n: usize,
    pub tau_e: f64,
    /// `τ_c⁽ⁿ⁾` for `n = 0..target_n`.
    pub tau_c: Vec<f64>,
    pub tau_p: f64,
    pub n_th: f64,
    /// The excited qubit emits its photon before relaxing: `τ_c⁽⁰⁾ < T₁`.
    pub single_photon_ok: bool,
    pub fock_ok: bool,
    pub superposition_ok: bool,
    /// Largest Fock number passing every check; 0 if none does.
    pub max_fock: u64,
    pub resonance_warning: bool,
    pub options: ReportOptions,
}

struct Checks<'a> {
    dev: &'a DeviceParams,
    d: &'a DerivedParams,
    tau_e: f64,
    tau_p: f64,
    opts: ReportOptions,
}

impl Checks<'_> {
    fn qubit_ok(&self) -> bool {
        let m = self.opts.margin;
        self.dev.t1 >= m * self.tau_e && self.tau_p >= m * self.tau_e
    }

    fn fock_ok(&self, n: u64) -> bool {
        if !self.qubit_ok() {
            return false;
        }
        if n == 0 {
            return true;
        }
        // τ_c⁽ᵏ⁾ and the Fock ratio both decrease with k, so the extreme
        // members of each family decide.
        let tm = self.opts.transfer_margin;
        self.dev.t1 >= tm * transfer_time(self.d, 0) && self.ratio(n) >= tm
    }

    fn ratio(&self, n: u64) -> f64 {
        let nf = n as f64;
        (self.tau_p / nf) * 2.0 * self.d.rates.omega2_mag * (nf + 1.0).sqrt() / PI
    }

    fn superposition_ok(&self, n: u64) -> bool {
        let m = self.opts.margin;
        let tm = self.opts.transfer_margin;
        self.fock_ok(n) && self.dev.t2 >= m * self.tau_e && (n == 0 || self.dev.t2 >= tm * transfer_time(self.d, 0))
    }

    fn max_fock(&self) -> u64 {
        if !self.fock_ok(1) {
            return 0;
        }
        let mut lo = 1u64;
        let mut hi = 2u64;
        while self.fock_ok(hi) {
            lo = hi;
            match hi.checked_mul(2) {
                Some(h) if h < (1u64 << 62) => hi = h,
                _ => return lo,
            }
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.fock_ok(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

/// Checks the timescale hierarchy needed to prepare `|target_n⟩`.
///
/// The fast carrier pulse is held to `opts.margin`; the slow sideband
/// transfers, whose times are comparable to `T₁` in realistic devices, are
/// held to `opts.transfer_margin`.
pub fn feasibility_report(
    dev: &DeviceParams,
    cav: &CavityParams,
    target_n: usize,
    opts: ReportOptions,
) -> Result<FeasibilityReport> {
    positive("margin", opts.margin)?;
    positive("transfer_margin", opts.transfer_margin)?;
    let d = derive(dev, cav)?;
    if d.rates.omega2_mag <= 0.0 {
        return Err(Error::InvalidParameter("sideband coupling vanishes (S = 0)".into()));
    }
    let times = operation_times(&d, target_n.saturating_sub(1))?;
    let tau_p = photon_lifetime(cav.q, cav.lambda)?;
    let n_th = thermal_occupation(cav.lambda, cav.temperature)?;
    let checks = Checks { dev, d: &d, tau_e: times.tau_e, tau_p, opts };
    let tau_c = if target_n == 0 { Vec::new() } else { times.tau_c };
    Ok(FeasibilityReport {
        target_n,
        tau_e: times.tau_e,
        tau_c,
        tau_p,
        n_th,
        single_photon_ok: transfer_time(&d, 0) < dev.t1,
        fock_ok: checks.fock_ok(target_n as u64),
        superposition_ok: checks.superposition_ok(target_n as u64),
        max_fock: checks.max_fock(),
        resonance_warning: d.resonance_warning(),
        options: opts,
    })
}

/// `n,ratio` CSV for a Fock-ratio curve.
pub fn fock_ratio_csv(curve: &[(usize, f64)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Document(e.to_string());
    w.write_record(["n", "ratio"]).map_err(io)?;
    for (n, ratio) in curve {
        w.write_record([n.to_string(), format!("{ratio:e}")]).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Document(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Document(e.to_string()))
}

#[derive(Serialize)]
struct ReportDocument<'a> {
    device: &'a DeviceParams,
    cavity: &'a CavityParams,
    mode_volume: f64,
    derived: &'a DerivedParams,
    rabi: RatesView,
    report: &'a FeasibilityReport,
}

#[derive(Serialize)]
struct RatesView {
    omega1: f64,
    omega2_mag: f64,
    theta: f64,
    omega_cavity: f64,
}

/// JSON document with the report and every input that produced it.
pub fn report_json(dev: &DeviceParams, cav: &CavityParams, report: &FeasibilityReport) -> Result<String> {
    let derived = derive(dev, cav)?;
    let r = derived.rates;
    let doc = ReportDocument {
        device: dev,
        cavity: cav,
        mode_volume: cav.mode_volume(),
        derived: &derived,
        rabi: RatesView { omega1: r.omega1, omega2_mag: r.omega2_mag, theta: r.theta, omega_cavity: r.omega_cavity },
        report,
    };
    serde_json::to_string_pretty(&doc).map_err(|e| Error::Document(e.to_string()))
}
