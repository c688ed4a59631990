//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::Instant;

use cavity_synth::dynamics::{propagator, rwa_hamiltonian};
use cavity_synth::hilbert::expm_hermitian;
use cavity_synth::lindblad::evolve_density;
use cavity_synth::physics::{
    self, constants, derive, feasibility_report, flux_coupling, operation_times, photon_lifetime,
    thermal_occupation, CavityParams, DeviceParams, ReportOptions,
};
use cavity_synth::{
    fidelity, fock_sequence, simulate_sequence_with, synthesize, DecayChannels, DensityMatrix, Engine, Ket, Operator,
    PulseKind, PulseSequence, PulseStep, Qubit, RabiRates, TargetState,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn within(name: &str, got: f64, want: f64, rel_tol: f64) -> Outcome {
    let rel = (got - want).abs() / want.abs();
    if rel <= rel_tol {
        Ok(format!("{name} = {got:.4e} (reference {want:.3e}, off by {:.2}%)", 100.0 * rel))
    } else {
        Err(format!("{name} = {got:.4e}, reference {want:.3e}, off by {:.2}% > {:.0}%", 100.0 * rel, 100.0 * rel_tol))
    }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    let mut ok = Vec::new();
    for p in parts {
        ok.push(p?);
    }
    Ok(ok.join("; "))
}

fn reference_rates() -> RabiRates<f64> {
    derive(&DeviceParams::reference_device(), &CavityParams::reference_cavity()).unwrap().rates
}

fn coupling_magnitude() -> Outcome {
    let cav = CavityParams::full_wave(1.0e-3, 3.0e8, 0.03);
    within("pi|eta|/Phi0", flux_coupling(1.0e-10, &cav).map_err(|e| e.to_string())?, 7.38e-5, 0.05)
}

fn qubit_flip_time() -> Outcome {
    let dev = DeviceParams { ej: constants::PLANCK * 13.0e9 / 2.0, ..DeviceParams::reference_device() };
    let d = derive(&dev, &CavityParams::reference_cavity()).map_err(|e| e.to_string())?;
    within("tau_e", operation_times(&d, 0).map_err(|e| e.to_string())?.tau_e, 3.8e-11, 0.03)
}

fn photon_transfer_time() -> Outcome {
    let d = derive(&DeviceParams::reference_device(), &CavityParams::reference_cavity()).map_err(|e| e.to_string())?;
    within("tau_c(0)", operation_times(&d, 0).map_err(|e| e.to_string())?.tau_c[0], 5.0e-7, 0.05)
}

fn thermal_occupancy() -> Outcome {
    let n = |l: f64, t: f64| thermal_occupation(l, t).unwrap();
    let log = n(1.0e-3, 0.030).log10();
    let deep = if (log + 208.0).abs() <= 1.0 {
        Ok(format!("log10 n_th(0.1 cm, 30 mK) = {log:.2}"))
    } else {
        Err(format!("log10 n_th(0.1 cm, 30 mK) = {log:.2}, expected -208 +/- 1"))
    };
    all(vec![
        within("n_th(15 cm, 30 mK)", n(0.15, 0.030), 0.043, 0.05),
        within("n_th(15 cm, 60 mK)", n(0.15, 0.060), 0.26, 0.05),
        deep,
    ])
}

fn photon_lifetimes() -> Outcome {
    let cases = [(3.0e8, 1.0e-3, 0.001), (3.0e8, 0.15, 0.15), (5.0e10, 1.0e-3, 0.167), (5.0e10, 0.15, 25.0)];
    all(cases
        .iter()
        .map(|&(q, l, want)| within(&format!("tau_p(Q={q:.0e}, {} cm)", l * 100.0), photon_lifetime(q, l).unwrap(), want, 0.02))
        .collect())
}

fn fock_hundred_reachable() -> Outcome {
    let cav = CavityParams::reference_cavity();
    let d = derive(&DeviceParams::reference_device(), &cav).map_err(|e| e.to_string())?;
    let curve = physics::fock_ratio_curve(&d, &cav, 1..=200).map_err(|e| e.to_string())?;
    let ratio = curve[99].1;
    let monotone = curve.windows(2).all(|w| w[1].1 < w[0].1);
    if ratio > 1.0 && monotone {
        Ok(format!("ratio(100) = {ratio:.1}, strictly decreasing on 1..=200"))
    } else {
        Err(format!("ratio(100) = {ratio:.3}, decreasing = {monotone}"))
    }
}

fn feasibility_ordering() -> Outcome {
    let cav = CavityParams::reference_cavity();
    let big = DeviceParams::reference_device();
    let small = DeviceParams { s: 1.0e-12, ..big };
    let opts = ReportOptions::default();
    let rb = feasibility_report(&big, &cav, 1, opts).map_err(|e| e.to_string())?;
    let rs = feasibility_report(&small, &cav, 1, opts).map_err(|e| e.to_string())?;
    let detail = format!(
        "10 um: tau_c(0) = {:.2e} s vs T1 = {:.1e} s (ok = {}); 1 um: tau_c(0) = {:.2e} s (ok = {})",
        rb.tau_c[0], big.t1, rb.single_photon_ok, rs.tau_c[0], rs.single_photon_ok
    );
    if rb.single_photon_ok && rb.fock_ok && !rs.single_photon_ok && !rs.fock_ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn max_amplitude_diff(a: &Ket<f64>, b: &Ket<f64>) -> f64 {
    a.amplitudes().iter().zip(b.amplitudes().iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn fock_protocol() -> Outcome {
    let mut worst_infidelity: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    for (i, r) in [reference_rates(), RabiRates::new(1.3, 0.7, 2.1, 0.4).unwrap()].iter().enumerate() {
        for m in 1..=6 {
            let seq = fock_sequence(m, r).map_err(|e| e.to_string())?;
            let start = Ket::vacuum(seq.n_max());
            let closed = simulate_sequence_with(&seq, &start, Engine::ClosedForm).map_err(|e| e.to_string())?;
            let oracle = simulate_sequence_with(&seq, &start, Engine::ExpmOracle).map_err(|e| e.to_string())?;
            let target = Ket::basis(Qubit::Ground, m, seq.n_max()).unwrap();
            let f = fidelity(&target, &closed).unwrap().min(fidelity(&target, &oracle).unwrap());
            worst_infidelity = worst_infidelity.max(1.0 - f);
            worst_gap = worst_gap.max(max_amplitude_diff(&closed, &oracle));
            if 1.0 - f > 1e-10 || worst_gap > 1e-10 {
                return Err(format!("rates #{i}, m = {m}: infidelity {:.2e}, engine gap {worst_gap:.2e}", 1.0 - f));
            }
        }
    }
    Ok(format!("m = 1..6: worst infidelity {worst_infidelity:.1e}, closed-form vs expm gap {worst_gap:.1e}"))
}

fn random_amplitudes(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..=n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Lattice states `e^{iγ} Σ x_k e^{−ikθ}|k⟩` with real `x_k`.
fn random_lattice_target(rng: &mut ChaCha8Rng, n: usize, theta: f64) -> Vec<Complex64> {
    let mut x: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    x[n] = x[n].signum() * x[n].abs().max(0.1);
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let gamma = rng.gen_range(0.0..2.0 * PI);
    x.iter()
        .enumerate()
        .map(|(k, v)| Complex64::from_polar(v / norm, gamma - k as f64 * theta))
        .collect()
}

fn synthesis_batch(rng: &mut ChaCha8Rng, lattice: bool) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let n = rng.gen_range(1..=6);
        let theta = rng.gen_range(-PI..PI);
        let r = if i % 2 == 0 {
            RabiRates::new(1.0, 0.37, theta, 2.3).unwrap()
        } else {
            RabiRates { theta, ..reference_rates() }
        };
        let coeffs = if lattice { random_lattice_target(rng, n, theta) } else { random_amplitudes(rng, n) };
        let target = TargetState::new(coeffs).map_err(|e| e.to_string())?;
        let n_max = n + 2;
        let seq = synthesize(&target, &r, n_max, !lattice).map_err(|e| format!("target #{i} (N = {n}): {e}"))?;
        let out = seq.run().map_err(|e| e.to_string())?;
        let f = fidelity(&target.to_ket(n_max).unwrap(), &out).unwrap();
        worst = worst.max(1.0 - f);
        if 1.0 - f > 1e-9 {
            return Err(format!("target #{i} (N = {n}): infidelity {:.2e}", 1.0 - f));
        }
    }
    Ok(worst)
}

fn arbitrary_synthesis() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let lattice = synthesis_batch(&mut rng, true)?;
    let general = synthesis_batch(&mut rng, false)?;
    Ok(format!("100 lattice targets worst infidelity {lattice:.1e}; 100 general targets with idle {general:.1e}"))
}

fn unitarity_and_composition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let n_max = 6;
    let mut worst_unitary: f64 = 0.0;
    let mut worst_compose: f64 = 0.0;
    let mut worst_pg: f64 = 0.0;
    for _ in 0..20 {
        let r = RabiRates::new(rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0), rng.gen_range(-PI..PI), rng.gen_range(0.2..3.0)).unwrap();
        let (t1, t2) = (rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0));
        for kind in PulseKind::ALL {
            let u1 = propagator(kind, t1, &r, n_max);
            let u2 = propagator(kind, t2, &r, n_max);
            let u12 = propagator(kind, t1 + t2, &r, n_max);
            worst_unitary = worst_unitary.max(u1.unitarity_deviation());
            worst_compose = worst_compose.max((&u2 * &u1).max_abs_diff(&u12));
        }
        // |e,n⟩ under the red sideband: P(|g,n+1⟩) = sin²(|Ω₂| t √(n+1)).
        let n = rng.gen_range(0..n_max);
        let h = rwa_hamiltonian(PulseKind::RedSideband, &r, n_max).unwrap();
        let u = expm_hermitian(&h, t1).unwrap();
        let out = u.apply(&Ket::basis(Qubit::Excited, n, n_max).unwrap()).unwrap();
        let want = (r.omega2_mag * t1 * ((n + 1) as f64).sqrt()).sin().powi(2);
        worst_pg = worst_pg.max((out.population(Qubit::Ground, n + 1).unwrap() - want).abs());
    }
    let detail = format!("unitarity {worst_unitary:.1e}, composition {worst_compose:.1e}, P_g law {worst_pg:.1e}");
    if worst_unitary <= 1e-12 && worst_compose <= 1e-10 && worst_pg <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Least-squares slope of `ln p` against `t`.
fn log_slope(samples: &[(f64, f64)]) -> f64 {
    let k = samples.len() as f64;
    let (sx, sy) = samples.iter().fold((0.0, 0.0), |(a, b), (t, p)| (a + t, b + p.ln()));
    let (mx, my) = (sx / k, sy / k);
    let (num, den) = samples
        .iter()
        .fold((0.0, 0.0), |(a, b), (t, p)| (a + (t - mx) * (p.ln() - my), b + (t - mx) * (t - mx)));
    num / den
}

fn fock_lifetime_law() -> Outcome {
    let kappa = 1.0;
    let ch = DecayChannels::new(kappa, 0.0, 0.0).unwrap();
    let mut report = Vec::new();
    for n in 1..=5 {
        let n_max = n + 2;
        let h = Operator::zeros(n_max);
        let mut rho = DensityMatrix::pure(&Ket::basis(Qubit::Ground, n, n_max).unwrap()).unwrap();
        let mut samples = vec![(0.0, 1.0)];
        let chunk = 0.05;
        for i in 1..=10 {
            rho = evolve_density(&rho, &h, &ch, chunk, 0.001).map_err(|e| e.to_string())?;
            samples.push((i as f64 * chunk, rho.population(Qubit::Ground, n).unwrap()));
        }
        let rate = -log_slope(&samples);
        let rel = (rate - n as f64 * kappa).abs() / (n as f64 * kappa);
        if rel > 0.01 {
            return Err(format!("n = {n}: fitted rate {rate:.5} vs {}", n as f64 * kappa));
        }
        report.push(format!("{rate:.4}"));
    }
    Ok(format!("fitted rates / kappa for n = 1..5: [{}]", report.join(", ")))
}

fn off_by_one_adjudication() -> Outcome {
    let r = RabiRates::new(1.0, 1.0, 0.0, 1.0).unwrap();
    let m = 2;
    let shifted: Vec<PulseStep<f64>> = (1..=m)
        .flat_map(|l| {
            [
                PulseStep::new(PulseKind::Carrier, FRAC_PI_2 / r.omega1).unwrap(),
                PulseStep::new(PulseKind::RedSideband, FRAC_PI_2 / (r.omega2_mag * ((l + 1) as f64).sqrt())).unwrap(),
            ]
        })
        .collect();
    let literal = PulseSequence::new(shifted, r, m + 2).unwrap();
    let target = Ket::basis(Qubit::Ground, m, m + 2).unwrap();
    let f_literal = fidelity(&target, &literal.run().unwrap()).unwrap();
    let f_root_l = fidelity(&target, &fock_sequence(m, &r).unwrap().run().unwrap()).unwrap();
    let detail = format!("sqrt(l+1) timing: fidelity {f_literal:.4}; sqrt(l) timing: infidelity {:.1e}", 1.0 - f_root_l);
    if f_literal < 0.99 && f_root_l >= 1.0 - 1e-10 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("coupling magnitude", coupling_magnitude),
        ("qubit flip time", qubit_flip_time),
        ("photon transfer time", photon_transfer_time),
        ("thermal occupancy", thermal_occupancy),
        ("photon lifetimes", photon_lifetimes),
        ("Fock 10^2 reachability", fock_hundred_reachable),
        ("feasibility ordering", feasibility_ordering),
        ("Fock protocol correctness", fock_protocol),
        ("arbitrary-state synthesis", arbitrary_synthesis),
        ("unitarity and composition", unitarity_and_composition),
        ("Fock lifetime law", fock_lifetime_law),
        ("off-by-one adjudication", off_by_one_adjudication),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("[PASS] {:>2}. {name}: {detail} ({ms} ms)", i + 1),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] {:>2}. {name}: {detail} ({ms} ms)", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
