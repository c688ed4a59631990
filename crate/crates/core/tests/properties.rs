use std::f64::consts::PI;

use cavity_synth::compiler::{from_json, to_json};
use cavity_synth::dynamics::{blue_conserved_quantity, propagator, red_conserved_quantity, rwa_hamiltonian};
use cavity_synth::hilbert::{expm_hermitian, ladder_operators};
use cavity_synth::lindblad::{evolve_density, lindblad_rhs};
use cavity_synth::physics::{
    derive, eta_magnitude, feasibility_report, photon_lifetime, thermal_occupation, CavityParams, DeviceParams,
    ReportOptions,
};
use cavity_synth::{
    fidelity, fock_sequence, synthesize, DecayChannels, DensityMatrix, Ket, Operator, PulseKind, Qubit, RabiRates,
    TargetState,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn rates() -> impl Strategy<Value = RabiRates<f64>> {
    (0.1..5.0f64, 0.1..5.0f64, -PI..PI, 0.1..5.0f64).prop_map(|(a, b, t, w)| RabiRates::new(a, b, t, w).unwrap())
}

fn kind() -> impl Strategy<Value = PulseKind> {
    prop::sample::select(PulseKind::ALL.to_vec())
}

fn amplitudes(max_n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2..=max_n + 1).prop_filter_map("nonzero", |v| {
        let z: Vec<Complex64> = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
        let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        (norm > 1e-3 && z.last().unwrap().norm() > 1e-3).then(|| z.into_iter().map(|c| c / norm).collect())
    })
}

/// Lattice states `e^{iγ} Σ x_k e^{−ikθ}|k⟩`, `x_k` real.
fn lattice_target() -> impl Strategy<Value = (Vec<Complex64>, f64)> {
    (prop::collection::vec(-1.0..1.0f64, 2..=7), -PI..PI, 0.0..2.0 * PI).prop_filter_map("nonzero", |(x, theta, g)| {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        (norm > 1e-3 && x.last().unwrap().abs() > 1e-3).then(|| {
            let c = x.iter().enumerate().map(|(k, v)| Complex64::from_polar(v / norm, g - k as f64 * theta)).collect();
            (c, theta)
        })
    })
}

fn random_density(n_max: usize, seed: &[f64]) -> DensityMatrix<f64> {
    let d = 2 * (n_max + 1);
    let a = DMatrix::from_fn(d, d, |i, j| {
        let k = (i * d + j) % seed.len();
        Complex64::new(seed[k], seed[(k + 1) % seed.len()] * 0.5 - 0.1 * j as f64 / d as f64)
    });
    let m = &a * a.adjoint();
    let tr: f64 = m.diagonal().iter().map(|z| z.re).sum();
    DensityMatrix::new(m / Complex64::new(tr, 0.0), n_max).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn propagators_are_unitary(r in rates(), k in kind(), t in 0.0..10.0f64, n_max in 1usize..8) {
        prop_assert!(propagator(k, t, &r, n_max).unitarity_deviation() <= 1e-12);
    }

    #[test]
    fn closed_form_matches_matrix_exponential(r in rates(), k in kind(), t in 0.0..4.0f64, n_max in 1usize..7) {
        let h = rwa_hamiltonian(k, &r, n_max).unwrap();
        prop_assert!(h.is_hermitian());
        let oracle = expm_hermitian(&h, t).unwrap();
        prop_assert!(propagator(k, t, &r, n_max).max_abs_diff(&oracle) <= 1e-10);
    }

    #[test]
    fn same_kind_steps_compose(r in rates(), k in kind(), t1 in 0.0..4.0f64, t2 in 0.0..4.0f64) {
        let n_max = 5;
        let joined = &propagator(k, t2, &r, n_max) * &propagator(k, t1, &r, n_max);
        prop_assert!(joined.max_abs_diff(&propagator(k, t1 + t2, &r, n_max)) <= 1e-10);
    }

    #[test]
    fn sidebands_conserve_their_excitation_numbers(r in rates(), t in 0.0..4.0f64, n_max in 1usize..7) {
        for (k, q) in [
            (PulseKind::RedSideband, red_conserved_quantity::<f64>(n_max)),
            (PulseKind::BlueSideband, blue_conserved_quantity::<f64>(n_max)),
        ] {
            let u = propagator(k, t, &r, n_max);
            prop_assert!((&(&u.dagger() * &q) * &u).max_abs_diff(&q) <= 1e-12);
        }
    }

    #[test]
    fn fidelity_is_a_symmetric_probability(a in amplitudes(4), b in amplitudes(4)) {
        let x = Ket::cavity(&a, 5).unwrap();
        let y = Ket::cavity(&b, 5).unwrap();
        let f = fidelity(&x, &y).unwrap();
        prop_assert!((-1e-15..=1.0 + 1e-12).contains(&f));
        prop_assert!((f - fidelity(&y, &x).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn lattice_targets_round_trip((c, theta) in lattice_target(), r in rates()) {
        let r = RabiRates { theta, ..r };
        let target = TargetState::new(c).unwrap();
        let n_max = target.max_photons() + 2;
        let seq = synthesize(&target, &r, n_max, false).unwrap();
        let f = fidelity(&target.to_ket(n_max).unwrap(), &seq.run().unwrap()).unwrap();
        prop_assert!(f >= 1.0 - 1e-9, "fidelity {}", f);
        for s in seq.steps() {
            prop_assert!(s.duration >= 0.0);
            prop_assert!(s.duration - PI / s.kind.angular_rate(&r) < 0.0, "{:?} not period-reduced", s);
        }
    }

    #[test]
    fn general_targets_reach_with_idle(c in amplitudes(6), theta in -PI..PI) {
        let r = RabiRates::new(1.0, 0.3, theta, 1.7).unwrap();
        let target = TargetState::new(c).unwrap();
        let n_max = target.max_photons() + 2;
        let seq = synthesize(&target, &r, n_max, true).unwrap();
        let f = fidelity(&target.to_ket(n_max).unwrap(), &seq.run().unwrap()).unwrap();
        prop_assert!(f >= 1.0 - 1e-9, "fidelity {}", f);
        prop_assert!(seq.steps().iter().all(|s| s.duration >= 0.0 && s.duration.is_finite()));
    }

    #[test]
    fn fock_sequences_transfer_completely(m in 0usize..8, r in rates()) {
        let seq = fock_sequence(m, &r).unwrap();
        prop_assert_eq!(seq.len(), 2 * m);
        let states = seq.trajectory().unwrap();
        for l in 1..=m {
            let p = states[2 * l].population(Qubit::Ground, l).unwrap();
            prop_assert!((p - 1.0).abs() <= 1e-12, "after pair {}: {}", l, p);
        }
    }

    #[test]
    fn sequence_documents_round_trip(m in 0usize..5, r in rates()) {
        let seq = fock_sequence(m, &r).unwrap();
        let back = from_json::<f64>(&to_json(&seq)).unwrap();
        prop_assert_eq!(back, seq);
    }

    #[test]
    fn coupling_scales_with_area_and_volume(s in 1e-12..1e-9f64, l in 1e-4..0.3f64) {
        let cav = CavityParams::full_wave(l, 1e8, 0.03);
        let e1 = eta_magnitude(s, &cav).unwrap();
        prop_assert!((eta_magnitude(2.0 * s, &cav).unwrap() / e1 - 2.0).abs() < 1e-12);
        let half = CavityParams { volume: Some(cav.mode_volume() / 2.0), ..cav };
        prop_assert!((eta_magnitude(s, &half).unwrap() / e1 - 2f64.sqrt()).abs() < 1e-12);

        let dev = DeviceParams { s, ..DeviceParams::reference_device() };
        let d1 = derive(&dev, &cav).unwrap();
        let d2 = derive(&DeviceParams { s: 2.0 * s, ..dev }, &cav).unwrap();
        prop_assert!((d2.rates.omega2_mag / d1.rates.omega2_mag - 2.0).abs() < 1e-12);
    }

    #[test]
    fn coupling_and_tunneling_share_a_circle(phi in -2.0..2.0f64, mu in 1.0..1e4f64) {
        let dev = DeviceParams { phi_c: phi, mu, ..DeviceParams::reference_device() };
        let d = derive(&dev, &CavityParams::reference_cavity()).unwrap();
        let full = d.rates.omega2_mag * cavity_synth::physics::constants::HBAR;
        let sum = (d.beta_mag / full).powi(2) + (d.xi / dev.ej).powi(2);
        prop_assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thermal_occupation_is_monotone(l in 1e-4..0.5f64, t in 1e-3..1.0f64, f in 1.01..3.0f64) {
        let n = thermal_occupation(l, t).unwrap();
        prop_assert!(thermal_occupation(l, t * f).unwrap() >= n);
        prop_assert!(thermal_occupation(l * f, t).unwrap() >= n);
    }

    #[test]
    fn photon_lifetime_is_bilinear(q in 1e3..1e12f64, l in 1e-4..1.0f64, f in 0.1..10.0f64) {
        let t = photon_lifetime(q, l).unwrap();
        prop_assert!((photon_lifetime(q * f, l).unwrap() / t - f).abs() < 1e-12 * f);
        prop_assert!((photon_lifetime(q, l * f).unwrap() / t - f).abs() < 1e-12 * f);
    }

    #[test]
    fn feasibility_never_worsens_with_q_or_area(
        q in 1e4..1e11f64, s in 1e-13..1e-9f64, f in 1.0..100.0f64, n in 0usize..500,
    ) {
        let cav = CavityParams { q, ..CavityParams::reference_cavity() };
        let dev = DeviceParams { s, ..DeviceParams::reference_device() };
        let opts = ReportOptions::default();
        let base = feasibility_report(&dev, &cav, n, opts).unwrap();
        for better in [
            feasibility_report(&dev, &CavityParams { q: q * f, ..cav }, n, opts).unwrap(),
            feasibility_report(&DeviceParams { s: s * f, ..dev }, &cav, n, opts).unwrap(),
        ] {
            prop_assert!(better.fock_ok >= base.fock_ok);
            prop_assert!(better.superposition_ok >= base.superposition_ok);
            prop_assert!(better.single_photon_ok >= base.single_photon_ok);
            prop_assert!(better.max_fock >= base.max_fock);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn dissipator_is_traceless(seed in prop::collection::vec(-1.0..1.0f64, 7..13), k in 0.0..3.0f64, g1 in 0.0..3.0f64, gp in 0.0..3.0f64, r in rates(), which in kind()) {
        let n_max = 3;
        let rho = random_density(n_max, &seed);
        let ch = DecayChannels::new(k, g1, gp).unwrap();
        let h = rwa_hamiltonian(which, &r, n_max).unwrap();
        let d = lindblad_rhs(&rho, &h, &ch).unwrap();
        let tr: Complex64 = d.diagonal().iter().sum();
        prop_assert!(tr.norm() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn evolution_preserves_trace_and_positivity(seed in prop::collection::vec(-1.0..1.0f64, 7..13), g1 in 0.0..2.0f64, gp in 0.0..2.0f64, r in rates()) {
        let n_max = 4;
        let kappa = 1.0;
        let ch = DecayChannels::new(kappa, g1, gp).unwrap();
        let h = rwa_hamiltonian(PulseKind::RedSideband, &r, n_max).unwrap();
        let dt = cavity_synth::lindblad::step_limit(&h, &ch).unwrap().unwrap();
        let mut rho = random_density(n_max, &seed);
        for _ in 0..10 {
            rho = evolve_density(&rho, &h, &ch, 0.5 / kappa, dt).unwrap();
            prop_assert!((rho.trace() - 1.0).abs() <= 1e-8);
            prop_assert!(rho.min_eigenvalue() >= -1e-6);
        }
    }
}

#[test]
fn canonical_commutator_holds_below_the_edge() {
    let n_max = 6;
    let (a, ad) = ladder_operators::<f64>(n_max).unwrap();
    let comm = a.commutator(&ad);
    let id = Operator::<f64>::identity(n_max);
    for i in 0..2 * n_max {
        for j in 0..2 * n_max {
            assert!((comm.matrix()[(i, j)] - id.matrix()[(i, j)]).norm() < 1e-14);
        }
    }
}
