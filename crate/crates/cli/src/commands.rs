use std::fmt::Write as _;
use std::path::Path;

use cavity_synth::compiler::{from_json, to_json};
use cavity_synth::lindblad::run_dissipative;
use cavity_synth::physics::{
    derive, feasibility_report, fock_ratio_csv, fock_ratio_curve, report_json, FeasibilityReport,
};
use cavity_synth::{
    binary_superposition, fidelity, fock_sequence, synthesize, DecayChannels, Ket, PulseSequence,
    Qubit, TargetState,
};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::target::{normalize, parse_target, TargetSpec};

/// Result of `compile`: the sequence document and its verified fidelity.
pub struct Compiled {
    pub json: String,
    pub fidelity: f64,
    pub sequence: PulseSequence<f64>,
}

pub fn compile(cfg: &RunConfig, target: &str, allow_idle: bool) -> Result<Compiled, CliError> {
    let spec = parse_target(target)?;
    let rates = derive(&cfg.device, &cfg.cavity)?.rates;
    let (seq, goal) = match spec {
        TargetSpec::Fock(m) => {
            let seq = fock_sequence(m, &rates)?;
            (seq, TargetState::fock(m))
        }
        TargetSpec::Binary(a1, a2) => {
            let v = normalize(&[a1, a2])?;
            let seq = binary_superposition(v[0], v[1], &rates)?;
            (seq, TargetState::new(v)?)
        }
        TargetSpec::Coeffs(c) => {
            let goal = TargetState::new(normalize(&c)?)?;
            let n_max = cfg.n_max.max(goal.max_photons() + 2);
            (synthesize(&goal, &rates, n_max, allow_idle)?, goal)
        }
    };
    let seq = if seq.n_max() < cfg.n_max {
        seq.with_n_max(cfg.n_max)
    } else {
        seq
    };
    let out = seq.run()?;
    let fidelity = fidelity(&goal.to_ket(seq.n_max())?, &out)?;
    Ok(Compiled {
        json: to_json(&seq),
        fidelity,
        sequence: seq,
    })
}

pub fn load_sequence(path: &Path) -> Result<PulseSequence<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(from_json(&text)?)
}

fn label(q: Qubit, n: usize) -> String {
    format!("{},{n}", q.label())
}

/// Final amplitudes of every basis state, starting from `|g,0⟩`.
pub fn simulate(seq: &PulseSequence<f64>) -> Result<String, CliError> {
    let out = seq.run()?;
    amplitude_table(&out)
}

fn amplitude_table(ket: &Ket<f64>) -> Result<String, CliError> {
    let mut s = String::from("state magnitude phase\n");
    for n in 0..=ket.n_max() {
        for q in [Qubit::Ground, Qubit::Excited] {
            let a = ket.amplitude(q, n)?;
            let mag = a.norm();
            // Phase of a vanishing amplitude is reported as zero.
            let phase = if mag < 1e-15 { 0.0 } else { a.arg() };
            writeln!(s, "{} {:.12} {:.12}", label(q, n), mag, phase + 0.0).unwrap();
        }
    }
    Ok(s)
}

/// Final populations under the device's decay channels.
pub fn simulate_dissipative(
    cfg: &RunConfig,
    seq: &PulseSequence<f64>,
    dephasing: bool,
) -> Result<String, CliError> {
    let ch = DecayChannels::from_physics(&cfg.device, &cfg.cavity)?;
    let ch = if dephasing {
        ch
    } else {
        ch.without_dephasing()
    };
    let rho = run_dissipative(seq, &ch)?;
    let mut s = String::from("state population\n");
    for n in 0..=rho.n_max() {
        for q in [Qubit::Ground, Qubit::Excited] {
            writeln!(s, "{} {:.12}", label(q, n), rho.population(q, n)? + 0.0).unwrap();
        }
    }
    writeln!(s, "# trace {:.12}", rho.trace()).unwrap();
    Ok(s)
}

pub fn feasibility(
    cfg: &RunConfig,
    target_n: usize,
) -> Result<(FeasibilityReport, String), CliError> {
    let rep = feasibility_report(&cfg.device, &cfg.cavity, target_n, cfg.report)?;
    let json = report_json(&cfg.device, &cfg.cavity, &rep)?;
    Ok((rep, json))
}

/// Fock-ratio CSV for the configured cavity, optionally at its quality factor replaced by `q`.
pub fn fig2(
    cfg: &RunConfig,
    n_min: usize,
    n_max: usize,
    q: Option<f64>,
) -> Result<String, CliError> {
    if n_min == 0 || n_min > n_max {
        return Err(CliError::Parse(format!(
            "photon range {n_min}..={n_max} must satisfy 1 <= n-min <= n-max"
        )));
    }
    let mut cav = cfg.cavity;
    if let Some(q) = q {
        cav.q = q;
        cav.validate()?;
    }
    let d = derive(&cfg.device, &cav)?;
    let curve = fock_ratio_curve(&d, &cav, n_min..=n_max)?;
    Ok(fock_ratio_csv(&curve)?)
}

pub fn fig2_file_name(q: f64) -> String {
    format!("fig2_q{q:e}.csv")
}

/// One feasibility row per value of `key`, in input order.
pub fn sweep(
    cfg: &RunConfig,
    key: &str,
    values: &[String],
    target_n: usize,
) -> Result<String, CliError> {
    if key == "output.path" || key == "sim.n_max" {
        return Err(CliError::Parse(format!(
            "`{key}` does not affect feasibility"
        )));
    }
    let rows = values
        .par_iter()
        .map(|v| {
            let mut c = cfg.clone();
            c.set(key, v.trim()).map_err(CliError::Parse)?;
            c.validate()?;
            let rep = feasibility_report(&c.device, &c.cavity, target_n, c.report)?;
            Ok((v.trim().to_string(), rep))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record([
        key,
        "tau_e",
        "tau_c0",
        "tau_p",
        "n_th",
        "single_photon_ok",
        "fock_ok",
        "superposition_ok",
        "max_fock",
    ])
    .map_err(io)?;
    for (v, rep) in rows {
        let tau_c0 = rep
            .tau_c
            .first()
            .map_or(String::new(), |t| format!("{t:e}"));
        w.write_record([
            v,
            format!("{:e}", rep.tau_e),
            tau_c0,
            format!("{:e}", rep.tau_p),
            format!("{:e}", rep.n_th),
            rep.single_photon_ok.to_string(),
            rep.fock_ok.to_string(),
            rep.superposition_ok.to_string(),
            rep.max_fock.to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}
