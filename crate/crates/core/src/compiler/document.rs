use serde::{Deserialize, Serialize};

use super::{PulseSequence, PulseStep};
use crate::dynamics::{PulseKind, RabiRates};
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RatesDoc {
    omega1: f64,
    omega2_mag: f64,
    theta: f64,
    omega_cavity: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepDoc {
    kind: PulseKind,
    duration_s: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceDoc {
    rates: RatesDoc,
    n_max: usize,
    steps: Vec<StepDoc>,
}

/// Pretty-printed JSON document for `seq`.
pub fn to_json<T: Real>(seq: &PulseSequence<T>) -> String {
    let r = seq.rates();
    let doc = SequenceDoc {
        rates: RatesDoc {
            omega1: to_f64(r.omega1),
            omega2_mag: to_f64(r.omega2_mag),
            theta: to_f64(r.theta),
            omega_cavity: to_f64(r.omega_cavity),
        },
        n_max: seq.n_max(),
        steps: seq.steps().iter().map(|s| StepDoc { kind: s.kind, duration_s: to_f64(s.duration) }).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

pub fn from_json<T: Real>(text: &str) -> Result<PulseSequence<T>> {
    let doc: SequenceDoc = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
    let r = &doc.rates;
    let rates = RabiRates::new(lit(r.omega1), lit(r.omega2_mag), lit(r.theta), lit(r.omega_cavity))?;
    let steps = doc
        .steps
        .iter()
        .map(|s| PulseStep::new(s.kind, lit(s.duration_s)))
        .collect::<Result<Vec<_>>>()?;
    PulseSequence::new(steps, rates, doc.n_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::fock_sequence;

    #[test]
    fn round_trip() {
        let r = RabiRates::new(4.0e10, 3.1e6, 0.3, 6.0e11).unwrap();
        let seq = fock_sequence(2, &r).unwrap();
        let back: PulseSequence<f64> = from_json(&to_json(&seq)).unwrap();
        assert_eq!(back, seq);
    }

    #[test]
    fn field_names() {
        let r = RabiRates::new(1.0, 1.0, 0.0, 1.0).unwrap();
        let text = to_json(&fock_sequence(1, &r).unwrap());
        for key in ["\"rates\"", "\"omega1\"", "\"omega2_mag\"", "\"theta\"", "\"omega_cavity\"", "\"n_max\"", "\"steps\"", "\"kind\"", "\"duration_s\"", "\"RedSideband\""] {
            assert!(text.contains(key), "{key} missing");
        }
    }

    #[test]
    fn rejects_negative_duration() {
        let text = r#"{"rates":{"omega1":1,"omega2_mag":1,"theta":0,"omega_cavity":1},"n_max":3,"steps":[{"kind":"Carrier","duration_s":-1.0}]}"#;
        assert!(from_json::<f64>(text).is_err());
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(from_json::<f64>("{"), Err(Error::Document(_))));
    }
}
