//! Target specifications: `fock:m`, `binary:a1,a2`, `coeffs:c0,c1,...`.
//! Complex literals use the `a+bj` form (`0.5`, `-0.5j`, `0.3-0.4j`, `1e-3+2j`).

use num_complex::Complex64;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum TargetSpec {
    Fock(usize),
    Binary(Complex64, Complex64),
    Coeffs(Vec<Complex64>),
}

pub fn parse_complex(text: &str) -> Result<Complex64, CliError> {
    let bad = || {
        CliError::Parse(format!(
            "`{text}` is not a complex literal of the form a+bj"
        ))
    };
    let s = text.trim();
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('j') else {
        return match s.parse::<f64>() {
            Ok(re) if re.is_finite() => Ok(Complex64::new(re, 0.0)),
            _ => Err(bad()),
        };
    };
    // Split at the last sign that is not the leading sign or an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.trim_start_matches('+').parse().map_err(|_| bad())?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

fn parse_list(body: &str) -> Result<Vec<Complex64>, CliError> {
    body.split(',').map(parse_complex).collect()
}

pub fn parse_target(spec: &str) -> Result<TargetSpec, CliError> {
    let (kind, body) = spec.split_once(':').ok_or_else(|| {
        CliError::Parse(format!(
            "target `{spec}` must look like fock:m, binary:a1,a2 or coeffs:c0,c1,..."
        ))
    })?;
    match kind.trim() {
        "fock" => {
            let body = body.trim();
            if body.starts_with('-') {
                return Err(CliError::Parse(format!(
                    "Fock number must be nonnegative, got {body}"
                )));
            }
            body.parse()
                .map(TargetSpec::Fock)
                .map_err(|_| CliError::Parse(format!("`{body}` is not a photon number")))
        }
        "binary" => match parse_list(body)?.as_slice() {
            [a, b] => Ok(TargetSpec::Binary(*a, *b)),
            v => Err(CliError::Parse(format!(
                "binary targets take two amplitudes, got {}",
                v.len()
            ))),
        },
        "coeffs" => Ok(TargetSpec::Coeffs(parse_list(body)?)),
        other => Err(CliError::Parse(format!("unknown target kind `{other}`"))),
    }
}

/// Scales amplitudes to unit norm.
pub fn normalize(v: &[Complex64]) -> Result<Vec<Complex64>, CliError> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(CliError::Parse("target amplitudes are all zero".into()));
    }
    Ok(v.iter().map(|z| z / norm).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0.5").unwrap(), c(0.5, 0.0));
        assert_eq!(parse_complex("-2j").unwrap(), c(0.0, -2.0));
        assert_eq!(parse_complex("0.3-0.4j").unwrap(), c(0.3, -0.4));
        assert_eq!(parse_complex("-1e-3+2e+1j").unwrap(), c(-1e-3, 20.0));
        assert_eq!(parse_complex("1+j").unwrap(), c(1.0, 1.0));
        assert_eq!(parse_complex("j").unwrap(), c(0.0, 1.0));
        for bad in ["", "1+2i", "abc", "1++2j", "nan"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn target_kinds() {
        assert_eq!(parse_target("fock:3").unwrap(), TargetSpec::Fock(3));
        assert_eq!(
            parse_target("binary:0.6,0.8j").unwrap(),
            TargetSpec::Binary(c(0.6, 0.0), c(0.0, 0.8))
        );
        assert_eq!(
            parse_target("coeffs:1,0,0").unwrap(),
            TargetSpec::Coeffs(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
        );
        for bad in ["fock:-1", "fock:x", "binary:1", "squeezed:1", "fock"] {
            assert!(
                matches!(parse_target(bad), Err(CliError::Parse(_))),
                "{bad}"
            );
        }
    }
}
