use std::fmt;
use std::str::FromStr;

use qtclone::linalg::{c, re};
use qtclone::protocols::INPUT;
use qtclone::PureState;

/// Input state as written on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpec {
    text: String,
    state: PureState,
}

impl StateSpec {
    pub fn text(&self) -> &str {
        &self.text
    }

    /// The parsed qubit, labelled as the protocol input.
    pub fn state(&self) -> &PureState {
        &self.state
    }

    /// `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`, angles in degrees.
    pub fn bloch(theta_deg: f64, phi_deg: f64) -> Self {
        let (s, co) = (theta_deg.to_radians() / 2.0).sin_cos();
        let (sp, cp) = phi_deg.to_radians().sin_cos();
        let state = PureState::normalized(
            qtclone::Layout::qubits(&[INPUT]).expect("label"),
            vec![re(co), c(s * cp, s * sp)],
        )
        .expect("unit Bloch vector");
        Self {
            text: format!("theta={theta_deg},phi={phi_deg}"),
            state,
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

const FORMS: &str = "expected H, V, +, -, R, L or theta=<deg>,phi=<deg>";

fn angle(key: &str, value: &str) -> Result<f64, String> {
    let x: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("'{value}' is not a number for {key}"))?;
    if !x.is_finite() {
        return Err(format!("{key} must be finite"));
    }
    Ok(x)
}

impl FromStr for StateSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let text = s.trim();
        let amps = match text {
            "H" => Some((re(1.0), re(0.0))),
            "V" => Some((re(0.0), re(1.0))),
            "+" => Some((re(h), re(h))),
            "-" => Some((re(h), re(-h))),
            "R" => Some((re(h), c(0.0, h))),
            "L" => Some((re(h), c(0.0, -h))),
            _ => None,
        };
        if let Some((a, b)) = amps {
            let state = PureState::qubit(INPUT, a, b).expect("normalized");
            return Ok(Self {
                text: text.to_string(),
                state,
            });
        }
        if !text.contains('=') {
            return Err(format!("unknown state '{text}': {FORMS}"));
        }
        let (mut theta, mut phi) = (None, None);
        for part in text.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| format!("malformed token '{part}': {FORMS}"))?;
            match k.trim() {
                "theta" if theta.is_none() => theta = Some(angle("theta", v)?),
                "phi" if phi.is_none() => phi = Some(angle("phi", v)?),
                "theta" | "phi" => return Err(format!("'{}' given twice", k.trim())),
                other => return Err(format!("unknown key '{other}': {FORMS}")),
            }
        }
        match (theta, phi) {
            (Some(t), Some(p)) => {
                let mut spec = Self::bloch(t, p);
                spec.text = text.to_string();
                Ok(spec)
            }
            _ => Err(format!("'{text}' needs both theta and phi")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn amps(s: &str) -> Vec<qtclone::C64> {
        s.parse::<StateSpec>().unwrap().state().amplitudes().to_vec()
    }

    #[test]
    fn named_states() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(amps("H"), vec![re(1.0), re(0.0)]);
        assert_eq!(amps("V"), vec![re(0.0), re(1.0)]);
        assert_eq!(amps("-"), vec![re(h), re(-h)]);
        assert_eq!(amps("L"), vec![re(h), c(0.0, -h)]);
    }

    #[test]
    fn bloch_angles_match_named_states() {
        let close = |a: &[qtclone::C64], b: &[qtclone::C64]| a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-15);
        assert!(close(&amps("theta=90,phi=0"), &amps("+")));
        assert!(close(&amps("phi=90, theta=90"), &amps("R")));
        assert!(close(&amps("theta=180,phi=0"), &amps("V")));
    }

    #[test]
    fn rejects_garbage() {
        for bad in [
            "Q",
            "theta=1",
            "theta=x,phi=0",
            "theta=1,phi=2,psi=3",
            "theta=1,theta=2",
            "",
        ] {
            assert!(bad.parse::<StateSpec>().is_err(), "{bad}");
        }
    }
}
