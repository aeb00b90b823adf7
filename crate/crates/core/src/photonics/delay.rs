//! Delay stage and temporal overlap.

use super::PhotonicsError;

/// Speed of light in micrometers per femtosecond.
pub const SPEED_OF_LIGHT_UM_PER_FS: f64 = 0.299_792_458;

/// Default single-photon coherence time.
pub const DEFAULT_TAU_COH_FS: f64 = 80.0;

/// Stage displacement, in units of `c * tau_coh`, used as the
/// "cloning machine off" reference. The overlap there is `exp(-100)`.
pub const SWITCHED_OFF_DISPLACEMENT: f64 = 20.0;

/// Mutual delay produced by stage position `z` (the stage moves the optical
/// path twice, `z = 2 c dt`).
pub fn delay_fs(z_um: f64) -> f64 {
    z_um / (2.0 * SPEED_OF_LIGHT_UM_PER_FS)
}

/// Temporal overlap `exp(-(dt / tau_coh)^2)`.
pub fn visibility_model(z_um: f64, tau_coh_fs: f64) -> Result<f64, PhotonicsError> {
    if tau_coh_fs.is_nan() || tau_coh_fs <= 0.0 || tau_coh_fs.is_infinite() {
        return Err(PhotonicsError::NonPositiveCoherenceTime(tau_coh_fs));
    }
    let x = delay_fs(z_um) / tau_coh_fs;
    Ok((-x * x).exp())
}

/// Stage position far outside the coherence window.
pub fn switched_off_position(tau_coh_fs: f64) -> f64 {
    SWITCHED_OFF_DISPLACEMENT * SPEED_OF_LIGHT_UM_PER_FS * tau_coh_fs
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelaySetting {
    pub z_um: f64,
    pub tau_coh_fs: f64,
    pub visibility: f64,
}

impl DelaySetting {
    pub fn new(z_um: f64, tau_coh_fs: f64) -> Result<Self, PhotonicsError> {
        Ok(Self {
            z_um,
            tau_coh_fs,
            visibility: visibility_model(z_um, tau_coh_fs)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_overlap_at_zero() {
        assert_eq!(visibility_model(0.0, 80.0).unwrap(), 1.0);
    }

    #[test]
    fn vanishes_far_away() {
        let z = 10.0 * SPEED_OF_LIGHT_UM_PER_FS * 80.0;
        assert!(visibility_model(z, 80.0).unwrap() < 1e-10);
    }

    #[test]
    fn even_and_monotone() {
        let mut last = 1.0;
        for i in 1..200 {
            let z = i as f64 * 1.5;
            let v = visibility_model(z, 80.0).unwrap();
            assert_eq!(v, visibility_model(-z, 80.0).unwrap());
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn rejects_bad_coherence_time() {
        for tau in [0.0, -1.0, f64::NAN] {
            assert!(matches!(
                visibility_model(1.0, tau),
                Err(PhotonicsError::NonPositiveCoherenceTime(_))
            ));
        }
    }
}
