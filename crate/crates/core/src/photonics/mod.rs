//! Second-quantized model of the two-photon cloning experiment.

mod delay;
mod experiment;
mod fock;
mod scan;

use thiserror::Error;

use crate::quantum::QuantumError;

pub use delay::{
    delay_fs, switched_off_position, visibility_model, DelaySetting, DEFAULT_TAU_COH_FS, SPEED_OF_LIGHT_UM_PER_FS,
    SWITCHED_OFF_DISPLACEMENT,
};
pub use experiment::{
    analyze_mode1, beamsplitter, detection_probabilities, point_distribution, polarization_density,
    postselect_double_out1, postselected_polarization, prepare_input, single_photon_marginal, Ancilla, DetectionEvent,
    DetectionProbabilities, Ensemble, MemberDistribution, PointDistribution,
};
pub use fock::{term_weight, BasisMode, PhotonMode, Polarization, Spatial, Temporal, TwoPhotonState};
pub use scan::{
    exact_ratio, extract_r, fidelity_from_r, hom_scan, r_from_fidelity, run_hom_scan, solve_visibility_for_ratio,
    CoincidenceRecord, HomScan, ScanMode, BATCH_SIZE, GENERATOR,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhotonicsError {
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error("visibility {0} is outside [0, 1]")]
    InvalidVisibility(f64),
    #[error("coherence time must be positive, got {0} fs")]
    NonPositiveCoherenceTime(f64),
    #[error("wave packet norm {0} is not 1")]
    NotNormalized(f64),
    #[error("{op}: photon found in unexpected mode {mode}")]
    UnexpectedMode { op: &'static str, mode: Spatial },
    #[error("post-selected branch has zero probability ({0:e})")]
    DegeneratePostselection(f64),
    #[error("Monte Carlo mode needs at least one trial")]
    ZeroTrials,
    #[error("scan has no stage positions")]
    EmptyScan,
    #[error("baseline coincidence rate is zero")]
    ZeroBaseline,
    #[error("enhancement ratio {0} is below 1")]
    SubClassicalRatio(f64),
    #[error("ratio {0} is not reachable for overlaps in [0, 1]")]
    RatioOutOfRange(f64),
}

impl From<crate::linalg::LinalgError> for PhotonicsError {
    fn from(e: crate::linalg::LinalgError) -> Self {
        PhotonicsError::Quantum(e.into())
    }
}
