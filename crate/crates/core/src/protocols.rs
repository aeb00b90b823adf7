//! Teleportation-derived protocols.
//!
//! Qubit `S` carries the input, `A` and `B` share a singlet. Alice measures
//! `S` and `A`; Bob holds `B`. The standard protocol resolves all four Bell
//! outcomes, while the dichotomic variants only distinguish one Bell state
//! from its three-dimensional complement. In the complement branch the pair
//! `S, A` carries two approximate clones of the input and `B` carries its
//! approximate negation.
//!
//! Branch probabilities are computed exactly from the pure three-qubit state;
//! nothing here samples.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::{re, ComplexMatrix, Layout, C64, TOLERANCE};
use crate::par::{try_map_indexed, Execution};
use crate::quantum::{
    bell_state, complement_projector, embedded_projector, fidelity, orthogonal_qubit, pauli, project_and_normalize,
    project_density, random_qubit, standard_channels, BellState, DensityMatrix, Pauli, PureState, QuantumError,
};

pub const INPUT: &str = "S";
pub const ALICE: &str = "A";
pub const BOB: &str = "B";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl From<crate::linalg::LinalgError> for ProtocolError {
    fn from(e: crate::linalg::LinalgError) -> Self {
        ProtocolError::Quantum(e.into())
    }
}

pub type Result<T, E = ProtocolError> = std::result::Result<T, E>;

/// Bob's correction for each of Alice's Bell outcomes.
pub fn correction_for(outcome: BellState) -> Pauli {
    match outcome {
        BellState::PsiMinus => Pauli::I,
        BellState::PsiPlus => Pauli::Z,
        BellState::PhiMinus => Pauli::X,
        BellState::PhiPlus => Pauli::Y,
    }
}

#[derive(Debug, Clone)]
pub struct TeleportOutcome {
    pub bell_result: BellState,
    pub correction: Pauli,
    /// Bob's qubit after the correction.
    pub bob_state: DensityMatrix,
    /// Bob's qubit before any correction.
    pub uncorrected: DensityMatrix,
    pub probability: f64,
}

/// Result of a dichotomic (one Bell state vs. complement) measurement.
#[derive(Debug, Clone)]
pub struct CloneUnotResult {
    /// Which Bell state Alice's measurement singles out.
    pub identified: BellState,
    /// Bob's corrected qubit when the identified Bell state is found.
    pub success_branch: DensityMatrix,
    pub rho_sa: DensityMatrix,
    pub rho_s: DensityMatrix,
    pub rho_a: DensityMatrix,
    pub rho_b: DensityMatrix,
    /// Probability of detecting the identified Bell state.
    pub p_singlet: f64,
    pub p_complement: f64,
}

fn require_qubit(phi: &PureState) -> Result<PureState> {
    phi.qubit_label()?;
    Ok(phi.relabel(&[INPUT])?)
}

fn sab() -> Layout {
    Layout::qubits(&[INPUT, ALICE, BOB]).expect("distinct labels")
}

/// `|phi>_S |Psi->_AB`.
pub fn initial_state(phi: &PureState) -> Result<PureState> {
    let phi = require_qubit(phi)?;
    Ok(phi.tensor(&bell_state(BellState::PsiMinus, (ALICE, BOB))?)?)
}

pub fn standard_teleport(phi: &PureState) -> Result<Vec<TeleportOutcome>> {
    let omega = initial_state(phi)?;
    let layout = sab();
    BellState::ALL
        .iter()
        .map(|&tag| {
            let p = embedded_projector(&bell_state(tag, (INPUT, ALICE))?, &layout)?;
            let (post, probability) = project_and_normalize(&omega, &p)?;
            let uncorrected = post.to_density().partial_trace(&[INPUT, ALICE])?;
            let correction = correction_for(tag);
            let bob_state = uncorrected.conjugate_by(&pauli(correction))?;
            Ok(TeleportOutcome {
                bell_result: tag,
                correction,
                bob_state,
                uncorrected,
                probability,
            })
        })
        .collect()
}

/// Dichotomic measurement that singles out `identified` on `S, A`.
pub fn dichotomic_protocol(phi: &PureState, identified: BellState) -> Result<CloneUnotResult> {
    let omega = initial_state(phi)?;
    let layout = sab();
    let bell = bell_state(identified, (INPUT, ALICE))?;

    let hit = embedded_projector(&bell, &layout)?;
    let (hit_state, p_singlet) = project_and_normalize(&omega, &hit)?;
    let success_branch = hit_state
        .to_density()
        .partial_trace(&[INPUT, ALICE])?
        .conjugate_by(&pauli(correction_for(identified)))?;

    let miss = complement_projector(&bell, &layout)?;
    let (tilde, p_complement) = project_and_normalize(&omega, &miss)?;
    let full = tilde.to_density();
    let rho_sa = full.partial_trace(&[BOB])?;
    let rho_s = rho_sa.partial_trace(&[ALICE])?;
    let rho_a = rho_sa.partial_trace(&[INPUT])?;
    let rho_b = full.partial_trace(&[INPUT, ALICE])?;

    Ok(CloneUnotResult {
        identified,
        success_branch,
        rho_sa,
        rho_s,
        rho_a,
        rho_b,
        p_singlet,
        p_complement,
    })
}

/// Singlet-vs-complement protocol: clones on `S, A`, U-NOT on `B`.
pub fn modified_protocol(phi: &PureState) -> Result<CloneUnotResult> {
    let out = dichotomic_protocol(phi, BellState::PsiMinus)?;
    let reference = symmetric_clone_state(phi)?;
    let dist = out.rho_sa.distance(&reference)?;
    if dist > TOLERANCE {
        return Err(ProtocolError::Internal(format!(
            "two-clone state deviates from (2/3)|phi phi><phi phi| + (1/3)|{{phi,phi_perp}}><..| by {dist:e}"
        )));
    }
    Ok(out)
}

/// `Phi+`-vs-complement protocol: Bob's output is the transpose-map
/// approximation `sigma_y ∘ unot`.
pub fn transpose_variant(phi: &PureState) -> Result<CloneUnotResult> {
    dichotomic_protocol(phi, BellState::PhiPlus)
}

/// Closed form of the post-selected pair:
/// `(2/3)|phi phi><phi phi| + (1/3)|{phi,phi_perp}><{phi,phi_perp}|` with
/// `|{phi,phi_perp}> = (|phi_perp phi> + |phi phi_perp>)/sqrt(2)`.
pub fn symmetric_clone_state(phi: &PureState) -> Result<DensityMatrix> {
    let phi_s = require_qubit(phi)?;
    let perp_s = orthogonal_qubit(&phi_s)?;
    let phi_a = phi_s.relabel(&[ALICE])?;
    let perp_a = perp_s.relabel(&[ALICE])?;
    let same = phi_s.tensor(&phi_a)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mixed_amps: Vec<C64> = perp_s
        .tensor(&phi_a)?
        .amplitudes()
        .iter()
        .zip(phi_s.tensor(&perp_a)?.amplitudes())
        .map(|(x, y)| (x + y) * h)
        .collect();
    let pair = PureState::new(same.layout().clone(), mixed_amps)?;
    Ok(DensityMatrix::mixture(&[
        (2.0 / 3.0, &same.to_density()),
        (1.0 / 3.0, &pair.to_density()),
    ])?)
}

/// Equal-weight mixture of Bob's uncorrected states over the three Bell
/// outcomes other than the singlet.
pub fn unot_as_mixture(phi: &PureState) -> Result<DensityMatrix> {
    let outcomes = standard_teleport(phi)?;
    let parts: Vec<(f64, &DensityMatrix)> = outcomes
        .iter()
        .filter(|o| o.bell_result != BellState::PsiMinus)
        .map(|o| (1.0 / 3.0, &o.uncorrected))
        .collect();
    Ok(DensityMatrix::mixture(&parts)?)
}

#[derive(Debug, Clone)]
pub struct MixedAncillaClone {
    pub rho_sa: DensityMatrix,
    pub rho_s: DensityMatrix,
    pub rho_a: DensityMatrix,
    pub p_success: f64,
}

/// Cloning without the shared pair: `|phi><phi|_S ⊗ I_A/2` projected off
/// the singlet.
pub fn mixed_ancilla_clone(phi: &PureState) -> Result<MixedAncillaClone> {
    let phi_s = require_qubit(phi)?;
    let rho_in = phi_s
        .to_density()
        .tensor(&DensityMatrix::maximally_mixed(Layout::qubits(&[ALICE])?))?;
    let p = complement_projector(&bell_state(BellState::PsiMinus, (INPUT, ALICE))?, rho_in.layout())?;
    let (rho_sa, p_success) = project_density(&rho_in, &p)?;
    let rho_s = rho_sa.partial_trace(&[ALICE])?;
    let rho_a = rho_sa.partial_trace(&[INPUT])?;
    Ok(MixedAncillaClone {
        rho_sa,
        rho_s,
        rho_a,
        p_success,
    })
}

/// Two-qubit swap on `S, A`.
pub fn swap_matrix() -> ComplexMatrix {
    ComplexMatrix::from_fn(4, 4, |r, c| {
        let (r1, r0) = (r >> 1, r & 1);
        if c == (r0 << 1 | r1) {
            re(1.0)
        } else {
            re(0.0)
        }
    })
}

/// Fidelities of one Haar-sampled input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSample {
    pub p_singlet: f64,
    pub p_complement: f64,
    pub f_clone_s: f64,
    pub f_clone_a: f64,
    pub f_unot_b: f64,
    pub f_mixed_ancilla: f64,
}

/// Run the singlet protocol and the mixed-ancilla cloner on `n` Haar-random
/// inputs. Input `i` is drawn from ChaCha8 stream `i` of `seed`, so the
/// result does not depend on `exec`.
pub fn universality_sweep(n: usize, seed: u64, exec: Execution) -> Result<Vec<SweepSample>> {
    try_map_indexed(n, exec, |i| {
        let phi = haar_input(seed, i as u64);
        let out = modified_protocol(&phi)?;
        let mixed = mixed_ancilla_clone(&phi)?;
        let perp = orthogonal_qubit(&phi)?;
        Ok(SweepSample {
            p_singlet: out.p_singlet,
            p_complement: out.p_complement,
            f_clone_s: fidelity(&out.rho_s, &phi)?,
            f_clone_a: fidelity(&out.rho_a, &phi)?,
            f_unot_b: fidelity(&out.rho_b, &perp)?,
            f_mixed_ancilla: fidelity(&mixed.rho_s, &phi)?,
        })
    })
}

/// Haar-random input qubit on `S` from stream `stream` of `seed`.
pub fn haar_input(seed: u64, stream: u64) -> PureState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    random_qubit(&mut rng, INPUT)
}

/// `(1/4) * identity-branch + (3/4) * complement-branch` for Bob, which must
/// reproduce the no-information map `I/2`.
pub fn bob_average(result: &CloneUnotResult) -> Result<DensityMatrix> {
    Ok(DensityMatrix::mixture(&[
        (result.p_singlet, &result.success_branch_uncorrected()?),
        (result.p_complement, &result.rho_b),
    ])?)
}

impl CloneUnotResult {
    /// Bob's qubit on the identified branch before his correction.
    pub fn success_branch_uncorrected(&self) -> Result<DensityMatrix> {
        Ok(self
            .success_branch
            .conjugate_by(&pauli(correction_for(self.identified)))?)
    }
}

/// Bob's complement-branch state as predicted by the channel for the
/// identified Bell state.
pub fn expected_bob_state(phi: &PureState, identified: BellState) -> Result<Option<DensityMatrix>> {
    let ch = standard_channels();
    let rho = require_qubit(phi)?.to_density();
    let out = match identified {
        BellState::PsiMinus => Some(ch.unot.apply(&rho)?),
        BellState::PhiPlus => Some(ch.transpose.apply(&rho)?),
        _ => None,
    };
    Ok(out.map(|d| d.relabel(&[BOB])).transpose()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn ket(a: C64, b: C64) -> PureState {
        PureState::normalized(Layout::qubits(&[INPUT]).unwrap(), vec![a, b]).unwrap()
    }

    #[test]
    fn teleport_zero_state() {
        let zero = ket(re(1.0), re(0.0));
        let outs = standard_teleport(&zero).unwrap();
        assert_eq!(outs.len(), 4);
        for o in &outs {
            assert!((o.probability - 0.25).abs() < 1e-12);
            assert!((fidelity(&o.bob_state, &zero.relabel(&[BOB]).unwrap()).unwrap() - 1.0).abs() < 1e-12);
            assert_eq!(o.correction, correction_for(o.bell_result));
        }
    }

    #[test]
    fn teleport_uncorrected_mixture_is_half_identity() {
        let phi = ket(re(0.3), c(0.1, 0.9));
        let outs = standard_teleport(&phi).unwrap();
        let parts: Vec<_> = outs.iter().map(|o| (o.probability, &o.uncorrected)).collect();
        let avg = DensityMatrix::mixture(&parts).unwrap();
        let half = DensityMatrix::maximally_mixed(Layout::qubits(&[BOB]).unwrap());
        assert!(avg.approx_eq(&half, 1e-12));
    }

    #[test]
    fn teleport_circular_state_every_branch() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phi = ket(re(h), c(0.0, h));
        let target = phi.relabel(&[BOB]).unwrap();
        for o in standard_teleport(&phi).unwrap() {
            assert!((fidelity(&o.bob_state, &target).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn modified_protocol_on_zero() {
        let out = modified_protocol(&ket(re(1.0), re(0.0))).unwrap();
        let rs = ComplexMatrix::diag(&[re(5.0 / 6.0), re(1.0 / 6.0)]);
        let rb = ComplexMatrix::diag(&[re(1.0 / 3.0), re(2.0 / 3.0)]);
        assert!(out.rho_s.matrix().approx_eq(&rs, 1e-12));
        assert!(out.rho_a.matrix().approx_eq(&rs, 1e-12));
        assert!(out.rho_b.matrix().approx_eq(&rb, 1e-12));
        assert!((out.p_singlet - 0.25).abs() < 1e-12);
        assert!((out.p_complement - 0.75).abs() < 1e-12);
    }

    #[test]
    fn modified_protocol_on_plus() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phi = ket(re(h), re(h));
        let out = modified_protocol(&phi).unwrap();
        assert!((fidelity(&out.rho_s, &phi).unwrap() - 5.0 / 6.0).abs() < 1e-12);
        let perp = orthogonal_qubit(&phi).unwrap().relabel(&[BOB]).unwrap();
        assert!((fidelity(&out.rho_b, &perp).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn success_branch_returns_input() {
        for tag in [BellState::PsiMinus, BellState::PhiPlus] {
            let phi = haar_input(3, 1);
            let out = dichotomic_protocol(&phi, tag).unwrap();
            let target = phi.relabel(&[BOB]).unwrap();
            assert!((fidelity(&out.success_branch, &target).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unot_mixture_on_zero() {
        let m = unot_as_mixture(&ket(re(1.0), re(0.0))).unwrap();
        let expected = ComplexMatrix::diag(&[re(1.0 / 3.0), re(2.0 / 3.0)]);
        assert!(m.matrix().approx_eq(&expected, 1e-12));
        assert!((m.matrix().trace().unwrap() - re(1.0)).norm() < 1e-12);
    }

    #[test]
    fn transpose_variant_on_zero() {
        let out = transpose_variant(&ket(re(1.0), re(0.0))).unwrap();
        let flipped = ComplexMatrix::diag(&[re(1.0 / 6.0), re(5.0 / 6.0)]);
        let kept = ComplexMatrix::diag(&[re(5.0 / 6.0), re(1.0 / 6.0)]);
        // The Phi+ projector equals (I ⊗ sigma_y) P (I ⊗ sigma_y), so only
        // the A clone picks up the rotation; S keeps the unrotated clone.
        assert!(out.rho_a.matrix().approx_eq(&flipped, 1e-12));
        assert!(out.rho_s.matrix().approx_eq(&kept, 1e-12));
        assert!((out.p_complement - 0.75).abs() < 1e-12);
    }

    #[test]
    fn mixed_ancilla_on_zero() {
        let out = mixed_ancilla_clone(&ket(re(1.0), re(0.0))).unwrap();
        let rs = ComplexMatrix::diag(&[re(5.0 / 6.0), re(1.0 / 6.0)]);
        assert!(out.rho_s.matrix().approx_eq(&rs, 1e-12));
        assert!((out.p_success - 0.75).abs() < 1e-12);
        let singlet = bell_state(BellState::PsiMinus, (INPUT, ALICE)).unwrap();
        assert!(fidelity(&out.rho_sa, &singlet).unwrap().abs() < 1e-12);
    }

    #[test]
    fn non_qubit_input_rejected() {
        let two = bell_state(BellState::PhiPlus, ("S", "A")).unwrap();
        assert!(modified_protocol(&two).is_err());
        assert!(standard_teleport(&two).is_err());
        assert!(mixed_ancilla_clone(&two).is_err());
    }

    #[test]
    fn swap_matrix_permutes_basis() {
        let s = swap_matrix();
        // |01> <-> |10>
        assert_eq!(s[(1, 2)], re(1.0));
        assert_eq!(s[(2, 1)], re(1.0));
        assert_eq!(s[(0, 0)], re(1.0));
        assert_eq!(s[(3, 3)], re(1.0));
        assert_eq!(s[(1, 1)], re(0.0));
    }

    #[test]
    fn sweep_is_execution_independent() {
        let a = universality_sweep(16, 11, Execution::Sequential).unwrap();
        let b = universality_sweep(16, 11, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
