//! The beamsplitter cloning experiment, element by element.
//!
//! Photon `S` carries the input polarization and the reference wave packet.
//! Photon `A` carries the ancilla polarization and a wave packet that
//! overlaps the reference with probability `v`. After the 50:50 splitter only
//! events with both photons in output 1 are kept; that pair is analyzed by a
//! wave plate set so the polarizing splitter transmits `phi` and reflects
//! `phi_perp`, a second 50:50 splitter feeding `D_A1`/`D_A2` on the
//! transmitted side, and `D_B` on the reflected side.

use rand::Rng;

use crate::linalg::{partial_trace, re, ComplexMatrix, Layout, C64};
use crate::quantum::{orthogonal_qubit, DensityMatrix, PureState, DEGENERATE_PROBABILITY};

use super::fock::{term_weight, BasisMode, PhotonMode, Polarization, Spatial, TwoPhotonState};
use super::PhotonicsError;

/// Polarization prepared on the ancilla photon.
#[derive(Debug, Clone, PartialEq)]
pub enum Ancilla {
    /// Stochastic half-wave plate: `H` or `V` with probability 1/2 each.
    MixedHV,
    Fixed(PureState),
}

/// Weighted ensemble of two-photon inputs.
pub type Ensemble = Vec<(f64, TwoPhotonState)>;

fn check_visibility(v: f64) -> Result<(), PhotonicsError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(PhotonicsError::InvalidVisibility(v))
    }
}

pub fn prepare_input(phi: &PureState, ancilla: &Ancilla, v: f64) -> Result<Ensemble, PhotonicsError> {
    check_visibility(v)?;
    let reference = [re(1.0), re(0.0)];
    let delayed = [re(v.sqrt()), re((1.0 - v).sqrt())];
    let s_photon = PhotonMode::new(Spatial::InS, phi, reference)?;
    let members: Vec<(f64, PureState)> = match ancilla {
        Ancilla::MixedHV => vec![(0.5, PureState::basis("A", 0)?), (0.5, PureState::basis("A", 1)?)],
        Ancilla::Fixed(pol) => vec![(1.0, pol.clone())],
    };
    members
        .into_iter()
        .map(|(w, pol)| {
            let a_photon = PhotonMode::new(Spatial::InA, &pol, delayed)?;
            Ok((w, TwoPhotonState::from_photons(&s_photon, &a_photon)?))
        })
        .collect()
}

fn require_spatial(state: &TwoPhotonState, allowed: &[Spatial], op: &'static str) -> Result<(), PhotonicsError> {
    match state.occupied_spatial().find(|s| !allowed.contains(s)) {
        Some(mode) => Err(PhotonicsError::UnexpectedMode { op, mode }),
        None => Ok(()),
    }
}

/// 50:50 splitter: `in_S -> (out_1 + out_2)/sqrt(2)`, `in_A -> (out_1 - out_2)/sqrt(2)`.
pub fn beamsplitter(state: &TwoPhotonState) -> Result<TwoPhotonState, PhotonicsError> {
    require_spatial(state, &[Spatial::InS, Spatial::InA], "beamsplitter")?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Ok(state.transform(|m| {
        let sign = if m.spatial == Spatial::InS { 1.0 } else { -1.0 };
        vec![
            (m.with_spatial(Spatial::Out1), re(h)),
            (m.with_spatial(Spatial::Out2), re(sign * h)),
        ]
    }))
}

/// Keep the two-photons-in-output-1 branch; returns it renormalized along
/// with its probability.
pub fn postselect_double_out1(state: &TwoPhotonState) -> Result<(TwoPhotonState, f64), PhotonicsError> {
    require_spatial(state, &[Spatial::Out1, Spatial::Out2], "postselect_double_out1")?;
    let kept = state.filter(|a, b| a.spatial == Spatial::Out1 && b.spatial == Spatial::Out1);
    let p = kept.probability();
    if p < DEGENERATE_PROBABILITY {
        return Err(PhotonicsError::DegeneratePostselection(p));
    }
    Ok((kept.scaled(1.0 / p.sqrt()), p))
}

/// Two-fold detection patterns on the output-1 analyzer.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DetectionProbabilities {
    pub a1a2: f64,
    pub a2b: f64,
    pub a1b: f64,
    pub a1a1: f64,
    pub a2a2: f64,
    pub bb: f64,
}

impl DetectionProbabilities {
    pub fn total(&self) -> f64 {
        self.a1a2 + self.a2b + self.a1b + self.a1a1 + self.a2a2 + self.bb
    }

    fn scaled(self, k: f64) -> Self {
        Self {
            a1a2: self.a1a2 * k,
            a2b: self.a2b * k,
            a1b: self.a1b * k,
            a1a1: self.a1a1 * k,
            a2a2: self.a2a2 * k,
            bb: self.bb * k,
        }
    }
}

/// Creation-operator map of the analyzer: wave plate taking `phi -> H` and
/// `phi_perp -> V`, polarizing splitter, then the transmitted arm split onto
/// `D_A1` and `D_A2`.
fn analyzer(phi: &PureState) -> Result<impl Fn(BasisMode) -> Vec<(BasisMode, C64)>, PhotonicsError> {
    let perp = orthogonal_qubit(phi)?;
    let f = [phi.amplitudes()[0], phi.amplitudes()[1]];
    let g = [perp.amplitudes()[0], perp.amplitudes()[1]];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Ok(move |m: BasisMode| {
        let p = m.pol.index();
        let transmitted = f[p].conj();
        let reflected = g[p].conj();
        let t = m.temporal;
        vec![
            (BasisMode::new(Spatial::DetA1, Polarization::H, t), transmitted * h),
            (BasisMode::new(Spatial::DetA2, Polarization::H, t), transmitted * h),
            (BasisMode::new(Spatial::DetB, Polarization::V, t), reflected),
        ]
    })
}

/// Detection-pattern probabilities for a state entirely in output 1.
pub fn detection_probabilities(
    state: &TwoPhotonState,
    phi: &PureState,
) -> Result<DetectionProbabilities, PhotonicsError> {
    require_spatial(state, &[Spatial::Out1], "analyze_mode1")?;
    let out = state.transform(analyzer(phi)?);
    let mut d = DetectionProbabilities::default();
    for (a, b, amp) in out.terms() {
        let w = term_weight(a, b, amp);
        let slot = match (a.spatial, b.spatial) {
            (Spatial::DetA1, Spatial::DetA2) => &mut d.a1a2,
            (Spatial::DetA2, Spatial::DetB) => &mut d.a2b,
            (Spatial::DetA1, Spatial::DetB) => &mut d.a1b,
            (Spatial::DetA1, Spatial::DetA1) => &mut d.a1a1,
            (Spatial::DetA2, Spatial::DetA2) => &mut d.a2a2,
            (Spatial::DetB, Spatial::DetB) => &mut d.bb,
            (x, _) => {
                return Err(PhotonicsError::UnexpectedMode {
                    op: "analyze_mode1",
                    mode: x,
                })
            }
        };
        *slot += w;
    }
    Ok(d)
}

/// `(p[D_A1, D_A2], p[D_A2, D_B])` for a state entirely in output 1.
pub fn analyze_mode1(state: &TwoPhotonState, phi: &PureState) -> Result<(f64, f64), PhotonicsError> {
    let d = detection_probabilities(state, phi)?;
    Ok((d.a1a2, d.a2b))
}

const P1: &str = "P1";
const T1: &str = "T1";
const P2: &str = "P2";
const T2: &str = "T2";

/// Two-photon polarization density matrix of an output-1 state, symmetrized
/// over the two (indistinguishable) photons and traced over their temporal
/// modes. Layout `[P1, P2]`.
pub fn polarization_density(state: &TwoPhotonState) -> Result<DensityMatrix, PhotonicsError> {
    require_spatial(state, &[Spatial::Out1], "polarization_density")?;
    let local = |m: BasisMode| m.pol.index() * 2 + m.temporal.index();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut psi = vec![re(0.0); 16];
    for (a, b, d) in state.terms() {
        let (x, y) = (local(a), local(b));
        if x == y {
            psi[x * 4 + x] += d * std::f64::consts::SQRT_2;
        } else {
            psi[x * 4 + y] += d * h;
            psi[y * 4 + x] += d * h;
        }
    }
    let full = Layout::qubits(&[P1, T1, P2, T2])?;
    let rho = partial_trace(&ComplexMatrix::outer(&psi, &psi), &full, &[T1, T2])?;
    Ok(DensityMatrix::new(Layout::qubits(&[P1, P2])?, rho)?)
}

/// Single-photon polarization marginal of a two-photon polarization state.
pub fn single_photon_marginal(pair: &DensityMatrix) -> Result<DensityMatrix, PhotonicsError> {
    Ok(pair.partial_trace(&[P2])?.relabel(&["p"])?)
}

/// Every two-photon detection outcome of one injected pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DetectionEvent {
    A1A2,
    A2B,
    A1B,
    A1A1,
    A2A2,
    BB,
    /// At least one photon left through output 2.
    Rejected,
}

impl DetectionEvent {
    pub const ALL: [DetectionEvent; 7] = [
        DetectionEvent::A1A2,
        DetectionEvent::A2B,
        DetectionEvent::A1B,
        DetectionEvent::A1A1,
        DetectionEvent::A2A2,
        DetectionEvent::BB,
        DetectionEvent::Rejected,
    ];
}

/// Outcome distribution for one ensemble member.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberDistribution {
    pub weight: f64,
    /// Joint probabilities in [`DetectionEvent::ALL`] order.
    pub events: [f64; 7],
}

/// Exact outcome distribution of the whole pipeline at one overlap value.
#[derive(Debug, Clone, PartialEq)]
pub struct PointDistribution {
    pub visibility: f64,
    pub members: Vec<MemberDistribution>,
}

impl PointDistribution {
    pub fn probability(&self, event: DetectionEvent) -> f64 {
        let i = DetectionEvent::ALL.iter().position(|e| *e == event).expect("listed");
        self.members.iter().map(|m| m.weight * m.events[i]).sum()
    }

    pub fn p_post(&self) -> f64 {
        1.0 - self.probability(DetectionEvent::Rejected)
    }

    /// Draw one event: first the ancilla member, then the detection pattern.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DetectionEvent {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut member = self.members.last().expect("nonempty ensemble");
        for m in &self.members {
            acc += m.weight;
            if u < acc {
                member = m;
                break;
            }
        }
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (e, p) in DetectionEvent::ALL.iter().zip(&member.events) {
            acc += p;
            if u < acc {
                return *e;
            }
        }
        DetectionEvent::Rejected
    }
}

pub fn point_distribution(phi: &PureState, ancilla: &Ancilla, v: f64) -> Result<PointDistribution, PhotonicsError> {
    let members = prepare_input(phi, ancilla, v)?
        .into_iter()
        .map(|(weight, input)| {
            let mixed = beamsplitter(&input)?;
            let mut events = [0.0; 7];
            match postselect_double_out1(&mixed) {
                Ok((post, p)) => {
                    let d = detection_probabilities(&post, phi)?.scaled(p);
                    events[..6].copy_from_slice(&[d.a1a2, d.a2b, d.a1b, d.a1a1, d.a2a2, d.bb]);
                    events[6] = 1.0 - p;
                }
                Err(PhotonicsError::DegeneratePostselection(_)) => events[6] = 1.0,
                Err(e) => return Err(e),
            }
            Ok(MemberDistribution { weight, events })
        })
        .collect::<Result<_, PhotonicsError>>()?;
    Ok(PointDistribution { visibility: v, members })
}

/// Ensemble-averaged post-selected polarization state in output 1 and the
/// post-selection probability.
pub fn postselected_polarization(
    phi: &PureState,
    ancilla: &Ancilla,
    v: f64,
) -> Result<(DensityMatrix, f64), PhotonicsError> {
    let mut acc = ComplexMatrix::zeros(4, 4);
    let mut total = 0.0;
    for (w, input) in prepare_input(phi, ancilla, v)? {
        let mixed = beamsplitter(&input)?;
        match postselect_double_out1(&mixed) {
            Ok((post, p)) => {
                let rho = polarization_density(&post)?;
                acc = acc.add(&rho.matrix().scale(re(w * p)))?;
                total += w * p;
            }
            Err(PhotonicsError::DegeneratePostselection(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if total < DEGENERATE_PROBABILITY {
        return Err(PhotonicsError::DegeneratePostselection(total));
    }
    let rho = DensityMatrix::new(Layout::qubits(&[P1, P2])?, acc.scale(re(1.0 / total)))?;
    Ok((rho, total))
}
