//! Two-photon states in second quantization.
//!
//! A state is stored as the polynomial `sum_{a<=b} d_ab a_a† a_b† |0>` over
//! fully specified single-photon basis modes. Linear optics acts on the
//! creation operators, so every element is a substitution in that
//! polynomial. For `a != b` the term is the normalized Fock state
//! `|1_a 1_b>`; for `a == b` it is `sqrt(2) |2_a>`, which is where the
//! bosonic factor of two in [`TwoPhotonState::probability`] comes from.

use std::collections::BTreeMap;
use std::fmt;

use crate::linalg::{re, C64};
use crate::quantum::PureState;

use super::PhotonicsError;

/// Amplitudes with squared modulus below this are dropped after a transform.
const PRUNE: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Spatial {
    InS,
    InA,
    Out1,
    Out2,
    DetA1,
    DetA2,
    DetB,
}

impl fmt::Display for Spatial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spatial::InS => "in_S",
            Spatial::InA => "in_A",
            Spatial::Out1 => "out_1",
            Spatial::Out2 => "out_2",
            Spatial::DetA1 => "det_A1",
            Spatial::DetA2 => "det_A2",
            Spatial::DetB => "det_B",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::H, Polarization::V];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Temporal {
    Matched,
    Orthogonal,
}

impl Temporal {
    pub const BOTH: [Temporal; 2] = [Temporal::Matched, Temporal::Orthogonal];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// One fully specified single-photon mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisMode {
    pub spatial: Spatial,
    pub pol: Polarization,
    pub temporal: Temporal,
}

impl BasisMode {
    pub fn new(spatial: Spatial, pol: Polarization, temporal: Temporal) -> Self {
        Self { spatial, pol, temporal }
    }

    pub fn with_spatial(self, spatial: Spatial) -> Self {
        Self { spatial, ..self }
    }
}

/// A single photon: a spatial mode with polarization and temporal
/// wave-packet amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonMode {
    pub spatial: Spatial,
    /// Amplitudes over `{H, V}`.
    pub polarization: [C64; 2],
    /// Amplitudes over `{matched, orthogonal}`.
    pub temporal: [C64; 2],
}

impl PhotonMode {
    pub fn new(spatial: Spatial, polarization: &PureState, temporal: [C64; 2]) -> Result<Self, PhotonicsError> {
        polarization.qubit_label()?;
        let pol = [polarization.amplitudes()[0], polarization.amplitudes()[1]];
        let norm_t: f64 = temporal.iter().map(|z| z.norm_sqr()).sum();
        if (norm_t - 1.0).abs() > crate::linalg::TOLERANCE {
            return Err(PhotonicsError::NotNormalized(norm_t));
        }
        Ok(Self {
            spatial,
            polarization: pol,
            temporal,
        })
    }

    /// Creation operator of this photon in the basis-mode expansion.
    pub fn expand(&self) -> Vec<(BasisMode, C64)> {
        let mut out = Vec::with_capacity(4);
        for p in Polarization::BOTH {
            for t in Temporal::BOTH {
                let amp = self.polarization[p.index()] * self.temporal[t.index()];
                if amp.norm_sqr() > 0.0 {
                    out.push((BasisMode::new(self.spatial, p, t), amp));
                }
            }
        }
        out
    }
}

fn key(a: BasisMode, b: BasisMode) -> (BasisMode, BasisMode) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TwoPhotonState {
    terms: BTreeMap<(BasisMode, BasisMode), C64>,
}

impl TwoPhotonState {
    /// `a†(first) a†(second) |0>`, normalized.
    pub fn from_photons(first: &PhotonMode, second: &PhotonMode) -> Result<Self, PhotonicsError> {
        let mut s = Self::default();
        for (a, x) in first.expand() {
            for (b, y) in second.expand() {
                s.accumulate(a, b, x * y);
            }
        }
        s.prune();
        let p = s.probability();
        if p < crate::quantum::DEGENERATE_PROBABILITY {
            return Err(PhotonicsError::DegeneratePostselection(p));
        }
        Ok(s.scaled(1.0 / p.sqrt()))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (BasisMode, BasisMode, C64)>) -> Self {
        let mut s = Self::default();
        for (a, b, d) in terms {
            s.accumulate(a, b, d);
        }
        s.prune();
        s
    }

    fn accumulate(&mut self, a: BasisMode, b: BasisMode, d: C64) {
        *self.terms.entry(key(a, b)).or_insert(re(0.0)) += d;
    }

    fn prune(&mut self) {
        self.terms.retain(|_, d| d.norm_sqr() > PRUNE);
    }

    /// Polynomial coefficients `d_ab` with `a <= b`.
    pub fn terms(&self) -> impl Iterator<Item = (BasisMode, BasisMode, C64)> + '_ {
        self.terms.iter().map(|(&(a, b), &d)| (a, b, d))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Polynomial coefficient of `a_a† a_b†`; symmetric in its arguments.
    pub fn coefficient(&self, a: BasisMode, b: BasisMode) -> C64 {
        self.terms.get(&key(a, b)).copied().unwrap_or(re(0.0))
    }

    /// Amplitude on the normalized Fock state with one photon in `a` and
    /// one in `b` (two in `a` when they coincide).
    pub fn fock_amplitude(&self, a: BasisMode, b: BasisMode) -> C64 {
        let d = self.coefficient(a, b);
        if a == b {
            d * std::f64::consts::SQRT_2
        } else {
            d
        }
    }

    /// Total probability with bosonic weighting of doubly occupied modes.
    pub fn probability(&self) -> f64 {
        self.terms().map(|(a, b, d)| term_weight(a, b, d)).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, d)| (*k, d * factor)).collect(),
        }
    }

    /// Keep only the terms accepted by `keep`.
    pub fn filter(&self, keep: impl Fn(BasisMode, BasisMode) -> bool) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(&(a, b), _)| keep(a, b))
                .map(|(k, d)| (*k, *d))
                .collect(),
        }
    }

    /// Apply a linear map on creation operators,
    /// `a_m† -> sum_k u_k a_k†` with `(k, u_k)` from `map(m)`.
    pub fn transform<F>(&self, map: F) -> Self
    where
        F: Fn(BasisMode) -> Vec<(BasisMode, C64)>,
    {
        let mut out = Self::default();
        for (a, b, d) in self.terms() {
            let ia = map(a);
            let ib = map(b);
            for &(x, u) in &ia {
                for &(y, w) in &ib {
                    out.accumulate(x, y, d * u * w);
                }
            }
        }
        out.prune();
        out
    }

    /// Every spatial mode that carries a photon.
    pub fn occupied_spatial(&self) -> impl Iterator<Item = Spatial> + '_ {
        self.terms().flat_map(|(a, b, _)| [a.spatial, b.spatial])
    }
}

/// Probability carried by one polynomial term.
pub fn term_weight(a: BasisMode, b: BasisMode, d: C64) -> f64 {
    if a == b {
        2.0 * d.norm_sqr()
    } else {
        d.norm_sqr()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h_photon(spatial: Spatial, temporal: [C64; 2]) -> PhotonMode {
        let h = PureState::basis("p", 0).unwrap();
        PhotonMode::new(spatial, &h, temporal).unwrap()
    }

    #[test]
    fn distinct_inputs_are_normalized() {
        let s = TwoPhotonState::from_photons(
            &h_photon(Spatial::InS, [re(1.0), re(0.0)]),
            &h_photon(Spatial::InA, [re(0.6), re(0.8)]),
        )
        .unwrap();
        assert!((s.probability() - 1.0).abs() < 1e-12);
        assert_eq!(s.terms().count(), 2);
    }

    #[test]
    fn same_mode_pair_carries_bosonic_weight() {
        let m = BasisMode::new(Spatial::Out1, Polarization::H, Temporal::Matched);
        let s = TwoPhotonState::from_terms([(m, m, re(std::f64::consts::FRAC_1_SQRT_2))]);
        assert!((s.probability() - 1.0).abs() < 1e-15);
        assert!((s.fock_amplitude(m, m).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coefficient_is_exchange_symmetric() {
        let a = BasisMode::new(Spatial::InS, Polarization::H, Temporal::Matched);
        let b = BasisMode::new(Spatial::InA, Polarization::V, Temporal::Orthogonal);
        let s = TwoPhotonState::from_terms([(b, a, re(1.0))]);
        assert_eq!(s.coefficient(a, b), s.coefficient(b, a));
        assert_eq!(s.coefficient(a, b), re(1.0));
    }

    #[test]
    fn unnormalized_temporal_rejected() {
        let h = PureState::basis("p", 0).unwrap();
        assert!(matches!(
            PhotonMode::new(Spatial::InS, &h, [re(1.0), re(1.0)]),
            Err(PhotonicsError::NotNormalized(_))
        ));
    }
}
