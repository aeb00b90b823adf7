//! Pure states, density matrices, Pauli and Bell machinery, projectors,
//! Kraus channels and pure-target fidelity.

use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::linalg::{
    c, embed_operator, partial_trace, re, ComplexMatrix, Layout, LinalgError, SubsystemLabel, C64, TOLERANCE,
};

/// Probabilities below this are treated as an annihilated state.
pub const DEGENERATE_PROBABILITY: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("state norm {0} is not 1")]
    NotNormalized(f64),
    #[error("zero vector cannot be normalized")]
    ZeroVector,
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("trace {0} is not 1")]
    BadTrace(f64),
    #[error("matrix is not positive semidefinite (witness {0:e})")]
    NotPositive(f64),
    #[error("expected a single qubit, got layout {0}")]
    NotAQubit(Layout),
    #[error("layout mismatch: {0} vs {1}")]
    LayoutMismatch(Layout, Layout),
    #[error("projection annihilated the state (probability {0:e})")]
    DegenerateProjection(f64),
    #[error("channel has no Kraus operators")]
    EmptyChannel,
    #[error("Kraus operators do not sum to the identity (residual {0:e})")]
    NotTracePreserving(f64),
}

pub type Result<T, E = QuantumError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> ComplexMatrix {
        pauli(self)
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        })
    }
}

pub fn pauli(which: Pauli) -> ComplexMatrix {
    let m = |v: [f64; 4]| ComplexMatrix::from_real(2, 2, &v).expect("2x2");
    match which {
        Pauli::I => ComplexMatrix::identity(2),
        Pauli::X => m([0.0, 1.0, 1.0, 0.0]),
        Pauli::Z => m([1.0, 0.0, 0.0, -1.0]),
        // sigma_Y = -i sigma_Z sigma_X
        Pauli::Y => pauli(Pauli::Z)
            .scale(c(0.0, -1.0))
            .matmul(&pauli(Pauli::X))
            .expect("2x2"),
    }
}

/// Normalized amplitude vector over a labeled composite system.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    layout: Layout,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(layout: Layout, amplitudes: Vec<C64>) -> Result<Self> {
        check_len(&layout, amplitudes.len())?;
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > TOLERANCE {
            return Err(QuantumError::NotNormalized(norm));
        }
        Ok(Self { layout, amplitudes })
    }

    /// Rescale `amplitudes` to unit norm.
    pub fn normalized(layout: Layout, amplitudes: Vec<C64>) -> Result<Self> {
        check_len(&layout, amplitudes.len())?;
        let n = norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(QuantumError::ZeroVector);
        }
        let amplitudes = amplitudes.into_iter().map(|z| z / n).collect();
        Ok(Self { layout, amplitudes })
    }

    pub fn qubit(label: &str, alpha: C64, beta: C64) -> Result<Self> {
        Self::new(Layout::qubits(&[label])?, vec![alpha, beta])
    }

    /// Computational basis state `|k>` of a single qubit.
    pub fn basis(label: &str, k: usize) -> Result<Self> {
        let mut amps = vec![re(0.0); 2];
        amps[k] = re(1.0);
        Self::new(Layout::qubits(&[label])?, amps)
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn is_qubit(&self) -> bool {
        self.layout.len() == 1 && self.layout.dim() == 2
    }

    pub fn qubit_label(&self) -> Result<&str> {
        if self.is_qubit() {
            Ok(&self.layout.labels()[0].name)
        } else {
            Err(QuantumError::NotAQubit(self.layout.clone()))
        }
    }

    /// Same amplitudes under a different single-subsystem name.
    pub fn relabel(&self, labels: &[&str]) -> Result<Self> {
        if labels.len() != self.layout.len() {
            return Err(QuantumError::LayoutMismatch(
                self.layout.clone(),
                Layout::qubits(labels)?,
            ));
        }
        let layout = Layout::new(
            self.layout
                .labels()
                .iter()
                .zip(labels)
                .map(|(l, n)| SubsystemLabel::new(*n, l.dim))
                .collect(),
        )?;
        Ok(Self {
            layout,
            amplitudes: self.amplitudes.clone(),
        })
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(Self { layout, amplitudes })
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.layout.dims() != other.layout.dims() {
            return Err(QuantumError::LayoutMismatch(self.layout.clone(), other.layout.clone()));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Apply a unitary acting on the whole layout.
    pub fn apply(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::new(self.layout.clone(), u.apply(&self.amplitudes)?)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            layout: self.layout.clone(),
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }
}

fn check_len(layout: &Layout, len: usize) -> Result<()> {
    if layout.dim() != len {
        return Err(LinalgError::DimensionMismatch {
            op: "state",
            left: (len, 1),
            right: (layout.dim(), 1),
        }
        .into());
    }
    Ok(())
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian, unit-trace, positive semidefinite matrix over a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    layout: Layout,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(layout: Layout, matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(layout, matrix, TOLERANCE)
    }

    pub fn with_tolerance(layout: Layout, matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != layout.dim() {
            return Err(LinalgError::DimensionMismatch {
                op: "density matrix",
                left: matrix.dims(),
                right: (layout.dim(), layout.dim()),
            }
            .into());
        }
        let herm = matrix.frobenius_distance(&matrix.dagger())?;
        if herm > tol {
            return Err(QuantumError::NotHermitian(herm));
        }
        let tr = matrix.trace()?;
        if (tr - re(1.0)).norm() > tol {
            return Err(QuantumError::BadTrace(tr.re));
        }
        positivity_witness(&matrix, tol)?;
        Ok(Self { layout, matrix })
    }

    /// `I/d` over the layout.
    pub fn maximally_mixed(layout: Layout) -> Self {
        let d = layout.dim();
        let matrix = ComplexMatrix::identity(d).scale(re(1.0 / d as f64));
        Self { layout, matrix }
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Same matrix with the subsystems renamed in order.
    pub fn relabel(&self, labels: &[&str]) -> Result<Self> {
        let layout = Layout::new(
            self.layout
                .labels()
                .iter()
                .zip(labels)
                .map(|(l, n)| SubsystemLabel::new(*n, l.dim))
                .collect(),
        )?;
        if layout.len() != self.layout.len() {
            return Err(QuantumError::LayoutMismatch(self.layout.clone(), layout));
        }
        Ok(Self {
            layout,
            matrix: self.matrix.clone(),
        })
    }

    pub fn partial_trace(&self, traced: &[&str]) -> Result<Self> {
        let matrix = partial_trace(&self.matrix, &self.layout, traced)?;
        Self::new(self.layout.without(traced)?, matrix)
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            layout: self.layout.concat(&other.layout)?,
            matrix: self.matrix.tensor(&other.matrix),
        })
    }

    /// `U rho U†` for a unitary on the whole layout.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::new(self.layout.clone(), self.matrix.conjugate_by(u)?)
    }

    /// Convex mixture `sum_k w_k rho_k`; weights must sum to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let (_, first) = parts.first().ok_or(QuantumError::ZeroVector)?;
        let mut acc = ComplexMatrix::zeros(first.matrix.rows(), first.matrix.cols());
        for (w, rho) in parts {
            if rho.layout.dims() != first.layout.dims() {
                return Err(QuantumError::LayoutMismatch(first.layout.clone(), rho.layout.clone()));
            }
            acc = acc.add(&rho.matrix.scale(re(*w)))?;
        }
        Self::new(first.layout.clone(), acc)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.matrix.approx_eq(&other.matrix, tol)
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.matrix.frobenius_distance(&other.matrix)?)
    }
}

const SANDWICH_VECTORS: usize = 32;
const MINOR_EXHAUSTIVE_DIM: usize = 8;

/// Positivity check without an eigensolver: every principal minor for small
/// matrices (only 1x1 and 2x2 ones above dimension 8), plus `<v|M|v>` on a
/// fixed family of pseudo-random unit vectors.
pub fn positivity_witness(m: &ComplexMatrix, tol: f64) -> Result<()> {
    let n = m.rows();
    let check = |value: f64| {
        if value < -tol {
            Err(QuantumError::NotPositive(value))
        } else {
            Ok(())
        }
    };
    if n <= MINOR_EXHAUSTIVE_DIM {
        for mask in 1u32..(1 << n) {
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            check(m.principal_submatrix(&idx).determinant()?.re)?;
        }
    } else {
        for i in 0..n {
            check(m[(i, i)].re)?;
            for j in i + 1..n {
                check(m.principal_submatrix(&[i, j]).determinant()?.re)?;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_ed0f_5a4d_71c4);
    for _ in 0..SANDWICH_VECTORS {
        let v: Vec<C64> = (0..n).map(|_| gaussian_complex(&mut rng)).collect();
        let nv = norm(&v);
        let mv = m.apply(&v)?;
        let q: C64 = v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum();
        check(q.re / (nv * nv))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellState {
    PsiMinus,
    PsiPlus,
    PhiMinus,
    PhiPlus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PsiMinus,
        BellState::PsiPlus,
        BellState::PhiMinus,
        BellState::PhiPlus,
    ];

    /// Amplitudes over `|00>, |01>, |10>, |11>`.
    pub fn amplitudes(self) -> [C64; 4] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = match self {
            BellState::PsiMinus => [0.0, s, -s, 0.0],
            BellState::PsiPlus => [0.0, s, s, 0.0],
            BellState::PhiMinus => [s, 0.0, 0.0, -s],
            BellState::PhiPlus => [s, 0.0, 0.0, s],
        };
        v.map(re)
    }
}

impl fmt::Display for BellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellState::PsiMinus => "psi_minus",
            BellState::PsiPlus => "psi_plus",
            BellState::PhiMinus => "phi_minus",
            BellState::PhiPlus => "phi_plus",
        })
    }
}

pub fn bell_state(tag: BellState, labels: (&str, &str)) -> Result<PureState> {
    let layout = Layout::qubits(&[labels.0, labels.1])?;
    PureState::new(layout, tag.amplitudes().to_vec())
}

/// `(alpha, beta) -> (-beta*, alpha*)`.
pub fn orthogonal_qubit(phi: &PureState) -> Result<PureState> {
    phi.qubit_label()?;
    let a = phi.amplitudes();
    PureState::new(phi.layout().clone(), vec![-a[1].conj(), a[0].conj()])
}

pub fn projector_onto(s: &PureState) -> ComplexMatrix {
    ComplexMatrix::outer(s.amplitudes(), s.amplitudes())
}

/// `I - |s><s|`, extended by the identity to every label of `ambient`.
pub fn complement_projector(s: &PureState, ambient: &Layout) -> Result<ComplexMatrix> {
    let d = s.layout().dim();
    let local = ComplexMatrix::identity(d).sub(&projector_onto(s))?;
    Ok(embed_operator(&local, s.layout(), ambient)?)
}

/// `|s><s|` extended by the identity to `ambient`.
pub fn embedded_projector(s: &PureState, ambient: &Layout) -> Result<ComplexMatrix> {
    Ok(embed_operator(&projector_onto(s), s.layout(), ambient)?)
}

/// Returns `(P|s> / ||P|s>||, ||P|s>||^2)`.
pub fn project_and_normalize(s: &PureState, p: &ComplexMatrix) -> Result<(PureState, f64)> {
    let projected = p.apply(s.amplitudes())?;
    let prob = projected.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if prob < DEGENERATE_PROBABILITY {
        return Err(QuantumError::DegenerateProjection(prob));
    }
    let state = PureState::normalized(s.layout().clone(), projected)?;
    Ok((state, prob))
}

/// Mixed-state analogue: `(P rho P / tr, tr(P rho P))`.
pub fn project_density(rho: &DensityMatrix, p: &ComplexMatrix) -> Result<(DensityMatrix, f64)> {
    let m = p.matmul(rho.matrix())?.matmul(p)?;
    let prob = m.trace()?.re;
    if prob < DEGENERATE_PROBABILITY {
        return Err(QuantumError::DegenerateProjection(prob));
    }
    let out = DensityMatrix::new(rho.layout().clone(), m.scale(re(1.0 / prob)))?;
    Ok((out, prob))
}

/// `<target|rho|target>`.
pub fn fidelity(rho: &DensityMatrix, target: &PureState) -> Result<f64> {
    if rho.layout().dims() != target.layout().dims() {
        return Err(QuantumError::LayoutMismatch(
            rho.layout().clone(),
            target.layout().clone(),
        ));
    }
    let t = target.amplitudes();
    let rt = rho.matrix().apply(t)?;
    let f: C64 = t.iter().zip(&rt).map(|(a, b)| a.conj() * b).sum();
    Ok(f.re)
}

/// Completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    kraus: Vec<ComplexMatrix>,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(QuantumError::EmptyChannel)?;
        let dims = first.dims();
        for k in &kraus {
            if !k.is_square() || k.dims() != dims {
                return Err(LinalgError::DimensionMismatch {
                    op: "kraus",
                    left: dims,
                    right: k.dims(),
                }
                .into());
            }
        }
        let ch = Self { kraus };
        let residual = ch.completeness_residual();
        if residual > TOLERANCE {
            return Err(QuantumError::NotTracePreserving(residual));
        }
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            kraus: vec![ComplexMatrix::identity(dim)],
        }
    }

    /// Single-Kraus channel `rho -> U rho U†`.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].rows()
    }

    /// Frobenius distance of `sum_k K_k† K_k` from the identity.
    pub fn completeness_residual(&self) -> f64 {
        let d = self.dim();
        let sum = self.kraus.iter().fold(ComplexMatrix::zeros(d, d), |acc, k| {
            acc.add(&k.dagger().matmul(k).expect("square")).expect("same dims")
        });
        sum.frobenius_distance(&ComplexMatrix::identity(d)).expect("same dims")
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let d = rho.matrix().rows();
        let mut acc = ComplexMatrix::zeros(d, d);
        for k in &self.kraus {
            acc = acc.add(&rho.matrix().conjugate_by(k)?)?;
        }
        DensityMatrix::new(rho.layout().clone(), acc)
    }

    /// `next ∘ self`: apply `self` first, then `next`.
    pub fn then(&self, next: &Self) -> Result<Self> {
        let mut kraus = Vec::with_capacity(self.kraus.len() * next.kraus.len());
        for b in &next.kraus {
            for a in &self.kraus {
                kraus.push(b.matmul(a)?);
            }
        }
        Self::new(kraus)
    }
}

pub fn apply_channel(ch: &QuantumChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    ch.apply(rho)
}

/// The single-qubit maps realized by the protocols.
#[derive(Debug, Clone)]
pub struct StandardChannels {
    /// Every input to `I/2`: `{I, X, Y, Z} / 2`.
    pub depolarizing: QuantumChannel,
    /// `{Z, X, Y} / sqrt(3)`.
    pub unot: QuantumChannel,
    pub sigma_y: QuantumChannel,
    /// `sigma_y ∘ unot`.
    pub transpose: QuantumChannel,
}

pub fn standard_channels() -> StandardChannels {
    let half = re(0.5);
    let third = re(1.0 / 3f64.sqrt());
    let depolarizing = QuantumChannel::new(Pauli::ALL.iter().map(|p| pauli(*p).scale(half)).collect())
        .expect("Pauli twirl is trace preserving");
    let unot = QuantumChannel::new(
        [Pauli::Z, Pauli::X, Pauli::Y]
            .iter()
            .map(|p| pauli(*p).scale(third))
            .collect(),
    )
    .expect("unot is trace preserving");
    let sigma_y = QuantumChannel::unitary(pauli(Pauli::Y)).expect("unitary");
    let transpose = unot.then(&sigma_y).expect("composition of channels");
    StandardChannels {
        depolarizing,
        unot,
        sigma_y,
        transpose,
    }
}

pub(crate) fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random qubit: two independent complex Gaussians, normalized.
pub fn random_qubit<R: Rng + ?Sized>(rng: &mut R, label: &str) -> PureState {
    loop {
        let amps = vec![gaussian_complex(rng), gaussian_complex(rng)];
        if let Ok(s) = PureState::normalized(Layout::qubits(&[label]).expect("label"), amps) {
            return s;
        }
    }
}

/// Haar-random element of SU(2), `[[a, -b*], [b, a*]]`.
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    let q = random_qubit(rng, "u");
    let (a, b) = (q.amplitudes()[0], q.amplitudes()[1]);
    ComplexMatrix::new(2, 2, vec![a, -b.conj(), b, a.conj()]).expect("2x2")
}

/// Haar-random mixed qubit state (partial trace of a random two-qubit pure state).
pub fn random_density_qubit<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    let amps: Vec<C64> = (0..4).map(|_| gaussian_complex(rng)).collect();
    let s = PureState::normalized(Layout::qubits(&["q", "env"]).expect("labels"), amps).expect("nonzero");
    s.to_density().partial_trace(&["env"]).expect("valid layout")
}
