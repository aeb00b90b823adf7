//! Dense complex linear algebra for small composite systems.
//!
//! Everything here is sized for a handful of qubits (matrices up to 16x16),
//! so storage is a flat row-major `Vec` and all operations allocate a fresh
//! result. Composite indices are big-endian in the listed label order: the
//! leftmost subsystem is the most significant digit.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Absolute tolerance on Frobenius distance used for approximate equality.
pub const TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("entry count {len} does not match a {rows}x{cols} matrix")]
    BadShape { rows: usize, cols: usize, len: usize },
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("{op} requires a square matrix, got {rows}x{cols}")]
    NotSquare { op: &'static str, rows: usize, cols: usize },
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),
    #[error("subsystem `{0}` has zero dimension")]
    ZeroDimension(String),
}

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &self.data[r * self.cols + c]
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(LinalgError::BadShape {
                rows,
                cols,
                len: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self, LinalgError> {
        Self::new(rows, cols, data.iter().map(|&x| re(x)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| C64::new(0.0, 0.0))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { re(1.0) } else { re(0.0) })
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |r, c| if r == c { entries[r] } else { re(0.0) })
    }

    /// Column vector holding `amplitudes`.
    pub fn column(amplitudes: &[C64]) -> Self {
        Self::from_fn(amplitudes.len(), 1, |r, _| amplitudes[r])
    }

    /// `|u><v|` for two amplitude vectors.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "matmul",
                left: self.dims(),
                right: other.dims(),
            });
        }
        let mut out = vec![C64::new(0.0, 0.0); self.rows * other.cols];
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out[r * other.cols..(r + 1) * other.cols].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self {
            rows: self.rows,
            cols: other.cols,
            data: out,
        })
    }

    /// Matrix-vector product on raw amplitudes.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>, LinalgError> {
        if self.cols != v.len() {
            return Err(LinalgError::DimensionMismatch {
                op: "apply",
                left: self.dims(),
                right: (v.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    fn zip_with(&self, other: &Self, op: &'static str, f: impl Fn(C64, C64) -> C64) -> Result<Self, LinalgError> {
        if self.dims() != other.dims() {
            return Err(LinalgError::DimensionMismatch {
                op,
                left: self.dims(),
                right: other.dims(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    pub fn trace(&self) -> Result<C64, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                op: "trace",
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn frobenius_distance(&self, other: &Self) -> Result<f64, LinalgError> {
        if self.dims() != other.dims() {
            return Err(LinalgError::DimensionMismatch {
                op: "frobenius_distance",
                left: self.dims(),
                right: other.dims(),
            });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Frobenius-distance equality at `tol`; false on shape mismatch.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.frobenius_distance(other).is_ok_and(|d| d <= tol)
    }

    /// Kronecker product; `self` supplies the most significant index.
    pub fn tensor(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        Self::from_fn(rows, cols, |r, c| {
            self[(r / other.rows, c / other.cols)] * other[(r % other.rows, c % other.cols)]
        })
    }

    /// `U M U†`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self, LinalgError> {
        u.matmul(self)?.matmul(&u.dagger())
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> Result<C64, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                op: "determinant",
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = re(1.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))
                .unwrap_or(col);
            if a[pivot * n + col].norm() == 0.0 {
                return Ok(re(0.0));
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(pivot * n + k, col * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for row in col + 1..n {
                let factor = a[row * n + col] / p;
                for k in col..n {
                    let v = a[col * n + k];
                    a[row * n + k] -= factor * v;
                }
            }
        }
        Ok(det)
    }

    /// Square submatrix on the given index set (rows and columns alike).
    pub fn principal_submatrix(&self, indices: &[usize]) -> Self {
        let k = indices.len();
        Self::from_fn(k, k, |r, c| self[(indices[r], indices[c])])
    }
}

pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.tensor(b)
}

/// A named tensor factor of a composite system.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsystemLabel {
    pub name: String,
    pub dim: usize,
}

impl SubsystemLabel {
    pub fn new(name: impl Into<String>, dim: usize) -> Self {
        Self { name: name.into(), dim }
    }

    pub fn qubit(name: impl Into<String>) -> Self {
        Self::new(name, 2)
    }
}

impl fmt::Display for SubsystemLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Ordered list of subsystems with unique names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Layout(Vec<SubsystemLabel>);

impl Layout {
    pub fn new(labels: Vec<SubsystemLabel>) -> Result<Self, LinalgError> {
        for (i, l) in labels.iter().enumerate() {
            if l.dim == 0 {
                return Err(LinalgError::ZeroDimension(l.name.clone()));
            }
            if labels[..i].iter().any(|o| o.name == l.name) {
                return Err(LinalgError::DuplicateLabel(l.name.clone()));
            }
        }
        Ok(Self(labels))
    }

    /// Layout of qubits with the given names.
    pub fn qubits(names: &[&str]) -> Result<Self, LinalgError> {
        Self::new(names.iter().map(|n| SubsystemLabel::qubit(*n)).collect())
    }

    pub fn labels(&self) -> &[SubsystemLabel] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.0.iter().map(|l| l.dim).product()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.0.iter().map(|l| l.dim).collect()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|l| l.name == name)
    }

    pub fn concat(&self, other: &Self) -> Result<Self, LinalgError> {
        let mut labels = self.0.clone();
        labels.extend(other.0.iter().cloned());
        Self::new(labels)
    }

    /// The layout left after removing `traced`.
    pub fn without(&self, traced: &[&str]) -> Result<Self, LinalgError> {
        for t in traced {
            if self.position(t).is_none() {
                return Err(LinalgError::UnknownLabel((*t).to_string()));
            }
        }
        Ok(Self(
            self.0
                .iter()
                .filter(|l| !traced.contains(&l.name.as_str()))
                .cloned()
                .collect(),
        ))
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|l| l.name.as_str()).collect();
        write!(f, "[{}]", names.join(","))
    }
}

fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
}

fn compose_index(digits: impl Iterator<Item = (usize, usize)>) -> usize {
    digits.fold(0, |acc, (digit, dim)| acc * dim + digit)
}

/// Trace out the subsystems named in `traced`, keeping the remaining ones
/// in their original order.
pub fn partial_trace(m: &ComplexMatrix, layout: &Layout, traced: &[&str]) -> Result<ComplexMatrix, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            op: "partial_trace",
            rows: m.rows,
            cols: m.cols,
        });
    }
    if m.rows != layout.dim() {
        return Err(LinalgError::DimensionMismatch {
            op: "partial_trace",
            left: m.dims(),
            right: (layout.dim(), layout.dim()),
        });
    }
    let kept = layout.without(traced)?;
    let dims = layout.dims();
    let is_traced: Vec<bool> = layout
        .labels()
        .iter()
        .map(|l| traced.contains(&l.name.as_str()))
        .collect();
    let n = m.rows;
    let out_dim = kept.dim();
    let mut out = vec![C64::new(0.0, 0.0); out_dim * out_dim];
    let mut rd = vec![0; dims.len()];
    let mut cd = vec![0; dims.len()];
    let keep_index = |d: &[usize]| {
        compose_index(
            d.iter()
                .zip(&dims)
                .zip(&is_traced)
                .filter(|(_, &t)| !t)
                .map(|((&x, &dim), _)| (x, dim)),
        )
    };
    for r in 0..n {
        digits(r, &dims, &mut rd);
        for col in 0..n {
            digits(col, &dims, &mut cd);
            let matches = rd.iter().zip(&cd).zip(&is_traced).all(|((a, b), &t)| !t || a == b);
            if matches {
                out[keep_index(&rd) * out_dim + keep_index(&cd)] += m.data[r * n + col];
            }
        }
    }
    Ok(ComplexMatrix {
        rows: out_dim,
        cols: out_dim,
        data: out,
    })
}

/// Extend `op`, acting on the subsystems of `op_layout`, to `ambient` by the
/// identity on every other subsystem. The subsystems of `op_layout` may sit
/// anywhere in `ambient`, in any order.
pub fn embed_operator(op: &ComplexMatrix, op_layout: &Layout, ambient: &Layout) -> Result<ComplexMatrix, LinalgError> {
    if !op.is_square() {
        return Err(LinalgError::NotSquare {
            op: "embed_operator",
            rows: op.rows,
            cols: op.cols,
        });
    }
    if op.rows != op_layout.dim() {
        return Err(LinalgError::DimensionMismatch {
            op: "embed_operator",
            left: op.dims(),
            right: (op_layout.dim(), op_layout.dim()),
        });
    }
    let mut slots = Vec::with_capacity(op_layout.len());
    for l in op_layout.labels() {
        let pos = ambient
            .position(&l.name)
            .ok_or_else(|| LinalgError::UnknownLabel(l.name.clone()))?;
        if ambient.labels()[pos].dim != l.dim {
            return Err(LinalgError::DimensionMismatch {
                op: "embed_operator",
                left: (l.dim, l.dim),
                right: (ambient.labels()[pos].dim, ambient.labels()[pos].dim),
            });
        }
        slots.push(pos);
    }
    let dims = ambient.dims();
    let op_dims = op_layout.dims();
    let in_op: Vec<bool> = (0..dims.len()).map(|i| slots.contains(&i)).collect();
    let n = ambient.dim();
    let mut rd = vec![0; dims.len()];
    let mut cd = vec![0; dims.len()];
    let sub = |d: &[usize]| compose_index(slots.iter().zip(&op_dims).map(|(&s, &dim)| (d[s], dim)));
    let mut data = vec![C64::new(0.0, 0.0); n * n];
    for r in 0..n {
        digits(r, &dims, &mut rd);
        for col in 0..n {
            digits(col, &dims, &mut cd);
            let spectator_match = rd.iter().zip(&cd).zip(&in_op).all(|((a, b), &o)| o || a == b);
            if spectator_match {
                data[r * n + col] = op[(sub(&rd), sub(&cd))];
            }
        }
    }
    Ok(ComplexMatrix { rows: n, cols: n, data })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sx() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn sz() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    fn sy() -> ComplexMatrix {
        ComplexMatrix::new(2, 2, vec![re(0.0), c(0.0, -1.0), c(0.0, 1.0), re(0.0)]).unwrap()
    }

    #[test]
    fn identity_tensor_identity() {
        let i4 = ComplexMatrix::identity(2).tensor(&ComplexMatrix::identity(2));
        assert_eq!(i4, ComplexMatrix::identity(4));
    }

    #[test]
    fn z_tensor_x_block_structure() {
        let m = sz().tensor(&sx());
        let neg = sx().scale(re(-1.0));
        for r in 0..2 {
            for col in 0..2 {
                assert_eq!(m[(r, col)], sx()[(r, col)]);
                assert_eq!(m[(r + 2, col + 2)], neg[(r, col)]);
                assert_eq!(m[(r, col + 2)], re(0.0));
                assert_eq!(m[(r + 2, col)], re(0.0));
            }
        }
    }

    #[test]
    fn basis_projector_product() {
        let p0 = ComplexMatrix::diag(&[re(1.0), re(0.0)]);
        let p1 = ComplexMatrix::diag(&[re(0.0), re(1.0)]);
        let m = p0.tensor(&p1);
        assert_eq!(m, ComplexMatrix::diag(&[re(0.0), re(1.0), re(0.0), re(0.0)]));
    }

    #[test]
    fn singlet_marginal_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [re(0.0), re(s), re(-s), re(0.0)];
        let rho = ComplexMatrix::outer(&psi, &psi);
        let layout = Layout::qubits(&["A", "B"]).unwrap();
        let out = partial_trace(&rho, &layout, &["A"]).unwrap();
        assert!(out.approx_eq(&ComplexMatrix::identity(2).scale(re(0.5)), 1e-12));
    }

    #[test]
    fn product_state_factorizes() {
        let rs = ComplexMatrix::new(2, 2, vec![re(0.7), c(0.1, 0.2), c(0.1, -0.2), re(0.3)]).unwrap();
        let ra = ComplexMatrix::from_real(2, 2, &[0.4, 0.0, 0.0, 0.6]).unwrap();
        let layout = Layout::qubits(&["S", "A"]).unwrap();
        let out = partial_trace(&rs.tensor(&ra), &layout, &["A"]).unwrap();
        assert!(out.approx_eq(&rs, 1e-12));
        let out = partial_trace(&rs.tensor(&ra), &layout, &["S"]).unwrap();
        assert!(out.approx_eq(&ra, 1e-12));
    }

    #[test]
    fn partial_trace_rejects_bad_input() {
        let layout = Layout::qubits(&["S", "A"]).unwrap();
        let m = ComplexMatrix::identity(2);
        assert!(matches!(
            partial_trace(&m, &layout, &["A"]),
            Err(LinalgError::DimensionMismatch { .. })
        ));
        let m = ComplexMatrix::identity(4);
        assert_eq!(
            partial_trace(&m, &layout, &["B"]),
            Err(LinalgError::UnknownLabel("B".into()))
        );
    }

    #[test]
    fn small_ops() {
        assert_eq!(sy().dagger(), sy());
        assert_eq!(ComplexMatrix::identity(4).trace().unwrap(), re(4.0));
        assert_eq!(sx().frobenius_distance(&sx()).unwrap(), 0.0);
        assert!(sx().matmul(&ComplexMatrix::identity(4)).is_err());
        assert!(sx().add(&ComplexMatrix::identity(4)).is_err());
        assert!(ComplexMatrix::zeros(2, 3).trace().is_err());
    }

    #[test]
    fn constructor_rejects_bad_data() {
        assert!(matches!(
            ComplexMatrix::new(2, 2, vec![re(0.0); 3]),
            Err(LinalgError::BadShape { .. })
        ));
        assert_eq!(
            ComplexMatrix::new(1, 1, vec![re(f64::NAN)]),
            Err(LinalgError::NonFinite)
        );
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert_eq!(
            Layout::qubits(&["S", "S"]),
            Err(LinalgError::DuplicateLabel("S".into()))
        );
    }

    #[test]
    fn determinant_matches_hand_values() {
        assert!((sy().determinant().unwrap() - re(-1.0)).norm() < 1e-15);
        let m = ComplexMatrix::from_real(3, 3, &[2.0, 0.0, 1.0, 1.0, 3.0, 0.0, 0.0, 1.0, 4.0]).unwrap();
        // 2*(12-0) - 0 + 1*(1-0) = 25
        assert!((m.determinant().unwrap() - re(25.0)).norm() < 1e-12);
    }

    #[test]
    fn embed_matches_kron_and_handles_permutation() {
        let ambient = Layout::qubits(&["S", "A", "B"]).unwrap();
        let pair = Layout::qubits(&["S", "A"]).unwrap();
        let op = sz().tensor(&sx());
        let e = embed_operator(&op, &pair, &ambient).unwrap();
        assert!(e.approx_eq(&op.tensor(&ComplexMatrix::identity(2)), 1e-15));

        // Operator on (B, S): sx on B, sz on S.
        let bs = Layout::qubits(&["B", "S"]).unwrap();
        let e = embed_operator(&sx().tensor(&sz()), &bs, &ambient).unwrap();
        let expected = sz().tensor(&ComplexMatrix::identity(2)).tensor(&sx());
        assert!(e.approx_eq(&expected, 1e-15));
    }
}
