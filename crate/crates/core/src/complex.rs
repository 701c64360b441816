//! Dense complex linear algebra at the small dimensions this crate works in
//! (d = 2^n with n <= 8).

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

pub type C64 = Complex64;

/// Largest Hilbert-space dimension accepted by the samplers (n <= 8 qubits).
pub const MAX_DIM: usize = 256;

/// Tolerance for algebraic identities (normalization, unitarity, orthogonality).
pub const ALGEBRAIC_TOL: f64 = 1e-10;

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "matrix entries",
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        Self::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let cols = columns.len();
        if cols == 0 {
            return Err(Error::EmptyInput("matrix columns"));
        }
        let rows = columns[0].len();
        for c in columns {
            if c.len() != rows {
                return Err(Error::DimensionMismatch {
                    context: "column length",
                    expected: rows,
                    found: c.len(),
                });
            }
        }
        Ok(Self::from_fn(rows, cols, |i, j| columns[j][i]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "matmul inner dimension",
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in row.iter().enumerate() {
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                context: "matvec",
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &CMatrix, f: impl Fn(C64, C64) -> C64) -> Result<CMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context: "elementwise shape",
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> Result<f64> {
        Ok(self
            .sub(other)?
            .data
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }

    /// max-entry |U U† - I|.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let prod = self
            .matmul(&self.adjoint())
            .expect("square matrix times its adjoint");
        prod.max_abs_diff(&CMatrix::identity(self.rows))
            .expect("identity of matching size")
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() <= ALGEBRAIC_TOL
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square()
            && self
                .max_abs_diff(&self.adjoint())
                .map(|e| e <= tol)
                .unwrap_or(false)
    }

    /// Thin Householder QR of a `rows x cols` matrix with `rows >= cols`.
    ///
    /// Returns `(Q, R)` with `Q` having orthonormal columns (`rows x cols`) and
    /// `R` upper triangular (`cols x cols`). The diagonal of `R` is not
    /// normalized; see [`crate::haar::haar_unitary`] for the phase fix.
    pub fn qr_thin(&self) -> Result<(CMatrix, CMatrix)> {
        let (m, n) = (self.rows, self.cols);
        if m < n {
            return Err(invalid("qr", format!("need rows >= cols, got {m}x{n}")));
        }
        let mut a = self.clone();
        let mut reflectors: Vec<Vec<C64>> = Vec::with_capacity(n);
        for k in 0..n {
            let x: Vec<C64> = (k..m).map(|i| a[(i, k)]).collect();
            let norm_x = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let mut v = x;
            if norm_x == 0.0 {
                reflectors.push(Vec::new());
                continue;
            }
            let phase = if v[0].norm() == 0.0 {
                C64::new(1.0, 0.0)
            } else {
                v[0] / v[0].norm()
            };
            // alpha = -phase * |x| avoids cancellation in v[0]
            v[0] += phase * norm_x;
            let norm_v = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in v.iter_mut() {
                *z /= norm_v;
            }
            for j in k..n {
                let dot: C64 = v
                    .iter()
                    .enumerate()
                    .map(|(t, vi)| vi.conj() * a[(k + t, j)])
                    .sum();
                for (t, vi) in v.iter().enumerate() {
                    a[(k + t, j)] -= 2.0 * vi * dot;
                }
            }
            reflectors.push(v);
        }
        let r = CMatrix::from_fn(n, n, |i, j| if i <= j { a[(i, j)] } else { C64::new(0.0, 0.0) });

        let mut q = CMatrix::from_fn(m, n, |i, j| {
            if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        for k in (0..n).rev() {
            let v = &reflectors[k];
            if v.is_empty() {
                continue;
            }
            for j in 0..n {
                let dot: C64 = v
                    .iter()
                    .enumerate()
                    .map(|(t, vi)| vi.conj() * q[(k + t, j)])
                    .sum();
                for (t, vi) in v.iter().enumerate() {
                    q[(k + t, j)] -= 2.0 * vi * dot;
                }
            }
        }
        Ok((q, r))
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

pub fn matmul(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    a.matmul(b)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (br, bc) = (b.rows, b.cols);
    CMatrix::from_fn(a.rows * br, a.cols * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Unit-norm complex vector. Also stands for the rank-1 projector `|ψ⟩⟨ψ|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<C64>,
}

impl PureState {
    /// Wraps amplitudes that are already normalized within [`ALGEBRAIC_TOL`].
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::EmptyInput("state amplitudes"));
        }
        let norm = l2_norm(&amps);
        let deviation = (norm - 1.0).abs();
        if !(deviation <= ALGEBRAIC_TOL) {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(PureState { amps })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::EmptyInput("state amplitudes"));
        }
        let norm = l2_norm(&amps);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(invalid("amplitudes", "cannot normalize a zero vector"));
        }
        for z in amps.iter_mut() {
            *z /= norm;
        }
        Ok(PureState { amps })
    }

    /// Computational basis vector `|e_k⟩`.
    pub fn basis(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(invalid("k", format!("basis index {k} out of range for d = {d}")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); d];
        amps[k] = C64::new(1.0, 0.0);
        Ok(PureState { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(inner_unchecked(&self.amps, &other.amps))
    }

    /// `|⟨self|target⟩|²` without a dimension check; callers guarantee it.
    pub(crate) fn overlap_sq_unchecked(&self, other: &PureState) -> f64 {
        inner_unchecked(&self.amps, &other.amps).norm_sqr()
    }

    pub fn projector(&self) -> CMatrix {
        let d = self.dim();
        CMatrix::from_fn(d, d, |i, j| self.amps[i] * self.amps[j].conj())
    }

    pub fn apply(&self, u: &CMatrix) -> Result<PureState> {
        let amps = u.matvec(&self.amps)?;
        PureState::normalized(amps)
    }

    /// ⟨ψ|A|ψ⟩ = Tr(|ψ⟩⟨ψ| A).
    pub fn expectation(&self, a: &CMatrix) -> Result<C64> {
        let av = a.matvec(&self.amps)?;
        Ok(inner_unchecked(&self.amps, &av))
    }
}

fn l2_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn inner_unchecked(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn check_same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            context: "state dimension",
            expected,
            found,
        });
    }
    Ok(())
}

/// `|⟨a|b⟩|²`, clamped into [0, 1].
pub fn fidelity_pure(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().clamp(0.0, 1.0))
}

/// Trace norm of `|a⟩⟨a| - |b⟩⟨b|`, equal to `2 sqrt(1 - F)` for pure states.
pub fn trace_distance_pure(a: &PureState, b: &PureState) -> Result<f64> {
    let f = fidelity_pure(a, b)?;
    Ok(2.0 * (1.0 - f).max(0.0).sqrt())
}

/// Reduced density matrix on the system factor of a `d·d`-dimensional state.
///
/// Composite amplitudes are indexed `x * d + r` (system ⊗ reference).
pub fn partial_trace_reference(state: &PureState, d: usize) -> Result<CMatrix> {
    let composite = state.dim();
    if d == 0 || d.checked_mul(d) != Some(composite) {
        return Err(Error::NonSquareComposite { composite, d });
    }
    let psi = state.amplitudes();
    Ok(CMatrix::from_fn(d, d, |i, j| {
        let row_i = &psi[i * d..(i + 1) * d];
        let row_j = &psi[j * d..(j + 1) * d];
        row_i.iter().zip(row_j).map(|(a, b)| a * b.conj()).sum()
    }))
}
