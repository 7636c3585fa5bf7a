//! Dense complex multiway arrays and the small amount of linear algebra the
//! reservoir-network code needs: contraction, truncated SVD, matrix
//! exponential and spectral entropies.
//!
//! [`Tensor`] stores entries in row-major logical order. Rank-2 work is done
//! on [`Matrix`] (a column-major `nalgebra` matrix); the conversions between
//! the two are explicit.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{dim_err, invalid, Error, Result};

pub type C64 = Complex64;
pub type Matrix = DMatrix<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Eigenvalues above this (negative) threshold are clipped to zero before an
/// entropy is taken; anything more negative is rejected.
pub const EIGEN_CLIP: f64 = -1e-10;

/// Trace tolerance accepted by [`von_neumann_entropy`].
pub const TRACE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<C64>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<C64>) -> Result<Self> {
        if shape.contains(&0) {
            return dim_err(format!("tensor extents must be positive, got {shape:?}"));
        }
        let len: usize = shape.iter().product();
        if len != data.len() {
            return dim_err(format!("shape {shape:?} needs {len} entries, got {}", data.len()));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("tensor entries must be finite");
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: &[usize]) -> Self {
        let len = shape.iter().product();
        Self { shape: shape.to_vec(), data: vec![ZERO; len] }
    }

    pub fn scalar(value: C64) -> Self {
        Self { shape: Vec::new(), data: vec![value] }
    }

    pub fn vector(data: Vec<C64>) -> Result<Self> {
        Self::new(vec![data.len()], data)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_matrix(&Matrix::identity(n, n))
    }

    pub fn from_matrix(m: &Matrix) -> Self {
        let (rows, cols) = m.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(m[(i, j)]);
            }
        }
        Self { shape: vec![rows, cols], data }
    }

    pub fn to_matrix(&self) -> Result<Matrix> {
        if self.shape.len() != 2 {
            return dim_err(format!("expected a rank-2 tensor, got shape {:?}", self.shape));
        }
        Ok(Matrix::from_row_slice(self.shape[0], self.shape[1], &self.data))
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    fn strides(&self) -> Vec<usize> {
        strides_of(&self.shape)
    }

    pub fn get(&self, index: &[usize]) -> Option<C64> {
        if index.len() != self.shape.len() || index.iter().zip(&self.shape).any(|(i, e)| i >= e) {
            return None;
        }
        let offset: usize = index.iter().zip(self.strides()).map(|(i, s)| i * s).sum();
        Some(self.data[offset])
    }

    pub fn reshape(&self, shape: &[usize]) -> Result<Self> {
        let len: usize = shape.iter().product();
        if len != self.data.len() || shape.contains(&0) {
            return dim_err(format!("cannot reshape {:?} into {shape:?}", self.shape));
        }
        Ok(Self { shape: shape.to_vec(), data: self.data.clone() })
    }

    /// Reorders axes so that new axis `k` is old axis `axes[k]`.
    pub fn permute(&self, axes: &[usize]) -> Result<Self> {
        let rank = self.shape.len();
        let mut seen = vec![false; rank];
        if axes.len() != rank {
            return dim_err(format!("permutation {axes:?} does not match rank {rank}"));
        }
        for &a in axes {
            if a >= rank || seen[a] {
                return dim_err(format!("invalid permutation {axes:?}"));
            }
            seen[a] = true;
        }
        let new_shape: Vec<usize> = axes.iter().map(|&a| self.shape[a]).collect();
        let old_strides = self.strides();
        let gather: Vec<usize> = axes.iter().map(|&a| old_strides[a]).collect();
        let mut data = Vec::with_capacity(self.data.len());
        let mut index = vec![0usize; rank];
        for _ in 0..self.data.len() {
            let offset: usize = index.iter().zip(&gather).map(|(i, s)| i * s).sum();
            data.push(self.data[offset]);
            for ax in (0..rank).rev() {
                index[ax] += 1;
                if index[ax] < new_shape[ax] {
                    break;
                }
                index[ax] = 0;
            }
        }
        Ok(Self { shape: new_shape, data })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Tensor) -> Result<f64> {
        if self.shape != other.shape {
            return dim_err(format!("shape mismatch {:?} vs {:?}", self.shape, other.shape));
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }
}

pub(crate) fn strides_of(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * shape[k + 1];
    }
    strides
}

/// Sums over each `(axis_of_a, axis_of_b)` pair. The result carries the
/// unpaired axes of `a` followed by the unpaired axes of `b`, in order.
pub fn contract(a: &Tensor, b: &Tensor, axis_pairs: &[(usize, usize)]) -> Result<Tensor> {
    let mut a_paired = vec![false; a.rank()];
    let mut b_paired = vec![false; b.rank()];
    for &(ia, ib) in axis_pairs {
        if ia >= a.rank() || ib >= b.rank() {
            return dim_err(format!("axis pair ({ia}, {ib}) out of range"));
        }
        if a_paired[ia] || b_paired[ib] {
            return dim_err(format!("axis pair ({ia}, {ib}) repeats an axis"));
        }
        if a.shape[ia] != b.shape[ib] {
            return dim_err(format!("paired extents differ: a[{ia}]={} vs b[{ib}]={}", a.shape[ia], b.shape[ib]));
        }
        a_paired[ia] = true;
        b_paired[ib] = true;
    }
    let a_free: Vec<usize> = (0..a.rank()).filter(|&k| !a_paired[k]).collect();
    let b_free: Vec<usize> = (0..b.rank()).filter(|&k| !b_paired[k]).collect();

    let mut a_order = a_free.clone();
    a_order.extend(axis_pairs.iter().map(|p| p.0));
    let mut b_order: Vec<usize> = axis_pairs.iter().map(|p| p.1).collect();
    b_order.extend(b_free.iter().copied());

    let free_a: usize = a_free.iter().map(|&k| a.shape[k]).product();
    let free_b: usize = b_free.iter().map(|&k| b.shape[k]).product();
    let inner: usize = axis_pairs.iter().map(|p| a.shape[p.0]).product();

    let ap = a.permute(&a_order)?;
    let bp = b.permute(&b_order)?;
    let am = Matrix::from_row_slice(free_a, inner, &ap.data);
    let bm = Matrix::from_row_slice(inner, free_b, &bp.data);
    let prod = am * bm;

    let mut shape: Vec<usize> = a_free.iter().map(|&k| a.shape[k]).collect();
    shape.extend(b_free.iter().map(|&k| b.shape[k]));
    let mut data = Vec::with_capacity(free_a * free_b);
    for i in 0..free_a {
        for j in 0..free_b {
            data.push(prod[(i, j)]);
        }
    }
    Ok(Tensor { shape, data })
}

/// Singular values retained by a truncation, plus the squared weight dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtSpectrum {
    values: Vec<f64>,
    discarded_weight: f64,
}

impl SchmidtSpectrum {
    pub fn new(values: Vec<f64>, discarded_weight: f64) -> Result<Self> {
        if values.iter().any(|&v| !(v >= 0.0)) || !(discarded_weight >= 0.0) {
            return invalid("Schmidt values and discarded weight must be nonnegative");
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return invalid("Schmidt values must be sorted nonincreasing");
        }
        Ok(Self { values, discarded_weight })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn discarded_weight(&self) -> f64 {
        self.discarded_weight
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    pub fn retained_weight(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Entropy (nats) of the renormalised squared values.
    pub fn entropy(&self) -> f64 {
        let total = self.retained_weight();
        if total <= 0.0 {
            return 0.0;
        }
        let probs: Vec<f64> = self.values.iter().map(|v| v * v / total).collect();
        shannon_entropy(&probs)
    }
}

/// `-Σ p ln p` over the strictly positive entries.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum()
}

/// Truncated SVD `m ≈ U diag(s) V`, where `V` has orthonormal rows.
///
/// Keeps the smallest rank whose relative discarded squared weight is at most
/// `cutoff²`, then caps it at `max_rank`. At least one value is always kept.
/// Degenerate singular values keep the order produced by the decomposition
/// after a stable descending sort, so a cut inside a degenerate cluster is
/// deterministic.
pub fn truncated_svd(m: &Matrix, cutoff: f64, max_rank: Option<usize>) -> Result<(Matrix, SchmidtSpectrum, Matrix)> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return dim_err("cannot decompose an empty matrix");
    }
    if !(cutoff >= 0.0) {
        return invalid(format!("cutoff must be nonnegative, got {cutoff}"));
    }
    if max_rank == Some(0) {
        return invalid("max_rank must be positive");
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let vt = svd.v_t.expect("right singular vectors requested");
    let s = svd.singular_values;

    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap_or(std::cmp::Ordering::Equal));
    let sorted: Vec<f64> = order.iter().map(|&k| s[k]).collect();

    let total: f64 = sorted.iter().map(|v| v * v).sum();
    // tail[r] = squared weight of values r.. end
    let mut tail = vec![0.0; sorted.len() + 1];
    for r in (0..sorted.len()).rev() {
        tail[r] = tail[r + 1] + sorted[r] * sorted[r];
    }
    let threshold = cutoff * cutoff * total;
    let mut keep = (1..=sorted.len()).find(|&r| tail[r] <= threshold).unwrap_or(sorted.len());
    if let Some(cap) = max_rank {
        keep = keep.min(cap);
    }
    let keep = keep.max(1);

    let u_kept = Matrix::from_fn(m.nrows(), keep, |i, j| u[(i, order[j])]);
    let v_kept = Matrix::from_fn(keep, m.ncols(), |i, j| vt[(order[i], j)]);
    let spectrum = SchmidtSpectrum { values: sorted[..keep].to_vec(), discarded_weight: tail[keep] };
    Ok((u_kept, spectrum, v_kept))
}

/// [`truncated_svd`] on a rank-2 tensor; `max_rank = None` is unbounded.
pub fn svd_truncate(m: &Tensor, cutoff: f64, max_rank: Option<usize>) -> Result<(Tensor, SchmidtSpectrum, Tensor)> {
    let (u, s, v) = truncated_svd(&m.to_matrix()?, cutoff, max_rank)?;
    Ok((Tensor::from_matrix(&u), s, Tensor::from_matrix(&v)))
}

/// Padé scaling-and-squaring exponential of a square matrix.
pub fn expm(m: &Matrix) -> Result<Matrix> {
    if !m.is_square() {
        return dim_err(format!("exponential needs a square matrix, got {:?}", m.shape()));
    }
    Ok(m.exp())
}

pub fn matrix_exponential(m: &Tensor) -> Result<Tensor> {
    Ok(Tensor::from_matrix(&expm(&m.to_matrix()?)?))
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

pub fn is_hermitian(m: &Matrix, tol: f64) -> bool {
    m.is_square() && (m - m.adjoint()).iter().all(|z| z.norm() <= tol)
}

pub fn trace(m: &Matrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &Matrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return dim_err(format!("eigenvalues need a square matrix, got {:?}", m.shape()));
    }
    let h = (m + m.adjoint()).scale(0.5);
    let mut vals: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(vals)
}

/// Von Neumann entropy in nats of a density matrix.
pub fn density_entropy(rho: &Matrix) -> Result<f64> {
    if !rho.is_square() {
        return dim_err("density matrix must be square");
    }
    if !is_hermitian(rho, 1e-8) {
        return invalid("density matrix is not Hermitian");
    }
    let tr = trace(rho);
    if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
        return invalid(format!("density matrix trace {tr} deviates from 1"));
    }
    let eig = hermitian_eigenvalues(rho)?;
    if let Some(&low) = eig.first() {
        if low < EIGEN_CLIP {
            return invalid(format!("density matrix has eigenvalue {low:e}"));
        }
    }
    let clipped: Vec<f64> = eig.into_iter().map(|l| l.max(0.0)).collect();
    Ok(shannon_entropy(&clipped))
}

pub fn von_neumann_entropy(rho: &Tensor) -> Result<f64> {
    density_entropy(&rho.to_matrix()?)
}

/// Half the trace norm of `a - b`, both Hermitian.
pub fn trace_distance(a: &Matrix, b: &Matrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension(format!("trace distance of {:?} and {:?}", a.shape(), b.shape())));
    }
    let eig = hermitian_eigenvalues(&(a - b))?;
    Ok(0.5 * eig.iter().map(|l| l.abs()).sum::<f64>())
}
