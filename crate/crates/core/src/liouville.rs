//! Liouville-space plumbing: vectorised density matrices, unitary
//! superoperators and the split of the first-order interaction propagator
//! into system and reservoir factors.
//!
//! Conventions, fixed throughout the crate:
//!
//! * `vec(ρ)` is row-major, entry `(i, j)` sits at `i * d + j`, so
//!   `A ρ B ↦ (A ⊗ Bᵀ) vec(ρ)`.
//! * The joint Hilbert index is `s * d_R + r` (system slowest).
//! * "Split order" rearranges joint Liouville space from
//!   `(s, r, s', r')` to `(s, s', r, r')` so that every factorised term is a
//!   plain Kronecker product of a system factor and a reservoir factor.

use nalgebra::DVector;

use crate::error::{dim_err, invalid, Result};
use crate::tensor::{expm, is_hermitian, kron, trace, Matrix, C64, ONE, ZERO};

pub type Vector = DVector<C64>;

/// Tolerance for Hermiticity and trace checks on model inputs.
pub const MODEL_TOL: f64 = 1e-10;

/// One interaction term `A ⊗ B` of `H_int = γ Σ A_i ⊗ B_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupling {
    pub a: Matrix,
    pub b: Matrix,
}

/// A validated system-plus-reservoir problem with `ħ = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    h_s: Matrix,
    h_r: Matrix,
    couplings: Vec<Coupling>,
    gamma: f64,
    rho_s0: Matrix,
    rho_r0: Matrix,
}

fn check_hermitian(name: &str, m: &Matrix, dim: usize) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return dim_err(format!("{name} must be {dim}x{dim}, got {}x{}", m.nrows(), m.ncols()));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return invalid(format!("{name} has non-finite entries"));
    }
    if !is_hermitian(m, MODEL_TOL) {
        return invalid(format!("{name} is not Hermitian within {MODEL_TOL:e}"));
    }
    Ok(())
}

pub(crate) fn check_density(name: &str, rho: &Matrix, dim: usize) -> Result<()> {
    check_hermitian(name, rho, dim)?;
    let tr = trace(rho);
    if (tr.re - 1.0).abs() > MODEL_TOL || tr.im.abs() > MODEL_TOL {
        return invalid(format!("{name} has trace {} (expected 1)", tr.re));
    }
    let eig = crate::tensor::hermitian_eigenvalues(rho)?;
    if eig.first().is_some_and(|&l| l < -MODEL_TOL) {
        return invalid(format!("{name} has a negative eigenvalue {:e}", eig[0]));
    }
    Ok(())
}

impl ModelSpec {
    pub fn new(
        h_s: Matrix,
        h_r: Matrix,
        couplings: Vec<Coupling>,
        gamma: f64,
        rho_s0: Matrix,
        rho_r0: Matrix,
    ) -> Result<Self> {
        let d_s = h_s.nrows();
        let d_r = h_r.nrows();
        if d_s == 0 || d_r == 0 {
            return dim_err("Hilbert dimensions must be positive");
        }
        check_hermitian("H_S", &h_s, d_s)?;
        check_hermitian("H_R", &h_r, d_r)?;
        for (k, c) in couplings.iter().enumerate() {
            check_hermitian(&format!("couplings[{k}].A"), &c.a, d_s)?;
            check_hermitian(&format!("couplings[{k}].B"), &c.b, d_r)?;
        }
        if !gamma.is_finite() || gamma < 0.0 {
            return invalid(format!("gamma must be finite and nonnegative, got {gamma}"));
        }
        check_density("rho_S0", &rho_s0, d_s)?;
        check_density("rho_R0", &rho_r0, d_r)?;
        Ok(Self { h_s, h_r, couplings, gamma, rho_s0, rho_r0 })
    }

    pub fn d_s(&self) -> usize {
        self.h_s.nrows()
    }

    pub fn d_r(&self) -> usize {
        self.h_r.nrows()
    }

    /// Number of interaction terms `n`.
    pub fn n_terms(&self) -> usize {
        self.couplings.len()
    }

    pub fn h_s(&self) -> &Matrix {
        &self.h_s
    }

    pub fn h_r(&self) -> &Matrix {
        &self.h_r
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rho_s0(&self) -> &Matrix {
        &self.rho_s0
    }

    pub fn rho_r0(&self) -> &Matrix {
        &self.rho_r0
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        let mut out = self.clone();
        if !gamma.is_finite() || gamma < 0.0 {
            return invalid(format!("gamma must be finite and nonnegative, got {gamma}"));
        }
        out.gamma = gamma;
        Ok(out)
    }

    pub fn joint_dim(&self) -> usize {
        self.d_s() * self.d_r()
    }

    /// `H_S ⊗ I + I ⊗ H_R`.
    pub fn free_hamiltonian(&self) -> Matrix {
        let is = Matrix::identity(self.d_s(), self.d_s());
        let ir = Matrix::identity(self.d_r(), self.d_r());
        kron(&self.h_s, &ir) + kron(&is, &self.h_r)
    }

    /// `γ Σ A_i ⊗ B_i`.
    pub fn interaction_hamiltonian(&self) -> Matrix {
        let d = self.joint_dim();
        let mut h = Matrix::zeros(d, d);
        for c in &self.couplings {
            h += kron(&c.a, &c.b);
        }
        h.scale(self.gamma)
    }

    pub fn hamiltonian(&self) -> Matrix {
        self.free_hamiltonian() + self.interaction_hamiltonian()
    }

    /// `ρ_S(0) ⊗ ρ_R(0)`.
    pub fn initial_state(&self) -> Matrix {
        kron(&self.rho_s0, &self.rho_r0)
    }
}

/// Uniform time grid of `steps` Trotter steps of length `tau`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    tau: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(tau: f64, steps: usize) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return invalid(format!("tau must be positive and finite, got {tau}"));
        }
        if steps == 0 {
            return invalid("steps must be positive");
        }
        Ok(Self { tau, steps })
    }

    /// Grid covering `total` with step `tau`; `total / tau` must be an integer.
    pub fn from_total(total: f64, tau: f64) -> Result<Self> {
        if !(total > 0.0) || !total.is_finite() {
            return invalid(format!("total time must be positive, got {total}"));
        }
        if !(tau > 0.0) {
            return invalid(format!("tau must be positive, got {tau}"));
        }
        let steps = (total / tau).round();
        if steps < 1.0 || (steps * tau - total).abs() > 1e-9 * total {
            return invalid(format!("total time {total} is not a whole number of steps of {tau}"));
        }
        Self::new(tau, steps as usize)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn total_time(&self) -> f64 {
        self.tau * self.steps as f64
    }

    /// `0, τ, 2τ, …, Kτ`.
    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| k as f64 * self.tau).collect()
    }
}

pub fn vectorize(rho: &Matrix) -> Vector {
    let (rows, cols) = rho.shape();
    Vector::from_iterator(rows * cols, (0..rows).flat_map(|i| (0..cols).map(move |j| rho[(i, j)])))
}

pub fn devectorize(v: &Vector) -> Result<Matrix> {
    let d = (v.len() as f64).sqrt().round() as usize;
    if d * d != v.len() || d == 0 {
        return dim_err(format!("length {} is not a perfect square", v.len()));
    }
    Ok(Matrix::from_fn(d, d, |i, j| v[i * d + j]))
}

/// `vec(I_d)`, the trace functional: `⟨tr| vec(ρ) = tr ρ`.
pub fn trace_functional(d: usize) -> Vector {
    vectorize(&Matrix::identity(d, d))
}

/// A linear map on vectorised `d × d` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOperator {
    dim: usize,
    matrix: Matrix,
}

impl SuperOperator {
    pub fn new(dim: usize, matrix: Matrix) -> Result<Self> {
        if matrix.nrows() != dim * dim || matrix.ncols() != dim * dim {
            return dim_err(format!("superoperator on dimension {dim} must be {0}x{0}", dim * dim));
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, matrix: Matrix::identity(dim * dim, dim * dim) }
    }

    /// `ρ ↦ U ρ U†`, i.e. `U ⊗ conj(U)`.
    pub fn conjugation(u: &Matrix) -> Self {
        Self { dim: u.nrows(), matrix: kron(u, &u.map(|z| z.conj())) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, rho: &Matrix) -> Result<Matrix> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return dim_err("state dimension does not match superoperator");
        }
        devectorize(&(&self.matrix * vectorize(rho)))
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn after(&self, inner: &SuperOperator) -> Result<Self> {
        if self.dim != inner.dim {
            return dim_err("composing superoperators of different dimension");
        }
        Ok(Self { dim: self.dim, matrix: &self.matrix * &inner.matrix })
    }

    /// Largest deviation of `⟨tr| M` from `⟨tr|`.
    pub fn trace_defect(&self) -> f64 {
        let t = trace_functional(self.dim);
        let row = t.transpose() * &self.matrix;
        row.iter().zip(t.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// `e^{-iτH}` for a Hermitian `H`.
pub(crate) fn unitary_step(h: &Matrix, tau: f64) -> Result<Matrix> {
    expm(&h.map(|z| z * C64::new(0.0, -tau)))
}

/// Free propagators `(Φ0_S, Φ0_R)` for one step of length `tau`.
pub fn free_propagator(model: &ModelSpec, tau: f64) -> Result<(SuperOperator, SuperOperator)> {
    if !(tau >= 0.0) {
        return invalid(format!("tau must be nonnegative, got {tau}"));
    }
    let us = unitary_step(model.h_s(), tau)?;
    let ur = unitary_step(model.h_r(), tau)?;
    Ok((SuperOperator::conjugation(&us), SuperOperator::conjugation(&ur)))
}

/// `Φ_int(τ) = e^{-iτH_int} ⊗ e^{iτH_int*}` on the joint space, standard order.
pub fn interaction_exact(model: &ModelSpec, tau: f64) -> Result<SuperOperator> {
    if !(tau >= 0.0) {
        return invalid(format!("tau must be nonnegative, got {tau}"));
    }
    Ok(SuperOperator::conjugation(&unitary_step(&model.interaction_hamiltonian(), tau)?))
}

/// `I - iτ L_int` on the joint space, standard order.
pub fn interaction_first_order(model: &ModelSpec, tau: f64) -> SuperOperator {
    let d = model.joint_dim();
    let h = model.interaction_hamiltonian();
    let id = Matrix::identity(d, d);
    let minus_i_tau = C64::new(0.0, -tau);
    let m = Matrix::identity(d * d, d * d) + kron(&h, &id).map(|z| z * minus_i_tau)
        - kron(&id, &h.map(|z| z.conj())).map(|z| z * minus_i_tau);
    SuperOperator { dim: d, matrix: m }
}

/// For each standard-order joint Liouville index, its split-order position.
pub fn split_order_map(d_s: usize, d_r: usize) -> Vec<usize> {
    let d = d_s * d_r;
    let mut map = vec![0; d * d];
    for s in 0..d_s {
        for r in 0..d_r {
            for sp in 0..d_s {
                for rp in 0..d_r {
                    let standard = (s * d_r + r) * d + sp * d_r + rp;
                    let split = (s * d_s + sp) * d_r * d_r + r * d_r + rp;
                    map[standard] = split;
                }
            }
        }
    }
    map
}

/// Re-indexes a joint superoperator matrix from standard to split order.
pub fn to_split_order(m: &Matrix, d_s: usize, d_r: usize) -> Result<Matrix> {
    let map = split_order_map(d_s, d_r);
    if m.nrows() != map.len() || m.ncols() != map.len() {
        return dim_err("matrix does not act on the joint Liouville space");
    }
    let mut out = Matrix::zeros(map.len(), map.len());
    for (i, &pi) in map.iter().enumerate() {
        for (j, &pj) in map.iter().enumerate() {
            out[(pi, pj)] = m[(i, j)];
        }
    }
    Ok(out)
}

/// System factor and reservoir factor of one term of the split interaction.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorPair {
    /// Acts on system Liouville space (`d_S²`).
    pub system: Matrix,
    /// Acts on reservoir Liouville space (`d_R²`).
    pub reservoir: Matrix,
}

/// The `2n + 1` pairs whose Kronecker products sum to `I - iτL_int`.
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionFactorization {
    pairs: Vec<FactorPair>,
    tau: f64,
    gamma: f64,
}

impl InteractionFactorization {
    pub fn pairs(&self) -> &[FactorPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `Σ_i 𝒜_i ⊗ ℬ_i` in split order.
    pub fn sum(&self) -> Matrix {
        let mut it = self.pairs.iter().map(|p| kron(&p.system, &p.reservoir));
        let first = it.next().expect("factorisation always has the identity pair");
        it.fold(first, |acc, m| acc + m)
    }
}

/// System-side factors `𝒜_i` for `n` couplings at step `tau`.
pub(crate) fn system_factors(model: &ModelSpec, tau: f64) -> Vec<Matrix> {
    let d = model.d_s();
    let id = Matrix::identity(d, d);
    let w = C64::new((model.gamma() * tau).sqrt(), 0.0);
    let mut out = vec![Matrix::identity(d * d, d * d)];
    out.extend(model.couplings().iter().map(|c| kron(&c.a, &id).map(|z| z * w)));
    out.extend(model.couplings().iter().map(|c| kron(&id, &c.a.map(|z| z.conj())).map(|z| z * w)));
    out
}

/// Reservoir-side factors `ℬ_i` for `n` couplings at step `tau`.
pub(crate) fn reservoir_factors(model: &ModelSpec, tau: f64) -> Vec<Matrix> {
    let d = model.d_r();
    let id = Matrix::identity(d, d);
    let w = (model.gamma() * tau).sqrt();
    let minus = C64::new(0.0, -w);
    let plus = C64::new(0.0, w);
    let mut out = vec![Matrix::identity(d * d, d * d)];
    out.extend(model.couplings().iter().map(|c| kron(&c.b, &id).map(|z| z * minus)));
    out.extend(model.couplings().iter().map(|c| kron(&id, &c.b.map(|z| z.conj())).map(|z| z * plus)));
    out
}

pub fn interaction_factorize(model: &ModelSpec, tau: f64) -> Result<InteractionFactorization> {
    if !(tau > 0.0) || !tau.is_finite() {
        return invalid(format!("tau must be positive, got {tau}"));
    }
    let pairs = system_factors(model, tau)
        .into_iter()
        .zip(reservoir_factors(model, tau))
        .map(|(system, reservoir)| FactorPair { system, reservoir })
        .collect();
    Ok(InteractionFactorization { pairs, tau, gamma: model.gamma() })
}

/// Pure state `|k⟩⟨k|` of dimension `d`.
pub fn basis_projector(d: usize, k: usize) -> Matrix {
    Matrix::from_fn(d, d, |i, j| if i == k && j == k { ONE } else { ZERO })
}
