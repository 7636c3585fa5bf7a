//! The reservoir network: an MPS over the interaction index of each Trotter
//! step, carrying everything the reservoir does to the system.
//!
//! One Trotter step of the joint state is `Σ_i (Φ0_S 𝒜_i) ⊗ (Φ0_R ℬ_i)`.
//! Unrolling `K` steps and closing the reservoir with the trace functional
//! gives
//!
//! ```text
//! ρ_S(T) = Σ_{i_1..i_K} W(i_1..i_K) · Φ0_S 𝒜_{i_K} ⋯ Φ0_S 𝒜_{i_1} ρ_S(0)
//! W(i)   = l · S_{i_1} ⋯ S_{i_K} · r
//! ```
//!
//! where `S_i = (Φ0_R ℬ_i)ᵀ` acts on row vectors, `l = vec(ρ_R)` and
//! `r = vec(I)`. The amplitudes `W` are stored as an MPS, one core per step.
//! The reservoir closure at an intermediate time `t_k` is the same chain with
//! all later indices pinned to 0 (`Φ0_R ℬ_0` preserves the trace), so the
//! network alone determines the whole trajectory.

mod compress;
mod reduced;
mod transform;

pub use compress::{compress, EntropyReport, TruncationPolicy};
pub use reduced::{mutual_information, rpdm, rpdm_sites};
pub use transform::{coarse_grain, tail_cut, two_point_correlation};

use crate::error::{dim_err, usage, Error, Result};
use crate::limits::{checked_pow, enumeration_budget, DEFAULT_MEMORY_BUDGET};
use crate::liouville::{
    devectorize, free_propagator, reservoir_factors, system_factors, trace_functional, vectorize, ModelSpec, TimeGrid,
};
use crate::tensor::{trace_distance, Matrix, Tensor, C64, ONE};

/// Reduced system states on a time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<Matrix>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<Matrix>) -> Self {
        assert_eq!(times.len(), states.len(), "one state per time");
        Self { times, states }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Matrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn final_state(&self) -> &Matrix {
        self.states.last().expect("trajectory is never empty")
    }

    /// Per-time trace distances against `other` (same grid).
    pub fn trace_distances(&self, other: &Trajectory) -> Result<Vec<f64>> {
        if self.len() != other.len() {
            return dim_err(format!("trajectories of length {} and {}", self.len(), other.len()));
        }
        self.states.iter().zip(&other.states).map(|(a, b)| trace_distance(a, b)).collect()
    }

    pub fn max_trace_distance(&self, other: &Trajectory) -> Result<f64> {
        Ok(self.trace_distances(other)?.into_iter().fold(0.0, f64::max))
    }
}

/// One MPS core, stored as its `2n + 1` physical slices (`D_k × D_{k+1}`).
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Core {
    pub(crate) slices: Vec<Matrix>,
}

impl Core {
    fn left_dim(&self) -> usize {
        self.slices[0].nrows()
    }

    fn right_dim(&self) -> usize {
        self.slices[0].ncols()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReservoirNetwork {
    pub(crate) cores: Vec<Core>,
    pub(crate) left: Matrix,
    pub(crate) right: Matrix,
    pub(crate) tau: f64,
    pub(crate) gamma: f64,
    pub(crate) n_terms: usize,
    pub(crate) d_r: usize,
    /// Steps before the first core during which the system evolves freely
    /// (nonzero only after a tail cut).
    pub(crate) leading_free_steps: usize,
}

impl ReservoirNetwork {
    /// Number of sites `K`.
    pub fn len(&self) -> usize {
        self.cores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cores.is_empty()
    }

    pub fn physical_dim(&self) -> usize {
        2 * self.n_terms + 1
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn reservoir_dim(&self) -> usize {
        self.d_r
    }

    pub fn leading_free_steps(&self) -> usize {
        self.leading_free_steps
    }

    /// Time steps the network covers, including freely evolved leading steps.
    pub fn total_steps(&self) -> usize {
        self.leading_free_steps + self.cores.len()
    }

    /// Bond extents `D_0 … D_K`.
    pub fn bond_dims(&self) -> Vec<usize> {
        let mut dims: Vec<usize> = self.cores.iter().map(Core::left_dim).collect();
        dims.push(self.cores.last().map_or(self.left.ncols(), Core::right_dim));
        dims
    }

    pub fn max_bond_dim(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// Core `k` as a `(D_k, 2n+1, D_{k+1})` tensor.
    pub fn core_tensor(&self, k: usize) -> Tensor {
        let core = &self.cores[k];
        let (dl, p, dr) = (core.left_dim(), core.slices.len(), core.right_dim());
        let mut data = Vec::with_capacity(dl * p * dr);
        for a in 0..dl {
            for slice in &core.slices {
                for b in 0..dr {
                    data.push(slice[(a, b)]);
                }
            }
        }
        Tensor::new(vec![dl, p, dr], data).expect("core extents are consistent")
    }

    /// Physical slice `index` of core `site` (`D_k × D_{k+1}`).
    pub fn slice(&self, site: usize, index: usize) -> &Matrix {
        &self.cores[site].slices[index]
    }

    pub fn left_boundary(&self) -> Tensor {
        Tensor::from_matrix(&self.left).reshape(&[self.left.ncols()]).expect("row vector")
    }

    pub fn right_boundary(&self) -> Tensor {
        Tensor::from_matrix(&self.right).reshape(&[self.right.nrows()]).expect("column vector")
    }

    fn check_string(&self, string: &[usize]) -> Result<()> {
        if string.len() != self.len() {
            return usage(format!("index string has length {}, network has {} sites", string.len(), self.len()));
        }
        if let Some(&bad) = string.iter().find(|&&i| i >= self.physical_dim()) {
            return usage(format!("index {bad} outside [0, {}]", self.physical_dim() - 1));
        }
        Ok(())
    }

    /// Open branch vector `l · S_{i_1} ⋯ S_{i_K}` (row vector over the last bond).
    pub fn branch_vector(&self, string: &[usize]) -> Result<Matrix> {
        self.check_string(string)?;
        Ok(string.iter().zip(&self.cores).fold(self.left.clone(), |env, (&i, core)| env * &core.slices[i]))
    }

    /// Amplitude `W(i_1..i_K)`.
    pub fn amplitude(&self, string: &[usize]) -> Result<C64> {
        Ok((self.branch_vector(string)? * &self.right)[(0, 0)])
    }

    /// Every amplitude, index strings in lexicographic order (site 0 slowest).
    pub fn amplitudes(&self) -> Result<Vec<C64>> {
        let p = self.physical_dim();
        let count = checked_pow(p, self.len());
        if count > enumeration_budget() {
            return Err(Error::Resource(format!("{count} index strings exceed the enumeration budget")));
        }
        let mut out = Vec::with_capacity(count as usize);
        let mut string = vec![0usize; self.len()];
        for _ in 0..count {
            out.push(self.amplitude(&string)?);
            for pos in (0..string.len()).rev() {
                string[pos] += 1;
                if string[pos] < p {
                    break;
                }
                string[pos] = 0;
            }
        }
        Ok(out)
    }

    /// Closures `c_k` (`D_k × 1`) giving the reservoir trace at step `k`:
    /// the chain from `k` onward with every index pinned to 0.
    pub(crate) fn zero_closures(&self) -> Vec<Matrix> {
        let mut closures = vec![self.right.clone()];
        for core in self.cores.iter().rev() {
            let next = &core.slices[0] * closures.last().expect("nonempty");
            closures.push(next);
        }
        closures.reverse();
        closures
    }

    /// `Σ_i |W(i)|²` via transfer matrices.
    pub fn norm_sqr(&self) -> f64 {
        let mut env = self.left.adjoint() * &self.left;
        for core in &self.cores {
            env = core
                .slices
                .iter()
                .map(|s| s.adjoint() * &env * s)
                .fold(Matrix::zeros(core.right_dim(), core.right_dim()), |acc, m| acc + m);
        }
        (self.right.adjoint() * env * &self.right)[(0, 0)].re
    }

    /// Copy rescaled so that `Σ |W|² = 1`.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Validation(format!("network norm {norm} cannot be normalised")));
        }
        let mut out = self.clone();
        out.left = out.left.unscale(norm);
        Ok(out)
    }
}

/// Bytes needed to hold an uncompressed network for `model` on `grid`.
pub fn estimated_bytes(model: &ModelSpec, grid: &TimeGrid) -> u64 {
    let bond = (model.d_r() * model.d_r()) as u64;
    let per_core = bond.saturating_mul(bond).saturating_mul((2 * model.n_terms() + 1) as u64);
    per_core.saturating_mul(grid.steps() as u64).saturating_mul(16)
}

pub fn build_rn(model: &ModelSpec, grid: &TimeGrid) -> Result<ReservoirNetwork> {
    build_rn_with_budget(model, grid, DEFAULT_MEMORY_BUDGET)
}

/// Builds the uncompressed network; core `k` slice `i` is `(Φ0_R ℬ_i)ᵀ`.
pub fn build_rn_with_budget(model: &ModelSpec, grid: &TimeGrid, budget_bytes: u64) -> Result<ReservoirNetwork> {
    let need = estimated_bytes(model, grid);
    if need > budget_bytes {
        return Err(Error::Resource(format!("reservoir network needs about {need} bytes, budget is {budget_bytes}")));
    }
    let (_, phi_r) = free_propagator(model, grid.tau())?;
    let slices: Vec<Matrix> =
        reservoir_factors(model, grid.tau()).iter().map(|b| (phi_r.matrix() * b).transpose()).collect();
    let core = Core { slices };
    let left = Matrix::from_row_slice(1, model.d_r().pow(2), vectorize(model.rho_r0()).as_slice());
    let right = trace_functional(model.d_r());
    let right = Matrix::from_column_slice(right.len(), 1, right.as_slice());
    Ok(ReservoirNetwork {
        cores: vec![core; grid.steps()],
        left,
        right,
        tau: grid.tau(),
        gamma: model.gamma(),
        n_terms: model.n_terms(),
        d_r: model.d_r(),
        leading_free_steps: 0,
    })
}

fn check_metadata(rn: &ReservoirNetwork, model: &ModelSpec, grid: &TimeGrid) -> Result<()> {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
    if rn.total_steps() != grid.steps() {
        return usage(format!("network covers {} steps, grid has {}", rn.total_steps(), grid.steps()));
    }
    if !close(rn.tau, grid.tau()) {
        return usage(format!("network step {} does not match grid step {}", rn.tau, grid.tau()));
    }
    if rn.n_terms != model.n_terms() || rn.d_r != model.d_r() || !close(rn.gamma, model.gamma()) {
        return usage("network was built from a different model");
    }
    Ok(())
}

/// Contracts the system chain against the network, returning `ρ_S(t_k)` for
/// every grid time. The running state is a `d_S² × D_k` matrix.
pub fn contract_system(rn: &ReservoirNetwork, model: &ModelSpec, grid: &TimeGrid) -> Result<Trajectory> {
    check_metadata(rn, model, grid)?;
    let (phi_s, _) = free_propagator(model, grid.tau())?;
    let steps: Vec<Matrix> = system_factors(model, grid.tau()).iter().map(|a| phi_s.matrix() * a).collect();
    let closures = rn.zero_closures();
    let mut states = Vec::with_capacity(grid.steps() + 1);
    let mut sys = Matrix::from_column_slice(model.d_s().pow(2), 1, vectorize(model.rho_s0()).as_slice());
    states.push(model.rho_s0().clone());

    // Leading free steps see the reservoir only through the boundary.
    let weight = (&rn.left * &closures[0])[(0, 0)];
    for _ in 0..rn.leading_free_steps {
        sys = phi_s.matrix() * sys;
        states.push(devectorize(&(&sys * weight).column(0).into_owned())?);
    }

    let mut v = &sys * &rn.left;
    for (core, closure) in rn.cores.iter().zip(&closures[1..]) {
        let mut next = Matrix::zeros(v.nrows(), core.right_dim());
        for (step, slice) in steps.iter().zip(&core.slices) {
            next += step * &v * slice;
        }
        v = next;
        let rho = devectorize(&(&v * closure).column(0).into_owned())?;
        states.push(rho);
    }
    Ok(Trajectory::new(grid.times(), states))
}

/// `|0…0⟩` amplitude, the reference the correlator divides by.
pub(crate) fn all_zero_amplitude(rn: &ReservoirNetwork) -> C64 {
    (&rn.left * &rn.zero_closures()[0])[(0, 0)]
}

pub(crate) fn scalar_one() -> Matrix {
    Matrix::from_element(1, 1, ONE)
}
