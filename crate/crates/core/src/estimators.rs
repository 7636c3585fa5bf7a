//! Closed-form entropy and dimension estimates for the effective reservoir,
//! and the brute-force branch-weight machinery behind them.
//!
//! A branch is an index string `(i_1, …, i_K)` with `i ∈ [0, 2n]`. Index 0 is
//! the identity term, every other index carries a factor `√(γτ)`, so in the
//! idealised picture a branch with `m` nonzero indices has weight
//! `(γτ)^m / (1 + 2nγτ)^K`.

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::limits::{checked_pow, enumeration_budget};
use crate::liouville::Vector;
use crate::network::ReservoirNetwork;
use crate::stats::CompensatedSum;
use crate::tensor::{density_entropy, hermitian_eigenvalues, Matrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    Natural,
    Base10,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Base10 => x.log10(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateInputs {
    pub n: usize,
    pub gamma: f64,
    /// Memory length `T`.
    pub memory_time: f64,
    /// Minimal reservoir time scale, the step the estimate is regularised at.
    pub tau_min: f64,
    pub log_base: LogBase,
}

impl EstimateInputs {
    pub fn new(n: usize, gamma: f64, memory_time: f64, tau_min: f64, log_base: LogBase) -> Result<Self> {
        let inputs = Self { n, gamma, memory_time, tau_min, log_base };
        inputs.validate()?;
        Ok(inputs)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return invalid("n must be positive");
        }
        for (name, v) in [("gamma", self.gamma), ("T", self.memory_time), ("tau_min", self.tau_min)] {
            if !(v > 0.0) || !v.is_finite() {
                return invalid(format!("{name} must be positive and finite, got {v}"));
            }
        }
        Ok(())
    }

    pub fn gamma_tau(&self) -> f64 {
        self.gamma * self.tau_min
    }

    /// Soft warnings: the closed forms assume small `γτ_min`.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.gamma_tau() > 1.0 {
            out.push(format!("gamma*tau_min = {} exceeds 1; the estimate assumes small gamma*tau", self.gamma_tau()));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    /// Entropy estimate `S`.
    pub entropy_s: f64,
    /// `exp(S)`, natural exponential whatever the log base of `S`.
    pub d_suff: f64,
}

/// `S = 2nγT [1 − log(γτ_min)]`, `d_suff = e^S`.
pub fn dsuff(inputs: &EstimateInputs) -> Result<DimensionEstimate> {
    inputs.validate()?;
    for w in inputs.warnings() {
        warn!("{w}");
    }
    let s = 2.0 * inputs.n as f64 * inputs.gamma * inputs.memory_time * (1.0 - inputs.log_base.log(inputs.gamma_tau()));
    Ok(DimensionEstimate { entropy_s: s, d_suff: s.exp() })
}

/// Entropy of the idealised branch distribution over `T/τ_min` steps.
///
/// With `x = γτ_min` and `K = T/τ_min`, the full form is
/// `−K [2n x/(1+2nx) · ln(x/(1+2nx)) + 1/(1+2nx) · ln(1/(1+2nx))]`, which
/// is exactly `−Σ q ln q` over the enumerated branches and is always in
/// nats. The simplified form is `2nγT [1 − log(γτ_min)]` in the selected
/// base.
pub fn entropy_estimate(inputs: &EstimateInputs, include_full: bool) -> Result<f64> {
    inputs.validate()?;
    if !include_full {
        return Ok(dsuff(inputs)?.entropy_s);
    }
    let x = inputs.gamma_tau();
    let two_n = 2.0 * inputs.n as f64;
    let z = 1.0 + two_n * x;
    let steps = inputs.memory_time / inputs.tau_min;
    let per_site = -(two_n * x / z) * (x / z).ln() + z.ln() / z;
    Ok(steps * per_site)
}

/// Normalised weights over every index string, site 0 slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchWeights {
    sites: usize,
    physical_dim: usize,
    q: Vec<f64>,
}

impl BranchWeights {
    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.q
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Index string of branch `j`.
    pub fn string(&self, j: usize) -> Vec<usize> {
        let mut out = vec![0; self.sites];
        let mut rest = j;
        for slot in out.iter_mut().rev() {
            *slot = rest % self.physical_dim;
            rest /= self.physical_dim;
        }
        out
    }

    pub fn sum(&self) -> f64 {
        self.q.iter().copied().collect::<CompensatedSum>().value()
    }
}

fn check_budget(n: usize, k: usize) -> Result<u64> {
    let count = checked_pow(2 * n + 1, k);
    if count > enumeration_budget() {
        return Err(Error::Resource(format!("{count} branches exceed the enumeration budget")));
    }
    Ok(count)
}

/// Number of nonzero indices in branch `j`.
fn excitations(mut j: u64, p: u64, k: usize) -> i32 {
    let mut m = 0;
    for _ in 0..k {
        if !j.is_multiple_of(p) {
            m += 1;
        }
        j /= p;
    }
    m
}

/// `q = (γτ)^m / (1 + 2nγτ)^K` for every string over `K` sites.
pub fn branch_weights_idealized(n: usize, gamma_tau: f64, k: usize) -> Result<BranchWeights> {
    if n == 0 || !(gamma_tau > 0.0) {
        return invalid("n and gamma*tau must be positive");
    }
    let count = check_budget(n, k)?;
    let p = (2 * n + 1) as u64;
    let norm = (1.0 + 2.0 * n as f64 * gamma_tau).powi(k as i32);
    let q = (0..count).map(|j| gamma_tau.powi(excitations(j, p, k)) / norm).collect();
    Ok(BranchWeights { sites: k, physical_dim: p as usize, q })
}

/// Squared norms of the open branch vectors of `rn`, normalised.
pub fn branch_weights_model(rn: &ReservoirNetwork) -> Result<BranchWeights> {
    let k = rn.len();
    let count = check_budget(rn.n_terms(), k)?;
    let p = rn.physical_dim();
    let mut weights = BranchWeights { sites: k, physical_dim: p, q: Vec::with_capacity(count as usize) };
    for j in 0..count as usize {
        let v = rn.branch_vector(&weights.string(j))?;
        weights.q.push(v.norm_squared());
    }
    let total = weights.sum();
    if !(total > 0.0) {
        return Err(Error::Validation("every branch vanishes".into()));
    }
    weights.q.iter_mut().for_each(|q| *q /= total);
    Ok(weights)
}

/// `−Σ q ln q`.
pub fn branch_entropy_bound(weights: &BranchWeights) -> f64 {
    weights.q.iter().filter(|&&q| q > 0.0).map(|&q| -q * q.ln()).collect::<CompensatedSum>().value()
}

/// `S_α = ln tr(ρ^α) / (1 − α)`; `α = 1` is von Neumann.
pub fn renyi_entropy(rho: &Matrix, alpha: f64) -> Result<f64> {
    if !(alpha >= 1.0) {
        return invalid(format!("alpha must be at least 1, got {alpha}"));
    }
    if alpha == 1.0 {
        return density_entropy(rho);
    }
    let power: f64 = hermitian_eigenvalues(rho)?.into_iter().map(|l| l.max(0.0).powf(alpha)).sum();
    Ok(power.ln() / (1.0 - alpha))
}

/// One comparison between a mixed state and its branch decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RenyiCheck {
    pub alpha: f64,
    /// `S_α(ρ)` of the assembled state.
    pub entropy: f64,
    /// Rényi entropy of the branch weights.
    pub bound: f64,
}

impl RenyiCheck {
    pub fn holds(&self, slack: f64) -> bool {
        self.entropy <= self.bound + slack
    }
}

/// Assembles `ρ ∝ Σ |j⟩⟨j|` from unnormalised branches and compares its
/// Rényi entropy with that of `q_j = ⟨j|j⟩ / Σ⟨j|j⟩`.
pub fn renyi_bound_check(branches: &[Vector], alpha: f64) -> Result<RenyiCheck> {
    let Some(first) = branches.first() else {
        return invalid("decomposition has no branches");
    };
    let dim = first.len();
    if branches.iter().any(|b| b.len() != dim) {
        return crate::error::dim_err("branches have different dimensions");
    }
    let mut rho = Matrix::zeros(dim, dim);
    for b in branches {
        rho += b * b.adjoint();
    }
    let total: f64 = branches.iter().map(|b| b.norm_squared()).sum();
    if !(total > 0.0) {
        return invalid("decomposition has zero weight");
    }
    rho = rho.unscale(total);
    let q: Vec<f64> = branches.iter().map(|b| b.norm_squared() / total).collect();
    let bound = if alpha == 1.0 {
        q.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
    } else {
        q.iter().map(|&x| x.powf(alpha)).sum::<f64>().ln() / (1.0 - alpha)
    };
    Ok(RenyiCheck { alpha, entropy: renyi_entropy(&rho, alpha)?, bound })
}

/// `count` Gaussian branch vectors in `C^dim`, deterministic in `seed`.
pub fn random_branches(seed: u64, dim: usize, count: usize) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let scale: f64 = rng.random_range(0.1..1.0);
            Vector::from_fn(dim, |_, _| {
                C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)) * scale
            })
        })
        .collect()
}

/// Enumerated `Σ (γτ)^m` over all strings against `(1 + 2nγτ)^K`.
pub fn normalization_check(n: usize, gamma_tau: f64, k: usize) -> Result<(f64, f64)> {
    if n == 0 || !(gamma_tau > 0.0) {
        return invalid("n and gamma*tau must be positive");
    }
    let count = check_budget(n, k)?;
    let p = (2 * n + 1) as u64;
    let sum = (0..count).map(|j| gamma_tau.powi(excitations(j, p, k))).collect::<CompensatedSum>().value();
    Ok((sum, (1.0 + 2.0 * n as f64 * gamma_tau).powi(k as i32)))
}
