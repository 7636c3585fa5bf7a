//! Reduced density operators of the amplitude state `|W⟩ = Σ W(i) |i_1…i_K⟩`
//! over subsets of time sites, and the mutual information between windows.

use std::ops::Range;

use super::ReservoirNetwork;
use crate::error::{usage, Error, Result};
use crate::limits::{checked_pow, enumeration_budget, DEFAULT_MEMORY_BUDGET};
use crate::tensor::{density_entropy, trace, Matrix};

/// Reduced density operator on the contiguous `window` of sites,
/// normalised to unit trace. Indices are ordered with earlier sites slowest.
pub fn rpdm(rn: &ReservoirNetwork, window: Range<usize>) -> Result<Matrix> {
    if window.is_empty() {
        return usage("window must contain at least one site");
    }
    let sites: Vec<usize> = window.collect();
    rpdm_sites(rn, &sites)
}

/// Reduced density operator on an arbitrary strictly increasing set of sites.
pub fn rpdm_sites(rn: &ReservoirNetwork, sites: &[usize]) -> Result<Matrix> {
    if sites.is_empty() {
        return usage("site set must be nonempty");
    }
    if sites.windows(2).any(|w| w[0] >= w[1]) {
        return usage(format!("sites {sites:?} must be strictly increasing"));
    }
    if *sites.last().expect("nonempty") >= rn.len() {
        return usage(format!("site {} outside a network of {} sites", sites.last().unwrap(), rn.len()));
    }
    let p = rn.physical_dim();
    let open = checked_pow(p, sites.len());
    if open > enumeration_budget() {
        return Err(Error::Resource(format!("reduced operator of dimension {open} exceeds the enumeration budget")));
    }
    let bond = rn.max_bond_dim() as u64;
    let bytes = open.saturating_mul(open).saturating_mul(bond * bond).saturating_mul(16);
    if bytes > DEFAULT_MEMORY_BUDGET {
        return Err(Error::Resource(format!("reduced operator needs about {bytes} bytes")));
    }

    // envs[I * P + J] = Σ_traced v_Iᵀ conj(v_J), v the running row vector.
    let mut dim_open = 1usize;
    let mut envs = vec![rn.left.transpose() * rn.left.map(|z| z.conj())];
    let mut next_open = sites.iter().peekable();
    for (k, core) in rn.cores.iter().enumerate() {
        let st: Vec<Matrix> = core.slices.iter().map(|s| s.transpose()).collect();
        let sc: Vec<Matrix> = core.slices.iter().map(|s| s.map(|z| z.conj())).collect();
        let dr = core.slices[0].ncols();
        if next_open.peek() == Some(&&k) {
            next_open.next();
            let new_dim = dim_open * p;
            let mut grown = vec![Matrix::zeros(dr, dr); new_dim * new_dim];
            for bi in 0..dim_open {
                for bj in 0..dim_open {
                    let e = &envs[bi * dim_open + bj];
                    for i in 0..p {
                        let left = &st[i] * e;
                        for j in 0..p {
                            grown[(bi * p + i) * new_dim + bj * p + j] = &left * &sc[j];
                        }
                    }
                }
            }
            envs = grown;
            dim_open = new_dim;
        } else {
            envs =
                envs.iter().map(|e| (0..p).fold(Matrix::zeros(dr, dr), |acc, i| acc + &st[i] * e * &sc[i])).collect();
        }
    }
    let r = &rn.right;
    let rc = r.map(|z| z.conj());
    let mut rho = Matrix::from_fn(dim_open, dim_open, |i, j| (r.transpose() * &envs[i * dim_open + j] * &rc)[(0, 0)]);
    let tr = trace(&rho).re;
    if !(tr > 0.0) {
        return Err(Error::Validation("network has zero norm".into()));
    }
    rho = rho.unscale(tr);
    Ok((&rho + rho.adjoint()).scale(0.5))
}

/// `S(A) + S(B) - S(AB)` in nats for disjoint windows.
pub fn mutual_information(rn: &ReservoirNetwork, a: Range<usize>, b: Range<usize>) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return usage("windows must be nonempty");
    }
    if a.start < b.end && b.start < a.end {
        return usage(format!("windows {a:?} and {b:?} overlap"));
    }
    let mut union: Vec<usize> = a.clone().chain(b.clone()).collect();
    union.sort_unstable();
    let s_a = density_entropy(&rpdm(rn, a)?)?;
    let s_b = density_entropy(&rpdm(rn, b)?)?;
    let s_ab = density_entropy(&rpdm_sites(rn, &union)?)?;
    Ok(s_a + s_b - s_ab)
}
