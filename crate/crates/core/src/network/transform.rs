//! Structural rewrites of a reservoir network: dropping old memory,
//! merging neighbouring time sites, and pinned-index correlators.

use super::{all_zero_amplitude, Core, ReservoirNetwork};
use crate::error::{usage, Error, Result};
use crate::tensor::{Matrix, C64};

/// Keeps the last `keep_last` sites.
///
/// The dropped sites are closed on the identity branch: the left
/// environment of the cut bond with every older index pinned to 0 becomes
/// the new left boundary, and the system evolves freely over the dropped
/// steps. `keep_last == K` returns the network unchanged.
pub fn tail_cut(rn: &ReservoirNetwork, keep_last: usize) -> Result<ReservoirNetwork> {
    let k = rn.len();
    if keep_last == 0 || keep_last > k {
        return usage(format!("keep_last must lie in 1..={k}, got {keep_last}"));
    }
    let dropped = k - keep_last;
    let mut out = rn.clone();
    let left = rn.cores[..dropped].iter().fold(rn.left.clone(), |env, core| env * &core.slices[0]);
    out.cores = rn.cores[dropped..].to_vec();
    out.left = left;
    out.leading_free_steps += dropped;
    Ok(out)
}

/// Merges each run of `block` sites into one site of step `block · τ`.
///
/// Slice 0 of a merged site is the product of the identity slices. Slice
/// `i > 0` sums the `block` placements of index `i` among identity
/// neighbours, divided by `√block` so that the weight matches the `√(γτ)`
/// split at the coarser step.
pub fn coarse_grain(rn: &ReservoirNetwork, block: usize) -> Result<ReservoirNetwork> {
    if block == 0 || !rn.len().is_multiple_of(block) {
        return usage(format!("block {block} must be a positive divisor of {}", rn.len()));
    }
    if !rn.leading_free_steps.is_multiple_of(block) {
        return usage(format!("block {block} must divide the {} leading free steps", rn.leading_free_steps));
    }
    if block == 1 {
        return Ok(rn.clone());
    }
    let p = rn.physical_dim();
    let norm = C64::new(1.0 / (block as f64).sqrt(), 0.0);
    let cores = rn
        .cores
        .chunks(block)
        .map(|group| {
            let identity = group.iter().skip(1).fold(group[0].slices[0].clone(), |acc, c| acc * &c.slices[0]);
            let mut slices = vec![identity];
            for i in 1..p {
                let mut sum = Matrix::zeros(group[0].slices[0].nrows(), group[block - 1].slices[0].ncols());
                for pos in 0..block {
                    let placed = group
                        .iter()
                        .enumerate()
                        .map(|(j, c)| &c.slices[if j == pos { i } else { 0 }])
                        .skip(1)
                        .fold(group[0].slices[if pos == 0 { i } else { 0 }].clone(), |acc, s| acc * s);
                    sum += placed;
                }
                slices.push(sum * norm);
            }
            Core { slices }
        })
        .collect();
    let mut out = rn.clone();
    out.cores = cores;
    out.tau = rn.tau * block as f64;
    out.leading_free_steps = rn.leading_free_steps / block;
    Ok(out)
}

/// `W` with index `index1` at `site1`, `index2` at `site2` and 0 elsewhere,
/// divided by the all-zero amplitude.
pub fn two_point_correlation(
    rn: &ReservoirNetwork,
    site1: usize,
    index1: usize,
    site2: usize,
    index2: usize,
) -> Result<C64> {
    if site1 >= site2 || site2 >= rn.len() {
        return usage(format!("need site1 < site2 < {}, got {site1}, {site2}", rn.len()));
    }
    let p = rn.physical_dim();
    if index1 >= p || index2 >= p {
        return usage(format!("indices must lie in [0, {}]", p - 1));
    }
    let mut string = vec![0; rn.len()];
    string[site1] = index1;
    string[site2] = index2;
    let reference = all_zero_amplitude(rn);
    if reference.norm() == 0.0 {
        return Err(Error::Validation("all-zero amplitude vanishes".into()));
    }
    Ok(rn.amplitude(&string)? / reference)
}
