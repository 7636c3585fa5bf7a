use super::{scalar_one, Core, ReservoirNetwork};
use crate::error::{invalid, Result};
use crate::tensor::{truncated_svd, Matrix, SchmidtSpectrum, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationPolicy {
    /// Relative discarded singular-value weight allowed per bond is `cutoff²`.
    pub cutoff: f64,
    pub max_bond: Option<usize>,
    /// Rescale retained values so each truncation keeps the network norm.
    pub renormalize: bool,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self { cutoff: 1e-8, max_bond: None, renormalize: false }
    }
}

impl TruncationPolicy {
    pub fn lossless() -> Self {
        Self { cutoff: 0.0, max_bond: None, renormalize: false }
    }
}

/// Schmidt spectra of the internal bonds `1 … K-1` after compression.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyReport {
    pub spectra: Vec<SchmidtSpectrum>,
    /// Von Neumann entropy per bond, nats.
    pub entropies: Vec<f64>,
    pub max_bond_dim: usize,
}

impl EntropyReport {
    pub fn max_entropy(&self) -> f64 {
        self.entropies.iter().copied().fold(0.0, f64::max)
    }

    pub fn total_discarded_weight(&self) -> f64 {
        self.spectra.iter().map(SchmidtSpectrum::discarded_weight).sum()
    }
}

fn stack_rows(slices: &[Matrix]) -> Matrix {
    let (rows, cols) = slices[0].shape();
    Matrix::from_fn(rows * slices.len(), cols, |r, c| slices[r / rows][(r % rows, c)])
}

fn stack_cols(slices: &[Matrix]) -> Matrix {
    let (rows, cols) = slices[0].shape();
    Matrix::from_fn(rows, cols * slices.len(), |r, c| slices[c / cols][(r, c % cols)])
}

/// Canonicalises and truncates the network.
///
/// Boundaries are absorbed into the end cores, a left-to-right QR sweep
/// makes every core left-orthonormal, then a right-to-left SVD sweep
/// truncates each bond at the orthogonality centre, where the singular
/// values are the exact Schmidt values of the amplitude state `W`.
pub fn compress(rn: &ReservoirNetwork, policy: &TruncationPolicy) -> Result<(ReservoirNetwork, EntropyReport)> {
    if !(policy.cutoff >= 0.0) {
        return invalid(format!("cutoff must be nonnegative, got {}", policy.cutoff));
    }
    if policy.max_bond == Some(0) {
        return invalid("max_bond must be positive");
    }
    let mut out = rn.clone();
    let k_sites = out.cores.len();
    if k_sites == 0 {
        return Ok((out, EntropyReport { spectra: vec![], entropies: vec![], max_bond_dim: 1 }));
    }

    let left = out.left.clone();
    for s in out.cores[0].slices.iter_mut() {
        *s = &left * &*s;
    }
    let right = out.right.clone();
    for s in out.cores[k_sites - 1].slices.iter_mut() {
        *s = &*s * &right;
    }
    out.left = scalar_one();
    out.right = scalar_one();

    for k in 0..k_sites - 1 {
        let stacked = stack_rows(&out.cores[k].slices);
        let qr = stacked.qr();
        let (q, r) = (qr.q(), qr.r());
        let rows = out.cores[k].slices[0].nrows();
        let p = out.cores[k].slices.len();
        out.cores[k] = Core { slices: (0..p).map(|i| q.rows(i * rows, rows).into_owned()).collect() };
        for s in out.cores[k + 1].slices.iter_mut() {
            *s = &r * &*s;
        }
    }

    let mut spectra = Vec::with_capacity(k_sites.saturating_sub(1));
    for k in (1..k_sites).rev() {
        let wide = stack_cols(&out.cores[k].slices);
        let (u, spectrum, v) = truncated_svd(&wide, policy.cutoff, policy.max_bond)?;
        let scale = if policy.renormalize && spectrum.retained_weight() > 0.0 {
            ((spectrum.retained_weight() + spectrum.discarded_weight()) / spectrum.retained_weight()).sqrt()
        } else {
            1.0
        };
        let cols = out.cores[k].slices[0].ncols();
        let p = out.cores[k].slices.len();
        out.cores[k] = Core { slices: (0..p).map(|i| v.columns(i * cols, cols).into_owned()).collect() };
        let us = Matrix::from_fn(u.nrows(), u.ncols(), |a, b| u[(a, b)] * C64::new(spectrum.values()[b] * scale, 0.0));
        for s in out.cores[k - 1].slices.iter_mut() {
            *s = &*s * &us;
        }
        spectra.push(spectrum);
    }
    spectra.reverse();

    let entropies = spectra.iter().map(SchmidtSpectrum::entropy).collect();
    let max_bond_dim = out.max_bond_dim();
    Ok((out, EntropyReport { spectra, entropies, max_bond_dim }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::TimeGrid;
    use crate::models::{random_model, DESK_SEED};
    use crate::network::{build_rn, contract_system};

    fn desk(steps: usize) -> (crate::ModelSpec, TimeGrid) {
        (random_model(DESK_SEED, 2, 4, 1), TimeGrid::new(0.02, steps).unwrap())
    }

    #[test]
    fn lossless_compression_keeps_amplitudes_and_trajectory() {
        let (m, g) = desk(6);
        let rn = build_rn(&m, &g).unwrap();
        let (c, _) = compress(&rn, &TruncationPolicy::lossless()).unwrap();
        let a = rn.amplitudes().unwrap();
        let b = c.amplitudes().unwrap();
        let diff = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12, "{diff:e}");
        let ta = contract_system(&rn, &m, &g).unwrap();
        let tb = contract_system(&c, &m, &g).unwrap();
        assert!(ta.max_trace_distance(&tb).unwrap() < 1e-12);
    }

    #[test]
    fn decoupled_network_compresses_to_product() {
        let (m, g) = desk(8);
        let m = m.with_gamma(0.0).unwrap();
        let (c, report) = compress(&build_rn(&m, &g).unwrap(), &TruncationPolicy::default()).unwrap();
        assert_eq!(c.max_bond_dim(), 1);
        assert!(report.entropies.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn compressed_cores_are_right_canonical() {
        let (m, g) = desk(10);
        let (c, _) = compress(&build_rn(&m, &g).unwrap(), &TruncationPolicy::default()).unwrap();
        for k in 1..c.len() {
            let dl = c.cores[k].slices[0].nrows();
            let gram = c.cores[k].slices.iter().fold(Matrix::zeros(dl, dl), |acc, s| acc + s * s.adjoint());
            assert!((gram - Matrix::identity(dl, dl)).norm() < 1e-10);
        }
    }

    #[test]
    fn bond_cap_and_entropy_cap_hold() {
        let (m, g) = desk(12);
        let policy = TruncationPolicy { cutoff: 0.0, max_bond: Some(3), renormalize: true };
        let rn = build_rn(&m, &g).unwrap();
        let (c, report) = compress(&rn, &policy).unwrap();
        assert!(c.max_bond_dim() <= 3);
        for (s, e) in report.spectra.iter().zip(&report.entropies) {
            assert!(*e <= (s.rank() as f64).ln() + 1e-12);
        }
        assert!((c.norm_sqr() - rn.norm_sqr()).abs() < 1e-10 * rn.norm_sqr());
    }

    #[test]
    fn relative_discarded_weight_respects_cutoff() {
        let (m, g) = desk(12);
        let cutoff = 1e-3;
        let (_, report) =
            compress(&build_rn(&m, &g).unwrap(), &TruncationPolicy { cutoff, ..Default::default() }).unwrap();
        for s in &report.spectra {
            let rel = s.discarded_weight() / (s.discarded_weight() + s.retained_weight());
            assert!(rel <= cutoff * cutoff * (1.0 + 1e-12));
        }
    }

    #[test]
    fn truncated_trajectory_stays_close() {
        let (m, g) = desk(50);
        let rn = build_rn(&m, &g).unwrap();
        let full = contract_system(&rn, &m, &g).unwrap();
        let (c, _) = compress(&rn, &TruncationPolicy::default()).unwrap();
        let approx = contract_system(&c, &m, &g).unwrap();
        assert!(full.max_trace_distance(&approx).unwrap() < 1e-6);
    }
}
