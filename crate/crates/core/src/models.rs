//! Model zoo and the JSON model-file format.
//!
//! A model file is either fully explicit:
//!
//! ```json
//! { "schema_version": "1", "d_S": 2, "d_R": 2,
//!   "H_S": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]],
//!   "H_R": ..., "couplings": [{"A": ..., "B": ...}], "gamma": 0.5,
//!   "rho_S0": ..., "rho_R0": ... }
//! ```
//!
//! with matrices as row-major nested arrays of `[re, im]`, or a preset
//! reference `{ "schema_version": "1", "preset": {"name": "desk", "params": {}} }`.

use std::collections::BTreeMap;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::limits::DEFAULT_ORACLE_CAP;
use crate::liouville::{basis_projector, Coupling, ModelSpec};
use crate::tensor::{hermitian_eigenvalues, kron, trace, Matrix, C64, ONE, ZERO};

pub const SCHEMA_VERSION: &str = "1";

/// Seed of the pinned desk model (qubit + two-qubit reservoir).
pub const DESK_SEED: u64 = 20_240_917;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

pub fn pauli(axis: Axis) -> Matrix {
    let i = C64::new(0.0, 1.0);
    match axis {
        Axis::X => Matrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        Axis::Y => Matrix::from_row_slice(2, 2, &[ZERO, -i, i, ZERO]),
        Axis::Z => Matrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    }
}

/// `op` acting on spin `site` of a chain of `len` spins.
fn embed(op: &Matrix, site: usize, len: usize) -> Matrix {
    let id = Matrix::identity(2, 2);
    (0..len).fold(Matrix::identity(1, 1), |acc, k| kron(&acc, if k == site { op } else { &id }))
}

/// How the central qubit couples to the bath spins.
#[derive(Clone, Debug, PartialEq)]
pub enum CouplingPattern {
    /// One term per axis: `A = σ^a`, `B = (1/N) Σ_k σ^a_k`.
    Collective(Vec<Axis>),
    /// One term per bath spin: `A = σ^a`, `B_k = σ^a_k`.
    PerSpin(Axis),
}

/// Local fields of the spin-star model (units of 1/time).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinStarFields {
    /// `H_S = (system / 2) σ^z`.
    pub system: f64,
    /// Longitudinal bath field, `Σ_k (bath_z / 2) σ^z_k`.
    pub bath_z: f64,
    /// Transverse bath field, `Σ_k bath_x σ^x_k`.
    pub bath_x: f64,
    /// Nearest-neighbour bath exchange, `Σ_k exchange σ^z_k σ^z_{k+1}`.
    pub exchange: f64,
}

impl Default for SpinStarFields {
    fn default() -> Self {
        Self { system: 1.0, bath_z: 0.5, bath_x: 0.0, exchange: 0.0 }
    }
}

/// Central qubit coupled to `n_bath_spins` bath spins.
///
/// The system starts in `|+⟩`, the bath in the maximally mixed state.
pub fn spin_star(
    n_bath_spins: usize,
    pattern: &CouplingPattern,
    gamma: f64,
    fields: SpinStarFields,
) -> Result<ModelSpec> {
    if n_bath_spins == 0 {
        return invalid("spin star needs at least one bath spin");
    }
    if n_bath_spins > 12 {
        return invalid(format!("{n_bath_spins} bath spins exceed the dense construction limit"));
    }
    let d_r = 1usize << n_bath_spins;
    if 2 * d_r > DEFAULT_ORACLE_CAP {
        log::warn!(
            "spin star with {n_bath_spins} bath spins has joint dimension {} above the oracle cap {}",
            2 * d_r,
            DEFAULT_ORACLE_CAP
        );
    }
    let h_s = pauli(Axis::Z).scale(0.5 * fields.system);
    let mut h_r = Matrix::zeros(d_r, d_r);
    for k in 0..n_bath_spins {
        h_r += embed(&pauli(Axis::Z), k, n_bath_spins).scale(0.5 * fields.bath_z);
        h_r += embed(&pauli(Axis::X), k, n_bath_spins).scale(fields.bath_x);
        if k + 1 < n_bath_spins {
            let zz = embed(&pauli(Axis::Z), k, n_bath_spins) * embed(&pauli(Axis::Z), k + 1, n_bath_spins);
            h_r += zz.scale(fields.exchange);
        }
    }
    let couplings = match pattern {
        CouplingPattern::Collective(axes) => axes
            .iter()
            .map(|&ax| {
                let b = (0..n_bath_spins)
                    .map(|k| embed(&pauli(ax), k, n_bath_spins))
                    .fold(Matrix::zeros(d_r, d_r), |acc, m| acc + m)
                    .unscale(n_bath_spins as f64);
                Coupling { a: pauli(ax), b }
            })
            .collect(),
        CouplingPattern::PerSpin(ax) => {
            (0..n_bath_spins).map(|k| Coupling { a: pauli(*ax), b: embed(&pauli(*ax), k, n_bath_spins) }).collect()
        }
    };
    let plus = Matrix::from_element(2, 2, C64::new(0.5, 0.0));
    let rho_r = Matrix::identity(d_r, d_r).unscale(d_r as f64);
    ModelSpec::new(h_s, h_r, couplings, gamma, plus, rho_r)
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, d: usize) -> Matrix {
    Matrix::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

/// GUE-style Hermitian matrix with unit operator norm.
fn unit_hermitian(rng: &mut ChaCha8Rng, d: usize) -> Matrix {
    let x = gaussian_matrix(rng, d);
    let h = (&x + x.adjoint()).scale(0.5);
    let norm = hermitian_eigenvalues(&h).expect("square by construction").iter().fold(0.0f64, |m, l| m.max(l.abs()));
    if norm == 0.0 {
        h
    } else {
        h.unscale(norm)
    }
}

fn random_density(rng: &mut ChaCha8Rng, d: usize) -> Matrix {
    let g = gaussian_matrix(rng, d);
    let w = &g * g.adjoint();
    let w = (&w + w.adjoint()).scale(0.5);
    w.unscale(trace(&w).re)
}

/// Random model with unit-norm Hamiltonians and couplings, `γ = 1` and
/// random full-rank initial states. Deterministic in `seed`.
pub fn random_model(seed: u64, d_s: usize, d_r: usize, n: usize) -> ModelSpec {
    assert!(d_s >= 1 && d_r >= 1, "dimensions must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h_s = unit_hermitian(&mut rng, d_s);
    let h_r = unit_hermitian(&mut rng, d_r);
    let couplings =
        (0..n).map(|_| Coupling { a: unit_hermitian(&mut rng, d_s), b: unit_hermitian(&mut rng, d_r) }).collect();
    let rho_s = random_density(&mut rng, d_s);
    let rho_r = random_density(&mut rng, d_r);
    ModelSpec::new(h_s, h_r, couplings, 1.0, rho_s, rho_r).expect("random model is valid by construction")
}

/// Names accepted by [`preset`].
pub const PRESET_NAMES: &[&str] = &["desk", "decoupled", "dephasing", "spin-star", "fast-mixing"];

/// Named model with optional numeric overrides (`gamma`, `seed`,
/// `bath_spins`, `n_terms` where meaningful).
pub fn preset(name: &str, params: &BTreeMap<String, f64>) -> Result<ModelSpec> {
    for key in params.keys() {
        if !["gamma", "seed", "bath_spins", "n_terms"].contains(&key.as_str()) {
            return invalid(format!("preset parameter '{key}' is not recognised"));
        }
    }
    let gamma = params.get("gamma").copied();
    let as_count = |key: &str, default: usize| -> Result<usize> {
        match params.get(key) {
            None => Ok(default),
            Some(&v) if v >= 0.0 && v.fract() == 0.0 => Ok(v as usize),
            Some(v) => invalid(format!("preset parameter '{key}' must be a nonnegative integer, got {v}")),
        }
    };
    let model = match name {
        "desk" => {
            let seed = as_count("seed", DESK_SEED as usize)? as u64;
            random_model(seed, 2, 4, as_count("n_terms", 1)?)
        }
        "decoupled" => {
            // Desk reservoir, σz system Hamiltonian and a diagonal initial
            // state: populations are conserved exactly.
            let desk = random_model(DESK_SEED, 2, 4, 1);
            let rho_s =
                Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(0.7, 0.0), C64::new(0.3, 0.0)]));
            ModelSpec::new(
                pauli(Axis::Z).scale(0.5),
                desk.h_r().clone(),
                desk.couplings().to_vec(),
                0.0,
                rho_s,
                desk.rho_r0().clone(),
            )?
        }
        "dephasing" => spin_star(
            as_count("bath_spins", 2)?,
            &CouplingPattern::PerSpin(Axis::Z),
            1.0,
            SpinStarFields { system: 1.0, bath_z: 0.7, bath_x: 0.0, exchange: 0.3 },
        )?,
        "spin-star" => spin_star(
            as_count("bath_spins", 2)?,
            &CouplingPattern::Collective(vec![Axis::X]),
            1.0,
            SpinStarFields { system: 1.0, bath_z: 0.8, bath_x: 0.3, exchange: 0.2 },
        )?,
        "fast-mixing" => spin_star(
            as_count("bath_spins", 3)?,
            &CouplingPattern::Collective(vec![Axis::X]),
            1.0,
            SpinStarFields { system: 1.0, bath_z: 3.1, bath_x: 2.3, exchange: 1.7 },
        )?,
        other => {
            return invalid(format!("unknown preset '{other}' (known: {})", PRESET_NAMES.join(", ")));
        }
    };
    match gamma {
        Some(g) => model.with_gamma(g),
        None => Ok(model),
    }
}

type MatrixJson = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingJson {
    #[serde(rename = "A")]
    pub a: MatrixJson,
    #[serde(rename = "B")]
    pub b: MatrixJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PresetRef {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

/// On-disk model document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema_version: String,
    #[serde(rename = "d_S", skip_serializing_if = "Option::is_none", default)]
    pub d_s: Option<usize>,
    #[serde(rename = "d_R", skip_serializing_if = "Option::is_none", default)]
    pub d_r: Option<usize>,
    #[serde(rename = "H_S", skip_serializing_if = "Option::is_none", default)]
    pub h_s: Option<MatrixJson>,
    #[serde(rename = "H_R", skip_serializing_if = "Option::is_none", default)]
    pub h_r: Option<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub couplings: Option<Vec<CouplingJson>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma: Option<f64>,
    #[serde(rename = "rho_S0", skip_serializing_if = "Option::is_none", default)]
    pub rho_s0: Option<MatrixJson>,
    #[serde(rename = "rho_R0", skip_serializing_if = "Option::is_none", default)]
    pub rho_r0: Option<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub preset: Option<PresetRef>,
}

fn matrix_to_json(m: &Matrix) -> MatrixJson {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

fn matrix_from_json(field: &str, rows: &MatrixJson, dim: usize) -> Result<Matrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return invalid(format!("{field} must be a {dim}x{dim} array of [re, im] pairs"));
    }
    if rows.iter().flatten().flatten().any(|v| !v.is_finite()) {
        return invalid(format!("{field} contains a non-finite number"));
    }
    Ok(Matrix::from_fn(dim, dim, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

impl ModelFile {
    pub fn from_spec(spec: &ModelSpec) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            d_s: Some(spec.d_s()),
            d_r: Some(spec.d_r()),
            h_s: Some(matrix_to_json(spec.h_s())),
            h_r: Some(matrix_to_json(spec.h_r())),
            couplings: Some(
                spec.couplings()
                    .iter()
                    .map(|c| CouplingJson { a: matrix_to_json(&c.a), b: matrix_to_json(&c.b) })
                    .collect(),
            ),
            gamma: Some(spec.gamma()),
            rho_s0: Some(matrix_to_json(spec.rho_s0())),
            rho_r0: Some(matrix_to_json(spec.rho_r0())),
            preset: None,
        }
    }

    pub fn into_spec(self) -> Result<ModelSpec> {
        if self.schema_version != SCHEMA_VERSION {
            return invalid(format!(
                "schema_version '{}' is not supported (expected '{SCHEMA_VERSION}')",
                self.schema_version
            ));
        }
        if let Some(p) = self.preset {
            let explicit = self.d_s.is_some()
                || self.d_r.is_some()
                || self.h_s.is_some()
                || self.h_r.is_some()
                || self.couplings.is_some()
                || self.gamma.is_some()
                || self.rho_s0.is_some()
                || self.rho_r0.is_some();
            if explicit {
                return invalid("preset: a preset reference cannot be combined with explicit fields");
            }
            return preset(&p.name, &p.params);
        }
        fn need<T>(field: &str, v: Option<T>) -> Result<T> {
            v.ok_or_else(|| Error::Validation(format!("{field} is missing")))
        }
        let d_s = need("d_S", self.d_s)?;
        let d_r = need("d_R", self.d_r)?;
        if d_s == 0 || d_r == 0 {
            return invalid("d_S and d_R must be positive");
        }
        let h_s = matrix_from_json("H_S", &need("H_S", self.h_s)?, d_s)?;
        let h_r = matrix_from_json("H_R", &need("H_R", self.h_r)?, d_r)?;
        let couplings = need("couplings", self.couplings)?
            .iter()
            .enumerate()
            .map(|(k, c)| {
                Ok(Coupling {
                    a: matrix_from_json(&format!("couplings[{k}].A"), &c.a, d_s)?,
                    b: matrix_from_json(&format!("couplings[{k}].B"), &c.b, d_r)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let gamma = need("gamma", self.gamma)?;
        let rho_s0 = matrix_from_json("rho_S0", &need("rho_S0", self.rho_s0)?, d_s)?;
        let rho_r0 = matrix_from_json("rho_R0", &need("rho_R0", self.rho_r0)?, d_r)?;
        ModelSpec::new(h_s, h_r, couplings, gamma, rho_s0, rho_r0)
    }
}

/// Parses a model document; `origin` labels error messages.
pub fn parse_model_str(text: &str, origin: &str) -> Result<ModelSpec> {
    let file: ModelFile =
        serde_json::from_str(text).map_err(|e| Error::Parse { path: origin.to_string(), message: e.to_string() })?;
    file.into_spec().map_err(|e| match e {
        Error::Validation(msg) => Error::Validation(format!("{origin}: {msg}")),
        Error::Dimension(msg) => Error::Validation(format!("{origin}: {msg}")),
        other => other,
    })
}

pub fn parse_model(path: impl AsRef<Path>) -> Result<ModelSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_model_str(&text, &path.display().to_string())
}

/// Model document text. Floats use the shortest representation that
/// parses back to the identical `f64`.
pub fn model_to_string(spec: &ModelSpec) -> String {
    serde_json::to_string_pretty(&ModelFile::from_spec(spec)).expect("model file serialises") + "\n"
}

pub fn write_model(spec: &ModelSpec, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, model_to_string(spec))?;
    Ok(())
}

/// `|0⟩⟨0|` on dimension `d`; convenience for hand-built models.
pub fn ground_projector(d: usize) -> Matrix {
    basis_projector(d, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::DEFAULT_ORACLE_CAP;

    fn no_params() -> BTreeMap<String, f64> {
        BTreeMap::new()
    }

    #[test]
    fn spin_star_two_bath_spins() {
        let m = spin_star(2, &CouplingPattern::Collective(vec![Axis::X]), 0.5, SpinStarFields::default()).unwrap();
        assert_eq!(m.d_r(), 4);
        assert_eq!(m.d_s(), 2);
        assert!(m.joint_dim() <= DEFAULT_ORACLE_CAP);
        let per_spin = spin_star(3, &CouplingPattern::PerSpin(Axis::Z), 0.5, SpinStarFields::default()).unwrap();
        assert_eq!(per_spin.n_terms(), 3);
    }

    #[test]
    fn spin_star_zero_coupling_is_free() {
        let m = spin_star(2, &CouplingPattern::Collective(vec![Axis::Z]), 0.0, SpinStarFields::default()).unwrap();
        assert_eq!(m.interaction_hamiltonian().norm(), 0.0);
    }

    #[test]
    fn random_model_is_deterministic_and_normalised() {
        let a = random_model(99, 2, 3, 2);
        let b = random_model(99, 2, 3, 2);
        assert_eq!(a, b);
        for c in a.couplings() {
            for m in [&c.a, &c.b] {
                let norm = hermitian_eigenvalues(m).unwrap().iter().fold(0.0f64, |x, l| x.max(l.abs()));
                assert!((norm - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn random_models_differ_across_seeds() {
        for seed in 0..20u64 {
            assert_ne!(random_model(seed, 2, 2, 1), random_model(seed + 1000, 2, 2, 1));
        }
    }

    #[test]
    fn every_preset_builds() {
        for name in PRESET_NAMES {
            preset(name, &no_params()).unwrap();
        }
        assert!(preset("nope", &no_params()).is_err());
        let mut bad = no_params();
        bad.insert("temperature".into(), 1.0);
        assert!(preset("desk", &bad).is_err());
    }

    #[test]
    fn round_trip_is_entrywise_identical() {
        let spec = preset("spin-star", &no_params()).unwrap();
        let back = parse_model_str(&model_to_string(&spec), "mem").unwrap();
        assert_eq!(spec, back);
        let random = random_model(3, 3, 2, 2);
        assert_eq!(random, parse_model_str(&model_to_string(&random), "mem").unwrap());
    }

    #[test]
    fn non_hermitian_field_is_named() {
        let spec = random_model(5, 2, 2, 1);
        let mut file = ModelFile::from_spec(&spec);
        file.h_s.as_mut().unwrap()[0][1] = [5.0, 0.0];
        let text = serde_json::to_string(&file).unwrap();
        let err = parse_model_str(&text, "bad.json").unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(err.to_string().contains("H_S"), "{err}");
    }

    #[test]
    fn bad_trace_and_malformed_numbers_are_reported() {
        let spec = random_model(5, 2, 2, 1);
        let mut file = ModelFile::from_spec(&spec);
        file.rho_r0.as_mut().unwrap()[0][0][0] += 0.5;
        let err = parse_model_str(&serde_json::to_string(&file).unwrap(), "x").unwrap_err();
        assert!(err.to_string().contains("rho_R0"), "{err}");

        let err = parse_model_str("{\"schema_version\": \"1\", \"gamma\": 1.0e}", "broken.json").unwrap_err();
        match err {
            Error::Parse { path, message } => {
                assert_eq!(path, "broken.json");
                assert!(message.contains("line"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn preset_reference_expands_to_constructor() {
        let text = r#"{"schema_version": "1", "preset": {"name": "desk", "params": {"gamma": 0.25}}}"#;
        let parsed = parse_model_str(text, "mem").unwrap();
        let mut params = no_params();
        params.insert("gamma".into(), 0.25);
        assert_eq!(parsed, preset("desk", &params).unwrap());
        assert_eq!(parsed, random_model(DESK_SEED, 2, 4, 1).with_gamma(0.25).unwrap());
    }
}
