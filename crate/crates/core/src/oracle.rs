//! Dense reference evolutions of the full system ⊗ reservoir state.
//!
//! These work directly on `d × d` joint density matrices with `d = d_S d_R`
//! and never touch the reservoir network, so they serve as independent
//! oracles for it. Partial traces use the joint index `s * d_R + r`.

use crate::error::{Error, Result};
use crate::limits::DEFAULT_ORACLE_CAP;
use crate::liouville::{unitary_step, ModelSpec, TimeGrid};
use crate::network::Trajectory;
use crate::tensor::{Matrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InteractionMode {
    /// Full `e^{-iτH_int}` conjugation each step.
    Exact,
    /// First-order `ρ - iτ[H_int, ρ]`, the sum the reservoir network factorises.
    Factorized,
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub trajectory: Trajectory,
    pub final_joint: Option<Matrix>,
}

/// `tr_R ρ` for a joint `d_S d_R` density matrix.
pub fn partial_trace_reservoir(rho: &Matrix, d_s: usize, d_r: usize) -> Matrix {
    Matrix::from_fn(d_s, d_s, |s, sp| (0..d_r).map(|r| rho[(s * d_r + r, sp * d_r + r)]).sum())
}

fn check_cap(model: &ModelSpec, cap: usize) -> Result<()> {
    if model.joint_dim() > cap {
        return Err(Error::Resource(format!(
            "joint dimension {} exceeds the dense oracle cap {cap}",
            model.joint_dim()
        )));
    }
    Ok(())
}

fn run(model: &ModelSpec, grid: &TimeGrid, mut step: impl FnMut(&Matrix) -> Matrix) -> OracleResult {
    let (d_s, d_r) = (model.d_s(), model.d_r());
    let mut rho = model.initial_state();
    let mut states = Vec::with_capacity(grid.steps() + 1);
    states.push(model.rho_s0().clone());
    for _ in 0..grid.steps() {
        rho = step(&rho);
        states.push(partial_trace_reservoir(&rho, d_s, d_r));
    }
    OracleResult { trajectory: Trajectory::new(grid.times(), states), final_joint: Some(rho) }
}

pub fn evolve_exact(model: &ModelSpec, grid: &TimeGrid) -> Result<OracleResult> {
    evolve_exact_with_cap(model, grid, DEFAULT_ORACLE_CAP)
}

/// `ρ(t_k) = e^{-iHt_k} ρ(0) e^{iHt_k}`, one exponential per step size.
pub fn evolve_exact_with_cap(model: &ModelSpec, grid: &TimeGrid, cap: usize) -> Result<OracleResult> {
    check_cap(model, cap)?;
    let u = unitary_step(&model.hamiltonian(), grid.tau())?;
    let ud = u.adjoint();
    Ok(run(model, grid, |rho| &u * rho * &ud))
}

pub fn evolve_trotter_dense(model: &ModelSpec, grid: &TimeGrid, mode: InteractionMode) -> Result<OracleResult> {
    evolve_trotter_dense_with_cap(model, grid, mode, DEFAULT_ORACLE_CAP)
}

/// First-order Trotter evolution: interaction step, then free step.
pub fn evolve_trotter_dense_with_cap(
    model: &ModelSpec,
    grid: &TimeGrid,
    mode: InteractionMode,
    cap: usize,
) -> Result<OracleResult> {
    check_cap(model, cap)?;
    let tau = grid.tau();
    let u0 = unitary_step(&model.free_hamiltonian(), tau)?;
    let u0d = u0.adjoint();
    let h_int = model.interaction_hamiltonian();
    match mode {
        InteractionMode::Exact => {
            let ui = unitary_step(&h_int, tau)?;
            let uid = ui.adjoint();
            Ok(run(model, grid, |rho| &u0 * (&ui * rho * &uid) * &u0d))
        }
        InteractionMode::Factorized => {
            let minus_i_tau = C64::new(0.0, -tau);
            Ok(run(model, grid, |rho| {
                let commutator = &h_int * rho - rho * &h_int;
                let stepped = rho + commutator.map(|z| z * minus_i_tau);
                &u0 * stepped * &u0d
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::{basis_projector, Coupling};
    use crate::models::{pauli, random_model, Axis};
    use crate::tensor::{kron, trace, trace_distance, ONE, ZERO};

    #[test]
    fn decoupled_exact_is_free_rotation() {
        let m = random_model(31, 2, 3, 1).with_gamma(0.0).unwrap();
        let grid = TimeGrid::new(0.1, 10).unwrap();
        let out = evolve_exact(&m, &grid).unwrap();
        let u = unitary_step(m.h_s(), 1.0).unwrap();
        let expected = &u * m.rho_s0() * u.adjoint();
        assert!((out.trajectory.states()[10].clone() - &expected).norm() < 1e-10);
        // reservoir marginal untouched up to its own free rotation
        let joint = out.final_joint.unwrap();
        let ur = unitary_step(m.h_r(), 1.0).unwrap();
        let expected_joint = kron(&expected, &(&ur * m.rho_r0() * ur.adjoint()));
        assert!((joint - expected_joint).norm() < 1e-10);
    }

    #[test]
    fn first_state_is_initial_state() {
        let m = random_model(2, 2, 2, 1);
        let out = evolve_exact(&m, &TimeGrid::new(0.3, 2).unwrap()).unwrap();
        assert_eq!(&out.trajectory.states()[0], m.rho_s0());
    }

    #[test]
    fn zz_dephasing_follows_cosine_law() {
        // σz⊗σz with reservoir in |0⟩: the coherence picks up e^{-2iγt}.
        let gamma = 0.7;
        let m = ModelSpec::new(
            Matrix::zeros(2, 2),
            Matrix::zeros(2, 2),
            vec![Coupling { a: pauli(Axis::Z), b: pauli(Axis::Z) }],
            gamma,
            Matrix::from_element(2, 2, C64::new(0.5, 0.0)),
            Matrix::identity(2, 2).scale(0.5),
        )
        .unwrap();
        let grid = TimeGrid::new(0.05, 40).unwrap();
        let out = evolve_exact(&m, &grid).unwrap();
        for (t, rho) in out.trajectory.times().iter().zip(out.trajectory.states()) {
            // mixed reservoir: average of e^{∓2iγt} gives cos(2γt)
            let expected = 0.5 * (2.0 * gamma * t).cos();
            assert!((rho[(0, 1)] - C64::new(expected, 0.0)).norm() < 1e-10, "t={t}");
            assert!((rho[(0, 0)] - C64::new(0.5, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn exact_preserves_purity() {
        let mut m = random_model(8, 2, 2, 1);
        m = ModelSpec::new(
            m.h_s().clone(),
            m.h_r().clone(),
            m.couplings().to_vec(),
            m.gamma(),
            basis_projector(2, 0),
            basis_projector(2, 1),
        )
        .unwrap();
        let out = evolve_exact(&m, &TimeGrid::new(0.2, 15).unwrap()).unwrap();
        let joint = out.final_joint.unwrap();
        assert!((trace(&(&joint * &joint)).re - 1.0).abs() < 1e-9);
    }

    #[test]
    fn trotter_without_interaction_is_exact() {
        let m = random_model(17, 2, 3, 1).with_gamma(0.0).unwrap();
        let grid = TimeGrid::new(0.1, 12).unwrap();
        let exact = evolve_exact(&m, &grid).unwrap().trajectory;
        let trot = evolve_trotter_dense(&m, &grid, InteractionMode::Exact).unwrap().trajectory;
        assert!(exact.max_trace_distance(&trot).unwrap() < 1e-12);
    }

    #[test]
    fn single_step_splitting_error_is_second_order() {
        let m = random_model(41, 2, 2, 1);
        let taus = [0.04, 0.02, 0.01];
        let errs: Vec<f64> = taus
            .iter()
            .map(|&t| {
                let g = TimeGrid::new(t, 1).unwrap();
                let a = evolve_exact(&m, &g).unwrap().trajectory;
                let b = evolve_trotter_dense(&m, &g, InteractionMode::Exact).unwrap().trajectory;
                a.max_trace_distance(&b).unwrap()
            })
            .collect();
        let slope = crate::stats::loglog_slope(&taus, &errs);
        assert!(slope > 1.8, "slope {slope}, errors {errs:?}");
    }

    #[test]
    fn factorized_mode_error_accumulates_as_k_gamma_tau_squared() {
        let m = random_model(43, 2, 2, 1);
        let total = 0.4;
        let taus = [0.02, 0.01, 0.005];
        let errs: Vec<f64> = taus
            .iter()
            .map(|&t| {
                let g = TimeGrid::from_total(total, t).unwrap();
                let a = evolve_trotter_dense(&m, &g, InteractionMode::Exact).unwrap().trajectory;
                let b = evolve_trotter_dense(&m, &g, InteractionMode::Factorized).unwrap().trajectory;
                a.max_trace_distance(&b).unwrap()
            })
            .collect();
        // K (γτ)² with K = T/τ is linear in τ
        let slope = crate::stats::loglog_slope(&taus, &errs);
        assert!((slope - 1.0).abs() < 0.15, "slope {slope}");
    }

    #[test]
    fn exact_mode_trotter_is_trace_and_positivity_preserving() {
        let m = random_model(47, 2, 3, 2);
        let out = evolve_trotter_dense(&m, &TimeGrid::new(0.05, 30).unwrap(), InteractionMode::Exact).unwrap();
        for rho in out.trajectory.states() {
            assert!((trace(rho).re - 1.0).abs() < 1e-10);
            assert!(crate::tensor::hermitian_eigenvalues(rho).unwrap()[0] > -1e-10);
        }
    }

    #[test]
    fn global_trotter_error_is_first_order() {
        let m = random_model(53, 2, 2, 1);
        let err = |tau: f64| {
            let g = TimeGrid::from_total(1.0, tau).unwrap();
            let a = evolve_exact(&m, &g).unwrap().trajectory;
            let b = evolve_trotter_dense(&m, &g, InteractionMode::Exact).unwrap().trajectory;
            trace_distance(a.final_state(), b.final_state()).unwrap()
        };
        let ratio = err(0.02) / err(0.01);
        assert!((1.7..=2.3).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn cap_is_enforced() {
        let m = random_model(1, 2, 3, 1);
        let g = TimeGrid::new(0.1, 1).unwrap();
        assert!(matches!(evolve_exact_with_cap(&m, &g, 4), Err(Error::Resource(_))));
        assert!(matches!(
            evolve_trotter_dense_with_cap(&m, &g, InteractionMode::Factorized, 4),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn partial_trace_of_product() {
        let a = Matrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
        let b = Matrix::identity(3, 3).unscale(3.0);
        let pt = partial_trace_reservoir(&kron(&a, &b), 2, 3);
        assert!((pt - a).norm() < 1e-15);
    }
}
