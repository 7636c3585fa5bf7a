//! Reduced dynamics of a qubit coupled to a two-qubit reservoir, from the
//! reservoir network, checked against the dense factorised oracle and the
//! exact evolution.

use reservoir_tn::liouville::TimeGrid;
use reservoir_tn::models::{random_model, DESK_SEED};
use reservoir_tn::network::{build_rn, contract_system};
use reservoir_tn::oracle::{evolve_exact, evolve_trotter_dense, InteractionMode};

fn main() -> reservoir_tn::Result<()> {
    let model = random_model(DESK_SEED, 2, 4, 1);
    let grid = TimeGrid::new(0.02, 100)?;

    let rn = build_rn(&model, &grid)?;
    let traj = contract_system(&rn, &model, &grid)?;
    let dense = evolve_trotter_dense(&model, &grid, InteractionMode::Factorized)?.trajectory;
    let exact = evolve_exact(&model, &grid)?.trajectory;

    println!("{} sites, bond dimension {}", rn.len(), rn.max_bond_dim());
    println!("{:>6} {:>10} {:>10} {:>12}", "t", "rho_00", "|rho_01|", "vs exact");
    let dist = traj.trace_distances(&exact)?;
    for k in (0..traj.len()).step_by(20) {
        let rho = &traj.states()[k];
        println!("{:>6.2} {:>10.6} {:>10.6} {:>12.3e}", traj.times()[k], rho[(0, 0)].re, rho[(0, 1)].norm(), dist[k]);
    }
    println!("max distance to dense factorised run: {:.3e}", traj.max_trace_distance(&dense)?);
    Ok(())
}
