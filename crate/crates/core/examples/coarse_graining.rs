//! Merging pairs of time sites of a fine network against a network built
//! directly on the coarse grid, and the two-point correlator on both.

use reservoir_tn::liouville::TimeGrid;
use reservoir_tn::models::{random_model, DESK_SEED};
use reservoir_tn::network::{build_rn, coarse_grain, contract_system, two_point_correlation};
use reservoir_tn::tensor::trace_distance;

fn main() -> reservoir_tn::Result<()> {
    let model = random_model(DESK_SEED, 2, 4, 1);
    for tau in [0.1, 0.05, 0.025] {
        let coarse_grid = TimeGrid::from_total(1.0, tau)?;
        let direct = build_rn(&model, &coarse_grid)?;
        let merged = coarse_grain(&build_rn(&model, &TimeGrid::from_total(1.0, tau / 2.0)?)?, 2)?;

        let a = contract_system(&direct, &model, &coarse_grid)?;
        let b = contract_system(&merged, &model, &coarse_grid)?;
        let (s1, s2) = ((0.2 / tau).round() as usize, (0.8 / tau).round() as usize);
        let ca = two_point_correlation(&direct, s1, 1, s2, 1)?;
        let cb = two_point_correlation(&merged, s1, 1, s2, 1)?;
        println!(
            "tau {tau:<6} final distance {:.3e}  correlator {ca:.5} vs {cb:.5}",
            trace_distance(a.final_state(), b.final_state())?
        );
    }
    Ok(())
}
