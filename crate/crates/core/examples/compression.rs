//! Canonical compression of the reservoir network: bond entropies, bond
//! dimensions and the trajectory error each cutoff costs.

use reservoir_tn::liouville::TimeGrid;
use reservoir_tn::models::preset;
use reservoir_tn::network::{build_rn, compress, contract_system, TruncationPolicy};

fn main() -> reservoir_tn::Result<()> {
    let model = preset("spin-star", &Default::default())?;
    let grid = TimeGrid::new(0.05, 60)?;
    let rn = build_rn(&model, &grid)?;
    let reference = contract_system(&rn, &model, &grid)?;

    println!("{:>8} {:>6} {:>10} {:>12}", "cutoff", "bond", "max S", "error");
    for cutoff in [0.0, 1e-10, 1e-6, 1e-3, 1e-2] {
        let policy = TruncationPolicy { cutoff, ..Default::default() };
        let (c, report) = compress(&rn, &policy)?;
        let err = reference.max_trace_distance(&contract_system(&c, &model, &grid)?)?;
        println!("{cutoff:>8.0e} {:>6} {:>10.4} {err:>12.3e}", c.max_bond_dim(), report.max_entropy());
    }

    let (_, report) = compress(&rn, &TruncationPolicy::default())?;
    let profile: Vec<String> = report.entropies.iter().step_by(10).map(|s| format!("{s:.3}")).collect();
    println!("entropy every 10 bonds: {}", profile.join(" "));
    Ok(())
}
