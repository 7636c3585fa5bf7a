//! Finite memory of a fast-mixing bath: mutual information between time
//! sites falls with separation, and dropping old interactions costs less
//! the more recent history is kept.

use reservoir_tn::liouville::TimeGrid;
use reservoir_tn::models::preset;
use reservoir_tn::network::{build_rn, compress, contract_system, mutual_information, tail_cut, TruncationPolicy};
use reservoir_tn::tensor::trace_distance;

fn main() -> reservoir_tn::Result<()> {
    let model = preset("fast-mixing", &Default::default())?;
    let grid = TimeGrid::new(0.1, 20)?;
    let rn = build_rn(&model, &grid)?;
    let (c, _) = compress(&rn, &TruncationPolicy::default())?;

    for sep in 1..=6 {
        println!("separation {sep}: I = {:.4e}", mutual_information(&c, 4..5, 4 + sep..5 + sep)?);
    }

    let full = contract_system(&rn, &model, &grid)?;
    for keep in [2, 5, 10, 15, 20] {
        let cut = contract_system(&tail_cut(&rn, keep)?, &model, &grid)?;
        println!("keep last {keep:>2}: final error {:.3e}", trace_distance(full.final_state(), cut.final_state())?);
    }
    Ok(())
}
