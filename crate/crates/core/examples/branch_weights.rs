//! Branch enumeration: idealised weights against the closed form, the
//! weights a real model produces, and the Rényi bound on random
//! decompositions.

use reservoir_tn::estimators::{
    branch_entropy_bound, branch_weights_idealized, branch_weights_model, entropy_estimate, normalization_check,
    random_branches, renyi_bound_check, EstimateInputs, LogBase,
};
use reservoir_tn::liouville::TimeGrid;
use reservoir_tn::models::{random_model, DESK_SEED};
use reservoir_tn::network::build_rn;

fn main() -> reservoir_tn::Result<()> {
    let (n, gtau, k) = (1, 0.1, 8);
    let ideal = branch_weights_idealized(n, gtau, k)?;
    let closed = entropy_estimate(&EstimateInputs::new(n, 1.0, gtau * k as f64, gtau, LogBase::Natural)?, true)?;
    println!("{} branches: enumerated {:.12}, closed form {closed:.12}", ideal.len(), branch_entropy_bound(&ideal));

    let (sum, binomial) = normalization_check(2, 0.05, 6)?;
    println!("normalisation: {sum:.15} vs {binomial:.15}");

    let model = random_model(DESK_SEED, 2, 4, 1);
    let rn = build_rn(&model, &TimeGrid::new(0.1, 5)?)?;
    let real = branch_weights_model(&rn)?;
    println!(
        "desk model, 5 sites: branch entropy {:.4} (idealised {:.4})",
        branch_entropy_bound(&real),
        branch_entropy_bound(&branch_weights_idealized(1, 0.1, 5)?)
    );

    let mut worst = f64::NEG_INFINITY;
    for seed in 0..100 {
        let branches = random_branches(seed, 6, 12);
        for alpha in [1.0, 2.0, 3.0] {
            let c = renyi_bound_check(&branches, alpha)?;
            worst = worst.max(c.entropy - c.bound);
        }
    }
    println!("largest S_alpha - bound over 300 checks: {worst:.3e}");
    Ok(())
}
