//! Closed-form entropy and sufficient reservoir dimension, in both log
//! conventions, next to the full two-term entropy.

use reservoir_tn::estimators::{dsuff, entropy_estimate, EstimateInputs, LogBase};

fn main() -> reservoir_tn::Result<()> {
    for base in [LogBase::Base10, LogBase::Natural] {
        let inputs = EstimateInputs::new(2, 1.0, 1.0, 0.2, base)?;
        let d = dsuff(&inputs)?;
        println!("{base:?}: S = {:.4}, d_suff = {:.4e}", d.entropy_s, d.d_suff);
    }

    println!("{:>10} {:>10} {:>10}", "gamma*tau", "full", "simple");
    for gtau in [0.1, 0.01, 0.001] {
        let inputs = EstimateInputs::new(1, 1.0, 1.0, gtau, LogBase::Natural)?;
        println!("{gtau:>10} {:>10.4} {:>10.4}", entropy_estimate(&inputs, true)?, entropy_estimate(&inputs, false)?);
    }
    Ok(())
}
