//! The first-order interaction step splits into 2n+1 system ⊗ reservoir
//! pairs. Their sum reproduces the assembled superoperator exactly.

use reservoir_tn::liouville::{interaction_factorize, interaction_first_order, to_split_order};
use reservoir_tn::models::random_model;

fn main() -> reservoir_tn::Result<()> {
    for n in 1..=3 {
        let model = random_model(7 + n as u64, 2, 3, n);
        let tau = 0.05;
        let f = interaction_factorize(&model, tau)?;
        let assembled = to_split_order(interaction_first_order(&model, tau).matrix(), model.d_s(), model.d_r())?;
        let dev = (assembled - f.sum()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        println!("n = {n}: {} pairs, max deviation {dev:.2e}", f.len());
    }
    Ok(())
}
