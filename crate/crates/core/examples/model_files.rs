//! Presets and the JSON model format.

use reservoir_tn::models::{model_to_string, parse_model_str, preset, PRESET_NAMES};
use std::collections::BTreeMap;

fn main() -> reservoir_tn::Result<()> {
    for name in PRESET_NAMES {
        let m = preset(name, &BTreeMap::new())?;
        println!("{name:<12} d_S = {} d_R = {:<3} n = {} gamma = {}", m.d_s(), m.d_r(), m.n_terms(), m.gamma());
    }

    let params = BTreeMap::from([("gamma".to_string(), 0.5), ("bath_spins".to_string(), 1.0)]);
    let m = preset("dephasing", &params)?;
    let text = model_to_string(&m);
    let back = parse_model_str(&text, "<memory>")?;
    println!("round trip identical: {}", back == m);
    println!("{}", text.lines().take(6).collect::<Vec<_>>().join("\n"));
    Ok(())
}
