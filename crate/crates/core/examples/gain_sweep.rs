//! Bang-bang gain sweep over all presets, run in parallel.

use rayon::prelude::*;
use qswitch::scenario::{presets, Overrides};

fn main() {
    let jobs: Vec<(&str, f64)> = presets::NAMES
        .iter()
        .flat_map(|&p| [0.5, 1.0, 2.0, 5.0].map(move |xi| (p, xi)))
        .collect();
    let lines: Vec<String> = jobs
        .par_iter()
        .map(|&(name, xi)| {
            let mut cfg = presets::preset(name).unwrap();
            cfg.apply(&Overrides {
                xi: Some(xi),
                ..Overrides::default()
            });
            let result = cfg.build().and_then(|s| s.simulate());
            match result {
                Ok(o) => format!(
                    "{name:<12} xi={xi:<3} F={:.5} V={:.3e} t_end={:.3} switches={}",
                    o.summary.fidelity, o.summary.final_v, o.summary.final_time, o.summary.switches
                ),
                Err(e) => format!("{name:<12} xi={xi:<3} {}", e),
            }
        })
        .collect();
    for l in lines {
        println!("{l}");
    }
}
