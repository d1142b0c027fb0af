//! A scenario written as JSON on top of a preset, then run with file output.
//! Pass a path to use your own file instead.

use qswitch::scenario::{default_output_dir, load_config, parse_config, run_scenario, to_json};

const DOC: &str = r#"{
    "preset": "polarization",
    "name": "polarization-fast",
    "controller": { "xi": 2.0, "gamma": { "kind": "affine", "slope": -0.1, "intercept": -1.2 } },
    "simulation": { "dt": 2e-4 },
    "output": { "formats": ["trajectory", "summary"] }
}"#;

fn main() -> qswitch::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => load_config(path)?,
        None => parse_config(DOC)?,
    };
    println!("{}", to_json(&cfg));
    let dir = default_output_dir().join(&cfg.name);
    let report = run_scenario(&cfg, &dir)?;
    let s = &report.summary;
    println!(
        "{}: F = {:.5}, V = {:.3e}, {} switches, files in {}",
        s.scenario,
        s.fidelity,
        s.final_v,
        s.switches,
        dir.display()
    );

    // Validation errors point at the offending field.
    if let Err(e) = parse_config(r#"{"preset": "amplitude", "policy": {"initial_mode": 3}}"#) {
        println!("rejected: {e}");
    }
    Ok(())
}
