//! The amplitude-damping preset under shrink-threshold switching.

use qswitch::scenario::presets;

fn main() -> qswitch::Result<()> {
    let scenario = presets::amplitude().build()?;
    let out = scenario.simulate()?;
    for ev in &out.log.events {
        println!(
            "switch {} at t = {:.6}: {} -> {} ({} trigger)",
            ev.index, ev.tau, ev.from, ev.to, ev.trigger
        );
    }
    let stride = out.trajectory.samples.len() / 10;
    for x in out.trajectory.samples.iter().step_by(stride.max(1)) {
        println!("t = {:.3}  V = {:.5e}  {}", x.t, x.v, x.mode);
    }
    let s = &out.summary;
    println!(
        "stopped at t = {:.4} ({:?}), fidelity {:.5}, V = {:.3e}",
        s.final_time, s.terminated_early, s.fidelity, s.final_v
    );
    Ok(())
}
