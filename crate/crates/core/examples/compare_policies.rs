//! No switching, fixed thresholds and shrink thresholds side by side. Files
//! land in `$QSWITCH_OUT/compare` (default `qswitch-out/compare`).

use qswitch::scenario::{compare_policies, default_output_dir, presets};
use qswitch::switching::PolicyKind;

fn main() -> qswitch::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "amplitude".into());
    let cfg = presets::preset(&name).ok_or_else(|| {
        qswitch::Error::InvalidArgument(format!("unknown preset {name}"))
    })?;
    let dir = default_output_dir().join("compare").join(&name);
    let rows = compare_policies(
        &cfg,
        &[PolicyKind::None, PolicyKind::Fixed, PolicyKind::Shrink],
        &dir,
    )?;
    for r in rows {
        println!(
            "{:<7} {:<20} t_end {:.4}  V {:.4e}  F {:.5}  switches {}",
            r.policy.to_string(),
            r.status,
            r.final_time,
            r.final_v,
            r.fidelity,
            r.switches
        );
    }
    println!("written to {}", dir.display());
    Ok(())
}
