//! File emitters. Floats are written with 17 significant digits so equal runs
//! give byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::certificates::NORM_CONVENTION;
use crate::error::{Error, Result};
use crate::switching::{SwitchLog, Trajectory};

use super::run::{CertificateResults, SummaryDocument};

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record([
        "t", "s1", "s2", "s3", "u1", "u2", "V", "Vdot", "mode", "delta_active",
    ])
    .map_err(csv_error)?;
    for x in &traj.samples {
        w.write_record([
            num(x.t),
            num(x.s[0]),
            num(x.s[1]),
            num(x.s[2]),
            num(x.u[0]),
            num(x.u[1]),
            num(x.v),
            num(x.vdot),
            x.mode.number().to_string(),
            num(x.delta_active),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_switch_csv(path: &Path, log: &SwitchLog) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(["m", "tau", "from_mode", "to_mode", "trigger", "trigger_value"])
        .map_err(csv_error)?;
    for ev in &log.events {
        w.write_record([
            ev.index.to_string(),
            num(ev.tau),
            ev.from.number().to_string(),
            ev.to.number().to_string(),
            ev.trigger.to_string(),
            num(ev.trigger_value),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_json(path: &Path, summary: &SummaryDocument) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, summary).map_err(|e| Error::Io(e.into()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Plain `key = value` lines, one per quantity.
pub fn certificate_report(name: &str, results: &CertificateResults) -> String {
    let mut out = String::new();
    let mut line = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
    line("scenario", name.to_string());
    line("norm_convention", NORM_CONVENTION.to_string());
    if let Some(fts) = &results.fts {
        line("fts.lambda1", num(fts.lambda1));
        line("fts.lambda2", num(fts.lambda2));
        line("fts.lambda3", num(fts.lambda3));
        line("fts.mu", num(fts.mu));
        line("fts.d", num(fts.d));
        line("fts.horizon_bound", num(fts.horizon_bound));
        line("fts.horizon_margin", num(fts.horizon_margin));
        line("fts.horizon_pass", fts.horizon_pass.to_string());
        match &fts.dwell {
            Some(d) => {
                line("fts.dwell_required", num(d.required));
                line("fts.dwell_margin", num(d.margin));
                line("fts.dwell_pass", d.pass.to_string());
            }
            None => line("fts.dwell", "not required (mu <= 1)".into()),
        }
        line("fts.pass", fts.pass().to_string());
    }
    if let Some(err) = &results.fts_error {
        line("fts.error", err.clone());
    }
    if let Some(obs) = &results.observed_dwell {
        line("observed.switches", obs.count.to_string());
        line("observed.min_gap", num(obs.min_gap));
        line("observed.avg_dwell", num(obs.avg_dwell));
    }
    if let Some(tr) = &results.fts_trajectory {
        line("fts_trajectory.initial_sq_error", num(tr.initial_sq_error));
        line("fts_trajectory.max_sq_error", num(tr.max_sq_error));
        line("fts_trajectory.pass", tr.pass.to_string());
    }
    if let Some(ftcs) = &results.ftcs {
        line("ftcs.max_lhs", num(ftcs.max_lhs));
        line("ftcs.argmax_t", num(ftcs.argmax_t));
        line("ftcs.pass", ftcs.pass.to_string());
    }
    if let Some(err) = &results.ftcs_error {
        line("ftcs.error", err.clone());
    }
    if let Some(eta) = results.eta_computed {
        line("ftcs.eta_computed", num(eta));
    }
    if let Some(eta) = results.eta_reference {
        line("ftcs.eta_reference", num(eta));
    }
    if let Some(tr) = &results.ftcs_trajectory {
        line("ftcs_trajectory.window_start", num(tr.start));
        line("ftcs_trajectory.window_end", num(tr.end));
        line("ftcs_trajectory.max_error", num(tr.max_error));
        line("ftcs_trajectory.samples", tr.samples.to_string());
        line("ftcs_trajectory.pass", tr.pass.to_string());
    }
    if let Some(err) = &results.ftcs_trajectory_error {
        line("ftcs_trajectory.error", err.clone());
    }
    out
}

pub fn write_certificate_report(path: &Path, name: &str, results: &CertificateResults) -> Result<()> {
    std::fs::write(path, certificate_report(name, results))?;
    Ok(())
}
