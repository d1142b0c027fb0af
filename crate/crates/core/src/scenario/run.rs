use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::certificates::{
    eta_bound, ftcs_check, fts_check, verify_ftcs_trajectory, verify_fts_trajectory, FtcsReport,
    FtcsTrajectoryReport, FtsReport, FtsTrajectoryReport, FTCS_GRID,
};
use crate::control::Family;
use crate::error::{Error, Result};
use crate::switching::{
    dwell_stats, simulate_partial, PartialRun, PolicyKind, SimulationOutcome, Termination,
};

use super::config::{from_mat2, ComplexMatrix, OutputFile, Scenario, ScenarioConfig};
use super::output::{
    write_certificate_report, write_summary_json, write_switch_csv, write_trajectory_csv,
};

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const SWITCH_FILE: &str = "switches.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CERTIFICATE_FILE: &str = "certificates.txt";
pub const COMPARISON_FILE: &str = "comparison.csv";

impl Scenario {
    pub fn simulate_partial(&self) -> Result<PartialRun> {
        simulate_partial(
            &self.model,
            &self.s0,
            &self.sd,
            &self.controller,
            &self.policy,
            &self.settings,
        )
    }

    pub fn simulate(&self) -> Result<SimulationOutcome> {
        let run = self.simulate_partial()?;
        match run.failure {
            Some(e) => Err(e),
            None => Ok(run.outcome),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ObservedDwell {
    pub count: usize,
    pub min_gap: f64,
    pub avg_dwell: f64,
}

/// Certificate arithmetic plus, when a run is supplied, the trajectory
/// checks. Failures of individual checks are kept as messages so the rest
/// of the report survives.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CertificateResults {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fts: Option<FtsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fts_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed_dwell: Option<ObservedDwell>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fts_trajectory: Option<FtsTrajectoryReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ftcs: Option<FtcsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ftcs_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_computed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_reference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ftcs_trajectory: Option<FtcsTrajectoryReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ftcs_trajectory_error: Option<String>,
}

impl CertificateResults {
    /// First arithmetic failure, ignoring trajectory-window problems.
    pub fn arithmetic_error(&self) -> Option<&str> {
        self.fts_error.as_deref().or(self.ftcs_error.as_deref())
    }
}

pub fn certify(scenario: &Scenario, outcome: Option<&SimulationOutcome>) -> CertificateResults {
    let mut out = CertificateResults {
        eta_reference: scenario.reference_eta,
        ..Default::default()
    };
    if let Some(cert) = &scenario.fts {
        match fts_check(cert, &scenario.model.g) {
            Ok(r) => out.fts = Some(r),
            Err(e) => out.fts_error = Some(e.to_string()),
        }
        if let Some(o) = outcome {
            let end = o.summary.final_time;
            let d = dwell_stats(&o.log, 0.0, end);
            out.observed_dwell = Some(ObservedDwell {
                count: d.count,
                min_gap: d.min_gap,
                avg_dwell: d.avg_dwell,
            });
            out.fts_trajectory = Some(verify_fts_trajectory(
                &o.trajectory,
                &scenario.sd,
                cert.c1,
                cert.c2,
            ));
        }
    }
    if let Some(cert) = &scenario.ftcs {
        match ftcs_check(cert, FTCS_GRID) {
            Ok(r) => out.ftcs = Some(r),
            Err(e) => out.ftcs_error = Some(e.to_string()),
        }
        let (_, lambda2) = scenario.controller.weight.extreme_eigenvalues();
        match eta_bound(cert, lambda2, cert.t_final) {
            Ok(eta) => out.eta_computed = Some(eta),
            Err(e) => out.ftcs_error = out.ftcs_error.take().or(Some(e.to_string())),
        }
        if let Some(o) = outcome {
            match verify_ftcs_trajectory(
                &o.trajectory,
                &scenario.sd,
                cert.eta,
                cert.varrho,
                cert.t_final,
                cert.window,
            ) {
                Ok(r) => out.ftcs_trajectory = Some(r),
                Err(e) => out.ftcs_trajectory_error = Some(e.to_string()),
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct SummaryDocument {
    pub scenario: String,
    pub policy: PolicyKind,
    pub family: Family,
    pub xi: f64,
    /// `ok`, or the kind of failure that stopped the run.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub final_time: f64,
    pub final_s: [f64; 3],
    pub final_rho: ComplexMatrix,
    pub fidelity: f64,
    pub final_v: f64,
    /// Whether `V` reached the terminal threshold.
    pub converged: bool,
    pub switches: usize,
    /// `null` with fewer than two switches.
    pub min_gap: Option<f64>,
    pub terminated_early: Option<Termination>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub certificates: CertificateResults,
}

#[derive(Debug)]
pub struct RunReport {
    pub directory: PathBuf,
    pub summary: SummaryDocument,
    pub outcome: SimulationOutcome,
}

fn summarize(
    scenario: &Scenario,
    outcome: &SimulationOutcome,
    failure: Option<&Error>,
    certificates: CertificateResults,
) -> SummaryDocument {
    let s = &outcome.summary;
    SummaryDocument {
        scenario: scenario.name.clone(),
        policy: scenario.policy.kind(),
        family: scenario.controller.family,
        xi: scenario.controller.xi,
        status: failure.map_or("ok", Error::kind).to_string(),
        error: failure.map(|e| e.to_string()),
        final_time: s.final_time,
        final_s: [s.final_s[0], s.final_s[1], s.final_s[2]],
        final_rho: from_mat2(&s.final_rho),
        fidelity: s.fidelity,
        final_v: s.final_v,
        converged: matches!(s.terminated_early, Some(Termination::TerminalCondition { .. })),
        switches: s.switches,
        min_gap: s.min_gap.is_finite().then_some(s.min_gap),
        terminated_early: s.terminated_early,
        warnings: scenario.warnings.clone(),
        certificates,
    }
}

/// Runs a scenario and writes its files into `dir`. A run that fails part
/// way still writes what it produced; the failure is returned alongside.
pub fn execute(cfg: &ScenarioConfig, dir: &Path) -> Result<(RunReport, Option<Error>)> {
    let scenario = cfg.build()?;
    let PartialRun { outcome, failure } = scenario.simulate_partial()?;
    let certificates = certify(&scenario, Some(&outcome));
    let summary = summarize(&scenario, &outcome, failure.as_ref(), certificates);

    std::fs::create_dir_all(dir)?;
    for file in &scenario.outputs {
        match file {
            OutputFile::Trajectory => write_trajectory_csv(&dir.join(TRAJECTORY_FILE), &outcome.trajectory)?,
            OutputFile::Switches => write_switch_csv(&dir.join(SWITCH_FILE), &outcome.log)?,
            OutputFile::Summary => write_summary_json(&dir.join(SUMMARY_FILE), &summary)?,
            OutputFile::Certificates => {
                if scenario.fts.is_some() || scenario.ftcs.is_some() {
                    write_certificate_report(
                        &dir.join(CERTIFICATE_FILE),
                        &scenario.name,
                        &summary.certificates,
                    )?
                }
            }
        }
    }
    let report = RunReport {
        directory: dir.to_path_buf(),
        summary,
        outcome,
    };
    Ok((report, failure))
}

pub fn run_scenario(cfg: &ScenarioConfig, dir: &Path) -> Result<RunReport> {
    match execute(cfg, dir)? {
        (report, None) => Ok(report),
        (_, Some(e)) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub policy: PolicyKind,
    pub status: String,
    pub final_time: f64,
    pub final_v: f64,
    pub fidelity: f64,
    pub switches: usize,
    pub directory: PathBuf,
}

/// Runs the same scenario under each policy in parallel, one subdirectory
/// per run, and writes a `comparison.csv` table.
pub fn compare_policies(
    cfg: &ScenarioConfig,
    policies: &[PolicyKind],
    dir: &Path,
) -> Result<Vec<ComparisonRow>> {
    if policies.len() < 2 {
        return Err(Error::InvalidArgument(
            "compare needs at least two policies".into(),
        ));
    }
    let rows = policies
        .par_iter()
        .enumerate()
        .map(|(i, &policy)| {
            let mut cfg = cfg.clone();
            cfg.policy.kind = policy;
            let sub = dir.join(format!("{i}_{policy}"));
            let (report, _) = execute(&cfg, &sub)?;
            let s = &report.summary;
            Ok(ComparisonRow {
                policy,
                status: s.status.clone(),
                final_time: s.final_time,
                final_v: s.final_v,
                fidelity: s.fidelity,
                switches: s.switches,
                directory: sub,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut w = csv::Writer::from_path(dir.join(COMPARISON_FILE))
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
    w.write_record(["policy", "status", "final_time", "final_V", "fidelity", "switches"])
        .map_err(io)?;
    for r in &rows {
        w.write_record([
            r.policy.to_string(),
            r.status.clone(),
            format!("{:.16e}", r.final_time),
            format!("{:.16e}", r.final_v),
            format!("{:.16e}", r.fidelity),
            r.switches.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(rows)
}
