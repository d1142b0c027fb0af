//! Scenario files, built-in presets, batch runs and file emission.

mod config;
mod output;
pub mod presets;
mod run;

pub use config::{
    from_mat2, load_config, parse_config, to_json, to_mat2, CertificatesConfig, ChannelConfig,
    Complex, ComplexMatrix, ControllerConfig, FixedConfig, FtcsConfig, FtsConfig, OutputConfig,
    OutputFile, Overrides, PolicyConfig, Scenario, ScenarioConfig, ShrinkConfig,
    SimulationConfig, StatesConfig, SystemConfig,
};
pub use output::{certificate_report, write_switch_csv, write_trajectory_csv};
pub use run::{
    certify, compare_policies, execute, run_scenario, CertificateResults, ComparisonRow,
    ObservedDwell, RunReport, SummaryDocument, CERTIFICATE_FILE, COMPARISON_FILE, SUMMARY_FILE,
    SWITCH_FILE, TRAJECTORY_FILE,
};

/// Directory used when neither the command line nor the config names one.
pub fn default_output_dir() -> std::path::PathBuf {
    std::env::var_os("QSWITCH_OUT")
        .map(Into::into)
        .unwrap_or_else(|| "qswitch-out".into())
}
