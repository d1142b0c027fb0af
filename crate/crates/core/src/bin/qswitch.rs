use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qswitch::scenario::{
    self, certificate_report, certify, compare_policies, execute, load_config, presets, Overrides,
    ScenarioConfig,
};
use qswitch::switching::PolicyKind;
use qswitch::{Error, Result};

#[derive(Parser)]
#[command(name = "qswitch", version, about = "Switching Lyapunov control of an open qubit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Scenario file (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in scenario name.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write trajectory, switch log and summary.
    Run {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        policy: Option<PolicyKind>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        xi: Option<f64>,
        #[arg(long = "t-final")]
        t_final: Option<f64>,
    },
    /// Evaluate the certificate conditions without simulating.
    Certify {
        #[command(flatten)]
        source: Source,
    },
    /// Run one scenario under several switching policies.
    Compare {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_delimiter = ',', default_value = "none,fixed,shrink")]
        policies: Vec<PolicyKind>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in scenarios.
    Presets,
}

fn load(source: &Source) -> Result<ScenarioConfig> {
    match (&source.config, &source.preset) {
        (Some(path), _) => load_config(path),
        (None, Some(name)) => presets::preset(name).ok_or_else(|| Error::Validation {
            path: "preset".into(),
            message: format!("unknown preset `{name}` (available: {})", presets::NAMES.join(", ")),
        }),
        (None, None) => unreachable!("clap requires a source"),
    }
}

fn output_dir(out: Option<PathBuf>, cfg: &ScenarioConfig) -> PathBuf {
    out.or_else(|| cfg.output.directory.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| scenario::default_output_dir().join(&cfg.name))
}

fn run(cfg: &ScenarioConfig, dir: &Path) -> Result<()> {
    let (report, failure) = execute(cfg, dir)?;
    let s = &report.summary;
    println!("scenario   {} ({} policy)", s.scenario, s.policy);
    println!("status     {}", s.status);
    println!("final t    {:.6}", s.final_time);
    println!("fidelity   {:.6}", s.fidelity);
    println!("final V    {:.6e}", s.final_v);
    println!("converged  {}", s.converged);
    println!("switches   {}", s.switches);
    for w in &s.warnings {
        eprintln!("warning: {w}");
    }
    println!("output     {}", dir.display());
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            source,
            policy,
            out,
            dt,
            xi,
            t_final,
        } => {
            let mut cfg = load(&source)?;
            cfg.apply(&Overrides {
                policy,
                dt,
                xi,
                t_final,
            });
            let dir = output_dir(out, &cfg);
            run(&cfg, &dir)
        }
        Command::Certify { source } => {
            let cfg = load(&source)?;
            let scenario = cfg.build()?;
            let results = certify(&scenario, None);
            print!("{}", certificate_report(&scenario.name, &results));
            match results.arithmetic_error() {
                Some(msg) => Err(Error::DomainError(msg.to_string())),
                None => Ok(()),
            }
        }
        Command::Compare {
            source,
            policies,
            out,
        } => {
            let cfg = load(&source)?;
            let dir = output_dir(out, &cfg);
            let rows = compare_policies(&cfg, &policies, &dir)?;
            println!("{:<8} {:<22} {:>10} {:>12} {:>10} {:>8}", "policy", "status", "final_t", "final_V", "fidelity", "switches");
            for r in &rows {
                println!(
                    "{:<8} {:<22} {:>10.4} {:>12.4e} {:>10.6} {:>8}",
                    r.policy.to_string(),
                    r.status,
                    r.final_time,
                    r.final_v,
                    r.fidelity,
                    r.switches
                );
            }
            println!("output   {}", dir.display());
            Ok(())
        }
        Command::Presets => {
            for name in presets::NAMES {
                let cfg = presets::preset(name).expect("listed preset exists");
                println!("{}", presets::describe(&cfg));
                for note in &cfg.notes {
                    println!("    note: {note}");
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
