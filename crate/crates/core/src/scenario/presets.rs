//! Built-in scenarios: a driven qubit (`omega0 = 10`) steered from the pure
//! state `(0, -0.8, 0.6)` to the pure state `(-0.6, 0, -0.8)` under three
//! kinds of decoherence.

use crate::certificates::{Comparison, FtcsWindow};
use crate::control::{Family, GammaFn};
use crate::pauli::{pauli, Mat2, C64};
use crate::switching::{AffineThreshold, PolicyKind};

use super::config::{
    from_mat2, CertificatesConfig, ChannelConfig, ControllerConfig, FixedConfig, FtcsConfig,
    FtsConfig, OutputConfig, PolicyConfig, ScenarioConfig, ShrinkConfig, SimulationConfig,
    StatesConfig, SystemConfig,
};

pub const NAMES: [&str; 3] = ["amplitude", "dephasing", "polarization"];

const OMEGA0: f64 = 10.0;
const WEIGHT: f64 = 0.078;
const GAMMA: f64 = -1.5;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn lowering() -> Mat2 {
    Mat2::new(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

fn system(channels: Vec<(Mat2, f64)>) -> SystemConfig {
    SystemConfig {
        drift: from_mat2(&(pauli(2) * c(0.5 * OMEGA0, 0.0))),
        controls: vec![from_mat2(&pauli(0)), from_mat2(&pauli(1))],
        channels: channels
            .into_iter()
            .map(|(l, rate)| ChannelConfig {
                operator: from_mat2(&l),
                rate,
            })
            .collect(),
    }
}

fn states() -> StatesConfig {
    StatesConfig {
        initial: from_mat2(&Mat2::new(
            c(0.8, 0.0),
            c(0.0, 0.4),
            c(0.0, -0.4),
            c(0.2, 0.0),
        )),
        target: from_mat2(&Mat2::new(
            c(0.1, 0.0),
            c(-0.3, 0.0),
            c(-0.3, 0.0),
            c(0.9, 0.0),
        )),
    }
}

/// `theta_hat = -0.1 |g|^2`, which is zero whenever every channel is Hermitian.
fn controller(g_sq: f64) -> ControllerConfig {
    ControllerConfig {
        weight: [[WEIGHT, 0.0, 0.0], [0.0, WEIGHT, 0.0], [0.0, 0.0, WEIGHT]],
        xi: 1.0,
        family: Family::Contractive,
        gamma: GammaFn::Constant { value: GAMMA },
        theta_hat: -0.1 * g_sq,
    }
}

fn shrink(vartheta: [(f64, f64); 2], varsigma: [(f64, f64); 2]) -> ShrinkConfig {
    let a = |(s, i): (f64, f64)| AffineThreshold::new(s, i);
    ShrinkConfig {
        vartheta: [a(vartheta[0]), a(vartheta[1])],
        varsigma: [a(varsigma[0]), a(varsigma[1])],
    }
}

fn policy(shrink: ShrinkConfig, fixed: Option<FixedConfig>, terminal: f64) -> PolicyConfig {
    PolicyConfig {
        kind: PolicyKind::Shrink,
        fixed,
        shrink: Some(shrink),
        initial_mode: 1,
        terminal_vartheta: terminal,
        min_dwell: 0.0,
    }
}

fn fts() -> FtsConfig {
    FtsConfig {
        w: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        alpha: 0.1,
        c1: 3.0,
        c2: 4.0,
        zeta: 1.0,
    }
}

fn simulation(t_final: f64) -> SimulationConfig {
    SimulationConfig {
        t_final,
        dt: 1e-4,
        event_tol: 1e-9,
    }
}

const TERMINAL_NOTE: &str = "terminal_vartheta is not given; below it both modes satisfy \
    their switching conditions at once and the switching rule becomes ambiguous";

pub fn amplitude() -> ScenarioConfig {
    ScenarioConfig {
        preset: None,
        name: "amplitude".into(),
        notes: vec![
            "xi = 1 and dt are assumed".into(),
            "W = I and zeta = 1 are assumed for the FTS certificate".into(),
            TERMINAL_NOTE.into(),
        ],
        system: system(vec![(lowering(), 0.1)]),
        states: states(),
        controller: controller(0.01),
        policy: policy(
            shrink(
                [(0.0005, 0.0018), (0.00001, 0.000021)],
                [(0.00008, 0.0047), (1e-6, 0.0)],
            ),
            Some(FixedConfig {
                kappa: [0.0018, 0.00021],
                iota: [0.0047, 0.0001],
            }),
            1e-3,
        ),
        simulation: simulation(10.0),
        certificates: CertificatesConfig {
            fts: Some(fts()),
            ftcs: Some(FtcsConfig {
                alpha1: Comparison::Quadratic { coefficient: WEIGHT },
                alpha2: Comparison::Quadratic { coefficient: 0.08 },
                b1: None,
                eta: 0.159,
                varrho: 7.0,
                window: FtcsWindow::FromVarrho,
                reference_eta: Some(0.06),
            }),
        },
        output: OutputConfig::default(),
    }
}

pub fn dephasing() -> ScenarioConfig {
    ScenarioConfig {
        preset: None,
        name: "dephasing".into(),
        notes: vec![
            "xi = 1 and dt are assumed".into(),
            "P = 0.078 I, Gamma = -1.5 and theta_hat are reused from the amplitude case".into(),
            "fixed thresholds reuse the amplitude constants".into(),
            TERMINAL_NOTE.into(),
        ],
        system: system(vec![(pauli(2), 0.1)]),
        states: states(),
        controller: controller(0.0),
        policy: policy(
            shrink([(0.3, 0.0), (0.4, 0.00035)], [(1.2, 0.0002), (1e-6, 0.0)]),
            Some(FixedConfig {
                kappa: [0.0018, 0.00021],
                iota: [0.0047, 0.0001],
            }),
            5e-4,
        ),
        simulation: simulation(1.8),
        certificates: CertificatesConfig {
            fts: Some(fts()),
            ftcs: None,
        },
        output: OutputConfig::default(),
    }
}

pub fn polarization() -> ScenarioConfig {
    ScenarioConfig {
        preset: None,
        name: "polarization".into(),
        notes: vec![
            "xi = 1 and dt are assumed".into(),
            "P = 0.078 I and the initial and target states are assumed to match the other cases"
                .into(),
            "fixed thresholds reuse the amplitude constants".into(),
            TERMINAL_NOTE.into(),
        ],
        system: system(vec![(pauli(2), 0.01), (pauli(1), 0.01), (pauli(0), 0.01)]),
        states: states(),
        controller: controller(0.0),
        policy: policy(
            shrink([(0.01, 0.001), (0.01, 0.002)], [(0.001, 0.0), (1e-6, 0.0)]),
            Some(FixedConfig {
                kappa: [0.0018, 0.00021],
                iota: [0.0047, 0.0001],
            }),
            5e-4,
        ),
        simulation: simulation(2.0),
        certificates: CertificatesConfig {
            fts: Some(fts()),
            ftcs: None,
        },
        output: OutputConfig::default(),
    }
}

pub fn preset(name: &str) -> Option<ScenarioConfig> {
    match name {
        "amplitude" => Some(amplitude()),
        "dephasing" => Some(dephasing()),
        "polarization" => Some(polarization()),
        _ => None,
    }
}

/// One-line parameter digest per preset, for listings.
pub fn describe(cfg: &ScenarioConfig) -> String {
    let fmt_affine = |a: &AffineThreshold| format!("{}V+{}", a.slope, a.intercept);
    let shrink = cfg
        .policy
        .shrink
        .as_ref()
        .map(|s| {
            format!(
                "vartheta=({}, {}) varsigma=({}, {})",
                fmt_affine(&s.vartheta[0]),
                fmt_affine(&s.vartheta[1]),
                fmt_affine(&s.varsigma[0]),
                fmt_affine(&s.varsigma[1])
            )
        })
        .unwrap_or_default();
    let rates: Vec<String> = cfg.system.channels.iter().map(|c| c.rate.to_string()).collect();
    format!(
        "{}: channels={} rates=[{}] T_f={} dt={} xi={} P={}I {} terminal={}",
        cfg.name,
        cfg.system.channels.len(),
        rates.join(", "),
        cfg.simulation.t_final,
        cfg.simulation.dt,
        cfg.controller.xi,
        cfg.controller.weight[0][0],
        shrink,
        cfg.policy.terminal_vartheta
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_build() {
        for name in NAMES {
            let scenario = preset(name).unwrap().build().unwrap();
            assert!((scenario.s0 - nalgebra::Vector3::new(0.0, -0.8, 0.6)).amax() < 1e-15);
            assert!((scenario.sd - nalgebra::Vector3::new(-0.6, 0.0, -0.8)).amax() < 1e-15);
        }
        let amp = amplitude().build().unwrap();
        assert!((amp.controller.theta_hat + 0.001).abs() < 1e-15);
        assert!((amp.model.g.norm_squared() - 0.01).abs() < 1e-15);
    }
}
