//! Closed-loop integration with event-detected mode switching.
//!
//! The engine advances the Bloch state with a fixed-step classical RK4 whose
//! stages each re-evaluate the active feedback law. After every step it asks
//! whether the active mode has come within its threshold of the mode's
//! singular value set (`Delta - kappa <= 0`) or of its invariant set
//! (`|dV/dt| - iota <= 0`). A positive answer is localized by bisection on the
//! sub-step length, logged, and answered by toggling to the other mode.
//!
//! A sign change of `e^T P K s` or of `dV/dt` across a step means the state
//! passed through the corresponding set inside the step even if both
//! endpoints sit above threshold; such crossings count as triggers too.

use std::fmt;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::control::{
    closed_loop_vdot, control, lyapunov_value, signed_gap, vdot, ControllerSpec, ErrorState, Mode,
    SINGULAR_GUARD,
};
use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::pauli::{bloch_matrix, fidelity_of_matrices, Mat2};

/// Allowed excursion of `|s|` above one before a step is rejected.
pub const NORM_SLACK: f64 = 1e-3;

/// Shrink threshold `slope * V + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineThreshold {
    pub slope: f64,
    pub intercept: f64,
}

impl AffineThreshold {
    pub const fn new(slope: f64, intercept: f64) -> Self {
        Self { slope, intercept }
    }

    pub fn eval(&self, v: f64) -> f64 {
        self.slope * v + self.intercept
    }

    fn validate(&self, name: &str) -> Result<()> {
        let ok = self.slope >= 0.0
            && self.intercept >= 0.0
            && (self.slope > 0.0 || self.intercept > 0.0)
            && self.slope.is_finite()
            && self.intercept.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "shrink threshold {name} needs slope >= 0, intercept >= 0, not both zero; got {self:?}"
            )))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Thresholds {
    /// Never switch.
    None,
    /// Constant `kappa_j` (singular) and `iota_j` (invariant) per mode.
    Fixed { singular: [f64; 2], invariant: [f64; 2] },
    /// `vartheta_j(V)` (singular) and `varsigma_j(V)` (invariant) per mode.
    Shrink {
        singular: [AffineThreshold; 2],
        invariant: [AffineThreshold; 2],
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    None,
    Fixed,
    Shrink,
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyKind::None => "none",
            PolicyKind::Fixed => "fixed",
            PolicyKind::Shrink => "shrink",
        })
    }
}

impl std::str::FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(PolicyKind::None),
            "fixed" => Ok(PolicyKind::Fixed),
            "shrink" => Ok(PolicyKind::Shrink),
            other => Err(Error::InvalidArgument(format!(
                "unknown policy `{other}` (expected none, fixed or shrink)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwitchingPolicy {
    pub thresholds: Thresholds,
    pub initial_mode: Mode,
    /// Stop once `e^T P e` falls to this value.
    pub terminal_vartheta: f64,
    /// Suppress switching within this time of the previous switch; 0 disables.
    pub min_dwell: f64,
}

impl SwitchingPolicy {
    pub fn kind(&self) -> PolicyKind {
        match self.thresholds {
            Thresholds::None => PolicyKind::None,
            Thresholds::Fixed { .. } => PolicyKind::Fixed,
            Thresholds::Shrink { .. } => PolicyKind::Shrink,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.thresholds {
            Thresholds::None => {}
            Thresholds::Fixed {
                singular,
                invariant,
            } => {
                for (name, x) in [
                    ("kappa1", singular[0]),
                    ("kappa2", singular[1]),
                    ("iota1", invariant[0]),
                    ("iota2", invariant[1]),
                ] {
                    if !(x > 0.0) || !x.is_finite() {
                        return Err(Error::InvalidArgument(format!(
                            "fixed threshold {name} must be positive, got {x}"
                        )));
                    }
                }
            }
            Thresholds::Shrink {
                singular,
                invariant,
            } => {
                singular[0].validate("vartheta1")?;
                singular[1].validate("vartheta2")?;
                invariant[0].validate("varsigma1")?;
                invariant[1].validate("varsigma2")?;
            }
        }
        if !(self.terminal_vartheta >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "terminal threshold must be non-negative, got {}",
                self.terminal_vartheta
            )));
        }
        if !(self.min_dwell >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "minimum dwell must be non-negative, got {}",
                self.min_dwell
            )));
        }
        Ok(())
    }

    /// `(singular, invariant)` thresholds for `mode` at Lyapunov value `v`.
    pub fn thresholds(&self, mode: Mode, v: f64) -> Option<(f64, f64)> {
        let j = mode.index();
        match &self.thresholds {
            Thresholds::None => None,
            Thresholds::Fixed {
                singular,
                invariant,
            } => Some((singular[j], invariant[j])),
            Thresholds::Shrink {
                singular,
                invariant,
            } => Some((singular[j].eval(v), invariant[j].eval(v))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trigger {
    Singular,
    Invariant,
}

impl fmt::Display for Trigger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trigger::Singular => "singular",
            Trigger::Invariant => "invariant",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub s: Vector3<f64>,
    pub u: [f64; 2],
    pub v: f64,
    pub vdot: f64,
    pub mode: Mode,
    /// `|e^T P K s|` for the active mode's fractional channel.
    pub delta_active: f64,
}

/// Controls applied at the four RK4 stages of one (sub)step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlSegment {
    pub t0: f64,
    pub h: f64,
    pub stage_u: [[f64; 2]; 4],
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub segments: Vec<ControlSegment>,
    pub dt: f64,
    pub t_final: f64,
}

impl Trajectory {
    pub fn first_time(&self) -> Option<f64> {
        self.samples.first().map(|s| s.t)
    }

    pub fn last_time(&self) -> Option<f64> {
        self.samples.last().map(|s| s.t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwitchEvent {
    pub index: usize,
    pub tau: f64,
    pub from: Mode,
    pub to: Mode,
    pub trigger: Trigger,
    /// Trigger scalar (`Delta - threshold` or `|dV/dt| - threshold`) at `tau`.
    pub trigger_value: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SwitchLog {
    pub events: Vec<SwitchEvent>,
}

impl SwitchLog {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.events.iter().map(|e| e.tau)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Termination {
    /// `e^T P e` fell below the terminal threshold.
    TerminalCondition { t: f64 },
    /// With no switching policy the state reached the active mode's singular
    /// value set, where the feedback law is undefined.
    SingularSet { t: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub final_time: f64,
    pub final_s: Vector3<f64>,
    pub final_rho: Mat2,
    pub fidelity: f64,
    pub final_v: f64,
    pub switches: usize,
    pub min_gap: f64,
    pub terminated_early: Option<Termination>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimulationSettings {
    pub t_final: f64,
    pub dt: f64,
    pub event_tol: f64,
}

impl Default for SimulationSettings {
    fn default() -> Self {
        Self {
            t_final: 10.0,
            dt: 1e-4,
            event_tol: 1e-9,
        }
    }
}

impl SimulationSettings {
    pub fn validate(&self) -> Result<()> {
        for (name, x) in [
            ("t_final", self.t_final),
            ("dt", self.dt),
            ("event_tol", self.event_tol),
        ] {
            if !(x > 0.0) || !x.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {x}"
                )));
            }
        }
        Ok(())
    }

    /// Number of uniform steps covering the horizon.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt + 1e-9).floor() as usize
    }
}

#[derive(Clone, Debug)]
pub struct SimulationOutcome {
    pub trajectory: Trajectory,
    pub log: SwitchLog,
    pub summary: RunSummary,
}

/// One RK4 (sub)step and the stage controls it used.
#[derive(Clone, Copy, Debug)]
pub struct StepResult {
    pub s: Vector3<f64>,
    pub stage_u: [[f64; 2]; 4],
}

/// Classical RK4 over a right-hand side that also reports the control it used.
fn rk4<F>(s: &Vector3<f64>, t: f64, dt: f64, f: F) -> Result<StepResult>
where
    F: Fn(Vector3<f64>, f64) -> Result<(Vector3<f64>, [f64; 2])>,
{
    let half = 0.5 * dt;
    let (k1, u1) = f(*s, t)?;
    let (k2, u2) = f(s + k1 * half, t + half)?;
    let (k3, u3) = f(s + k2 * half, t + half)?;
    let (k4, u4) = f(s + k3 * dt, t + dt)?;
    Ok(StepResult {
        s: s + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0),
        stage_u: [u1, u2, u3, u4],
    })
}

/// One closed-loop step; every stage re-evaluates the feedback law.
pub fn step(
    s: &Vector3<f64>,
    target: &Vector3<f64>,
    model: &SystemModel,
    ctrl: &ControllerSpec,
    t: f64,
    dt: f64,
) -> Result<StepResult> {
    rk4(s, t, dt, |x, tt| {
        let u = control(&ErrorState::new(x, *target), model, ctrl, tt)?;
        Ok((model.rhs(&x, u), u))
    })
}

/// Trigger raised by the active mode at the given state, if any. Singular
/// wins when both conditions hold.
pub fn switch_predicate(
    err: &ErrorState,
    model: &SystemModel,
    ctrl: &ControllerSpec,
    policy: &SwitchingPolicy,
    t: f64,
) -> Option<Trigger> {
    let v = lyapunov_value(err, &ctrl.weight);
    let (sing, inv) = policy.thresholds(ctrl.mode, v)?;
    let probe = Probe::at(err, model, ctrl, t);
    if probe.gap.abs() - sing <= 0.0 {
        Some(Trigger::Singular)
    } else if probe.vdot.abs() - inv <= 0.0 {
        Some(Trigger::Invariant)
    } else {
        None
    }
}

/// Signed quantities the switching tests are built on.
#[derive(Clone, Copy, Debug)]
struct Probe {
    gap: f64,
    vdot: f64,
    v: f64,
}

impl Probe {
    fn at(err: &ErrorState, model: &SystemModel, ctrl: &ControllerSpec, t: f64) -> Self {
        Self {
            gap: signed_gap(err, &ctrl.weight, &model.k[ctrl.fractional_channel()]),
            vdot: closed_loop_vdot(err, model, ctrl, t),
            v: lyapunov_value(err, &ctrl.weight),
        }
    }
}

fn flipped(now: f64, reference: f64) -> bool {
    reference != 0.0 && now * reference <= 0.0
}

/// Trigger tests for the active mode. Without a switching policy only the
/// breakdown of the fractional law is watched.
#[derive(Clone, Copy)]
struct Detector<'a> {
    policy: &'a SwitchingPolicy,
}

impl Detector<'_> {
    fn switching(&self) -> bool {
        self.policy.kind() != PolicyKind::None
    }

    /// `(singular, invariant)` scalars, negative when triggered; crossings
    /// relative to `reference` count as triggers.
    fn scalars(&self, probe: &Probe, mode: Mode, reference: Option<&Probe>) -> (f64, f64) {
        let (sing_thr, inv_thr) = self
            .policy
            .thresholds(mode, probe.v)
            .unwrap_or((SINGULAR_GUARD, f64::NEG_INFINITY));
        let mut sing = probe.gap.abs() - sing_thr;
        let mut inv = probe.vdot.abs() - inv_thr;
        if let Some(r) = reference {
            if flipped(probe.gap, r.gap) {
                sing = -probe.gap.abs() - sing_thr;
            }
            if inv_thr.is_finite() && flipped(probe.vdot, r.vdot) {
                inv = -probe.vdot.abs() - inv_thr;
            }
        }
        (sing, inv)
    }

    fn classify(&self, probe: &Probe, mode: Mode, reference: Option<&Probe>) -> Option<(Trigger, f64)> {
        let (sing, inv) = self.scalars(probe, mode, reference);
        if sing <= 0.0 {
            Some((Trigger::Singular, sing))
        } else if inv <= 0.0 {
            Some((Trigger::Invariant, inv))
        } else {
            None
        }
    }
}

/// Result of integrating one candidate sub-step.
enum Attempt {
    Clear(StepResult),
    /// The sub-step ends in (or passes through) a triggered state. `None`
    /// when a stage landed exactly on the singular set.
    Fired(Option<StepResult>),
}

struct Engine<'a> {
    model: &'a SystemModel,
    target: Vector3<f64>,
    settings: SimulationSettings,
    detector: Detector<'a>,
}

impl Engine<'_> {
    fn probe(&self, s: &Vector3<f64>, ctrl: &ControllerSpec, t: f64) -> Probe {
        Probe::at(&ErrorState::new(*s, self.target), self.model, ctrl, t)
    }

    fn sample(&self, s: &Vector3<f64>, ctrl: &ControllerSpec, t: f64, fallback_u: [f64; 2]) -> Sample {
        let err = ErrorState::new(*s, self.target);
        let u = control(&err, self.model, ctrl, t).unwrap_or(fallback_u);
        Sample {
            t,
            s: *s,
            u,
            v: lyapunov_value(&err, &ctrl.weight),
            vdot: vdot(&err, self.model, &ctrl.weight, u),
            mode: ctrl.mode,
            delta_active: signed_gap(&err, &ctrl.weight, &self.model.k[ctrl.fractional_channel()])
                .abs(),
        }
    }

    fn attempt(
        &self,
        s: &Vector3<f64>,
        ctrl: &ControllerSpec,
        t: f64,
        h: f64,
        reference: &Probe,
    ) -> Result<Attempt> {
        match step(s, &self.target, self.model, ctrl, t, h) {
            Ok(r) => {
                let p = self.probe(&r.s, ctrl, t + h);
                let (sing, inv) = self.detector.scalars(&p, ctrl.mode, Some(reference));
                // With nothing to switch to, a step wrecked by the diverging
                // fractional law marks arrival on the singular set as well.
                let wrecked = !self.detector.switching() && !(r.s.norm() <= 1.0 + NORM_SLACK);
                if sing.min(inv) <= 0.0 || wrecked {
                    Ok(Attempt::Fired(Some(r)))
                } else {
                    Ok(Attempt::Clear(r))
                }
            }
            Err(Error::SingularDenominator { .. }) => Ok(Attempt::Fired(None)),
            Err(e) => Err(e),
        }
    }

    /// Bisects `(0, h]` down to the event tolerance. Returns the last clear
    /// sub-step (if any) and the first fired one.
    fn localize(
        &self,
        s: &Vector3<f64>,
        ctrl: &ControllerSpec,
        t: f64,
        h: f64,
        reference: &Probe,
        fired: Option<StepResult>,
    ) -> Result<Localized> {
        let (mut lo, mut hi) = (0.0, h);
        let mut clear = None;
        let mut hit = fired;
        while hi - lo > self.settings.event_tol {
            let mid = 0.5 * (lo + hi);
            match self.attempt(s, ctrl, t, mid, reference)? {
                Attempt::Fired(r) => {
                    hi = mid;
                    hit = r;
                }
                Attempt::Clear(r) => {
                    lo = mid;
                    clear = Some(r);
                }
            }
        }
        Ok(Localized {
            lo,
            clear,
            hi,
            hit,
        })
    }
}

struct Localized {
    lo: f64,
    clear: Option<StepResult>,
    hi: f64,
    hit: Option<StepResult>,
}

fn check_norm(s: &Vector3<f64>, t: f64) -> Result<()> {
    let norm = s.norm();
    if !(norm <= 1.0 + NORM_SLACK) {
        return Err(Error::StepTooLarge { t, norm });
    }
    Ok(())
}

/// A run that may have stopped on a runtime failure; the trajectory and log
/// cover everything up to that point.
#[derive(Debug)]
pub struct PartialRun {
    pub outcome: SimulationOutcome,
    pub failure: Option<Error>,
}

/// Runs the switching algorithm from `s0` towards `target` over the horizon.
pub fn simulate(
    model: &SystemModel,
    s0: &Vector3<f64>,
    target: &Vector3<f64>,
    ctrl: &ControllerSpec,
    policy: &SwitchingPolicy,
    settings: &SimulationSettings,
) -> Result<SimulationOutcome> {
    let run = simulate_partial(model, s0, target, ctrl, policy, settings)?;
    match run.failure {
        Some(e) => Err(e),
        None => Ok(run.outcome),
    }
}

/// Like [`simulate`], but keeps the trajectory when the run fails part way.
/// Invalid inputs are still reported as an outright error.
pub fn simulate_partial(
    model: &SystemModel,
    s0: &Vector3<f64>,
    target: &Vector3<f64>,
    ctrl: &ControllerSpec,
    policy: &SwitchingPolicy,
    settings: &SimulationSettings,
) -> Result<PartialRun> {
    settings.validate()?;
    policy.validate()?;
    ctrl.validate(settings.t_final)?;
    for (name, v) in [("initial state", s0), ("target state", target)] {
        if v.norm() > 1.0 + crate::pauli::BLOCH_TOL {
            return Err(Error::NonPhysicalState(format!(
                "{name} has |s| = {} > 1",
                v.norm()
            )));
        }
    }

    let engine = Engine {
        model,
        target: *target,
        settings: *settings,
        detector: Detector { policy },
    };
    let mut run = Run {
        trajectory: Trajectory {
            samples: Vec::with_capacity(settings.steps() + 1),
            segments: Vec::with_capacity(settings.steps()),
            dt: settings.dt,
            t_final: settings.t_final,
        },
        log: SwitchLog::default(),
        ctrl: ctrl.with_mode(policy.initial_mode),
        s: *s0,
        t: 0.0,
        last_u: [0.0; 2],
        terminated: None,
    };
    let failure = run.advance(&engine, policy).err();
    let summary = summarize(&run.trajectory, &run.log, target, run.terminated);
    Ok(PartialRun {
        outcome: SimulationOutcome {
            trajectory: run.trajectory,
            log: run.log,
            summary,
        },
        failure,
    })
}

struct Run {
    trajectory: Trajectory,
    log: SwitchLog,
    ctrl: ControllerSpec,
    s: Vector3<f64>,
    t: f64,
    last_u: [f64; 2],
    terminated: Option<Termination>,
}

impl Run {
    fn terminal(&self, engine: &Engine<'_>, policy: &SwitchingPolicy) -> bool {
        lyapunov_value(&ErrorState::new(self.s, engine.target), &self.ctrl.weight)
            <= policy.terminal_vartheta
    }

    fn dwell_ok(&self, policy: &SwitchingPolicy) -> bool {
        policy.min_dwell <= 0.0
            || self
                .log
                .events
                .last()
                .is_none_or(|e| self.t - e.tau >= policy.min_dwell)
    }

    fn push_sample(&mut self, engine: &Engine<'_>) {
        let sample = engine.sample(&self.s, &self.ctrl, self.t, self.last_u);
        self.trajectory.samples.push(sample);
    }

    fn accept(&mut self, t0: f64, h: f64, r: StepResult, t_new: f64) -> Result<()> {
        check_norm(&r.s, t_new)?;
        self.trajectory.segments.push(ControlSegment {
            t0,
            h,
            stage_u: r.stage_u,
        });
        self.last_u = r.stage_u[3];
        self.s = r.s;
        self.t = t_new;
        Ok(())
    }

    fn toggle(&mut self, engine: &Engine<'_>, trigger: Trigger, value: f64) -> Result<()> {
        let next = self.ctrl.with_mode(self.ctrl.mode.other());
        let probe = engine.probe(&self.s, &next, self.t);
        if let Some((dest_trigger, _)) = engine.detector.classify(&probe, next.mode, None) {
            return Err(Error::AssumptionViolation {
                t: self.t,
                from: self.ctrl.mode,
                to: next.mode,
                trigger,
                dest_trigger,
            });
        }
        self.log.events.push(SwitchEvent {
            index: self.log.events.len() + 1,
            tau: self.t,
            from: self.ctrl.mode,
            to: next.mode,
            trigger,
            trigger_value: value,
        });
        self.ctrl = next;
        Ok(())
    }

    fn advance(&mut self, engine: &Engine<'_>, policy: &SwitchingPolicy) -> Result<()> {
        let settings = engine.settings;
        let switching = engine.detector.switching();

        // Steps 1-3 at t = 0.
        if self.terminal(engine, policy) {
            self.terminated = Some(Termination::TerminalCondition { t: self.t });
        } else if switching {
            let probe = engine.probe(&self.s, &self.ctrl, self.t);
            if let Some((trigger, value)) = engine.detector.classify(&probe, self.ctrl.mode, None) {
                self.toggle(engine, trigger, value)?;
            }
        }
        self.push_sample(engine);
        if self.terminated.is_some() {
            return Ok(());
        }

        let n = settings.steps();
        for i in 1..=n {
            let grid_t = if i == n && (settings.t_final - n as f64 * settings.dt).abs() <= 1e-9 * settings.t_final {
                settings.t_final
            } else {
                i as f64 * settings.dt
            };
            while self.t < grid_t {
                let (t, h) = (self.t, grid_t - self.t);
                let reference = engine.probe(&self.s, &self.ctrl, t);
                let attempt = engine.attempt(&self.s, &self.ctrl, t, h, &reference)?;
                let fired = match attempt {
                    Attempt::Clear(r) => {
                        self.accept(t, h, r, grid_t)?;
                        None
                    }
                    Attempt::Fired(r) if !self.dwell_ok(policy) => match r {
                        Some(r) => {
                            self.accept(t, h, r, grid_t)?;
                            None
                        }
                        None => {
                            return Err(Error::SingularDenominator {
                                t,
                                value: reference.gap,
                            })
                        }
                    },
                    Attempt::Fired(r) => Some(r),
                };

                if let Some(r) = fired {
                    let loc = engine.localize(&self.s, &self.ctrl, t, h, &reference, r)?;
                    if !switching {
                        // Stop on the last state where the law was still defined.
                        if let Some(c) = loc.clear {
                            self.accept(t, loc.lo, c, t + loc.lo)?;
                        }
                        self.push_sample(engine);
                        self.terminated = Some(Termination::SingularSet { t: self.t });
                        return Ok(());
                    }
                    let hit = match loc.hit {
                        Some(hit) => hit,
                        None => step(&self.s, &engine.target, engine.model, &self.ctrl, t, loc.hi)?,
                    };
                    let t_event = if loc.hi >= h { grid_t } else { t + loc.hi };
                    self.accept(t, loc.hi, hit, t_event)?;
                    let p = engine.probe(&self.s, &self.ctrl, self.t);
                    let (sing, inv) = engine.detector.scalars(&p, self.ctrl.mode, Some(&reference));
                    let (trigger, value) = if sing <= 0.0 || sing <= inv {
                        (Trigger::Singular, sing)
                    } else {
                        (Trigger::Invariant, inv)
                    };
                    self.toggle(engine, trigger, value)?;
                }

                self.push_sample(engine);
                if self.terminal(engine, policy) {
                    self.terminated = Some(Termination::TerminalCondition { t: self.t });
                    return Ok(());
                }
            }
        }
        Ok(())
    }
}

fn summarize(
    trajectory: &Trajectory,
    log: &SwitchLog,
    target: &Vector3<f64>,
    terminated: Option<Termination>,
) -> RunSummary {
    let last = trajectory
        .samples
        .last()
        .expect("trajectory has an initial sample");
    let final_rho = bloch_matrix(&last.s);
    let stats = dwell_stats(log, 0.0, f64::INFINITY);
    RunSummary {
        final_time: last.t,
        final_s: last.s,
        final_rho,
        fidelity: fidelity_of_matrices(&final_rho, &bloch_matrix(target)),
        final_v: last.v,
        switches: log.len(),
        min_gap: stats.min_gap,
        terminated_early: terminated,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DwellStats {
    /// Switches with `tau` in `[t1, t2)`.
    pub count: usize,
    /// Smallest gap between consecutive switches in the window.
    pub min_gap: f64,
    pub avg_dwell: f64,
}

pub fn dwell_stats(log: &SwitchLog, t1: f64, t2: f64) -> DwellStats {
    let taus: Vec<f64> = log.times().filter(|&tau| tau >= t1 && tau < t2).collect();
    let min_gap = taus
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let span = if t2.is_finite() {
        t2 - t1
    } else {
        taus.last().map_or(0.0, |last| last - t1)
    };
    DwellStats {
        count: taus.len(),
        min_gap,
        avg_dwell: span / taus.len().max(1) as f64,
    }
}
