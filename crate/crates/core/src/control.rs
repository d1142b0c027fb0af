//! Lyapunov function `V = e^T P e` and the two families of switched feedback
//! laws built on it.
//!
//! Every mode pairs a *fractional* channel, whose law cancels the drift term
//! of `dV/dt`, with a *bang-bang* channel `-xi sign(e^T P K s)`. The standard
//! modes put the fractional law on channel 2 for mode 1 (and channel 1 for
//! mode 2); the contractive modes do the opposite and add
//! `Upsilon(t) = -Gamma(t) V + theta_hat` to the fractional numerator.
//!
//! Substituting a law into `dV/dt` gives
//! `dV/dt = -2 xi |e^T P K_b s|` (standard) and
//! `dV/dt = 2 Gamma V - 2 theta_hat - 2 xi |e^T P K_b s|` (contractive), where
//! `K_b` is the bang-bang channel's generator.

use std::fmt;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemModel;

/// Below this magnitude a fractional denominator counts as singular.
pub const SINGULAR_GUARD: f64 = 1e-12;

/// Symmetric positive definite weight matrix `P`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Weight(Matrix3<f64>);

impl Weight {
    pub fn new(p: Matrix3<f64>) -> Result<Self> {
        let asym = (p - p.transpose()).amax();
        if asym > 1e-12 * p.amax().max(1.0) {
            return Err(Error::BadWeightMatrix(format!(
                "not symmetric (deviation {asym:e})"
            )));
        }
        let min_eig = p.symmetric_eigenvalues().min();
        if !(min_eig > 0.0) {
            return Err(Error::BadWeightMatrix(format!(
                "smallest eigenvalue {min_eig:e} is not positive"
            )));
        }
        Ok(Self(p))
    }

    pub fn scaled_identity(scale: f64) -> Result<Self> {
        Self::new(Matrix3::identity() * scale)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    /// `(lambda_max, lambda_min)`.
    pub fn extreme_eigenvalues(&self) -> (f64, f64) {
        let eig = self.0.symmetric_eigenvalues();
        (eig.max(), eig.min())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Drift-cancelling laws M1/M2.
    Standard,
    /// Laws with the `Upsilon` term, hatted M1/M2.
    Contractive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    One,
    Two,
}

impl Mode {
    pub fn other(self) -> Self {
        match self {
            Mode::One => Mode::Two,
            Mode::Two => Mode::One,
        }
    }

    /// 0-based index used for `K_j` and per-mode thresholds.
    pub fn index(self) -> usize {
        match self {
            Mode::One => 0,
            Mode::Two => 1,
        }
    }

    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Mode::One),
            2 => Some(Mode::Two),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mode {}", self.number())
    }
}

/// Time profile `Gamma(t) < 0` of the contractive laws.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GammaFn {
    Constant { value: f64 },
    Affine { slope: f64, intercept: f64 },
}

impl GammaFn {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            GammaFn::Constant { value } => value,
            GammaFn::Affine { slope, intercept } => slope * t + intercept,
        }
    }

    /// Antiderivative `Lambda(t)` with `Lambda(0) = 0`.
    pub fn integral(&self, t: f64) -> f64 {
        match *self {
            GammaFn::Constant { value } => value * t,
            GammaFn::Affine { slope, intercept } => 0.5 * slope * t * t + intercept * t,
        }
    }

    /// Whether `Gamma < 0` on `[0, horizon]`; affine profiles are checked at
    /// both ends.
    pub fn negative_on(&self, horizon: f64) -> bool {
        self.eval(0.0) < 0.0 && self.eval(horizon) < 0.0
    }
}

impl Default for GammaFn {
    fn default() -> Self {
        GammaFn::Constant { value: -1.5 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ControllerSpec {
    pub weight: Weight,
    pub xi: f64,
    pub family: Family,
    pub gamma: GammaFn,
    pub theta_hat: f64,
    pub mode: Mode,
}

impl ControllerSpec {
    /// Checks the parameter constraints and returns non-fatal warnings.
    pub fn validate(&self, horizon: f64) -> Result<Vec<String>> {
        if !(self.xi > 0.0) || !self.xi.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "gain xi must be positive, got {}",
                self.xi
            )));
        }
        let mut warnings = Vec::new();
        if self.family == Family::Contractive {
            if !self.gamma.negative_on(horizon) {
                return Err(Error::InvalidArgument(format!(
                    "Gamma(t) must stay negative on [0, {horizon}]"
                )));
            }
            if self.theta_hat < 0.0 {
                warnings.push(format!(
                    "theta_hat = {} is negative; the contractive stability conditions assume theta_hat > 0",
                    self.theta_hat
                ));
            }
        }
        Ok(warnings)
    }

    /// Channel (0-based) carrying the drift-cancelling law in the active mode.
    pub fn fractional_channel(&self) -> usize {
        fractional_channel(self.family, self.mode)
    }

    pub fn bang_channel(&self) -> usize {
        1 - self.fractional_channel()
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        Self {
            mode,
            ..self.clone()
        }
    }

    /// `Upsilon(t) = -Gamma(t) V + theta_hat` (zero for the standard family).
    pub fn upsilon(&self, v: f64, t: f64) -> f64 {
        match self.family {
            Family::Standard => 0.0,
            Family::Contractive => -self.gamma.eval(t) * v + self.theta_hat,
        }
    }
}

pub fn fractional_channel(family: Family, mode: Mode) -> usize {
    match family {
        Family::Standard => 1 - mode.index(),
        Family::Contractive => mode.index(),
    }
}

/// Tracking error `e = s - s_d` together with the states it came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorState {
    pub e: Vector3<f64>,
    pub s: Vector3<f64>,
    pub target: Vector3<f64>,
}

impl ErrorState {
    pub fn new(s: Vector3<f64>, target: Vector3<f64>) -> Self {
        Self {
            e: s - target,
            s,
            target,
        }
    }
}

/// `sign` with `sign(0) = 0`.
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn lyapunov_value(err: &ErrorState, p: &Weight) -> f64 {
    err.e.dot(&(p.matrix() * err.e))
}

/// Signed `e^T P K s`.
pub fn signed_gap(err: &ErrorState, p: &Weight, k: &Matrix3<f64>) -> f64 {
    err.e.dot(&(p.matrix() * (k * err.s)))
}

pub fn delta_gap(err: &ErrorState, p: &Weight, k: &Matrix3<f64>) -> f64 {
    signed_gap(err, p, k).abs()
}

/// Drift part `e^T P (A s + g)` of `dV/dt / 2`.
pub fn drift_term(err: &ErrorState, model: &SystemModel, p: &Weight) -> f64 {
    err.e.dot(&(p.matrix() * (model.a * err.s + model.g)))
}

pub fn vdot(err: &ErrorState, model: &SystemModel, p: &Weight, u: [f64; 2]) -> f64 {
    2.0 * drift_term(err, model, p)
        + 2.0 * u[0] * signed_gap(err, p, &model.k[0])
        + 2.0 * u[1] * signed_gap(err, p, &model.k[1])
}

/// Feedback law of the active mode at time `t`.
pub fn control(
    err: &ErrorState,
    model: &SystemModel,
    ctrl: &ControllerSpec,
    t: f64,
) -> Result<[f64; 2]> {
    let frac = ctrl.fractional_channel();
    let bang = 1 - frac;
    let denom = signed_gap(err, &ctrl.weight, &model.k[frac]);
    if denom.abs() <= SINGULAR_GUARD {
        return Err(Error::SingularDenominator { t, value: denom });
    }
    let v = lyapunov_value(err, &ctrl.weight);
    let numer = drift_term(err, model, &ctrl.weight) + ctrl.upsilon(v, t);
    let mut u = [0.0; 2];
    u[frac] = numer / -denom;
    u[bang] = -ctrl.xi * sign(signed_gap(err, &ctrl.weight, &model.k[bang]));
    Ok(u)
}

/// Value of `dV/dt` implied by substituting the active law, without forming
/// the control itself.
pub fn closed_loop_vdot(err: &ErrorState, model: &SystemModel, ctrl: &ControllerSpec, t: f64) -> f64 {
    let bang_gap = delta_gap(err, &ctrl.weight, &model.k[ctrl.bang_channel()]);
    let v = lyapunov_value(err, &ctrl.weight);
    -2.0 * ctrl.upsilon(v, t) - 2.0 * ctrl.xi * bang_gap
}
