//! Finite-time stability (FTS) and finite-time contractive stability (FTCS)
//! conditions evaluated as plain arithmetic, plus checks of the resulting
//! error bounds on simulated trajectories.
//!
//! Norm convention: `c1` and `c2` bound the squared error `|e|^2`, while
//! `b1` and `eta` bound the plain distance `|e|`.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::control::{GammaFn, Weight};
use crate::error::{Error, Result};
use crate::switching::Trajectory;

pub const NORM_CONVENTION: &str =
    "c1, c2 bound the squared error |e|^2; b1, eta bound the distance |e|";

/// Default number of grid points on which the FTCS inequality is sampled.
pub const FTCS_GRID: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct FtsCertificate {
    pub weight: Weight,
    pub w: Weight,
    pub alpha: f64,
    pub c1: f64,
    pub c2: f64,
    pub t_final: f64,
    /// Average dwell time.
    pub zeta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DwellCondition {
    /// Lower bound the average dwell time has to exceed; infinite when the
    /// horizon leaves no room for any switching.
    pub required: f64,
    pub pass: bool,
    pub margin: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FtsReport {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub mu: f64,
    pub d: f64,
    /// Largest horizon the first condition admits.
    pub horizon_bound: f64,
    pub horizon_pass: bool,
    /// `horizon_bound - T_f`.
    pub horizon_margin: f64,
    /// Only evaluated when `mu > 1`.
    pub dwell: Option<DwellCondition>,
}

impl FtsReport {
    pub fn pass(&self) -> bool {
        self.horizon_pass && self.dwell.is_none_or(|d| d.pass)
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} must be positive, got {x}"
        )))
    }
}

fn ln_checked(what: &str, x: f64) -> Result<f64> {
    if x > 0.0 {
        Ok(x.ln())
    } else {
        Err(Error::DomainError(format!(
            "logarithm of non-positive {what} ({x})"
        )))
    }
}

pub fn fts_check(cert: &FtsCertificate, g: &Vector3<f64>) -> Result<FtsReport> {
    for (name, x) in [
        ("alpha", cert.alpha),
        ("c1", cert.c1),
        ("c2", cert.c2),
        ("T_f", cert.t_final),
        ("zeta", cert.zeta),
    ] {
        positive(name, x)?;
    }
    let (lambda1, lambda2) = cert.weight.extreme_eigenvalues();
    let (_, lambda3) = cert.w.extreme_eigenvalues();
    let mu = lambda1 / lambda2;
    let d = g.norm_squared() * cert.t_final;

    let numer = lambda1 * cert.c1 + d * lambda3;
    let ratio = numer / (cert.c2 * lambda2);
    let horizon_bound = -ln_checked("(l1 c1 + d l3) / (c2 l2)", ratio)? / cert.alpha;
    let horizon_margin = horizon_bound - cert.t_final;

    let dwell = if mu > 1.0 {
        let denom = ln_checked("l2 c2", lambda2 * cert.c2)? - ln_checked("l1 c1 + d l3", numer)?
            - cert.alpha * cert.t_final;
        let required = if denom > 0.0 {
            cert.t_final * mu.ln() / denom
        } else {
            f64::INFINITY
        };
        Some(DwellCondition {
            required,
            pass: cert.zeta > required,
            margin: cert.zeta - required,
        })
    } else {
        None
    };

    Ok(FtsReport {
        lambda1,
        lambda2,
        lambda3,
        mu,
        d,
        horizon_bound,
        horizon_pass: horizon_margin >= 0.0,
        horizon_margin,
        dwell,
    })
}

/// Class-K comparison function of the error norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Comparison {
    /// `coefficient * x^2`.
    Quadratic { coefficient: f64 },
}

impl Comparison {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Comparison::Quadratic { coefficient } => coefficient * x * x,
        }
    }

    fn coefficient(&self) -> f64 {
        match *self {
            Comparison::Quadratic { coefficient } => coefficient,
        }
    }
}

/// Where the FTCS window sits inside the horizon.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FtcsWindow {
    /// `[varrho, T_f]`.
    #[default]
    FromVarrho,
    /// `[T_f - varrho, T_f]`.
    Terminal,
}

impl FtcsWindow {
    pub fn bounds(&self, varrho: f64, t_final: f64) -> (f64, f64) {
        match self {
            FtcsWindow::FromVarrho => (varrho, t_final),
            FtcsWindow::Terminal => (t_final - varrho, t_final),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FtcsCertificate {
    pub gamma: GammaFn,
    pub theta_hat: f64,
    pub alpha1: Comparison,
    pub alpha2: Comparison,
    pub b1: f64,
    pub eta: f64,
    pub varrho: f64,
    pub t_final: f64,
    pub window: FtcsWindow,
}

impl FtcsCertificate {
    pub fn validate(&self) -> Result<()> {
        positive("b1", self.b1)?;
        positive("eta", self.eta)?;
        positive("T_f", self.t_final)?;
        positive("alpha1 coefficient", self.alpha1.coefficient())?;
        if !(self.alpha1.coefficient() < self.alpha2.coefficient()) {
            return Err(Error::InvalidArgument(
                "alpha1 must lie strictly below alpha2".into(),
            ));
        }
        if !(self.eta < self.b1) {
            return Err(Error::InvalidArgument(format!(
                "eta ({}) must be smaller than b1 ({})",
                self.eta, self.b1
            )));
        }
        if !(self.varrho > 0.0 && self.varrho < self.t_final) {
            return Err(Error::InvalidArgument(format!(
                "varrho ({}) must lie in (0, T_f = {})",
                self.varrho, self.t_final
            )));
        }
        if !self.gamma.negative_on(self.t_final) {
            return Err(Error::InvalidArgument(format!(
                "Gamma(t) must stay negative on [0, {}]",
                self.t_final
            )));
        }
        Ok(())
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if t >= self.varrho && t <= self.t_final {
            Ok(())
        } else {
            Err(Error::DomainError(format!(
                "t = {t} lies outside [{}, {}]",
                self.varrho, self.t_final
            )))
        }
    }

    /// `e^{Lambda(t) - Lambda(varrho)} alpha2(b1)
    ///  + theta_hat e^{Lambda(t)} int_varrho^t e^{-Lambda(w)} dw`.
    fn bracket(&self, t: f64) -> f64 {
        let lambda = |x: f64| self.gamma.integral(x);
        let decay = (lambda(t) - lambda(self.varrho)).exp();
        decay * self.alpha2.eval(self.b1) + self.theta_hat * discounted_length(&self.gamma, self.varrho, t)
    }
}

/// `int_a^t e^{Lambda(t) - Lambda(w)} dw`.
fn discounted_length(gamma: &GammaFn, a: f64, t: f64) -> f64 {
    match *gamma {
        GammaFn::Constant { value } if value != 0.0 => -(value * (t - a)).exp_m1() / -value,
        GammaFn::Constant { .. } => t - a,
        GammaFn::Affine { .. } => {
            let lt = gamma.integral(t);
            adaptive_simpson(&|w: f64| (lt - gamma.integral(w)).exp(), a, t, 1e-15)
        }
    }
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Left-hand side of the FTCS inequality at time `t`; the certificate holds
/// where this is non-positive.
pub fn ftcs_condition(cert: &FtcsCertificate, t: f64) -> Result<f64> {
    cert.check_time(t)?;
    Ok(cert.bracket(t) - cert.alpha1.eval(cert.eta))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FtcsReport {
    pub max_lhs: f64,
    pub argmax_t: f64,
    pub pass: bool,
}

/// Samples the FTCS inequality on `points` evenly spaced times in
/// `[varrho, T_f]`.
pub fn ftcs_check(cert: &FtcsCertificate, points: usize) -> Result<FtcsReport> {
    cert.validate()?;
    let points = points.max(2);
    let (a, b) = (cert.varrho, cert.t_final);
    let mut worst = (f64::NEG_INFINITY, a);
    for i in 0..points {
        let t = if i + 1 == points {
            b
        } else {
            a + (b - a) * i as f64 / (points - 1) as f64
        };
        let lhs = ftcs_condition(cert, t)?;
        if lhs > worst.0 {
            worst = (lhs, t);
        }
    }
    Ok(FtcsReport {
        max_lhs: worst.0,
        argmax_t: worst.1,
        pass: worst.0 <= 0.0,
    })
}

/// `sqrt(bracket / lambda2)`: the error radius implied by the FTCS bracket
/// at time `t`.
pub fn eta_bound(cert: &FtcsCertificate, lambda2: f64, t: f64) -> Result<f64> {
    positive("lambda2", lambda2)?;
    cert.check_time(t)?;
    let radicand = cert.bracket(t) / lambda2;
    if radicand < 0.0 {
        return Err(Error::DomainError(format!(
            "negative radicand {radicand:e} in the eta bound"
        )));
    }
    Ok(radicand.sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FtsTrajectoryReport {
    pub pass: bool,
    pub initial_sq_error: f64,
    pub max_sq_error: f64,
}

/// Checks `|e(0)|^2 < c1` and `|e(t)|^2 < c2` on every sample.
pub fn verify_fts_trajectory(
    traj: &Trajectory,
    target: &Vector3<f64>,
    c1: f64,
    c2: f64,
) -> FtsTrajectoryReport {
    let sq = |s: &Vector3<f64>| (s - target).norm_squared();
    let initial_sq_error = traj.samples.first().map_or(0.0, |x| sq(&x.s));
    let max_sq_error = traj.samples.iter().map(|x| sq(&x.s)).fold(0.0, f64::max);
    FtsTrajectoryReport {
        pass: !traj.samples.is_empty() && initial_sq_error < c1 && max_sq_error < c2,
        initial_sq_error,
        max_sq_error,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FtcsTrajectoryReport {
    pub pass: bool,
    pub start: f64,
    pub end: f64,
    pub max_error: f64,
    pub samples: usize,
}

/// Checks `|e(t)| < eta` over the configured window.
pub fn verify_ftcs_trajectory(
    traj: &Trajectory,
    target: &Vector3<f64>,
    eta: f64,
    varrho: f64,
    t_final: f64,
    window: FtcsWindow,
) -> Result<FtcsTrajectoryReport> {
    let (start, end) = window.bounds(varrho, t_final);
    let (first, last) = match (traj.first_time(), traj.last_time()) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::WindowOutOfRange {
                start,
                end,
                first: f64::NAN,
                last: f64::NAN,
            })
        }
    };
    let slack = 1e-9 * t_final.abs().max(1.0);
    if start < first - slack || end > last + slack || start > end {
        return Err(Error::WindowOutOfRange {
            start,
            end,
            first,
            last,
        });
    }
    let mut max_error = 0.0_f64;
    let mut samples = 0;
    for x in traj
        .samples
        .iter()
        .filter(|x| x.t >= start - slack && x.t <= end + slack)
    {
        max_error = max_error.max((x.s - target).norm());
        samples += 1;
    }
    Ok(FtcsTrajectoryReport {
        pass: max_error < eta,
        start,
        end,
        max_error,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::Mode;
    use crate::switching::Sample;

    fn fts(c1: f64, c2: f64, alpha: f64, t_final: f64) -> FtsCertificate {
        FtsCertificate {
            weight: Weight::scaled_identity(1.0).unwrap(),
            w: Weight::scaled_identity(1.0).unwrap(),
            alpha,
            c1,
            c2,
            t_final,
            zeta: 1.0,
        }
    }

    fn amplitude_ftcs() -> FtcsCertificate {
        FtcsCertificate {
            gamma: GammaFn::Constant { value: -1.5 },
            theta_hat: -0.001,
            alpha1: Comparison::Quadratic { coefficient: 0.078 },
            alpha2: Comparison::Quadratic { coefficient: 0.08 },
            b1: 2.96_f64.sqrt(),
            eta: 0.159,
            varrho: 7.0,
            t_final: 10.0,
            window: FtcsWindow::FromVarrho,
        }
    }

    fn still_trajectory(s: Vector3<f64>, times: &[f64]) -> Trajectory {
        Trajectory {
            samples: times
                .iter()
                .map(|&t| Sample {
                    t,
                    s,
                    u: [0.0; 2],
                    v: 0.0,
                    vdot: 0.0,
                    mode: Mode::One,
                    delta_active: 0.0,
                })
                .collect(),
            segments: Vec::new(),
            dt: 1.0,
            t_final: *times.last().unwrap(),
        }
    }

    #[test]
    fn worked_fts_example() {
        let report = fts_check(&fts(1.0, 4.0, 0.1, 10.0), &Vector3::zeros()).unwrap();
        assert!((report.horizon_bound - 10.0 * 4.0_f64.ln()).abs() < 1e-12);
        assert!(report.horizon_pass && report.dwell.is_none() && report.pass());
    }

    #[test]
    fn no_slack_fails() {
        let report = fts_check(&fts(2.0, 2.0, 0.1, 0.5), &Vector3::zeros()).unwrap();
        assert_eq!(report.horizon_bound, 0.0);
        assert!(!report.horizon_pass);
    }

    #[test]
    fn dwell_condition_when_weights_differ() {
        let mut cert = fts(1.0, 40.0, 0.1, 10.0);
        cert.weight = Weight::new(nalgebra::Matrix3::from_diagonal(&Vector3::new(2.0, 1.0, 1.0))).unwrap();
        let report = fts_check(&cert, &Vector3::zeros()).unwrap();
        let denom = 40.0_f64.ln() - 2.0_f64.ln() - 1.0;
        let dwell = report.dwell.unwrap();
        assert!((dwell.required - 10.0 * 2.0_f64.ln() / denom).abs() < 1e-12);
        assert_eq!(dwell.pass, 1.0 > dwell.required);
    }

    #[test]
    fn ftcs_first_term_at_horizon() {
        let mut cert = amplitude_ftcs();
        cert.theta_hat = 0.0;
        let lhs = ftcs_condition(&cert, 10.0).unwrap();
        let expected = 0.08 * 2.96 * (-4.5_f64).exp() - 0.078 * 0.159 * 0.159;
        assert!((lhs - expected).abs() < 1e-15);
        assert!(matches!(ftcs_condition(&cert, 6.0), Err(Error::DomainError(_))));
    }

    #[test]
    fn eta_collapses_to_b1_at_varrho() {
        let mut cert = amplitude_ftcs();
        cert.theta_hat = 0.0;
        cert.alpha2 = Comparison::Quadratic { coefficient: 0.078 };
        cert.alpha1 = Comparison::Quadratic { coefficient: 0.07 };
        let eta = eta_bound(&cert, 0.078, 7.0).unwrap();
        assert!((eta - cert.b1).abs() < 1e-14);
    }

    #[test]
    fn affine_and_constant_gamma_agree_when_slope_is_zero() {
        let constant = amplitude_ftcs();
        let affine = FtcsCertificate {
            gamma: GammaFn::Affine {
                slope: 0.0,
                intercept: -1.5,
            },
            ..constant.clone()
        };
        for t in [7.0, 8.3, 10.0] {
            let a = ftcs_condition(&constant, t).unwrap();
            let b = ftcs_condition(&affine, t).unwrap();
            assert!((a - b).abs() < 1e-14, "{t}: {a} vs {b}");
        }
    }

    #[test]
    fn trajectory_verifiers() {
        let target = Vector3::new(-0.6, 0.0, -0.8);
        let traj = still_trajectory(target, &[0.0, 5.0, 10.0]);
        assert!(verify_fts_trajectory(&traj, &target, 1e-9, 1e-9).pass);
        let r = verify_ftcs_trajectory(&traj, &target, 1e-3, 7.0, 10.0, FtcsWindow::FromVarrho).unwrap();
        assert!(r.pass && r.max_error == 0.0);
        let zero_eta = verify_ftcs_trajectory(&traj, &target, 0.0, 7.0, 10.0, FtcsWindow::FromVarrho).unwrap();
        assert!(!zero_eta.pass);
        assert!(matches!(
            verify_ftcs_trajectory(&traj, &target, 0.1, 7.0, 12.0, FtcsWindow::Terminal),
            Err(Error::WindowOutOfRange { .. })
        ));
    }
}
