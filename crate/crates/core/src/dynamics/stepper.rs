//! Explicit Runge–Kutta integrators on flat real state vectors.

use serde::{Deserialize, Serialize};

use super::generator::OdeSystem;
use crate::{Error, Result};

/// RK4 is stable on the imaginary axis up to |λ·dt| = 2√2; the guard keeps a
/// margin below that.
pub const RK4_STABILITY_LIMIT: f64 = 2.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepperKind {
    Rk4Fixed,
    RkAdaptive,
}

impl std::str::FromStr for StepperKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4-fixed" | "rk4" => Ok(StepperKind::Rk4Fixed),
            "rk-adaptive" | "adaptive" => Ok(StepperKind::RkAdaptive),
            _ => Err(Error::InvalidStepper(format!("unknown stepper `{s}`"))),
        }
    }
}

/// Missing JSON fields take the values of [`StepperConfig::adaptive`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperConfig {
    pub kind: StepperKind,
    /// Step for rk4-fixed, initial step guess for rk-adaptive (µs).
    #[serde(default = "defaults::dt")]
    pub dt: f64,
    #[serde(default = "defaults::rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "defaults::abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "defaults::max_steps")]
    pub max_steps: u64,
}

mod defaults {
    use super::StepperConfig;
    pub fn dt() -> f64 {
        StepperConfig::adaptive().dt
    }
    pub fn rel_tol() -> f64 {
        StepperConfig::adaptive().rel_tol
    }
    pub fn abs_tol() -> f64 {
        StepperConfig::adaptive().abs_tol
    }
    pub fn max_steps() -> u64 {
        StepperConfig::adaptive().max_steps
    }
}

impl StepperConfig {
    pub fn rk4(dt: f64) -> Self {
        StepperConfig {
            kind: StepperKind::Rk4Fixed,
            dt,
            ..Self::adaptive()
        }
    }

    pub fn adaptive() -> Self {
        StepperConfig {
            kind: StepperKind::RkAdaptive,
            dt: 1e-3,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_steps: 50_000_000,
        }
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.dt) || !ok(self.rel_tol) || !ok(self.abs_tol) || self.max_steps == 0 {
            return Err(Error::InvalidStepper(format!(
                "dt, tolerances and max_steps must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Counters shared by both integrators.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: u64,
    pub rejected: u64,
    pub rhs_evals: u64,
}

fn axpy_into(out: &mut [f64], y: &[f64], h: f64, terms: &[(f64, &[f64])]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o = y[i] + h * acc;
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub struct Rk4 {
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(n: usize) -> Self {
        Rk4 {
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
        }
    }

    pub fn step<S: OdeSystem>(&mut self, sys: &S, y: &mut [f64], h: f64) {
        let [k1, k2, k3, k4] = &mut self.k;
        sys.rhs(y, k1);
        axpy_into(&mut self.tmp, y, 0.5 * h, &[(1.0, k1)]);
        sys.rhs(&self.tmp, k2);
        axpy_into(&mut self.tmp, y, 0.5 * h, &[(1.0, k2)]);
        sys.rhs(&self.tmp, k3);
        axpy_into(&mut self.tmp, y, h, &[(1.0, k3)]);
        sys.rhs(&self.tmp, k4);
        for i in 0..y.len() {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }

    /// Advances from t0 to t1 in equal steps no longer than `dt`.
    pub fn advance<S: OdeSystem>(
        &mut self,
        sys: &S,
        y: &mut [f64],
        t0: f64,
        t1: f64,
        dt: f64,
        stats: &mut StepStats,
        max_steps: u64,
    ) -> Result<()> {
        let n = ((t1 - t0) / dt - 1e-9).ceil().max(1.0) as u64;
        if stats.accepted + n > max_steps {
            return Err(Error::StepCapExceeded {
                steps: max_steps,
                t: t0,
            });
        }
        let h = (t1 - t0) / n as f64;
        for _ in 0..n {
            self.step(sys, y, h);
        }
        stats.accepted += n;
        stats.rhs_evals += 4 * n;
        Ok(())
    }
}

// Dormand–Prince 5(4) tableau; the nodes c_i are not needed for an
// autonomous system.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// PI step control constants (Hairer–Wanner).
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - 0.75 * BETA;
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// Dormand–Prince 5(4) with FSAL and PI step control. The error norm is
/// ‖err‖₂ / (abs_tol + rel_tol·max(‖y‖₂, ‖y_new‖₂)).
pub struct DormandPrince {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y_new: Vec<f64>,
    h: f64,
    fac_old: f64,
    fsal: bool,
}

impl DormandPrince {
    pub fn new(n: usize, h0: f64) -> Self {
        DormandPrince {
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
            y_new: vec![0.0; n],
            h: h0,
            fac_old: 1e-4,
            fsal: false,
        }
    }

    /// Must be called after `y` is modified outside `advance`.
    pub fn invalidate(&mut self) {
        self.fsal = false;
    }

    /// Current step-size proposal.
    pub fn step_size(&self) -> f64 {
        self.h
    }

    /// Integrates from t0 to exactly t1, adapting the step.
    #[allow(clippy::too_many_arguments)]
    pub fn advance<S: OdeSystem>(
        &mut self,
        sys: &S,
        y: &mut [f64],
        t0: f64,
        t1: f64,
        rel_tol: f64,
        abs_tol: f64,
        stats: &mut StepStats,
        max_steps: u64,
    ) -> Result<()> {
        let mut t = t0;
        if !self.fsal {
            sys.rhs(y, &mut self.k[0]);
            stats.rhs_evals += 1;
            self.fsal = true;
        }
        while t < t1 {
            if stats.accepted + stats.rejected >= max_steps {
                return Err(Error::StepCapExceeded {
                    steps: max_steps,
                    t,
                });
            }
            let remaining = t1 - t;
            let last = self.h >= remaining * (1.0 - 1e-12);
            let h = if last { remaining } else { self.h };
            if h <= 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepUnderflow { t });
            }
            let err = self.trial(sys, y, h, rel_tol, abs_tol);
            stats.rhs_evals += 6;
            if !err.is_finite() {
                return Err(Error::StepUnderflow { t });
            }
            let fac11 = err.powf(EXPO);
            if err <= 1.0 {
                let fac = (fac11 / self.fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                self.fac_old = err.max(1e-4);
                y.copy_from_slice(&self.y_new);
                self.k.swap(0, 6);
                t = if last { t1 } else { t + h };
                stats.accepted += 1;
                let proposal = h / fac;
                // a clipped final step should not shrink the next proposal
                self.h = if last { proposal.max(self.h) } else { proposal };
            } else {
                stats.rejected += 1;
                self.h = h / (fac11 / SAFETY).min(1.0 / FAC_MIN);
            }
        }
        Ok(())
    }

    fn trial<S: OdeSystem>(&mut self, sys: &S, y: &[f64], h: f64, rel_tol: f64, abs_tol: f64) -> f64 {
        let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
        axpy_into(&mut self.tmp, y, h, &[(A21, k1)]);
        sys.rhs(&self.tmp, k2);
        axpy_into(&mut self.tmp, y, h, &[(A31, k1), (A32, k2)]);
        sys.rhs(&self.tmp, k3);
        axpy_into(&mut self.tmp, y, h, &[(A41, k1), (A42, k2), (A43, k3)]);
        sys.rhs(&self.tmp, k4);
        axpy_into(&mut self.tmp, y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]);
        sys.rhs(&self.tmp, k5);
        axpy_into(
            &mut self.tmp,
            y,
            h,
            &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)],
        );
        sys.rhs(&self.tmp, k6);
        axpy_into(
            &mut self.y_new,
            y,
            h,
            &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)],
        );
        sys.rhs(&self.y_new, k7);
        let mut err_sq = 0.0;
        for i in 0..y.len() {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            err_sq += e * e;
        }
        let scale = abs_tol + rel_tol * norm(y).max(norm(&self.y_new));
        err_sq.sqrt() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Harmonic oscillator x'' = -x written as a first-order system.
    struct Oscillator;

    impl OdeSystem for Oscillator {
        fn len(&self) -> usize {
            2
        }
        fn rhs(&self, y: &[f64], dy: &mut [f64]) {
            dy[0] = y[1];
            dy[1] = -y[0];
        }
    }

    fn rk4_error(dt: f64) -> f64 {
        let mut y = [1.0, 0.0];
        let mut stats = StepStats::default();
        Rk4::new(2)
            .advance(&Oscillator, &mut y, 0.0, 3.0, dt, &mut stats, u64::MAX)
            .unwrap();
        ((y[0] - 3f64.cos()).powi(2) + (y[1] + 3f64.sin()).powi(2)).sqrt()
    }

    #[test]
    fn rk4_is_fourth_order() {
        let ratio = rk4_error(0.1) / rk4_error(0.05);
        assert!((14.0..18.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn dopri_meets_tolerance() {
        let mut y = [1.0, 0.0];
        let mut stats = StepStats::default();
        let mut dp = DormandPrince::new(2, 0.1);
        dp.advance(&Oscillator, &mut y, 0.0, 10.0, 1e-10, 1e-12, &mut stats, u64::MAX)
            .unwrap();
        assert!((y[0] - 10f64.cos()).abs() < 1e-8);
        assert!((y[1] + 10f64.sin()).abs() < 1e-8);
        assert!(stats.accepted > 10);
    }

    #[test]
    fn dopri_lands_on_endpoints() {
        let mut y = [1.0, 0.0];
        let mut stats = StepStats::default();
        let mut dp = DormandPrince::new(2, 0.37);
        for k in 1..=4 {
            dp.advance(&Oscillator, &mut y, (k - 1) as f64 * 0.5, k as f64 * 0.5, 1e-9, 1e-12, &mut stats, u64::MAX)
                .unwrap();
        }
        assert!((y[0] - 2f64.cos()).abs() < 1e-7);
    }

    #[test]
    fn step_cap() {
        let mut y = [1.0, 0.0];
        let mut stats = StepStats::default();
        let r = Rk4::new(2).advance(&Oscillator, &mut y, 0.0, 10.0, 0.01, &mut stats, 100);
        assert!(matches!(r, Err(Error::StepCapExceeded { .. })));
    }

    #[test]
    fn rejects_bad_config() {
        assert!(StepperConfig::rk4(0.0).validate().is_err());
        assert!(StepperConfig::adaptive().with_tolerances(-1.0, 1e-3).validate().is_err());
        assert!("rk5".parse::<StepperKind>().is_err());
    }
}
