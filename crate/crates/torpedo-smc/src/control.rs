//! Sliding surfaces, switching laws, and the error-derivative chain.
//!
//! Three controller flavours are built from two ingredients: a scalar
//! sliding surface evaluated on the tracking error and its derivatives, and
//! a switching law mapping the surface value to a control command.
//!
//! * `smc1` — first-order surface `s = k1 e + k2 edot` with a relay.
//! * `smc2` — second-order surface `sigma = b1 e + b2 edot + b3 eddot`
//!   with a relay.
//! * `pid-smc1` — PID surface `s = a1 e + a2 edot + a3 int(e)` with a
//!   boundary-layer saturation law.
//!
//! Error derivatives are computed analytically through the plant
//! realization rather than by numeric differencing, with the control input
//! treated as constant inside each hold interval.

use crate::plant::TorpedoPlant;
use thiserror::Error;

/// Errors for controller configuration.
#[derive(Debug, Error, PartialEq)]
pub enum ControlError {
    /// Surface and law coefficients must be strictly positive.
    #[error("{name} must be strictly positive (got {value})")]
    NonPositiveGain { name: &'static str, value: f64 },
    /// Integration steps must move time forward.
    #[error("dt must be strictly positive (got {value})")]
    NonPositiveStep { value: f64 },
}

fn positive(name: &'static str, value: f64) -> Result<f64, ControlError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ControlError::NonPositiveGain { name, value })
    }
}

/// Sign function with the zero case mapped to zero, so an exactly-on-surface
/// state commands no deflection.
pub fn sign(s: f64) -> f64 {
    if s > 0.0 {
        1.0
    } else if s < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Tracking error and its analytic derivatives.
///
/// `e_int` carries the running integral for the PID surface; it is
/// maintained by [`PidSurface::integrate_step`] and mirrored here for
/// logging, staying zero for the relay controllers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSignals {
    pub e: f64,
    pub e_dot: f64,
    pub e_ddot: f64,
    pub e_int: f64,
}

impl ErrorSignals {
    /// Builds the error chain for depth regulation: `e = r - z`, with the
    /// first and second derivatives taken exactly through the immersion
    /// realization under the control value held since the last switch.
    pub fn from_plant(plant: &TorpedoPlant, r: f64, r_dot: f64, r_ddot: f64, u_prev: f64) -> Self {
        let (z, z_dot, z_ddot) = plant.depth_signals(u_prev);
        Self {
            e: r - z,
            e_dot: r_dot - z_dot,
            e_ddot: r_ddot - z_ddot,
            e_int: 0.0,
        }
    }
}

/// First-order surface `s = k1 e + k2 edot`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSurface {
    k1: f64,
    k2: f64,
}

impl LinearSurface {
    pub fn new(k1: f64, k2: f64) -> Result<Self, ControlError> {
        Ok(Self {
            k1: positive("k1", k1)?,
            k2: positive("k2", k2)?,
        })
    }

    pub fn eval(&self, sig: &ErrorSignals) -> f64 {
        self.k1 * sig.e + self.k2 * sig.e_dot
    }

    /// Exact surface rate `k1 edot + k2 eddot` under the held input.
    pub fn rate(&self, sig: &ErrorSignals) -> f64 {
        self.k1 * sig.e_dot + self.k2 * sig.e_ddot
    }
}

/// Second-order surface `sigma = b1 e + b2 edot + b3 eddot`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderSurface {
    beta1: f64,
    beta2: f64,
    beta3: f64,
}

impl SecondOrderSurface {
    pub fn new(beta1: f64, beta2: f64, beta3: f64) -> Result<Self, ControlError> {
        Ok(Self {
            beta1: positive("beta1", beta1)?,
            beta2: positive("beta2", beta2)?,
            beta3: positive("beta3", beta3)?,
        })
    }

    pub fn eval(&self, sig: &ErrorSignals) -> f64 {
        self.beta1 * sig.e + self.beta2 * sig.e_dot + self.beta3 * sig.e_ddot
    }
}

/// PID surface `s = a1 e + a2 edot + a3 int(e)` with a trapezoidal
/// integral accumulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidSurface {
    alpha1: f64,
    alpha2: f64,
    alpha3: f64,
    integral: f64,
}

impl PidSurface {
    pub fn new(alpha1: f64, alpha2: f64, alpha3: f64) -> Result<Self, ControlError> {
        Ok(Self {
            alpha1: positive("alpha1", alpha1)?,
            alpha2: positive("alpha2", alpha2)?,
            alpha3: positive("alpha3", alpha3)?,
            integral: 0.0,
        })
    }

    /// Accumulated `int_0^t e dt`.
    pub fn integral(&self) -> f64 {
        self.integral
    }

    /// Advances the error integral by one trapezoid: exact on constant and
    /// linear error segments.
    pub fn integrate_step(&mut self, e_prev: f64, e_now: f64, dt: f64) -> Result<(), ControlError> {
        if !(dt > 0.0) {
            return Err(ControlError::NonPositiveStep { value: dt });
        }
        self.accumulate(e_prev, e_now, dt);
        Ok(())
    }

    fn accumulate(&mut self, e_prev: f64, e_now: f64, dt: f64) {
        self.integral += dt * (e_prev + e_now) / 2.0;
    }

    pub fn eval(&self, sig: &ErrorSignals) -> f64 {
        self.alpha1 * sig.e + self.alpha2 * sig.e_dot + self.alpha3 * self.integral
    }

    /// Exact surface rate `a1 edot + a2 eddot + a3 e`.
    pub fn rate(&self, sig: &ErrorSignals) -> f64 {
        self.alpha1 * sig.e_dot + self.alpha2 * sig.e_ddot + self.alpha3 * sig.e
    }
}

/// Any of the three sliding surfaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlidingSurface {
    Linear(LinearSurface),
    SecondOrder(SecondOrderSurface),
    Pid(PidSurface),
}

impl SlidingSurface {
    /// Evaluates the surface functional on the given error signals. The PID
    /// variant reads its own accumulated integral, which must already be
    /// advanced for the current step.
    pub fn eval(&self, sig: &ErrorSignals) -> f64 {
        match self {
            SlidingSurface::Linear(s) => s.eval(sig),
            SlidingSurface::SecondOrder(s) => s.eval(sig),
            SlidingSurface::Pid(s) => s.eval(sig),
        }
    }
}

/// Relay law `u = k sign(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayLaw {
    k: f64,
}

impl RelayLaw {
    pub fn new(k: f64) -> Result<Self, ControlError> {
        Ok(Self {
            k: positive("k", k)?,
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.k
    }

    pub fn control(&self, s: f64) -> f64 {
        self.k * sign(s)
    }
}

/// Saturation law: relay outside the boundary layer `|s| >= phi`, the
/// proportional segment `lambda s / phi` inside it; continuous at the edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationLaw {
    lambda: f64,
    phi: f64,
}

impl SaturationLaw {
    pub fn new(lambda: f64, phi: f64) -> Result<Self, ControlError> {
        Ok(Self {
            lambda: positive("lambda", lambda)?,
            phi: positive("phi", phi)?,
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.lambda
    }

    pub fn boundary_layer(&self) -> f64 {
        self.phi
    }

    pub fn control(&self, s: f64) -> f64 {
        if s.abs() >= self.phi {
            self.lambda * sign(s)
        } else {
            self.lambda * s / self.phi
        }
    }
}

/// Reaching condition `s sdot <= -eta |s|`; with `eta = 0` this is the
/// classical Lyapunov decrease condition, vacuously true on the surface.
pub fn reaching_check(s: f64, s_dot: f64, eta: f64) -> bool {
    s * s_dot <= -eta * s.abs()
}

/// One controller evaluation: the command for the next hold interval and
/// the surface value it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    pub u: f64,
    pub s: f64,
}

/// A configured controller with its per-run state (the PID integral and
/// the previous error sample feeding the trapezoid).
#[derive(Debug, Clone, PartialEq)]
pub enum Controller {
    Smc1 {
        surface: LinearSurface,
        law: RelayLaw,
    },
    Smc2 {
        surface: SecondOrderSurface,
        law: RelayLaw,
    },
    PidSmc1 {
        surface: PidSurface,
        law: SaturationLaw,
        prev_error: Option<f64>,
    },
}

impl Controller {
    pub fn smc1(k1: f64, k2: f64, k: f64) -> Result<Self, ControlError> {
        Ok(Controller::Smc1 {
            surface: LinearSurface::new(k1, k2)?,
            law: RelayLaw::new(k)?,
        })
    }

    pub fn smc2(beta1: f64, beta2: f64, beta3: f64, k: f64) -> Result<Self, ControlError> {
        Ok(Controller::Smc2 {
            surface: SecondOrderSurface::new(beta1, beta2, beta3)?,
            law: RelayLaw::new(k)?,
        })
    }

    pub fn pid_smc1(
        alpha1: f64,
        alpha2: f64,
        alpha3: f64,
        lambda: f64,
        phi: f64,
    ) -> Result<Self, ControlError> {
        Ok(Controller::PidSmc1 {
            surface: PidSurface::new(alpha1, alpha2, alpha3)?,
            law: SaturationLaw::new(lambda, phi)?,
            prev_error: None,
        })
    }

    /// Largest command magnitude this controller can emit.
    pub fn control_bound(&self) -> f64 {
        match self {
            Controller::Smc1 { law, .. } | Controller::Smc2 { law, .. } => law.amplitude(),
            Controller::PidSmc1 { law, .. } => law.amplitude(),
        }
    }

    /// Boundary-layer thickness, for the saturation law only.
    pub fn boundary_layer(&self) -> Option<f64> {
        match self {
            Controller::PidSmc1 { law, .. } => Some(law.boundary_layer()),
            _ => None,
        }
    }

    /// Accumulated PID integral, when the controller has one.
    pub fn pid_integral(&self) -> Option<f64> {
        match self {
            Controller::PidSmc1 { surface, .. } => Some(surface.integral()),
            _ => None,
        }
    }

    /// Computes the command for the next hold interval. For the PID
    /// controller the error integral is advanced first, so the surface is
    /// evaluated with the integral current to this step.
    pub fn step(&mut self, sig: &ErrorSignals, dt: f64) -> ControlOutput {
        assert!(dt > 0.0, "dt validated by the scenario");
        match self {
            Controller::Smc1 { surface, law } => {
                let s = surface.eval(sig);
                ControlOutput {
                    u: law.control(s),
                    s,
                }
            }
            Controller::Smc2 { surface, law } => {
                let s = surface.eval(sig);
                ControlOutput {
                    u: law.control(s),
                    s,
                }
            }
            Controller::PidSmc1 {
                surface,
                law,
                prev_error,
            } => {
                if let Some(e_prev) = *prev_error {
                    surface.accumulate(e_prev, sig.e, dt);
                }
                *prev_error = Some(sig.e);
                let s = surface.eval(sig);
                ControlOutput {
                    u: law.control(s),
                    s,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_relative_eq, relative_eq};
    use proptest::prelude::*;

    fn sig(e: f64, e_dot: f64, e_ddot: f64) -> ErrorSignals {
        ErrorSignals {
            e,
            e_dot,
            e_ddot,
            e_int: 0.0,
        }
    }

    #[test]
    fn sign_matches_the_three_cases() {
        assert_eq!(sign(0.7), 1.0);
        assert_eq!(sign(-3.0), -1.0);
        assert_eq!(sign(0.0), 0.0);
    }

    #[test]
    fn relay_scales_the_sign() {
        assert_eq!(RelayLaw::new(3.0).unwrap().control(2.0), 3.0);
        assert_eq!(RelayLaw::new(1.8).unwrap().control(-0.001), -1.8);
        assert_eq!(RelayLaw::new(5.0).unwrap().control(0.0), 0.0);
    }

    #[test]
    fn saturation_covers_both_zones_and_the_edge() {
        let law = SaturationLaw::new(1.0, 2.0).unwrap();
        assert_eq!(law.control(1.0), 0.5);
        assert_eq!(law.control(5.0), 1.0);
        assert_eq!(law.control(-2.0), -1.0);
    }

    #[test]
    fn surfaces_evaluate_their_functionals() {
        let lin = LinearSurface::new(1.0, 2.5).unwrap();
        assert_eq!(SlidingSurface::Linear(lin).eval(&sig(2.0, 0.0, 0.0)), 2.0);

        let so = SecondOrderSurface::new(2.0, 5.0, 2.0).unwrap();
        assert_eq!(
            SlidingSurface::SecondOrder(so).eval(&sig(1.0, -1.0, 0.5)),
            -2.0
        );

        let mut pid = PidSurface::new(1.0, 4.0, 0.04).unwrap();
        // drive the accumulator to exactly 10 error-seconds
        pid.integrate_step(10000.0, 10000.0, 0.001).unwrap();
        assert_relative_eq!(pid.integral(), 10.0, max_relative = 1e-15);
        assert_relative_eq!(
            SlidingSurface::Pid(pid).eval(&sig(0.0, 0.0, 0.0)),
            0.4,
            max_relative = 1e-12
        );
    }

    #[test]
    fn gains_must_be_strictly_positive() {
        assert!(LinearSurface::new(0.0, 1.0).is_err());
        assert!(SecondOrderSurface::new(1.0, -2.0, 1.0).is_err());
        assert!(PidSurface::new(1.0, 1.0, 0.0).is_err());
        assert!(RelayLaw::new(-1.0).is_err());
        assert!(SaturationLaw::new(1.0, 0.0).is_err());
    }

    #[test]
    fn trapezoid_updates_one_step() {
        let mut pid = PidSurface::new(1.0, 1.0, 1.0).unwrap();
        pid.integrate_step(1.0, 1.0, 0.001).unwrap();
        assert_relative_eq!(pid.integral(), 0.001, max_relative = 1e-15);
        assert_eq!(
            pid.integrate_step(1.0, 1.0, 0.0),
            Err(ControlError::NonPositiveStep { value: 0.0 })
        );
        assert!(pid.integrate_step(1.0, 1.0, -0.5).is_err());
    }

    #[test]
    fn trapezoid_is_exact_on_constants_and_linears() {
        let dt = 0.001;
        let n = 1000;

        let mut pid = PidSurface::new(1.0, 1.0, 1.0).unwrap();
        let c = 2.5;
        for _ in 0..n {
            pid.integrate_step(c, c, dt).unwrap();
        }
        assert_relative_eq!(pid.integral(), c * n as f64 * dt, max_relative = 1e-12);

        let mut pid = PidSurface::new(1.0, 1.0, 1.0).unwrap();
        for i in 0..n {
            let e_prev = i as f64 * dt;
            let e_now = (i + 1) as f64 * dt;
            pid.integrate_step(e_prev, e_now, dt).unwrap();
        }
        assert_relative_eq!(pid.integral(), 0.5, max_relative = 1e-12);
    }

    #[test]
    fn reaching_condition_cases() {
        assert!(reaching_check(2.0, -1.0, 0.0));
        assert!(!reaching_check(2.0, 0.5, 0.0));
        assert!(reaching_check(0.0, 123.0, 0.1));
        assert!(reaching_check(0.0, -123.0, 0.1));
    }

    #[test]
    fn controller_step_composes_surface_and_law() {
        let mut pid = Controller::pid_smc1(1.0, 4.0, 0.04, 1.0, 2.0).unwrap();
        let out = pid.step(&sig(0.0, 0.0, 0.0), 0.001);
        assert_eq!(out.u, 0.0);
        assert_eq!(out.s, 0.0);

        let mut smc1 = Controller::smc1(1.0, 2.5, 3.0).unwrap();
        let out = smc1.step(&sig(2.0, 0.0, 0.0), 0.001);
        assert_eq!(out.s, 2.0);
        assert_eq!(out.u, 3.0);

        let mut smc2 = Controller::smc2(2.0, 5.0, 2.0, 1.8).unwrap();
        let out = smc2.step(&sig(1.0, -1.0, 0.5), 0.001);
        assert_eq!(out.s, -2.0);
        assert_eq!(out.u, -1.8);
    }

    #[test]
    fn pid_controller_skips_the_integral_on_the_first_step() {
        let mut pid = Controller::pid_smc1(1.0, 4.0, 0.04, 1.0, 2.0).unwrap();
        pid.step(&sig(3.0, 0.0, 0.0), 0.5);
        assert_eq!(pid.pid_integral(), Some(0.0));
        pid.step(&sig(1.0, 0.0, 0.0), 0.5);
        assert_relative_eq!(pid.pid_integral().unwrap(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn saturation_approaches_the_relay_as_the_layer_shrinks() {
        let relay = RelayLaw::new(1.0).unwrap();
        for s in [-4.0, -0.5, 0.05, 0.3, 2.0] {
            let mut last = f64::INFINITY;
            for phi in [1.0, 0.1, 0.01] {
                let err = (SaturationLaw::new(1.0, phi).unwrap().control(s) - relay.control(s))
                    .abs();
                assert!(err <= last + 1e-15, "not shrinking at s={s}, phi={phi}");
                last = err;
            }
            // the laws agree exactly once |s| clears the layer
            assert_eq!(
                SaturationLaw::new(1.0, 0.01).unwrap().control(s),
                relay.control(s)
            );
        }
    }

    proptest! {
        #[test]
        fn saturation_is_bounded_odd_and_monotone(
            s1 in -100.0..100.0f64,
            s2 in -100.0..100.0f64,
            lambda in 0.01..10.0f64,
            phi in 0.01..10.0f64,
        ) {
            let law = SaturationLaw::new(lambda, phi).unwrap();
            prop_assert!(law.control(s1).abs() <= lambda + 1e-15);
            prop_assert!(relative_eq!(law.control(-s1), -law.control(s1), epsilon = 1e-12));
            let (lo, hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
            prop_assert!(law.control(lo) <= law.control(hi) + 1e-15);
        }

        #[test]
        fn saturation_is_continuous_at_the_layer_edge(
            lambda in 0.01..10.0f64,
            phi in 0.01..10.0f64,
        ) {
            let law = SaturationLaw::new(lambda, phi).unwrap();
            let eps = phi * 1e-9;
            prop_assert!((law.control(phi) - law.control(phi - eps)).abs() <= lambda * 1e-8);
            prop_assert!((law.control(-phi) - law.control(-phi + eps)).abs() <= lambda * 1e-8);
            prop_assert!(relative_eq!(law.control(phi), lambda, max_relative = 1e-12));
        }

        #[test]
        fn relay_ignores_positive_surface_scaling(
            s in -100.0..100.0f64,
            c in 1e-6..1e6f64,
            k in 0.01..10.0f64,
        ) {
            let law = RelayLaw::new(k).unwrap();
            prop_assert_eq!(law.control(c * s), law.control(s));
        }

        #[test]
        fn pid_surface_without_integral_action_is_the_linear_surface(
            e in -100.0..100.0f64,
            e_dot in -100.0..100.0f64,
            e_ddot in -100.0..100.0f64,
            e_int in -100.0..100.0f64,
            k1 in 0.01..10.0f64,
            k2 in 0.01..10.0f64,
        ) {
            // alpha3 -> 0+ limit checked at the smallest positive normal
            let mut pid = PidSurface::new(k1, k2, f64::MIN_POSITIVE).unwrap();
            pid.integrate_step(e_int, e_int, 1.0).unwrap();
            let lin = LinearSurface::new(k1, k2).unwrap();
            let signals = ErrorSignals { e, e_dot, e_ddot, e_int };
            prop_assert!(relative_eq!(
                pid.eval(&signals),
                lin.eval(&signals),
                max_relative = 1e-12,
                epsilon = 1e-12
            ));
        }
    }
}
