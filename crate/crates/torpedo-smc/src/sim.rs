//! Closed-loop simulation: scenario description, fixed-step RK4 integration
//! with zero-order-hold control, bounded random disturbances, and trace
//! logging.
//!
//! A run is strictly sequential and deterministic: the same scenario
//! (including the disturbance seed) reproduces the same trace bit for bit.

use crate::control::{reaching_check, Controller, ControlError, ErrorSignals};
use crate::plant::{PlantError, TorpedoPlant, ZpkModel};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

/// Default integration step, seconds. Resolves relay switching well below
/// the fastest plant time constant (40 rad/s).
pub const DEFAULT_DT: f64 = 1e-3;
/// Default run length, seconds; long enough to capture the settled tail.
pub const DEFAULT_DURATION: f64 = 60.0;
/// Default depth step amplitude, meters.
pub const DEFAULT_STEP_AMPLITUDE: f64 = 10.0;
/// Default step instant, seconds.
pub const DEFAULT_STEP_TIME: f64 = 0.0;

/// Simulation-level failures.
#[derive(Debug, Error)]
pub enum SimError {
    /// A scenario field violates its invariant.
    #[error("scenario field \"{field}\": {reason}")]
    InvalidScenario { field: &'static str, reason: String },
    /// Non-finite values encountered while integrating.
    #[error("non-finite state while integrating at t = {t}: {context}")]
    NonFinite { t: f64, context: String },
}

impl From<ControlError> for SimError {
    fn from(err: ControlError) -> Self {
        SimError::InvalidScenario {
            field: "controller",
            reason: err.to_string(),
        }
    }
}

impl From<PlantError> for SimError {
    fn from(err: PlantError) -> Self {
        SimError::InvalidScenario {
            field: "plant",
            reason: err.to_string(),
        }
    }
}

/// Plant selection: the stock torpedo model or a custom zpk channel pair.
#[derive(Debug, Clone, PartialEq)]
pub enum PlantConfig {
    Torpedo,
    Custom {
        immersion: ZpkModel,
        inclination: ZpkModel,
    },
}

impl PlantConfig {
    pub fn build(&self) -> Result<TorpedoPlant, PlantError> {
        match self {
            PlantConfig::Torpedo => Ok(TorpedoPlant::torpedo()),
            PlantConfig::Custom {
                immersion,
                inclination,
            } => TorpedoPlant::from_zpk(immersion, inclination),
        }
    }
}

/// Controller kind plus gains.
#[derive(Debug, Clone, PartialEq)]
pub enum ControllerConfig {
    Smc1 {
        k1: f64,
        k2: f64,
        k: f64,
    },
    Smc2 {
        beta1: f64,
        beta2: f64,
        beta3: f64,
        k: f64,
    },
    PidSmc1 {
        alpha1: f64,
        alpha2: f64,
        alpha3: f64,
        lambda: f64,
        phi: f64,
    },
}

impl ControllerConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            ControllerConfig::Smc1 { .. } => "smc1",
            ControllerConfig::Smc2 { .. } => "smc2",
            ControllerConfig::PidSmc1 { .. } => "pid-smc1",
        }
    }

    /// Largest command magnitude the configured law can emit.
    pub fn control_bound(&self) -> f64 {
        match self {
            ControllerConfig::Smc1 { k, .. } | ControllerConfig::Smc2 { k, .. } => *k,
            ControllerConfig::PidSmc1 { lambda, .. } => *lambda,
        }
    }

    /// Boundary-layer thickness for the saturation law.
    pub fn boundary_layer(&self) -> Option<f64> {
        match self {
            ControllerConfig::PidSmc1 { phi, .. } => Some(*phi),
            _ => None,
        }
    }

    pub fn build(&self) -> Result<Controller, ControlError> {
        match *self {
            ControllerConfig::Smc1 { k1, k2, k } => Controller::smc1(k1, k2, k),
            ControllerConfig::Smc2 {
                beta1,
                beta2,
                beta3,
                k,
            } => Controller::smc2(beta1, beta2, beta3, k),
            ControllerConfig::PidSmc1 {
                alpha1,
                alpha2,
                alpha3,
                lambda,
                phi,
            } => Controller::pid_smc1(alpha1, alpha2, alpha3, lambda, phi),
        }
    }
}

/// Step reference: zero before `step_time`, `amplitude` meters after.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReference {
    pub amplitude: f64,
    pub step_time: f64,
}

impl Default for StepReference {
    fn default() -> Self {
        Self {
            amplitude: DEFAULT_STEP_AMPLITUDE,
            step_time: DEFAULT_STEP_TIME,
        }
    }
}

/// Bounded random state disturbance, `||phi||_2 <= bound * ||x||_2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisturbanceConfig {
    pub enabled: bool,
    /// The bound coefficient `M`.
    pub bound: f64,
    pub seed: u64,
}

impl Default for DisturbanceConfig {
    fn default() -> Self {
        Self {
            enabled: false,
            bound: 0.0,
            seed: 0,
        }
    }
}

/// A complete closed-loop experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub plant: PlantConfig,
    pub controller: ControllerConfig,
    pub reference: StepReference,
    pub duration: f64,
    pub dt: f64,
    pub disturbance: DisturbanceConfig,
    /// Reaching-monitor margin; 0 checks the plain Lyapunov decrease.
    pub eta: f64,
}

impl Scenario {
    /// Scenario skeleton with default plant, reference, timing, and
    /// disturbance around the given controller.
    pub fn with_controller(controller: ControllerConfig) -> Self {
        Self {
            plant: PlantConfig::Torpedo,
            controller,
            reference: StepReference::default(),
            duration: DEFAULT_DURATION,
            dt: DEFAULT_DT,
            disturbance: DisturbanceConfig::default(),
            eta: 0.0,
        }
    }

    /// First-order relay preset: `k1 = 1`, `k2 = 2.5`, `k = 3`.
    pub fn smc1() -> Self {
        Self::with_controller(ControllerConfig::Smc1 {
            k1: 1.0,
            k2: 2.5,
            k: 3.0,
        })
    }

    /// Second-order relay preset: `beta = (2, 5, 2)`, `k = 1.8`.
    pub fn smc2() -> Self {
        Self::with_controller(ControllerConfig::Smc2 {
            beta1: 2.0,
            beta2: 5.0,
            beta3: 2.0,
            k: 1.8,
        })
    }

    /// PID-surface saturation preset: `alpha = (1, 4, 0.04)`,
    /// `lambda = 1`, `phi = 2`.
    pub fn pid_smc1() -> Self {
        Self::with_controller(ControllerConfig::PidSmc1 {
            alpha1: 1.0,
            alpha2: 4.0,
            alpha3: 0.04,
            lambda: 1.0,
            phi: 2.0,
        })
    }

    /// Checks every scenario invariant, naming the offending field.
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SimError::InvalidScenario {
                field: "dt",
                reason: format!("must be > 0 (got {})", self.dt),
            });
        }
        if !(self.duration >= self.dt && self.duration.is_finite()) {
            return Err(SimError::InvalidScenario {
                field: "duration",
                reason: format!("must be >= dt (got {})", self.duration),
            });
        }
        if !self.reference.amplitude.is_finite() {
            return Err(SimError::InvalidScenario {
                field: "reference.amplitude",
                reason: format!("must be finite (got {})", self.reference.amplitude),
            });
        }
        if !self.reference.step_time.is_finite() {
            return Err(SimError::InvalidScenario {
                field: "reference.step_time",
                reason: format!("must be finite (got {})", self.reference.step_time),
            });
        }
        if !(self.disturbance.bound >= 0.0 && self.disturbance.bound.is_finite()) {
            return Err(SimError::InvalidScenario {
                field: "disturbance.M",
                reason: format!("must be >= 0 (got {})", self.disturbance.bound),
            });
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(SimError::InvalidScenario {
                field: "eta",
                reason: format!("must be >= 0 (got {})", self.eta),
            });
        }
        self.controller.build()?;
        self.plant.build()?;
        Ok(())
    }

    /// Number of integration steps; the trace holds one more record.
    pub fn step_count(&self) -> usize {
        (self.duration / self.dt).floor() as usize
    }
}

/// Reference value and slope at time `t`. The step keeps a zero slope
/// everywhere; signals are simply re-evaluated across the step instant.
pub fn reference_eval(scenario: &Scenario, t: f64) -> (f64, f64) {
    if t >= scenario.reference.step_time {
        (scenario.reference.amplitude, 0.0)
    } else {
        (0.0, 0.0)
    }
}

/// One classical fourth-order Runge-Kutta step with the input held constant
/// across the four stages.
pub fn rk4_step<F>(f: F, x: &[f64], t: f64, dt: f64) -> Result<Vec<f64>, SimError>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    let check = |v: &[f64], context: &str| -> Result<(), SimError> {
        if v.iter().all(|c| c.is_finite()) {
            Ok(())
        } else {
            Err(SimError::NonFinite {
                t,
                context: context.to_string(),
            })
        }
    };
    let half = dt / 2.0;
    let k1 = f(t, x);
    check(&k1, "stage 1")?;
    let x1: Vec<f64> = x.iter().zip(&k1).map(|(xi, ki)| xi + half * ki).collect();
    let k2 = f(t + half, &x1);
    check(&k2, "stage 2")?;
    let x2: Vec<f64> = x.iter().zip(&k2).map(|(xi, ki)| xi + half * ki).collect();
    let k3 = f(t + half, &x2);
    check(&k3, "stage 3")?;
    let x3: Vec<f64> = x.iter().zip(&k3).map(|(xi, ki)| xi + dt * ki).collect();
    let k4 = f(t + dt, &x3);
    check(&k4, "stage 4")?;
    let next: Vec<f64> = (0..x.len())
        .map(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    check(&next, "combined update")?;
    Ok(next)
}

/// Seeded bounded disturbance generator.
///
/// The stream is pinned for reproducibility: a ChaCha8 generator seeded
/// with the 64-bit scenario seed (little-endian bytes repeated four times
/// across the 32-byte key). Each evaluation draws `dim` direction samples
/// plus one magnitude sample, each mapped from the next `u64` to `[0, 1)`
/// by taking the top 53 bits. The direction is normalized and scaled so
/// `||phi||_2 <= bound * ||x||_2`; a disabled config never draws.
#[derive(Debug, Clone)]
pub struct Disturbance {
    rng: ChaCha8Rng,
    bound: f64,
    enabled: bool,
}

impl Disturbance {
    pub fn new(config: &DisturbanceConfig) -> Self {
        let mut key = [0u8; 32];
        for chunk in key.chunks_mut(8) {
            chunk.copy_from_slice(&config.seed.to_le_bytes());
        }
        Self {
            rng: ChaCha8Rng::from_seed(key),
            bound: config.bound,
            enabled: config.enabled,
        }
    }

    fn unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Draws the disturbance vector for the current state.
    pub fn eval(&mut self, x: &[f64]) -> Vec<f64> {
        if !self.enabled {
            return vec![0.0; x.len()];
        }
        let mut dir: Vec<f64> = (0..x.len()).map(|_| 2.0 * self.unit() - 1.0).collect();
        let magnitude_draw = self.unit();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return vec![0.0; x.len()];
        }
        let state_norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let scale = magnitude_draw * self.bound * state_norm / norm;
        dir.iter_mut().for_each(|v| *v *= scale);
        dir
    }
}

/// One logged sample of the closed loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub t: f64,
    /// Depth, meters.
    pub z: f64,
    /// Pitch, radians.
    pub theta: f64,
    /// Tracking error `r - z`.
    pub e: f64,
    /// Sliding-surface value.
    pub s: f64,
    /// Command held over the following interval.
    pub u: f64,
    /// Reaching condition monitored with a backward difference of `s`;
    /// vacuously true on the first record.
    pub reaching_ok: bool,
}

/// A completed (or aborted) run: the scenario echo and its samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub scenario: Scenario,
    pub records: Vec<TraceRecord>,
    /// Diagnostic when the run aborted on a non-finite state; the records
    /// collected up to the failure are kept.
    pub abort: Option<String>,
}

impl Trace {
    /// Integration steps actually taken.
    pub fn step_count(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn ts(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn zs(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.z).collect()
    }

    pub fn es(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.e).collect()
    }

    pub fn ss(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.s).collect()
    }

    pub fn us(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.u).collect()
    }
}

/// Everything the loop knows at one step, handed to observers before the
/// state advances.
#[derive(Debug, Clone, Copy)]
pub struct StepInfo {
    pub index: usize,
    pub t: f64,
    pub z: f64,
    pub theta: f64,
    pub signals: ErrorSignals,
    pub s: f64,
    pub u: f64,
    pub reaching_ok: bool,
}

/// Runs the closed loop, calling `observer` once per logged record.
///
/// Per step: read the plant outputs, build the error signals under the held
/// control, advance the PID integral where applicable, evaluate the surface
/// and the law, then hold the new command while integrating one RK4 step.
/// A non-finite state aborts the run, keeping the partial trace.
pub fn run_with_observer<F>(scenario: &Scenario, mut observer: F) -> Result<Trace, SimError>
where
    F: FnMut(&StepInfo),
{
    scenario.validate()?;
    let mut plant = scenario.plant.build()?;
    let mut controller = scenario.controller.build()?;
    let mut disturbance = Disturbance::new(&scenario.disturbance);
    let steps = scenario.step_count();
    let dt = scenario.dt;

    let mut records = Vec::with_capacity(steps + 1);
    let mut abort = None;
    let mut u_prev = 0.0;
    let mut s_prev: Option<f64> = None;

    for index in 0..=steps {
        let t = index as f64 * dt;
        let (z, theta) = plant.outputs();
        let (r, r_dot) = reference_eval(scenario, t);
        let mut signals = ErrorSignals::from_plant(&plant, r, r_dot, 0.0, u_prev);
        let out = controller.step(&signals, dt);
        if let Some(integral) = controller.pid_integral() {
            signals.e_int = integral;
        }
        let reaching_ok = match s_prev {
            None => true,
            Some(previous) => reaching_check(out.s, (out.s - previous) / dt, scenario.eta),
        };
        let info = StepInfo {
            index,
            t,
            z,
            theta,
            signals,
            s: out.s,
            u: out.u,
            reaching_ok,
        };
        observer(&info);
        records.push(TraceRecord {
            t,
            z,
            theta,
            e: signals.e,
            s: out.s,
            u: out.u,
            reaching_ok,
        });
        s_prev = Some(out.s);
        u_prev = out.u;

        if index < steps {
            let x = plant.state();
            let phi = disturbance.eval(&x);
            let step = rk4_step(
                |_, state| {
                    let mut dx = vec![0.0; state.len()];
                    plant.derivative_at(state, out.u, &phi, &mut dx);
                    dx
                },
                &x,
                t,
                dt,
            );
            match step {
                Ok(next) => plant.set_state(&next),
                Err(err) => {
                    abort = Some(format!("step {index}: {err}"));
                    break;
                }
            }
        }
    }

    Ok(Trace {
        scenario: scenario.clone(),
        records,
        abort,
    })
}

/// Runs the closed loop of a validated scenario and returns its trace.
pub fn run_closed_loop(scenario: &Scenario) -> Result<Trace, SimError> {
    run_with_observer(scenario, |_| {})
}
