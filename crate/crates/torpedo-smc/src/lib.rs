//! Sliding-mode depth control experiments on a torpedo plant.
//!
//! The library realizes the vehicle's depth and pitch dynamics as strictly
//! proper LTI systems, closes the loop with one of three sliding-mode
//! controllers, and quantifies how hard each one chatters:
//!
//! * [`plant`] — zero/pole/gain models, transfer functions, controllable
//!   companion realizations, and the two-channel [`plant::TorpedoPlant`].
//! * [`control`] — the linear, second-order, and PID sliding surfaces, the
//!   relay and boundary-layer saturation laws, the analytic
//!   error-derivative chain, and the Lyapunov reaching monitor.
//! * [`sim`] — scenario descriptions and the fixed-step RK4 closed-loop
//!   engine with zero-order-hold control, bounded seeded disturbances, and
//!   full trace logging.
//! * [`metrics`] — switch counts, total variation, settling time, and
//!   steady-window statistics over a trace.
//! * [`cli`] — JSON scenario files, the three presets, deterministic CSV
//!   output, and the `run`/`compare` command surface.
//!
//! Every major capability has a runnable example:
//!
//! ```text
//! cargo run --example plant_realization    # models -> tf -> state space
//! cargo run --example open_loop_step       # RK4 vs the analytic step response
//! cargo run --example relay_smc            # first-order surface + relay
//! cargo run --example second_order_smc     # second-order surface + relay
//! cargo run --example pid_boundary_layer   # PID surface + saturation law
//! cargo run --example compare_chattering   # all three presets side by side
//! cargo run --example reaching_monitor     # Lyapunov reaching condition stats
//! cargo run --example seeded_disturbance   # bounded random disturbance, reproducible
//! cargo run --example custom_scenario      # scenario JSON round trip
//! ```
//!
//! A minimal closed loop:
//!
//! ```
//! use torpedo_smc::metrics::MetricsReport;
//! use torpedo_smc::sim::{run_closed_loop, Scenario};
//!
//! let mut scenario = Scenario::pid_smc1();
//! scenario.duration = 2.0;
//! let trace = run_closed_loop(&scenario).unwrap();
//! let report = MetricsReport::from_trace(&trace);
//! assert!(report.peak_control <= 1.0);
//! ```

pub mod cli;
pub mod control;
pub mod metrics;
pub mod plant;
pub mod sim;

pub use control::{Controller, ErrorSignals};
pub use metrics::MetricsReport;
pub use plant::{TorpedoPlant, TransferFunction, ZpkModel};
pub use sim::{run_closed_loop, Scenario, Trace};
