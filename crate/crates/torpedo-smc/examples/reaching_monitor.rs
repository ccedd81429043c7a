//! Watching the Lyapunov reaching condition s sdot <= -eta |s|.
//!
//! During the reaching phase the trajectory must keep descending toward the
//! surface; once inside the boundary layer the monitor naturally starts
//! flagging steps as the loop idles around s = 0.
//!
//! Run with: cargo run --example reaching_monitor

use torpedo_smc::sim::{run_closed_loop, Scenario};

fn main() {
    let scenario = Scenario::pid_smc1();
    let phi = scenario.controller.boundary_layer().unwrap();
    let trace = run_closed_loop(&scenario).expect("preset scenarios are valid");

    let entry = trace
        .records
        .iter()
        .position(|r| r.s.abs() < phi)
        .expect("the loop reaches the boundary layer");
    println!(
        "boundary layer |s| < {phi} first entered at t = {:.3} s (step {entry})",
        trace.records[entry].t
    );

    let pre = &trace.records[1..entry];
    let held = pre.iter().filter(|r| r.reaching_ok).count();
    println!(
        "reaching condition held at {held}/{} pre-entry steps ({:.1}%)",
        pre.len(),
        100.0 * held as f64 / pre.len() as f64
    );

    let whole = trace.records.iter().filter(|r| r.reaching_ok).count();
    println!(
        "over the whole run it held at {:.1}% of steps (idling on the surface flips it freely)",
        100.0 * whole as f64 / trace.records.len() as f64
    );
}
