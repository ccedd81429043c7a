//! Second-order sliding surface with a relay.
//!
//! The surface sigma = 2 e + 5 edot + 2 eddot reacts to the error's second
//! derivative, which lowers the relay amplitude to 1.8 but drives the
//! commutation rate up to once per sample.
//!
//! Run with: cargo run --example second_order_smc

use torpedo_smc::cli::trace_csv;
use torpedo_smc::metrics::MetricsReport;
use torpedo_smc::sim::{run_closed_loop, Scenario};

fn main() {
    let trace = run_closed_loop(&Scenario::smc2()).expect("preset scenarios are valid");
    let report = MetricsReport::from_trace(&trace);
    println!("{report}");

    let steps = trace.records.len() - 1;
    println!(
        "\nthe relay toggled {} times over {} samples ({:.1}% of steps)",
        report.switch_count,
        steps,
        100.0 * report.switch_count as f64 / steps as f64
    );

    std::fs::write("smc2_trace.csv", trace_csv(&trace)).expect("writable working directory");
    println!("trace written to smc2_trace.csv");
}
