//! First-order sliding surface with a relay: fast but loud.
//!
//! Runs the smc1 preset (s = e + 2.5 edot, u = 3 sign(s)), writes the trace
//! to smc1_trace.csv, and prints the chattering metrics. The relay rails
//! between -3 and +3 the whole run.
//!
//! Run with: cargo run --example relay_smc

use torpedo_smc::cli::trace_csv;
use torpedo_smc::metrics::MetricsReport;
use torpedo_smc::sim::{run_closed_loop, Scenario};

fn main() {
    let scenario = Scenario::smc1();
    let trace = run_closed_loop(&scenario).expect("preset scenarios are valid");

    let report = MetricsReport::from_trace(&trace);
    println!("{report}");

    let distinct: std::collections::BTreeSet<String> =
        trace.records.iter().map(|r| format!("{}", r.u)).collect();
    println!("\ndistinct control values: {distinct:?}");

    std::fs::write("smc1_trace.csv", trace_csv(&trace)).expect("writable working directory");
    println!("trace written to smc1_trace.csv ({} rows)", trace.records.len());
}
