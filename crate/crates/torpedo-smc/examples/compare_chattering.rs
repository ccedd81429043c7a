//! All three presets side by side: how hard does each controller work?
//!
//! Fans the runs out across threads (results stay in input order) and
//! writes the summary CSV the `compare` subcommand produces.
//!
//! Run with: cargo run --example compare_chattering

use torpedo_smc::cli::cmd_compare;
use torpedo_smc::metrics::MetricsReport;
use torpedo_smc::sim::{run_closed_loop, Scenario};

fn main() {
    let presets = [
        ("smc1", Scenario::smc1()),
        ("smc2", Scenario::smc2()),
        ("pid-smc1", Scenario::pid_smc1()),
    ];

    println!(
        "{:<10} {:>9} {:>14} {:>10} {:>12} {:>11}",
        "preset", "switches", "total var", "settle s", "steady mean", "peak |u|"
    );
    for (name, scenario) in &presets {
        let trace = run_closed_loop(scenario).expect("preset scenarios are valid");
        let m = MetricsReport::from_trace(&trace);
        println!(
            "{name:<10} {:>9} {:>14.3} {:>10} {:>12.5} {:>11.2}",
            m.switch_count,
            m.total_variation,
            m.settling_time
                .map(|t| format!("{t:.2}"))
                .unwrap_or_else(|| "never".into()),
            m.steady_control_mean,
            m.peak_control,
        );
    }

    let items: Vec<(String, Scenario)> = presets
        .iter()
        .map(|(name, scenario)| (name.to_string(), scenario.clone()))
        .collect();
    cmd_compare(&items, std::path::Path::new("compare_presets.csv"))
        .expect("all three presets run to completion");
    println!("\nsummary rows written to compare_presets.csv");
}
