//! End-to-end command behavior: CSV shapes, byte determinism, exit codes,
//! and flag precedence.

use std::fs;
use std::path::Path;
use tempfile::TempDir;
use torpedo_smc::cli::{cmd_compare, cmd_run, main_entry, COMPARE_HEADER};
use torpedo_smc::sim::Scenario;

fn run_cli(args: &[&str]) -> i32 {
    let mut full = vec!["torpedo-smc"];
    full.extend_from_slice(args);
    main_entry(full)
}

#[test]
fn trace_csv_has_the_documented_shape() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("pid.csv");
    cmd_run(&Scenario::pid_smc1(), &out).unwrap();
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 60_002); // header + floor(60 / 0.001) + 1 rows
    assert_eq!(lines[0], "t,z,theta,e,s,u");
    assert!(text.ends_with('\n'));
    assert!(!text.contains('\r'));
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 6, "bad row: {line}");
    }
    assert!(lines[1].starts_with("0.00000000e0,"));
    assert!(lines[60_001].starts_with("6.00000000e1,"));
}

#[test]
fn zero_amplitude_reference_writes_zero_columns() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("zero.csv");
    let mut scenario = Scenario::smc1();
    scenario.reference.amplitude = 0.0;
    scenario.duration = 1.0;
    cmd_run(&scenario, &out).unwrap();
    let text = fs::read_to_string(&out).unwrap();
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        for value in &fields[1..] {
            assert_eq!(*value, "0.00000000e0", "nonzero output in {line}");
        }
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    let mut scenario = Scenario::smc2();
    scenario.duration = 2.0;
    cmd_run(&scenario, &first).unwrap();
    cmd_run(&scenario, &second).unwrap();
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
}

#[test]
fn compare_writes_rows_in_input_order_with_oracle_ordering() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("summary.csv");
    let items = vec![
        ("smc1".to_string(), Scenario::smc1()),
        ("smc2".to_string(), Scenario::smc2()),
        ("pid-smc1".to_string(), Scenario::pid_smc1()),
        ("smc1".to_string(), Scenario::smc1()),
    ];
    cmd_compare(&items, &out).unwrap();
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0], COMPARE_HEADER);
    assert!(lines[1].starts_with("smc1,"));
    assert!(lines[2].starts_with("smc2,"));
    assert!(lines[3].starts_with("pid-smc1,"));
    // duplicate scenarios produce identical metric rows
    assert_eq!(lines[1], lines[4]);

    let tv = |line: &str| -> f64 {
        line.split(',').nth(2).unwrap().parse().unwrap()
    };
    let sc = |line: &str| -> f64 {
        line.split(',').nth(1).unwrap().parse().unwrap()
    };
    // orderings verified by direct simulation: the second-order relay
    // commutates hardest, the boundary-layer law barely at all
    assert!(tv(lines[2]) > tv(lines[1]));
    assert!(tv(lines[1]) > 100.0 * tv(lines[3]));
    assert!(sc(lines[2]) > sc(lines[1]));
    assert!(sc(lines[1]) > 50.0 * sc(lines[3]));
}

#[test]
fn run_resolves_presets_files_and_overrides() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("trace.csv");

    // preset only
    assert_eq!(
        run_cli(&[
            "run",
            "--preset",
            "smc1",
            "--out",
            out.to_str().unwrap(),
            "--duration",
            "0.5"
        ]),
        0
    );
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 502);

    // file with overrides: flag beats file
    let scenario_path = dir.path().join("scenario.json");
    fs::write(
        &scenario_path,
        r#"{"controller": {"kind": "pid-smc1"}, "dt": 0.01, "duration": 5.0}"#,
    )
    .unwrap();
    assert_eq!(
        run_cli(&[
            "run",
            "--scenario",
            scenario_path.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--dt",
            "0.002",
            "--duration",
            "1.0",
            "--amplitude",
            "3.0"
        ]),
        0
    );
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 502);

    // preset replaces the file's controller: the relay rails at +/- 3
    assert_eq!(
        run_cli(&[
            "run",
            "--scenario",
            scenario_path.to_str().unwrap(),
            "--preset",
            "smc1",
            "--out",
            out.to_str().unwrap(),
            "--duration",
            "0.2"
        ]),
        0
    );
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains(",3.00000000e0"), "relay amplitude missing");
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out.csv");
    let out_str = out.to_str().unwrap();

    assert_eq!(run_cli(&["--help"]), 0);
    assert_eq!(run_cli(&["bogus"]), 1);
    assert_eq!(run_cli(&["run", "--preset", "smc1"]), 1); // missing --out
    assert_eq!(run_cli(&["run", "--out", out_str]), 1); // neither preset nor file
    assert_eq!(run_cli(&["run", "--preset", "warp", "--out", out_str]), 1);
    assert_eq!(run_cli(&["compare", "--preset", "smc1", "--out", out_str]), 1);
    assert_eq!(
        run_cli(&["run", "--scenario", "/no/such/file.json", "--out", out_str]),
        3
    );

    // invalid override caught by validation
    assert_eq!(
        run_cli(&[
            "run",
            "--preset",
            "smc1",
            "--out",
            out_str,
            "--dt",
            "-0.001"
        ]),
        1
    );
}

#[test]
fn aborted_runs_exit_2_and_flag_the_partial_trace() {
    let dir = TempDir::new().unwrap();
    let scenario_path = dir.path().join("unstable.json");
    fs::write(
        &scenario_path,
        r#"{
            "plant": {"custom": {
                "immersion": {"zeros": [], "poles": [1.0e5, 0.0], "gain": 1.0},
                "inclination": {"zeros": [], "poles": [0.0, -40.0], "gain": 7660.0}
            }},
            "controller": {"kind": "smc1"},
            "duration": 1.0
        }"#,
    )
    .unwrap();
    let out = dir.path().join("partial.csv");
    assert_eq!(
        run_cli(&[
            "run",
            "--scenario",
            scenario_path.to_str().unwrap(),
            "--out",
            out.to_str().unwrap()
        ]),
        2
    );
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("t,z,theta,e,s,u\n"));
    assert!(text.contains("# aborted:"), "partial trace not flagged");
}

#[test]
fn compare_via_the_binary_surface_matches_direct_calls() {
    let dir = TempDir::new().unwrap();
    let from_cli = dir.path().join("cli.csv");
    assert_eq!(
        run_cli(&[
            "compare",
            "--preset",
            "smc1",
            "--preset",
            "pid-smc1",
            "--out",
            from_cli.to_str().unwrap(),
            "--duration",
            "2.0"
        ]),
        0
    );
    let direct = dir.path().join("direct.csv");
    let mut smc1 = Scenario::smc1();
    smc1.duration = 2.0;
    let mut pid = Scenario::pid_smc1();
    pid.duration = 2.0;
    cmd_compare(
        &[("smc1".to_string(), smc1), ("pid-smc1".to_string(), pid)],
        Path::new(&direct),
    )
    .unwrap();
    assert_eq!(fs::read(&from_cli).unwrap(), fs::read(&direct).unwrap());
}
