use std::path::Path;
use std::process::{Command, Output};

use irsec::dump::read_dump;

fn irsec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irsec"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = irsec(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

const TINY: &[&str] = &[
    "run",
    "--config",
    "C1,C3",
    "--L",
    "2",
    "--realizations",
    "2",
    "--baselines",
    "random_phase_pmax,no_irs_pmax",
    "--threads",
    "1",
];

#[test]
fn run_writes_the_same_results_twice() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let mut args = TINY.to_vec();
        args.extend(["--traces", "--out", dir.to_str().unwrap()]);
        let stdout = ok(&args);
        assert_eq!(stdout, read(dir, "aggregate.csv"));
    }
    for name in ["aggregate.csv", "deltas.csv", "meta.json"] {
        assert_eq!(read(&a, name), read(&b, name), "{name}");
    }
    let agg = read(&a, "aggregate.csv");
    for scheme in ["ao", "random_phase_pmax", "no_irs_pmax"] {
        assert_eq!(
            agg.lines()
                .filter(|l| l.contains(&format!(",{scheme},")))
                .count(),
            2,
            "{agg}"
        );
    }
    let traces = std::fs::read_dir(a.join("traces")).unwrap().count();
    assert_eq!(traces, 2 * 2 * 3);
}

#[test]
fn trace_output_is_complete() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let stdout = ok(&[
        "trace",
        "--config",
        "C2",
        "--L",
        "3",
        "--channel-seed",
        "11",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(stdout.starts_with("seed 11:"), "{stdout}");

    let dump = read_dump(&read(dir, "channels.txt")).unwrap();
    assert_eq!(dump.seed, 11);
    assert_eq!(dump.params.irs_elements, 3);

    let rec: serde_json::Value = serde_json::from_str(&read(dir, "record.json")).unwrap();
    assert_eq!(rec["L"], 3);
    assert_eq!(rec["omega"].as_array().unwrap().len(), 3);

    assert!(
        read(dir, "phase_trace.csv").starts_with("outer_iter,sub_iter,min_G,solver_status\n1,0,")
    );
    assert!(read(dir, "fp_trace.csv")
        .starts_with("outer_iter,sub_iter,min_C,C_1,C_2,P_A1,P_B1,P_A2,P_B2\n"));
    assert!(read(dir, "fp_random_phases.csv").starts_with("sub_iter,min_C,"));
    let sdp = read(dir, "sdp_trace.csv");
    let last = sdp.lines().last().unwrap();
    assert!(!last.ends_with(",centered"), "{last}");
}

#[test]
fn custom_scenario_file_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("one_pair.txt");
    std::fs::write(
        &path,
        "[anchors]\nA1 = 0, 0\nB1 = 40, 0\nfar = 20, 80\nnear = 38, 2\neve = far\nirs = near\n\n\
         [params]\nN = 1\n\n[run]\nL = 2\nrealizations = 1\nbaselines = corner_search_power\n",
    )
    .unwrap();
    let out = ok(&[
        "run",
        "--scenario",
        path.to_str().unwrap(),
        "--threads",
        "1",
    ]);
    assert!(out.contains(",corner_search_power,"), "{out}");
}

#[test]
fn bad_scenario_names_the_line() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.txt");
    std::fs::write(&path, "[params]\nN = 2\nPmax = lots\n").unwrap();
    let out = irsec(&["run", "--scenario", path.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn validate_runs_a_single_criterion() {
    let out = ok(&["validate", "--criteria", "1"]);
    assert!(out.starts_with("PASS"), "{out}");
    assert_eq!(out.lines().count(), 1);
}
