//! End-to-end tests driving the built binary: every subcommand, both output
//! formats, the exit-code contract, and the JSON round trip.

use std::path::PathBuf;
use std::process::{Command, Output};

const U1: &str = "0 1 1\n1 0 1\n1 1 0\n";
const U2: &str = "0 1 -1\n1 0 1\n1 -1 0\n";
const U3: &str = "0 1 -1\n-1 0 1\n1 -1 0\n";

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_signalgames")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn write_temp(content: &str) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("matrix.txt");
    std::fs::write(&path, content).unwrap();
    (dir, path)
}

fn stdout_str(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout_str(out)).unwrap()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn analyze_json(matrix: &str) -> serde_json::Value {
    let (_dir, path) = write_temp(matrix);
    stdout_json(&run(&[
        "analyze",
        "--input",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]))
}

#[test]
fn analyze_reports_the_two_leader_values() {
    let r = analyze_json(U2);
    assert_eq!(r["informativeness"], 2);
    assert_eq!(r["extraction_capacity"], 1);
    assert_eq!(r["leader_follower_gap"], 1);
    assert_eq!(r["primal_optimum"], 2);
    assert_eq!(r["dual_optimum"], 2);
    assert_eq!(r["strong_graph"]["edge_count"], 1);
    assert_eq!(r["strong_graph"]["edges"], serde_json::json!([[0, 1]]));
    assert_eq!(r["weak_graph"]["edge_count"], 3);
    assert_eq!(r["symmetric"], false);
    assert_eq!(r["class_existence"]["pooling_exists"], false);
    assert_eq!(r["class_existence"]["semi_separating_exists"], true);
    assert_eq!(r["class_existence"]["separating_only"], false);
}

#[test]
fn analyze_covers_the_three_regimes() {
    let r1 = analyze_json(U1);
    assert_eq!(r1["informativeness"], 1);
    assert_eq!(r1["extraction_capacity"], 1);
    assert_eq!(r1["leader_follower_gap"], 0);
    assert_eq!(r1["symmetric"], true);
    assert_eq!(r1["graphs_coincide"], true);
    assert_eq!(r1["class_existence"]["pooling_exists"], true);
    assert_eq!(r1["class_existence"]["semi_separating_exists"], true);

    let r3 = analyze_json(U3);
    assert_eq!(r3["informativeness"], 3);
    assert_eq!(r3["extraction_capacity"], 1);
    assert_eq!(r3["leader_follower_gap"], 2);
    assert_eq!(r3["strong_graph"]["edge_count"], 0);
    assert_eq!(r3["weak_graph"]["edge_count"], 3);
    assert_eq!(r3["class_existence"]["separating_only"], true);
    assert_eq!(r3["class_existence"]["pooling_exists"], false);
    assert_eq!(r3["class_existence"]["semi_separating_exists"], false);
}

#[test]
fn analyze_text_and_json_agree() {
    let (_dir, path) = write_temp(U2);
    let text = stdout_str(&run(&["analyze", "--input", path.to_str().unwrap()]));
    assert!(text.contains("informativeness I(U) = 2"));
    assert!(text.contains("extraction capacity Xi(U) = 1"));
    assert!(text.contains("leader/follower gap = 1"));
    assert!(text.contains("only separating equilibria = no"));
}

#[test]
fn analyze_round_trips_through_its_json_report() {
    let (_dir, path) = write_temp(U2);
    let first = stdout_str(&run(&[
        "analyze",
        "--input",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]));
    let report_path = path.with_file_name("report.json");
    std::fs::write(&report_path, &first).unwrap();
    let second = stdout_str(&run(&[
        "analyze",
        "--input",
        report_path.to_str().unwrap(),
        "--format",
        "json",
    ]));
    assert_eq!(first, second);
}

#[test]
fn analyze_separates_symmetry_from_graph_equality() {
    // Symmetric matrix whose diagonal straddles an off-diagonal value: the
    // two graphs differ, so symmetry alone must not claim the duality tie.
    let r = analyze_json("0 1\n1 5\n");
    assert_eq!(r["symmetric"], true);
    assert_eq!(r["graphs_coincide"], false);
    assert_eq!(r["extraction_capacity"], 1);
    assert_eq!(r["informativeness"], 2);
    assert_eq!(r["primal_optimum"], 2);
    assert_eq!(r["dual_optimum"], 2);
}

#[test]
fn text_input_accepts_comments_and_rationals() {
    let (_dir, path) = write_temp("# a 2x2 game\n0 1/2\n-0.25 0  # trailing note\n");
    let r = stdout_json(&run(&[
        "analyze",
        "--input",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]));
    assert_eq!(r["q"], 2);
    assert_eq!(r["u"][0][1], "1/2");
    assert_eq!(r["u"][1][0], "-1/4");
}

#[test]
fn bad_inputs_exit_two() {
    let (_dir, path) = write_temp("");
    let out = run(&["analyze", "--input", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no matrix rows"));

    let (_dir2, ragged) = write_temp("0 1\n1\n");
    assert_eq!(exit_code(&run(&["analyze", "--input", ragged.to_str().unwrap()])), 2);

    let (_dir3, junk) = write_temp("0 what\n1 0\n");
    assert_eq!(exit_code(&run(&["analyze", "--input", junk.to_str().unwrap()])), 2);

    let (_dir4, float) = write_temp("{\"u\":[[0.5,1],[1,0]]}");
    let out = run(&["analyze", "--input", float.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("exact rationals"));

    assert_eq!(exit_code(&run(&["analyze", "--input", "/nonexistent/u.txt"])), 2);
}

#[test]
fn oversize_inputs_exit_three() {
    let big = "0 ".repeat(13).trim_end().to_string() + "\n";
    let matrix = big.repeat(13);
    let (_dir, path) = write_temp(&matrix);
    let out = run(&["enumerate", "--input", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--limit-q"));

    let (_dir2, small) = write_temp(U3);
    let out = run(&[
        "behavioral",
        "--input",
        small.to_str().unwrap(),
        "--grid",
        "51",
    ]);
    assert_eq!(exit_code(&out), 3);
}

#[test]
fn enumerate_lists_every_partition_with_classes() {
    let (_dir, path) = write_temp(U2);
    let r = stdout_json(&run(&[
        "enumerate",
        "--input",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]));
    assert_eq!(r["partition_count"], 2);
    assert_eq!(r["informativeness"], 2);
    assert_eq!(r["max_recovered"], 3);
    let classes: Vec<(&str, u64)> = r["partitions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p["class"].as_str().unwrap(), p["recovered"].as_u64().unwrap()))
        .collect();
    assert!(classes.contains(&("separating", 3)));
    assert!(classes.contains(&("semi-separating", 2)));

    let (_dir1, p1) = write_temp(U1);
    let r1 = stdout_json(&run(&[
        "enumerate",
        "--input",
        p1.to_str().unwrap(),
        "--format",
        "json",
    ]));
    assert_eq!(r1["partition_count"], 5);
    let labels: Vec<&str> = r1["partitions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["class"].as_str().unwrap())
        .collect();
    assert_eq!(labels.iter().filter(|l| **l == "pooling").count(), 1);
    assert_eq!(labels.iter().filter(|l| **l == "semi-separating").count(), 3);
    assert_eq!(labels.iter().filter(|l| **l == "separating").count(), 1);

    let (_dir3, p3) = write_temp(U3);
    let r3 = stdout_json(&run(&[
        "enumerate",
        "--input",
        p3.to_str().unwrap(),
        "--format",
        "json",
    ]));
    assert_eq!(r3["partition_count"], 1);
    assert_eq!(r3["partitions"][0]["class"], "separating");
}

#[test]
fn duality_prints_both_programs_with_optima() {
    let (_dir, path) = write_temp(U2);
    let r = stdout_json(&run(&[
        "duality",
        "--input",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]));
    assert_eq!(r["primal"]["optimum"], 2);
    assert_eq!(r["dual"]["optimum"], 2);
    assert_eq!(r["extraction_capacity"], 1);
    assert_eq!(r["informativeness"], 2);
    assert_eq!(r["primal"]["selected"].as_array().unwrap().len(), 2);
    assert_eq!(r["dual"]["selected"].as_array().unwrap().len(), 2);
    let primal_listing = r["primal"]["listing"].as_str().unwrap();
    assert!(primal_listing.starts_with("maximize"));
    assert!(primal_listing.contains("subject to"));
    assert!(r["dual"]["listing"].as_str().unwrap().starts_with("minimize"));

    let text = stdout_str(&run(&["duality", "--input", path.to_str().unwrap()]));
    assert!(text.contains("maximize x0 + x1 + x2"));
    assert!(text.contains("dual cover as partition"));
}

#[test]
fn behavioral_finds_the_known_maximum() {
    let (_dir, path) = write_temp(U3);
    let r = stdout_json(&run(&[
        "behavioral",
        "--input",
        path.to_str().unwrap(),
        "--grid",
        "4",
        "--format",
        "json",
    ]));
    assert_eq!(r["max_value"], "1/6");
    assert_eq!(r["sup_estimate"], "1/3");
    assert_eq!(r["attained"], false);
    assert_eq!(r["points"], 3375);
    assert_eq!(r["limit_value"], "-1/3");
    assert!(r["argmax_class"].as_str().unwrap().starts_with("C.(b)"));
    assert!(r["limit_class"].as_str().unwrap().starts_with("C.(a)"));
    assert!(r["verdict"]
        .as_str()
        .unwrap()
        .starts_with("supremum not attained on grid; max = 1/6"));
    let histogram_total: u64 = r["class_histogram"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["count"].as_u64().unwrap())
        .sum();
    assert_eq!(histogram_total, 3375);

    let text = stdout_str(&run(&[
        "behavioral",
        "--input",
        path.to_str().unwrap(),
        "--grid",
        "4",
    ]));
    assert!(text.contains("max value = 1/6"));
    assert!(text.contains("supremum not attained on grid; max = 1/6 < 1/3"));
}

#[test]
fn behavioral_reports_attained_maxima() {
    let (_dir, path) = write_temp(U1);
    let r = stdout_json(&run(&[
        "behavioral",
        "--input",
        path.to_str().unwrap(),
        "--grid",
        "4",
        "--format",
        "json",
    ]));
    assert_eq!(r["max_value"], "2/3");
    assert_eq!(r["attained"], true);
    assert_eq!(r["verdict"], "maximum attained on grid; max = 2/3");
}

#[test]
fn behavioral_accepts_a_prior() {
    let (_dir, path) = write_temp(U3);
    let r = stdout_json(&run(&[
        "behavioral",
        "--input",
        path.to_str().unwrap(),
        "--grid",
        "2",
        "--prior",
        "1/2,1/4,1/4",
        "--format",
        "json",
    ]));
    assert_eq!(
        r["prior"],
        serde_json::json!(["1/2", "1/4", "1/4"])
    );

    let out = run(&[
        "behavioral",
        "--input",
        path.to_str().unwrap(),
        "--prior",
        "1,2",
    ]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn behavioral_stream_writes_every_grid_point() {
    let (_dir, path) = write_temp(U3);
    let stream = path.with_file_name("points.jsonl");
    let r = stdout_json(&run(&[
        "behavioral",
        "--input",
        path.to_str().unwrap(),
        "--grid",
        "2",
        "--stream",
        stream.to_str().unwrap(),
        "--format",
        "json",
    ]));
    assert_eq!(r["max_value"], "0");
    assert_eq!(r["points"], 216);
    let lines: Vec<String> = std::fs::read_to_string(&stream)
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect();
    assert_eq!(lines.len(), 216);
    let mut saw_max = false;
    for line in &lines {
        let point: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(point["pi"].as_array().unwrap().len(), 3);
        if point["value"] == "0" {
            saw_max = true;
        }
    }
    assert!(saw_max);

    let out = run(&[
        "behavioral",
        "--input",
        path.to_str().unwrap(),
        "--grid",
        "16",
        "--stream",
        stream.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 3);
}

#[test]
fn gen_is_deterministic_and_feeds_analyze() {
    let first = stdout_str(&run(&["gen", "--q", "4", "--seed", "7"]));
    let second = stdout_str(&run(&["gen", "--q", "4", "--seed", "7"]));
    assert_eq!(first, second);
    let rows: Vec<Vec<i64>> = first
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    assert!(rows
        .iter()
        .all(|r| r.len() == 4 && r.iter().all(|v| (-3..=3).contains(v))));

    let other = stdout_str(&run(&["gen", "--q", "4", "--seed", "8"]));
    assert_ne!(first, other);

    let (_dir, path) = write_temp(&first);
    let out = run(&["analyze", "--input", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
}

#[test]
fn gen_shapes_symmetric_and_skew_matrices() {
    let parse = |text: &str| -> Vec<Vec<i64>> {
        text.lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
            .collect()
    };
    let sym = parse(&stdout_str(&run(&[
        "gen", "--q", "5", "--seed", "3", "--symmetric",
    ])));
    for x in 0..5 {
        for y in 0..5 {
            assert_eq!(sym[x][y], sym[y][x]);
        }
    }
    let skew = parse(&stdout_str(&run(&[
        "gen", "--q", "5", "--seed", "3", "--skew",
    ])));
    for x in 0..5 {
        assert_eq!(skew[x][x], 0);
        for y in 0..5 {
            assert_eq!(skew[x][y], -skew[y][x]);
        }
    }

    assert_eq!(
        exit_code(&run(&["gen", "--q", "3", "--seed", "1", "--lo", "5", "--hi", "2"])),
        2
    );
    assert_eq!(
        exit_code(&run(&[
            "gen", "--q", "3", "--seed", "1", "--symmetric", "--skew",
        ])),
        2
    );
    assert_eq!(exit_code(&run(&["gen", "--q", "0", "--seed", "1"])), 2);
}
