use std::process::{Command, Output};

fn fbgain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fbgain"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| {
            let (k, v) = l.split_once('=')?;
            (k.trim() == key).then(|| v.trim().parse().unwrap())
        })
        .unwrap_or_else(|| panic!("no {key} in {text}"))
}

#[test]
fn solve_massive_anchor() {
    let out = fbgain(&["solve", "--massive", "--total-power-db", "30"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!((field(&text, "lambda") - 9.119).abs() < 1e-3);
    assert!((field(&text, "F") - 1.320).abs() < 1e-3);
}

#[test]
fn solve_k100() {
    let text = stdout(&fbgain(&["solve", "--users", "100", "--power-db", "0"]));
    assert!((field(&text, "lambda_db") - 8.0).abs() < 0.3);
    assert!((field(&text, "F") - 1.4).abs() < 0.03);
}

#[test]
fn solve_vanishing_power() {
    let text = stdout(&fbgain(&[
        "solve",
        "--users",
        "2",
        "--power-db",
        "-90",
        "--precision",
        "6",
    ]));
    assert!(text.contains("lambda    = 1.000000\n"), "{text}");
    assert!(text.contains("F         = 1.000000\n"), "{text}");
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["solve", "--users", "2"][..],
        &["solve", "--users", "1", "--power-db", "0"],
        &["solve", "--users", "2", "--massive", "--power-db", "0"],
        &["solve", "--massive", "--power-db", "0"],
        &[
            "solve",
            "--users",
            "2",
            "--power-db",
            "0",
            "--total-power-db",
            "3",
        ],
        &[
            "solve",
            "--users",
            "2",
            "--power-db",
            "0",
            "--format",
            "svg",
        ],
        &[
            "solve",
            "--users",
            "2",
            "--power-db",
            "0",
            "--precision",
            "18",
        ],
        &["curve", "--massive", "--from-db", "5", "--to-db", "0"],
        &["curve", "--massive", "--step-db", "0"],
        &["figure", "--which", "cfactor", "--users", "1"],
        &["figure", "--which", "bogus"],
        &["verify", "--samples", "0"],
        &["peak", "--massive", "--from-db", "3", "--to-db", "3"],
    ] {
        let out = fbgain(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn curve_csv_layout() {
    let out = fbgain(&[
        "curve",
        "--massive",
        "--from-db",
        "-10",
        "--to-db",
        "30",
        "--step-db",
        "0.1",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("pi_db,pi,K,lambda,lambda_db,F"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            assert_eq!(cells[2], "inf");
            cells
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != 2)
                .map(|(_, c)| c.parse().unwrap())
                .collect()
        })
        .collect();
    assert_eq!(rows.len(), 401);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    let last = rows.last().unwrap();
    assert_eq!(last[0], 30.0);
    assert!((last[2] - 9.119).abs() < 1e-3);
    assert!(!text.contains('\r'));
}

#[test]
fn curve_degenerate_range() {
    let text = stdout(&fbgain(&[
        "curve",
        "--users",
        "2",
        "--from-db",
        "0",
        "--to-db",
        "0",
        "--step-db",
        "1",
    ]));
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    let lambda: f64 = rows[0].split(',').nth(3).unwrap().parse().unwrap();
    assert!((1.0..=2.0).contains(&lambda));
}

#[test]
fn curve_json_uses_massive_token() {
    let text = stdout(&fbgain(&[
        "curve",
        "--massive",
        "--from-db",
        "0",
        "--to-db",
        "1",
        "--step-db",
        "1",
        "--format",
        "json",
    ]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 2);
    assert_eq!(arr[0]["K"], "massive");
}

#[test]
fn peak_commands() {
    let text = stdout(&fbgain(&["peak", "--massive"]));
    assert!((field(&text, "F_star") - 1.537).abs() < 1e-3);
    assert!((field(&text, "pi_star_db") - 7.3).abs() < 0.05);

    let text = stdout(&fbgain(&["peak", "--users", "10"]));
    assert!((field(&text, "F_star") - 1.446).abs() < 1e-3);
    assert!((field(&text, "pi_star_db") - 7.2).abs() < 0.1);

    let text = stdout(&fbgain(&["peak", "--users", "2"]));
    assert!((field(&text, "F_star") - 1.1903994330).abs() < 1e-8);
    assert!((field(&text, "pi_star_db") - 7.104).abs() < 0.01);
}

#[test]
fn peak_without_interior_maximum_exits_1() {
    let out = fbgain(&["peak", "--massive", "--from-db", "-10", "--to-db", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("widen"));
}

#[test]
fn verify_exit_codes() {
    let out = fbgain(&["verify", "--seed", "42", "--samples", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines.len() >= 8);
    assert!(lines[..lines.len() - 1]
        .iter()
        .all(|l| l.starts_with("PASS ")));

    let out = fbgain(&["verify", "--samples", "10", "--sabotage", "negate-residual"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL "));
}

/// Parses `# K=<value>` blocks into (label, rows).
fn figure_blocks(text: &str) -> Vec<(String, Vec<Vec<f64>>)> {
    let mut blocks: Vec<(String, Vec<Vec<f64>>)> = Vec::new();
    for line in text.lines() {
        if let Some(label) = line.strip_prefix("# K=") {
            blocks.push((label.to_string(), Vec::new()));
        } else if line.starts_with("pi_db") {
            continue;
        } else {
            let row = line.split(',').map(|c| c.parse().unwrap()).collect();
            blocks.last_mut().unwrap().1.push(row);
        }
    }
    blocks
}

#[test]
fn figure_cfactor() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig2.csv");
    let out = fbgain(&[
        "figure",
        "--which",
        "cfactor",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let blocks = figure_blocks(&std::fs::read_to_string(&path).unwrap());
    let labels: Vec<&str> = blocks.iter().map(|b| b.0.as_str()).collect();
    assert_eq!(labels, ["2", "3", "10", "100", "inf"]);
    let massive = &blocks[4].1;
    let peak = massive
        .iter()
        .map(|r| r[1])
        .fold(f64::NEG_INFINITY, f64::max);
    assert!((peak - 1.537).abs() < 1e-3);
    // massive series is the uppermost curve
    for (_, rows) in &blocks[..4] {
        for (r, m) in rows.iter().zip(massive) {
            assert!(r[1] <= m[1] + 1e-12);
        }
    }
}

#[test]
fn figure_pfactor_nondecreasing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig1.csv");
    assert!(fbgain(&[
        "figure",
        "--which",
        "pfactor",
        "--out",
        path.to_str().unwrap()
    ])
    .status
    .success());
    let blocks = figure_blocks(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(blocks.len(), 5);
    for (label, rows) in &blocks {
        assert_eq!(rows.len(), 401);
        assert!(rows.windows(2).all(|w| w[1][1] >= w[0][1]), "K={label}");
    }
    let massive = &blocks[4].1;
    for (_, rows) in &blocks[..4] {
        for (r, m) in rows.iter().zip(massive) {
            assert!(r[1] <= m[1]);
        }
    }
}

#[test]
fn figure_single_series() {
    let text = stdout(&fbgain(&["figure", "--which", "cfactor", "--users", "2"]));
    let blocks = figure_blocks(&text);
    assert_eq!(blocks.len(), 1);
    let peak = blocks[0]
        .1
        .iter()
        .map(|r| r[1])
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(peak < 1.537);
}

#[test]
fn figure_svg() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig1.svg");
    assert!(fbgain(&[
        "figure",
        "--which",
        "pfactor",
        "--out",
        path.to_str().unwrap()
    ])
    .status
    .success());
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline").count(), 5);
    assert!(svg.contains("Power gain factor λ* vs. π"));

    let svg = stdout(&fbgain(&[
        "figure",
        "--which",
        "cfactor",
        "--users",
        "10,massive",
        "--format",
        "svg",
    ]));
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert!(svg.contains("Capacity gain factor F(π) vs. π"));
}

#[test]
fn figure_json() {
    let text = stdout(&fbgain(&[
        "figure",
        "--which",
        "cfactor",
        "--users",
        "3,inf",
        "--step-db",
        "1",
        "--format",
        "json",
    ]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["which"], "cfactor");
    assert_eq!(v["series"][0]["K"], 3);
    assert_eq!(v["series"][1]["K"], "massive");
    assert_eq!(v["series"][1]["points"].as_array().unwrap().len(), 41);
}

#[test]
fn precision_round_trips() {
    for precision in ["3", "9", "17"] {
        let text = stdout(&fbgain(&[
            "curve",
            "--users",
            "3",
            "--from-db",
            "-1",
            "--to-db",
            "1",
            "--step-db",
            "0.5",
            "--precision",
            precision,
        ]));
        let p: usize = precision.parse().unwrap();
        for line in text.lines().skip(1) {
            for cell in line.split(',').filter(|c| *c != "3") {
                let v: f64 = cell.parse().unwrap();
                assert_eq!(format!("{v:.p$}"), cell);
            }
        }
    }
}
