use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use serde_json::Value;
use tempfile::TempDir;

const WORKED_A: &str = "# worked example\n3 3\n0 0,-3 0\n0,2 1 -1\n0,4 2,-3 -2\n";
const WORKED_B: &str = "3 1\n1\n0,2\n1,4\n";
const PERTURBED_B: &str = "3 1\n1\n0,2\n2,4\n";
const WORKED_G: &str = "3 3\n\
    -0.13333333333333333 0,-0.4 0\n\
    0,0.3333333333333333 0 0\n\
    0,0.06666666666666667 -0.2 0\n";
const WORKED_STREAM: &str = "n 3\n0 0,-3 0 | 1\n0,2 1 -1 | 0,2\n0,4 2,-3 -2 | 1,4\nEND\n";

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str], stdin: Option<&str>) -> Run {
    let mut child = Command::new(env!("CARGO_BIN_EXE_rowortho"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn rowortho");
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(input) = stdin {
            pipe.write_all(input.as_bytes()).unwrap();
        }
    }
    let out = child.wait_with_output().unwrap();
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

struct Files(TempDir);

impl Files {
    fn new() -> Self {
        Self(TempDir::new().unwrap())
    }

    fn put(&self, name: &str, text: &str) -> PathBuf {
        let path = self.0.path().join(name);
        std::fs::write(&path, text).unwrap();
        path
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap_or_else(|e| panic!("{e}: {text}"))
}

fn complex_vec(v: &Value) -> Vec<(f64, f64)> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|p| (p[0].as_f64().unwrap(), p[1].as_f64().unwrap()))
        .collect()
}

fn assert_close(got: &[(f64, f64)], want: &[(f64, f64)], tol: f64) {
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(want) {
        assert!(
            (g.0 - w.0).abs() <= tol && (g.1 - w.1).abs() <= tol,
            "{got:?} vs {want:?}"
        );
    }
}

const WORKED_X_P: [(f64, f64); 3] = [(2.0 / 3.0, 0.0), (0.0, 1.0 / 3.0), (0.0, -1.0 / 3.0)];

#[test]
fn solve_worked_example() {
    let f = Files::new();
    let a = f.put("a.txt", WORKED_A);
    let b = f.put("b.txt", WORKED_B);
    let r = run(
        &["solve", "--matrix", s(&a), "--rhs", s(&b), "--json"],
        None,
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r.stdout);
    assert_close(&complex_vec(&v["x_p"]), &WORKED_X_P, 1e-12);
    assert_eq!(v["rank"], 2);
    assert_eq!(v["consistent"], true);
    assert!(v.get("offending_row").is_none());
}

#[test]
fn solve_text_output_names_fields() {
    let f = Files::new();
    let a = f.put("a.txt", WORKED_A);
    let b = f.put("b.txt", WORKED_B);
    let r = run(
        &[
            "solve",
            "--matrix",
            s(&a),
            "--rhs",
            s(&b),
            "--emit",
            "xp,proj,log",
        ],
        None,
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    for key in [
        "x_p:",
        "rank: 2",
        "consistent: true",
        "projector:",
        "log:",
        "Row_3 has zero norm",
    ] {
        assert!(r.stdout.contains(key), "missing {key}: {}", r.stdout);
    }
}

#[test]
fn solve_flags_inconsistent_rhs() {
    let f = Files::new();
    let a = f.put("a.txt", WORKED_A);
    let b = f.put("b.txt", PERTURBED_B);
    for variation in ["transform-rhs", "accumulate-m"] {
        let r = run(
            &[
                "solve",
                "--matrix",
                s(&a),
                "--rhs",
                s(&b),
                "--variation",
                variation,
                "--json",
            ],
            None,
        );
        assert_eq!(r.code, 2, "{variation}: {}", r.stderr);
        let v = json(&r.stdout);
        assert_eq!(v["consistent"], false);
        assert_eq!(v["offending_row"], 3);
        assert!(v["x_p"].is_array());
    }
}

#[test]
fn identity_returns_rhs() {
    let f = Files::new();
    let a = f.put("a.txt", "2 2\n1 0\n0 1\n");
    let b = f.put("b.txt", "2 1\n3,-1\n0.5\n");
    let r = run(
        &["solve", "--matrix", s(&a), "--rhs", s(&b), "--json"],
        None,
    );
    assert_eq!(r.code, 0);
    assert_eq!(
        complex_vec(&json(&r.stdout)["x_p"]),
        vec![(3.0, -1.0), (0.5, 0.0)]
    );
}

#[test]
fn variations_agree() {
    let f = Files::new();
    let a = f.put("a.txt", WORKED_A);
    let b = f.put("b.txt", WORKED_B);
    let xs: Vec<_> = ["transform-rhs", "accumulate-m"]
        .iter()
        .map(|v| {
            let r = run(
                &[
                    "solve",
                    "--matrix",
                    s(&a),
                    "--rhs",
                    s(&b),
                    "--variation",
                    v,
                    "--json",
                ],
                None,
            );
            assert_eq!(r.code, 0);
            complex_vec(&json(&r.stdout)["x_p"])
        })
        .collect();
    assert_close(&xs[0], &xs[1], 1e-13);
}

#[test]
fn accumulate_m_emits_g_m_and_penrose() {
    let f = Files::new();
    let a = f.put("a.txt", WORKED_A);
    let b = f.put("b.txt", WORKED_B);
    let r = run(
        &[
            "solve",
            "--matrix",
            s(&a),
            "--rhs",
            s(&b),
            "--variation",
            "accumulate-m",
            "--emit",
            "xp,ginv,m,penrose,nullbasis",
            "--json",
        ],
        None,
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r.stdout);
    let g = &v["g"];
    assert_close(
        &complex_vec(&g[0]),
        &[(-2.0 / 15.0, 0.0), (0.0, -0.4), (0.0, 0.0)],
        1e-12,
    );
    assert_close(
        &complex_vec(&g[1]),
        &[(0.0, 1.0 / 3.0), (0.0, 0.0), (0.0, 0.0)],
        1e-12,
    );
    assert_close(
        &complex_vec(&g[2]),
        &[(0.0, 1.0 / 15.0), (-0.2, 0.0), (0.0, 0.0)],
        1e-12,
    );
    assert_eq!(v["m_factor"].as_array().unwrap().len(), 3);
    assert_eq!(v["penrose"]["inferred_class"], json("[1, 2, 4]"));
    assert_eq!(v["null_basis"].as_array().unwrap().len(), 1);
}

#[test]
fn multi_column_rhs() {
    let f = Files::new();
    let a = f.put("a.txt", WORKED_A);
    let b = f.put("b.txt", "3 2\n1 1\n0,2 0,2\n1,4 2,4\n");
    let r = run(
        &["solve", "--matrix", s(&a), "--rhs", s(&b), "--json"],
        None,
    );
    assert_eq!(r.code, 2);
    let v = json(&r.stdout);
    assert_eq!(v["consistent_columns"], json("[true, false]"));
    let col0: Vec<_> = v["x_p"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| complex_vec(row)[0])
        .collect();
    assert_close(&col0, &WORKED_X_P, 1e-12);
}

#[test]
fn usage_and_parse_errors_exit_1() {
    let f = Files::new();
    let a = f.put("a.txt", WORKED_A);
    let b = f.put("b.txt", WORKED_B);
    let bad = f.put("bad.txt", "3 3\n0 0 0\n1 x 1\n0 0 0\n");
    let short = f.put("short.txt", "2 1\n1\n2\n");

    let r = run(&["solve", "--matrix", s(&bad), "--rhs", s(&b)], None);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("line 3, column 3"), "{}", r.stderr);

    let r = run(&["solve", "--matrix", s(&a), "--rhs", s(&short)], None);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("dimension mismatch"), "{}", r.stderr);

    let r = run(
        &["solve", "--matrix", s(&a), "--rhs", s(&b), "--emit", "ginv"],
        None,
    );
    assert_eq!(r.code, 1);

    let r = run(&["solve", "--matrix", s(&a)], None);
    assert_eq!(r.code, 1);

    let r = run(
        &["solve", "--matrix", "/nonexistent/a.txt", "--rhs", s(&b)],
        None,
    );
    assert_eq!(r.code, 1);

    let r = run(&["--help"], None);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("stream"));
}

#[test]
fn stream_worked_example() {
    let r = run(&["stream", "--json"], Some(WORKED_STREAM));
    assert_eq!(r.code, 0, "{}", r.stderr);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines.len(), 4);
    let incs: Vec<Value> = lines[..3].iter().map(|l| json(l)).collect();
    assert_close(
        &complex_vec(&incs[0]["x_p_inc"]),
        &[(0.0, 0.0), (0.0, 1.0 / 3.0), (0.0, 0.0)],
        1e-12,
    );
    assert_close(
        &complex_vec(&incs[1]["x_p_inc"]),
        &[(2.0 / 3.0, 0.0), (0.0, 0.0), (0.0, -1.0 / 3.0)],
        1e-12,
    );
    assert_eq!(incs[2]["was_zero_row"], true);
    assert_eq!(incs[2]["inconsistency_detected"], false);
    assert_eq!(incs[1]["rank"], 2);
    assert_eq!(incs[0]["row"], 1);

    let last = json(lines[3]);
    assert_close(&complex_vec(&last["x_p"]), &WORKED_X_P, 1e-12);
    assert_eq!(last["consistent"], true);
    assert_eq!(last["increments"].as_array().unwrap().len(), 3);
}

#[test]
fn stream_matches_solve() {
    let f = Files::new();
    let a = f.put("a.txt", WORKED_A);
    let b = f.put("b.txt", WORKED_B);
    let batch = json(
        &run(
            &["solve", "--matrix", s(&a), "--rhs", s(&b), "--json"],
            None,
        )
        .stdout,
    );
    let stream = run(&["stream", "--json", "--reorth"], Some(WORKED_STREAM));
    let last = json(stream.stdout.lines().last().unwrap());
    assert_close(
        &complex_vec(&last["x_p"]),
        &complex_vec(&batch["x_p"]),
        1e-13,
    );
    assert_eq!(last["rank"], batch["rank"]);
}

#[test]
fn stream_flags_perturbed_row() {
    let input = WORKED_STREAM.replace("| 1,4", "| 2,4");
    let r = run(&["stream"], Some(&input));
    assert_eq!(r.code, 2, "{}", r.stderr);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert!(
        lines[2].starts_with("row 3:") && lines[2].contains("inconsistent = true"),
        "{}",
        lines[2]
    );
    assert!(lines[1].contains("inconsistent = false"));
    assert!(r.stdout.contains("consistent: false"));
}

#[test]
fn stream_tracks_g() {
    let r = run(&["stream", "--json", "--track-g"], Some(WORKED_STREAM));
    assert_eq!(r.code, 0);
    let last = json(r.stdout.lines().last().unwrap());
    assert_close(
        &complex_vec(&last["g"][1]),
        &[(0.0, 1.0 / 3.0), (0.0, 0.0), (0.0, 0.0)],
        1e-12,
    );
}

#[test]
fn empty_stream_is_zero_solution() {
    let r = run(&["stream", "--json"], Some("# nothing yet\nn 3\nEND\n"));
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(r.stdout.trim());
    assert_eq!(complex_vec(&v["x_p"]), vec![(0.0, 0.0); 3]);
    assert_eq!(v["rank"], 0);
}

#[test]
fn stream_errors_report_line() {
    let r = run(&["stream"], Some("n 3\n0 0,-3 0 | 1\n"));
    assert_eq!(r.code, 1);
    assert!(
        r.stderr.contains("line 3") && r.stderr.contains("END"),
        "{}",
        r.stderr
    );
    assert!(
        r.stdout.starts_with("row 1:"),
        "rows before the error are still reported"
    );

    let r = run(&["stream"], Some("n 3\n0 0 | 1\nEND\n"));
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("line 2"), "{}", r.stderr);

    let r = run(&["stream"], Some("3\nEND\n"));
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("line 1"), "{}", r.stderr);
}

#[test]
fn check_worked_inverse() {
    let f = Files::new();
    let a = f.put("a.txt", WORKED_A);
    let g = f.put("g.txt", WORKED_G);
    let r = run(
        &["check", "--matrix", s(&a), "--ginv", s(&g), "--json"],
        None,
    );
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    let v = json(&r.stdout);
    assert_eq!(v["penrose"]["inferred_class"], json("[1, 2, 4]"));
    assert_eq!(v["penrose"]["p3"]["holds"], false);
}

#[test]
fn check_identity_is_moore_penrose() {
    let f = Files::new();
    let i = f.put("i.txt", "2 2\n1 0\n0 1\n");
    let r = run(&["check", "--matrix", s(&i), "--ginv", s(&i)], None);
    assert_eq!(r.code, 0);
    assert!(
        r.stdout.contains("inferred_class: [1, 2, 3, 4]"),
        "{}",
        r.stdout
    );
}

#[test]
fn check_rejects_zero_inverse() {
    let f = Files::new();
    let a = f.put("a.txt", WORKED_A);
    let z = f.put("z.txt", "3 3\n0 0 0\n0 0 0\n0 0 0\n");
    let r = run(&["check", "--matrix", s(&a), "--ginv", s(&z)], None);
    assert_eq!(r.code, 3);
    assert!(r.stdout.contains("P1: fails"));

    let wrong = f.put("w.txt", "2 3\n0 0 0\n0 0 0\n");
    let r = run(&["check", "--matrix", s(&a), "--ginv", s(&wrong)], None);
    assert_eq!(r.code, 1);
}
