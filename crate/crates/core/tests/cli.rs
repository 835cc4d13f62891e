use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn sitad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sitad")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Ws {
    dir: TempDir,
}

impl Ws {
    fn new() -> Self {
        Ws {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p
    }
}

const SMALL_DB: &str = "\
# a comment
1\t1:3 3:1
2\t2:1 4:3
3\t2:2 4:2 5:1 6:1
4\t1:1 5:3

7\t2:1 3:3
9\t1:1
";

fn ok(o: &Output) -> String {
    assert!(
        o.status.success(),
        "status {:?}\nstderr: {}",
        o.status,
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn gen_is_deterministic_and_handles_zero() {
    let w = Ws::new();
    let (a, b, c) = (w.path("a.txt"), w.path("b.txt"), w.path("c.txt"));
    ok(&sitad(&["gen", "-n", "500", "-d", "200", "--seed", "5", "-o", s(&a)]));
    ok(&sitad(&["gen", "-n", "500", "-d", "200", "--seed", "5", "-o", s(&b)]));
    ok(&sitad(&["gen", "-n", "500", "-d", "200", "--seed", "6", "-o", s(&c)]));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());

    let out = ok(&sitad(&["gen", "-n", "0"]));
    assert_eq!(out.lines().count(), 1);
    assert!(out.starts_with('#'));
}

#[test]
fn gen_rejects_bad_parameters_as_usage_errors() {
    assert_eq!(sitad(&["gen", "-n", "5", "-d", "0"]).status.code(), Some(1));
    assert_eq!(sitad(&["gen", "-n", "5", "-m", "0"]).status.code(), Some(1));
    assert_eq!(sitad(&["gen", "-n", "-3"]).status.code(), Some(1));
}

#[test]
fn build_is_byte_identical_and_reports_sections() {
    let w = Ws::new();
    let db = w.path("db.txt");
    ok(&sitad(&["gen", "-n", "2000", "-o", s(&db)]));
    let (x1, x2) = (w.path("1.idx"), w.path("2.idx"));
    let report = ok(&sitad(&["build", "-i", s(&db), "-o", s(&x1)]));
    ok(&sitad(&["build", "-i", s(&db), "-o", s(&x2), "--parallel"]));
    assert_eq!(std::fs::read(&x1).unwrap(), std::fs::read(&x2).unwrap());
    for key in [
        "build seconds",
        "bitvectors",
        "rank samples",
        "weights",
        "rmq",
        "offsets",
        "ids",
        "file",
    ] {
        assert!(report.contains(key), "missing {key} in\n{report}");
    }
    assert!(report.contains("descriptors      2000"));
}

#[test]
fn empty_database_gives_a_valid_empty_index() {
    let w = Ws::new();
    let db = w.write("db.txt", "# nothing here\n");
    let idx = w.path("db.idx");
    ok(&sitad(&["build", "-i", s(&db), "-o", s(&idx)]));
    let q = w.write("q.txt", "1\t1:1\n");
    let out = ok(&sitad(&["query", "-x", s(&idx), "-q", s(&q), "-e", "0.5"]));
    assert_eq!(out, "query_id,match_id,similarity\n");
}

#[test]
fn parse_errors_are_data_errors_with_line_numbers() {
    let w = Ws::new();
    let db = w.write("db.txt", "1\t1:2\n2\t3:0\n");
    let o = sitad(&["build", "-i", s(&db), "-o", s(&w.path("x.idx"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = sitad(&["build", "-i", s(&w.path("missing.txt")), "-o", s(&w.path("x.idx"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn query_examples() {
    let w = Ws::new();
    let db = w.write("db.txt", SMALL_DB);
    let idx = w.path("db.idx");
    ok(&sitad(&["build", "-i", s(&db), "-o", s(&idx)]));

    let q = w.write("q.txt", "5\t2:2 4:2 5:1 6:1\n");
    let out = ok(&sitad(&["query", "-x", s(&idx), "-q", s(&q), "-e", "1.0"]));
    assert_eq!(out, "query_id,match_id,similarity\n5,3,1.000000\n");

    let q = w.write("q2.txt", "8\t1:3 3:1\n");
    let out = ok(&sitad(&["query", "-x", s(&idx), "-q", s(&q), "-e", "0.999"]));
    assert_eq!(out, "query_id,match_id,similarity\n8,1,1.000000\n");
    let q = w.write("q3.txt", "8\t1:3 3:2\n");
    let out = ok(&sitad(&["query", "-x", s(&idx), "-q", s(&q), "-e", "0.95"]));
    assert_eq!(out.lines().count(), 1);
}

#[test]
fn engines_write_identical_csv() {
    let w = Ws::new();
    let db = w.path("db.txt");
    ok(&sitad(&[
        "gen",
        "-n",
        "3000",
        "-d",
        "300",
        "--seed",
        "11",
        "-o",
        s(&db),
    ]));
    let idx = w.path("db.idx");
    ok(&sitad(&["build", "-i", s(&db), "-o", s(&idx)]));
    let text = std::fs::read_to_string(&db).unwrap();
    let queries: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .step_by(97)
        .map(|l| format!("{l}\n"))
        .collect();
    let q = w.write("q.txt", &queries);
    for e in ["0.3", "0.9", "0.95"] {
        let a = ok(&sitad(&[
            "query",
            "-x",
            s(&db),
            "-q",
            s(&q),
            "-e",
            e,
            "--engine",
            "ova",
        ]));
        let b = ok(&sitad(&[
            "query",
            "-x",
            s(&db),
            "-q",
            s(&q),
            "-e",
            e,
            "--engine",
            "inv",
        ]));
        let c = ok(&sitad(&[
            "query",
            "-x",
            s(&idx),
            "-q",
            s(&q),
            "-e",
            e,
            "--engine",
            "sitad",
        ]));
        let d = ok(&sitad(&["query", "-x", s(&db), "-q", s(&q), "-e", e]));
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a, d);
        assert!(a.lines().count() > 1);
        let eps: f64 = e.parse().unwrap();
        let mut prev: Option<(u64, f64, u64)> = None;
        for line in a.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            let (qid, mid, sim): (u64, u64, f64) =
                (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap());
            assert_eq!(f[2].split('.').nth(1).unwrap().len(), 6);
            assert!(sim + 0.5e-6 >= eps, "{line}");
            if let Some((pq, ps, pm)) = prev {
                assert!(
                    qid > pq || (qid == pq && (sim < ps || (sim == ps && mid > pm))),
                    "order at {line}"
                );
            }
            prev = Some((qid, sim, mid));
        }
    }
}

#[test]
fn query_error_cases() {
    let w = Ws::new();
    let db = w.write("db.txt", SMALL_DB);
    let idx = w.path("db.idx");
    ok(&sitad(&["build", "-i", s(&db), "-o", s(&idx)]));
    let q = w.write("q.txt", "1\t1:3\n");

    // Threshold outside (0, 1] is a usage error.
    for e in ["0", "1.5", "abc", "-0.2"] {
        let o = sitad(&["query", "-x", s(&idx), "-q", s(&q), "-e", e]);
        assert_eq!(o.status.code(), Some(1), "eps {e}");
    }
    // Baselines need the text database.
    for engine in ["ova", "inv"] {
        let o = sitad(&["query", "-x", s(&idx), "-q", s(&q), "-e", "0.5", "--engine", engine]);
        assert_eq!(o.status.code(), Some(2));
    }
    assert_eq!(
        sitad(&["query", "-x", s(&idx), "-q", s(&q), "-e", "0.5", "--engine", "nope"])
            .status
            .code(),
        Some(1)
    );
    let o = sitad(&["query", "-x", s(&w.path("none.idx")), "-q", s(&q), "-e", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    let empty_q = w.write("e.txt", "4\t\n");
    assert_eq!(
        sitad(&["query", "-x", s(&idx), "-q", s(&empty_q), "-e", "0.5"])
            .status
            .code(),
        Some(2)
    );
    let junk = w.write("junk.idx", "SITDjunk");
    assert_eq!(
        sitad(&["query", "-x", s(&junk), "-q", s(&q), "-e", "0.5"])
            .status
            .code(),
        Some(2)
    );

    // Threshold above every similarity: no rows, success.
    let out = ok(&sitad(&["query", "-x", s(&idx), "-q", s(&q), "-e", "1"]));
    assert_eq!(out, "query_id,match_id,similarity\n");
}

#[test]
fn stats_go_to_stderr() {
    let w = Ws::new();
    let db = w.write("db.txt", SMALL_DB);
    let q = w.write("q.txt", "2\t2:1 4:3\n1\t1:3 3:1\n");
    let o = sitad(&["query", "-x", s(&db), "-q", s(&q), "-e", "0.5", "--stats"]);
    let out = ok(&o);
    let err = String::from_utf8(o.stderr).unwrap();
    let lines: Vec<&str> = err.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("query=1 blocks=") && lines[1].starts_with("query=2 "));
    assert!(out.lines().nth(1).unwrap().starts_with("1,"));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(sitad(&["--help"]).status.code(), Some(0));
    assert_eq!(sitad(&["--version"]).status.code(), Some(0));
    assert_eq!(sitad(&[]).status.code(), Some(1));
}

#[test]
fn bench_reports_and_is_deterministic_apart_from_timings() {
    let w = Ws::new();
    let db = w.path("db.txt");
    ok(&sitad(&["gen", "-n", "3000", "-o", s(&db)]));
    let run = |out: &Path| {
        let table = ok(&sitad(&[
            "bench",
            "-i",
            s(&db),
            "-e",
            "0.9,0.95,0.98",
            "--engines",
            "ova,inv,sitad",
            "--reps",
            "1",
            "--sample",
            "20",
            "-o",
            s(out),
        ]));
        assert!(table.contains("#TN") && table.contains("sitad"));
        std::fs::read_to_string(out).unwrap()
    };
    let (a, b) = (run(&w.path("a.csv")), run(&w.path("b.csv")));
    let strip = |csv: &str| -> Vec<String> {
        csv.lines()
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                [&f[..4], &f[6..]].concat().join(",")
            })
            .collect()
    };
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(a.lines().count(), 10);
    let rows: Vec<Vec<String>> = a
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    let sit: Vec<&Vec<String>> = rows.iter().filter(|r| r[0] == "sitad").collect();
    for pair in sit.windows(2) {
        for col in [8, 9, 10] {
            let (x, y): (f64, f64) = (pair[0][col].parse().unwrap(), pair[1][col].parse().unwrap());
            assert!(y <= x, "column {col} rose");
        }
    }
    assert_eq!(sitad(&["bench", "-i", s(&db), "--reps", "0"]).status.code(), Some(1));
    assert_eq!(sitad(&["bench", "-i", s(&db), "-e", "0.9,2"]).status.code(), Some(1));
}
