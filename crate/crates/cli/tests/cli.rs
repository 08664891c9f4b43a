use std::path::{Path, PathBuf};
use std::process::Command;

use binet::{compile_rho, corpus, iso, parse_binet, parse_rho};
use binet_cli::{run_command, EXIT_INVALID, EXIT_LIMIT, EXIT_OK};
use tempfile::TempDir;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Out {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("binet").chain(args.iter().copied());
    let code = run_command(argv, &mut out, &mut err);
    Out {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_figure_one_reaches_constant() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "example.rho", corpus::FIGURE1_RHO);
    let o = run(&[
        "run",
        s(&input),
        "--rules",
        "rho.rules",
        "--strategy",
        "deterministic",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let result = parse_binet(&o.stdout).unwrap();
    assert!(iso(&result, &parse_binet("H^c()").unwrap()), "{}", o.stdout);
    assert!(o.stdout.contains("# termination: normal form"));
}

#[test]
fn run_reads_rule_file_from_disk() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "add.binet", corpus::ADD_3_2);
    let rules = write(&dir, "mine.rules", corpus::NAT_RULES);
    let o = run(&["run", s(&input), "--rules", s(&rules)]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let five = "S^r(a), S^a(b), S^b(c), S^c(d), S^d(e), Z^e()";
    assert!(iso(
        &parse_binet(&o.stdout).unwrap(),
        &parse_binet(five).unwrap()
    ));
}

#[test]
fn check_reports_overused_label() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.binet", "A^a(a, a)\n");
    let o = run(&["check", s(&bad)]);
    assert_eq!(o.code, EXIT_INVALID);
    assert!(o.stderr.contains("`a`"), "{}", o.stderr);
    assert!(o.stdout.is_empty());
}

#[test]
fn check_accepts_corpus() {
    let dir = TempDir::new().unwrap();
    let mut args = vec!["check".to_string()];
    for (name, text) in corpus::BINETS.iter().chain(corpus::RULES) {
        args.push(write(&dir, name, text).to_str().unwrap().to_string());
    }
    let argv: Vec<&str> = args.iter().map(String::as_str).collect();
    let o = run(&argv);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(
        o.stdout.lines().count(),
        corpus::BINETS.len() + corpus::RULES.len()
    );
}

#[test]
fn check_rejects_bad_rules() {
    let dir = TempDir::new().unwrap();
    let rules = write(&dir, "bad.rules", "drop: A^a(x), B^a() =>\n");
    let o = run(&["check", s(&rules)]);
    assert_eq!(o.code, EXIT_INVALID);
    assert!(o.stderr.contains("bad.rules"), "{}", o.stderr);

    let dup = write(
        &dir,
        "dup.rules",
        "one: A^a(), B^a() =>\ntwo: B^a(), A^a() =>\n",
    );
    let o = run(&["check", s(&dup)]);
    assert_eq!(o.code, EXIT_INVALID, "{}", o.stdout);
}

#[test]
fn check_reports_parse_position() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "broken.binet", "A^a()\nB^b(c\n");
    let o = run(&["check", s(&bad)]);
    assert_eq!(o.code, EXIT_INVALID);
    assert!(o.stderr.contains("broken.binet:"), "{}", o.stderr);
}

#[test]
fn bench_counts_are_identical() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "add_2_2.binet", corpus::ADD_2_2);
    let o = run(&[
        "bench",
        s(&input),
        "--rules",
        "nat.rules",
        "--strategies",
        "all",
        "--seeds",
        "20",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let rows: Vec<Vec<&str>> = o
        .stdout
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').collect())
        .collect();
    assert_eq!(rows.len(), 22);
    assert!(rows
        .iter()
        .all(|r| r[3] == rows[0][3] && r[6] == "yes" && r[7] == "yes"));
    assert!(o.stdout.contains("identical"));
}

#[test]
fn step_limit_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "add.binet", corpus::ADD_2_2);
    let o = run(&[
        "run",
        s(&input),
        "--rules",
        "nat.rules",
        "--max-passes",
        "1",
    ]);
    assert_eq!(o.code, EXIT_LIMIT);
    assert!(parse_binet(&o.stdout).is_ok());
    let o = run(&[
        "trace",
        s(&input),
        "--rules",
        "nat.rules",
        "--max-steps",
        "2",
    ]);
    assert_eq!(o.code, EXIT_LIMIT);
    assert_eq!(o.stdout.lines().count(), 3);
}

#[test]
fn step_prints_intermediate_snapshot() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "fig.rho", corpus::FIGURE1_RHO);
    let o = run(&["step", s(&input), "-n", "1"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let second = parse_binet(corpus::SECOND).unwrap();
    assert!(
        iso(&parse_binet(&o.stdout).unwrap(), &second),
        "{}",
        o.stdout
    );
}

#[test]
fn trace_is_tab_separated() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "fig.rho", corpus::FIGURE1_RHO);
    let o = run(&["trace", s(&input)]);
    assert_eq!(o.code, EXIT_OK);
    let mut last = 0;
    for line in o.stdout.lines().skip(1) {
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols.len(), 4, "{line}");
        assert!(cols[2].starts_with('/'));
        let n: usize = cols[3].parse().unwrap();
        assert_eq!(n, last + 1);
        last = n;
    }
    assert!(last > 0);
}

#[test]
fn strategy_and_seed_must_agree() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "add.binet", corpus::ADD_2_2);
    let p = s(&input);
    assert_eq!(
        run(&["run", p, "--rules", "nat.rules", "--strategy", "stochastic"]).code,
        EXIT_INVALID
    );
    assert_eq!(
        run(&["run", p, "--rules", "nat.rules", "--seed", "3"]).code,
        EXIT_INVALID
    );
    assert_eq!(
        run(&["run", p, "--rules", "nat.rules", "--strategy", "fastest"]).code,
        EXIT_INVALID
    );
    let o = run(&[
        "run",
        p,
        "--rules",
        "nat.rules",
        "--strategy",
        "stochastic",
        "--seed",
        "3",
    ]);
    assert_eq!(o.code, EXIT_OK);
}

#[test]
fn output_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "nested.binet", corpus::ADD_NESTED);
    for args in [
        vec![
            "run",
            s(&input),
            "--rules",
            "nat.rules",
            "--strategy",
            "stochastic",
            "--seed",
            "7",
        ],
        vec![
            "trace",
            s(&input),
            "--rules",
            "nat.rules",
            "--strategy",
            "weighted",
        ],
        vec!["bench", s(&input), "--rules", "nat.rules", "--seeds", "5"],
    ] {
        let (a, b) = (run(&args), run(&args));
        assert_eq!(a.code, EXIT_OK);
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn priorities_are_applied() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "add.binet", corpus::ADD_2_2);
    let p = s(&input);
    let o = run(&[
        "run",
        p,
        "--rules",
        "nat.rules",
        "--strategy",
        "weighted",
        "--priority",
        "add_succ=5",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let o = run(&["run", p, "--rules", "nat.rules", "--priority", "nope=1"]);
    assert_eq!(o.code, EXIT_INVALID);
    assert!(o.stderr.contains("nope"));
}

#[test]
fn missing_rules_is_an_error() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "add.binet", corpus::ADD_2_2);
    let o = Command::new(env!("CARGO_BIN_EXE_binet"))
        .args(["run", s(&input)])
        .env_remove("BINET_RULES")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(EXIT_INVALID));
}

#[test]
fn rules_come_from_environment() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "add.binet", corpus::ADD_2_2);
    let rules = write(&dir, "nat.rules", corpus::NAT_RULES);
    let o = Command::new(env!("CARGO_BIN_EXE_binet"))
        .args(["run", s(&input)])
        .env("BINET_RULES", &rules)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let four = "S^r(a), S^a(b), S^b(c), S^c(d), Z^d()";
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(iso(
        &parse_binet(&stdout).unwrap(),
        &parse_binet(four).unwrap()
    ));
}

#[test]
fn rho_compiles_to_binet() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "fig.rho", corpus::FIGURE1_RHO);
    let o = run(&["rho", s(&input)]);
    assert_eq!(o.code, EXIT_OK);
    let expected = compile_rho(&parse_rho(corpus::FIGURE1_RHO).unwrap()).unwrap();
    assert!(iso(&parse_binet(&o.stdout).unwrap(), &expected));

    let target = dir.path().join("fig.binet");
    assert_eq!(run(&["rho", s(&input), "-o", s(&target)]).code, EXIT_OK);
    let written = std::fs::read_to_string(&target).unwrap();
    assert_eq!(written, o.stdout);

    let bad = write(&dir, "bad.rho", "x -> y");
    let o = run(&["rho", s(&bad)]);
    assert_eq!(o.code, EXIT_INVALID);
    assert!(o.stderr.contains('y'), "{}", o.stderr);
}

#[test]
fn snapshots_and_dot_are_written() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "fig.rho", corpus::FIGURE1_RHO);
    let snaps = dir.path().join("snaps");
    let dot = dir.path().join("final.dot");
    let o = run(&["run", s(&input), "--snapshots", s(&snaps), "--dot", s(&dot)]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let mut files: Vec<_> = std::fs::read_dir(&snaps)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    assert_eq!(files.len(), 5);
    let first = parse_binet(&std::fs::read_to_string(&files[0]).unwrap()).unwrap();
    assert!(iso(&first, &parse_binet(corpus::FIRST).unwrap()));
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph binet {"));
    assert_eq!(text.matches("[label=\"H\"]").count(), 1);
}

#[test]
fn help_goes_to_stdout() {
    let o = run(&["--help"]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.contains("bench"));
    let o = run(&["frobnicate"]);
    assert_eq!(o.code, EXIT_INVALID);
    assert!(!o.stderr.is_empty());
}
