use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const FIG1A: &str = "<r><a><b><c><c/></c></b><d><d><e/></d><e><f/></e></d></a>\
                     <a><b><b><c/></b></b><d><e/></d></a></r>";
const INTRO: &str = "//r/$a[./b//$c]//$d[./e and .//f]";

fn tpq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tpq"))
        .args(args)
        .env_remove("RUST_BACKTRACE")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = tpq(args);
    assert!(
        out.status.success(),
        "tpq {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Writes `xml` and indexes it; returns the index path and `tpq index` output.
fn index(dir: &TempDir, name: &str, xml: &str) -> (PathBuf, String) {
    let x = dir.path().join(format!("{name}.xml"));
    let i = dir.path().join(format!("{name}.idx"));
    fs::write(&x, xml).unwrap();
    let out = ok(&["index", p(&x), "-o", p(&i)]);
    (i, out)
}

#[test]
fn index_prints_document_stats() {
    let dir = TempDir::new().unwrap();
    let (_, out) = index(&dir, "fig", FIG1A);
    assert!(out.contains("nodes: 16\n"), "{out}");
    assert!(out.contains("depth: 5\n"), "{out}");
    assert!(out.contains("recursive tags: b c d\n"), "{out}");

    let xml = dir.path().join("demo.xml");
    ok(&["gendoc", "--shape", "demo", "--n", "10", "-o", p(&xml)]);
    let out = ok(&["index", p(&xml), "-o", p(&dir.path().join("demo.idx"))]);
    assert!(out.contains("nodes: 32\n"), "{out}");
}

#[test]
fn index_rejects_empty_and_malformed_files() {
    let dir = TempDir::new().unwrap();
    for (name, body) in [("empty", ""), ("bad", "<a><b></a>")] {
        let x = dir.path().join(format!("{name}.xml"));
        fs::write(&x, body).unwrap();
        let out = tpq(&["index", p(&x), "-o", p(&dir.path().join("x.idx"))]);
        assert!(!out.status.success(), "{name}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}

#[test]
fn query_rows_match_across_engines() {
    let dir = TempDir::new().unwrap();
    let (idx, _) = index(&dir, "fig", FIG1A);
    let expected = "[4:7,4]\t[9:18,3]\n[5:6,5]\t[9:18,3]\n";
    for engine in ["bj", "hj", "cj", "cbj", "oracle"] {
        let out = ok(&[
            "query",
            p(&idx),
            "-q",
            INTRO,
            "--engine",
            engine,
            "--return",
            "c,d",
        ]);
        assert_eq!(out, expected, "{engine}");
    }
    let by_id = ok(&["query", p(&idx), "-q", INTRO, "--return", "3,4"]);
    assert_eq!(by_id, expected);
    let full = ok(&["query", p(&idx), "-q", INTRO]);
    assert_eq!(
        full,
        "[2:19,2]\t[4:7,4]\t[9:18,3]\n[2:19,2]\t[5:6,5]\t[9:18,3]\n"
    );
}

#[test]
fn query_stats_row() {
    let dir = TempDir::new().unwrap();
    let (idx, _) = index(&dir, "fig", FIG1A);
    let out = ok(&["query", p(&idx), "-q", INTRO, "--stats"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[2].starts_with("query_id,engine,wall_ns,advances"));
    let fields: Vec<&str> = lines[3].split(',').collect();
    assert_eq!(fields.len(), 11);
    assert_eq!(fields[1], "bj");
    assert_eq!(fields[8], "2");
    assert_eq!(fields[9], "0.500000");
}

#[test]
fn explain_prints_the_plan() {
    let dir = TempDir::new().unwrap();
    let (idx, _) = index(&dir, "fig", FIG1A);
    let out = ok(&[
        "query",
        p(&idx),
        "-q",
        "//$a//b//c/$d",
        "--engine",
        "bj",
        "--explain",
    ]);
    assert_eq!(
        out,
        "Distinct cols=<a,d> sort=<a,d>\n\
         \x20 StackTreeAncSrt[1,01,1,2,AD,1] cols=<a,d> sort=<a,d>\n\
         \x20   IndexScan(a) cols=<a> sort=<a>\n\
         \x20   StackTreeDesc[10,1,2,1,PC] cols=<b,d> sort=<d>\n\
         \x20     StackTreeDesc[1,1,1,1,AD] cols=<b,c> sort=<c>\n\
         \x20       IndexScan(b) cols=<b> sort=<b>\n\
         \x20       IndexScan(c) cols=<c> sort=<c>\n\
         \x20     IndexScan(d) cols=<d> sort=<d>\n"
    );
}

#[test]
fn query_errors() {
    let dir = TempDir::new().unwrap();
    let (idx, _) = index(&dir, "fig", FIG1A);
    for args in [
        vec!["query", p(&idx), "-q", "//a//b"],
        vec!["query", p(&idx), "-q", "//$a[", "--engine", "hj"],
        vec!["query", p(&idx), "-q", "//$a", "--engine", "nope"],
        vec!["query", p(&idx), "-q", "//a[.//$b]//$c", "--engine", "bj"],
        vec!["query", p(&idx), "-q", "//$a//b", "--return", "b"],
        vec![
            "query",
            p(&idx),
            "-q",
            "//$a",
            "--engine",
            "oracle",
            "--explain",
        ],
        vec!["query", "/nonexistent.idx", "-q", "//$a"],
    ] {
        assert!(!tpq(&args).status.success(), "{args:?}");
    }
}

#[test]
fn gendoc_shapes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s.xml");
    ok(&["gendoc", "--shape", "suboptimal", "--n", "3", "-o", p(&out)]);
    assert_eq!(
        fs::read_to_string(&out).unwrap(),
        "<a><a><b/><b/><b/></a><b/></a>"
    );
    assert!(
        !tpq(&["gendoc", "--shape", "cube", "--n", "3", "-o", p(&out)])
            .status
            .success()
    );
    assert!(
        !tpq(&["gendoc", "--shape", "demo", "--n", "0", "-o", p(&out)])
            .status
            .success()
    );
}

#[test]
fn analyze_reports_decomposition_and_verdict() {
    let dir = TempDir::new().unwrap();
    let (idx, _) = index(&dir, "fig", FIG1A);
    let out = ok(&["analyze", p(&idx), "-q", INTRO]);
    assert!(out.contains("core: a#1 b#2 c#3 d#4\n"), "{out}");
    assert!(out.contains("  a#1: {r#0, a#1} //r/$a\n"), "{out}");
    assert!(
        out.contains("  d#4: {d#4, e#5, f#6} //$d[./e]//f\n"),
        "{out}"
    );
    assert!(out.contains("verdict: not-guaranteed\n"), "{out}");

    let (flat, _) = index(&dir, "flat", "<r><a><b><c><d/></c></b></a></r>");
    let out = ok(&["analyze", p(&flat), "-q", "//$a//$b//$c/$d"]);
    assert!(out.contains("verdict: optimal\n"), "{out}");
}

#[test]
fn bench_writes_one_row_per_case_and_engine() {
    let dir = TempDir::new().unwrap();
    let queries = dir.path().join("suite.txt");
    fs::write(
        &queries,
        "# demo suite\ndemo1: //$a//$b//$c\ndemo2: //$a//$b[.//$c]//$d\n",
    )
    .unwrap();
    let mut total = 0;
    for n in ["10", "100", "1000"] {
        let xml = dir.path().join(format!("d{n}.xml"));
        let idx = dir.path().join(format!("d{n}.idx"));
        let csv = dir.path().join(format!("d{n}.csv"));
        ok(&["gendoc", "--shape", "demo", "--n", n, "-o", p(&xml)]);
        ok(&["index", p(&xml), "-o", p(&idx)]);
        ok(&[
            "bench",
            p(&idx),
            "--queries",
            p(&queries),
            "--out",
            p(&csv),
            "--reps",
            "3",
        ]);
        let text = fs::read_to_string(&csv).unwrap();
        let mut lines = text.lines();
        assert!(lines
            .next()
            .unwrap()
            .starts_with("query_id,pattern,engine,wall_ns"));
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 2 * 3);
        assert!(rows[0].starts_with("demo1,//$a//$b//$c,bj,"));
        total += rows.len();
    }
    assert_eq!(total, 2 * 3 * 3);
}

#[test]
fn randomized_bench_is_seeded() {
    let dir = TempDir::new().unwrap();
    let (idx, _) = index(&dir, "fig", FIG1A);
    let queries = dir.path().join("q.txt");
    fs::write(&queries, "seven: //a[./b//c and .//d]//e[./f]/g\n").unwrap();
    let run = |seed: &str, name: &str| {
        let csv = dir.path().join(name);
        ok(&[
            "bench",
            p(&idx),
            "--queries",
            p(&queries),
            "--out",
            p(&csv),
            "--randomize-outputs",
            "7",
            "--seed",
            seed,
            "--omit-timing",
            "--engines",
            "bj,cbj,oracle",
        ]);
        fs::read_to_string(csv).unwrap()
    };
    let first = run("5", "a.csv");
    assert_eq!(first, run("5", "b.csv"));

    let ids: Vec<&str> = first
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    let mut distinct = ids.clone();
    distinct.dedup();
    assert_eq!(
        distinct,
        (1..=7).map(|k| format!("seven.o{k}")).collect::<Vec<_>>()
    );
    assert_eq!(ids.len(), 7 * 3);
}
