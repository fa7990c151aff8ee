use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn zebra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zebra"))
        .args(args)
        .env_remove("ZEBRA_CORPUS_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_four_bar_plain() {
    let out = zebra(&["analyze", path(&corpus("four_bar.mech"))]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "name=four_bar\nclass=planar\nB=4\nG=0\nW=4\nNw=3\nNs=3\nJf=2\nL=1\nbranch=planar_black_white\nM=1\n"
    );
    assert!(stderr(&out).is_empty());
}

#[test]
fn analyze_key_order_is_fixed() {
    let out = zebra(&["analyze", path(&corpus("stewart.mech"))]);
    let keys: Vec<String> = stdout(&out)
        .lines()
        .map(|l| l.split('=').next().unwrap().to_string())
        .collect();
    assert_eq!(
        keys,
        ["name", "class", "B", "G", "W", "Nw", "Ns", "Jf", "L", "branch", "M"]
    );
    assert!(stdout(&out).contains("\nM=6\n"));
}

#[test]
fn analyze_counts_file() {
    let out = zebra(&["analyze", path(&corpus("staircase.mech"))]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("class=planar_bw\n"));
    assert!(text.contains("Ns=\n"));
    assert!(text.ends_with("L=5\nbranch=planar_black_white\nM=1\n"));
}

#[test]
fn analyze_json_is_stable() {
    let a = zebra(&["analyze", path(&corpus("delta.mech")), "--format", "json"]);
    let b = zebra(&["analyze", path(&corpus("delta.mech")), "--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["mobility"], 3);
    assert_eq!(v["counts"]["white_between"], 11);
    assert_eq!(v["branch"], "spatial");
    assert!(stdout(&a).starts_with("{\n  \"name\": \"delta\",\n  \"class\": \"spatial\""));
}

#[test]
fn malformed_file_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.mech");
    std::fs::write(
        &file,
        "mechanism bad\nclass planar\nlink l1 ground\njoint j1 dof=7 kind=r connects=l1,l2\n",
    )
    .unwrap();
    let out = zebra(&["analyze", path(&file)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).is_empty());
    assert!(stderr(&out).contains("bad.mech:4:"), "{}", stderr(&out));
}

#[test]
fn invalid_topology_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("loose.mech");
    std::fs::write(&file, "mechanism loose\nclass planar\nlink a ground\nlink b\nlink c\njoint j1 dof=1 kind=r connects=a,b\n").unwrap();
    let out = zebra(&["analyze", path(&file)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("not connected"), "{}", stderr(&out));
}

#[test]
fn missing_file_exits_one() {
    let out = zebra(&["analyze", "/nonexistent/x.mech"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("/nonexistent/x.mech"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec![],
        vec!["frobnicate"],
        vec!["analyze"],
        vec!["analyze", "x.mech", "--format", "xml"],
        vec!["analyze", "x.mech", "--bogus"],
        vec!["render", "x.mech", "--format", "png"],
        vec!["enumerate", "--max-links", "9"],
        vec!["enumerate", "--max-links", "1"],
        vec!["enumerate", "--max-loops", "4"],
        vec!["corpus-check", "extra"],
    ] {
        let out = zebra(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!stderr(&out).is_empty());
    }
}

#[test]
fn help_exits_zero() {
    let out = zebra(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("corpus-check"));
}

#[test]
fn render_four_bar_matches_fixtures() {
    let text = zebra(&["render", path(&corpus("four_bar.mech")), "--out", "-"]);
    assert_eq!(text.status.code(), Some(0));
    assert_eq!(
        text.stdout,
        std::fs::read(fixture("four_bar.zebra.txt")).unwrap()
    );
    let svg = zebra(&[
        "render",
        path(&corpus("four_bar.mech")),
        "--format",
        "svg",
        "--out",
        "-",
    ]);
    assert_eq!(
        svg.stdout,
        std::fs::read(fixture("four_bar.zebra.svg")).unwrap()
    );
}

#[test]
fn render_writes_conventional_file_names() {
    let dir = tempfile::tempdir().unwrap();
    for (format, name) in [
        ("text", "four_bar.zebra.txt"),
        ("svg", "four_bar.zebra.svg"),
    ] {
        let out = Command::new(env!("CARGO_BIN_EXE_zebra"))
            .args(["render", path(&corpus("four_bar.mech")), "--format", format])
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(
            std::fs::read(dir.path().join(name)).unwrap(),
            std::fs::read(fixture(name)).unwrap()
        );
    }
    let target = dir.path().join("custom.svg");
    let out = zebra(&[
        "render",
        path(&corpus("delta.mech")),
        "--format",
        "svg",
        "--out",
        path(&target),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(&target).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    assert_eq!(
        doc.descendants().filter(|n| n.has_tag_name("rect")).count(),
        15 + 10
    );
}

#[test]
fn render_counts_file_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("stair.txt");
    let out = zebra(&[
        "render",
        path(&corpus("staircase.mech")),
        "--out",
        path(&target),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("CountsModeNotRenderable"));
    assert!(!target.exists());
}

#[test]
fn render_to_unwritable_path_exits_one() {
    let out = zebra(&[
        "render",
        path(&corpus("four_bar.mech")),
        "--out",
        "/nonexistent/dir/x.txt",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn compare_cartesian_disagrees() {
    let out = zebra(&["compare", path(&corpus("cartesian.mech"))]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("zebra_M=3\n"));
    assert!(text.contains("kutzbach_spatial=0\n"));
    assert!(text.contains("reference=spatial\n"));
    assert!(text.ends_with("agree=false\n"));
}

#[test]
fn compare_four_bar_agrees() {
    let out = zebra(&[
        "compare",
        path(&corpus("four_bar.mech")),
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["agree"], true);
    assert_eq!(v["reference"], "planar");
    let out = zebra(&["compare", path(&corpus("star.mech"))]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn corpus_check_passes() {
    let out = zebra(&["corpus-check"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).ends_with("15/15 entries pass\n"));
}

#[test]
fn corpus_check_honors_directory_override() {
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(corpus("")).unwrap() {
        let entry = entry.unwrap();
        std::fs::copy(entry.path(), dir.path().join(entry.file_name())).unwrap();
    }
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_zebra"))
            .arg("corpus-check")
            .env("ZEBRA_CORPUS_DIR", dir.path())
            .output()
            .unwrap()
    };
    assert_eq!(run().status.code(), Some(0));

    let manifest = dir.path().join("manifest.csv");
    let text = std::fs::read_to_string(&manifest).unwrap();
    std::fs::write(
        &manifest,
        text.replace(
            "four_bar,topology,4,0,4,3,2,1,1",
            "four_bar,topology,4,0,4,3,3,1,1",
        ),
    )
    .unwrap();
    let out = run();
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stdout(&out).contains("FAIL four_bar: (Jf, 3, 2)"),
        "{}",
        stdout(&out)
    );
    assert!(stdout(&out).contains("14/15 entries pass"));

    std::fs::write(&manifest, text).unwrap();
    let delta = dir.path().join("delta.mech");
    let source = std::fs::read_to_string(&delta).unwrap();
    std::fs::write(&delta, source.replace("equal=true", "equal=false")).unwrap();
    let out = run();
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stdout(&out).contains("FAIL delta: (Nw, 11, 8)"),
        "{}",
        stdout(&out)
    );

    std::fs::remove_file(&delta).unwrap();
    assert_eq!(run().status.code(), Some(1));
}

#[test]
fn enumerate_streams_csv() {
    let out = zebra(&["enumerate", "--max-links", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("id,n,j,zebra_m,kutzbach_m,agree"));
    assert!(text.contains("\n3:01.02.12,3,3,0,0,true\n"));
    assert!(text.contains("\n4:01.02.13.23,4,4,1,1,true\n"));
    let rows = text.lines().count() - 1;
    assert!(stderr(&out).starts_with(&format!("total={rows} ")));
    assert_eq!(out.stdout, zebra(&["enumerate", "--max-links", "4"]).stdout);
}

#[test]
fn enumerate_bad_range_exits_one() {
    let out = zebra(&["enumerate", "--min-links", "5", "--max-links", "4"]);
    assert_eq!(out.status.code(), Some(1));
}
