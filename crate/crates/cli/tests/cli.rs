//! End-to-end tests of the `formula-miner` binary: exit codes, output
//! files, determinism across worker counts, the evaluation harness and
//! repository fetching from a local remote.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_formula-miner"))
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn golden(name: &str) -> String {
    fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../core/tests/golden")
            .join(name),
    )
    .unwrap()
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

#[test]
fn scan_writes_golden_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let report = dir.path().join("report.txt");
    let base = fixtures().join("corpus");
    let out = run(bin()
        .arg("scan")
        .args([base.join("accept"), base.join("reject"), base.join("edge")])
        .arg("--csv")
        .arg(&csv)
        .arg("--report")
        .arg(&report));
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        fs::read_to_string(&csv).unwrap(),
        golden("corpus_default.csv")
    );
    let summary = fs::read_to_string(&report).unwrap();
    assert!(summary.contains("#matches"));
    assert!(summary.contains("rho_files="));
}

#[test]
fn scan_is_deterministic_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let base = fixtures().join("corpus");
    let mut outputs = Vec::new();
    for workers in ["1", "8"] {
        let csv = dir.path().join(format!("w{workers}.csv"));
        let report = dir.path().join(format!("w{workers}.txt"));
        let out = run(bin()
            .arg("scan")
            .args([base.join("accept"), base.join("reject"), base.join("edge")])
            .arg("--workers")
            .arg(workers)
            .arg("--csv")
            .arg(&csv)
            .arg("--report")
            .arg(&report));
        assert!(out.status.success());
        outputs.push((fs::read(&csv).unwrap(), fs::read(&report).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&mut bin()).status.code(), Some(2));
    assert_eq!(run(bin().arg("scan")).status.code(), Some(2));
    assert_eq!(
        run(bin().arg("scan").arg("x").arg("--recall").arg("1.5"))
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(bin().arg("scan").arg("x").arg("--patterns").arg("NOPE"))
            .status
            .code(),
        Some(1),
        "unknown pattern kind is a runtime failure"
    );
}

#[test]
fn unreadable_root_exits_1() {
    let out = run(bin().arg("scan").arg("/nonexistent/definitely/missing"));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
}

#[test]
fn patterns_catalog_lists_every_kind() {
    let out = run(bin().arg("patterns"));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "FIS",
        "FES",
        "FIA",
        "FEC",
        "NFISS",
        "NFESS",
        "NFIAS",
        "NFECS",
        "NFIAA",
        "NFECC",
        "VEC_ADD",
        "VEC_DOT",
        "LOOP_SIMPLE",
        "LOOP_NESTED",
    ] {
        assert!(text.contains(name), "catalog misses {name}");
    }
    assert!(text.contains("C1..C5"));
    assert!(text.contains("exp3"));
}

#[test]
fn vectors_only_match_behind_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let base = fixtures().join("corpus");
    let plain = dir.path().join("plain.csv");
    run(bin()
        .arg("scan")
        .arg(base.join("accept"))
        .arg("--csv")
        .arg(&plain));
    assert!(!fs::read_to_string(&plain).unwrap().contains("VEC_DOT"));

    let with = dir.path().join("vec.csv");
    run(bin()
        .arg("scan")
        .arg(base.join("accept"))
        .arg("--vectors")
        .arg("--csv")
        .arg(&with));
    let text = fs::read_to_string(&with).unwrap();
    assert!(text.contains("VEC_DOT"));
    assert!(text.contains("VEC_ADD"));
}

#[test]
fn dedup_drops_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let base = fixtures().join("corpus");
    let plain = dir.path().join("plain.csv");
    run(bin()
        .arg("scan")
        .arg(base.join("edge"))
        .arg("--csv")
        .arg(&plain));
    let plain_rows = fs::read_to_string(&plain).unwrap();
    assert!(plain_rows.contains("DupA.java") && plain_rows.contains("DupB.java"));

    let deduped = dir.path().join("dedup.csv");
    run(bin()
        .arg("scan")
        .arg(base.join("edge"))
        .arg("--dedup")
        .arg("--csv")
        .arg(&deduped));
    let dedup_rows = fs::read_to_string(&deduped).unwrap();
    assert!(dedup_rows.contains("DupA.java") && !dedup_rows.contains("DupB.java"));
}

#[test]
fn pattern_subset_restricts_sp_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let base = fixtures().join("corpus");
    let csv = dir.path().join("fis.csv");
    let out = run(bin()
        .arg("scan")
        .arg(base.join("accept"))
        .arg("--patterns")
        .arg("FIS,FES")
        .arg("--csv")
        .arg(&csv));
    assert!(out.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.contains(",FIS,"));
    assert!(!text.contains(",NFISS,"));
    assert!(!text.contains(",FIA,"));
}

#[test]
fn verbose_scan_reports_rejections() {
    let base = fixtures().join("corpus");
    let out = run(bin().arg("scan").arg(base.join("edge")).arg("-v"));
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Listing2Like.java"), "{err}");
    assert!(err.contains("C5 (pixel)"), "{err}");
}

#[test]
fn workers_env_variable_is_honored() {
    let base = fixtures().join("corpus");
    let out = run(bin()
        .arg("scan")
        .arg(base.join("accept"))
        .env("FORMULA_MINER_WORKERS", "3"));
    assert!(out.status.success());
}

#[test]
fn eval_prints_recall_and_precision() {
    let oracle = fixtures().join("oracle");
    let out = run(bin()
        .arg("eval")
        .arg(oracle.join("corpus"))
        .arg(oracle.join("annotated/manifest.txt")));
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("recall = 3/6 = 50.00%"), "{text}");
    assert!(
        !text.contains("precision_any"),
        "no judgments, no precision"
    );

    let with = run(bin()
        .arg("eval")
        .arg(oracle.join("corpus"))
        .arg(oracle.join("annotated/manifest.txt"))
        .arg("--judgments")
        .arg(oracle.join("judgments.csv")));
    assert!(with.status.success());
    let text = String::from_utf8(with.stdout).unwrap();
    assert!(text.contains("precision_any = 3/3 = 100.00%"), "{text}");
    assert!(text.contains("precision_correct = 3/3 = 100.00%"), "{text}");
    assert!(text.contains("precision_complete = 2/3 = 66.67%"), "{text}");
}

#[test]
fn eval_with_incomplete_judgments_exits_1() {
    let oracle = fixtures().join("oracle");
    let out = run(bin()
        .arg("eval")
        .arg(oracle.join("corpus"))
        .arg(oracle.join("annotated/manifest.txt"))
        .arg("--judgments")
        .arg(oracle.join("judgments_incomplete.csv")));
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unjudged"), "{err}");
    assert!(err.contains("Nested.java"), "{err}");
}

fn git_available() -> bool {
    Command::new("git")
        .arg("--version")
        .output()
        .is_ok_and(|o| o.status.success())
}

#[test]
fn fetch_clones_from_local_remotes() {
    if !git_available() {
        eprintln!("git not available, skipping");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let remote = dir.path().join("upstream");
    fs::create_dir(&remote).unwrap();
    fs::write(remote.join("Sample.java"), "class Sample {}\n").unwrap();
    let git = |args: &[&str], cwd: &Path| {
        let out = Command::new("git")
            .args(["-c", "user.name=t", "-c", "user.email=t@example.com"])
            .args(args)
            .current_dir(cwd)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "git {args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    };
    git(&["init", "-q"], &remote);
    git(&["add", "."], &remote);
    git(&["commit", "-qm", "seed"], &remote);

    let manifest = dir.path().join("repos.txt");
    fs::write(
        &manifest,
        format!(
            "# one good, one dead\n{}\n{}\n",
            remote.display(),
            dir.path().join("missing").display()
        ),
    )
    .unwrap();
    let dest = dir.path().join("clones");
    let out = run(bin().arg("fetch").arg(&manifest).arg(&dest));
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dest.join("upstream/Sample.java").exists());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("warning:"),
        "dead entry produces a diagnostic: {err}"
    );

    // nothing clonable at all fails
    let bad_manifest = dir.path().join("bad.txt");
    fs::write(
        &bad_manifest,
        format!("{}\n", dir.path().join("gone").display()),
    )
    .unwrap();
    let out = run(bin().arg("fetch").arg(&bad_manifest).arg(&dest));
    assert_eq!(out.status.code(), Some(1));
}
