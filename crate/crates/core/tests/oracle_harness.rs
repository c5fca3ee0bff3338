//! End-to-end evaluation harness over the bundled mini-oracle: the
//! annotated fixtures clean back to the corpus sources byte for byte,
//! the detector finds the hand-counted subset, and the judgment sidecar
//! drives the precision levels.

use std::fs;
use std::path::{Path, PathBuf};

use formula_miner_core::Error;
use formula_miner_core::evaluation::{Judgment, parse_judgments, parse_oracle, precision, recall};
use formula_miner_core::scan::{ScanConfig, scan};

fn oracle_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/oracle")
}

fn load_annotations() -> Vec<formula_miner_core::OracleAnnotation> {
    let manifest = fs::read_to_string(oracle_dir().join("annotated/manifest.txt")).unwrap();
    let mut out = Vec::new();
    for line in manifest.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let annotated = fs::read_to_string(oracle_dir().join("annotated").join(line)).unwrap();
        let parsed = parse_oracle(line, &annotated).unwrap();
        // the cleaned text is exactly the corpus source
        let original = fs::read_to_string(oracle_dir().join("corpus").join(line)).unwrap();
        assert_eq!(
            parsed.clean_text, original,
            "cleaned {line} differs from corpus copy"
        );
        // and re-inserting the tags reproduces the annotated file
        assert_eq!(parsed.reinsert(), annotated, "reinsertion for {line}");
        out.extend(parsed.annotations);
    }
    out
}

fn detections() -> Vec<formula_miner_core::PatternMatch> {
    let config = ScanConfig::new(vec![oracle_dir().join("corpus")]);
    let output = scan(&config).unwrap();
    output.records.iter().map(|r| r.m.clone()).collect()
}

#[test]
fn mini_oracle_recall_is_hand_counted() {
    let annotations = load_annotations();
    let sp: Vec<_> = annotations.iter().filter(|a| a.sp).collect();
    assert_eq!(sp.len(), 6, "six sp-flagged fragments in the mini oracle");
    let dets = detections();
    assert_eq!(dets.len(), 3, "three detections: {dets:?}");

    let part = recall(&dets, &annotations);
    assert_eq!(part.hits, 3);
    assert_eq!(part.oracle_fragments, 6);
    let f = part.recall.unwrap();
    assert_eq!(f.display_pct_round(), "50.00");
    // the nested detection overlaps both the outer and the inner
    // fragment but is credited to the outermost only
    assert!(
        annotations
            .iter()
            .filter(|a| a.file == "Nested.java" && a.sp)
            .count()
            == 2
    );
}

#[test]
fn mini_oracle_precision_from_sidecar() {
    let dets = detections();
    let text = fs::read_to_string(oracle_dir().join("judgments.csv")).unwrap();
    let judgments = parse_judgments(&text).unwrap();
    let p = precision(&judgments, &dets).unwrap();
    assert_eq!((p.wrong, p.correct, p.complete), (0, 1, 2));
    assert_eq!(p.precision_any.unwrap().display_pct_round(), "100.00");
    assert_eq!(p.precision_correct.unwrap().display_pct_round(), "100.00");
    assert_eq!(p.precision_complete.unwrap().display_pct_round(), "66.67");
}

#[test]
fn incomplete_judgments_list_missing_ids() {
    let dets = detections();
    let text = fs::read_to_string(oracle_dir().join("judgments_incomplete.csv")).unwrap();
    let judgments = parse_judgments(&text).unwrap();
    match precision(&judgments, &dets) {
        Err(Error::Unjudged(ids)) => {
            assert_eq!(ids.len(), 2);
            assert!(ids.iter().any(|i| i.contains("Nested.java")));
            assert!(ids.iter().any(|i| i.contains("Guarded.java")));
        }
        other => panic!("expected unjudged error, got {other:?}"),
    }
}

#[test]
fn judgments_all_complete_yield_full_precision() {
    let dets = detections();
    let judgments: Vec<(String, Judgment)> =
        dets.iter().map(|d| (d.id(), Judgment::Complete)).collect();
    let p = precision(&judgments, &dets).unwrap();
    assert_eq!(p.precision_any.unwrap().pct(), 100.0);
    assert_eq!(p.precision_correct.unwrap().pct(), 100.0);
    assert_eq!(p.precision_complete.unwrap().pct(), 100.0);
}
