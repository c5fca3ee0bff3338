//! Report/raw-output consistency: the totals in the summary must be
//! recomputable from the emitted CSV alone, and every accepted match
//! appears in exactly one row.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use formula_miner_core::patterns::PatternKind;
use formula_miner_core::report::{CSV_HEADER, emit_csv};
use formula_miner_core::scan::{ScanConfig, scan};

/// Minimal RFC-style CSV reader, enough for our own output.
fn parse_csv(text: &str) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    let mut field = String::new();
    let mut row = Vec::new();
    let mut chars = text.chars().peekable();
    let mut quoted = false;
    while let Some(c) = chars.next() {
        if quoted {
            if c == '"' {
                if chars.peek() == Some(&'"') {
                    chars.next();
                    field.push('"');
                } else {
                    quoted = false;
                }
            } else {
                field.push(c);
            }
        } else {
            match c {
                '"' => quoted = true,
                ',' => row.push(std::mem::take(&mut field)),
                '\n' => {
                    row.push(std::mem::take(&mut field));
                    rows.push(std::mem::take(&mut row));
                }
                _ => field.push(c),
            }
        }
    }
    if !field.is_empty() || !row.is_empty() {
        row.push(field);
        rows.push(row);
    }
    rows
}

fn fixture_roots() -> Vec<PathBuf> {
    let base = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/corpus");
    vec![base.join("accept"), base.join("reject"), base.join("edge")]
}

#[test]
fn totals_are_recomputable_from_the_csv() {
    let output = scan(&ScanConfig::new(fixture_roots())).unwrap();
    let mut buf = Vec::new();
    let rows_written = emit_csv(&output.records, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();

    let rows = parse_csv(&text);
    assert_eq!(rows[0].join(","), CSV_HEADER);
    let data = &rows[1..];

    // one row per accepted match
    assert_eq!(rows_written, output.totals.matches);
    assert_eq!(data.len() as u64, output.totals.matches);

    // fc files, lofc and the per-pattern tallies all re-derive from rows
    let mut files: BTreeSet<(String, String)> = BTreeSet::new();
    let mut file_lines: BTreeMap<(String, String), BTreeSet<u32>> = BTreeMap::new();
    let mut per_kind: BTreeMap<PatternKind, u64> = BTreeMap::new();
    for row in data {
        let key = (row[0].clone(), row[1].clone());
        let kind: PatternKind = row[2].parse().unwrap();
        let start: u32 = row[3].parse().unwrap();
        let end: u32 = row[4].parse().unwrap();
        assert!(start <= end);
        files.insert(key.clone());
        file_lines.entry(key).or_default().extend(start..=end);
        *per_kind.entry(kind).or_default() += 1;
    }
    assert_eq!(files.len() as u64, output.totals.fc_files);
    let lofc: u64 = file_lines.values().map(|l| l.len() as u64).sum();
    assert_eq!(lofc, output.totals.lofc);
    for (kind, tally) in &output.totals.per_pattern {
        assert_eq!(
            per_kind.get(kind).copied().unwrap_or(0),
            tally.matches,
            "{kind}"
        );
    }

    // fc projects re-derive as well
    let projects: BTreeSet<&String> = files.iter().map(|(p, _)| p).collect();
    assert_eq!(projects.len() as u64, output.totals.fc_projects);
}
