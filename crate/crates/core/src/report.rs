//! CSV and summary emission.
//!
//! The CSV lists one row per accepted match, sorted by (project, path,
//! start line), with RFC-style quoting: fields containing the delimiter,
//! a quote or a line break are quoted and embedded quotes doubled.
//! Output is byte-deterministic for identical inputs.

use std::io::Write;

use crate::error::Error;
use crate::formula::FormulaRecord;
use crate::metrics::{DensityReport, Fraction, LoopFractions, ScanTotals};

pub const CSV_HEADER: &str =
    "project,file_path,pattern_kind,start_line,end_line,snippet,formula_text,formula_mathml";

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') || s.contains('\r') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes header plus one row per record and returns the data-row count.
pub fn emit_csv<W: Write>(records: &[FormulaRecord], mut sink: W) -> Result<u64, Error> {
    let mut order: Vec<&FormulaRecord> = records.iter().collect();
    order.sort_by(|a, b| {
        (&a.m.project, &a.m.relative_path, a.m.start_line, a.m.kind).cmp(&(
            &b.m.project,
            &b.m.relative_path,
            b.m.start_line,
            b.m.kind,
        ))
    });
    let mut write = |line: &str| -> Result<(), Error> {
        sink.write_all(line.as_bytes()).map_err(Error::Write)?;
        sink.write_all(b"\n").map_err(Error::Write)
    };
    write(CSV_HEADER)?;
    for r in &order {
        let row = format!(
            "{},{},{},{},{},{},{},{}",
            csv_field(&r.m.project),
            csv_field(&r.m.relative_path),
            r.m.kind,
            r.m.start_line,
            r.m.end_line,
            csv_field(&r.m.snippet),
            csv_field(&r.text),
            csv_field(&r.mathml),
        );
        write(&row)?;
    }
    Ok(order.len() as u64)
}

fn pct_or_na(f: &Option<Fraction>, rounded: bool) -> String {
    match f {
        Some(v) if rounded => format!("{}%", v.display_pct_round()),
        Some(v) => format!("{}%", v.display_pct_trunc()),
        None => "n/a".to_string(),
    }
}

/// Human-readable summary: the per-sample count rows, machine-readable
/// density lines, per-pattern tallies and the loop fractions.
pub fn emit_summary<W: Write>(
    totals: &ScanTotals,
    report: &DensityReport,
    fractions: &LoopFractions,
    mut sink: W,
) -> Result<(), Error> {
    let mut w = |line: String| -> Result<(), Error> {
        sink.write_all(line.as_bytes()).map_err(Error::Write)?;
        sink.write_all(b"\n").map_err(Error::Write)
    };
    w("# scan summary".into())?;
    w("# LOC counts non-blank lines after line-preserving comment removal;".into())?;
    w("# cloc-style counters may differ on blank-line handling. LOFC counts".into())?;
    w("# every line of an accepted match span, shared lines once per file.".into())?;
    w(format!("{:<14} {}", "#projects", totals.projects))?;
    w(format!("{:<14} {}", "#nonempty", totals.nonempty_projects))?;
    w(format!("{:<14} {}", "#fc projects", totals.fc_projects))?;
    w(format!("{:<14} {}", "#files", totals.files))?;
    w(format!("{:<14} {}", "#fc files", totals.fc_files))?;
    w(format!("{:<14} {}", "LOC", totals.loc))?;
    w(format!("{:<14} {}", "LOFC", totals.lofc))?;
    w(format!("{:<14} {}", "#matches", totals.matches))?;
    w(format!("rho_files={}", pct_or_na(&report.rho_files, true)))?;
    w(format!("rho_LOC={}", pct_or_na(&report.rho_loc, true)))?;
    w(format!(
        "rho_files_est={}",
        pct_or_na(&report.rho_files_est, true)
    ))?;
    w(format!(
        "rho_LOC_est={}",
        pct_or_na(&report.rho_loc_est, true)
    ))?;
    w(format!("recall_used={}", report.recall_used.value()))?;
    for (kind, tally) in &totals.per_pattern {
        if !kind.is_sp() {
            continue;
        }
        let rho = crate::metrics::density(tally.matches, totals.loc).ok();
        w(format!(
            "pattern {}: matches={} lofc={} rho_matches={}",
            kind,
            tally.matches,
            tally.lofc,
            pct_or_na(&rho, false)
        ))?;
    }
    w(format!("loops_simple={}", totals.loops_simple))?;
    w(format!("loops_nested={}", totals.loops_nested))?;
    w(format!("sp_simple={}", totals.sp_simple_matches()))?;
    w(format!("sp_nested={}", totals.sp_nested_matches()))?;
    w(format!(
        "frac_simple={}",
        pct_or_na(&fractions.simple, false)
    ))?;
    w(format!(
        "frac_simple_est={}",
        pct_or_na(&fractions.simple_est, false)
    ))?;
    w(format!(
        "frac_nested={}",
        pct_or_na(&fractions.nested, false)
    ))?;
    w(format!(
        "frac_nested_est={}",
        pct_or_na(&fractions.nested_est, false)
    ))?;
    Ok(())
}
