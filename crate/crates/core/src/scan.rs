//! The scan pipeline: discover, strip, match, constrain, resolve
//! precedence, reconstruct and aggregate — in parallel over files with a
//! deterministic merge, so output is independent of the worker count.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::constraints::{self, Verdict};
use crate::corpus::{self, SourceUnit};
use crate::error::Error;
use crate::formula::FormulaRecord;
use crate::metrics::{self, DensityReport, FileSummary, Fraction, LoopFractions, ScanTotals};
use crate::patterns::{self, PatternKind};

#[derive(Debug, Clone)]
pub struct ScanConfig {
    /// Corpus roots; each root is one project.
    pub roots: Vec<PathBuf>,
    pub enabled: BTreeSet<PatternKind>,
    pub recall: Fraction,
    pub workers: usize,
    pub dedup: bool,
    pub verbosity: u8,
}

impl ScanConfig {
    pub fn new(roots: Vec<PathBuf>) -> ScanConfig {
        ScanConfig {
            roots,
            enabled: PatternKind::default_set(),
            recall: Fraction::new(3091, 10_000),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            dedup: false,
            verbosity: 0,
        }
    }

    pub fn with_vectors(mut self) -> ScanConfig {
        self.enabled.insert(PatternKind::VecAdd);
        self.enabled.insert(PatternKind::VecDot);
        self
    }
}

/// A constraint-rejected match with its failing verdicts.
#[derive(Debug, Clone)]
pub struct Rejection {
    pub id: String,
    pub kind: PatternKind,
    pub failed: Vec<Verdict>,
}

#[derive(Debug)]
pub struct ScanOutput {
    /// Accepted matches with formulas, ordered by (project, path, line).
    pub records: Vec<FormulaRecord>,
    pub totals: ScanTotals,
    pub density: DensityReport,
    pub fractions: LoopFractions,
    pub rejections: Vec<Rejection>,
    pub warnings: Vec<String>,
}

struct UnitResult {
    summary: FileSummary,
    records: Vec<FormulaRecord>,
    rejections: Vec<Rejection>,
    warnings: Vec<String>,
}

fn process_unit(unit: &SourceUnit, enabled: &BTreeSet<PatternKind>) -> UnitResult {
    let mut warnings = Vec::new();
    if unit.had_invalid_utf8 {
        warnings.push(format!(
            "{}/{}: invalid UTF-8, decoded with replacements",
            unit.project, unit.relative_path
        ));
    }
    if unit.unterminated_comment {
        warnings.push(format!(
            "{}/{}: unterminated block comment runs to end of file",
            unit.project, unit.relative_path
        ));
    }
    let matches = patterns::match_all(unit, enabled);
    let mut loops_simple = 0;
    let mut loops_nested = 0;
    let mut accepted = Vec::new();
    let mut rejections = Vec::new();
    for m in matches {
        match m.kind {
            PatternKind::LoopSimple => loops_simple += 1,
            PatternKind::LoopNested => loops_nested += 1,
            _ => {
                let report = constraints::check(&m);
                if report.accepted() {
                    accepted.push(m);
                } else {
                    rejections.push(Rejection {
                        id: m.id(),
                        kind: m.kind,
                        failed: report.failing().cloned().collect(),
                    });
                }
            }
        }
    }
    let resolved = patterns::resolve_precedence(accepted);
    let summary = FileSummary {
        project: unit.project.clone(),
        relative_path: unit.relative_path.clone(),
        loc: unit.loc as u64,
        match_spans: resolved
            .iter()
            .map(|m| (m.kind, m.start_line, m.end_line))
            .collect(),
        loops_simple,
        loops_nested,
    };
    let records = resolved.into_iter().map(FormulaRecord::new).collect();
    UnitResult {
        summary,
        records,
        rejections,
        warnings,
    }
}

/// Scans every root (one project per root) and produces the merged,
/// deterministic output.
pub fn scan(config: &ScanConfig) -> Result<ScanOutput, Error> {
    let mut warnings = Vec::new();
    let mut projects = Vec::new();
    let mut units: Vec<SourceUnit> = Vec::new();
    for root in &config.roots {
        let project = root
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| root.display().to_string());
        let (files, discover_warnings) = corpus::discover(root)?;
        warnings.extend(discover_warnings);
        for path in files {
            let rel = path
                .strip_prefix(root)
                .unwrap_or(&path)
                .to_string_lossy()
                .replace('\\', "/");
            match fs::read(&path) {
                Ok(bytes) => units.push(SourceUnit::from_bytes(&project, &rel, &bytes)),
                Err(e) => warnings.push(format!("skipping {}: {}", path.display(), e)),
            }
        }
        projects.push(project);
    }
    if config.dedup {
        units = corpus::dedup(units);
    }

    let workers = config.workers.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    let results: Vec<UnitResult> = pool.install(|| {
        units
            .par_iter()
            .map(|unit| process_unit(unit, &config.enabled))
            .collect()
    });

    let mut records = Vec::new();
    let mut rejections = Vec::new();
    let mut summaries = Vec::new();
    for mut r in results {
        records.append(&mut r.records);
        rejections.append(&mut r.rejections);
        warnings.append(&mut r.warnings);
        summaries.push(r.summary);
    }
    records.sort_by(|a, b| {
        (&a.m.project, &a.m.relative_path, a.m.start_line, a.m.kind).cmp(&(
            &b.m.project,
            &b.m.relative_path,
            b.m.start_line,
            b.m.kind,
        ))
    });

    let totals = metrics::aggregate(&projects, &summaries);
    let density = DensityReport::compute(&totals, &config.recall)?;
    let fractions = metrics::loop_fractions(&totals, &config.recall)?;
    Ok(ScanOutput {
        records,
        totals,
        density,
        fractions,
        rejections,
        warnings,
    })
}

/// Scans in-memory units with the same pipeline; used by benchmarks and
/// tests that do not touch the filesystem.
pub fn scan_units(
    projects: &[String],
    units: &[SourceUnit],
    enabled: &BTreeSet<PatternKind>,
    recall: &Fraction,
    workers: usize,
) -> Result<ScanOutput, Error> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    let results: Vec<UnitResult> = pool.install(|| {
        units
            .par_iter()
            .map(|unit| process_unit(unit, enabled))
            .collect()
    });
    let mut records = Vec::new();
    let mut rejections = Vec::new();
    let mut summaries = Vec::new();
    let mut warnings = Vec::new();
    for mut r in results {
        records.append(&mut r.records);
        rejections.append(&mut r.rejections);
        warnings.append(&mut r.warnings);
        summaries.push(r.summary);
    }
    records.sort_by(|a, b| {
        (&a.m.project, &a.m.relative_path, a.m.start_line, a.m.kind).cmp(&(
            &b.m.project,
            &b.m.relative_path,
            b.m.start_line,
            b.m.kind,
        ))
    });
    let totals = metrics::aggregate(projects, &summaries);
    let density = DensityReport::compute(&totals, recall)?;
    let fractions = metrics::loop_fractions(&totals, recall)?;
    Ok(ScanOutput {
        records,
        totals,
        density,
        fractions,
        rejections,
        warnings,
    })
}
