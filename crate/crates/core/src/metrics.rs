//! Density metrics, recall-corrected estimates and scan aggregation.
//!
//! All arithmetic is exact rational. Reported densities are quantized to
//! their display precision (two significant decimals, truncated) before
//! they feed the recall correction; that mirrors how the published
//! per-sample tables chain their numbers, and keeps estimates
//! reproducible from a printed report.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Error;
use crate::patterns::PatternKind;

/// Exact non-negative rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fraction {
    pub num: u128,
    pub den: u128,
}

impl Fraction {
    pub fn new(num: u128, den: u128) -> Fraction {
        assert!(den > 0, "fraction denominator must be positive");
        Fraction { num, den }
    }

    /// Parses a decimal like `0.3091` exactly.
    pub fn parse_decimal(s: &str) -> Option<Fraction> {
        let s = s.trim();
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        let int: u128 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().ok()?
        };
        if frac_part.len() > 18 || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let scale = 10u128.pow(frac_part.len() as u32);
        let frac: u128 = if frac_part.is_empty() {
            0
        } else {
            frac_part.parse().ok()?
        };
        Some(Fraction::new(int * scale + frac, scale))
    }

    pub fn pct(&self) -> f64 {
        100.0 * self.num as f64 / self.den as f64
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn div(&self, other: &Fraction) -> Fraction {
        assert!(other.num > 0, "division by zero fraction");
        Fraction::new(self.num * other.den, self.den * other.num)
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Decimal places needed for two significant decimals of the
    /// percentage: 2 normally, extended while the value is below 0.1%.
    fn pct_decimals(&self) -> u32 {
        if self.num == 0 {
            return 2;
        }
        let mut d = 2u32;
        // below 10^-(d-1) percent: one more decimal, up to a cap
        while d < 9 && 100 * self.num * 10u128.pow(d - 1) < self.den {
            d += 1;
        }
        d
    }

    fn pct_digits_trunc(&self, d: u32) -> u128 {
        100 * self.num * 10u128.pow(d) / self.den
    }

    fn pct_digits_round(&self, d: u32) -> u128 {
        (200 * self.num * 10u128.pow(d) + self.den) / (2 * self.den)
    }

    /// The exact rational value of the truncated percentage display,
    /// e.g. 13094/30275938 quantizes to 0.043% exactly.
    pub fn quantize_pct_trunc(&self) -> Fraction {
        let d = self.pct_decimals();
        Fraction::new(self.pct_digits_trunc(d), 100 * 10u128.pow(d))
    }

    /// Percentage truncated to two significant decimals, without `%`.
    pub fn display_pct_trunc(&self) -> String {
        let d = self.pct_decimals();
        format_digits(self.pct_digits_trunc(d), d)
    }

    /// Percentage rounded half-up to two significant decimals.
    pub fn display_pct_round(&self) -> String {
        let d = self.pct_decimals();
        format_digits(self.pct_digits_round(d), d)
    }
}

fn format_digits(digits: u128, d: u32) -> String {
    let scale = 10u128.pow(d);
    format!(
        "{}.{:0width$}",
        digits / scale,
        digits % scale,
        width = d as usize
    )
}

/// ρ = num/den as an exact fraction. A zero denominator is an error.
pub fn density(num: u64, den: u64) -> Result<Fraction, Error> {
    if den == 0 {
        return Err(Error::UndefinedDensity);
    }
    Ok(Fraction::new(num as u128, den as u128))
}

/// Recall-corrected estimate ρ̃ = ρ / recall. Recall must be in (0, 1].
pub fn estimate(rho: &Fraction, recall: &Fraction) -> Result<Fraction, Error> {
    if recall.num == 0 || recall.num > recall.den {
        return Err(Error::RecallOutOfRange(recall.value()));
    }
    Ok(rho.div(recall))
}

/// Per-pattern tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PatternTally {
    pub matches: u64,
    pub lofc: u64,
}

/// Corpus-level totals of one scan.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScanTotals {
    pub projects: u64,
    pub nonempty_projects: u64,
    pub fc_projects: u64,
    pub files: u64,
    pub fc_files: u64,
    pub loc: u64,
    pub lofc: u64,
    pub matches: u64,
    pub per_pattern: BTreeMap<PatternKind, PatternTally>,
    pub loops_simple: u64,
    pub loops_nested: u64,
}

impl ScanTotals {
    /// Accepted matches of the non-nested SP kinds.
    pub fn sp_simple_matches(&self) -> u64 {
        self.per_pattern
            .iter()
            .filter(|(k, _)| k.is_sp() && !k.is_nested())
            .map(|(_, t)| t.matches)
            .sum()
    }

    /// Accepted matches of the nested SP kinds.
    pub fn sp_nested_matches(&self) -> u64 {
        self.per_pattern
            .iter()
            .filter(|(k, _)| k.is_sp() && k.is_nested())
            .map(|(_, t)| t.matches)
            .sum()
    }
}

/// Densities with their recall-corrected estimates. The stored densities
/// are the exact scan fractions; estimates divide the display-quantized
/// density by the recall.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub rho_files: Option<Fraction>,
    pub rho_loc: Option<Fraction>,
    pub rho_files_est: Option<Fraction>,
    pub rho_loc_est: Option<Fraction>,
    pub recall_used: Fraction,
}

impl DensityReport {
    pub fn compute(totals: &ScanTotals, recall: &Fraction) -> Result<DensityReport, Error> {
        if recall.num == 0 || recall.num > recall.den {
            return Err(Error::RecallOutOfRange(recall.value()));
        }
        let rho_files = density(totals.fc_files, totals.files).ok();
        let rho_loc = density(totals.lofc, totals.loc).ok();
        let est = |rho: &Option<Fraction>| -> Option<Fraction> {
            rho.as_ref().map(|r| r.quantize_pct_trunc().div(recall))
        };
        Ok(DensityReport {
            rho_files_est: est(&rho_files),
            rho_loc_est: est(&rho_loc),
            rho_files,
            rho_loc,
            recall_used: *recall,
        })
    }
}

/// Loop-usage fractions: which share of simple and nested loops carries
/// an accepted SP match, plus the recall-corrected pair.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopFractions {
    pub simple: Option<Fraction>,
    pub nested: Option<Fraction>,
    pub simple_est: Option<Fraction>,
    pub nested_est: Option<Fraction>,
}

/// Fractions of loops implementing SP formulas. Zero loop counts leave
/// the respective fraction undefined.
pub fn loop_fractions(totals: &ScanTotals, recall: &Fraction) -> Result<LoopFractions, Error> {
    if recall.num == 0 || recall.num > recall.den {
        return Err(Error::RecallOutOfRange(recall.value()));
    }
    let simple = density(totals.sp_simple_matches(), totals.loops_simple).ok();
    let nested = density(totals.sp_nested_matches(), totals.loops_nested).ok();
    Ok(LoopFractions {
        simple_est: simple.as_ref().map(|f| f.div(recall)),
        nested_est: nested.as_ref().map(|f| f.div(recall)),
        simple,
        nested,
    })
}

/// One scanned file's contribution to the totals.
#[derive(Debug, Clone, Default)]
pub struct FileSummary {
    pub project: String,
    pub relative_path: String,
    pub loc: u64,
    /// Accepted SP matches as (kind, start line, end line).
    pub match_spans: Vec<(PatternKind, u32, u32)>,
    pub loops_simple: u64,
    pub loops_nested: u64,
}

/// Folds per-file results into totals. A match contributes every line of
/// its span to LOFC; lines shared by overlapping matches count once per
/// file.
pub fn aggregate(projects: &[String], files: &[FileSummary]) -> ScanTotals {
    let mut totals = ScanTotals {
        projects: projects.len() as u64,
        ..Default::default()
    };
    let mut nonempty: BTreeSet<&str> = BTreeSet::new();
    let mut fc_projects: BTreeSet<&str> = BTreeSet::new();
    for file in files {
        totals.files += 1;
        totals.loc += file.loc;
        totals.loops_simple += file.loops_simple;
        totals.loops_nested += file.loops_nested;
        if file.loc > 0 {
            nonempty.insert(&file.project);
        }
        if file.match_spans.is_empty() {
            continue;
        }
        totals.fc_files += 1;
        fc_projects.insert(&file.project);
        let mut file_lines: BTreeSet<u32> = BTreeSet::new();
        let mut kind_lines: BTreeMap<PatternKind, BTreeSet<u32>> = BTreeMap::new();
        for &(kind, start, end) in &file.match_spans {
            totals.matches += 1;
            let tally = totals.per_pattern.entry(kind).or_default();
            tally.matches += 1;
            for line in start..=end {
                file_lines.insert(line);
                kind_lines.entry(kind).or_default().insert(line);
            }
        }
        totals.lofc += file_lines.len() as u64;
        for (kind, lines) in kind_lines {
            totals.per_pattern.entry(kind).or_default().lofc += lines.len() as u64;
        }
    }
    totals.nonempty_projects = nonempty.len() as u64;
    totals.fc_projects = fc_projects.len() as u64;
    totals
}
