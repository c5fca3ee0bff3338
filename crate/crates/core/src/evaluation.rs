//! Recall/precision harness over XML-annotated oracle corpora.
//!
//! Ground-truth fragments are marked inline with nestable tags
//! (`<SimpleNestedLoop sp="true"> … </SimpleNestedLoop>`); parsing
//! removes the tags, leaving the original source, and records fragment
//! spans against the cleaned line numbering. Precision judgments are
//! human input supplied through a sidecar file; only the arithmetic
//! happens here.

use std::collections::BTreeSet;
use std::str::FromStr;
use std::sync::LazyLock;

use regex::Regex;

use crate::error::Error;
use crate::metrics::{Fraction, density};
use crate::patterns::PatternMatch;
use crate::textscan::{LineIndex, is_ident_char};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OracleTag {
    SimpleNestedLoop,
    DoubleNestedLoop,
    SimpleArithmetic,
    Matrix,
    Vector,
}

impl OracleTag {
    pub fn name(self) -> &'static str {
        match self {
            OracleTag::SimpleNestedLoop => "SimpleNestedLoop",
            OracleTag::DoubleNestedLoop => "DoubleNestedLoop",
            OracleTag::SimpleArithmetic => "SimpleArithmetic",
            OracleTag::Matrix => "Matrix",
            OracleTag::Vector => "Vector",
        }
    }

    /// Only loop-tagged fragments may carry the sum/product flag.
    pub fn is_loop(self) -> bool {
        matches!(
            self,
            OracleTag::SimpleNestedLoop | OracleTag::DoubleNestedLoop
        )
    }

    fn parse(name: &str) -> Option<OracleTag> {
        match name {
            "SimpleNestedLoop" => Some(OracleTag::SimpleNestedLoop),
            "DoubleNestedLoop" => Some(OracleTag::DoubleNestedLoop),
            "SimpleArithmetic" => Some(OracleTag::SimpleArithmetic),
            "Matrix" => Some(OracleTag::Matrix),
            "Vector" => Some(OracleTag::Vector),
            _ => None,
        }
    }
}

/// One ground-truth fragment, with lines referring to the cleaned file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleAnnotation {
    pub tag: OracleTag,
    pub file: String,
    pub start_line: u32,
    pub end_line: u32,
    pub sp: bool,
}

/// A removed tag, re-insertable at its byte offset in the cleaned text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagInsertion {
    pub offset: usize,
    pub text: String,
}

#[derive(Debug, Clone)]
pub struct ParsedOracle {
    pub clean_text: String,
    pub annotations: Vec<OracleAnnotation>,
    pub tags: Vec<TagInsertion>,
}

impl ParsedOracle {
    /// Reconstructs the annotated file byte for byte.
    pub fn reinsert(&self) -> String {
        let mut out = String::with_capacity(self.clean_text.len());
        let mut pos = 0;
        for tag in &self.tags {
            out.push_str(&self.clean_text[pos..tag.offset]);
            out.push_str(&tag.text);
            pos = tag.offset;
        }
        out.push_str(&self.clean_text[pos..]);
        out
    }
}

static TAG_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r#"^<(/?)([A-Za-z][A-Za-z0-9]*)(\s+sp="(true|false)")?\s*>"#).unwrap()
});
static OWN_LINE_TAG_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"^\s*</?[A-Za-z][A-Za-z0-9]*(\s+[^>\n]*)?>\s*$"#).unwrap());

fn line_at(text: &str, offset: usize) -> usize {
    text[..offset].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Removes the annotation tags from `annotated` and records every
/// fragment span against the cleaned text. Tags sitting alone on a line
/// disappear together with their line. A `<Name>` directly preceded by
/// an identifier character is generic syntax, not a tag.
pub fn parse_oracle(file: &str, annotated: &str) -> Result<ParsedOracle, Error> {
    let bytes = annotated.as_bytes();
    let mut clean = String::with_capacity(annotated.len());
    let mut tags: Vec<TagInsertion> = Vec::new();
    let mut stack: Vec<(OracleTag, bool, usize)> = Vec::new();
    let mut spans: Vec<(OracleTag, bool, usize, usize)> = Vec::new();
    let mut i = 0;
    let err = |line: usize, message: String| Error::OracleParse {
        file: file.to_string(),
        line,
        message,
    };
    while i < bytes.len() {
        if bytes[i] == b'<'
            && (i == 0 || !is_ident_char(bytes[i - 1]))
            && let Some(caps) = TAG_RE.captures(&annotated[i..])
        {
            let whole = caps.get(0).unwrap();
            let closing = !caps[1].is_empty();
            let name = caps.get(2).unwrap().as_str();
            let sp = caps.get(4).map(|m| m.as_str()) == Some("true");
            if let Some(tag) = OracleTag::parse(name) {
                if sp && !tag.is_loop() {
                    return Err(err(
                        line_at(annotated, i),
                        format!("sp=\"true\" is only valid on loop tags, found on <{name}>"),
                    ));
                }
                // own-line tags take their whole line with them
                let line_start = annotated[..i].rfind('\n').map_or(0, |p| p + 1);
                let mut tag_end = i + whole.end();
                let before_ws = annotated[line_start..i].trim().is_empty();
                let after = &annotated[tag_end..];
                let rest_of_line = after.split('\n').next().unwrap_or("");
                let own_line = before_ws && rest_of_line.trim().is_empty();
                let removed_start;
                if own_line {
                    removed_start = line_start;
                    tag_end += rest_of_line.len();
                    if tag_end < bytes.len() {
                        tag_end += 1; // the newline
                    }
                    clean.truncate(clean.len() - (i - line_start));
                } else {
                    removed_start = i;
                }
                let offset = clean.len();
                tags.push(TagInsertion {
                    offset,
                    text: annotated[removed_start..tag_end].to_string(),
                });
                if closing {
                    match stack.pop() {
                        Some((open_tag, open_sp, open_off)) if open_tag == tag => {
                            spans.push((open_tag, open_sp, open_off, offset));
                        }
                        Some((open_tag, ..)) => {
                            return Err(err(
                                line_at(annotated, i),
                                format!(
                                    "closing </{}> does not match open <{}>",
                                    name,
                                    open_tag.name()
                                ),
                            ));
                        }
                        None => {
                            return Err(err(
                                line_at(annotated, i),
                                format!("closing </{name}> without an open tag"),
                            ));
                        }
                    }
                } else {
                    stack.push((tag, sp, offset));
                }
                i = tag_end;
                continue;
            }
            // unknown tag names only count as annotation mistakes
            // when they clearly stand alone as an annotation line
            let line_end = annotated[i..].find('\n').map_or(annotated.len(), |p| i + p);
            let line_start = annotated[..i].rfind('\n').map_or(0, |p| p + 1);
            if OWN_LINE_TAG_RE.is_match(&annotated[line_start..line_end]) {
                return Err(err(
                    line_at(annotated, i),
                    format!("unknown oracle tag <{name}>"),
                ));
            }
        }
        // copy one UTF-8 character
        let ch_len = annotated[i..].chars().next().map_or(1, char::len_utf8);
        clean.push_str(&annotated[i..i + ch_len]);
        i += ch_len;
    }
    if let Some((tag, _, _)) = stack.pop() {
        return Err(err(
            line_at(annotated, annotated.len().saturating_sub(1)),
            format!("<{}> is never closed", tag.name()),
        ));
    }
    let lines = LineIndex::new(&clean);
    let mut annotations: Vec<OracleAnnotation> = spans
        .into_iter()
        .map(|(tag, sp, start, end)| OracleAnnotation {
            tag,
            file: file.to_string(),
            start_line: lines.line_of(start),
            end_line: lines.line_of(end.saturating_sub(1).max(start)),
            sp,
        })
        .collect();
    annotations.sort_by_key(|a| (a.start_line, a.end_line));
    Ok(ParsedOracle {
        clean_text: clean,
        annotations,
        tags,
    })
}

// ---------------------------------------------------------------------------
// recall

#[derive(Debug, Clone, PartialEq)]
pub struct RecallPart {
    /// Number of sp-flagged oracle fragments, |F|.
    pub oracle_fragments: u64,
    /// Detections supplied, |D|.
    pub detections: u64,
    /// Distinct fragments credited with a hit, |D∩F|.
    pub hits: u64,
    pub recall: Option<Fraction>,
}

fn overlaps(a: (u32, u32), b: (u32, u32)) -> bool {
    a.0 <= b.1 && b.0 <= a.1
}

/// Line-overlap recall: a detection hits an sp-flagged fragment of the
/// same file when their line spans share a line. A detection overlapping
/// nested fragments is credited to the outermost only; each fragment
/// counts at most once.
pub fn recall(detected: &[PatternMatch], oracle: &[OracleAnnotation]) -> RecallPart {
    let sp: Vec<&OracleAnnotation> = oracle.iter().filter(|a| a.sp).collect();
    let mut hit: BTreeSet<usize> = BTreeSet::new();
    for det in detected {
        let span = (det.start_line, det.end_line);
        let cands: Vec<usize> = sp
            .iter()
            .enumerate()
            .filter(|(_, a)| {
                a.file == det.relative_path && overlaps(span, (a.start_line, a.end_line))
            })
            .map(|(i, _)| i)
            .collect();
        for &i in &cands {
            let contained_in_other = cands.iter().any(|&j| {
                j != i
                    && sp[j].start_line <= sp[i].start_line
                    && sp[i].end_line <= sp[j].end_line
                    && (sp[j].start_line, sp[j].end_line) != (sp[i].start_line, sp[i].end_line)
            });
            if !contained_in_other {
                hit.insert(i);
            }
        }
    }
    let oracle_fragments = sp.len() as u64;
    let hits = hit.len() as u64;
    RecallPart {
        oracle_fragments,
        detections: detected.len() as u64,
        hits,
        recall: density(hits, oracle_fragments).ok(),
    }
}

// ---------------------------------------------------------------------------
// precision

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Judgment {
    /// The match contains formula code but the inferred formula is wrong.
    Wrong,
    /// The formula is correct but covers only part of the fragment.
    Correct,
    /// The formula is correct and complete.
    Complete,
}

impl FromStr for Judgment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "wrong" => Ok(Judgment::Wrong),
            "correct" => Ok(Judgment::Correct),
            "complete" => Ok(Judgment::Complete),
            other => Err(format!("unknown judgment: {other}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionPart {
    pub detections: u64,
    pub wrong: u64,
    pub correct: u64,
    pub complete: u64,
    pub precision_any: Option<Fraction>,
    pub precision_correct: Option<Fraction>,
    pub precision_complete: Option<Fraction>,
}

/// Precision levels from judged counts: any formula code at all, correct
/// formula, correct and complete formula.
pub fn precision_from_counts(wrong: u64, correct: u64, complete: u64) -> PrecisionPart {
    let detections = wrong + correct + complete;
    PrecisionPart {
        detections,
        wrong,
        correct,
        complete,
        precision_any: density(wrong + correct + complete, detections).ok(),
        precision_correct: density(correct + complete, detections).ok(),
        precision_complete: density(complete, detections).ok(),
    }
}

/// Applies a judgment list to a detection set. Every detection must be
/// judged; missing ids are an error listing them.
pub fn precision(
    judgments: &[(String, Judgment)],
    detected: &[PatternMatch],
) -> Result<PrecisionPart, Error> {
    let judged: std::collections::BTreeMap<&str, Judgment> =
        judgments.iter().map(|(id, j)| (id.as_str(), *j)).collect();
    let mut missing = Vec::new();
    let mut wrong = 0;
    let mut correct = 0;
    let mut complete = 0;
    for det in detected {
        match judged.get(det.id().as_str()) {
            Some(Judgment::Wrong) => wrong += 1,
            Some(Judgment::Correct) => correct += 1,
            Some(Judgment::Complete) => complete += 1,
            None => missing.push(det.id()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::Unjudged(missing));
    }
    Ok(precision_from_counts(wrong, correct, complete))
}

/// Parses the judgment sidecar: CSV lines of `match-id,judgment`, with
/// `#` comments allowed.
pub fn parse_judgments(text: &str) -> Result<Vec<(String, Judgment)>, Error> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, judgment) = line.rsplit_once(',').ok_or_else(|| {
            Error::Judgment(format!("line {}: expected `match-id,judgment`", lineno + 1))
        })?;
        let judgment = judgment
            .parse::<Judgment>()
            .map_err(|e| Error::Judgment(format!("line {}: {}", lineno + 1, e)))?;
        out.push((id.trim().to_string(), judgment));
    }
    Ok(out)
}

/// Combined metrics as printed by the evaluation command.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalMetrics {
    pub recall: RecallPart,
    pub precision: Option<PrecisionPart>,
}
