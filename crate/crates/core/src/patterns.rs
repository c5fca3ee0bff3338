//! The pattern catalog and matcher.
//!
//! Ten sum/product loop shapes (simple and nested `for`/`foreach`), two
//! experimental vector shapes and two general loop counters. Matching
//! combines a balanced-delimiter pre-scanner (loop extents, statement
//! boundaries, expression slots) with regular expressions for the token
//! shapes, since bare regular expressions cannot balance braces.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use regex::Regex;

use crate::corpus::SourceUnit;
use crate::textscan::{
    self, Item, LineIndex, Lvalue, eq_ignore_ws, find_balanced, is_ident_char, is_ident_start,
    items, mask_literals, parse_lvalue, skip_ws, top_level_positions,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternKind {
    /// `for`-loop accumulating into a scalar.
    Fis,
    /// `foreach`-loop accumulating into a scalar.
    Fes,
    /// `for`-loop accumulating into an element indexed by the loop variable.
    Fia,
    /// `foreach`-loop accumulating into its own entry.
    Fec,
    /// Nested `for`-loops accumulating into a scalar.
    Nfiss,
    /// Nested `foreach`-loops accumulating into a scalar.
    Nfess,
    /// Nested `for`-loops filling an outer-indexed element with an inner sum.
    Nfias,
    /// Nested `foreach`-loops accumulating into the outer entry.
    Nfecs,
    /// Nested `for`-loops updating an element indexed at the inner level.
    Nfiaa,
    /// Nested `foreach`-loops updating the inner entry.
    Nfecc,
    /// Componentwise two-statement vector addition.
    VecAdd,
    /// One-statement 2D scalar product.
    VecDot,
    /// Any `for`/`foreach` loop containing no other loop.
    LoopSimple,
    /// Any `for`/`foreach` loop containing at least one loop.
    LoopNested,
}

impl PatternKind {
    pub const ALL: [PatternKind; 14] = [
        PatternKind::Fis,
        PatternKind::Fes,
        PatternKind::Fia,
        PatternKind::Fec,
        PatternKind::Nfiss,
        PatternKind::Nfess,
        PatternKind::Nfias,
        PatternKind::Nfecs,
        PatternKind::Nfiaa,
        PatternKind::Nfecc,
        PatternKind::VecAdd,
        PatternKind::VecDot,
        PatternKind::LoopSimple,
        PatternKind::LoopNested,
    ];

    /// The ten catalog kinds plus the loop counters; vector kinds stay
    /// off unless asked for.
    pub fn default_set() -> BTreeSet<PatternKind> {
        PatternKind::ALL
            .iter()
            .copied()
            .filter(|k| !k.is_experimental())
            .collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            PatternKind::Fis => "FIS",
            PatternKind::Fes => "FES",
            PatternKind::Fia => "FIA",
            PatternKind::Fec => "FEC",
            PatternKind::Nfiss => "NFISS",
            PatternKind::Nfess => "NFESS",
            PatternKind::Nfias => "NFIAS",
            PatternKind::Nfecs => "NFECS",
            PatternKind::Nfiaa => "NFIAA",
            PatternKind::Nfecc => "NFECC",
            PatternKind::VecAdd => "VEC_ADD",
            PatternKind::VecDot => "VEC_DOT",
            PatternKind::LoopSimple => "LOOP_SIMPLE",
            PatternKind::LoopNested => "LOOP_NESTED",
        }
    }

    pub fn is_nested(self) -> bool {
        matches!(
            self,
            PatternKind::Nfiss
                | PatternKind::Nfess
                | PatternKind::Nfias
                | PatternKind::Nfecs
                | PatternKind::Nfiaa
                | PatternKind::Nfecc
                | PatternKind::LoopNested
        )
    }

    /// Sum/product (SP) kinds: everything except the loop counters.
    pub fn is_sp(self) -> bool {
        !matches!(self, PatternKind::LoopSimple | PatternKind::LoopNested)
    }

    pub fn is_experimental(self) -> bool {
        matches!(self, PatternKind::VecAdd | PatternKind::VecDot)
    }

    pub fn is_loop_counter(self) -> bool {
        !self.is_sp()
    }
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PatternKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let up = s.trim().to_ascii_uppercase();
        PatternKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == up)
            .ok_or_else(|| format!("unknown pattern kind: {s}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelOp {
    Lt,
    Le,
    Gt,
    Ge,
    Ne,
}

impl RelOp {
    pub fn as_str(self) -> &'static str {
        match self {
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
            RelOp::Ne => "!=",
        }
    }

    /// Only ascending bounds feed the plain sum templates; everything
    /// else is reported with a non-canonical-bound flag.
    pub fn is_canonical(self) -> bool {
        matches!(self, RelOp::Lt | RelOp::Le)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AccuOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl AccuOp {
    pub fn as_char(self) -> char {
        match self {
            AccuOp::Add => '+',
            AccuOp::Sub => '-',
            AccuOp::Mul => '*',
            AccuOp::Div => '/',
        }
    }

    fn from_byte(b: u8) -> Option<AccuOp> {
        match b {
            b'+' => Some(AccuOp::Add),
            b'-' => Some(AccuOp::Sub),
            b'*' => Some(AccuOp::Mul),
            b'/' => Some(AccuOp::Div),
            _ => None,
        }
    }
}

/// One counted-`for` level: `for (index = init; index rel limit; index++)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForLevel {
    pub index: String,
    pub init: String,
    pub rel: RelOp,
    pub limit: String,
}

/// One `foreach` level: `for (binder : collection)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EachLevel {
    pub binder: String,
    pub collection: String,
}

/// Slots of the vector shapes. `operands[k][d]` is the d-th component
/// expression of the (k+1)-th operand vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorSlots {
    pub targets: Vec<String>,
    pub operands: [[String; 2]; 2],
}

/// Everything captured from a match: loop levels outer-first, the
/// accumulation target and operator, the accumulated term and the opaque
/// block slots in pattern order. Slots a pattern does not have stay
/// empty.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CapturedRoles {
    pub for_levels: Vec<ForLevel>,
    pub each_levels: Vec<EachLevel>,
    pub accu: Option<Lvalue>,
    pub op: Option<AccuOp>,
    /// The accumulated term, exp3 in the catalog.
    pub term: Option<String>,
    pub blocks: Vec<String>,
    pub vector: Option<VectorSlots>,
}

impl CapturedRoles {
    pub fn index_vars(&self) -> Vec<&str> {
        self.for_levels
            .iter()
            .map(|l| l.index.as_str())
            .chain(self.each_levels.iter().map(|l| l.binder.as_str()))
            .collect()
    }

    pub fn entry(&self) -> Option<&str> {
        self.each_levels.first().map(|l| l.binder.as_str())
    }

    pub fn elem(&self) -> Option<&str> {
        self.each_levels.get(1).map(|l| l.binder.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternMatch {
    pub kind: PatternKind,
    pub project: String,
    pub relative_path: String,
    pub start_line: u32,
    pub end_line: u32,
    pub snippet: String,
    pub roles: CapturedRoles,
}

impl PatternMatch {
    /// Stable identifier used by the judgment sidecar.
    pub fn id(&self) -> String {
        format!(
            "{}/{}:{}-{}:{}",
            self.project, self.relative_path, self.start_line, self.end_line, self.kind
        )
    }
}

// ---------------------------------------------------------------------------
// loop discovery

#[derive(Debug, Clone)]
enum LoopHeader {
    /// Lenient counted-for header; `strict` is only populated when the
    /// header has the canonical `index = e1; index rel e2; index++` shape
    /// with a unit increment.
    Counted {
        strict: Option<ForLevel>,
    },
    Each(EachLevel),
}

#[derive(Debug, Clone)]
struct LoopNode {
    start: usize,
    body_start: usize,
    body_end: usize,
    end: usize,
    header: LoopHeader,
}

static FOR_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\bfor\s*\(").unwrap());
static TRAILING_IDENT_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"([A-Za-z_$][A-Za-z0-9_$]*)\s*$").unwrap());
static TYPE_PREFIX_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^[A-Za-z_$][A-Za-z0-9_$<>\[\],.?\s&]*$").unwrap());

/// Words that start a statement rather than a declaration.
const STATEMENT_KEYWORDS: &[&str] = &[
    "assert", "case", "do", "else", "new", "return", "throw", "yield",
];

fn validate_exp(masked: &[u8], start: usize, end: usize, text: &str) -> Option<String> {
    let slice = text[start..end].trim();
    if slice.is_empty() {
        return None;
    }
    let mut depth = 0i64;
    for &b in &masked[start..end] {
        match b {
            b'(' | b'[' => depth += 1,
            b')' | b']' => {
                depth -= 1;
                if depth < 0 {
                    return None;
                }
            }
            b'{' | b'}' | b';' if depth == 0 => return None,
            _ => {}
        }
    }
    if depth != 0 {
        return None;
    }
    Some(slice.to_string())
}

fn parse_counted_header(masked: &[u8], text: &str, parts: [(usize, usize); 3]) -> Option<ForLevel> {
    let (s1, e1) = parts[0];
    let eq_positions: Vec<usize> = (s1..e1)
        .filter(|&i| {
            masked[i] == b'='
                && (i == 0
                    || !matches!(
                        masked[i - 1],
                        b'=' | b'!'
                            | b'<'
                            | b'>'
                            | b'+'
                            | b'-'
                            | b'*'
                            | b'/'
                            | b'%'
                            | b'&'
                            | b'|'
                            | b'^'
                    ))
                && masked.get(i + 1) != Some(&b'=')
        })
        .collect();
    let eq = *eq_positions.first()?;
    let decl = text[s1..eq].trim_end();
    let index = TRAILING_IDENT_RE
        .captures(decl)?
        .get(1)?
        .as_str()
        .to_string();
    if textscan::is_java_keyword(&index) {
        return None;
    }
    let prefix = decl[..decl.len() - index.len()].trim();
    if !prefix.is_empty() && !TYPE_PREFIX_RE.is_match(prefix) {
        return None;
    }
    let init = validate_exp(masked, eq + 1, e1, text)?;

    // condition: the same index on the left of a relational operator
    let (s2, e2) = parts[1];
    let mut i = skip_ws(masked, s2, e2);
    if i >= e2 || !is_ident_start(masked[i]) {
        return None;
    }
    let id_start = i;
    while i < e2 && is_ident_char(masked[i]) {
        i += 1;
    }
    if text[id_start..i] != index {
        return None;
    }
    i = skip_ws(masked, i, e2);
    let rel = match (masked.get(i), masked.get(i + 1)) {
        (Some(b'<'), Some(b'=')) => {
            i += 2;
            RelOp::Le
        }
        (Some(b'>'), Some(b'=')) => {
            i += 2;
            RelOp::Ge
        }
        (Some(b'!'), Some(b'=')) => {
            i += 2;
            RelOp::Ne
        }
        (Some(b'<'), _) => {
            i += 1;
            RelOp::Lt
        }
        (Some(b'>'), _) => {
            i += 1;
            RelOp::Gt
        }
        _ => return None,
    };
    let limit = validate_exp(masked, i, e2, text)?;

    // the four unit-increment spellings
    let (s3, e3) = parts[2];
    let inc: String = text[s3..e3].split_whitespace().collect();
    let ok = inc == format!("{index}={index}+1")
        || inc == format!("{index}+=1")
        || inc == format!("++{index}")
        || inc == format!("{index}++");
    if !ok {
        return None;
    }
    Some(ForLevel {
        index,
        init,
        rel,
        limit,
    })
}

fn parse_each_header(masked: &[u8], text: &str, start: usize, end: usize) -> Option<EachLevel> {
    // first `:` at depth zero that is not `::` and not behind a ternary `?`
    let mut depth = 0i64;
    let mut colon = None;
    for i in start..end {
        match masked[i] {
            b'(' | b'[' | b'{' => depth += 1,
            b')' | b']' | b'}' => depth -= 1,
            b'?' if depth == 0 => return None,
            b':' if depth == 0 => {
                if masked.get(i + 1) == Some(&b':') || (i > start && masked[i - 1] == b':') {
                    continue;
                }
                colon = Some(i);
                break;
            }
            _ => {}
        }
    }
    let colon = colon?;
    let decl = text[start..colon].trim_end();
    let binder = TRAILING_IDENT_RE
        .captures(decl)?
        .get(1)?
        .as_str()
        .to_string();
    if textscan::is_java_keyword(&binder) {
        return None;
    }
    let prefix = decl[..decl.len() - binder.len()].trim();
    if !prefix.is_empty() && !TYPE_PREFIX_RE.is_match(prefix) {
        return None;
    }
    let collection = validate_exp(masked, colon + 1, end, text)?;
    Some(EachLevel { binder, collection })
}

fn parse_loop(masked: &[u8], text: &str, start: usize) -> Option<LoopNode> {
    let open = skip_ws(masked, start + 3, masked.len());
    if masked.get(open) != Some(&b'(') {
        return None;
    }
    let close = find_balanced(masked, open)?;
    let h_start = open + 1;
    let h_end = close;
    let semis = top_level_positions(masked, h_start, h_end, b';');
    let header = match semis.len() {
        2 => {
            let parts = [
                (h_start, semis[0]),
                (semis[0] + 1, semis[1]),
                (semis[1] + 1, h_end),
            ];
            LoopHeader::Counted {
                strict: parse_counted_header(masked, text, parts),
            }
        }
        0 => LoopHeader::Each(parse_each_header(masked, text, h_start, h_end)?),
        _ => return None,
    };
    let after = skip_ws(masked, close + 1, masked.len());
    let (body_start, body_end, end) = if masked.get(after) == Some(&b'{') {
        let brace_close = find_balanced(masked, after)?;
        (after + 1, brace_close, brace_close + 1)
    } else {
        // braceless body: exactly one statement (which may itself carry
        // an attached block or be another loop ending in `;`)
        let item = *items(masked, after, masked.len()).first()?;
        (item.start, item.end, item.end)
    };
    Some(LoopNode {
        start,
        body_start,
        body_end,
        end,
        header,
    })
}

// ---------------------------------------------------------------------------
// accumulation statements

fn parse_accu(masked: &[u8], text: &str, item: Item) -> Option<(Lvalue, AccuOp, String)> {
    let end = item.end;
    if end == 0 || masked.get(end - 1) != Some(&b';') {
        return None;
    }
    let stmt_end = end - 1;
    let start = skip_ws(masked, item.start, stmt_end);
    let (lv, after) = parse_lvalue(masked, text, start, stmt_end)?;
    let mut i = skip_ws(masked, after, stmt_end);
    // compound spelling: accu op= exp3
    if let Some(op) = masked.get(i).copied().and_then(AccuOp::from_byte) {
        if masked.get(i + 1) == Some(&b'=') && masked.get(i + 2) != Some(&b'=') {
            let term = validate_exp(masked, i + 2, stmt_end, text)?;
            return Some((lv, op, term));
        }
        return None;
    }
    // spelled-out: accu = accu op exp3
    if masked.get(i) != Some(&b'=') || masked.get(i + 1) == Some(&b'=') {
        return None;
    }
    i = skip_ws(masked, i + 1, stmt_end);
    let (lv2, after2) = parse_lvalue(masked, text, i, stmt_end)?;
    if !eq_ignore_ws(&lv.text, &lv2.text) {
        return None;
    }
    i = skip_ws(masked, after2, stmt_end);
    let op = masked.get(i).copied().and_then(AccuOp::from_byte)?;
    if masked.get(i + 1) == Some(&masked[i]) || masked.get(i + 1) == Some(&b'=') {
        return None;
    }
    let term = validate_exp(masked, i + 1, stmt_end, text)?;
    Some((lv, op, term))
}

// ---------------------------------------------------------------------------
// per-unit scanning

struct UnitScan<'a> {
    unit: &'a SourceUnit,
    text: &'a str,
    masked: Vec<u8>,
    lines: LineIndex,
    loops: Vec<LoopNode>,
}

/// Target lvalue, addend spans and full statement span of a plain
/// assignment.
type PlainAssign = (Lvalue, Vec<(usize, usize)>, (usize, usize));

#[derive(Debug, Clone)]
struct Candidate {
    kind: PatternKind,
    span: (usize, usize),
    roles: CapturedRoles,
}

impl<'a> UnitScan<'a> {
    fn new(unit: &'a SourceUnit) -> UnitScan<'a> {
        let text = unit.stripped_text.as_str();
        let masked = mask_literals(text);
        let masked_str = std::str::from_utf8(&masked).expect("masking preserves UTF-8");
        let mut loops = Vec::new();
        for m in FOR_RE.find_iter(masked_str) {
            // `\b` does not exclude a preceding `$`, which is legal in
            // Java identifiers
            if m.start() > 0 && is_ident_char(masked[m.start() - 1]) {
                continue;
            }
            if let Some(node) = parse_loop(&masked, text, m.start()) {
                loops.push(node);
            }
        }
        UnitScan {
            unit,
            text,
            masked,
            lines: LineIndex::new(text),
            loops,
        }
    }

    fn contains_loop(&self, node: &LoopNode) -> bool {
        self.loops
            .iter()
            .any(|other| other.start > node.body_start && other.start < node.body_end)
    }

    fn loop_item_at(&self, pos: usize) -> Option<usize> {
        self.loops.iter().position(|l| l.start == pos)
    }

    /// The first top-level accumulation statement of a body span,
    /// together with the enclosing block slots.
    fn body_accu(
        &self,
        body_start: usize,
        body_end: usize,
    ) -> Option<(Lvalue, AccuOp, String, String, String)> {
        for item in items(&self.masked, body_start, body_end) {
            if let Some((lv, op, term)) = parse_accu(&self.masked, self.text, item) {
                let before = self.text[body_start..item.start].to_string();
                let after = self.text[item.end..body_end].to_string();
                return Some((lv, op, term, before, after));
            }
        }
        None
    }

    fn simple_candidates(&self) -> Vec<Candidate> {
        let mut out = Vec::new();
        for node in &self.loops {
            let (lv, op, term, b1, b2) = match self.body_accu(node.body_start, node.body_end) {
                Some(x) => x,
                None => continue,
            };
            let (kind, roles) = match &node.header {
                LoopHeader::Counted {
                    strict: Some(level),
                } => {
                    if lv.base() == level.index {
                        continue;
                    }
                    let kind = if lv.indices_mention(&level.index) {
                        PatternKind::Fia
                    } else {
                        PatternKind::Fis
                    };
                    (
                        kind,
                        CapturedRoles {
                            for_levels: vec![level.clone()],
                            accu: Some(lv),
                            op: Some(op),
                            term: Some(term),
                            blocks: vec![b1, b2],
                            ..Default::default()
                        },
                    )
                }
                LoopHeader::Counted { strict: None } => continue,
                LoopHeader::Each(level) => {
                    let kind = if lv.text == level.binder {
                        PatternKind::Fec
                    } else {
                        PatternKind::Fes
                    };
                    (
                        kind,
                        CapturedRoles {
                            each_levels: vec![level.clone()],
                            accu: Some(lv),
                            op: Some(op),
                            term: Some(term),
                            blocks: vec![b1, b2],
                            ..Default::default()
                        },
                    )
                }
            };
            out.push(Candidate {
                kind,
                span: (node.start, node.end),
                roles,
            });
        }
        out
    }

    fn nested_candidates(&self) -> Vec<Candidate> {
        let mut out = Vec::new();
        for outer in &self.loops {
            let mut found = None;
            for item in items(&self.masked, outer.body_start, outer.body_end) {
                let Some(inner_idx) = self.loop_item_at(item.start) else {
                    continue;
                };
                let inner = &self.loops[inner_idx];
                let Some((lv, op, term, b2, b3)) = self.body_accu(inner.body_start, inner.body_end)
                else {
                    continue;
                };
                let b1 = self.text[outer.body_start..item.start].to_string();
                let b4 = self.text[item.end.min(outer.body_end)..outer.body_end].to_string();
                match (&outer.header, &inner.header) {
                    (
                        LoopHeader::Counted { strict: Some(ol) },
                        LoopHeader::Counted { strict: Some(il) },
                    ) => {
                        if ol.index == il.index || lv.base() == ol.index || lv.base() == il.index {
                            continue;
                        }
                        let kind = if lv.indices_mention(&il.index) {
                            PatternKind::Nfiaa
                        } else if lv.indices_mention(&ol.index) {
                            PatternKind::Nfias
                        } else {
                            PatternKind::Nfiss
                        };
                        found = Some(Candidate {
                            kind,
                            span: (outer.start, outer.end),
                            roles: CapturedRoles {
                                for_levels: vec![ol.clone(), il.clone()],
                                accu: Some(lv),
                                op: Some(op),
                                term: Some(term),
                                blocks: vec![b1, b2, b3, b4],
                                ..Default::default()
                            },
                        });
                    }
                    (LoopHeader::Each(ol), LoopHeader::Each(il)) => {
                        if ol.binder == il.binder {
                            continue;
                        }
                        let kind = if lv.text == ol.binder {
                            PatternKind::Nfecs
                        } else if lv.text == il.binder {
                            PatternKind::Nfecc
                        } else {
                            PatternKind::Nfess
                        };
                        found = Some(Candidate {
                            kind,
                            span: (outer.start, outer.end),
                            roles: CapturedRoles {
                                each_levels: vec![ol.clone(), il.clone()],
                                accu: Some(lv),
                                op: Some(op),
                                term: Some(term),
                                blocks: vec![b1, b2, b3, b4],
                                ..Default::default()
                            },
                        });
                    }
                    _ => continue,
                }
                break;
            }
            if let Some(c) = found {
                out.push(c);
            }
        }
        out
    }

    fn loop_counter_matches(&self, kind: PatternKind) -> Vec<PatternMatch> {
        let mut out = Vec::new();
        for node in &self.loops {
            let nested = self.contains_loop(node);
            if (kind == PatternKind::LoopNested) != nested {
                continue;
            }
            let mut roles = CapturedRoles::default();
            match &node.header {
                LoopHeader::Counted { strict } => {
                    if let Some(level) = strict {
                        roles.for_levels.push(level.clone());
                    }
                }
                LoopHeader::Each(level) => roles.each_levels.push(level.clone()),
            }
            out.push(self.finish(kind, node.start, node.end, roles));
        }
        out
    }

    fn vector_candidates(&self, kind: PatternKind) -> Vec<Candidate> {
        let chunks = statement_chunks(&self.masked);
        let assigns: Vec<Option<PlainAssign>> = chunks
            .iter()
            .map(|&(s, e, term)| {
                if term == b';' {
                    self.parse_plain_assign(s, e)
                } else {
                    None
                }
            })
            .collect();
        let mut out = Vec::new();
        match kind {
            PatternKind::VecDot => {
                for a in &assigns {
                    let Some((lv, addends, span)) = a else {
                        continue;
                    };
                    if addends.len() != 2 {
                        continue;
                    }
                    let mut comps = Vec::new();
                    for &(s, e) in addends {
                        let factors = split_binary(&self.masked, s, e, b'*');
                        if factors.len() != 2 {
                            comps.clear();
                            break;
                        }
                        comps.push([
                            self.text[factors[0].0..factors[0].1].trim().to_string(),
                            self.text[factors[1].0..factors[1].1].trim().to_string(),
                        ]);
                    }
                    if comps.len() != 2 {
                        continue;
                    }
                    // addend k holds exp_{1,k} * exp_{2,k}
                    let operands = [
                        [comps[0][0].clone(), comps[1][0].clone()],
                        [comps[0][1].clone(), comps[1][1].clone()],
                    ];
                    out.push(Candidate {
                        kind,
                        span: *span,
                        roles: CapturedRoles {
                            vector: Some(VectorSlots {
                                targets: vec![lv.text.clone()],
                                operands,
                            }),
                            ..Default::default()
                        },
                    });
                }
            }
            PatternKind::VecAdd => {
                let mut i = 0;
                while i + 1 < chunks.len() {
                    let pair = (&assigns[i], &assigns[i + 1]);
                    let (Some((lv1, add1, span1)), Some((lv2, add2, span2))) = pair else {
                        i += 1;
                        continue;
                    };
                    // adjacent statements: nothing but whitespace between
                    // the terminating `;` and the next statement
                    let gap = &self.masked[chunks[i].1 + 1..chunks[i + 1].0];
                    if !gap.iter().all(u8::is_ascii_whitespace)
                        || add1.len() != 2
                        || add2.len() != 2
                    {
                        i += 1;
                        continue;
                    }
                    let comp = |r: &(usize, usize)| self.text[r.0..r.1].trim().to_string();
                    out.push(Candidate {
                        kind,
                        span: (span1.0, span2.1),
                        roles: CapturedRoles {
                            vector: Some(VectorSlots {
                                targets: vec![lv1.text.clone(), lv2.text.clone()],
                                operands: [
                                    [comp(&add1[0]), comp(&add2[0])],
                                    [comp(&add1[1]), comp(&add2[1])],
                                ],
                            }),
                            ..Default::default()
                        },
                    });
                    i += 2;
                }
            }
            _ => {}
        }
        out
    }

    /// `[type] lvalue = addend (+ addend)*` — returns the addend spans
    /// and the statement span. The target is the last lvalue-shaped run
    /// before the `=`, so declarations with initializers work too.
    fn parse_plain_assign(&self, start: usize, end: usize) -> Option<PlainAssign> {
        let s = skip_ws(&self.masked, start, end);
        let eq = (s..end).find(|&i| {
            self.masked[i] == b'='
                && self.masked.get(i + 1) != Some(&b'=')
                && (i == 0
                    || !matches!(
                        self.masked[i - 1],
                        b'=' | b'!'
                            | b'<'
                            | b'>'
                            | b'+'
                            | b'-'
                            | b'*'
                            | b'/'
                            | b'%'
                            | b'&'
                            | b'|'
                            | b'^'
                    ))
        })?;
        let lhs_end = eq;
        let mut target = None;
        for (ts, _) in textscan::ident_tokens(&self.masked, s, lhs_end) {
            if let Some((lv, after)) = parse_lvalue(&self.masked, self.text, ts, lhs_end)
                && skip_ws(&self.masked, after, lhs_end) == lhs_end
            {
                // whatever precedes the target must be a type, not a
                // statement head like `if (…)` or `return`
                let prefix = self.text[s..ts].trim();
                if !prefix.is_empty()
                    && (!TYPE_PREFIX_RE.is_match(prefix)
                        || prefix
                            .split_whitespace()
                            .next()
                            .is_some_and(|w| STATEMENT_KEYWORDS.contains(&w)))
                {
                    return None;
                }
                target = Some(lv);
                break;
            }
        }
        let lv = target?;
        let addends = split_binary(&self.masked, eq + 1, end, b'+');
        if addends.is_empty() {
            return None;
        }
        Some((lv, addends, (s, end)))
    }

    fn finish(
        &self,
        kind: PatternKind,
        start: usize,
        end: usize,
        roles: CapturedRoles,
    ) -> PatternMatch {
        let end_off = end.min(self.text.len());
        PatternMatch {
            kind,
            project: self.unit.project.clone(),
            relative_path: self.unit.relative_path.clone(),
            start_line: self.lines.line_of(start),
            end_line: self.lines.line_of(end_off.saturating_sub(1).max(start)),
            snippet: self.text[start..end_off].to_string(),
            roles,
        }
    }
}

/// Splits `[start, end)` at depth-zero occurrences of a binary operator,
/// ignoring unary uses. Returns the operand spans; a lone span means the
/// operator does not occur at the top level.
fn split_binary(masked: &[u8], start: usize, end: usize, op: u8) -> Vec<(usize, usize)> {
    let mut parts = Vec::new();
    let mut depth = 0i64;
    let mut part_start = start;
    let mut prev_meaningful: Option<u8> = None;
    let mut i = start;
    while i < end {
        let b = masked[i];
        match b {
            b'(' | b'[' => depth += 1,
            b')' | b']' => depth -= 1,
            _ if b == op && depth == 0 => {
                let binary = matches!(prev_meaningful, Some(p) if is_ident_char(p) || p == b')' || p == b']');
                let doubled = masked.get(i + 1) == Some(&b) || masked.get(i + 1) == Some(&b'=');
                if binary && !doubled {
                    parts.push((part_start, i));
                    part_start = i + 1;
                }
            }
            _ => {}
        }
        if !b.is_ascii_whitespace() {
            prev_meaningful = Some(b);
        }
        i += 1;
    }
    parts.push((part_start, end));
    parts
        .into_iter()
        .filter(|&(s, e)| {
            !masked[s..e.min(masked.len())]
                .iter()
                .all(u8::is_ascii_whitespace)
        })
        .collect()
}

/// Statement chunks of a whole unit: spans between `;`, `{` and `}`
/// boundaries at paren/bracket depth zero, with the byte that ended each
/// chunk.
fn statement_chunks(masked: &[u8]) -> Vec<(usize, usize, u8)> {
    let mut out = Vec::new();
    let mut depth = 0i64;
    let mut start = 0usize;
    for (i, &b) in masked.iter().enumerate() {
        match b {
            b'(' | b'[' => depth += 1,
            b')' | b']' => depth -= 1,
            b';' | b'{' | b'}' if depth == 0 => {
                let s = skip_ws(masked, start, i);
                if s < i {
                    out.push((s, i, b));
                }
                start = i + 1;
            }
            _ => {}
        }
    }
    let s = skip_ws(masked, start, masked.len());
    if s < masked.len() {
        out.push((s, masked.len(), 0));
    }
    out
}

/// Greedy innermost-first selection: candidates are taken latest-start
/// first, and a candidate is dropped when it overlaps an already-kept
/// span of the same kind. Inner matches therefore win over enclosing
/// ones, which keeps, for example, the innermost loop of a deep nest
/// visible to the constraint stage.
fn select_nonoverlapping(mut cands: Vec<Candidate>) -> Vec<Candidate> {
    cands.sort_by_key(|c| std::cmp::Reverse(c.span.0));
    let mut kept: Vec<(PatternKind, (usize, usize))> = Vec::new();
    let mut out = Vec::new();
    for c in cands {
        let clash = kept
            .iter()
            .any(|&(k, (s, e))| k == c.kind && c.span.0 < e && s < c.span.1);
        if !clash {
            kept.push((c.kind, c.span));
            out.push(c);
        }
    }
    out
}

/// Every non-overlapping occurrence of one pattern kind in a unit, in
/// ascending start order.
pub fn match_kind(kind: PatternKind, unit: &SourceUnit) -> Vec<PatternMatch> {
    let scan = UnitScan::new(unit);
    matches_for(&scan, kind)
}

fn matches_for(scan: &UnitScan<'_>, kind: PatternKind) -> Vec<PatternMatch> {
    let mut out: Vec<PatternMatch> = match kind {
        PatternKind::LoopSimple | PatternKind::LoopNested => scan.loop_counter_matches(kind),
        PatternKind::VecAdd | PatternKind::VecDot => {
            let cands = scan.vector_candidates(kind);
            select_nonoverlapping(cands)
                .into_iter()
                .map(|c| scan.finish(c.kind, c.span.0, c.span.1, c.roles))
                .collect()
        }
        k if k.is_nested() => {
            let cands: Vec<Candidate> = scan
                .nested_candidates()
                .into_iter()
                .filter(|c| c.kind == k)
                .collect();
            select_nonoverlapping(cands)
                .into_iter()
                .map(|c| scan.finish(c.kind, c.span.0, c.span.1, c.roles))
                .collect()
        }
        k => {
            let cands: Vec<Candidate> = scan
                .simple_candidates()
                .into_iter()
                .filter(|c| c.kind == k)
                .collect();
            select_nonoverlapping(cands)
                .into_iter()
                .map(|c| scan.finish(c.kind, c.span.0, c.span.1, c.roles))
                .collect()
        }
    };
    out.sort_by_key(|m| (m.start_line, m.kind));
    out
}

/// Union of [`match_kind`] over the enabled kinds, ordered by
/// (start line, kind). Deterministic for a given unit regardless of
/// thread count, since nothing here is shared.
pub fn match_all(unit: &SourceUnit, enabled: &BTreeSet<PatternKind>) -> Vec<PatternMatch> {
    let scan = UnitScan::new(unit);
    let mut out = Vec::new();
    for &kind in enabled {
        out.extend(matches_for(&scan, kind));
    }
    out.sort_by_key(|m| (m.start_line, m.kind));
    out
}

/// Drops every non-nested SP match whose line span shares a line with a
/// nested SP match. Nested matches and loop counters always survive.
pub fn resolve_precedence(matches: Vec<PatternMatch>) -> Vec<PatternMatch> {
    let nested_spans: Vec<(u32, u32)> = matches
        .iter()
        .filter(|m| m.kind.is_sp() && m.kind.is_nested())
        .map(|m| (m.start_line, m.end_line))
        .collect();
    matches
        .into_iter()
        .filter(|m| {
            if !m.kind.is_sp() || m.kind.is_nested() {
                return true;
            }
            !nested_spans
                .iter()
                .any(|&(s, e)| m.start_line <= e && s <= m.end_line)
        })
        .collect()
}

/// One catalog line per kind: shape sketch, slots, constraint family.
pub fn catalog() -> String {
    let mut out = String::new();
    let row = |out: &mut String, kind: PatternKind, shape: &str, slots: &str, cons: &str| {
        out.push_str(&format!(
            "{:<12} nested={:<5} sp={:<5}\n    shape:       {}\n    slots:       {}\n    constraints: {}\n",
            kind.name(),
            kind.is_nested(),
            kind.is_sp(),
            shape,
            slots,
            cons
        ));
    };
    row(
        &mut out,
        PatternKind::Fis,
        "for (index = exp1; index < exp2; index++) { block1  accu op= exp3;  block2 }",
        "index, exp1, rel-op, exp2, accu (scalar or index-free element), op, exp3, block1, block2",
        "C1..C5",
    );
    row(
        &mut out,
        PatternKind::Fes,
        "for (entry : exp1) { block1  accu op= exp3;  block2 }",
        "entry, exp1, accu, op, exp3, block1, block2",
        "C1..C5",
    );
    row(
        &mut out,
        PatternKind::Fia,
        "for (index = exp1; index < exp2; index++) { block1  accu[..index..] op= exp3;  block2 }",
        "index, exp1, rel-op, exp2, accu (element indexed by index), op, exp3, block1, block2",
        "C1..C5",
    );
    row(
        &mut out,
        PatternKind::Fec,
        "for (entry : exp1) { block1  entry op= exp3;  block2 }",
        "entry, exp1, op, exp3, block1, block2",
        "C1..C5",
    );
    row(
        &mut out,
        PatternKind::Nfiss,
        "for (i = exp1; i < exp2; i++) { block1  for (j = exp1'; j < exp2'; j++) { block2  accu op= exp3;  block3 }  block4 }",
        "i, j, exp1, exp2, exp1', exp2', accu (scalar), op, exp3, block1..block4",
        "N1..N6 (per-level C1/C2 plus cross-level write checks)",
    );
    row(
        &mut out,
        PatternKind::Nfess,
        "for (entry : exp1) { block1  for (elem : exp2) { block2  accu op= exp3;  block3 }  block4 }",
        "entry, elem, exp1, exp2, accu (scalar), op, exp3, block1..block4",
        "E1..E6 (E5/E6 guard the scalar accumulator)",
    );
    row(
        &mut out,
        PatternKind::Nfias,
        "for (i ...) { block1  for (j ...) { block2  accu[..i..] op= exp3;  block3 }  block4 }",
        "i, j, bounds, accu (element indexed by the outer index), op, exp3, block1..block4",
        "N1..N6",
    );
    row(
        &mut out,
        PatternKind::Nfecs,
        "for (entry : exp1) { block1  for (elem : exp2) { block2  entry op= exp3;  block3 }  block4 }",
        "entry, elem, exp1, exp2, op, exp3, block1..block4",
        "E1..E4 (the accumulation statement itself is exempt from E1)",
    );
    row(
        &mut out,
        PatternKind::Nfiaa,
        "for (i ...) { block1  for (j ...) { block2  accu[..i..][..j..] op= exp3;  block3 }  block4 }",
        "i, j, bounds, accu (element indexed at the inner level), op, exp3, block1..block4",
        "N1..N6",
    );
    row(
        &mut out,
        PatternKind::Nfecc,
        "for (entry : exp1) { block1  for (elem : entry...) { block2  elem op= exp3;  block3 }  block4 }",
        "entry, elem, exp1, exp2, op, exp3, block1..block4",
        "E1..E4",
    );
    row(
        &mut out,
        PatternKind::VecAdd,
        "var1 = exp11 + exp21;  var2 = exp12 + exp22;   (two adjacent statements)",
        "var1, var2, exp11, exp12, exp21, exp22",
        "V1..V5 (source/index agreement incl. targets); experimental, off by default",
    );
    row(
        &mut out,
        PatternKind::VecDot,
        "var = exp11 * exp21 + exp12 * exp22;",
        "var, exp11, exp12, exp21, exp22",
        "V1..V2 (source/index agreement); experimental, off by default",
    );
    row(
        &mut out,
        PatternKind::LoopSimple,
        "any for/foreach loop containing no other loop (any header accepted)",
        "loop span only",
        "none (counting only)",
    );
    row(
        &mut out,
        PatternKind::LoopNested,
        "any for/foreach loop containing at least one loop (any header accepted)",
        "loop span only",
        "none (counting only)",
    );
    out
}
