//! Variable-role analyses and the per-family constraint sets that turn
//! raw pattern matches into accepted sum/product matches or documented
//! rejections.
//!
//! `vars` and `writes` are purely textual: member accesses contribute
//! only their base identifier, method names are excluded, and literal
//! content never counts. `writes` covers plain and compound assignments
//! and `++`/`--`, at any nesting depth of the block.

use std::collections::BTreeSet;

use crate::patterns::{CapturedRoles, PatternKind, PatternMatch, VectorSlots};
use crate::textscan::{
    ident_tokens, is_ident_char, is_java_keyword, lvalue_segments_before, mask_literals,
    parse_lvalue, skip_ws,
};

/// Outcome of one constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub id: &'static str,
    pub pass: bool,
    pub offending: BTreeSet<String>,
    pub note: Option<String>,
}

impl Verdict {
    fn ok(id: &'static str) -> Verdict {
        Verdict {
            id,
            pass: true,
            offending: BTreeSet::new(),
            note: None,
        }
    }

    fn fail(id: &'static str, offending: BTreeSet<String>) -> Verdict {
        Verdict {
            id,
            pass: false,
            offending,
            note: None,
        }
    }

    fn from_set(id: &'static str, offending: BTreeSet<String>) -> Verdict {
        if offending.is_empty() {
            Verdict::ok(id)
        } else {
            Verdict::fail(id, offending)
        }
    }

    fn membership(id: &'static str, name: &str, set: &BTreeSet<String>) -> Verdict {
        if set.contains(name) {
            Verdict::fail(id, BTreeSet::from([name.to_string()]))
        } else {
            Verdict::ok(id)
        }
    }
}

/// All verdicts for one match; accepted means every constraint passed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintReport {
    pub kind: PatternKind,
    pub verdicts: Vec<Verdict>,
}

impl ConstraintReport {
    pub fn accepted(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn failing(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.pass)
    }
}

/// Identifiers occurring in an expression: method names (an identifier
/// directly before `(`) and member names after `.` are excluded, array
/// bases and call receivers are kept.
pub fn vars(expr: &str) -> BTreeSet<String> {
    let masked = mask_literals(expr);
    let mut out = BTreeSet::new();
    for (s, e) in ident_tokens(&masked, 0, masked.len()) {
        let name = &expr[s..e];
        if is_java_keyword(name) {
            continue;
        }
        let prev = masked[..s].iter().rev().find(|b| !b.is_ascii_whitespace());
        if prev == Some(&b'.') {
            continue;
        }
        let next = masked[e..].iter().find(|b| !b.is_ascii_whitespace());
        if next == Some(&b'(') {
            continue;
        }
        out.insert(name.to_string());
    }
    out
}

pub fn vars_of(exprs: &[&str]) -> BTreeSet<String> {
    exprs.iter().flat_map(|e| vars(e)).collect()
}

fn base_of_segments(segments: &[String]) -> Option<&str> {
    match segments.first().map(String::as_str) {
        Some("this") | Some("super") => segments.get(1).map(String::as_str),
        Some(first) if !is_java_keyword(first) => Some(first),
        _ => None,
    }
}

/// Base identifiers of every assignment target (plain `=`, all compound
/// `op=`) and every `++`/`--` operand in the block, at any depth.
pub fn writes(block: &str) -> BTreeSet<String> {
    let masked = mask_literals(block);
    let mut out = BTreeSet::new();
    let mut i = 0;
    while i < masked.len() {
        let b = masked[i];
        if b == b'=' {
            if masked.get(i + 1) == Some(&b'=') {
                i += 2;
                continue;
            }
            if i == 0 {
                i += 1;
                continue;
            }
            let prev = masked[i - 1];
            let lv_end = match prev {
                b'=' | b'!' => None,
                b'<' | b'>' => {
                    // `<<=` / `>>=` / `>>>=` are compound; `<=` / `>=` are not
                    if i >= 2 && masked[i - 2] == prev {
                        let mut j = i - 1;
                        while j > 0 && masked[j - 1] == prev {
                            j -= 1;
                        }
                        Some(j)
                    } else {
                        None
                    }
                }
                b'+' | b'-' | b'*' | b'/' | b'%' | b'&' | b'|' | b'^' => Some(i - 1),
                _ => Some(i),
            };
            if let Some(end) = lv_end
                && let Some(segments) = lvalue_segments_before(&masked, block, end)
                && let Some(base) = base_of_segments(&segments)
            {
                out.insert(base.to_string());
            }
            i += 1;
            continue;
        }
        if (b == b'+' || b == b'-') && masked.get(i + 1) == Some(&b) {
            if let Some(segments) = lvalue_segments_before(&masked, block, i) {
                if let Some(base) = base_of_segments(&segments) {
                    out.insert(base.to_string());
                }
            } else {
                // prefix form: operand follows
                let start = skip_ws(&masked, i + 2, masked.len());
                if start < masked.len() && !is_ident_char(masked[start]) {
                    i += 2;
                    continue;
                }
                if let Some((lv, _)) = parse_lvalue(&masked, block, start, masked.len())
                    && let Some(base) = base_of_segments(&lv.segments)
                {
                    out.insert(base.to_string());
                }
            }
            i += 2;
            continue;
        }
        i += 1;
    }
    out
}

pub fn writes_of(blocks: &[&str]) -> BTreeSet<String> {
    blocks.iter().flat_map(|b| writes(b)).collect()
}

fn intersect(a: &BTreeSet<String>, b: &BTreeSet<String>) -> BTreeSet<String> {
    a.intersection(b).cloned().collect()
}

fn union(a: BTreeSet<String>, b: &BTreeSet<String>) -> BTreeSet<String> {
    let mut a = a;
    a.extend(b.iter().cloned());
    a
}

/// Constraints C1..C5 for the non-nested kinds. For the `foreach` kinds
/// the loop binder plays the index role and the collection expression
/// the bound role.
pub fn check_for_sum(kind: PatternKind, roles: &CapturedRoles) -> ConstraintReport {
    let accu = roles
        .accu
        .as_ref()
        .expect("simple kinds carry an accumulator");
    let accu_base = accu.base().to_string();
    let term = roles.term.as_deref().unwrap_or("");
    let (binder, bound) = if let Some(level) = roles.for_levels.first() {
        (level.index.as_str(), level.limit.as_str())
    } else {
        let level = roles.each_levels.first().expect("foreach level");
        (level.binder.as_str(), level.collection.as_str())
    };
    let b1 = roles.blocks.first().map(String::as_str).unwrap_or("");
    let b2 = roles.blocks.get(1).map(String::as_str).unwrap_or("");

    let vars_bound = vars(bound);
    let vars_term = vars(term);
    let vars_rhs = union(vars_bound.clone(), &vars_term);
    let writes_blocks = writes_of(&[b1, b2]);
    let writes_term = writes(term);
    let writes_rhs = union(writes(bound), &writes_term);

    let verdicts = vec![
        Verdict::membership("C1", &accu_base, &vars_rhs),
        Verdict::membership("C2", binder, &vars_bound),
        Verdict::membership("C3", &accu_base, &writes_blocks),
        Verdict::membership("C4", binder, &union(writes_blocks.clone(), &writes_term)),
        Verdict::from_set(
            "C5",
            intersect(&vars_rhs, &union(writes_blocks, &writes_rhs)),
        ),
    ];
    ConstraintReport { kind, verdicts }
}

/// Constraints N1..N6 for the nested counted-for kinds: the C1/C2 checks
/// per loop level plus cross-level write checks over all four blocks.
pub fn check_nested_for(kind: PatternKind, roles: &CapturedRoles) -> ConstraintReport {
    let accu = roles
        .accu
        .as_ref()
        .expect("nested kinds carry an accumulator");
    let accu_base = accu.base().to_string();
    let term = roles.term.as_deref().unwrap_or("");
    let outer = &roles.for_levels[0];
    let inner = &roles.for_levels[1];
    let blocks: Vec<&str> = roles.blocks.iter().map(String::as_str).collect();

    let vars_lo = vars(&outer.limit);
    let vars_li = vars(&inner.limit);
    let vars_term = vars(term);
    let vars_rhs = union(union(vars_lo.clone(), &vars_li), &vars_term);
    let writes_blocks = writes_of(&blocks);
    let writes_term = writes(term);
    let writes_rhs = union(
        union(writes(&outer.limit), &writes(&inner.limit)),
        &writes_term,
    );

    let binder_writes = union(writes_blocks.clone(), &writes_term);
    let mut n5_offending = BTreeSet::new();
    for idx in [&outer.index, &inner.index] {
        if binder_writes.contains(idx) {
            n5_offending.insert(idx.clone());
        }
    }

    let verdicts = vec![
        Verdict::membership("N1", &accu_base, &vars_rhs),
        Verdict::membership("N2", &outer.index, &vars_lo),
        Verdict::membership("N3", &inner.index, &vars_li),
        Verdict::membership("N4", &accu_base, &writes_blocks),
        Verdict::from_set("N5", n5_offending),
        Verdict::from_set(
            "N6",
            intersect(&vars_rhs, &union(writes_blocks, &writes_rhs)),
        ),
    ];
    ConstraintReport { kind, verdicts }
}

/// Constraints E1..E4 for the nested foreach kinds, per the
/// indexed-family templates. The accumulation statement itself is not
/// part of any block, so it is structurally exempt from E1. The
/// scalar-accumulator variant additionally gets E5/E6 so the target obeys
/// the same non-interference rules as in the simple kinds.
pub fn check_nested_foreach(kind: PatternKind, roles: &CapturedRoles) -> ConstraintReport {
    let accu = roles
        .accu
        .as_ref()
        .expect("nested kinds carry an accumulator");
    let accu_base = accu.base().to_string();
    let term = roles.term.as_deref().unwrap_or("");
    let outer = &roles.each_levels[0];
    let inner = &roles.each_levels[1];
    let blocks: Vec<&str> = roles.blocks.iter().map(String::as_str).collect();

    let writes_all = writes_of(&blocks);
    let writes_inner = writes_of(&[blocks[1], blocks[2]]);
    let writes_term = writes(term);
    let vars_outer_coll = vars(&outer.collection);
    let vars_rhs = union(vars(&inner.collection), &vars(term));

    let mut verdicts = vec![
        Verdict::membership("E1", &outer.binder, &writes_all),
        Verdict::membership("E2", &inner.binder, &writes_inner),
        Verdict::from_set("E3", intersect(&vars_outer_coll, &writes_all)),
        Verdict::from_set(
            "E4",
            intersect(&vars_rhs, &union(writes_inner, &writes_term)),
        ),
    ];
    if kind == PatternKind::Nfess {
        verdicts.push(Verdict::membership(
            "E5",
            &accu_base,
            &union(writes_all, &writes_term),
        ));
        let all_vars = union(vars_outer_coll, &vars_rhs);
        verdicts.push(Verdict::membership("E6", &accu_base, &all_vars));
    }
    ConstraintReport { kind, verdicts }
}

// ---------------------------------------------------------------------------
// vector component access

/// The base expression of a component access: `v.x`, `v.getX()`,
/// `v.get(0)`, `v[i]` all yield `v`; a bare name with an `x`/`y`/`0`/`1`
/// suffix yields its prefix.
pub fn source(expr: &str) -> Option<String> {
    let e = expr.trim();
    for suffix in [".x", ".y"] {
        if let Some(prefix) = strip_suffix_ws(e, suffix) {
            return nonempty(prefix);
        }
    }
    for suffix in [".getX()", ".getY()", ".get(0)", ".get(1)"] {
        if let Some(prefix) = strip_suffix_ws(e, suffix) {
            return nonempty(prefix);
        }
    }
    if e.ends_with(']') {
        let open = matching_open_bracket(e)?;
        return nonempty(&e[..open]);
    }
    if is_plain_ident(e) && e.len() > 1 {
        let last = e.as_bytes()[e.len() - 1];
        if matches!(last, b'x' | b'y' | b'0' | b'1') {
            return nonempty(&e[..e.len() - 1]);
        }
    }
    None
}

/// The dimension selected by a component access, when it is 0 or 1.
pub fn index(expr: &str) -> Option<u8> {
    let e = expr.trim();
    for suffix in [".x", ".getX()", ".get(0)"] {
        if strip_suffix_ws(e, suffix).is_some() {
            return Some(0);
        }
    }
    for suffix in [".y", ".getY()", ".get(1)"] {
        if strip_suffix_ws(e, suffix).is_some() {
            return Some(1);
        }
    }
    if e.ends_with(']') {
        let open = matching_open_bracket(e)?;
        return match e[open + 1..e.len() - 1].trim() {
            "0" => Some(0),
            "1" => Some(1),
            _ => None,
        };
    }
    if is_plain_ident(e) && e.len() > 1 {
        return match e.as_bytes()[e.len() - 1] {
            b'x' | b'0' => Some(0),
            b'y' | b'1' => Some(1),
            _ => None,
        };
    }
    None
}

fn strip_suffix_ws<'a>(e: &'a str, suffix: &str) -> Option<&'a str> {
    e.strip_suffix(suffix).map(str::trim_end)
}

fn nonempty(s: &str) -> Option<String> {
    let t = s.trim();
    if t.is_empty() {
        None
    } else {
        Some(t.to_string())
    }
}

fn is_plain_ident(e: &str) -> bool {
    !e.is_empty()
        && e.bytes().all(is_ident_char)
        && !e.as_bytes()[0].is_ascii_digit()
        && !is_java_keyword(e)
}

fn matching_open_bracket(e: &str) -> Option<usize> {
    let bytes = e.as_bytes();
    let mut depth = 0usize;
    for i in (0..bytes.len()).rev() {
        match bytes[i] {
            b']' => depth += 1,
            b'[' => {
                depth -= 1;
                if depth == 0 {
                    return if i > 0 { Some(i) } else { None };
                }
            }
            _ => {}
        }
    }
    None
}

/// Source/index agreement for the vector shapes: V1/V2 for the scalar
/// product, V3..V5 additionally for vector addition. Unresolvable
/// component accesses fail with an "unrecognized component access" note.
pub fn check_vector(kind: PatternKind, roles: &CapturedRoles) -> ConstraintReport {
    let slots = roles.vector.as_ref().expect("vector kinds carry slots");
    let mut verdicts = vec![sources_agree("V1", slots), indices_aligned("V2", slots)];
    if kind == PatternKind::VecAdd {
        verdicts.push(target_index("V3", slots, 0));
        verdicts.push(target_index("V4", slots, 1));
        verdicts.push(target_sources("V5", slots));
    }
    ConstraintReport { kind, verdicts }
}

fn unresolved(id: &'static str, exprs: Vec<String>) -> Verdict {
    let mut v = Verdict::fail(id, exprs.into_iter().collect());
    v.note = Some("unrecognized component access".to_string());
    v
}

fn sources_agree(id: &'static str, slots: &VectorSlots) -> Verdict {
    for operand in &slots.operands {
        let s0 = source(&operand[0]);
        let s1 = source(&operand[1]);
        match (s0, s1) {
            (Some(a), Some(b)) if a == b => {}
            (Some(_), Some(_)) => {
                return Verdict::fail(id, operand.iter().cloned().collect());
            }
            _ => return unresolved(id, operand.to_vec()),
        }
    }
    Verdict::ok(id)
}

fn indices_aligned(id: &'static str, slots: &VectorSlots) -> Verdict {
    for d in 0..2 {
        let a = index(&slots.operands[0][d]);
        let b = index(&slots.operands[1][d]);
        match (a, b) {
            (Some(x), Some(y)) if x == y => {}
            (Some(_), Some(_)) => {
                return Verdict::fail(
                    id,
                    [slots.operands[0][d].clone(), slots.operands[1][d].clone()]
                        .into_iter()
                        .collect(),
                );
            }
            _ => {
                return unresolved(
                    id,
                    vec![slots.operands[0][d].clone(), slots.operands[1][d].clone()],
                );
            }
        }
    }
    Verdict::ok(id)
}

fn target_index(id: &'static str, slots: &VectorSlots, d: usize) -> Verdict {
    let target = &slots.targets[d];
    let involved = vec![
        target.clone(),
        slots.operands[0][d].clone(),
        slots.operands[1][d].clone(),
    ];
    let t = index(target);
    let a = index(&slots.operands[0][d]);
    let b = index(&slots.operands[1][d]);
    match (t, a, b) {
        (Some(x), Some(y), Some(z)) if x == y && y == z => Verdict::ok(id),
        (Some(_), Some(_), Some(_)) => Verdict::fail(id, involved.into_iter().collect()),
        _ => unresolved(id, involved),
    }
}

fn target_sources(id: &'static str, slots: &VectorSlots) -> Verdict {
    let a = source(&slots.targets[0]);
    let b = source(&slots.targets[1]);
    match (a, b) {
        (Some(x), Some(y)) if x == y => Verdict::ok(id),
        (Some(_), Some(_)) => Verdict::fail(id, slots.targets.iter().cloned().collect()),
        _ => unresolved(id, slots.targets.clone()),
    }
}

/// Dispatches a raw match to its family's constraint set. Loop counters
/// have no constraints and always come back accepted.
pub fn check(m: &PatternMatch) -> ConstraintReport {
    match m.kind {
        PatternKind::Fis | PatternKind::Fes | PatternKind::Fia | PatternKind::Fec => {
            check_for_sum(m.kind, &m.roles)
        }
        PatternKind::Nfiss | PatternKind::Nfias | PatternKind::Nfiaa => {
            check_nested_for(m.kind, &m.roles)
        }
        PatternKind::Nfess | PatternKind::Nfecs | PatternKind::Nfecc => {
            check_nested_foreach(m.kind, &m.roles)
        }
        PatternKind::VecAdd | PatternKind::VecDot => check_vector(m.kind, &m.roles),
        PatternKind::LoopSimple | PatternKind::LoopNested => ConstraintReport {
            kind: m.kind,
            verdicts: Vec::new(),
        },
    }
}
