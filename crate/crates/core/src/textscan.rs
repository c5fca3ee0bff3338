//! Scanning primitives over comment-stripped Java text: literal masking,
//! balanced-delimiter walks, top-level statement iteration, identifier
//! tokens and lvalue parsing. The pattern matcher and the variable
//! analyses are built on these.
//!
//! Identifiers are ASCII; non-ASCII characters act as token separators,
//! so exotic identifiers degrade toward non-matches and extra constraint
//! failures, never toward spurious acceptance.

/// Replaces string and character literals (quotes included) with spaces,
/// byte for byte. Lengths, byte offsets and line breaks are all
/// preserved, so scans over the masked bytes can ignore literal content
/// entirely.
pub fn mask_literals(text: &str) -> Vec<u8> {
    let bytes = text.as_bytes();
    let mut out = bytes.to_vec();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b == b'"' || b == b'\'' {
            let quote = b;
            out[i] = b' ';
            i += 1;
            while i < bytes.len() {
                let c = bytes[i];
                if c == b'\\' && i + 1 < bytes.len() {
                    out[i] = b' ';
                    if bytes[i + 1] != b'\n' && bytes[i + 1] != b'\r' {
                        out[i + 1] = b' ';
                    }
                    i += 2;
                    continue;
                }
                if c == b'\n' || c == b'\r' {
                    // unterminated literal: stop at the line break
                    break;
                }
                out[i] = b' ';
                i += 1;
                if c == quote {
                    break;
                }
            }
        } else {
            i += 1;
        }
    }
    out
}

/// Finds the matching closer for the opener at `open`, tracking only the
/// opener's own bracket kind.
pub fn find_balanced(masked: &[u8], open: usize) -> Option<usize> {
    let opener = masked[open];
    let closer = match opener {
        b'(' => b')',
        b'[' => b']',
        b'{' => b'}',
        _ => return None,
    };
    let mut depth = 0usize;
    let mut i = open;
    while i < masked.len() {
        let b = masked[i];
        if b == opener {
            depth += 1;
        } else if b == closer {
            depth -= 1;
            if depth == 0 {
                return Some(i);
            }
        }
        i += 1;
    }
    None
}

/// Byte positions of `sep` at zero bracket depth within `[start, end)`.
pub fn top_level_positions(masked: &[u8], start: usize, end: usize, sep: u8) -> Vec<usize> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let end = end.min(masked.len());
    for (i, &b) in masked.iter().enumerate().take(end).skip(start) {
        match b {
            b'(' | b'[' | b'{' => depth += 1,
            b')' | b']' | b'}' => depth = depth.saturating_sub(1),
            b if b == sep && depth == 0 => out.push(i),
            _ => {}
        }
    }
    out
}

/// One top-level item of a statement block: text up to a `;` at depth
/// zero, extended over an attached balanced `{…}` block when the
/// statement carries one (loop and `if` headers, bare blocks).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Item {
    pub start: usize,
    pub end: usize,
}

pub fn items(masked: &[u8], start: usize, end: usize) -> Vec<Item> {
    let end = end.min(masked.len());
    let mut out = Vec::new();
    let mut i = start;
    'outer: while i < end {
        while i < end && masked[i].is_ascii_whitespace() {
            i += 1;
        }
        if i >= end {
            break;
        }
        let item_start = i;
        let mut depth = 0usize;
        while i < end {
            match masked[i] {
                b'(' | b'[' => depth += 1,
                b')' | b']' => depth = depth.saturating_sub(1),
                b'{' => {
                    if depth == 0 {
                        let item_end = match find_balanced(masked, i) {
                            Some(close) => close + 1,
                            None => end,
                        };
                        i = item_end;
                        out.push(Item {
                            start: item_start,
                            end: item_end.min(end),
                        });
                        continue 'outer;
                    }
                    depth += 1;
                }
                b'}' => {
                    if depth == 0 {
                        // stray closer: the span was larger than the block
                        if i > item_start {
                            out.push(Item {
                                start: item_start,
                                end: i,
                            });
                        }
                        i += 1;
                        continue 'outer;
                    }
                    depth -= 1;
                }
                b';' if depth == 0 => {
                    i += 1;
                    out.push(Item {
                        start: item_start,
                        end: i,
                    });
                    continue 'outer;
                }
                _ => {}
            }
            i += 1;
        }
        if item_start < end {
            out.push(Item {
                start: item_start,
                end,
            });
        }
        break;
    }
    out
}

pub fn is_ident_start(b: u8) -> bool {
    b == b'_' || b == b'$' || b.is_ascii_alphabetic()
}

pub fn is_ident_char(b: u8) -> bool {
    is_ident_start(b) || b.is_ascii_digit()
}

const JAVA_KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "false",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "null",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "true",
    "try",
    "var",
    "void",
    "volatile",
    "while",
];

pub fn is_java_keyword(s: &str) -> bool {
    JAVA_KEYWORDS.binary_search(&s).is_ok()
}

/// Identifier tokens with byte spans. Number literals are consumed as a
/// whole so `0xff` never yields an `xff` token.
pub fn ident_tokens(masked: &[u8], start: usize, end: usize) -> Vec<(usize, usize)> {
    let end = end.min(masked.len());
    let mut out = Vec::new();
    let mut i = start;
    while i < end {
        let b = masked[i];
        if b.is_ascii_digit() {
            i += 1;
            while i < end && (is_ident_char(masked[i]) || masked[i] == b'.') {
                i += 1;
            }
        } else if is_ident_start(b) {
            let s = i;
            i += 1;
            while i < end && is_ident_char(masked[i]) {
                i += 1;
            }
            out.push((s, i));
        } else {
            i += 1;
        }
    }
    out
}

/// 1-based line lookup by byte offset.
pub struct LineIndex {
    starts: Vec<usize>,
}

impl LineIndex {
    pub fn new(text: &str) -> Self {
        let mut starts = vec![0];
        for (i, b) in text.bytes().enumerate() {
            if b == b'\n' {
                starts.push(i + 1);
            }
        }
        LineIndex { starts }
    }

    pub fn line_of(&self, offset: usize) -> u32 {
        self.starts.partition_point(|&s| s <= offset) as u32
    }
}

/// Counts lines the way the corpus does: one more than the number of
/// newline bytes, except that the empty text has zero lines.
pub fn line_count(text: &str) -> usize {
    if text.is_empty() {
        0
    } else {
        text.bytes().filter(|&b| b == b'\n').count() + 1
    }
}

pub fn eq_ignore_ws(a: &str, b: &str) -> bool {
    let mut x = a.bytes().filter(|b| !b.is_ascii_whitespace());
    let mut y = b.bytes().filter(|b| !b.is_ascii_whitespace());
    loop {
        match (x.next(), y.next()) {
            (None, None) => return true,
            (Some(p), Some(q)) if p == q => {}
            _ => return false,
        }
    }
}

/// A parsed assignment target: dotted segments with up to two trailing
/// index expressions, e.g. `a.b[i][j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lvalue {
    pub text: String,
    pub segments: Vec<String>,
    pub indices: Vec<String>,
}

impl Lvalue {
    /// The identifier the target is rooted at; `this.`/`super.` prefixes
    /// are skipped so `this.total` is rooted at `total`.
    pub fn base(&self) -> &str {
        match self.segments.first().map(String::as_str) {
            Some("this") | Some("super") if self.segments.len() > 1 => &self.segments[1],
            Some(_) => &self.segments[0],
            None => "",
        }
    }

    /// True when `name` occurs as an identifier inside any index slot.
    pub fn indices_mention(&self, name: &str) -> bool {
        self.indices.iter().any(|idx| {
            let masked = mask_literals(idx);
            ident_tokens(&masked, 0, masked.len())
                .iter()
                .any(|&(s, e)| &idx[s..e] == name)
        })
    }
}

/// Parses an lvalue starting at `start` (whitespace already skipped).
/// Returns the lvalue and the offset just past it, or `None` when the
/// text there is not lvalue-shaped. Targets deeper than two index slots
/// or with segments after an index are not treated as lvalues.
pub fn parse_lvalue(
    masked: &[u8],
    text: &str,
    start: usize,
    end: usize,
) -> Option<(Lvalue, usize)> {
    let mut i = start;
    let mut segments = Vec::new();
    loop {
        if i >= end || !is_ident_start(masked[i]) {
            return None;
        }
        let s = i;
        while i < end && is_ident_char(masked[i]) {
            i += 1;
        }
        segments.push(text[s..i].to_string());
        let after = skip_ws(masked, i, end);
        if after < end && masked[after] == b'.' {
            i = skip_ws(masked, after + 1, end);
        } else {
            break;
        }
    }
    // a bare keyword is not an assignable target; `this.x` is
    if segments.len() == 1 && is_java_keyword(&segments[0]) {
        return None;
    }
    let mut indices = Vec::new();
    let mut i2 = skip_ws(masked, i, end);
    while indices.len() < 2 && i2 < end && masked[i2] == b'[' {
        let close = find_balanced(masked, i2)?;
        if close >= end {
            return None;
        }
        indices.push(text[i2 + 1..close].trim().to_string());
        i = close + 1;
        i2 = skip_ws(masked, i, end);
    }
    let lv_text = text[start..i].trim().to_string();
    Some((
        Lvalue {
            text: lv_text,
            segments,
            indices,
        },
        i,
    ))
}

pub fn skip_ws(masked: &[u8], mut i: usize, end: usize) -> usize {
    while i < end && masked[i].is_ascii_whitespace() {
        i += 1;
    }
    i
}

pub fn skip_ws_back(masked: &[u8], mut i: usize, start: usize) -> usize {
    while i > start && masked[i - 1].is_ascii_whitespace() {
        i -= 1;
    }
    i
}

/// Walks an lvalue backwards from `end` (exclusive) and returns its
/// segments leftmost-first, e.g. `["a", "b"]` for `a.b[i]`. Used to find
/// assignment targets when scanning for `=`, `op=` and `++`/`--`.
pub fn lvalue_segments_before(masked: &[u8], text: &str, end: usize) -> Option<Vec<String>> {
    let mut i = skip_ws_back(masked, end, 0);
    // trailing index expressions
    loop {
        if i > 0 && masked[i - 1] == b']' {
            let mut depth = 0usize;
            let mut j = i;
            let mut opened = None;
            while j > 0 {
                j -= 1;
                match masked[j] {
                    b']' => depth += 1,
                    b'[' => {
                        depth -= 1;
                        if depth == 0 {
                            opened = Some(j);
                            break;
                        }
                    }
                    _ => {}
                }
            }
            i = skip_ws_back(masked, opened?, 0);
        } else {
            break;
        }
    }
    let mut segments_rev = Vec::new();
    loop {
        if i == 0 || !is_ident_char(masked[i - 1]) {
            return None;
        }
        let e = i;
        while i > 0 && is_ident_char(masked[i - 1]) {
            i -= 1;
        }
        if !is_ident_start(masked[i]) {
            return None;
        }
        segments_rev.push(text[i..e].to_string());
        let before = skip_ws_back(masked, i, 0);
        if before > 0 && masked[before - 1] == b'.' {
            i = skip_ws_back(masked, before - 1, 0);
            // an index expression may sit between segments: a[0].b — the
            // base is still the leftmost identifier
            while i > 0 && masked[i - 1] == b']' {
                let mut depth = 0usize;
                let mut j = i;
                let mut opened = None;
                while j > 0 {
                    j -= 1;
                    match masked[j] {
                        b']' => depth += 1,
                        b'[' => {
                            depth -= 1;
                            if depth == 0 {
                                opened = Some(j);
                                break;
                            }
                        }
                        _ => {}
                    }
                }
                i = skip_ws_back(masked, opened?, 0);
            }
        } else {
            break;
        }
    }
    segments_rev.reverse();
    Some(segments_rev)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masking_hides_literal_content() {
        let text = r#"int x = f("a(b", ')'); // tail"#;
        let masked = mask_literals(text);
        assert_eq!(masked.len(), text.len());
        let m = String::from_utf8(masked).unwrap();
        assert!(!m.contains("a(b"));
        assert!(m.contains("f("));
        // parens inside the string are gone
        assert_eq!(m.matches('(').count(), 1);
    }

    #[test]
    fn masking_keeps_line_breaks() {
        let text = "String s = \"unterminated\nnext();";
        let masked = mask_literals(text);
        assert_eq!(masked.iter().filter(|&&b| b == b'\n').count(), 1);
        let m = String::from_utf8(masked).unwrap();
        assert!(m.contains("next()"));
    }

    #[test]
    fn balanced_scan_spans_nested_braces() {
        let text = "{ a; { b; } c; } d;";
        let masked = mask_literals(text);
        assert_eq!(find_balanced(&masked, 0), Some(15));
    }

    #[test]
    fn items_split_statements_and_blocks() {
        let text = "int a = 0; if (x) { a++; } b = a;";
        let masked = mask_literals(text);
        let its = items(&masked, 0, text.len());
        let texts: Vec<&str> = its.iter().map(|it| &text[it.start..it.end]).collect();
        assert_eq!(texts, vec!["int a = 0;", "if (x) { a++; }", "b = a;"]);
    }

    #[test]
    fn ident_tokens_skip_numbers() {
        let text = "pixel & 0xff";
        let masked = mask_literals(text);
        let toks: Vec<&str> = ident_tokens(&masked, 0, text.len())
            .iter()
            .map(|&(s, e)| &text[s..e])
            .collect();
        assert_eq!(toks, vec!["pixel"]);
    }

    #[test]
    fn lvalue_parse_handles_dots_and_indices() {
        let text = "lum[x][y] += v";
        let masked = mask_literals(text);
        let (lv, after) = parse_lvalue(&masked, text, 0, text.len()).unwrap();
        assert_eq!(lv.text, "lum[x][y]");
        assert_eq!(lv.base(), "lum");
        assert_eq!(lv.indices, vec!["x", "y"]);
        assert!(lv.indices_mention("x"));
        assert!(!lv.indices_mention("v"));
        assert_eq!(text[after..].trim_start(), "+= v");

        let text2 = "this.total = 1";
        let masked2 = mask_literals(text2);
        let (lv2, _) = parse_lvalue(&masked2, text2, 0, text2.len()).unwrap();
        assert_eq!(lv2.base(), "total");
    }

    #[test]
    fn backward_lvalue_finds_base() {
        for (text, expect) in [
            ("a.b[i] ", vec!["a", "b"]),
            ("y.z ", vec!["y", "z"]),
            ("pixel ", vec!["pixel"]),
            ("m[i][j] ", vec!["m"]),
        ] {
            let masked = mask_literals(text);
            let segs = lvalue_segments_before(&masked, text, text.len()).unwrap();
            assert_eq!(segs, expect, "text: {text}");
        }
    }

    #[test]
    fn line_index_is_one_based() {
        let idx = LineIndex::new("ab\ncd\nef");
        assert_eq!(idx.line_of(0), 1);
        assert_eq!(idx.line_of(3), 2);
        assert_eq!(idx.line_of(7), 3);
        assert_eq!(line_count("a\n\nb\n"), 4);
        assert_eq!(line_count(""), 0);
    }
}
