//! Corpus handling: discovering Java files, stripping comments without
//! moving line numbers, counting code lines, de-duplicating by content
//! hash and cloning repositories from a manifest.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::textscan::line_count;

/// One comment-stripped Java file. The stripped text has exactly as many
/// lines as the original; string and character literals are byte-identical
/// to the original.
#[derive(Debug, Clone)]
pub struct SourceUnit {
    pub project: String,
    pub relative_path: String,
    pub stripped_text: String,
    pub total_lines: usize,
    /// Non-comment, non-blank lines.
    pub loc: usize,
    /// SHA-256 of the original bytes.
    pub content_hash: [u8; 32],
    /// The original bytes were not valid UTF-8 and were decoded lossily.
    pub had_invalid_utf8: bool,
    /// An unterminated block comment ran to end of file.
    pub unterminated_comment: bool,
}

impl SourceUnit {
    pub fn from_bytes(project: &str, relative_path: &str, bytes: &[u8]) -> SourceUnit {
        let mut hasher = Sha256::new();
        hasher.update(bytes);
        let content_hash: [u8; 32] = hasher.finalize().into();
        let (text, had_invalid_utf8) = match std::str::from_utf8(bytes) {
            Ok(s) => (s.to_string(), false),
            Err(_) => (String::from_utf8_lossy(bytes).into_owned(), true),
        };
        let (stripped_text, unterminated_comment) = strip_comments_report(&text);
        let total_lines = line_count(&stripped_text);
        let loc = count_loc(&stripped_text);
        SourceUnit {
            project: project.to_string(),
            relative_path: relative_path.to_string(),
            stripped_text,
            total_lines,
            loc,
            content_hash,
            had_invalid_utf8,
            unterminated_comment,
        }
    }

    pub fn from_text(project: &str, relative_path: &str, text: &str) -> SourceUnit {
        SourceUnit::from_bytes(project, relative_path, text.as_bytes())
    }
}

/// Replaces `//`-to-end-of-line and `/*…*/` comments with spaces. Line
/// breaks inside block comments are kept, so the output has exactly the
/// same line structure as the input. Literal content is untouched.
pub fn strip_comments(text: &str) -> String {
    strip_comments_report(text).0
}

/// Like [`strip_comments`], also reporting whether an unterminated block
/// comment ran to end of input.
pub fn strip_comments_report(text: &str) -> (String, bool) {
    #[derive(PartialEq)]
    enum State {
        Code,
        LineComment,
        BlockComment,
        Str,
        Chr,
    }
    let bytes = text.as_bytes();
    let mut out = bytes.to_vec();
    let mut state = State::Code;
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match state {
            State::Code => match b {
                b'/' if i + 1 < bytes.len() && bytes[i + 1] == b'/' => {
                    out[i] = b' ';
                    out[i + 1] = b' ';
                    i += 1;
                    state = State::LineComment;
                }
                b'/' if i + 1 < bytes.len() && bytes[i + 1] == b'*' => {
                    out[i] = b' ';
                    out[i + 1] = b' ';
                    i += 1;
                    state = State::BlockComment;
                }
                b'"' => state = State::Str,
                b'\'' => state = State::Chr,
                _ => {}
            },
            State::LineComment => {
                if b == b'\n' || b == b'\r' {
                    state = State::Code;
                } else {
                    out[i] = b' ';
                }
            }
            State::BlockComment => {
                if b == b'*' && i + 1 < bytes.len() && bytes[i + 1] == b'/' {
                    out[i] = b' ';
                    out[i + 1] = b' ';
                    i += 1;
                    state = State::Code;
                } else if b != b'\n' && b != b'\r' {
                    out[i] = b' ';
                }
            }
            State::Str => match b {
                b'\\' if i + 1 < bytes.len() => i += 1,
                b'"' | b'\n' | b'\r' => state = State::Code,
                _ => {}
            },
            State::Chr => match b {
                b'\\' if i + 1 < bytes.len() => i += 1,
                b'\'' | b'\n' | b'\r' => state = State::Code,
                _ => {}
            },
        }
        i += 1;
    }
    let unterminated = state == State::BlockComment;
    // comment bytes were replaced one for one, so this is still UTF-8
    (
        String::from_utf8(out).expect("masking preserves UTF-8"),
        unterminated,
    )
}

/// Number of lines containing at least one non-whitespace character.
pub fn count_loc(stripped: &str) -> usize {
    stripped
        .lines()
        .filter(|l| l.chars().any(|c| !c.is_whitespace()))
        .count()
}

/// All `.java` files under `root`, sorted lexicographically by their
/// relative path. Unreadable subtrees are reported as warnings and
/// skipped; an unreadable root is an error.
pub fn discover(root: &Path) -> Result<(Vec<PathBuf>, Vec<String>), Error> {
    let mut files = Vec::new();
    let mut warnings = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    let mut first = true;
    while let Some(dir) = stack.pop() {
        let entries = match fs::read_dir(&dir) {
            Ok(e) => e,
            Err(e) if first => return Err(Error::io(dir, e)),
            Err(e) => {
                warnings.push(format!("skipping {}: {}", dir.display(), e));
                continue;
            }
        };
        first = false;
        for entry in entries {
            let entry = match entry {
                Ok(e) => e,
                Err(e) => {
                    warnings.push(format!("skipping entry in {}: {}", dir.display(), e));
                    continue;
                }
            };
            let path = entry.path();
            let ftype = match entry.file_type() {
                Ok(t) => t,
                Err(e) => {
                    warnings.push(format!("skipping {}: {}", path.display(), e));
                    continue;
                }
            };
            if ftype.is_dir() {
                stack.push(path);
            } else if ftype.is_file() && path.extension().is_some_and(|e| e == "java") {
                files.push(path);
            }
        }
    }
    files.sort();
    Ok((files, warnings))
}

/// Keeps the first unit (in the given, path-sorted order) per content
/// hash. Stable and idempotent.
pub fn dedup(units: Vec<SourceUnit>) -> Vec<SourceUnit> {
    let mut seen: BTreeSet<[u8; 32]> = BTreeSet::new();
    units
        .into_iter()
        .filter(|u| seen.insert(u.content_hash))
        .collect()
}

/// A list of repositories to clone: one `URL[<TAB>branch]` per line.
#[derive(Debug, Clone, Default)]
pub struct RepoManifest {
    pub entries: Vec<(String, Option<String>)>,
}

impl RepoManifest {
    /// Parses manifest text. `#` starts a comment line; blank lines are
    /// ignored. URLs must be non-empty and unique.
    pub fn parse(text: &str) -> Result<RepoManifest, Error> {
        let mut entries = Vec::new();
        let mut seen = BTreeSet::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (url, branch) = match line.split_once('\t') {
                Some((u, b)) => (
                    u.trim(),
                    Some(b.trim().to_string()).filter(|s| !s.is_empty()),
                ),
                None => (line, None),
            };
            if url.is_empty() {
                return Err(Error::Manifest(format!("line {}: empty URL", lineno + 1)));
            }
            if !seen.insert(url.to_string()) {
                return Err(Error::Manifest(format!(
                    "line {}: duplicate URL {}",
                    lineno + 1,
                    url
                )));
            }
            entries.push((url.to_string(), branch));
        }
        Ok(RepoManifest { entries })
    }

    pub fn load(path: &Path) -> Result<RepoManifest, Error> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RepoManifest::parse(&text)
    }
}

/// Last path segment of a repository URL, without a `.git` suffix.
pub fn project_name(url: &str) -> String {
    let trimmed = url.trim_end_matches('/');
    let last = trimmed.rsplit(['/', ':']).next().unwrap_or(trimmed);
    last.strip_suffix(".git").unwrap_or(last).to_string()
}

/// Shallow-clones every manifest entry into `dest/<project>`. Failures
/// are reported per entry and never abort the batch; the directories of
/// successful clones are returned in manifest order.
pub fn fetch(manifest: &RepoManifest, dest: &Path) -> (Vec<PathBuf>, Vec<Error>) {
    let mut cloned = Vec::new();
    let mut failures = Vec::new();
    for (url, branch) in &manifest.entries {
        let name = project_name(url);
        let target = dest.join(&name);
        let mut cmd = Command::new("git");
        cmd.arg("clone").arg("--depth").arg("1");
        if let Some(b) = branch {
            cmd.arg("--branch").arg(b);
        }
        cmd.arg(url).arg(&target);
        match cmd.output() {
            Ok(out) if out.status.success() => cloned.push(target),
            Ok(out) => failures.push(Error::Clone {
                url: url.clone(),
                reason: String::from_utf8_lossy(&out.stderr)
                    .lines()
                    .last()
                    .unwrap_or("git exited with failure")
                    .to_string(),
            }),
            Err(e) => failures.push(Error::Clone {
                url: url.clone(),
                reason: e.to_string(),
            }),
        }
    }
    (cloned, failures)
}
