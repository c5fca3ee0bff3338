//! `formula-miner`: scan Java corpora for sum/product formula code,
//! reconstruct the formulas, report densities, and evaluate against an
//! annotated oracle.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use formula_miner_core::corpus::{RepoManifest, fetch};
use formula_miner_core::evaluation::{self, OracleAnnotation, parse_judgments, parse_oracle};
use formula_miner_core::patterns::{PatternKind, catalog};
use formula_miner_core::report::{emit_csv, emit_summary};
use formula_miner_core::scan::{ScanConfig, scan};
use formula_miner_core::{Error, Fraction};

#[derive(Parser)]
#[command(
    name = "formula-miner",
    version,
    about = "Detects sum/product formula code in Java sources and reconstructs the formulas"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clone the repositories listed in a manifest into a directory
    Fetch {
        /// Manifest file: one `URL[<TAB>branch]` per line, `#` comments
        manifest: PathBuf,
        /// Destination directory; each repository lands in `dest/<name>`
        dest: PathBuf,
    },
    /// Scan project roots (one project per root) for sum/product formula code
    Scan(ScanArgs),
    /// Compute recall (and precision, given judgments) on an annotated oracle
    Eval {
        /// Corpus root holding the original, untagged sources
        root: PathBuf,
        /// Manifest listing annotated files, relative to its own directory;
        /// the same relative path must exist under the corpus root
        oracle_manifest: PathBuf,
        /// Judgment sidecar: CSV of `match-id,judgment`
        /// (wrong | correct | complete)
        #[arg(long)]
        judgments: Option<PathBuf>,
    },
    /// Print the pattern catalog with shapes, slots and constraints
    Patterns,
}

#[derive(Args)]
struct ScanArgs {
    /// Project roots to scan
    #[arg(required = true)]
    roots: Vec<PathBuf>,
    /// Write per-match CSV here
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the summary here instead of stdout
    #[arg(long)]
    report: Option<PathBuf>,
    /// Recall used for density estimates, in (0, 1]
    #[arg(long, default_value = "0.3091", value_parser = parse_recall)]
    recall: Fraction,
    /// Worker threads
    #[arg(long, env = "FORMULA_MINER_WORKERS")]
    workers: Option<usize>,
    /// Drop files with duplicate content hashes before scanning
    #[arg(long)]
    dedup: bool,
    /// Enable the experimental vector patterns
    #[arg(long)]
    vectors: bool,
    /// Comma-separated pattern kinds to run (default: the full catalog)
    #[arg(long)]
    patterns: Option<String>,
    /// Print constraint rejections to stderr
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

fn parse_recall(s: &str) -> Result<Fraction, String> {
    let f = Fraction::parse_decimal(s).ok_or_else(|| format!("not a decimal: {s}"))?;
    if f.num == 0 || f.num > f.den {
        return Err(format!("recall must be in (0, 1], got {s}"));
    }
    Ok(f)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fetch { manifest, dest } => cmd_fetch(&manifest, &dest),
        Command::Scan(args) => cmd_scan(args),
        Command::Eval {
            root,
            oracle_manifest,
            judgments,
        } => cmd_eval(&root, &oracle_manifest, judgments.as_deref()),
        Command::Patterns => {
            print!("{}", catalog());
            Ok(ExitCode::SUCCESS)
        }
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })
}

fn cmd_fetch(manifest_path: &Path, dest: &Path) -> Result<ExitCode, Error> {
    let manifest = RepoManifest::load(manifest_path)?;
    fs::create_dir_all(dest).map_err(|e| Error::io(dest, e))?;
    let (cloned, failures) = fetch(&manifest, dest);
    for dir in &cloned {
        println!("{}", dir.display());
    }
    for failure in &failures {
        eprintln!("warning: {failure}");
    }
    if cloned.is_empty() {
        eprintln!("no repositories cloned");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn enabled_kinds(args: &ScanArgs) -> Result<BTreeSet<PatternKind>, Error> {
    let mut enabled: BTreeSet<PatternKind> = match &args.patterns {
        Some(list) => {
            let mut set = BTreeSet::new();
            for name in list.split(',').filter(|s| !s.trim().is_empty()) {
                let kind: PatternKind = name.parse().map_err(Error::Manifest)?;
                set.insert(kind);
            }
            // the loop counters always run; they feed the loop fractions
            set.insert(PatternKind::LoopSimple);
            set.insert(PatternKind::LoopNested);
            set
        }
        None => PatternKind::default_set(),
    };
    if args.vectors {
        enabled.insert(PatternKind::VecAdd);
        enabled.insert(PatternKind::VecDot);
    }
    Ok(enabled)
}

fn cmd_scan(args: ScanArgs) -> Result<ExitCode, Error> {
    let mut config = ScanConfig::new(args.roots.clone());
    config.enabled = enabled_kinds(&args)?;
    config.recall = args.recall;
    if let Some(workers) = args.workers {
        config.workers = workers.max(1);
    }
    config.dedup = args.dedup;
    config.verbosity = args.verbose;

    let output = scan(&config)?;

    for warning in &output.warnings {
        eprintln!("warning: {warning}");
    }
    if args.verbose > 0 {
        for rejection in &output.rejections {
            let failed: Vec<String> = rejection
                .failed
                .iter()
                .map(|v| {
                    let offenders: Vec<&str> = v.offending.iter().map(String::as_str).collect();
                    match &v.note {
                        Some(note) => format!("{} ({}; {note})", v.id, offenders.join(", ")),
                        None => format!("{} ({})", v.id, offenders.join(", ")),
                    }
                })
                .collect();
            eprintln!("rejected {}: {}", rejection.id, failed.join("; "));
        }
    }

    if let Some(csv_path) = &args.csv {
        let file = fs::File::create(csv_path).map_err(|e| Error::io(csv_path, e))?;
        let mut writer = std::io::BufWriter::new(file);
        emit_csv(&output.records, &mut writer)?;
        writer.flush().map_err(Error::Write)?;
    }

    match &args.report {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
            let mut writer = std::io::BufWriter::new(file);
            emit_summary(
                &output.totals,
                &output.density,
                &output.fractions,
                &mut writer,
            )?;
            writer.flush().map_err(Error::Write)?;
        }
        None => {
            let stdout = std::io::stdout();
            emit_summary(
                &output.totals,
                &output.density,
                &output.fractions,
                stdout.lock(),
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn load_oracle(manifest_path: &Path, corpus_root: &Path) -> Result<Vec<OracleAnnotation>, Error> {
    let text = fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let mut annotations = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let annotated_path = base.join(line);
        let annotated =
            fs::read_to_string(&annotated_path).map_err(|e| Error::io(&annotated_path, e))?;
        let parsed = parse_oracle(line, &annotated)?;
        // the cleaned text should be exactly the corpus copy, or the
        // annotation line numbers will not line up with detections
        match fs::read_to_string(corpus_root.join(line)) {
            Ok(original) if original != parsed.clean_text => {
                eprintln!(
                    "warning: {line} differs between oracle and corpus; line numbers may disagree"
                );
            }
            Ok(_) => {}
            Err(e) => eprintln!("warning: no corpus copy of {line}: {e}"),
        }
        annotations.extend(parsed.annotations);
    }
    Ok(annotations)
}

fn cmd_eval(
    root: &Path,
    oracle_manifest: &Path,
    judgments: Option<&Path>,
) -> Result<ExitCode, Error> {
    let annotations = load_oracle(oracle_manifest, root)?;
    let config = ScanConfig::new(vec![root.to_path_buf()]);
    let output = scan(&config)?;
    let detections: Vec<_> = output.records.iter().map(|r| r.m.clone()).collect();

    let part = evaluation::recall(&detections, &annotations);
    println!("oracle_fragments={}", part.oracle_fragments);
    println!("detections={}", part.detections);
    println!("hits={}", part.hits);
    match &part.recall {
        Some(f) => println!(
            "recall = {}/{} = {}%",
            part.hits,
            part.oracle_fragments,
            f.display_pct_round()
        ),
        None => println!("recall = {}/0 = n/a", part.hits),
    }

    if let Some(judgment_path) = judgments {
        let text = fs::read_to_string(judgment_path).map_err(|e| Error::io(judgment_path, e))?;
        let judgments = parse_judgments(&text)?;
        let p = evaluation::precision(&judgments, &detections)?;
        let line = |name: &str, num: u64, f: &Option<Fraction>| match f {
            Some(f) => println!(
                "{name} = {num}/{} = {}%",
                p.detections,
                f.display_pct_round()
            ),
            None => println!("{name} = {num}/0 = n/a"),
        };
        line(
            "precision_any",
            p.wrong + p.correct + p.complete,
            &p.precision_any,
        );
        line(
            "precision_correct",
            p.correct + p.complete,
            &p.precision_correct,
        );
        line("precision_complete", p.complete, &p.precision_complete);
    }
    Ok(ExitCode::SUCCESS)
}
