//! Static analysis library for finding sum/product formula code in Java
//! sources.
//!
//! The pipeline: Java files are discovered and comment-stripped
//! ([`corpus`]), scanned for a catalog of loop-shaped syntactic patterns
//! ([`patterns`]), filtered through variable-role constraints
//! ([`constraints`]), and every surviving match is turned into a
//! mathematical formula rendered as text and presentation MathML
//! ([`formula`]). Corpus-level density metrics and recall-corrected
//! estimates live in [`metrics`], the recall/precision harness for
//! annotated oracle corpora in [`evaluation`], and CSV/summary output in
//! [`report`]. [`scan`] ties it all together as a deterministic parallel
//! scan.

pub mod constraints;
pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod formula;
pub mod metrics;
pub mod patterns;
pub mod report;
pub mod scan;
pub mod textscan;

pub use constraints::{ConstraintReport, Verdict};
pub use corpus::{RepoManifest, SourceUnit};
pub use error::Error;
pub use evaluation::{EvalMetrics, Judgment, OracleAnnotation, OracleTag};
pub use formula::{Formula, FormulaRecord};
pub use metrics::{DensityReport, Fraction, LoopFractions, ScanTotals};
pub use patterns::{AccuOp, CapturedRoles, PatternKind, PatternMatch, RelOp};
pub use scan::{ScanConfig, ScanOutput};
