//! Formula reconstruction and rendering.
//!
//! Accepted matches instantiate a small formula tree whose leaves are
//! either integer literals or opaque source expressions. The tree renders
//! to a deterministic linear text syntax and to presentation MathML, with
//! source-expression leaves embedded as `mtext` (the mixed maths/code
//! form).

use crate::patterns::{AccuOp, EachLevel, ForLevel, PatternKind, PatternMatch, RelOp};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binder {
    /// index = lo .. hi
    Range {
        var: String,
        lo: Box<Node>,
        hi: Box<Node>,
    },
    /// var ∈ collection
    In { var: String, collection: String },
    /// Non-canonical bound: var starts at init and runs while the
    /// recorded condition holds.
    Guard {
        var: String,
        init: Box<Node>,
        rel: RelOp,
        limit: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    /// Opaque source expression.
    Raw(String),
    Int(i64),
    /// A plain identifier (binder reference or accumulation target).
    Var(String),
    /// The target's value before the loop, rendered with subscript 0.
    Initial(String),
    /// child - 1, for upper bounds.
    Dec(Box<Node>),
    Assign {
        lhs: Box<Node>,
        rhs: Box<Node>,
    },
    Bin {
        op: AccuOp,
        lhs: Box<Node>,
        rhs: Box<Node>,
    },
    /// 1 / child.
    Recip(Box<Node>),
    Sum {
        binder: Binder,
        body: Box<Node>,
    },
    Product {
        binder: Binder,
        body: Box<Node>,
    },
    /// Indexed family: (body) subscripted by the binder.
    Family {
        binder: Binder,
        body: Box<Node>,
    },
    /// Scalar product of two recognized vector sources.
    Inner {
        target: String,
        sources: (String, String),
        components: [[String; 2]; 2],
    },
    /// Componentwise vector addition of two recognized sources.
    VecSum {
        target_source: String,
        sources: (String, String),
        targets: [String; 2],
        components: [[String; 2]; 2],
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    pub root: Node,
    /// Set when a non-canonical loop bound (`>`, `>=`, `!=`) forced a
    /// guarded or adjusted binder.
    pub approximate: bool,
}

/// An accepted match with its reconstructed formula and both renderings.
#[derive(Debug, Clone)]
pub struct FormulaRecord {
    pub m: PatternMatch,
    pub formula: Formula,
    pub text: String,
    pub mathml: String,
}

impl FormulaRecord {
    pub fn new(m: PatternMatch) -> FormulaRecord {
        let formula = reconstruct(&m);
        let text = render_text(&formula);
        let mathml = render_mathml(&formula);
        FormulaRecord {
            m,
            formula,
            text,
            mathml,
        }
    }
}

fn raw_or_int(s: &str) -> Node {
    match s.trim().parse::<i64>() {
        Ok(v) => Node::Int(v),
        Err(_) => Node::Raw(s.trim().to_string()),
    }
}

/// Upper bound of a counted loop: `limit - 1` for `<` (folded when the
/// limit is a literal), `limit` for `<=`. `!=` behaves like `<` but marks
/// the formula approximate; `>`/`>=` produce a guarded binder.
fn range_binder(level: &ForLevel) -> (Binder, bool) {
    let var = level.index.clone();
    let lo = Box::new(raw_or_int(&level.init));
    match level.rel {
        RelOp::Lt | RelOp::Ne => {
            let hi = match raw_or_int(&level.limit) {
                Node::Int(v) => Node::Int(v - 1),
                other => Node::Dec(Box::new(other)),
            };
            (
                Binder::Range {
                    var,
                    lo,
                    hi: Box::new(hi),
                },
                level.rel == RelOp::Ne,
            )
        }
        RelOp::Le => (
            Binder::Range {
                var,
                lo,
                hi: Box::new(raw_or_int(&level.limit)),
            },
            false,
        ),
        RelOp::Gt | RelOp::Ge => (
            Binder::Guard {
                var,
                init: lo,
                rel: level.rel,
                limit: level.limit.clone(),
            },
            true,
        ),
    }
}

fn in_binder(level: &EachLevel) -> Binder {
    Binder::In {
        var: level.binder.clone(),
        collection: level.collection.clone(),
    }
}

/// Σ/Π chain over the given binders. Addition and subtraction wrap the
/// term in sums; multiplication and division in products, division with
/// a reciprocal body.
fn reduction(op: AccuOp, binders: Vec<Binder>, term: &str) -> Node {
    let body = match op {
        AccuOp::Div => Node::Recip(Box::new(Node::Raw(term.to_string()))),
        _ => Node::Raw(term.to_string()),
    };
    let sum = matches!(op, AccuOp::Add | AccuOp::Sub);
    binders.into_iter().rev().fold(body, |acc, binder| {
        if sum {
            Node::Sum {
                binder,
                body: Box::new(acc),
            }
        } else {
            Node::Product {
                binder,
                body: Box::new(acc),
            }
        }
    })
}

/// The outer operator of the templates: the accumulation operator itself
/// for `+`/`-`, multiplication for `*` and `/`.
fn outer_op(op: AccuOp) -> AccuOp {
    match op {
        AccuOp::Add => AccuOp::Add,
        AccuOp::Sub => AccuOp::Sub,
        AccuOp::Mul | AccuOp::Div => AccuOp::Mul,
    }
}

/// Single-application body for the elementwise kinds: `term` for `+`,
/// `-`, `*`; `1/term` for `/`.
fn plain_body(op: AccuOp, term: &str) -> Node {
    match op {
        AccuOp::Div => Node::Recip(Box::new(Node::Raw(term.to_string()))),
        _ => Node::Raw(term.to_string()),
    }
}

fn accu_equation(accu_text: &str, op: AccuOp, rhs: Node) -> Node {
    Node::Assign {
        lhs: Box::new(Node::Var(accu_text.to_string())),
        rhs: Box::new(Node::Bin {
            op: outer_op(op),
            lhs: Box::new(Node::Initial(accu_text.to_string())),
            rhs: Box::new(rhs),
        }),
    }
}

/// Bare-entry form of the nested-foreach templates: `entry op Σ …`.
fn entry_expression(entry: &str, op: AccuOp, rhs: Node) -> Node {
    Node::Bin {
        op: outer_op(op),
        lhs: Box::new(Node::Var(entry.to_string())),
        rhs: Box::new(rhs),
    }
}

/// Instantiates the formula template of an accepted match.
pub fn reconstruct(m: &PatternMatch) -> Formula {
    let roles = &m.roles;
    let mut approximate = false;
    let mut range = |level: &ForLevel| {
        let (b, approx) = range_binder(level);
        approximate |= approx;
        b
    };
    let accu = || {
        roles
            .accu
            .as_ref()
            .expect("accepted SP match has an accumulator")
    };
    let op = || roles.op.expect("accepted SP match has an operator");
    let term = || roles.term.as_deref().expect("accepted SP match has a term");

    let root = match m.kind {
        PatternKind::Fis => {
            let b = range(&roles.for_levels[0]);
            accu_equation(&accu().text, op(), reduction(op(), vec![b], term()))
        }
        PatternKind::Fes => {
            let b = in_binder(&roles.each_levels[0]);
            accu_equation(&accu().text, op(), reduction(op(), vec![b], term()))
        }
        PatternKind::Fia => {
            let b = range(&roles.for_levels[0]);
            Node::Family {
                binder: b,
                body: Box::new(accu_equation(&accu().text, op(), plain_body(op(), term()))),
            }
        }
        PatternKind::Fec => {
            let b = in_binder(&roles.each_levels[0]);
            Node::Family {
                binder: b,
                body: Box::new(entry_expression(
                    &roles.each_levels[0].binder,
                    op(),
                    plain_body(op(), term()),
                )),
            }
        }
        PatternKind::Nfiss => {
            let bo = range(&roles.for_levels[0]);
            let bi = range(&roles.for_levels[1]);
            accu_equation(&accu().text, op(), reduction(op(), vec![bo, bi], term()))
        }
        PatternKind::Nfess => {
            let bo = in_binder(&roles.each_levels[0]);
            let bi = in_binder(&roles.each_levels[1]);
            accu_equation(&accu().text, op(), reduction(op(), vec![bo, bi], term()))
        }
        PatternKind::Nfias => {
            let bo = range(&roles.for_levels[0]);
            let bi = range(&roles.for_levels[1]);
            Node::Family {
                binder: bo,
                body: Box::new(accu_equation(
                    &accu().text,
                    op(),
                    reduction(op(), vec![bi], term()),
                )),
            }
        }
        PatternKind::Nfecs => {
            let bo = in_binder(&roles.each_levels[0]);
            let bi = in_binder(&roles.each_levels[1]);
            Node::Family {
                binder: bo,
                body: Box::new(entry_expression(
                    &roles.each_levels[0].binder,
                    op(),
                    reduction(op(), vec![bi], term()),
                )),
            }
        }
        PatternKind::Nfiaa => {
            let bo = range(&roles.for_levels[0]);
            let bi = range(&roles.for_levels[1]);
            Node::Family {
                binder: bo,
                body: Box::new(Node::Family {
                    binder: bi,
                    body: Box::new(accu_equation(&accu().text, op(), plain_body(op(), term()))),
                }),
            }
        }
        PatternKind::Nfecc => {
            let bo = in_binder(&roles.each_levels[0]);
            let bi = in_binder(&roles.each_levels[1]);
            Node::Family {
                binder: bo,
                body: Box::new(Node::Family {
                    binder: bi,
                    body: Box::new(entry_expression(
                        &roles.each_levels[1].binder,
                        op(),
                        plain_body(op(), term()),
                    )),
                }),
            }
        }
        PatternKind::VecDot => {
            let slots = roles.vector.as_ref().expect("vector slots");
            let s1 = crate::constraints::source(&slots.operands[0][0])
                .expect("accepted vector match has resolvable sources");
            let s2 = crate::constraints::source(&slots.operands[1][0])
                .expect("accepted vector match has resolvable sources");
            Node::Inner {
                target: slots.targets[0].clone(),
                sources: (s1, s2),
                components: slots.operands.clone(),
            }
        }
        PatternKind::VecAdd => {
            let slots = roles.vector.as_ref().expect("vector slots");
            let s1 = crate::constraints::source(&slots.operands[0][0])
                .expect("accepted vector match has resolvable sources");
            let s2 = crate::constraints::source(&slots.operands[1][0])
                .expect("accepted vector match has resolvable sources");
            let ts = crate::constraints::source(&slots.targets[0])
                .expect("accepted vector match has resolvable targets");
            Node::VecSum {
                target_source: ts,
                sources: (s1, s2),
                targets: [slots.targets[0].clone(), slots.targets[1].clone()],
                components: slots.operands.clone(),
            }
        }
        PatternKind::LoopSimple | PatternKind::LoopNested => {
            unreachable!("loop counters carry no formula")
        }
    };
    Formula { root, approximate }
}

// ---------------------------------------------------------------------------
// text rendering

fn text_binder(b: &Binder) -> String {
    match b {
        Binder::Range { var, lo, hi } => format!("{var}={}..{}", text(lo), text(hi)),
        Binder::In { var, collection } => format!("{var} in {collection}"),
        Binder::Guard {
            var,
            init,
            rel,
            limit,
        } => format!("{var}={} while {var}{}{limit}", text(init), rel.as_str()),
    }
}

/// Operand position: opaque and compound expressions are parenthesized.
fn operand(n: &Node) -> String {
    match n {
        Node::Raw(s) => format!("({s})"),
        Node::Bin { .. } => format!("({})", text(n)),
        _ => text(n),
    }
}

fn text(n: &Node) -> String {
    match n {
        Node::Raw(s) => s.clone(),
        Node::Int(v) => v.to_string(),
        Node::Var(s) => s.clone(),
        Node::Initial(s) => format!("{s}_0"),
        Node::Dec(child) => format!("{}-1", text(child)),
        Node::Assign { lhs, rhs } => format!("{} = {}", text(lhs), text(rhs)),
        Node::Bin { op, lhs, rhs } => {
            format!("{} {} {}", operand(lhs), op.as_char(), operand(rhs))
        }
        Node::Recip(child) => format!("1/({})", text(child)),
        Node::Sum { binder, body } => format!("sum({}, {})", text_binder(binder), text(body)),
        Node::Product { binder, body } => format!("prod({}, {})", text_binder(binder), text(body)),
        Node::Family { binder, body } => {
            format!("family({}, {})", text_binder(binder), text(body))
        }
        Node::Inner {
            target, sources, ..
        } => format!("{target} = inner({}, {})", sources.0, sources.1),
        Node::VecSum {
            target_source,
            sources,
            ..
        } => format!("{target_source} = {} + {}", sources.0, sources.1),
    }
}

/// Deterministic linear rendering, e.g. `s = s_0 + sum(i=0..n-1, a[i])`.
pub fn render_text(f: &Formula) -> String {
    let body = text(&f.root);
    if f.approximate {
        format!("{body}  [non-canonical bound]")
    } else {
        body
    }
}

// ---------------------------------------------------------------------------
// MathML rendering

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

fn rel_entity(rel: RelOp) -> &'static str {
    match rel {
        RelOp::Lt => "&lt;",
        RelOp::Le => "&#x2264;",
        RelOp::Gt => "&gt;",
        RelOp::Ge => "&#x2265;",
        RelOp::Ne => "&#x2260;",
    }
}

fn op_entity(op: AccuOp) -> &'static str {
    match op {
        AccuOp::Add => "<mo>+</mo>",
        AccuOp::Sub => "<mo>-</mo>",
        AccuOp::Mul => "<mo>&#x22C5;</mo>",
        AccuOp::Div => "<mo>/</mo>",
    }
}

fn mml_reduction(symbol: &str, binder: &Binder, body: &Node) -> String {
    let (lower, upper) = match binder {
        Binder::Range { var, lo, hi } => (
            format!("<mrow><mi>{}</mi><mo>=</mo>{}</mrow>", esc(var), mml(lo)),
            mml(hi),
        ),
        Binder::In { var, collection } => (
            format!(
                "<mrow><mi>{}</mi><mo>&#x2208;</mo><mtext>{}</mtext></mrow>",
                esc(var),
                esc(collection)
            ),
            String::new(),
        ),
        Binder::Guard {
            var,
            init,
            rel,
            limit,
        } => (
            format!("<mrow><mi>{}</mi><mo>=</mo>{}</mrow>", esc(var), mml(init)),
            format!(
                "<mrow><mi>{}</mi><mo>{}</mo><mtext>{}</mtext></mrow>",
                esc(var),
                rel_entity(*rel),
                esc(limit)
            ),
        ),
    };
    if upper.is_empty() {
        format!(
            "<mrow><munder><mo>{symbol}</mo>{lower}</munder>{}</mrow>",
            mml(body)
        )
    } else {
        format!(
            "<mrow><munderover><mo>{symbol}</mo>{lower}{upper}</munderover>{}</mrow>",
            mml(body)
        )
    }
}

fn mml_binder_script(b: &Binder) -> String {
    match b {
        Binder::Range { var, lo, hi } => format!(
            "<mrow><mi>{}</mi><mo>=</mo>{}<mo>&#x2026;</mo>{}</mrow>",
            esc(var),
            mml(lo),
            mml(hi)
        ),
        Binder::In { var, collection } => format!(
            "<mrow><mi>{}</mi><mo>&#x2208;</mo><mtext>{}</mtext></mrow>",
            esc(var),
            esc(collection)
        ),
        Binder::Guard {
            var,
            init,
            rel,
            limit,
        } => format!(
            "<mrow><mi>{}</mi><mo>=</mo>{}<mo>,</mo><mi>{}</mi><mo>{}</mo><mtext>{}</mtext></mrow>",
            esc(var),
            mml(init),
            esc(var),
            rel_entity(*rel),
            esc(limit)
        ),
    }
}

fn mml_column(a: &str, b: &str) -> String {
    format!(
        "<mrow><mo>(</mo><mtable><mtr><mtd><mtext>{}</mtext></mtd></mtr><mtr><mtd><mtext>{}</mtext></mtd></mtr></mtable><mo>)</mo></mrow>",
        esc(a),
        esc(b)
    )
}

fn mml(n: &Node) -> String {
    match n {
        Node::Raw(s) => format!("<mtext>{}</mtext>", esc(s)),
        Node::Int(v) => {
            if *v < 0 {
                format!("<mrow><mo>-</mo><mn>{}</mn></mrow>", -v)
            } else {
                format!("<mn>{v}</mn>")
            }
        }
        Node::Var(s) => format!("<mi>{}</mi>", esc(s)),
        Node::Initial(s) => format!("<msub><mtext>{}</mtext><mn>0</mn></msub>", esc(s)),
        Node::Dec(child) => format!("<mrow>{}<mo>-</mo><mn>1</mn></mrow>", mml(child)),
        Node::Assign { lhs, rhs } => {
            format!("<mrow>{}<mo>=</mo>{}</mrow>", mml(lhs), mml(rhs))
        }
        Node::Bin { op, lhs, rhs } => {
            format!("<mrow>{}{}{}</mrow>", mml(lhs), op_entity(*op), mml(rhs))
        }
        Node::Recip(child) => format!("<mfrac><mn>1</mn>{}</mfrac>", mml(child)),
        Node::Sum { binder, body } => mml_reduction("&#x2211;", binder, body),
        Node::Product { binder, body } => mml_reduction("&#x220F;", binder, body),
        Node::Family { binder, body } => format!(
            "<msub><mrow><mo>(</mo>{}<mo>)</mo></mrow>{}</msub>",
            mml(body),
            mml_binder_script(binder)
        ),
        Node::Inner {
            target, components, ..
        } => format!(
            "<mrow><mtext>{}</mtext><mo>=</mo><mrow><mo>&#x27E8;</mo>{}<mo>,</mo>{}<mo>&#x27E9;</mo></mrow></mrow>",
            esc(target),
            mml_column(&components[0][0], &components[0][1]),
            mml_column(&components[1][0], &components[1][1]),
        ),
        Node::VecSum {
            targets,
            components,
            ..
        } => format!(
            "<mrow>{}<mo>=</mo>{}<mo>+</mo>{}</mrow>",
            mml_column(&targets[0], &targets[1]),
            mml_column(&components[0][0], &components[0][1]),
            mml_column(&components[1][0], &components[1][1]),
        ),
    }
}

/// Presentation MathML on a single line with one `math` root.
pub fn render_mathml(f: &Formula) -> String {
    format!(
        "<math xmlns=\"http://www.w3.org/1998/Math/MathML\">{}</math>",
        mml(&f.root)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::SourceUnit;
    use crate::patterns::match_kind;

    fn single_match(src: &str, kind: PatternKind) -> PatternMatch {
        let unit = SourceUnit::from_text("p", "T.java", src);
        let ms = match_kind(kind, &unit);
        assert_eq!(ms.len(), 1, "expected one {kind}");
        ms.into_iter().next().unwrap()
    }

    #[test]
    fn sum_template_instantiation() {
        let m = single_match(
            "class T { void f(int[] a, int n) { int s = 0;\nfor (int i = 0; i < n; i++) { s += a[i]; }\n} }",
            PatternKind::Fis,
        );
        let f = reconstruct(&m);
        assert!(!f.approximate);
        assert_eq!(render_text(&f), "s = s_0 + sum(i=0..n-1, a[i])");
    }

    #[test]
    fn division_becomes_reciprocal_product() {
        let m = single_match(
            "class T { void f(int[] a, int n) { double s = 1;\nfor (int i = 0; i < n; i++) { s /= a[i]; }\n} }",
            PatternKind::Fis,
        );
        assert_eq!(
            render_text(&reconstruct(&m)),
            "s = s_0 * prod(i=0..n-1, 1/(a[i]))"
        );
    }

    #[test]
    fn subtraction_renders_single_leading_sign() {
        let m = single_match(
            "class T { void f(int[] a, int n) { int s = 0;\nfor (int i = 0; i < n; i++) { s -= a[i]; }\n} }",
            PatternKind::Fis,
        );
        assert_eq!(
            render_text(&reconstruct(&m)),
            "s = s_0 - sum(i=0..n-1, a[i])"
        );
    }

    #[test]
    fn literal_bounds_are_folded() {
        let m = single_match(
            "class T { void f(int[] a) { int s = 0;\nfor (int i = 0; i < 10; i++) { s += a[i]; }\n} }",
            PatternKind::Fis,
        );
        assert_eq!(render_text(&reconstruct(&m)), "s = s_0 + sum(i=0..9, a[i])");

        let le = single_match(
            "class T { void f(int[] a) { int s = 0;\nfor (int i = 0; i <= 10; i++) { s += a[i]; }\n} }",
            PatternKind::Fis,
        );
        assert_eq!(
            render_text(&reconstruct(&le)),
            "s = s_0 + sum(i=0..10, a[i])"
        );
    }

    #[test]
    fn non_canonical_bounds_are_flagged() {
        let m = single_match(
            "class T { void f(int[] a, int n) { int s = 0;\nfor (int i = n; i > 0; i++) { s += a[i]; }\n} }",
            PatternKind::Fis,
        );
        let f = reconstruct(&m);
        assert!(f.approximate);
        let t = render_text(&f);
        assert!(t.contains("while i>0"), "{t}");
        assert!(t.contains("[non-canonical bound]"));

        let ne = single_match(
            "class T { void f(int[] a, int n) { int s = 0;\nfor (int i = 0; i != n; i++) { s += a[i]; }\n} }",
            PatternKind::Fis,
        );
        let f = reconstruct(&ne);
        assert!(f.approximate);
        assert!(render_text(&f).starts_with("s = s_0 + sum(i=0..n-1, a[i])"));
    }

    #[test]
    fn nested_foreach_keeps_bare_entry_form() {
        let m = single_match(
            "class T { void f(double[] ws, double[] xs) {\nfor (double w : ws) { for (double x : xs) { w *= x; } }\n} }",
            PatternKind::Nfecs,
        );
        assert_eq!(
            render_text(&reconstruct(&m)),
            "family(w in ws, w * prod(x in xs, x))"
        );
    }

    #[test]
    fn elementwise_family_keeps_initial_value() {
        let m = single_match(
            "class T { void f(int[] out, int[] in, int n, int k) {\nfor (int i = 0; i < n; i++) { out[i] += in[i] * k; }\n} }",
            PatternKind::Fia,
        );
        assert_eq!(
            render_text(&reconstruct(&m)),
            "family(i=0..n-1, out[i] = out[i]_0 + (in[i] * k))"
        );
    }

    #[test]
    fn double_sum_for_nested_for() {
        let m = single_match(
            "class T { void f(int[][] mx, int r, int c) { int s = 0;\nfor (int i = 0; i < r; i++) { for (int j = 0; j < c; j++) { s += mx[i][j]; } }\n} }",
            PatternKind::Nfiss,
        );
        assert_eq!(
            render_text(&reconstruct(&m)),
            "s = s_0 + sum(i=0..r-1, sum(j=0..c-1, mx[i][j]))"
        );
    }

    #[test]
    fn mathml_has_single_root_and_entities() {
        let m = single_match(
            "class T { void f(int[] a, int n) { int s = 0;\nfor (int i = 0; i < n; i++) { s += a[i]; }\n} }",
            PatternKind::Fis,
        );
        let f = reconstruct(&m);
        let xml = render_mathml(&f);
        assert!(xml.starts_with("<math "));
        assert!(xml.contains("&#x2211;"));
        assert!(xml.contains("<munderover>"));
        assert!(xml.contains("<mtext>a[i]</mtext>"));
        let doc = roxmltree::Document::parse(&xml).expect("well-formed");
        assert_eq!(doc.root_element().tag_name().name(), "math");
        // deterministic re-render
        assert_eq!(render_mathml(&f), xml);
        assert_eq!(render_text(&f), render_text(&f));
    }

    #[test]
    fn vector_dot_renders_angle_fenced_columns() {
        let m = single_match(
            "class T { void f(V a, V b) { double d;\nd = a.x * b.x + a.y * b.y;\n} }",
            PatternKind::VecDot,
        );
        let f = reconstruct(&m);
        assert_eq!(render_text(&f), "d = inner(a, b)");
        let xml = render_mathml(&f);
        assert!(xml.contains("&#x27E8;"));
        assert!(xml.contains("<mtable>"));
        roxmltree::Document::parse(&xml).expect("well-formed");
    }

    #[test]
    fn vector_add_renders_source_equation() {
        let m = single_match(
            "class T { void f(V r, V p, V q) {\nr.x = p.x + q.x;\nr.y = p.y + q.y;\n} }",
            PatternKind::VecAdd,
        );
        let f = reconstruct(&m);
        assert_eq!(render_text(&f), "r = p + q");
        roxmltree::Document::parse(&render_mathml(&f)).expect("well-formed");
    }

    #[test]
    fn rendered_symbols_all_come_from_the_match() {
        let sources = [
            (
                "class T { void f(int[] a, int n) { int s = 0;\nfor (int i = 0; i < n; i++) { s += a[i]; }\n} }",
                PatternKind::Fis,
            ),
            (
                "class T { void f(double[] ws, double[] xs) {\nfor (double w : ws) { for (double x : xs) { w += x; } }\n} }",
                PatternKind::Nfecs,
            ),
            (
                "class T { void f(int[] out, int[] in2, int n, int k) {\nfor (int i = 0; i < n; i++) { out[i] *= in2[i] + k; }\n} }",
                PatternKind::Fia,
            ),
        ];
        let renderer_words = ["sum", "prod", "family", "in", "while", "inner"];
        for (src, kind) in sources {
            let m = single_match(src, kind);
            let text = render_text(&reconstruct(&m));
            let mut ident = String::new();
            let mut idents = Vec::new();
            for c in text.chars() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    ident.push(c);
                } else if !ident.is_empty() {
                    idents.push(std::mem::take(&mut ident));
                }
            }
            if !ident.is_empty() {
                idents.push(ident);
            }
            for id in idents {
                if renderer_words.contains(&id.as_str())
                    || id.chars().all(|c| c.is_ascii_digit())
                    || id.ends_with("_0")
                {
                    continue;
                }
                assert!(
                    m.snippet.contains(&id),
                    "symbol {id} in {text:?} does not come from the match"
                );
            }
        }
    }

    #[test]
    fn escaping_covers_xml_specials() {
        let m = single_match(
            "class T { void f(int[] a, int n, int b) { int s = 0;\nfor (int i = 0; i < n; i++) { s += a[i] << b & 3; }\n} }",
            PatternKind::Fis,
        );
        let f = reconstruct(&m);
        let xml = render_mathml(&f);
        assert!(xml.contains("&lt;&lt;"));
        assert!(xml.contains("&amp;"));
        roxmltree::Document::parse(&xml).expect("well-formed");
    }
}
