//! Coding-phase lint rules over the Solidity subset AST.
//!
//! Rules are syntactic and deliberately local; anything needing dataflow or
//! cross-contract reasoning stays a manual checklist item. Two escape
//! hatches keep the heuristic rules usable: per-rule enablement and severity
//! overrides in the config, and `// abcde:allow(RULE)` comments suppressing
//! a rule on the following line.

use crate::catalog;
use crate::config::{rule_enabled, LintConfig};
use crate::diag::{sort_by_source, DiagLocation, Diagnostic};
use crate::model::{ElementaryType, Mutability, TypeName, Visibility};
use crate::sol::ast::*;
use crate::span::SourceSpan;
use std::collections::BTreeSet;

/// Built-in globals that user code can shadow.
const BUILTIN_NAMES: [&str; 8] = [
    "require",
    "assert",
    "revert",
    "msg",
    "block",
    "tx",
    "now",
    "selfdestruct",
];

/// Address members that are legitimate on a raw address; anything else
/// invoked on an address parameter suggests a missing interface type.
const ADDRESS_MEMBERS: [&str; 7] = [
    "transfer",
    "send",
    "balance",
    "call",
    "callcode",
    "delegatecall",
    "value",
];

pub fn lint(unit: &SourceUnit, config: &LintConfig) -> Vec<Diagnostic> {
    let mut l = Linter {
        unit,
        config,
        version: unit.pragma.as_ref().and_then(|p| p.version),
        out: Vec::new(),
    };

    l.check_pragma();
    for contract in &unit.contracts {
        l.check_contract(contract);
    }
    l.push_manual_items();

    sort_by_source(&mut l.out);
    // The tx.origin scans overlap for require(tx.origin == x): once via the
    // require argument, once via the comparison. Same rule at the same spot
    // is always one finding.
    l.out
        .dedup_by(|a, b| a.rule_id == b.rule_id && a.location == b.location);
    l.out
}

struct Linter<'a> {
    unit: &'a SourceUnit,
    config: &'a LintConfig,
    version: Option<(u32, u32, u32)>,
    out: Vec<Diagnostic>,
}

impl<'a> Linter<'a> {
    fn emit(&mut self, rule_id: &str, span: &SourceSpan, message: String) {
        if !rule_enabled(&self.config.enabled_rules, rule_id) {
            return;
        }
        let info = catalog::rule(rule_id).expect("lint rules are cataloged");
        if !catalog::applies_to_version(info, self.version) {
            return;
        }
        if self.unit.is_suppressed(rule_id, span) {
            return;
        }
        let severity = self
            .config
            .severity_overrides
            .get(rule_id)
            .copied()
            .unwrap_or(info.severity);
        self.out.push(Diagnostic {
            rule_id: rule_id.to_string(),
            severity,
            location: DiagLocation::Span(span.clone()),
            message,
            checklist_ref: info.row.to_string(),
            patterns: info.patterns.to_vec(),
        });
    }

    fn push_manual_items(&mut self) {
        let items = [
            (
                "CL-FIXWARN",
                "compile with a current compiler and resolve every warning before release",
            ),
            (
                "CL-COVERAGE",
                "cover the full contract surface with unit tests, including failure paths \
                 and edge cases",
            ),
        ];
        for (rule_id, message) in items {
            if !rule_enabled(&self.config.enabled_rules, rule_id) {
                continue;
            }
            let info = catalog::rule(rule_id).expect("lint rules are cataloged");
            self.out.push(Diagnostic {
                rule_id: rule_id.to_string(),
                severity: info.severity,
                location: DiagLocation::None,
                message: message.to_string(),
                checklist_ref: info.row.to_string(),
                patterns: info.patterns.to_vec(),
            });
        }
    }

    fn check_pragma(&mut self) {
        match &self.unit.pragma {
            None => {
                let span = SourceSpan::new(&self.unit.file, 1, 1, 0);
                self.emit(
                    "CL-PRAGMA",
                    &span,
                    "no version pragma; any compiler may build this file".to_string(),
                );
            }
            Some(p) if !p.locked => {
                self.emit(
                    "CL-PRAGMA",
                    &p.span.clone(),
                    format!(
                        "floating version constraint `{}`; pin the exact compiler the tests ran on",
                        p.raw
                    ),
                );
            }
            Some(_) => {}
        }
    }

    fn check_contract(&mut self, c: &ContractDef) {
        self.check_shadowing(c);
        self.check_state_initializers(c);

        let has_using = self.has_checked_math(c);

        for f in &c.functions {
            self.check_function(c, f, has_using);
        }
        for m in &c.modifiers {
            self.check_body_exprs(&m.body, &[], has_using);
            self.check_unconsumed_calls(&m.body);
            self.check_unbounded_loops(c, &m.body, &[]);
        }
        self.check_fallback(c);
    }

    /// A using-for declaration anywhere in the parent closure counts as a
    /// checked-math library being in play; operand types are not tracked.
    fn has_checked_math(&self, c: &ContractDef) -> bool {
        self.unit
            .parent_closure(c)
            .iter()
            .any(|d| !d.usings.is_empty())
    }

    // ---- per-declaration rules ----

    fn check_shadowing(&mut self, c: &ContractDef) {
        let mut decls: Vec<(&str, &str, &SourceSpan)> = Vec::new();
        for v in &c.state_vars {
            decls.push(("state variable", &v.name, &v.span));
        }
        for f in &c.functions {
            if !f.name.is_empty() {
                decls.push(("function", &f.name, &f.span));
            }
        }
        for m in &c.modifiers {
            decls.push(("modifier", &m.name, &m.span));
        }
        for e in &c.events {
            decls.push(("event", &e.name, &e.span));
        }
        for s in &c.structs {
            decls.push(("struct", &s.name, &s.span));
        }
        for e in &c.enums {
            decls.push(("enum", &e.name, &e.span));
        }
        let mut local_decls: Vec<(String, SourceSpan)> = Vec::new();
        for f in &c.functions {
            if let Some(body) = &f.body {
                walk_stmts(body, &mut |s| {
                    if let Stmt::LocalVar { name, span, .. } = s {
                        local_decls.push((name.clone(), span.clone()));
                    }
                });
            }
        }

        let mut flagged: Vec<(String, String, SourceSpan)> = decls
            .into_iter()
            .filter(|(_, name, _)| BUILTIN_NAMES.contains(name))
            .map(|(what, name, span)| (what.to_string(), name.to_string(), span.clone()))
            .collect();
        for (name, span) in local_decls {
            if BUILTIN_NAMES.contains(&name.as_str()) {
                flagged.push(("local variable".to_string(), name, span));
            }
        }
        for (what, name, span) in flagged {
            self.emit(
                "CL-SHADOW",
                &span,
                format!("{what} `{name}` shadows a built-in global; rename it"),
            );
        }
    }

    fn check_state_initializers(&mut self, c: &ContractDef) {
        let has_using = self.has_checked_math(c);
        for v in &c.state_vars {
            if let Some(init) = &v.initializer {
                self.check_expr_tree(init, &[], has_using);
            }
        }
    }

    // ---- per-function rules ----

    fn check_function(&mut self, c: &ContractDef, f: &FuncDef, has_using: bool) {
        let param_names: Vec<&str> = f
            .params
            .iter()
            .map(|p| p.name.as_str())
            .filter(|n| !n.is_empty())
            .collect();

        for p in &f.params {
            if !p.name.is_empty() && BUILTIN_NAMES.contains(&p.name.as_str()) {
                self.emit(
                    "CL-SHADOW",
                    &f.span,
                    format!(
                        "parameter `{}` of `{}` shadows a built-in global; rename it",
                        p.name,
                        f.display_name()
                    ),
                );
            }
        }

        let Some(body) = &f.body else { return };

        self.check_body_exprs(body, &param_names, has_using);
        self.check_unconsumed_calls(body);
        self.check_multi_send(f, body);
        self.check_input_validation(f, body, &param_names);
        self.check_unbounded_loops(c, body, &param_names);
        self.check_raw_address_params(f, body);
    }

    /// Expression-level rules that apply uniformly wherever an expression
    /// can appear: tx.origin, overflow arithmetic, division, timestamp and
    /// block-number reads, assert misuse, short-circuit operand order.
    fn check_body_exprs(&mut self, body: &[Stmt], params: &[&str], has_using: bool) {
        for stmt in body {
            stmt.walk_exprs(&mut |e| self.check_one_expr(e, params, has_using));
        }
    }

    fn check_expr_tree(&mut self, root: &Expr, params: &[&str], has_using: bool) {
        root.walk(&mut |e| self.check_one_expr(e, params, has_using));
    }

    fn check_one_expr(&mut self, e: &Expr, params: &[&str], has_using: bool) {
        match e {
            Expr::Binary { op, lhs, rhs, span } => {
                if COMPARISON_OPS.contains(op) {
                    for side in [lhs, rhs] {
                        if let Some(origin) = find_tx_origin(side) {
                            self.emit(
                                "CL-TXORIGIN",
                                &origin,
                                "tx.origin identifies the transaction opener, not the caller; \
                                 authorize with msg.sender"
                                    .to_string(),
                            );
                        }
                    }
                    let has_block_number =
                        subtree_matches(lhs, &Expr::is_block_number)
                            || subtree_matches(rhs, &Expr::is_block_number);
                    let has_literal = subtree_matches(lhs, &is_number_literal)
                        || subtree_matches(rhs, &is_number_literal);
                    if has_block_number && has_literal {
                        self.emit(
                            "CL-BLOCKNUM",
                            span,
                            "block.number compared with a constant; block height is not a \
                             clock"
                                .to_string(),
                        );
                    }
                }
                if matches!(*op, "+" | "-" | "*" | "**")
                    && !has_using
                    && !(is_literal(lhs) && is_literal(rhs))
                {
                    self.emit(
                        "CL-OVERFLOW",
                        span,
                        format!(
                            "unchecked `{op}` can wrap around; route integer arithmetic \
                             through a checked-math library"
                        ),
                    );
                }
                if *op == "/" {
                    self.emit(
                        "CL-DIV",
                        span,
                        "integer division discards the remainder; confirm truncation is \
                         intended"
                            .to_string(),
                    );
                }
            }
            Expr::Assign { op, span, .. } => {
                if matches!(*op, "+=" | "-=" | "*=") && !has_using {
                    self.emit(
                        "CL-OVERFLOW",
                        span,
                        format!(
                            "unchecked `{op}` can wrap around; route integer arithmetic \
                             through a checked-math library"
                        ),
                    );
                }
                if *op == "/=" {
                    self.emit(
                        "CL-DIV",
                        span,
                        "integer division discards the remainder; confirm truncation is \
                         intended"
                            .to_string(),
                    );
                }
            }
            Expr::Call { args, span, .. } => {
                match e.call_head() {
                    Some("require") => {
                        for arg in args {
                            if let Some(origin) = find_tx_origin(arg) {
                                self.emit(
                                    "CL-TXORIGIN",
                                    &origin,
                                    "tx.origin identifies the transaction opener, not the \
                                     caller; authorize with msg.sender"
                                        .to_string(),
                                );
                            }
                        }
                    }
                    Some("assert") => {
                        let validates_input = args.iter().any(|a| {
                            subtree_matches(a, &|x| {
                                matches!(x.as_ident_member(), Some(("msg", _)))
                                    || x.as_ident().is_some_and(|n| params.contains(&n))
                            })
                        });
                        if validates_input {
                            self.emit(
                                "CL-ASSERTUSE",
                                span,
                                "assert checks internal invariants; validate inputs with \
                                 require instead"
                                    .to_string(),
                            );
                        }
                    }
                    _ => {}
                }
            }
            _ => {
                if e.is_timestamp_read() {
                    self.emit(
                        "CL-TIMESTAMP",
                        e.span(),
                        "block timestamp read; miners can shift it by tens of seconds"
                            .to_string(),
                    );
                }
            }
        }
    }

    /// CL-LOWLEVEL: a low-level call as a bare statement throws its success
    /// flag away.
    fn check_unconsumed_calls(&mut self, body: &[Stmt]) {
        let mut spans = Vec::new();
        walk_stmts(body, &mut |s| {
            if let Stmt::Expr { expr, .. } = s {
                if expr.is_low_level_invocation() {
                    spans.push(expr.span().clone());
                }
            }
        });
        for span in spans {
            self.emit(
                "CL-LOWLEVEL",
                &span,
                "low-level call result is discarded; a failed call continues silently \
                 unless the returned flag is checked"
                    .to_string(),
            );
        }
    }

    /// CL-MULTISEND: second and later ether transfers within one function.
    fn check_multi_send(&mut self, f: &FuncDef, body: &[Stmt]) {
        let mut transfers = Vec::new();
        for stmt in body {
            stmt.walk_exprs(&mut |e| {
                if e.is_ether_transfer() {
                    transfers.push(e.span().clone());
                }
            });
        }
        if transfers.len() >= 2 {
            self.emit(
                "CL-MULTISEND",
                &transfers[1].clone(),
                format!(
                    "`{}` moves ether {} times; one failing transfer aborts or strands the \
                     others, so pay out one beneficiary per transaction",
                    f.display_name(),
                    transfers.len()
                ),
            );
        }
    }

    /// CL-VALIDATE: externally callable function whose parameters are never
    /// mentioned by a require, either in its body or via a modifier
    /// argument.
    fn check_input_validation(&mut self, f: &FuncDef, body: &[Stmt], params: &[&str]) {
        if params.is_empty() || !matches!(f.visibility, Visibility::Public | Visibility::External)
        {
            return;
        }
        let mut validated = false;
        for stmt in body {
            stmt.walk_exprs(&mut |e| {
                if e.call_head() == Some("require") {
                    if let Expr::Call { args, .. } = e {
                        if args.iter().any(|a| {
                            subtree_matches(a, &|x| {
                                x.as_ident().is_some_and(|n| params.contains(&n))
                            })
                        }) {
                            validated = true;
                        }
                    }
                }
            });
        }
        if !validated {
            validated = f.applied_modifiers.iter().any(|m| {
                m.args.iter().any(|a| {
                    subtree_matches(a, &|x| x.as_ident().is_some_and(|n| params.contains(&n)))
                })
            });
        }
        if !validated {
            self.emit(
                "CL-VALIDATE",
                &f.span.clone(),
                format!(
                    "`{}` is externally callable but no require constrains its parameters",
                    f.display_name()
                ),
            );
        }
    }

    /// CL-UNBOUNDED: loop condition reads state that can grow between
    /// transactions (a storage variable, typically a dynamic array length).
    fn check_unbounded_loops(&mut self, c: &ContractDef, body: &[Stmt], params: &[&str]) {
        let state_names = self.unit.state_var_names(c);
        let mut locals: BTreeSet<String> = params.iter().map(|p| p.to_string()).collect();
        walk_stmts(body, &mut |s| {
            if let Stmt::LocalVar { name, .. } = s {
                locals.insert(name.clone());
            }
        });

        let mut findings = Vec::new();
        walk_stmts(body, &mut |s| {
            let cond = match s {
                Stmt::For { cond: Some(c), .. } => c,
                Stmt::While { cond, .. } => cond,
                _ => return,
            };
            let mut culprit: Option<String> = None;
            cond.walk(&mut |e| {
                if let Some(name) = e.as_ident() {
                    if state_names.contains(name) && !locals.contains(name) && culprit.is_none()
                    {
                        culprit = Some(name.to_string());
                    }
                }
            });
            if let Some(name) = culprit {
                findings.push((s.span().clone(), name));
            }
        });
        for (span, name) in findings {
            self.emit(
                "CL-UNBOUNDED",
                &span,
                format!(
                    "loop bound depends on storage `{name}`, which can grow until the loop \
                     exceeds the block gas limit"
                ),
            );
        }
    }

    /// CL-RAWADDR: contract-style member call on a plain address parameter.
    fn check_raw_address_params(&mut self, f: &FuncDef, body: &[Stmt]) {
        let addr_params: Vec<&str> = f
            .params
            .iter()
            .filter(|p| {
                matches!(
                    p.ty,
                    TypeName::Elementary(
                        ElementaryType::Address | ElementaryType::AddressPayable
                    )
                ) && !p.name.is_empty()
            })
            .map(|p| p.name.as_str())
            .collect();
        if addr_params.is_empty() {
            return;
        }
        let mut findings = Vec::new();
        for stmt in body {
            stmt.walk_exprs(&mut |e| {
                if let Expr::Call { callee, .. } = e {
                    if let Expr::Member { base, member, span } = callee.as_ref() {
                        if let Some(name) = base.as_ident() {
                            if addr_params.contains(&name)
                                && !ADDRESS_MEMBERS.contains(&member.as_str())
                            {
                                findings.push((span.clone(), name.to_string(), member.clone()));
                            }
                        }
                    }
                }
            });
        }
        for (span, name, member) in findings {
            self.emit(
                "CL-RAWADDR",
                &span,
                format!(
                    "`{name}` is a raw address but `{member}` is called on it; take an \
                     interface or contract type for compile-time checking"
                ),
            );
        }
    }

    /// CL-FALLBACK: oversized fallback, or a non-payable fallback running
    /// logic without checking that calldata is empty.
    fn check_fallback(&mut self, c: &ContractDef) {
        let Some(f) = c.fallback() else { return };
        let Some(body) = &f.body else { return };
        let stmt_count = body.len();
        if stmt_count > 3 {
            self.emit(
                "CL-FALLBACK",
                &f.span.clone(),
                format!(
                    "fallback runs {stmt_count} statements; keep it minimal so unexpected \
                     calls cannot do real work"
                ),
            );
            return;
        }
        if f.mutability == Mutability::Payable || stmt_count == 0 {
            return;
        }
        if is_rejecting_stmt(&body[0]) {
            return;
        }
        let mut checks_data = false;
        for stmt in body {
            stmt.walk_exprs(&mut |e| {
                if matches!(e.as_ident_member(), Some(("msg", "data"))) {
                    checks_data = true;
                }
            });
        }
        if !checks_data {
            self.emit(
                "CL-FALLBACK",
                &f.span.clone(),
                "non-payable fallback runs logic without checking msg.data; mistyped calls \
                 land here with arbitrary calldata"
                    .to_string(),
            );
        }
    }
}

/// A fallback that opens by rejecting (revert or require(false)) needs no
/// calldata check.
fn is_rejecting_stmt(s: &Stmt) -> bool {
    match s {
        Stmt::Expr { expr, .. } => match expr.call_head() {
            Some("revert") => true,
            Some("require") => matches!(
                expr,
                Expr::Call { args, .. }
                    if matches!(args.first(), Some(Expr::BoolLit { value: false, .. }))
            ),
            _ => false,
        },
        _ => false,
    }
}

fn find_tx_origin(e: &Expr) -> Option<SourceSpan> {
    let mut found = None;
    e.walk(&mut |x| {
        if found.is_none() && x.is_tx_origin() {
            found = Some(x.span().clone());
        }
    });
    found
}

fn subtree_matches(e: &Expr, pred: &dyn Fn(&Expr) -> bool) -> bool {
    let mut hit = false;
    e.walk(&mut |x| {
        if pred(x) {
            hit = true;
        }
    });
    hit
}

fn is_number_literal(e: &Expr) -> bool {
    matches!(e, Expr::Number { .. } | Expr::HexLit { .. })
}

fn is_literal(e: &Expr) -> bool {
    matches!(
        e,
        Expr::Number { .. } | Expr::HexLit { .. } | Expr::StrLit { .. } | Expr::BoolLit { .. }
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::Severity;
    use crate::sol::parse_solidity;

    fn lint_src(src: &str) -> Vec<Diagnostic> {
        let unit = parse_solidity(src, "t.sol").expect("fixture parses");
        lint(&unit, &LintConfig::default())
    }

    fn automated(diags: &[Diagnostic]) -> Vec<&Diagnostic> {
        diags
            .iter()
            .filter(|d| d.severity != Severity::Manual)
            .collect()
    }

    fn has_rule(diags: &[Diagnostic], rule: &str) -> bool {
        diags.iter().any(|d| d.rule_id == rule)
    }

    #[test]
    fn clean_empty_contract_yields_only_manual_items() {
        let diags = lint_src("pragma solidity 0.5.16;\ncontract A {}\n");
        assert!(automated(&diags).is_empty(), "{diags:?}");
        let manual: Vec<_> = diags.iter().map(|d| d.rule_id.as_str()).collect();
        assert_eq!(manual, vec!["CL-COVERAGE", "CL-FIXWARN"]);
    }

    #[test]
    fn tx_origin_in_require_and_comparison() {
        let src = r#"pragma solidity 0.5.16;
contract A {
    address owner;
    function f() public {
        require(tx.origin == owner);
    }
    function g() public view returns (bool) {
        return tx.origin != owner;
    }
}
"#;
        let diags = lint_src(src);
        let hits: Vec<_> = diags.iter().filter(|d| d.rule_id == "CL-TXORIGIN").collect();
        assert_eq!(hits.len(), 2, "one per use, deduplicated: {hits:?}");
        let span = hits[0].location.span().unwrap();
        assert_eq!((span.line, span.column), (5, 17));
    }

    #[test]
    fn bare_send_flagged_checked_send_not() {
        let src = r#"pragma solidity 0.5.16;
contract A {
    function pay(address payable to) public {
        require(to != address(0));
        to.send(1);
        bool ok = to.send(1);
        require(to.send(1));
        if (to.send(1)) { return; }
        to.transfer(1);
    }
}
"#;
        let diags = lint_src(src);
        let hits: Vec<_> = diags.iter().filter(|d| d.rule_id == "CL-LOWLEVEL").collect();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].location.span().unwrap().line, 5);
    }

    #[test]
    fn two_transfers_in_one_function() {
        let src = r#"pragma solidity 0.5.16;
contract A {
    function split(address payable a, address payable b) public {
        require(a != b);
        a.transfer(1);
        b.transfer(1);
    }
    function single(address payable a) public {
        require(a != address(0));
        a.transfer(1);
    }
}
"#;
        let diags = lint_src(src);
        let hits: Vec<_> = diags.iter().filter(|d| d.rule_id == "CL-MULTISEND").collect();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].location.span().unwrap().line, 6);
    }

    #[test]
    fn arithmetic_without_checked_math() {
        let src = r#"pragma solidity 0.5.16;
contract A {
    uint total;
    function add(uint v) public {
        require(v > 0);
        total = total + v;
    }
}
"#;
        let diags = lint_src(src);
        assert!(has_rule(&diags, "CL-OVERFLOW"));

        let with_lib = src.replace(
            "uint total;",
            "using SafeMath for uint; uint total;",
        );
        let diags = lint_src(&with_lib);
        assert!(!has_rule(&diags, "CL-OVERFLOW"));
    }

    #[test]
    fn overflow_rule_respects_pragma_gate() {
        let src = r#"pragma solidity 0.8.4;
contract A {
    uint total;
    function add(uint v) public {
        require(v > 0);
        total = total + v;
    }
}
"#;
        assert!(!has_rule(&lint_src(src), "CL-OVERFLOW"));
    }

    #[test]
    fn literal_only_arithmetic_is_quiet() {
        let diags = lint_src("pragma solidity 0.5.16;\ncontract A { uint x = 2 + 3; }\n");
        assert!(!has_rule(&diags, "CL-OVERFLOW"));
    }

    #[test]
    fn division_noted() {
        let src = r#"pragma solidity 0.5.16;
contract A {
    using SafeMath for uint;
    function half(uint v) public pure returns (uint) {
        require(v > 0);
        return v / 2;
    }
}
"#;
        let diags = lint_src(src);
        let hits: Vec<_> = diags.iter().filter(|d| d.rule_id == "CL-DIV").collect();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].severity, Severity::Info);
    }

    #[test]
    fn unvalidated_public_parameters() {
        let src = r#"pragma solidity 0.5.16;
contract A {
    mapping(address => uint) balances;
    function set(address who, uint amount) public {
        balances[who] = amount;
    }
}
"#;
        let diags = lint_src(src);
        assert!(has_rule(&diags, "CL-VALIDATE"));

        let validated = src.replace(
            "balances[who] = amount;",
            "require(who != address(0)); balances[who] = amount;",
        );
        assert!(!has_rule(&lint_src(&validated), "CL-VALIDATE"));
    }

    #[test]
    fn modifier_argument_counts_as_validation() {
        let src = r#"pragma solidity 0.5.16;
contract A {
    modifier nonZero(uint v) { require(v > 0); _; }
    uint total;
    function add(uint v) public nonZero(v) {
        total = v;
    }
}
"#;
        assert!(!has_rule(&lint_src(src), "CL-VALIDATE"));
    }

    #[test]
    fn internal_functions_exempt_from_validation() {
        let src = r#"pragma solidity 0.5.16;
contract A {
    uint total;
    function bump(uint v) internal {
        total = v;
    }
}
"#;
        assert!(!has_rule(&lint_src(src), "CL-VALIDATE"));
    }

    #[test]
    fn loop_over_state_array_length() {
        let src = r#"pragma solidity 0.5.16;
contract A {
    address[] holders;
    uint rounds;
    function a() public {
        for (uint i = 0; i < holders.length; i++) { rounds = i; }
    }
    function b(uint n) public {
        require(n < 100);
        for (uint i = 0; i < n; i++) { rounds = i; }
    }
    function c() public {
        uint limit = 10;
        while (rounds < limit) { rounds += 1; }
    }
}
"#;
        let diags = lint_src(src);
        let hits: Vec<_> = diags.iter().filter(|d| d.rule_id == "CL-UNBOUNDED").collect();
        assert_eq!(hits.len(), 2, "{hits:?}");
        assert_eq!(hits[0].location.span().unwrap().line, 6);
        assert_eq!(hits[1].location.span().unwrap().line, 14);
        assert!(hits[0].message.contains("holders"));
        assert!(hits[1].message.contains("rounds"));
    }

    #[test]
    fn busy_fallback_flagged() {
        let src = r#"pragma solidity 0.5.16;
contract A {
    uint a; uint b; uint c; uint d;
    function () external payable {
        a = 1;
        b = 2;
        c = 3;
        d = 4;
    }
}
"#;
        assert!(has_rule(&lint_src(src), "CL-FALLBACK"));
    }

    #[test]
    fn nonpayable_fallback_without_data_check() {
        let flagged = r#"pragma solidity 0.5.16;
contract A {
    uint hits;
    function () external {
        hits += 1;
    }
}
"#;
        let diags = lint_src(flagged);
        assert!(has_rule(&diags, "CL-FALLBACK"));

        let checked = r#"pragma solidity 0.5.16;
contract A {
    uint hits;
    function () external {
        require(msg.data.length == 0);
    }
}
"#;
        assert!(!has_rule(&lint_src(checked), "CL-FALLBACK"));

        let rejecting = r#"pragma solidity 0.5.16;
contract A {
    function () external {
        revert();
    }
}
"#;
        assert!(!has_rule(&lint_src(rejecting), "CL-FALLBACK"));

        let empty_payable = "pragma solidity 0.5.16;\ncontract A { function () external payable {} }\n";
        assert!(!has_rule(&lint_src(empty_payable), "CL-FALLBACK"));
    }

    #[test]
    fn shadowing_builtins() {
        let src = r#"pragma solidity 0.5.16;
contract A {
    uint256 private now;
}
"#;
        let diags = lint_src(src);
        let hits: Vec<_> = diags.iter().filter(|d| d.rule_id == "CL-SHADOW").collect();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].location.span().unwrap().line, 3);
        assert_eq!(hits[0].severity, Severity::Error);
    }

    #[test]
    fn interface_member_on_raw_address() {
        let src = r#"pragma solidity 0.5.16;
contract A {
    function sweep(address token, address payable dest) public {
        require(dest != address(0));
        token.transferFrom(address(this), dest, 1);
        dest.transfer(1);
    }
}
"#;
        let diags = lint_src(src);
        let hits: Vec<_> = diags.iter().filter(|d| d.rule_id == "CL-RAWADDR").collect();
        assert_eq!(hits.len(), 1);
        assert!(hits[0].message.contains("transferFrom"));
    }

    #[test]
    fn assert_on_inputs() {
        let src = r#"pragma solidity 0.5.16;
contract A {
    uint total;
    function f(uint v) public {
        require(v < 100);
        assert(v > 0);
    }
    function g() public {
        total += 0;
        assert(total >= 0);
    }
}
"#;
        let diags = lint_src(src);
        let hits: Vec<_> = diags.iter().filter(|d| d.rule_id == "CL-ASSERTUSE").collect();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].location.span().unwrap().line, 6);
    }

    #[test]
    fn pragma_floating_and_missing() {
        let floating = lint_src("pragma solidity ^0.5.0;\ncontract A {}\n");
        assert!(has_rule(&floating, "CL-PRAGMA"));

        let missing = lint_src("contract A {}\n");
        let hit = missing.iter().find(|d| d.rule_id == "CL-PRAGMA").unwrap();
        assert_eq!(hit.location.span().unwrap().line, 1);

        let locked = lint_src("pragma solidity 0.5.16;\ncontract A {}\n");
        assert!(!has_rule(&locked, "CL-PRAGMA"));
    }

    #[test]
    fn timestamp_and_block_number() {
        let src = r#"pragma solidity 0.5.16;
contract A {
    uint start;
    function f() public {
        start = block.timestamp;
    }
    function g() public view returns (bool) {
        return block.number > 6000000;
    }
    function h() public view returns (bool) {
        return block.number > start;
    }
}
"#;
        let diags = lint_src(src);
        assert!(has_rule(&diags, "CL-TIMESTAMP"));
        let hits: Vec<_> = diags.iter().filter(|d| d.rule_id == "CL-BLOCKNUM").collect();
        assert_eq!(hits.len(), 1, "literal comparison only: {hits:?}");
        assert_eq!(hits[0].location.span().unwrap().line, 8);
    }

    #[test]
    fn suppression_comment_silences_next_line() {
        let src = r#"pragma solidity 0.5.16;
contract A {
    using SafeMath for uint;
    function half(uint v) public pure returns (uint) {
        require(v > 0);
        // abcde:allow(CL-DIV)
        return v / 2;
    }
}
"#;
        assert!(!has_rule(&lint_src(src), "CL-DIV"));
    }

    #[test]
    fn disabling_a_rule_removes_only_it() {
        let src = r#"pragma solidity 0.5.16;
contract A {
    address owner;
    function f(address payable to) public {
        require(tx.origin == owner);
        to.send(1);
    }
}
"#;
        let all = lint_src(src);
        assert!(has_rule(&all, "CL-TXORIGIN") && has_rule(&all, "CL-LOWLEVEL"));

        let unit = parse_solidity(src, "t.sol").unwrap();
        let mut config = LintConfig::default();
        let keep: std::collections::BTreeSet<String> = catalog::ALL_RULES
            .iter()
            .filter(|r| r.id != "CL-TXORIGIN")
            .map(|r| r.id.to_string())
            .collect();
        config.enabled_rules = Some(keep);
        let restricted = lint(&unit, &config);
        assert!(!has_rule(&restricted, "CL-TXORIGIN"));
        let all_rest: Vec<_> = all
            .iter()
            .filter(|d| d.rule_id != "CL-TXORIGIN")
            .collect();
        assert_eq!(all_rest.len(), restricted.len());
    }

    #[test]
    fn severity_override_applies() {
        let src = "pragma solidity ^0.5.0;\ncontract A {}\n";
        let unit = parse_solidity(src, "t.sol").unwrap();
        let mut config = LintConfig::default();
        config
            .severity_overrides
            .insert("CL-PRAGMA".to_string(), Severity::Error);
        let diags = lint(&unit, &config);
        let hit = diags.iter().find(|d| d.rule_id == "CL-PRAGMA").unwrap();
        assert_eq!(hit.severity, Severity::Error);
    }

    #[test]
    fn output_is_sorted_and_stable() {
        let src = r#"pragma solidity ^0.5.0;
contract A {
    address owner;
    function f() public {
        require(tx.origin == owner);
    }
}
"#;
        let a = lint_src(src);
        let b = lint_src(src);
        assert_eq!(a, b);
        let keys: Vec<_> = a.iter().map(|d| d.source_order_key()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }
}
