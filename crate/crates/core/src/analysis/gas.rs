//! Gas-cost findings over the Solidity subset AST: storage packing waste,
//! redundant writes, and call/modifier overhead worth a look.
//!
//! Everything here is advisory. The rules point at known cost patterns;
//! whether the saving matters is the author's call, which is why most of
//! them report at info severity.

use crate::analysis::packing::suggest_packing;
use crate::catalog;
use crate::config::{rule_enabled, GasConfig};
use crate::diag::{sort_by_source, DiagLocation, Diagnostic};
use crate::model::{ElementaryType, TypeName};
use crate::sol::ast::*;
use crate::span::SourceSpan;
use std::collections::BTreeSet;

pub fn analyze_gas(unit: &SourceUnit, config: &GasConfig) -> Vec<Diagnostic> {
    let mut g = GasPass {
        unit,
        config,
        out: Vec::new(),
    };

    for contract in &unit.contracts {
        g.check_contract(contract);
    }
    g.push_manual_items();

    sort_by_source(&mut g.out);
    g.out
        .dedup_by(|a, b| a.rule_id == b.rule_id && a.location == b.location);
    g.out
}

struct GasPass<'a> {
    unit: &'a SourceUnit,
    config: &'a GasConfig,
    out: Vec<Diagnostic>,
}

impl<'a> GasPass<'a> {
    fn emit(&mut self, rule_id: &str, span: &SourceSpan, message: String) {
        if !rule_enabled(&self.config.enabled_rules, rule_id) {
            return;
        }
        if self.unit.is_suppressed(rule_id, span) {
            return;
        }
        let info = catalog::rule(rule_id).expect("gas rules are cataloged");
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
                "GA-SIZE",
                "deployed bytecode must stay under the 24 KB limit; budget code size \
                 before the contract grows into it",
            ),
            (
                "GA-USELIB",
                "complex, reusable logic belongs in deployed libraries shared across \
                 contracts",
            ),
            (
                "GA-EVENTLOG",
                "data that only off-chain consumers read can live in event logs instead \
                 of storage",
            ),
        ];
        for (rule_id, message) in items {
            if !rule_enabled(&self.config.enabled_rules, rule_id) {
                continue;
            }
            let info = catalog::rule(rule_id).expect("gas rules are cataloged");
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

    fn check_contract(&mut self, c: &ContractDef) {
        self.check_packing(c);
        self.check_state_vars(c);
        self.check_modifier_inlining(c);
        self.check_public_never_called_internally(c);
        self.check_bytes32_candidates(c);

        let state_names = self.unit.state_var_names(c);
        for f in &c.functions {
            if let Some(body) = &f.body {
                let locals = collect_locals(f, body);
                self.check_body(body, &state_names, &locals);
            }
        }
        for m in &c.modifiers {
            let locals: BTreeSet<String> =
                m.params.iter().map(|p| p.name.clone()).collect();
            self.check_body(&m.body, &state_names, &locals);
        }
    }

    /// GA-PACK: reordering state variables would reduce the slot count.
    fn check_packing(&mut self, c: &ContractDef) {
        // Interfaces and libraries hold no instance storage worth packing;
        // an unresolvable type means no layout, so nothing to compare.
        if c.kind != ContractKind::Contract {
            return;
        }
        let Ok(s) = suggest_packing(c, self.unit) else { return };
        if s.saves_slots() {
            self.emit(
                "GA-PACK",
                &c.span.clone(),
                format!(
                    "state variables of `{}` occupy {} slots but {} suffice; declare them \
                     in the order [{}]",
                    c.name,
                    s.current_slots,
                    s.achievable_slots,
                    s.suggested_order.join(", ")
                ),
            );
        }
    }

    /// GA-INIT on state declarations, GA-ARRAY on dynamic arrays.
    fn check_state_vars(&mut self, c: &ContractDef) {
        for v in &c.state_vars {
            if let Some(init) = &v.initializer {
                if !v.is_constant && init.is_default_value() {
                    self.emit(
                        "GA-INIT",
                        &v.span.clone(),
                        format!(
                            "`{}` is initialized to its default; storage starts zeroed, \
                             the write only costs gas",
                            v.name
                        ),
                    );
                }
            }
            if matches!(v.ty, TypeName::Array(_)) {
                self.emit(
                    "GA-ARRAY",
                    &v.span.clone(),
                    format!(
                        "`{}` is a storage array; an integer-keyed mapping skips length \
                         bookkeeping and element shifting",
                        v.name
                    ),
                );
            }
        }
    }

    /// GA-MODINLINE: a multi-statement modifier body is copied into every
    /// function that applies it. The `_;` placeholder stands for the
    /// function body itself, so it does not count as modifier work.
    fn check_modifier_inlining(&mut self, c: &ContractDef) {
        for m in &c.modifiers {
            let work: usize = m
                .body
                .iter()
                .filter(|s| !is_placeholder(s))
                .count();
            if work < 2 {
                continue;
            }
            let applications = self
                .unit
                .contracts
                .iter()
                .filter(|d| {
                    self.unit
                        .parent_closure(d)
                        .iter()
                        .any(|p| p.name == c.name)
                })
                .flat_map(|d| d.functions.iter())
                .filter(|f| f.applied_modifiers.iter().any(|a| a.name == m.name))
                .count();
            if applications >= 2 {
                self.emit(
                    "GA-MODINLINE",
                    &m.span.clone(),
                    format!(
                        "modifier `{}` ({work} statements) is inlined into {applications} \
                         functions; an internal function is one jump instead of a copy",
                        m.name
                    ),
                );
            }
        }
    }

    /// GA-PUBEXT: public function never invoked by a bare internal call
    /// anywhere in the unit.
    fn check_public_never_called_internally(&mut self, c: &ContractDef) {
        let called = self.internally_called_names();
        for f in &c.functions {
            if f.visibility != crate::model::Visibility::Public
                || f.is_constructor
                || f.is_fallback
                || f.body.is_none()
                || f.name.is_empty()
            {
                continue;
            }
            if !called.contains(&f.name) {
                self.emit(
                    "GA-PUBEXT",
                    &f.span.clone(),
                    format!(
                        "`{}` is public but never called from inside the unit; external \
                         functions read arguments straight from calldata",
                        f.name
                    ),
                );
            }
        }
    }

    fn internally_called_names(&self) -> BTreeSet<String> {
        let mut names = BTreeSet::new();
        let mut record = |e: &Expr| {
            if let Expr::Call { callee, .. } = e {
                if let Some(n) = callee.as_ident() {
                    names.insert(n.to_string());
                }
            }
        };
        for c in &self.unit.contracts {
            for f in &c.functions {
                if let Some(body) = &f.body {
                    for stmt in body {
                        stmt.walk_exprs(&mut record);
                    }
                }
            }
            for m in &c.modifiers {
                for stmt in &m.body {
                    stmt.walk_exprs(&mut record);
                }
            }
            for v in &c.state_vars {
                if let Some(init) = &v.initializer {
                    init.walk(&mut record);
                }
            }
        }
        names
    }

    /// GA-BYTES32: a string/bytes state variable that only ever receives
    /// literals short enough for bytes32. Literal assignments are all the
    /// evidence considered; one is required, or there is nothing to judge.
    fn check_bytes32_candidates(&mut self, c: &ContractDef) {
        let candidates: Vec<&VarDecl> = c
            .state_vars
            .iter()
            .filter(|v| {
                matches!(
                    v.ty,
                    TypeName::Elementary(ElementaryType::String | ElementaryType::Bytes)
                )
            })
            .collect();
        if candidates.is_empty() {
            return;
        }

        for v in candidates {
            let mut observed = 0usize;
            let mut all_short = true;
            let mut note = |rhs: &Expr| match rhs {
                Expr::StrLit { value, .. } => {
                    observed += 1;
                    if value.len() > 32 {
                        all_short = false;
                    }
                }
                _ => all_short = false,
            };
            if let Some(init) = &v.initializer {
                note(init);
            }
            for d in self
                .unit
                .contracts
                .iter()
                .filter(|d| self.unit.parent_closure(d).iter().any(|p| p.name == c.name))
            {
                for f in &d.functions {
                    let Some(body) = &f.body else { continue };
                    for stmt in body {
                        stmt.walk_exprs(&mut |e| {
                            if let Expr::Assign { op: "=", lhs, rhs, .. } = e {
                                if lhs.root_ident() == Some(v.name.as_str()) {
                                    note(rhs);
                                }
                            }
                        });
                    }
                }
            }
            if observed > 0 && all_short {
                self.emit(
                    "GA-BYTES32",
                    &v.span.clone(),
                    format!(
                        "`{}` only ever holds literals of at most 32 bytes; bytes32 is a \
                         single slot with no length word",
                        v.name
                    ),
                );
            }
        }
    }

    /// Statement-level rules inside executable bodies: GA-INIT on locals,
    /// GA-ZEROASSIGN, GA-LOOPSTORE, GA-OPORDER, GA-LONGSTR.
    fn check_body(
        &mut self,
        body: &[Stmt],
        state_names: &BTreeSet<String>,
        locals: &BTreeSet<String>,
    ) {
        let is_storage = |e: &Expr| {
            e.root_ident()
                .is_some_and(|n| state_names.contains(n) && !locals.contains(n))
        };

        let mut local_defaults = Vec::new();
        let mut findings = Vec::new();
        walk_stmts(body, &mut |s| {
            if let Stmt::LocalVar { name, init: Some(init), span, .. } = s {
                if init.is_default_value() {
                    local_defaults.push((span.clone(), name.clone()));
                }
            }
            if let Stmt::For { body: b, .. } | Stmt::While { body: b, .. } = s {
                b.walk(&mut |inner| {
                    if let Stmt::Expr { expr, .. } = inner {
                        expr.walk(&mut |e| {
                            if let Expr::Assign { lhs, span, .. } = e {
                                if is_storage(lhs) {
                                    findings.push((
                                        "GA-LOOPSTORE",
                                        span.clone(),
                                        format!(
                                            "storage `{}` is written inside a loop; \
                                             accumulate in memory and store once",
                                            lhs.root_ident().unwrap_or("?")
                                        ),
                                    ));
                                }
                            }
                        });
                    }
                });
            }
        });
        for (span, name) in local_defaults {
            self.emit(
                "GA-INIT",
                &span,
                format!(
                    "`{name}` is initialized to its default; declarations start zeroed \
                     already"
                ),
            );
        }

        for stmt in body {
            stmt.walk_exprs(&mut |e| match e {
                Expr::Assign { op: "=", lhs, rhs, span } => {
                    let zeroing = rhs.is_zero_number()
                        || matches!(rhs.as_ref(), Expr::BoolLit { value: false, .. });
                    if zeroing && is_storage(lhs) {
                        findings.push((
                            "GA-ZEROASSIGN",
                            span.clone(),
                            format!(
                                "zeroing storage `{}` by assignment; `delete` does the \
                                 same and triggers the gas refund",
                                lhs.root_ident().unwrap_or("?")
                            ),
                        ));
                    }
                }
                Expr::Binary { op, lhs, rhs, span } if *op == "&&" || *op == "||" => {
                    if contains_call(lhs) && !contains_call(rhs) {
                        findings.push((
                            "GA-OPORDER",
                            span.clone(),
                            format!(
                                "`{op}` evaluates the expensive call side first; put the \
                                 cheap operand on the left to short-circuit past it"
                            ),
                        ));
                    }
                }
                Expr::Call { args, .. }
                    if matches!(e.call_head(), Some("require" | "revert")) =>
                {
                    for arg in args {
                        if let Expr::StrLit { value, span } = arg {
                            if value.len() > 32 {
                                findings.push((
                                    "GA-LONGSTR",
                                    span.clone(),
                                    format!(
                                        "revert reason is {} bytes; messages over 32 \
                                         bytes spill into extra words",
                                        value.len()
                                    ),
                                ));
                            }
                        }
                    }
                }
                _ => {}
            });
        }

        for (rule, span, message) in findings {
            self.emit(rule, &span, message);
        }
    }
}

fn is_placeholder(s: &Stmt) -> bool {
    matches!(s, Stmt::Expr { expr, .. } if expr.as_ident() == Some("_"))
}

fn contains_call(e: &Expr) -> bool {
    let mut hit = false;
    e.walk(&mut |x| {
        if matches!(x, Expr::Call { .. }) {
            hit = true;
        }
    });
    hit
}

fn collect_locals(f: &FuncDef, body: &[Stmt]) -> BTreeSet<String> {
    let mut locals: BTreeSet<String> = f
        .params
        .iter()
        .chain(f.returns.iter())
        .map(|p| p.name.clone())
        .filter(|n| !n.is_empty())
        .collect();
    walk_stmts(body, &mut |s| {
        if let Stmt::LocalVar { name, .. } = s {
            locals.insert(name.clone());
        }
    });
    locals
}
