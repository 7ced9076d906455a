//! Semantic validation of a parsed model. Grammar-level problems never reach
//! this point; everything here is about name resolution and the interaction
//! rules between participant kinds.

use super::inherit::{linearize, InheritError};
use super::{
    simulate_activations, ActorKind, ContractDecl, ContractStereotype, MessageKind,
    ParticipantKind, Scenario, SystemModel, TopDecl, TypeName,
};
use crate::diag::{DiagLocation, Diagnostic, Severity};
use crate::span::SourceSpan;
use std::collections::{BTreeMap, BTreeSet};

/// Checks model-level invariants and returns the violations found, sorted by
/// declaration order and then rule id. An empty result is the precondition
/// for the design checker and the generators.
pub fn validate_model(model: &SystemModel) -> Vec<Diagnostic> {
    let mut v = Validator {
        model,
        diags: Vec::new(),
    };

    let n_actors = model.actors.len();
    let n_decls = model.decls.len();
    v.check_unique_top_level_names(n_actors);

    for (i, decl) in model.decls.iter().enumerate() {
        let order = n_actors + i;
        match decl {
            TopDecl::Contract(c) => v.check_contract(order, c),
            TopDecl::Struct(s) => {
                v.check_member_uniqueness(
                    order,
                    s.fields.iter().map(|f| f.name.as_str()),
                    &s.span,
                    &format!("struct `{}`", s.name),
                    "field",
                );
                for f in &s.fields {
                    v.check_type_resolves(order, &f.ty, &s.span, &format!("struct `{}`", s.name));
                }
            }
            TopDecl::Enum(e) => {
                v.check_member_uniqueness(
                    order,
                    e.variants.iter().map(|s| s.as_str()),
                    &e.span,
                    &format!("enum `{}`", e.name),
                    "variant",
                );
            }
        }
    }
    for (i, sc) in model.scenarios.iter().enumerate() {
        v.check_scenario(n_actors + n_decls + i, sc);
    }

    let mut diags = v.diags;
    diags.sort_by(|a, b| (a.0, &a.1.rule_id).cmp(&(b.0, &b.1.rule_id)));
    diags.into_iter().map(|(_, d)| d).collect()
}

struct Validator<'m> {
    model: &'m SystemModel,
    /// Diagnostics keyed by the index of the declaration they belong to.
    diags: Vec<(usize, Diagnostic)>,
}

impl<'m> Validator<'m> {
    fn push(
        &mut self,
        order: usize,
        rule: &str,
        severity: Severity,
        span: &SourceSpan,
        message: String,
    ) {
        self.diags.push((
            order,
            Diagnostic::new(rule, severity, DiagLocation::Span(span.clone()), message),
        ));
    }

    fn check_unique_top_level_names(&mut self, n_actors: usize) {
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut entries: Vec<(usize, &str, &SourceSpan, &str)> = Vec::new();
        for (i, a) in self.model.actors.iter().enumerate() {
            entries.push((i, &a.name, &a.span, "actor"));
        }
        for (i, d) in self.model.decls.iter().enumerate() {
            let what = match d {
                TopDecl::Contract(c) => match c.stereotype {
                    ContractStereotype::Contract => "contract",
                    ContractStereotype::Interface => "interface",
                    ContractStereotype::LibraryContract => "library",
                },
                TopDecl::Struct(_) => "struct",
                TopDecl::Enum(_) => "enum",
            };
            entries.push((n_actors + i, d.name(), d.span(), what));
        }
        let offset = n_actors + self.model.decls.len();
        for (i, sc) in self.model.scenarios.iter().enumerate() {
            entries.push((offset + i, &sc.name, &sc.span, "scenario"));
        }

        for (order, name, span, what) in entries {
            if !seen.insert(name) {
                self.push(
                    order,
                    "MOD-DUP-NAME",
                    Severity::Error,
                    span,
                    format!("{what} `{name}` reuses an already declared top-level name"),
                );
            }
        }
    }

    fn check_member_uniqueness<'a>(
        &mut self,
        order: usize,
        names: impl Iterator<Item = &'a str>,
        span: &SourceSpan,
        owner: &str,
        what: &str,
    ) {
        let mut seen = BTreeSet::new();
        for name in names {
            if !seen.insert(name) {
                self.push(
                    order,
                    "MOD-DUP-MEMBER",
                    Severity::Error,
                    span,
                    format!("{owner} declares {what} `{name}` more than once"),
                );
            }
        }
    }

    fn check_type_resolves(&mut self, order: usize, ty: &TypeName, span: &SourceSpan, owner: &str) {
        match ty {
            TypeName::Elementary(_) => {}
            TypeName::UserDefined(name) => {
                if !self.model.type_exists(name) {
                    self.push(
                        order,
                        "MOD-UNKNOWN-TYPE",
                        Severity::Error,
                        span,
                        format!("{owner} references undeclared type `{name}`"),
                    );
                }
            }
            TypeName::Array(inner) | TypeName::FixedArray(inner, _) => {
                self.check_type_resolves(order, inner, span, owner)
            }
            TypeName::Mapping(key, value) => {
                self.check_type_resolves(order, key, span, owner);
                self.check_type_resolves(order, value, span, owner);
            }
        }
    }

    fn check_contract(&mut self, order: usize, c: &ContractDecl) {
        let mut seen_parents = BTreeSet::new();
        let mut parents_ok = true;
        for parent in &c.parents {
            if self.model.contract(parent).is_none() {
                parents_ok = false;
                self.push(
                    order,
                    "MOD-UNKNOWN-PARENT",
                    Severity::Error,
                    &c.span,
                    format!(
                        "`{}` inherits from `{parent}`, which is not a declared contract",
                        c.name
                    ),
                );
            }
            if !seen_parents.insert(parent.as_str()) {
                self.push(
                    order,
                    "MOD-DUP-PARENT",
                    Severity::Error,
                    &c.span,
                    format!("`{}` lists parent `{parent}` more than once", c.name),
                );
            }
        }

        if c.stereotype == ContractStereotype::Interface {
            for sv in &c.state_vars {
                self.push(
                    order,
                    "MOD-IFACE-STATE",
                    Severity::Error,
                    &sv.span,
                    format!(
                        "interface `{}` declares state variable `{}`; interfaces hold no state",
                        c.name, sv.name
                    ),
                );
            }
        }

        // Hierarchy-dependent checks need a valid linearization; skip them
        // when parent references are already broken to avoid cascades.
        let chain = if parents_ok {
            match linearize(self.model, &c.name) {
                Ok(chain) => Some(chain),
                Err(InheritError::Cycle { name }) => {
                    self.push(
                        order,
                        "MOD-CYCLE",
                        Severity::Error,
                        &c.span,
                        format!(
                            "`{}` takes part in an inheritance cycle through `{name}`",
                            c.name
                        ),
                    );
                    None
                }
                Err(InheritError::Inconsistent { .. }) => {
                    self.push(
                        order,
                        "MOD-C3",
                        Severity::Error,
                        &c.span,
                        format!(
                            "the parents of `{}` cannot be ordered consistently; reorder or reduce its bases",
                            c.name
                        ),
                    );
                    None
                }
                Err(InheritError::UnknownContract { .. }) => None,
            }
        } else {
            None
        };

        let scope: Vec<&ContractDecl> = match &chain {
            Some(chain) => chain.iter().filter_map(|n| self.model.contract(n)).collect(),
            None => vec![c],
        };

        self.check_inherited_member_clashes(order, c, &scope, "event", |d| {
            d.events.iter().map(|e| e.name.clone()).collect()
        });
        self.check_inherited_member_clashes(order, c, &scope, "modifier", |d| {
            d.modifiers.iter().map(|m| m.name.clone()).collect()
        });

        let known_modifiers: BTreeSet<&str> = scope
            .iter()
            .flat_map(|d| d.modifiers.iter().map(|m| m.name.as_str()))
            .collect();
        for f in &c.functions {
            for used in &f.uses {
                if chain.is_some() && !known_modifiers.contains(used.as_str()) {
                    self.push(
                        order,
                        "MOD-UNKNOWN-MODIFIER",
                        Severity::Error,
                        &f.span,
                        format!(
                            "function `{}` applies modifier `{used}`, which `{}` neither declares nor inherits",
                            f.name, c.name
                        ),
                    );
                }
            }
            for p in &f.params {
                self.check_type_resolves(order, &p.ty, &f.span, &format!("function `{}`", f.name));
            }
            for r in &f.returns {
                self.check_type_resolves(order, r, &f.span, &format!("function `{}`", f.name));
            }
        }
        for sv in &c.state_vars {
            self.check_type_resolves(
                order,
                &sv.ty,
                &sv.span,
                &format!("state variable `{}`", sv.name),
            );
        }
        for e in &c.events {
            for p in &e.params {
                self.check_type_resolves(order, &p.ty, &e.span, &format!("event `{}`", e.name));
            }
        }
    }

    /// Events and modifiers must be unique across the inherited scope. A
    /// clash is reported on the contract whose scope first contains both
    /// declarations: on `c` itself when it redeclares an inherited name, or
    /// on the merging contract when two unrelated bases collide.
    fn check_inherited_member_clashes(
        &mut self,
        order: usize,
        c: &ContractDecl,
        scope: &[&ContractDecl],
        what: &str,
        names_of: impl Fn(&ContractDecl) -> Vec<String>,
    ) {
        let mut owner_of: BTreeMap<String, &str> = BTreeMap::new();
        // Base-most first, so the earlier owner is always the more basal one.
        for decl in scope.iter().rev() {
            for name in names_of(decl) {
                match owner_of.get(name.as_str()) {
                    None => {
                        owner_of.insert(name, &decl.name);
                    }
                    Some(earlier) => {
                        let directly_related = linearize(self.model, &decl.name)
                            .map(|lin| lin.iter().any(|n| n == earlier))
                            .unwrap_or(true);
                        // A clash between a contract and its own ancestor is
                        // reported when validating that contract; merge
                        // clashes between unrelated bases are reported here,
                        // at the merge point.
                        if decl.name == c.name || !directly_related {
                            self.push(
                                order,
                                "MOD-DUP-MEMBER",
                                Severity::Error,
                                &c.span,
                                format!(
                                    "{what} `{name}` is declared by both `{earlier}` and `{}` within the scope of `{}`",
                                    decl.name, c.name
                                ),
                            );
                        }
                    }
                }
            }
        }
    }

    fn check_scenario(&mut self, order: usize, sc: &Scenario) {
        let mut aliases: BTreeSet<&str> = BTreeSet::new();
        for p in &sc.participants {
            if !aliases.insert(&p.alias) {
                self.push(
                    order,
                    "MOD-DUP-ALIAS",
                    Severity::Error,
                    &p.span,
                    format!(
                        "participant alias `{}` is declared twice in scenario `{}`",
                        p.alias, sc.name
                    ),
                );
            }
            if let ParticipantKind::Declared(contract) = &p.kind {
                if self.model.contract(contract).is_none() {
                    self.push(
                        order,
                        "MOD-UNKNOWN-CONTRACT",
                        Severity::Error,
                        &p.span,
                        format!(
                            "participant `{}` refers to `{contract}`, which is not a declared contract",
                            p.alias
                        ),
                    );
                }
            }
        }

        for msg in &sc.messages {
            let mut unknown = false;
            for endpoint in [&msg.from, &msg.to] {
                if sc.participant(endpoint).is_none() {
                    unknown = true;
                    self.push(
                        order,
                        "MOD-UNKNOWN-PARTICIPANT",
                        Severity::Error,
                        &msg.span,
                        format!(
                            "message references `{endpoint}`, which is not a participant of scenario `{}`",
                            sc.name
                        ),
                    );
                }
            }
            if unknown {
                continue;
            }
            let from = &sc.participant(&msg.from).unwrap().kind;
            let to = &sc.participant(&msg.to).unwrap().kind;

            // Accounts hold ether but run no code, so every non-ether message
            // touching one is a modelling error; the kind-specific rules are
            // skipped for such messages.
            if msg.kind != MessageKind::EtherTransfer && (from.is_account() || to.is_account()) {
                let which = if from.is_account() { &msg.from } else { &msg.to };
                self.push(
                    order,
                    "MOD-ACCOUNT-MSG",
                    Severity::Error,
                    &msg.span,
                    format!("account `{which}` can only take part in ether transfers"),
                );
                continue;
            }

            match msg.kind {
                MessageKind::TransMsg => {
                    if from.is_contract_like() {
                        self.push(
                            order,
                            "MOD-TRANSMSG-SOURCE",
                            Severity::Error,
                            &msg.span,
                            format!(
                                "transaction from `{}`: only non-contract participants submit transactions",
                                msg.from
                            ),
                        );
                    }
                    if !to.is_contract_like() {
                        self.push(
                            order,
                            "MOD-TRANSMSG-SOURCE",
                            Severity::Error,
                            &msg.span,
                            format!(
                                "transaction to `{}`: transactions are addressed to contracts",
                                msg.to
                            ),
                        );
                    } else if matches!(to, ParticipantKind::Actor(ActorKind::Oracle)) {
                        self.push(
                            order,
                            "MOD-ORACLE-TRANSMSG",
                            Severity::Info,
                            &msg.span,
                            format!(
                                "transaction addressed to oracle `{}`; check this is intended rather than a data feed callback",
                                msg.to
                            ),
                        );
                    }
                }
                MessageKind::DirectMsg => {
                    if !from.is_contract_like() || !to.is_contract_like() {
                        self.push(
                            order,
                            "MOD-DIRECTMSG-ROUTE",
                            Severity::Error,
                            &msg.span,
                            format!(
                                "direct message `{}` -> `{}` must connect two contracts",
                                msg.from, msg.to
                            ),
                        );
                    }
                }
                MessageKind::View | MessageKind::Pure | MessageKind::Creation => {
                    if !to.is_contract_like() {
                        self.push(
                            order,
                            "MOD-MSG-TARGET",
                            Severity::Error,
                            &msg.span,
                            format!(
                                "`{}` message must target a contract, but `{}` is not one",
                                msg.kind.stereotype(),
                                msg.to
                            ),
                        );
                    }
                }
                MessageKind::Fallback => {
                    if msg.from != msg.to || !from.is_contract_like() {
                        self.push(
                            order,
                            "MOD-FALLBACK-SELF",
                            Severity::Error,
                            &msg.span,
                            "a fallback message is a contract handling its own incoming call; source and target must be the same contract".to_string(),
                        );
                    }
                }
                MessageKind::EtherTransfer => {}
            }
        }

        let report = simulate_activations(sc);
        for violation in &report.violations {
            let span = &sc.messages[violation.index].span;
            self.push(
                order,
                "MOD-ACTIVATION",
                Severity::Error,
                span,
                violation.reason.clone(),
            );
        }
    }
}
