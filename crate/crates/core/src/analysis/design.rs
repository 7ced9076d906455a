//! Design-phase checks over a validated system model.
//!
//! Callers must run `validate_model` first and only invoke the checker when
//! it returns no findings; the rules here assume resolvable names and
//! consistent hierarchies. Output order is model-global findings, then
//! per-contract findings in declaration order, then per-scenario findings in
//! message order, and finally the always-on review reminders.

use crate::catalog;
use crate::diag::{DiagLocation, Diagnostic, Severity};
use crate::model::activation::simulate_activations;
use crate::model::inherit::effective_interface;
use crate::model::{
    ActorKind, ContractStereotype, Message, MessageKind, ParticipantKind, Scenario, SystemModel,
};
use crate::pattern::PatternId;

pub fn check_design(model: &SystemModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    check_failsafe(model, &mut out);

    for contract in model.contracts() {
        check_collisions(model, contract, &mut out);
    }

    check_balance_limits(model, &mut out);

    for scenario in &model.scenarios {
        check_reentrancy(scenario, &mut out);
        check_push_payments(scenario, &mut out);
    }

    push_conditional_manual(model, &mut out);
    push_unconditional_manual(&mut out);
    out
}

fn diag(rule_id: &str, location: DiagLocation, message: String) -> Diagnostic {
    let info = catalog::rule(rule_id).expect("design rules are cataloged");
    Diagnostic {
        rule_id: rule_id.to_string(),
        severity: info.severity,
        location,
        message,
        checklist_ref: info.row.to_string(),
        patterns: info.patterns.to_vec(),
    }
}

/// DC-FAILSAFE: a system with contracts but no emergency-stop or proxy
/// tagged anywhere has no way to react to a discovered bug.
fn check_failsafe(model: &SystemModel, out: &mut Vec<Diagnostic>) {
    let mut any_contract = false;
    let mut any_failsafe = false;
    for c in model.contracts() {
        if c.stereotype != ContractStereotype::Contract {
            continue;
        }
        any_contract = true;
        if c.patterns.contains(&PatternId::Es) || c.patterns.contains(&PatternId::Pd) {
            any_failsafe = true;
        }
    }
    if any_contract && !any_failsafe {
        out.push(diag(
            "DC-FAILSAFE",
            DiagLocation::ModelPath {
                path: model.name.clone(),
            },
            "no contract is tagged with an emergency stop (ES) or an upgradeable proxy (PD); \
             once deployed there will be no way to react to a bug"
                .to_string(),
        ));
    }
}

/// DC-MI: report each function name that two unrelated bases both define;
/// the linearization picks a winner the authors may not expect.
fn check_collisions(model: &SystemModel, contract: &crate::model::ContractDecl, out: &mut Vec<Diagnostic>) {
    if contract.parents.len() < 2 {
        return;
    }
    let Ok(iface) = effective_interface(model, &contract.name) else {
        return;
    };
    for collision in &iface.collisions {
        let winner = iface
            .functions
            .iter()
            .find(|(_, f)| f.name == collision.function)
            .map(|(owner, _)| owner.as_str())
            .unwrap_or(collision.owners.0.as_str());
        out.push(diag(
            "DC-MI",
            DiagLocation::Span(contract.span.clone()),
            format!(
                "`{}` inherits `{}` from both `{}` and `{}`, which are unrelated; \
                 linearization silently picks the version from `{}`",
                contract.name, collision.function, collision.owners.0, collision.owners.1, winner
            ),
        ));
    }
}

/// True for a participant that is part of the modelled system and holds
/// contract code: a declared contract instance or a plain `contract` actor.
fn is_system_contract(scenario: &Scenario, alias: &str) -> bool {
    match scenario.participant(alias).map(|p| &p.kind) {
        Some(ParticipantKind::Declared(_)) => true,
        Some(ParticipantKind::Actor(ActorKind::Contract)) => true,
        _ => false,
    }
}

fn is_beneficiary(scenario: &Scenario, alias: &str) -> bool {
    matches!(
        scenario.participant(alias).map(|p| &p.kind),
        Some(ParticipantKind::Actor(ActorKind::Person | ActorKind::Account))
    )
}

/// DC-BALANCE: ether demonstrably accumulates in a system contract, yet no
/// contract is tagged with a cap or rate limit.
fn check_balance_limits(model: &SystemModel, out: &mut Vec<Diagnostic>) {
    let any_limit = model
        .contracts()
        .any(|c| c.patterns.contains(&PatternId::Bl) || c.patterns.contains(&PatternId::Rl));
    if any_limit {
        return;
    }
    let evidence = model.scenarios.iter().find_map(|s| {
        s.messages
            .iter()
            .find(|m| m.kind == MessageKind::EtherTransfer && is_system_contract(s, &m.to))
    });
    if let Some(msg) = evidence {
        out.push(diag(
            "DC-BALANCE",
            DiagLocation::Span(msg.span.clone()),
            format!(
                "ether flows into `{}` but no contract is tagged with a balance limit (BL) \
                 or rate limit (RL); cap what a bug can lose",
                msg.to
            ),
        ));
    }
}

/// DC-REENTRANCY: the activation simulation reports a participant entered
/// again while one of its own calls is still on the stack.
fn check_reentrancy(scenario: &Scenario, out: &mut Vec<Diagnostic>) {
    let report = simulate_activations(scenario);
    for reentry in &report.reentries {
        let msg = &scenario.messages[reentry.index];
        out.push(diag(
            "DC-REENTRANCY",
            DiagLocation::Span(msg.span.clone()),
            format!(
                "`{}` re-enters `{}` (message {} `{}`) while `{}` still has a call in flight; \
                 commit state changes before making external calls",
                msg.from,
                reentry.callee,
                reentry.index + 1,
                msg.label,
                reentry.callee
            ),
        ));
    }
}

/// DC-PUSHPAY: an ether transfer out of a system contract that the receiver
/// did not just request. The pull signature is the immediately preceding
/// message being a transaction from that receiver to the paying contract.
fn check_push_payments(scenario: &Scenario, out: &mut Vec<Diagnostic>) {
    for (i, msg) in scenario.messages.iter().enumerate() {
        if msg.kind != MessageKind::EtherTransfer
            || !is_system_contract(scenario, &msg.from)
            || !is_beneficiary(scenario, &msg.to)
        {
            continue;
        }
        let pulled = i > 0 && {
            let prev: &Message = &scenario.messages[i - 1];
            prev.kind == MessageKind::TransMsg && prev.from == msg.to && prev.to == msg.from
        };
        if !pulled {
            out.push(diag(
                "DC-PUSHPAY",
                DiagLocation::Span(msg.span.clone()),
                format!(
                    "`{}` pushes ether to `{}` unprompted; prefer letting `{}` withdraw \
                     through its own transaction",
                    msg.from, msg.to, msg.to
                ),
            ));
        }
    }
}

/// DC-DEPS fires only when the model actually pulls in outside code.
fn push_conditional_manual(model: &SystemModel, out: &mut Vec<Diagnostic>) {
    let mut deps: Vec<String> = Vec::new();
    for actor in &model.actors {
        if actor.kind == ActorKind::ExternalContract {
            deps.push(actor.name.clone());
        }
    }
    for c in model.contracts() {
        if c.stereotype == ContractStereotype::LibraryContract {
            deps.push(c.name.clone());
        }
    }
    if deps.is_empty() {
        return;
    }
    out.push(diag(
        "DC-DEPS",
        DiagLocation::None,
        format!(
            "the system depends on outside code ({}); confirm each dependency is audited \
             and widely used, and keep newly written code small",
            deps.join(", ")
        ),
    ));
}

fn push_unconditional_manual(out: &mut Vec<Diagnostic>) {
    let items = [
        (
            "DC-RANDOM",
            "review every use of randomness: block data and similar on-chain entropy can be \
             predicted or influenced by miners",
        ),
        (
            "DC-TIMESTAMP",
            "review time-dependent behaviour: block timestamps drift by tens of seconds under \
             miner control, and block numbers are not clocks",
        ),
        (
            "DC-ZEROBAL",
            "review balance assumptions: any address can be forced to receive ether, so never \
             require an exact balance",
        ),
        (
            "DC-TXORDER",
            "review ordering assumptions: transactions submitted close together may execute \
             in any order",
        ),
    ];
    for (rule_id, message) in items {
        out.push(diag(rule_id, DiagLocation::None, message.to_string()));
    }
    debug_assert!(out.iter().filter(|d| d.severity == Severity::Manual).count() >= 4);
}
