//! The published rule catalog.
//!
//! Every diagnostic's `rule_id` resolves here. Each rule carries its phase,
//! default severity, the checklist row (or gas pattern) it reports under,
//! and the security patterns that mitigate it. The two checklist tables are
//! pinned as ordered row lists; reports are built row by row from this
//! mapping, so no row can silently disappear.

use crate::diag::Severity;
use crate::pattern::PatternId;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    /// Model well-formedness; violations block every later stage.
    Model,
    Design,
    Coding,
    Gas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    /// Detected from the model or the AST.
    Automated,
    /// Reminder emitted on every run; no automation possible.
    ManualAlways,
    /// Reminder emitted only when its trigger condition holds.
    ManualConditional,
}

#[derive(Debug, Clone, Serialize)]
pub struct RuleInfo {
    pub id: &'static str,
    pub phase: Phase,
    pub severity: Severity,
    /// Checklist row (design/coding phases) or gas pattern name this rule
    /// reports under. Empty for model well-formedness rules.
    pub row: &'static str,
    pub patterns: &'static [PatternId],
    pub kind: RuleKind,
    pub summary: &'static str,
    /// When set, the rule only applies to sources whose pragma version is
    /// below this triple (unknown versions count as below).
    pub applies_below: Option<(u32, u32, u32)>,
}

/// Design-phase checklist rows, in report order.
pub const DESIGN_ROWS: [&str; 9] = [
    "Re-entrancy",
    "Dependencies",
    "Multiple Inheritance Caution",
    "Include a fail-safe mechanism",
    "Limit the amount of ether",
    "Be careful with randomness",
    "Be careful with Timestamp",
    "Never assume that a contract has zero balance",
    "Transaction Ordering",
];

/// Coding-phase checklist rows, in report order.
pub const CODING_ROWS: [&str; 13] = [
    "External calls",
    "Prevent overflow and underflow",
    "Beware of rounding errors",
    "Validate inputs to external and public functions",
    "Prevent unbounded loops",
    "tx.origin",
    "Fallback functions",
    "Check if built-in variables or functions were overridden",
    "Use interface type instead of the address for type safety",
    "Enforce invariants with assert()",
    "Lock pragmas to specific compiler version",
    "Fix compiler warnings",
    "Testing",
];

use PatternId::*;
use Phase::*;
use RuleKind::*;

macro_rules! rules {
    ($( $id:literal, $phase:expr, $sev:ident, $row:literal, [$($pat:expr),*], $kind:expr, $below:expr, $summary:literal; )*) => {
        pub static ALL_RULES: &[RuleInfo] = &[
            $(RuleInfo {
                id: $id,
                phase: $phase,
                severity: Severity::$sev,
                row: $row,
                patterns: &[$($pat),*],
                kind: $kind,
                summary: $summary,
                applies_below: $below,
            },)*
        ];
    };
}

rules! {
    // Model well-formedness. These gate everything downstream, so they are
    // all errors except the advisory oracle note.
    "MOD-DUP-NAME", Model, Error, "", [], Automated, None,
        "two top-level declarations share a name";
    "MOD-DUP-MEMBER", Model, Error, "", [], Automated, None,
        "a member name is declared twice in one scope or clashes across bases";
    "MOD-UNKNOWN-PARENT", Model, Error, "", [], Automated, None,
        "a contract inherits from a name that is not declared";
    "MOD-DUP-PARENT", Model, Error, "", [], Automated, None,
        "the same parent is listed twice in an is-clause";
    "MOD-IFACE-STATE", Model, Error, "", [], Automated, None,
        "an interface declares state variables";
    "MOD-CYCLE", Model, Error, "", [], Automated, None,
        "the inheritance graph contains a cycle";
    "MOD-C3", Model, Error, "", [], Automated, None,
        "the inheritance graph has no consistent linear order";
    "MOD-UNKNOWN-MODIFIER", Model, Error, "", [], Automated, None,
        "a function uses a modifier that no contract in scope declares";
    "MOD-UNKNOWN-TYPE", Model, Error, "", [], Automated, None,
        "a declaration references an undeclared type";
    "MOD-DUP-ALIAS", Model, Error, "", [], Automated, None,
        "two scenario participants share an alias";
    "MOD-UNKNOWN-CONTRACT", Model, Error, "", [], Automated, None,
        "a participant is bound to an undeclared contract";
    "MOD-UNKNOWN-PARTICIPANT", Model, Error, "", [], Automated, None,
        "a message endpoint is not a declared participant";
    "MOD-ACCOUNT-MSG", Model, Error, "", [], Automated, None,
        "a plain account takes part in a non-ether message";
    "MOD-TRANSMSG-SOURCE", Model, Error, "", [], Automated, None,
        "a transaction message does not go from a person to a contract";
    "MOD-ORACLE-TRANSMSG", Model, Info, "", [], Automated, None,
        "a transaction message targets an oracle, which usually answers via callbacks";
    "MOD-DIRECTMSG-ROUTE", Model, Error, "", [], Automated, None,
        "a direct message endpoint is not contract-like";
    "MOD-MSG-TARGET", Model, Error, "", [], Automated, None,
        "a call-type message targets something that cannot execute code";
    "MOD-FALLBACK-SELF", Model, Error, "", [], Automated, None,
        "a fallback message loops back to its own sender";
    "MOD-ACTIVATION", Model, Error, "", [], Automated, None,
        "a message is sent by a participant that is not activated at that point";

    // Design-phase checks over the validated model.
    "DC-REENTRANCY", Design, Error, "Re-entrancy", [Cei, Mu], Automated, None,
        "a scenario lets a participant be called back while its own call is still in flight";
    "DC-DEPS", Design, Manual, "Dependencies", [], ManualConditional, None,
        "external or library contracts are used; confirm they are audited and minimize new code";
    "DC-MI", Design, Warning, "Multiple Inheritance Caution", [], Automated, None,
        "two unrelated bases define the same function, so the linear order silently picks one";
    "DC-FAILSAFE", Design, Warning, "Include a fail-safe mechanism", [Es, Sb, Rl, Pd], Automated, None,
        "no contract is tagged with an escape, speed-bump, rate-limit or proxy pattern";
    "DC-BALANCE", Design, Warning, "Limit the amount of ether", [Rl, Bl, Wf], Automated, None,
        "ether flows into the system but no contract is tagged with a balance or rate limit";
    "DC-PUSHPAY", Design, Warning, "Limit the amount of ether", [Wf], Automated, None,
        "a contract pushes ether to an account that did not just request a withdrawal";
    "DC-RANDOM", Design, Manual, "Be careful with randomness", [], ManualAlways, None,
        "review every source of randomness; on-chain entropy can be predicted or influenced";
    "DC-TIMESTAMP", Design, Manual, "Be careful with Timestamp", [Tc], ManualAlways, None,
        "review time-dependent logic; block timestamps can drift under miner control";
    "DC-ZEROBAL", Design, Manual, "Never assume that a contract has zero balance", [], ManualAlways, None,
        "review balance invariants; anyone can force ether into an address";
    "DC-TXORDER", Design, Manual, "Transaction Ordering", [], ManualAlways, None,
        "review assumptions about transaction order; miners may reorder near-simultaneous calls";

    // Coding-phase lint rules over the Solidity AST.
    "CL-TXORIGIN", Coding, Error, "tx.origin", [], Automated, None,
        "tx.origin used in a condition; it authorizes whoever opened the call chain";
    "CL-LOWLEVEL", Coding, Error, "External calls", [Cei, Mu, Gc, Wf], Automated, None,
        "result of a low-level call is ignored, so failures pass silently";
    "CL-MULTISEND", Coding, Warning, "External calls", [Cei, Mu, Gc, Wf], Automated, None,
        "several ether transfers in one function; one failing transfer blocks the rest";
    "CL-OVERFLOW", Coding, Warning, "Prevent overflow and underflow", [Mh, Gc], Automated, Some((0, 8, 0)),
        "unchecked arithmetic on integers without a checked-math library in scope";
    "CL-DIV", Coding, Info, "Beware of rounding errors", [Mh, Gc], Automated, None,
        "integer division truncates toward zero; check the remainder is handled";
    "CL-VALIDATE", Coding, Warning, "Validate inputs to external and public functions", [Gc], Automated, None,
        "an externally callable function never checks its parameters in a require";
    "CL-UNBOUNDED", Coding, Warning, "Prevent unbounded loops", [], Automated, None,
        "loop bound depends on storage that can grow, so gas use grows with it";
    "CL-FALLBACK", Coding, Warning, "Fallback functions", [Cei, Mu, Gc], Automated, None,
        "fallback function is complex or accepts unexpected calldata";
    "CL-SHADOW", Coding, Error, "Check if built-in variables or functions were overridden", [Gc], Automated, None,
        "a declaration shadows a built-in global";
    "CL-RAWADDR", Coding, Info, "Use interface type instead of the address for type safety", [Gc], Automated, None,
        "contract-style members are invoked on a plain address parameter";
    "CL-ASSERTUSE", Coding, Warning, "Enforce invariants with assert()", [Gc], Automated, None,
        "assert used for input validation; assert is for invariants, require for inputs";
    "CL-PRAGMA", Coding, Warning, "Lock pragmas to specific compiler version", [], Automated, None,
        "pragma missing or floating, so builds may drift across compiler versions";
    "CL-TIMESTAMP", Coding, Info, "Be careful with Timestamp", [Tc], Automated, None,
        "code reads the block timestamp";
    "CL-BLOCKNUM", Coding, Warning, "Be careful with Timestamp", [Tc], Automated, None,
        "block.number compared against a literal, approximating elapsed time";
    "CL-FIXWARN", Coding, Manual, "Fix compiler warnings", [], ManualAlways, None,
        "compile with a current compiler and clear every warning";
    "CL-COVERAGE", Coding, Manual, "Testing", [], ManualAlways, None,
        "bring unit tests to full coverage including edge cases before deploying";

    // Gas rules, reported under the gas pattern names.
    "GA-PACK", Gas, Warning, "Pack your variables", [], Automated, None,
        "reordering state variables would need fewer storage slots";
    "GA-INIT", Gas, Warning, "Do not initialize variables with default values", [], Automated, None,
        "explicit initialization to the default value costs gas for no effect";
    "GA-ARRAY", Gas, Info, "Use Mappings", [], Automated, None,
        "dynamic storage array; an integer-keyed mapping is usually cheaper";
    "GA-ZEROASSIGN", Gas, Info, "Delete variables no more needed", [], Automated, None,
        "assigning zero to storage; delete earns a gas refund instead";
    "GA-LOOPSTORE", Gas, Warning, "Limit Storage", [], Automated, None,
        "storage written inside a loop; accumulate in memory and write once";
    "GA-OPORDER", Gas, Info, "Execution Paths", [], Automated, None,
        "short-circuit operands ordered so the expensive side always runs";
    "GA-PUBEXT", Gas, Info, "Limit external calls", [], Automated, None,
        "public function never called internally; external is cheaper";
    "GA-MODINLINE", Gas, Info, "Limit modifiers", [], Automated, None,
        "multi-statement modifier inlined into several functions; an internal function deduplicates the bytecode";
    "GA-LONGSTR", Gas, Warning, "Pack your variables", [], Automated, None,
        "revert reason longer than 32 bytes takes extra storage words";
    "GA-BYTES32", Gas, Info, "Pack your variables", [], Automated, None,
        "string or bytes variable only ever holds short literals; bytes32 packs better";
    "GA-SIZE", Gas, Manual, "Code size limit", [], ManualAlways, None,
        "deployed bytecode must stay under the 24 KB limit of EIP-170; check the compiled size";
    "GA-USELIB", Gas, Manual, "Use libraries", [], ManualAlways, None,
        "consider extracting complex logic into external libraries to shrink the contract";
    "GA-EVENTLOG", Gas, Manual, "Event Log", [], ManualAlways, None,
        "serve historical queries from the event log instead of contract storage";
}

pub fn rule(id: &str) -> Option<&'static RuleInfo> {
    ALL_RULES.iter().find(|r| r.id == id)
}

/// Rules reporting under a given checklist row of a phase, in catalog order.
pub fn rules_for_row(phase: Phase, row: &str) -> impl Iterator<Item = &'static RuleInfo> + '_ {
    ALL_RULES
        .iter()
        .filter(move |r| r.phase == phase && r.row == row)
}

/// Whether a rule applies to a source with the given pragma version. An
/// unknown version never disables a rule.
pub fn applies_to_version(info: &RuleInfo, version: Option<(u32, u32, u32)>) -> bool {
    match (info.applies_below, version) {
        (Some(limit), Some(v)) => v < limit,
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn rule_ids_are_unique() {
        let mut seen = BTreeSet::new();
        for r in ALL_RULES {
            assert!(seen.insert(r.id), "duplicate rule id {}", r.id);
        }
    }

    #[test]
    fn manual_rules_have_manual_severity() {
        for r in ALL_RULES {
            match r.kind {
                RuleKind::ManualAlways | RuleKind::ManualConditional => {
                    assert_eq!(r.severity, Severity::Manual, "{}", r.id)
                }
                RuleKind::Automated => assert_ne!(r.severity, Severity::Manual, "{}", r.id),
            }
        }
    }

    #[test]
    fn every_design_row_has_a_rule() {
        for row in DESIGN_ROWS {
            assert!(
                rules_for_row(Phase::Design, row).next().is_some(),
                "no rule reports under design row {row:?}"
            );
        }
    }

    #[test]
    fn every_coding_row_has_a_rule() {
        for row in CODING_ROWS {
            assert!(
                rules_for_row(Phase::Coding, row).next().is_some(),
                "no rule reports under coding row {row:?}"
            );
        }
    }

    #[test]
    fn rows_resolve_to_their_phase_table() {
        for r in ALL_RULES {
            match r.phase {
                Phase::Model => assert!(r.row.is_empty(), "{}", r.id),
                Phase::Design => assert!(DESIGN_ROWS.contains(&r.row), "{}", r.id),
                Phase::Coding => {
                    // Two timestamp rules surface a design-row concern from
                    // code; the coding report lists them in its appendix.
                    assert!(
                        CODING_ROWS.contains(&r.row) || DESIGN_ROWS.contains(&r.row),
                        "{}",
                        r.id
                    );
                }
                Phase::Gas => assert!(!r.row.is_empty(), "{}", r.id),
            }
        }
    }

    #[test]
    fn version_gating() {
        let overflow = rule("CL-OVERFLOW").unwrap();
        assert!(applies_to_version(overflow, Some((0, 5, 16))));
        assert!(applies_to_version(overflow, None));
        assert!(!applies_to_version(overflow, Some((0, 8, 0))));
        assert!(!applies_to_version(overflow, Some((0, 8, 21))));
        let txo = rule("CL-TXORIGIN").unwrap();
        assert!(applies_to_version(txo, Some((0, 8, 21))));
    }

    #[test]
    fn lookup_matches_validation_emitters() {
        for id in [
            "MOD-DUP-NAME",
            "MOD-ACTIVATION",
            "DC-REENTRANCY",
            "CL-TXORIGIN",
            "GA-PACK",
        ] {
            assert!(rule(id).is_some(), "{id} missing from catalog");
        }
        assert!(rule("CL-NOPE").is_none());
    }
}
