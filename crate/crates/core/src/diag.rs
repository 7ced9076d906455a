//! Diagnostics shared by the model validator, the design checker, the code
//! linter and the gas analyzer.

use crate::pattern::PatternId;
use crate::span::SourceSpan;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Severity of a diagnostic. The ordering is ascending, so `a >= b` asks
/// whether `a` is at least as severe as `b`; that is what `--fail-level`
/// comparisons use. `Manual` marks review items that no automated rule can
/// decide and never affects the exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Manual,
    Info,
    Warning,
    Error,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Manual => "manual",
            Severity::Info => "info",
            Severity::Warning => "warning",
            Severity::Error => "error",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "manual" => Some(Severity::Manual),
            "info" => Some(Severity::Info),
            "warning" => Some(Severity::Warning),
            "error" => Some(Severity::Error),
            _ => None,
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where a finding points. Source-level rules carry a file span; model-level
/// rules carry a path into the model; manual review items carry nothing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiagLocation {
    Span(SourceSpan),
    ModelPath { path: String },
    None,
}

impl DiagLocation {
    pub fn span(&self) -> Option<&SourceSpan> {
        match self {
            DiagLocation::Span(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for DiagLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagLocation::Span(s) => write!(f, "{s}"),
            DiagLocation::ModelPath { path } => write!(f, "model:{path}"),
            DiagLocation::None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub rule_id: String,
    pub severity: Severity,
    pub location: DiagLocation,
    pub message: String,
    /// Title of the checklist row this rule belongs to, empty for rules that
    /// sit outside the two checklists (model validation, gas).
    pub checklist_ref: String,
    /// Security patterns that mitigate this class of finding.
    pub patterns: Vec<PatternId>,
}

impl Diagnostic {
    pub fn new(
        rule_id: impl Into<String>,
        severity: Severity,
        location: DiagLocation,
        message: impl Into<String>,
    ) -> Self {
        Self {
            rule_id: rule_id.into(),
            severity,
            location,
            message: message.into(),

            checklist_ref: String::new(),
            patterns: Vec::new(),
        }
    }

    /// One-line human-readable rendering, used by the CLI and by tests that
    /// compare diagnostic lists byte for byte.
    pub fn render(&self) -> String {
        let mut line = format!("{}[{}]", self.severity, self.rule_id);
        match &self.location {
            DiagLocation::None => {}
            loc => {
                line.push(' ');
                line.push_str(&loc.to_string());
                line.push(':');
            }
        }
        line.push(' ');
        line.push_str(&self.message);
        if !self.patterns.is_empty() {
            let tags: Vec<&str> = self.patterns.iter().map(|p| p.as_str()).collect();
            line.push_str(&format!(" (patterns: {})", tags.join(", ")));
        }
        line
    }

    /// Sort key giving the (file, line, column, rule) order used for
    /// source-level diagnostic lists. Span-less entries sort last.
    pub fn source_order_key(&self) -> (String, u32, u32, String) {
        match self.location.span() {
            Some(s) => (s.file.clone(), s.line, s.column, self.rule_id.clone()),
            None => (String::from("\u{10FFFF}"), u32::MAX, u32::MAX, self.rule_id.clone()),
        }
    }
}

/// Sorts source-level diagnostics by (file, line, column, rule id), keeping
/// span-less manual items at the end.
pub fn sort_by_source(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| a.source_order_key().cmp(&b.source_order_key()));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn severity_order_matches_fail_level_semantics() {
        assert!(Severity::Error > Severity::Warning);
        assert!(Severity::Warning > Severity::Info);
        assert!(Severity::Info > Severity::Manual);
    }

    #[test]
    fn render_includes_location_and_patterns() {
        let mut d = Diagnostic::new(
            "CL-TXORIGIN",
            Severity::Error,
            DiagLocation::Span(SourceSpan::new("a.sol", 7, 17, 9)),
            "tx.origin used for authorization",
        );
        d.patterns.push(PatternId::Au);
        assert_eq!(
            d.render(),
            "error[CL-TXORIGIN] a.sol:7:17: tx.origin used for authorization (patterns: AU)"
        );
    }

    #[test]
    fn manual_items_sort_after_spanned_ones() {
        let spanned = Diagnostic::new(
            "GA-PACK",
            Severity::Warning,
            DiagLocation::Span(SourceSpan::new("a.sol", 3, 5, 1)),
            "x",
        );
        let manual = Diagnostic::new("GA-SIZE", Severity::Manual, DiagLocation::None, "y");
        let mut v = vec![manual.clone(), spanned.clone()];
        sort_by_source(&mut v);
        assert_eq!(v[0].rule_id, "GA-PACK");
        assert_eq!(v[1].rule_id, "GA-SIZE");
    }
}
