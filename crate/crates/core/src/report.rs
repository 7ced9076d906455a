//! Checklist reports: the per-phase security assessment document.
//!
//! A report walks the published row table of its phase in order, groups
//! the diagnostics under each row via the rule catalog, and marks every
//! row `pass`, `findings(n)` or `manual`. Rows never disappear: a silent
//! report still lists all of them, which is the point of a checklist.
//!
//! Two coding rules (`CL-TIMESTAMP`, `CL-BLOCKNUM`) report under a
//! design-phase row because the concern they detect is a design one that
//! only becomes visible in code. The coding report lists them in an
//! appendix after the thirteen table rows instead of dropping them.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::catalog::{self, Phase, RuleKind, CODING_ROWS, DESIGN_ROWS};
use crate::diag::{sort_by_source, Diagnostic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportPhase {
    Design,
    Coding,
}

impl ReportPhase {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportPhase::Design => "design",
            ReportPhase::Coding => "coding",
        }
    }

    fn catalog_phase(self) -> Phase {
        match self {
            ReportPhase::Design => Phase::Design,
            ReportPhase::Coding => Phase::Coding,
        }
    }

    fn row_titles(self) -> &'static [&'static str] {
        match self {
            ReportPhase::Design => &DESIGN_ROWS,
            ReportPhase::Coding => &CODING_ROWS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RowStatus {
    Pass,
    Findings { count: usize },
    Manual,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub title: String,
    pub rule_ids: Vec<String>,
    pub status: RowStatus,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChecklistReport {
    pub phase: ReportPhase,
    pub rows: Vec<ReportRow>,
    /// Rows for rules of this phase that report under another phase's
    /// table; empty unless such a rule fired.
    pub appendix: Vec<ReportRow>,
    /// Timestamp text; the builder leaves it empty and the caller stamps
    /// it (a pinned value under `--reproducible`).
    pub generated_at: String,
    pub tool_version: String,
}

/// Groups diagnostics under the checklist rows of `phase`. Diagnostics of
/// rules from other phases are ignored; the caller routes each engine's
/// output to the matching report.
pub fn build_report(phase: ReportPhase, mut diagnostics: Vec<Diagnostic>) -> ChecklistReport {
    sort_by_source(&mut diagnostics);
    let cphase = phase.catalog_phase();

    let mut rows = Vec::new();
    for title in phase.row_titles() {
        rows.push(make_row(cphase, title, &diagnostics));
    }

    let table: BTreeSet<&str> = phase.row_titles().iter().copied().collect();
    let mut appendix = Vec::new();
    let mut extra_titles = Vec::new();
    for r in catalog::ALL_RULES {
        if r.phase == cphase && !table.contains(r.row) && !extra_titles.contains(&r.row) {
            extra_titles.push(r.row);
        }
    }
    for title in extra_titles {
        let row = make_row(cphase, title, &diagnostics);
        if !row.diagnostics.is_empty() {
            appendix.push(row);
        }
    }

    ChecklistReport {
        phase,
        rows,
        appendix,
        generated_at: String::new(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

fn make_row(cphase: Phase, title: &str, diagnostics: &[Diagnostic]) -> ReportRow {
    let rules: Vec<_> = catalog::rules_for_row(cphase, title).collect();
    let rule_ids: Vec<String> = rules.iter().map(|r| r.id.to_string()).collect();
    let row_diags: Vec<Diagnostic> = diagnostics
        .iter()
        .filter(|d| rule_ids.iter().any(|id| *id == d.rule_id))
        .cloned()
        .collect();

    let automated: BTreeSet<&str> = rules
        .iter()
        .filter(|r| r.kind == RuleKind::Automated)
        .map(|r| r.id)
        .collect();
    let findings = row_diags
        .iter()
        .filter(|d| automated.contains(d.rule_id.as_str()))
        .count();

    let status = if automated.is_empty() {
        RowStatus::Manual
    } else if findings == 0 {
        RowStatus::Pass
    } else {
        RowStatus::Findings { count: findings }
    };

    ReportRow {
        title: title.to_string(),
        rule_ids,
        status,
        diagnostics: row_diags,
    }
}

impl ChecklistReport {
    /// Plain-text rendering, one numbered line per row with the grouped
    /// diagnostics indented beneath it.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "Security assessment checklist, {} phase\n",
            self.phase.as_str()
        ));
        if !self.generated_at.is_empty() {
            out.push_str(&format!("generated: {}\n", self.generated_at));
        }
        out.push_str(&format!("tool: abcde-kit {}\n\n", self.tool_version));

        for (i, row) in self.rows.iter().enumerate() {
            render_row(&mut out, Some(i + 1), row);
        }
        if !self.appendix.is_empty() {
            out.push_str("\nAppendix: design concerns surfaced by the code\n");
            for row in &self.appendix {
                render_row(&mut out, None, row);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn render_row(out: &mut String, number: Option<usize>, row: &ReportRow) {
    let status = match row.status {
        RowStatus::Pass => "[pass]".to_string(),
        RowStatus::Findings { count } => format!("[findings: {count}]"),
        RowStatus::Manual => "[manual]".to_string(),
    };
    match number {
        Some(n) => out.push_str(&format!("{n:>2}. {status:<14} {}", row.title)),
        None => out.push_str(&format!("    {status:<14} {}", row.title)),
    }
    out.push_str(&format!(" ({})\n", row.rule_ids.join(", ")));
    for d in &row.diagnostics {
        out.push_str("        ");
        out.push_str(&d.render());
        out.push('\n');
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::{DiagLocation, Severity};
    use crate::span::SourceSpan;

    fn diag(rule: &str, severity: Severity, line: u32) -> Diagnostic {
        let mut d = Diagnostic::new(
            rule,
            severity,
            DiagLocation::Span(SourceSpan::new("a.sol", line, 1, 1)),
            format!("{rule} fired"),
        );
        if let Some(info) = catalog::rule(rule) {
            d.checklist_ref = info.row.to_string();
        }
        d
    }

    #[test]
    fn row_tables_are_pinned() {
        let design = build_report(ReportPhase::Design, Vec::new());
        assert_eq!(design.rows.len(), 9);
        let coding = build_report(ReportPhase::Coding, Vec::new());
        assert_eq!(coding.rows.len(), 13);
        let titles: Vec<&str> = coding.rows.iter().map(|r| r.title.as_str()).collect();
        assert_eq!(titles, CODING_ROWS.to_vec());
    }

    #[test]
    fn empty_input_gives_pass_or_manual_everywhere() {
        for phase in [ReportPhase::Design, ReportPhase::Coding] {
            let report = build_report(phase, Vec::new());
            for row in &report.rows {
                assert!(
                    matches!(row.status, RowStatus::Pass | RowStatus::Manual),
                    "{}: {:?}",
                    row.title,
                    row.status
                );
                assert!(row.diagnostics.is_empty());
            }
            assert!(report.appendix.is_empty());
        }
    }

    #[test]
    fn findings_count_lands_in_the_right_row() {
        let report = build_report(
            ReportPhase::Coding,
            vec![
                diag("CL-UNBOUNDED", Severity::Warning, 4),
                diag("CL-UNBOUNDED", Severity::Warning, 9),
            ],
        );
        let row = report
            .rows
            .iter()
            .find(|r| r.title == "Prevent unbounded loops")
            .unwrap();
        assert_eq!(row.status, RowStatus::Findings { count: 2 });
        assert_eq!(row.diagnostics.len(), 2);
        for other in report.rows.iter().filter(|r| r.title != row.title) {
            assert!(matches!(other.status, RowStatus::Pass | RowStatus::Manual));
        }
    }

    #[test]
    fn design_reentrancy_groups_under_its_row() {
        let mut d = Diagnostic::new(
            "DC-REENTRANCY",
            Severity::Error,
            DiagLocation::ModelPath {
                path: "scenario Drain".to_string(),
            },
            "participant called back mid-flight",
        );
        d.checklist_ref = "Re-entrancy".to_string();
        let report = build_report(ReportPhase::Design, vec![d]);
        assert_eq!(
            report.rows[0].status,
            RowStatus::Findings { count: 1 },
            "Re-entrancy is the first design row"
        );
    }

    #[test]
    fn manual_reminders_sit_under_manual_rows() {
        let reminder = Diagnostic::new(
            "CL-COVERAGE",
            Severity::Manual,
            DiagLocation::None,
            "bring unit tests to full coverage",
        );
        let report = build_report(ReportPhase::Coding, vec![reminder]);
        let row = report.rows.iter().find(|r| r.title == "Testing").unwrap();
        assert_eq!(row.status, RowStatus::Manual);
        assert_eq!(row.diagnostics.len(), 1);
    }

    #[test]
    fn timestamp_findings_go_to_the_coding_appendix() {
        let report = build_report(
            ReportPhase::Coding,
            vec![diag("CL-TIMESTAMP", Severity::Info, 7)],
        );
        assert_eq!(report.rows.len(), 13);
        assert!(report
            .rows
            .iter()
            .all(|r| !r.rule_ids.contains(&"CL-TIMESTAMP".to_string())));
        assert_eq!(report.appendix.len(), 1);
        let extra = &report.appendix[0];
        assert_eq!(extra.title, "Be careful with Timestamp");
        assert_eq!(extra.status, RowStatus::Findings { count: 1 });
    }

    #[test]
    fn quiet_timestamp_rules_leave_no_appendix() {
        let report = build_report(
            ReportPhase::Coding,
            vec![diag("CL-TXORIGIN", Severity::Error, 2)],
        );
        assert!(report.appendix.is_empty());
    }

    #[test]
    fn text_rendering_shows_status_and_grouped_lines() {
        let mut report = build_report(
            ReportPhase::Coding,
            vec![diag("CL-TXORIGIN", Severity::Error, 2)],
        );
        report.generated_at = "2026-01-01T00:00:00Z".to_string();
        let text = report.render_text();
        assert!(text.starts_with("Security assessment checklist, coding phase\n"));
        assert!(text.contains("generated: 2026-01-01T00:00:00Z\n"));
        assert!(text.contains("[findings: 1]  tx.origin (CL-TXORIGIN)\n"));
        assert!(text.contains("        error[CL-TXORIGIN] a.sol:2:1: CL-TXORIGIN fired\n"));
        assert!(text.contains("[manual]       Testing (CL-COVERAGE)\n"));
    }

    #[test]
    fn json_rendering_is_parseable_and_stable() {
        let report = build_report(
            ReportPhase::Design,
            vec![diag("DC-MI", Severity::Warning, 3)],
        );
        let a = report.to_json();
        let b = report.to_json();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["phase"], "design");
        assert_eq!(v["rows"].as_array().unwrap().len(), 9);
        assert_eq!(v["rows"][2]["status"]["kind"], "findings");
        assert_eq!(v["rows"][2]["status"]["count"], 1);
    }

    #[test]
    fn diagnostics_are_sorted_within_rows() {
        let report = build_report(
            ReportPhase::Coding,
            vec![
                diag("CL-UNBOUNDED", Severity::Warning, 9),
                diag("CL-UNBOUNDED", Severity::Warning, 4),
            ],
        );
        let row = report
            .rows
            .iter()
            .find(|r| r.title == "Prevent unbounded loops")
            .unwrap();
        let lines: Vec<u32> = row
            .diagnostics
            .iter()
            .map(|d| d.location.span().unwrap().line)
            .collect();
        assert_eq!(lines, vec![4, 9]);
    }
}
