//! Core library of the abcde-kit: a design-and-audit toolchain for
//! Solidity smart contracts.
//!
//! The crate is organised around two input languages and the analyses that
//! consume them:
//!
//! - [`dsl`] parses the contract-oriented modeling language into a
//!   [`model::SystemModel`] (actors, contracts with stereotypes and security
//!   pattern tags, interaction scenarios).
//! - [`sol`] parses a Solidity 0.5.x subset into a [`sol::SourceUnit`] and
//!   computes storage layouts.
//! - [`analysis`] runs the design checks, code lint rules, and gas rules,
//!   producing [`diag::Diagnostic`] values tied to a rule catalog.
//! - [`diagram`], [`scaffold`] and [`report`] turn models and findings into
//!   diagram files, Solidity skeletons and checklist reports.

pub mod catalog;
pub mod config;
pub mod diag;
pub mod diagram;
pub mod dsl;
pub mod lex;
pub mod model;
pub mod pattern;
pub mod report;
pub mod scaffold;
pub mod sol;
pub mod span;

pub mod analysis;

pub use analysis::{analyze_gas, check_design, lint, suggest_packing};
pub use diag::{DiagLocation, Diagnostic, Severity};
pub use diagram::{class_diagram, sequence_diagram};
pub use dsl::{format_model, parse_model};
pub use model::{simulate_activations, validate_model, SystemModel};
pub use pattern::{PatternId, ALL_PATTERNS};
pub use report::{build_report, ChecklistReport, ReportPhase};
pub use scaffold::generate_solidity;
pub use sol::{parse_solidity, storage_layout, SourceUnit, StorageLayout};
pub use span::{ParseError, SourceSpan};
