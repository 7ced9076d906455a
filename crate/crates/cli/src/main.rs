//! The `abcde` command line: parse models and Solidity sources, run the
//! design and coding checks, analyze gas, render diagrams, generate
//! scaffolds and build checklist reports.
//!
//! Exit codes: 0 when nothing at or above the fail level was found, 1 when
//! findings reached the fail level, 2 for usage, I/O and syntax errors.

use std::fs;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use abcde_core::analysis::{analyze_gas, check_design, lint, suggest_packing};
use abcde_core::config::Config;
use abcde_core::diag::{DiagLocation, Diagnostic, Severity};
use abcde_core::dsl::parse_model;
use abcde_core::model::{validate_model, SystemModel};
use abcde_core::report::{build_report, ChecklistReport, ReportPhase};
use abcde_core::sol::{parse_solidity, storage_layout, ContractKind, SourceUnit};
use abcde_core::span::ParseError;
use abcde_core::{diagram, scaffold};

/// Timestamp written into reports under `--reproducible`, so report files
/// can be compared byte for byte.
const PINNED_TIMESTAMP: &str = "1970-01-01T00:00:00Z";

#[derive(Parser)]
#[command(name = "abcde", version, about = "Design and audit toolchain for Solidity contracts")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Configuration file; defaults to ./abcde.toml when present.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Lowest severity that makes the run exit 1. Overrides the config
    /// file; the default is error.
    #[arg(long, global = true, value_enum, value_name = "LEVEL")]
    fail_level: Option<FailLevel>,

    /// Never emit ANSI colors.
    #[arg(long, global = true)]
    no_color: bool,

    /// Worker threads for multi-file analysis; 0 uses the CPU count.
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Parse one file (.abcde model or .sol source) and summarize it.
    Parse { file: PathBuf },

    /// Validate a model and run the design-phase checks on it.
    CheckDesign { model: PathBuf },

    /// Run the coding-phase lint rules over Solidity sources.
    CheckCode {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },

    /// Run the gas rules over Solidity sources.
    Gas {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Print storage layouts instead of gas findings.
        #[arg(long)]
        layout: bool,
        /// With --layout, emit the layouts as JSON.
        #[arg(long)]
        json: bool,
    },

    /// Render a class or sequence diagram from a model.
    Diagram {
        #[arg(value_enum)]
        kind: DiagramKind,
        model: PathBuf,
        /// Scenario to render; defaults to the model's only scenario.
        #[arg(long, value_name = "NAME")]
        scenario: Option<String>,
        #[arg(short, value_name = "FILE")]
        out: PathBuf,
    },

    /// Generate Solidity skeleton files from a model.
    Scaffold {
        model: PathBuf,
        #[arg(short, value_name = "DIR")]
        out: PathBuf,
    },

    /// Build the security assessment checklist for a phase.
    Report {
        #[arg(value_enum)]
        phase: PhaseArg,
        /// Models (.abcde) for the design phase, Solidity sources for the
        /// coding phase.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        json: bool,
        /// Pin the report timestamp so output is byte-reproducible.
        #[arg(long)]
        reproducible: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FailLevel {
    Error,
    Warning,
    Info,
}

impl FailLevel {
    fn severity(self) -> Severity {
        match self {
            FailLevel::Error => Severity::Error,
            FailLevel::Warning => Severity::Warning,
            FailLevel::Info => Severity::Info,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DiagramKind {
    Class,
    Sequence,
}

#[derive(Clone, Copy, ValueEnum)]
enum PhaseArg {
    Design,
    Coding,
}

/// Any failure that ends the run with exit 2: bad usage, unreadable
/// files, syntax errors, unwritable outputs.
struct Fatal(String);

impl Fatal {
    fn new(msg: impl Into<String>) -> Self {
        Fatal(msg.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        // A fixed pool size makes single-worker runs comparable to
        // parallel ones; errors mean the pool exists already, fine.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global();
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fatal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Fatal> {
    let config = load_config(cli)?;
    let fail_level = cli
        .fail_level
        .map(FailLevel::severity)
        .or(config.lint.fail_level)
        .unwrap_or(Severity::Error);
    let color = !cli.no_color && std::io::stdout().is_terminal();

    match &cli.command {
        Command::Parse { file } => cmd_parse(file),
        Command::CheckDesign { model } => {
            let model = load_model(model)?;
            let mut diags = validate_model(&model);
            let blocked = diags.iter().any(|d| d.severity == Severity::Error);
            if !blocked {
                diags.extend(check_design(&model));
            }
            print_diagnostics(&diags, color);
            Ok(exit_for(&diags, fail_level))
        }
        Command::CheckCode { files } => {
            let units = load_sources(files)?;
            let runs: Vec<Vec<Diagnostic>> =
                units.par_iter().map(|u| lint(u, &config.lint)).collect();
            let diags = merge_runs(runs);
            print_diagnostics(&diags, color);
            Ok(exit_for(&diags, fail_level))
        }
        Command::Gas {
            files,
            layout,
            json,
        } => {
            let units = load_sources(files)?;
            if *layout {
                return print_layouts(&units, *json);
            }
            let runs: Vec<Vec<Diagnostic>> =
                units.par_iter().map(|u| analyze_gas(u, &config.gas)).collect();
            let diags = merge_runs(runs);
            print_diagnostics(&diags, color);
            Ok(exit_for(&diags, fail_level))
        }
        Command::Diagram {
            kind,
            model,
            scenario,
            out,
        } => {
            let model = load_valid_model(model, color)?;
            let text = match kind {
                DiagramKind::Class => diagram::class_diagram(&model),
                DiagramKind::Sequence => {
                    let sc = pick_scenario(&model, scenario.as_deref())?;
                    diagram::sequence_diagram(sc)
                }
            };
            write_file(out, &text)?;
            Ok(0)
        }
        Command::Scaffold { model, out } => {
            let model = load_valid_model(model, color)?;
            let files = scaffold::generate_solidity(&model, &config.scaffold);
            fs::create_dir_all(out)
                .map_err(|e| Fatal::new(format!("cannot create {}: {e}", out.display())))?;
            for (name, source) in files {
                write_file(&out.join(name), &source)?;
            }
            Ok(0)
        }
        Command::Report {
            phase,
            inputs,
            json,
            reproducible,
        } => {
            let (phase, diags) = match phase {
                PhaseArg::Design => (ReportPhase::Design, design_diagnostics(inputs)?),
                PhaseArg::Coding => {
                    let units = load_sources(inputs)?;
                    let runs: Vec<Vec<Diagnostic>> =
                        units.par_iter().map(|u| lint(u, &config.lint)).collect();
                    (ReportPhase::Coding, merge_runs(runs))
                }
            };
            let exit = exit_for(&diags, fail_level);
            let mut report = build_report(phase, diags);
            report.generated_at = if *reproducible {
                PINNED_TIMESTAMP.to_string()
            } else {
                current_timestamp()
            };
            print_report(&report, *json);
            Ok(exit)
        }
    }
}

fn load_config(cli: &Cli) -> Result<Config, Fatal> {
    match &cli.config {
        Some(path) => Config::load(path).map_err(|e| Fatal::new(e.to_string())),
        None => {
            let default = Path::new("abcde.toml");
            if default.exists() {
                Config::load(default).map_err(|e| Fatal::new(e.to_string()))
            } else {
                Ok(Config::default())
            }
        }
    }
}

fn read(path: &Path) -> Result<String, Fatal> {
    fs::read_to_string(path).map_err(|e| Fatal::new(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Fatal> {
    fs::write(path, text).map_err(|e| Fatal::new(format!("cannot write {}: {e}", path.display())))
}

fn syntax_failure(errors: &[ParseError]) -> Fatal {
    let lines: Vec<String> = errors.iter().map(|e| e.to_string()).collect();
    Fatal::new(lines.join("\nerror: "))
}

fn load_model(path: &Path) -> Result<SystemModel, Fatal> {
    let text = read(path)?;
    parse_model(&text, &path.display().to_string()).map_err(|e| syntax_failure(&e))
}

/// Loads a model and insists it validates cleanly; generators require it.
fn load_valid_model(path: &Path, color: bool) -> Result<SystemModel, Fatal> {
    let model = load_model(path)?;
    let diags = validate_model(&model);
    if diags.iter().any(|d| d.severity == Severity::Error) {
        print_diagnostics(&diags, color);
        return Err(Fatal::new(format!(
            "{} does not validate; fix the model errors above",
            path.display()
        )));
    }
    Ok(model)
}

fn load_sources(files: &[PathBuf]) -> Result<Vec<SourceUnit>, Fatal> {
    let mut units = Vec::new();
    let mut errors = Vec::new();
    for path in files {
        let text = read(path)?;
        match parse_solidity(&text, &path.display().to_string()) {
            Ok(u) => units.push(u),
            Err(e) => errors.extend(e),
        }
    }
    if errors.is_empty() {
        Ok(units)
    } else {
        Err(syntax_failure(&errors))
    }
}

fn design_diagnostics(inputs: &[PathBuf]) -> Result<Vec<Diagnostic>, Fatal> {
    let mut diags = Vec::new();
    for path in inputs {
        let model = load_model(path)?;
        let validation = validate_model(&model);
        if let Some(err) = validation.iter().find(|d| d.severity == Severity::Error) {
            return Err(Fatal::new(format!(
                "{}: model does not validate: {}",
                path.display(),
                err.render()
            )));
        }
        diags.extend(check_design(&model));
    }
    Ok(diags)
}

/// Concatenates per-file runs in input order, keeping each span-less
/// reminder (the always-on manual items) once per run instead of once per
/// file, at the end.
fn merge_runs(runs: Vec<Vec<Diagnostic>>) -> Vec<Diagnostic> {
    let mut merged = Vec::new();
    let mut manuals: Vec<Diagnostic> = Vec::new();
    for run in runs {
        for d in run {
            if matches!(d.location, DiagLocation::None) {
                if !manuals.iter().any(|m| m.rule_id == d.rule_id) {
                    manuals.push(d);
                }
            } else {
                merged.push(d);
            }
        }
    }
    merged.extend(manuals);
    merged
}

fn exit_for(diags: &[Diagnostic], fail_level: Severity) -> u8 {
    let hit = diags
        .iter()
        .any(|d| d.severity != Severity::Manual && d.severity >= fail_level);
    if hit {
        1
    } else {
        0
    }
}

fn print_diagnostics(diags: &[Diagnostic], color: bool) {
    for d in diags {
        println!("{}", render(d, color));
    }
}

fn render(d: &Diagnostic, color: bool) -> String {
    let line = d.render();
    if !color {
        return line;
    }
    let code = match d.severity {
        Severity::Error => "31",
        Severity::Warning => "33",
        Severity::Info => "36",
        Severity::Manual => "35",
    };
    match line.split_once(' ') {
        Some((head, rest)) => format!("\x1b[{code}m{head}\x1b[0m {rest}"),
        None => line,
    }
}

fn print_report(report: &ChecklistReport, json: bool) {
    if json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.render_text());
    }
}

fn current_timestamp() -> String {
    let now = time::OffsetDateTime::now_utc()
        .replace_nanosecond(0)
        .expect("zero nanoseconds is valid");
    now.format(&time::format_description::well_known::Rfc3339)
        .unwrap_or_else(|_| PINNED_TIMESTAMP.to_string())
}

fn cmd_parse(path: &Path) -> Result<u8, Fatal> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("abcde") => {
            let model = load_model(path)?;
            println!(
                "model {}: {} contracts, {} structs, {} enums, {} scenarios",
                model.name,
                model.contracts().count(),
                model.structs().count(),
                model.enums().count(),
                model.scenarios.len()
            );
            Ok(0)
        }
        Some("sol") => {
            let text = read(path)?;
            let unit = parse_solidity(&text, &path.display().to_string())
                .map_err(|e| syntax_failure(&e))?;
            println!("{}: {} contracts", path.display(), unit.contracts.len());
            for c in &unit.contracts {
                println!(
                    "  {} {}: {} state vars, {} functions, {} modifiers, {} events",
                    kind_name(c.kind),
                    c.name,
                    c.state_vars.len(),
                    c.functions.len(),
                    c.modifiers.len(),
                    c.events.len()
                );
            }
            Ok(0)
        }
        _ => Err(Fatal::new(format!(
            "{}: expected a .abcde or .sol file",
            path.display()
        ))),
    }
}

fn kind_name(kind: ContractKind) -> &'static str {
    match kind {
        ContractKind::Contract => "contract",
        ContractKind::Interface => "interface",
        ContractKind::Library => "library",
    }
}

fn print_layouts(units: &[SourceUnit], json: bool) -> Result<u8, Fatal> {
    let mut reports = Vec::new();
    for unit in units {
        for contract in &unit.contracts {
            if contract.kind != ContractKind::Contract {
                continue;
            }
            let layout = storage_layout(contract, unit).map_err(|e| {
                Fatal::new(format!("{}: {}: {e}", unit.file, contract.name))
            })?;
            let achievable = suggest_packing(contract, unit)
                .map(|s| s.achievable_slots)
                .unwrap_or(layout.total_slots);
            reports.push((unit.file.clone(), contract.name.clone(), layout, achievable));
        }
    }

    if json {
        let value: Vec<serde_json::Value> = reports
            .iter()
            .map(|(_, name, layout, achievable)| {
                serde_json::json!({
                    "contract": name,
                    "slots": layout.entries.iter().map(|s| serde_json::json!({
                        "name": s.name,
                        "slot": s.slot,
                        "offset": s.offset,
                        "size": s.size,
                    })).collect::<Vec<_>>(),
                    "total_slots": layout.total_slots,
                    "achievable_slots": achievable,
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&value).expect("layout serializes")
        );
    } else {
        for (file, name, layout, achievable) in &reports {
            println!(
                "{file}: contract {name}: {} slots, {achievable} achievable",
                layout.total_slots
            );
            for s in &layout.entries {
                println!(
                    "  slot {:>3} offset {:>2} size {:>2}  {}",
                    s.slot, s.offset, s.size, s.name
                );
            }
        }
    }
    Ok(0)
}

fn pick_scenario<'m>(
    model: &'m SystemModel,
    wanted: Option<&str>,
) -> Result<&'m abcde_core::model::Scenario, Fatal> {
    match wanted {
        Some(name) => model
            .scenarios
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Fatal::new(format!("model has no scenario named {name}"))),
        None => match model.scenarios.as_slice() {
            [only] => Ok(only),
            [] => Err(Fatal::new("model declares no scenarios")),
            _ => Err(Fatal::new(
                "model declares several scenarios; pick one with --scenario",
            )),
        },
    }
}
