//! Canonical printer for models. `parse_model(format_model(m))` returns a
//! model structurally equal to `m`, and formatting is idempotent: formatting
//! the reparsed model reproduces the same text byte for byte.

use crate::model::*;

pub fn format_model(model: &SystemModel) -> String {
    let mut w = Writer::default();
    w.line(&format!("system {} {{", model.name));
    w.indent += 1;

    if let Some(goal) = &model.goal {
        w.line(&format!("goal {}", quote(goal)));
    }

    if !model.actors.is_empty() {
        w.blank_before_item();
        for a in &model.actors {
            w.line(&format!("actor {} : {}", a.name, a.kind.as_str()));
        }
    }

    for decl in &model.decls {
        w.blank_before_item();
        match decl {
            TopDecl::Contract(c) => format_contract(&mut w, c),
            TopDecl::Struct(s) => {
                w.line(&format!("struct {} {{", s.name));
                w.indent += 1;
                for f in &s.fields {
                    w.line(&format!("{}: {}", f.name, f.ty));
                }
                w.indent -= 1;
                w.line("}");
            }
            TopDecl::Enum(e) => {
                w.line(&format!("enum {} {{ {} }}", e.name, e.variants.join(", ")));
            }
        }
    }

    for sc in &model.scenarios {
        w.blank_before_item();
        w.line(&format!("scenario {} {{", sc.name));
        w.indent += 1;
        for p in &sc.participants {
            let kind = match &p.kind {
                ParticipantKind::Actor(k) => k.as_str().to_string(),
                ParticipantKind::Declared(c) => format!("contract {c}"),
            };
            w.line(&format!("participant {} : {kind}", p.alias));
        }
        for m in &sc.messages {
            let arrow = if m.return_arrow { "-->" } else { "->" };
            w.line(&format!(
                "{} {arrow} {} : {} [{}]",
                m.from,
                m.to,
                quote(&m.label),
                m.kind.stereotype()
            ));
        }
        w.indent -= 1;
        w.line("}");
    }

    w.indent -= 1;
    w.line("}");
    w.out
}

fn format_contract(w: &mut Writer, c: &ContractDecl) {
    let keyword = match c.stereotype {
        ContractStereotype::Contract => "contract",
        ContractStereotype::Interface => "interface",
        ContractStereotype::LibraryContract => "library",
    };
    let mut header = format!("{keyword} {}", c.name);
    if !c.parents.is_empty() {
        header.push_str(&format!(" is {}", c.parents.join(", ")));
    }
    if !c.patterns.is_empty() {
        let tags: Vec<&str> = c.patterns.iter().map(|p| p.as_str()).collect();
        header.push_str(&format!(" @pattern({})", tags.join(", ")));
    }
    header.push_str(" {");
    w.line(&header);
    w.indent += 1;

    if c.stereotype == ContractStereotype::Contract {
        if !c.state_vars.is_empty() {
            w.line("state {");
            w.indent += 1;
            for sv in &c.state_vars {
                w.line(&format!("{}: {} {}", sv.name, sv.ty, sv.visibility.as_str()));
            }
            w.indent -= 1;
            w.line("}");
        }
        if !c.events.is_empty() {
            w.line("events {");
            w.indent += 1;
            for e in &c.events {
                w.line(&format!("{}({})", e.name, params(&e.params)));
            }
            w.indent -= 1;
            w.line("}");
        }
        if !c.modifiers.is_empty() {
            w.line("modifiers {");
            w.indent += 1;
            for m in &c.modifiers {
                w.line(&format!("{};", m.name));
            }
            w.indent -= 1;
            w.line("}");
        }
        if !c.functions.is_empty() {
            w.line("functions {");
            w.indent += 1;
            for f in &c.functions {
                w.line(&fnsig(f));
            }
            w.indent -= 1;
            w.line("}");
        }
    } else {
        for f in &c.functions {
            w.line(&fnsig(f));
        }
    }

    w.indent -= 1;
    w.line("}");
}

fn fnsig(f: &FunctionSig) -> String {
    let mut s = format!("{}({}) {}", f.name, params(&f.params), f.visibility.as_str());
    if let Some(kw) = f.mutability.keyword() {
        s.push(' ');
        s.push_str(kw);
    }
    if !f.uses.is_empty() {
        s.push_str(&format!(" uses ({})", f.uses.join(", ")));
    }
    if !f.returns.is_empty() {
        let types: Vec<String> = f.returns.iter().map(|t| t.to_string()).collect();
        s.push_str(&format!(" returns ({})", types.join(", ")));
    }
    s
}

fn params(ps: &[Param]) -> String {
    ps.iter()
        .map(|p| format!("{}: {}", p.name, p.ty))
        .collect::<Vec<_>>()
        .join(", ")
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            other => out.push(other),
        }
    }
    out.push('"');
    out
}

#[derive(Default)]
struct Writer {
    out: String,
    indent: usize,
}

impl Writer {
    fn line(&mut self, text: &str) {
        for _ in 0..self.indent {
            self.out.push_str("    ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    /// Inserts one blank line between top-level items inside the system
    /// block.
    fn blank_before_item(&mut self) {
        if !self.out.ends_with("{\n") {
            self.out.push('\n');
        }
    }
}
