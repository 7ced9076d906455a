//! Recursive descent parser for the Solidity subset.
//!
//! Top-level and contract-level structure must parse; statements that fall
//! outside the subset (assembly, typed tuple destructuring, bitwise
//! arithmetic and so on) are consumed as balanced token runs and recorded as
//! `Stmt::Opaque` so the analyses never crash on real-world sources.

use super::ast::*;
use crate::lex::{lex, Token, TokenKind, SOL_OPTIONS};
use crate::model::{ElementaryType, Mutability, TypeName, Visibility};
use crate::span::{ParseError, SourceSpan};
use std::collections::{BTreeMap, BTreeSet};

pub fn parse_solidity(text: &str, file: &str) -> Result<SourceUnit, Vec<ParseError>> {
    let lexed = lex(text, file, &SOL_OPTIONS);
    if !lexed.errors.is_empty() {
        return Err(lexed.errors);
    }

    let mut suppressions: BTreeMap<u32, BTreeSet<String>> = BTreeMap::new();
    for (line, comment) in &lexed.line_comments {
        if let Some(rules) = parse_allow_comment(comment) {
            suppressions.entry(line + 1).or_default().extend(rules);
        }
    }

    let mut p = SolParser {
        tokens: lexed.tokens,
        pos: 0,
        errors: Vec::new(),
        file: file.to_string(),
    };
    let unit = p.parse_unit(suppressions);
    if p.errors.is_empty() {
        Ok(unit)
    } else {
        Err(p.errors)
    }
}

const NUMBER_UNITS: [&str; 9] = [
    "wei", "szabo", "finney", "ether", "seconds", "minutes", "hours", "days", "weeks",
];

/// Recognises `abcde:allow(RULE[,RULE...])` suppression comments.
fn parse_allow_comment(comment: &str) -> Option<Vec<String>> {
    let rest = comment.trim().strip_prefix("abcde:allow(")?;
    let inner = rest.strip_suffix(')')?;
    Some(
        inner
            .split(',')
            .map(|r| r.trim().to_string())
            .filter(|r| !r.is_empty())
            .collect(),
    )
}

struct SolParser {
    tokens: Vec<Token>,
    pos: usize,
    errors: Vec<ParseError>,
    file: String,
}

impl SolParser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_at(&self, n: usize) -> &Token {
        &self.tokens[(self.pos + n).min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek().kind, TokenKind::Eof)
    }

    fn error_here(&mut self, expected: &str) {
        let t = self.peek();
        self.errors
            .push(ParseError::new(t.span.clone(), expected, t.kind.describe()));
    }

    fn expect_punct(&mut self, p: &str) -> Result<Token, ()> {
        if self.peek().is_punct(p) {
            Ok(self.bump())
        } else {
            self.error_here(&format!("`{p}`"));
            Err(())
        }
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.peek().is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, SourceSpan), ()> {
        match &self.peek().kind {
            TokenKind::Ident(_) => {
                let t = self.bump();
                let TokenKind::Ident(name) = t.kind else { unreachable!() };
                Ok((name, t.span))
            }
            _ => {
                self.error_here(what);
                Err(())
            }
        }
    }

    fn eat_keyword(&mut self, word: &str) -> bool {
        if self.peek().is_ident(word) {
            self.bump();
            true
        } else {
            false
        }
    }

    /// Skips to the next `;` or balanced closing position, for recovery at
    /// declaration level.
    fn skip_past_semicolon_or_block(&mut self) {
        let mut depth = 0usize;
        while !self.at_eof() {
            let t = self.bump();
            match &t.kind {
                TokenKind::Punct(";") if depth == 0 => return,
                TokenKind::Punct("{") => depth += 1,
                TokenKind::Punct("}") => {
                    if depth <= 1 {
                        return;
                    }
                    depth -= 1;
                }
                _ => {}
            }
        }
    }

    fn parse_unit(&mut self, suppressions: BTreeMap<u32, BTreeSet<String>>) -> SourceUnit {
        let mut unit = SourceUnit {
            file: self.file.clone(),
            pragma: None,
            other_pragmas: Vec::new(),
            imports: Vec::new(),
            contracts: Vec::new(),
            suppressions,
        };

        while !self.at_eof() {
            if self.peek().is_ident("pragma") {
                self.parse_pragma(&mut unit);
            } else if self.peek().is_ident("import") {
                self.parse_import(&mut unit);
            } else if self.peek().is_ident("contract")
                || self.peek().is_ident("interface")
                || self.peek().is_ident("library")
            {
                if let Ok(c) = self.parse_contract() {
                    if unit.contracts.iter().any(|other| other.name == c.name) {
                        self.errors.push(ParseError::new(
                            c.span.clone(),
                            "a unique contract name in this file",
                            format!("a second contract named `{}`", c.name),
                        ));
                    }
                    unit.contracts.push(c);
                }
            } else {
                self.error_here("`pragma`, `import` or a contract declaration");
                self.skip_past_semicolon_or_block();
            }
        }
        unit
    }

    fn parse_pragma(&mut self, unit: &mut SourceUnit) {
        let start = self.bump(); // `pragma`
        let mut body = Vec::new();
        while !self.at_eof() && !self.peek().is_punct(";") {
            body.push(self.bump());
        }
        if !self.eat_punct(";") {
            self.error_here("`;` ending the pragma");
            return;
        }
        let raw = render_tokens(&body);
        let is_version_pragma = body.first().is_some_and(|t| t.is_ident("solidity"));
        if !is_version_pragma {
            unit.other_pragmas.push(raw);
            return;
        }
        if unit.pragma.is_some() {
            self.errors.push(ParseError::new(
                start.span,
                "a single version pragma per file",
                "a second `pragma solidity`".to_string(),
            ));
            return;
        }
        let constraint = &body[1..];
        unit.pragma = Some(PragmaDirective {
            raw,
            locked: constraint_is_locked(constraint),
            version: first_version_triple(constraint),
            span: start.span,
        });
    }

    fn parse_import(&mut self, unit: &mut SourceUnit) {
        self.bump(); // `import`
        let mut path = None;
        while !self.at_eof() && !self.peek().is_punct(";") {
            let t = self.bump();
            if let TokenKind::Str(s) = t.kind {
                path.get_or_insert(s);
            }
        }
        if !self.eat_punct(";") {
            self.error_here("`;` ending the import");
            return;
        }
        match path {
            Some(p) => unit.imports.push(p),
            None => self.error_here("a quoted import path before `;`"),
        }
    }

    fn parse_contract(&mut self) -> Result<ContractDef, ()> {
        let kw = self.bump();
        let kind = match &kw.kind {
            TokenKind::Ident(w) if w == "interface" => ContractKind::Interface,
            TokenKind::Ident(w) if w == "library" => ContractKind::Library,
            _ => ContractKind::Contract,
        };
        let (name, span) = self.expect_ident("the contract name")?;

        let mut def = ContractDef {
            name,
            kind,
            parents: Vec::new(),
            state_vars: Vec::new(),
            functions: Vec::new(),
            modifiers: Vec::new(),
            events: Vec::new(),
            structs: Vec::new(),
            enums: Vec::new(),
            usings: Vec::new(),
            span,
        };

        if self.eat_keyword("is") {
            loop {
                let (parent, _) = self.expect_ident("a base contract name")?;
                // Constructor arguments in the inheritance specifier are
                // accepted and skipped; only the name matters here.
                if self.eat_punct("(") {
                    let mut depth = 1usize;
                    while depth > 0 && !self.at_eof() {
                        let t = self.bump();
                        match &t.kind {
                            TokenKind::Punct("(") => depth += 1,
                            TokenKind::Punct(")") => depth -= 1,
                            _ => {}
                        }
                    }
                }
                def.parents.push(parent);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }

        self.expect_punct("{")?;
        while !self.peek().is_punct("}") {
            if self.at_eof() {
                self.error_here("`}` closing the contract body");
                return Err(());
            }
            self.parse_contract_part(&mut def);
        }
        self.bump();
        Ok(def)
    }

    fn parse_contract_part(&mut self, def: &mut ContractDef) {
        let word = self.peek().ident().map(str::to_string);
        let result = match word.as_deref() {
            Some("using") => self.parse_using(def),
            Some("function") => self.parse_function(def, false),
            Some("constructor") => self.parse_function(def, true),
            Some("modifier") => self.parse_modifier(def),
            Some("event") => self.parse_event(def),
            Some("struct") => self.parse_struct(def),
            Some("enum") => self.parse_enum(def),
            Some(_) => self.parse_state_var(def),
            None => {
                self.error_here("a contract member");
                Err(())
            }
        };
        if result.is_err() {
            self.skip_past_semicolon_or_block();
        }
    }

    fn parse_using(&mut self, def: &mut ContractDef) -> Result<(), ()> {
        let kw = self.bump();
        let (library, _) = self.expect_ident("the library name")?;
        if !self.eat_keyword("for") {
            self.error_here("`for`");
            return Err(());
        }
        let target = if self.eat_punct("*") {
            None
        } else {
            Some(self.parse_type_name()?)
        };
        self.expect_punct(";")?;
        def.usings.push(UsingDecl {
            library,
            target,
            span: kw.span,
        });
        Ok(())
    }

    fn parse_function(&mut self, def: &mut ContractDef, is_constructor: bool) -> Result<(), ()> {
        let kw = self.bump(); // `function` or `constructor`
        let mut name = String::new();
        let mut is_fallback = false;
        if !is_constructor {
            match &self.peek().kind {
                TokenKind::Ident(_) => {
                    let (n, _) = self.expect_ident("the function name")?;
                    name = n;
                }
                TokenKind::Punct("(") => is_fallback = true,
                _ => {
                    self.error_here("the function name or `(`");
                    return Err(());
                }
            }
        }

        self.expect_punct("(")?;
        let params = self.parse_param_list()?;

        let mut visibility = Visibility::Public;
        let mut mutability = Mutability::NonPayable;
        let mut applied_modifiers = Vec::new();
        let mut returns = Vec::new();
        loop {
            if self.peek().is_punct("{") || self.peek().is_punct(";") {
                break;
            }
            match self.peek().ident() {
                Some("public") => {
                    visibility = Visibility::Public;
                    self.bump();
                }
                Some("external") => {
                    visibility = Visibility::External;
                    self.bump();
                }
                Some("internal") => {
                    visibility = Visibility::Internal;
                    self.bump();
                }
                Some("private") => {
                    visibility = Visibility::Private;
                    self.bump();
                }
                Some("payable") => {
                    mutability = Mutability::Payable;
                    self.bump();
                }
                Some("view") | Some("constant") => {
                    mutability = Mutability::View;
                    self.bump();
                }
                Some("pure") => {
                    mutability = Mutability::Pure;
                    self.bump();
                }
                Some("returns") => {
                    self.bump();
                    self.expect_punct("(")?;
                    returns = self.parse_param_list()?;
                }
                Some(_) => {
                    let (mname, mspan) = self.expect_ident("a modifier name")?;
                    let mut args = Vec::new();
                    if self.eat_punct("(") {
                        if !self.peek().is_punct(")") {
                            loop {
                                args.push(self.parse_expr()?);
                                if !self.eat_punct(",") {
                                    break;
                                }
                            }
                        }
                        self.expect_punct(")")?;
                    }
                    applied_modifiers.push(ModifierInvocation {
                        name: mname,
                        args,
                        span: mspan,
                    });
                }
                None => {
                    self.error_here("a function attribute, `{` or `;`");
                    return Err(());
                }
            }
        }

        let body = if self.eat_punct(";") {
            None
        } else {
            Some(self.parse_block_stmts()?)
        };

        if is_fallback && def.fallback().is_some() {
            // The definition is fully consumed by now, so no token recovery
            // is needed; just record the error.
            self.errors.push(ParseError::new(
                kw.span.clone(),
                "at most one fallback function per contract",
                "a second fallback definition".to_string(),
            ));
            return Ok(());
        }

        def.functions.push(FuncDef {
            name,
            params,
            returns,
            visibility,
            mutability,
            applied_modifiers,
            body,
            is_constructor,
            is_fallback,
            span: kw.span,
        });
        Ok(())
    }

    fn parse_modifier(&mut self, def: &mut ContractDef) -> Result<(), ()> {
        self.bump(); // `modifier`
        let (name, span) = self.expect_ident("the modifier name")?;
        let params = if self.eat_punct("(") {
            self.parse_param_list()?
        } else {
            Vec::new()
        };
        let body = self.parse_block_stmts()?;
        def.modifiers.push(ModifierDef {
            name,
            params,
            body,
            span,
        });
        Ok(())
    }

    fn parse_event(&mut self, def: &mut ContractDef) -> Result<(), ()> {
        self.bump(); // `event`
        let (name, span) = self.expect_ident("the event name")?;
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if !self.peek().is_punct(")") {
            loop {
                let ty = self.parse_type_name()?;
                let indexed = self.eat_keyword("indexed");
                let pname = match &self.peek().kind {
                    TokenKind::Ident(_) => self.expect_ident("a parameter name")?.0,
                    _ => String::new(),
                };
                params.push(EventParam {
                    name: pname,
                    ty,
                    indexed,
                });
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        let anonymous = self.eat_keyword("anonymous");
        self.expect_punct(";")?;
        def.events.push(EventDef {
            name,
            params,
            anonymous,
            span,
        });
        Ok(())
    }

    fn parse_struct(&mut self, def: &mut ContractDef) -> Result<(), ()> {
        self.bump(); // `struct`
        let (name, span) = self.expect_ident("the struct name")?;
        self.expect_punct("{")?;
        let mut fields = Vec::new();
        while !self.peek().is_punct("}") {
            if self.at_eof() {
                self.error_here("`}` closing the struct");
                return Err(());
            }
            let ty = self.parse_type_name()?;
            let (fname, _) = self.expect_ident("the field name")?;
            self.expect_punct(";")?;
            fields.push(SolParam {
                name: fname,
                ty,
                location: None,
            });
        }
        self.bump();
        def.structs.push(StructDef { name, fields, span });
        Ok(())
    }

    fn parse_enum(&mut self, def: &mut ContractDef) -> Result<(), ()> {
        self.bump(); // `enum`
        let (name, span) = self.expect_ident("the enum name")?;
        self.expect_punct("{")?;
        let mut variants = Vec::new();
        if !self.peek().is_punct("}") {
            loop {
                let (v, _) = self.expect_ident("an enum member")?;
                variants.push(v);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct("}")?;
        def.enums.push(EnumDef {
            name,
            variants,
            span,
        });
        Ok(())
    }

    fn parse_state_var(&mut self, def: &mut ContractDef) -> Result<(), ()> {
        let ty = self.parse_type_name()?;
        let mut visibility = Visibility::Internal;
        let mut is_constant = false;
        loop {
            match self.peek().ident() {
                Some("public") => {
                    visibility = Visibility::Public;
                    self.bump();
                }
                Some("internal") => {
                    visibility = Visibility::Internal;
                    self.bump();
                }
                Some("private") => {
                    visibility = Visibility::Private;
                    self.bump();
                }
                Some("constant") => {
                    is_constant = true;
                    self.bump();
                }
                _ => break,
            }
        }
        let (name, span) = self.expect_ident("the variable name")?;
        let initializer = if self.eat_punct("=") {
            Some(self.parse_expr()?)
        } else {
            None
        };
        self.expect_punct(";")?;
        if is_constant && initializer.is_none() {
            self.errors.push(ParseError::new(
                span.clone(),
                "an initializer (constants must be assigned at declaration)",
                "none".to_string(),
            ));
            return Ok(());
        }
        def.state_vars.push(VarDecl {
            name,
            ty,
            visibility,
            is_constant,
            initializer,
            span,
        });
        Ok(())
    }

    fn parse_param_list(&mut self) -> Result<Vec<SolParam>, ()> {
        let mut params = Vec::new();
        if self.eat_punct(")") {
            return Ok(params);
        }
        loop {
            let ty = self.parse_type_name()?;
            let location = self.eat_data_location();
            let name = match &self.peek().kind {
                TokenKind::Ident(_) => self.expect_ident("a parameter name")?.0,
                _ => String::new(),
            };
            params.push(SolParam { name, ty, location });
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(")")?;
        Ok(params)
    }

    fn eat_data_location(&mut self) -> Option<DataLocation> {
        let loc = match self.peek().ident()? {
            "memory" => DataLocation::Memory,
            "storage" => DataLocation::Storage,
            "calldata" => DataLocation::Calldata,
            _ => return None,
        };
        self.bump();
        Some(loc)
    }

    fn parse_type_name(&mut self) -> Result<TypeName, ()> {
        let mut ty = if self.peek().is_ident("mapping") {
            self.bump();
            self.expect_punct("(")?;
            let key = self.parse_type_name()?;
            self.expect_punct("=>")?;
            let value = self.parse_type_name()?;
            self.expect_punct(")")?;
            TypeName::Mapping(Box::new(key), Box::new(value))
        } else {
            let (word, _) = self.expect_ident("a type")?;
            if word == "address" && self.eat_keyword("payable") {
                TypeName::Elementary(ElementaryType::AddressPayable)
            } else {
                match ElementaryType::parse(&word) {
                    Some(e) => TypeName::Elementary(e),
                    None => {
                        let mut qualified = word;
                        while self.peek().is_punct(".")
                            && matches!(self.peek_at(1).kind, TokenKind::Ident(_))
                        {
                            self.bump();
                            let (part, _) = self.expect_ident("a type name")?;
                            qualified.push('.');
                            qualified.push_str(&part);
                        }
                        TypeName::UserDefined(qualified)
                    }
                }
            }
        };

        loop {
            if !self.peek().is_punct("[") {
                break;
            }
            if self.peek_at(1).is_punct("]") {
                self.bump();
                self.bump();
                ty = TypeName::Array(Box::new(ty));
            } else if let TokenKind::Number(n) = &self.peek_at(1).kind {
                let size: u64 = match n.parse() {
                    Ok(s) => s,
                    Err(_) => {
                        self.error_here("a fixed array size that fits in 64 bits");
                        return Err(());
                    }
                };
                if !self.peek_at(2).is_punct("]") {
                    self.error_here("`]` closing the array size");
                    return Err(());
                }
                self.bump();
                self.bump();
                self.bump();
                ty = TypeName::FixedArray(Box::new(ty), size);
            } else {
                self.error_here("`]` or a numeric array size");
                return Err(());
            }
        }
        Ok(ty)
    }

    fn parse_block_stmts(&mut self) -> Result<Vec<Stmt>, ()> {
        self.expect_punct("{")?;
        let mut stmts = Vec::new();
        while !self.peek().is_punct("}") {
            if self.at_eof() {
                self.error_here("`}` closing the block");
                return Err(());
            }
            stmts.push(self.parse_statement());
        }
        self.bump();
        Ok(stmts)
    }

    /// Statement parsing never fails: anything unrecognised is consumed as a
    /// balanced token run and returned as `Stmt::Opaque`.
    fn parse_statement(&mut self) -> Stmt {
        let start_pos = self.pos;
        let span = self.peek().span.clone();
        match self.try_parse_statement(span.clone()) {
            Ok(stmt) => stmt,
            Err(()) => {
                // Drop errors recorded during the failed attempt; the
                // statement is represented as Opaque instead.
                self.pos = start_pos;
                self.consume_opaque(span)
            }
        }
    }

    fn try_parse_statement(&mut self, span: SourceSpan) -> Result<Stmt, ()> {
        let errors_before = self.errors.len();
        let result = self.try_parse_statement_inner(span);
        if result.is_err() {
            self.errors.truncate(errors_before);
        }
        result
    }

    fn try_parse_statement_inner(&mut self, span: SourceSpan) -> Result<Stmt, ()> {
        if self.peek().is_punct("{") {
            let stmts = self.parse_block_stmts()?;
            return Ok(Stmt::Block { stmts, span });
        }
        match self.peek().ident() {
            Some("if") => {
                self.bump();
                self.expect_punct("(")?;
                let cond = self.parse_expr()?;
                self.expect_punct(")")?;
                let then_branch = Box::new(self.parse_statement());
                let else_branch = if self.eat_keyword("else") {
                    Some(Box::new(self.parse_statement()))
                } else {
                    None
                };
                Ok(Stmt::If {
                    cond,
                    then_branch,
                    else_branch,
                    span,
                })
            }
            Some("while") => {
                self.bump();
                self.expect_punct("(")?;
                let cond = self.parse_expr()?;
                self.expect_punct(")")?;
                let body = Box::new(self.parse_statement());
                Ok(Stmt::While { cond, body, span })
            }
            Some("for") => {
                self.bump();
                self.expect_punct("(")?;
                let init = if self.eat_punct(";") {
                    None
                } else {
                    let init_span = self.peek().span.clone();
                    let stmt = self.parse_simple_statement(init_span)?;
                    Some(Box::new(stmt))
                };
                let cond = if self.peek().is_punct(";") {
                    None
                } else {
                    Some(self.parse_expr()?)
                };
                self.expect_punct(";")?;
                let update = if self.peek().is_punct(")") {
                    None
                } else {
                    Some(self.parse_expr()?)
                };
                self.expect_punct(")")?;
                let body = Box::new(self.parse_statement());
                Ok(Stmt::For {
                    init,
                    cond,
                    update,
                    body,
                    span,
                })
            }
            Some("return") => {
                self.bump();
                let value = if self.peek().is_punct(";") {
                    None
                } else {
                    Some(self.parse_expr()?)
                };
                self.expect_punct(";")?;
                Ok(Stmt::Return { value, span })
            }
            Some("delete") => {
                self.bump();
                let target = self.parse_expr()?;
                self.expect_punct(";")?;
                Ok(Stmt::Delete { target, span })
            }
            Some("emit") => {
                self.bump();
                let event = self.parse_expr()?;
                self.expect_punct(";")?;
                Ok(Stmt::Emit { event, span })
            }
            _ => {
                let stmt = self.parse_simple_statement(span)?;
                Ok(stmt)
            }
        }
    }

    /// A local variable declaration or an expression statement, both ending
    /// in `;` (also used as a `for` initializer).
    fn parse_simple_statement(&mut self, span: SourceSpan) -> Result<Stmt, ()> {
        // Try a local declaration first; its prefix (a type) can look like
        // an expression, so rewind on failure.
        let checkpoint = self.pos;
        let errors_before = self.errors.len();
        if let Ok(stmt) = self.try_parse_local_var(span.clone()) {
            return Ok(stmt);
        }
        self.pos = checkpoint;
        self.errors.truncate(errors_before);

        let expr = self.parse_expr()?;
        self.expect_punct(";")?;
        Ok(Stmt::Expr { expr, span })
    }

    fn try_parse_local_var(&mut self, span: SourceSpan) -> Result<Stmt, ()> {
        let ty = self.parse_type_name()?;
        // A plain identifier is a valid "type" prefix; require either a data
        // location or a following identifier to commit to a declaration.
        let location = self.eat_data_location();
        let name = match &self.peek().kind {
            TokenKind::Ident(_) => self.expect_ident("the variable name")?.0,
            _ => return Err(()),
        };
        let init = if self.eat_punct("=") {
            Some(self.parse_expr()?)
        } else {
            None
        };
        self.expect_punct(";")?;
        Ok(Stmt::LocalVar {
            ty,
            location,
            name,
            init,
            span,
        })
    }

    /// Consumes one statement's worth of tokens without interpreting them:
    /// up to a `;` at bracket depth zero, or through one balanced `{...}`
    /// group (covers `assembly { ... }` and similar).
    fn consume_opaque(&mut self, span: SourceSpan) -> Stmt {
        let mut depth = 0usize;
        let mut consumed = false;
        while !self.at_eof() {
            match &self.peek().kind {
                TokenKind::Punct(";") if depth == 0 => {
                    self.bump();
                    break;
                }
                TokenKind::Punct("{") | TokenKind::Punct("(") | TokenKind::Punct("[") => {
                    depth += 1;
                    self.bump();
                    consumed = true;
                }
                TokenKind::Punct("}") | TokenKind::Punct(")") | TokenKind::Punct("]") => {
                    if depth == 0 {
                        break;
                    }
                    let was_block = self.peek().is_punct("}");
                    depth -= 1;
                    self.bump();
                    consumed = true;
                    if depth == 0 && was_block {
                        break;
                    }
                }
                _ => {
                    self.bump();
                    consumed = true;
                }
            }
        }
        if !consumed {
            // Guarantee progress even on a stray closing brace.
            self.bump();
        }
        Stmt::Opaque { span }
    }

    fn parse_expr(&mut self) -> Result<Expr, ()> {
        self.parse_assignment()
    }

    fn parse_assignment(&mut self) -> Result<Expr, ()> {
        let lhs = self.parse_or()?;
        let op = match &self.peek().kind {
            TokenKind::Punct(p @ ("=" | "+=" | "-=" | "*=" | "/=")) => *p,
            _ => return Ok(lhs),
        };
        let span = self.bump().span;
        let rhs = self.parse_assignment()?;
        Ok(Expr::Assign {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
            span,
        })
    }

    fn parse_or(&mut self) -> Result<Expr, ()> {
        let mut lhs = self.parse_and()?;
        while self.peek().is_punct("||") {
            let span = self.bump().span;
            let rhs = self.parse_and()?;
            lhs = Expr::Binary {
                op: "||",
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                span,
            };
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<Expr, ()> {
        let mut lhs = self.parse_comparison()?;
        while self.peek().is_punct("&&") {
            let span = self.bump().span;
            let rhs = self.parse_comparison()?;
            lhs = Expr::Binary {
                op: "&&",
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                span,
            };
        }
        Ok(lhs)
    }

    fn parse_comparison(&mut self) -> Result<Expr, ()> {
        let mut lhs = self.parse_additive()?;
        loop {
            let op = match &self.peek().kind {
                TokenKind::Punct(p @ ("==" | "!=" | "<" | "<=" | ">" | ">=")) => *p,
                _ => break,
            };
            let span = self.bump().span;
            let rhs = self.parse_additive()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                span,
            };
        }
        Ok(lhs)
    }

    fn parse_additive(&mut self) -> Result<Expr, ()> {
        let mut lhs = self.parse_multiplicative()?;
        loop {
            let op = match &self.peek().kind {
                TokenKind::Punct(p @ ("+" | "-")) => *p,
                _ => break,
            };
            let span = self.bump().span;
            let rhs = self.parse_multiplicative()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                span,
            };
        }
        Ok(lhs)
    }

    fn parse_multiplicative(&mut self) -> Result<Expr, ()> {
        let mut lhs = self.parse_power()?;
        loop {
            let op = match &self.peek().kind {
                TokenKind::Punct(p @ ("*" | "/" | "%")) => *p,
                _ => break,
            };
            let span = self.bump().span;
            let rhs = self.parse_power()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                span,
            };
        }
        Ok(lhs)
    }

    fn parse_power(&mut self) -> Result<Expr, ()> {
        let base = self.parse_unary()?;
        if self.peek().is_punct("**") {
            let span = self.bump().span;
            // Right associative.
            let exp = self.parse_power()?;
            return Ok(Expr::Binary {
                op: "**",
                lhs: Box::new(base),
                rhs: Box::new(exp),
                span,
            });
        }
        Ok(base)
    }

    fn parse_unary(&mut self) -> Result<Expr, ()> {
        let op = match &self.peek().kind {
            TokenKind::Punct(p @ ("!" | "-" | "+" | "++" | "--")) => *p,
            _ => return self.parse_postfix(),
        };
        let span = self.bump().span;
        let operand = self.parse_unary()?;
        Ok(Expr::Unary {
            op,
            prefix: true,
            operand: Box::new(operand),
            span,
        })
    }

    fn parse_postfix(&mut self) -> Result<Expr, ()> {
        let mut expr = self.parse_primary()?;
        loop {
            match &self.peek().kind {
                TokenKind::Punct(".") => {
                    let span = self.bump().span;
                    let (member, _) = self.expect_ident("a member name")?;
                    let span = SourceSpan {
                        line: expr.span().line,
                        column: expr.span().column,
                        ..span
                    };
                    expr = Expr::Member {
                        base: Box::new(expr),
                        member,
                        span,
                    };
                }
                TokenKind::Punct("[") => {
                    let span = expr.span().clone();
                    self.bump();
                    let index = self.parse_expr()?;
                    self.expect_punct("]")?;
                    expr = Expr::Index {
                        base: Box::new(expr),
                        index: Box::new(index),
                        span,
                    };
                }
                TokenKind::Punct("(") => {
                    let span = expr.span().clone();
                    self.bump();
                    let mut args = Vec::new();
                    if !self.peek().is_punct(")") {
                        loop {
                            args.push(self.parse_expr()?);
                            if !self.eat_punct(",") {
                                break;
                            }
                        }
                    }
                    self.expect_punct(")")?;
                    expr = Expr::Call {
                        callee: Box::new(expr),
                        args,
                        span,
                    };
                }
                TokenKind::Punct(p @ ("++" | "--")) => {
                    let op = *p;
                    let span = self.bump().span;
                    expr = Expr::Unary {
                        op,
                        prefix: false,
                        operand: Box::new(expr),
                        span,
                    };
                }
                _ => break,
            }
        }
        Ok(expr)
    }

    fn parse_primary(&mut self) -> Result<Expr, ()> {
        let t = self.peek().clone();
        match &t.kind {
            TokenKind::Number(n) => {
                self.bump();
                let mut text = n.clone();
                // Denomination and time suffixes stay part of the literal.
                if let Some(unit) = self.peek().ident() {
                    if NUMBER_UNITS.contains(&unit) {
                        text.push(' ');
                        text.push_str(unit);
                        self.bump();
                    }
                }
                Ok(Expr::Number {
                    text,
                    span: t.span,
                })
            }
            TokenKind::HexNumber(n) => {
                self.bump();
                Ok(Expr::HexLit {
                    text: n.clone(),
                    span: t.span,
                })
            }
            TokenKind::Str(s) => {
                self.bump();
                Ok(Expr::StrLit {
                    value: s.clone(),
                    span: t.span,
                })
            }
            TokenKind::Ident(w) if w == "true" || w == "false" => {
                self.bump();
                Ok(Expr::BoolLit {
                    value: w == "true",
                    span: t.span,
                })
            }
            TokenKind::Ident(w) => {
                let name = w.clone();
                self.bump();
                Ok(Expr::Ident { name, span: t.span })
            }
            TokenKind::Punct("(") => {
                self.bump();
                let mut items = vec![self.parse_expr()?];
                while self.eat_punct(",") {
                    items.push(self.parse_expr()?);
                }
                self.expect_punct(")")?;
                if items.len() == 1 {
                    Ok(items.pop().unwrap())
                } else {
                    Ok(Expr::Tuple {
                        items,
                        span: t.span,
                    })
                }
            }
            _ => {
                self.error_here("an expression");
                Err(())
            }
        }
    }
}

/// Reconstructs readable text from a token run, used for pragma and import
/// raw storage.
fn render_tokens(tokens: &[Token]) -> String {
    let mut out = String::new();
    for t in tokens {
        let piece = match &t.kind {
            TokenKind::Ident(s) => s.clone(),
            TokenKind::Number(s) => s.clone(),
            TokenKind::HexNumber(s) => s.clone(),
            TokenKind::Str(s) => format!("\"{s}\""),
            TokenKind::Punct(p) => (*p).to_string(),
            TokenKind::Eof => String::new(),
        };
        let needs_space = !out.is_empty()
            && out.chars().last().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
            && piece.chars().next().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_');
        if needs_space {
            out.push(' ');
        }
        out.push_str(&piece);
    }
    out
}

/// True when the constraint tokens pin one exact version: `X.Y.Z` or
/// `=X.Y.Z`.
fn constraint_is_locked(tokens: &[Token]) -> bool {
    let rest = if tokens.first().is_some_and(|t| t.is_punct("=")) {
        &tokens[1..]
    } else {
        tokens
    };
    matches!(
        rest,
        [a, d1, b, d2, c]
            if matches!(a.kind, TokenKind::Number(_))
                && d1.is_punct(".")
                && matches!(b.kind, TokenKind::Number(_))
                && d2.is_punct(".")
                && matches!(c.kind, TokenKind::Number(_))
    )
}

/// Extracts the first `X.Y.Z` triple appearing in the constraint, if any.
fn first_version_triple(tokens: &[Token]) -> Option<(u32, u32, u32)> {
    for w in tokens.windows(5) {
        if let (TokenKind::Number(a), TokenKind::Number(b), TokenKind::Number(c)) =
            (&w[0].kind, &w[2].kind, &w[4].kind)
        {
            if w[1].is_punct(".") && w[3].is_punct(".") {
                if let (Ok(x), Ok(y), Ok(z)) = (a.parse(), b.parse(), c.parse()) {
                    return Some((x, y, z));
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_ok(src: &str) -> SourceUnit {
        match parse_solidity(src, "t.sol") {
            Ok(u) => u,
            Err(errs) => panic!("parse failed: {:?}", errs),
        }
    }

    #[test]
    fn pragma_lock_detection() {
        let u = parse_ok("pragma solidity 0.5.12;\ncontract A {}\n");
        let p = u.pragma.as_ref().unwrap();
        assert!(p.locked);
        assert_eq!(p.version, Some((0, 5, 12)));
        assert_eq!(p.raw, "solidity 0.5.12");

        let u = parse_ok("pragma solidity ^0.5.0;\ncontract A {}\n");
        let p = u.pragma.as_ref().unwrap();
        assert!(!p.locked);
        assert_eq!(p.version, Some((0, 5, 0)));

        let u = parse_ok("pragma solidity >=0.4.21 <0.6.0;\ncontract A {}\n");
        assert!(!u.pragma.as_ref().unwrap().locked);
        assert_eq!(u.pragma.as_ref().unwrap().version, Some((0, 4, 21)));

        let u = parse_ok("pragma experimental ABIEncoderV2;\ncontract A {}\n");
        assert!(u.pragma.is_none());
        assert_eq!(u.other_pragmas, vec!["experimental ABIEncoderV2"]);
    }

    #[test]
    fn contract_members_round_up() {
        let src = r#"
pragma solidity 0.5.12;
import "./SafeMath.sol";

contract Token is Ownable, IERC20 {
    using SafeMath for uint256;

    uint256 public totalSupply;
    mapping(address => uint256) balances;
    address payable owner;
    bool private halted;

    event Transfer(address indexed from, address indexed to, uint256 value);

    struct Checkpoint {
        uint128 fromBlock;
        uint128 value;
    }

    enum Phase { Setup, Open, Closed }

    modifier onlyOwner() {
        require(msg.sender == owner);
        _;
    }

    constructor(uint256 supply) public {
        totalSupply = supply;
    }

    function transfer(address to, uint256 value) public returns (bool) {
        balances[msg.sender] = balances[msg.sender].sub(value);
        balances[to] = balances[to].add(value);
        emit Transfer(msg.sender, to, value);
        return true;
    }

    function () external payable {}
}
"#;
        let u = parse_ok(src);
        assert_eq!(u.imports, vec!["./SafeMath.sol"]);
        let c = &u.contracts[0];
        assert_eq!(c.name, "Token");
        assert_eq!(c.parents, vec!["Ownable", "IERC20"]);
        assert_eq!(c.usings[0].library, "SafeMath");
        assert_eq!(c.state_vars.len(), 4);
        assert_eq!(c.state_vars[0].visibility, Visibility::Public);
        assert_eq!(c.state_vars[1].visibility, Visibility::Internal);
        assert!(matches!(
            c.state_vars[2].ty,
            TypeName::Elementary(ElementaryType::AddressPayable)
        ));
        assert_eq!(c.events[0].params.len(), 3);
        assert!(c.events[0].params[0].indexed);
        assert_eq!(c.structs[0].fields.len(), 2);
        assert_eq!(c.enums[0].variants, vec!["Setup", "Open", "Closed"]);
        assert_eq!(c.modifiers[0].name, "onlyOwner");
        assert!(c.constructor().is_some());
        assert!(c.fallback().is_some());
        let transfer = c.functions.iter().find(|f| f.name == "transfer").unwrap();
        assert_eq!(transfer.params.len(), 2);
        assert_eq!(transfer.returns.len(), 1);
        assert_eq!(transfer.body.as_ref().unwrap().len(), 4);
    }

    #[test]
    fn expression_precedence() {
        let src = "contract A { function f() public { x = a + b * c ** d ** e; } }";
        let u = parse_ok(src);
        let body = u.contracts[0].functions[0].body.as_ref().unwrap();
        let Stmt::Expr { expr, .. } = &body[0] else { panic!() };
        let Expr::Assign { rhs, .. } = expr else { panic!() };
        // a + (b * (c ** (d ** e)))
        let Expr::Binary { op: "+", rhs: mul, .. } = rhs.as_ref() else { panic!() };
        let Expr::Binary { op: "*", rhs: pow, .. } = mul.as_ref() else { panic!() };
        let Expr::Binary { op: "**", rhs: inner, .. } = pow.as_ref() else { panic!() };
        assert!(matches!(inner.as_ref(), Expr::Binary { op: "**", .. }));
    }

    #[test]
    fn out_of_subset_statement_becomes_opaque() {
        let src = r#"
contract A {
    function f(uint x) public returns (uint) {
        uint y = x + 1;
        assembly { let z := mload(0x40) }
        y = x ? 1 : 2;
        z = a | b;
        return y;
    }
}
"#;
        let u = parse_ok(src);
        let body = u.contracts[0].functions[0].body.as_ref().unwrap();
        assert_eq!(body.len(), 5);
        assert!(matches!(body[0], Stmt::LocalVar { .. }));
        assert!(matches!(body[1], Stmt::Opaque { .. }));
        assert!(matches!(body[2], Stmt::Opaque { .. }));
        assert!(matches!(body[3], Stmt::Opaque { .. }));
        assert!(matches!(body[4], Stmt::Return { .. }));
    }

    #[test]
    fn opaque_recovery_keeps_enclosing_brace() {
        // The unparsable statement is the last thing in the block; recovery
        // must stop at the `}` without consuming it.
        let src = "contract A { function f() public { x = a | b; } function g() public {} }";
        let u = parse_ok(src);
        assert_eq!(u.contracts[0].functions.len(), 2);
        assert_eq!(u.contracts[0].functions[1].name, "g");
    }

    #[test]
    fn suppression_comments_attach_to_next_line() {
        let src = "// abcde:allow(CL-DIV, CL-TIMESTAMP)\ncontract A {}\n";
        let u = parse_ok(src);
        let set = u.suppressions.get(&2).unwrap();
        assert!(set.contains("CL-DIV"));
        assert!(set.contains("CL-TIMESTAMP"));
        let span = SourceSpan { file: "t.sol".into(), line: 2, column: 1, length: 1 };
        assert!(u.is_suppressed("CL-DIV", &span));
        assert!(!u.is_suppressed("CL-DIV", &SourceSpan { line: 3, ..span.clone() }));
        assert!(!u.is_suppressed("CL-RAWADDR", &span));
    }

    #[test]
    fn duplicate_contract_name_rejected() {
        let err = parse_solidity("contract A {} contract A {}", "t.sol").unwrap_err();
        assert!(err[0].expected.contains("unique contract name"));
    }

    #[test]
    fn second_fallback_rejected() {
        let src = "contract A { function() external {} function() external payable {} }";
        let err = parse_solidity(src, "t.sol").unwrap_err();
        assert!(err[0].expected.contains("at most one fallback"));
    }

    #[test]
    fn constant_requires_initializer() {
        let err = parse_solidity("contract A { uint constant MAX; }", "t.sol").unwrap_err();
        assert!(err[0].expected.contains("initializer"));
        parse_ok("contract A { uint constant MAX = 100; }");
    }

    #[test]
    fn inheritance_specifier_arguments_are_skipped() {
        let u = parse_ok("contract A is B(1, 2), C {}");
        assert_eq!(u.contracts[0].parents, vec!["B", "C"]);
    }

    #[test]
    fn member_chain_and_low_level_shapes() {
        let src = r#"
contract A {
    function f(address payable to) public {
        to.transfer(1 ether);
        bool ok = to.send(21000);
        to.call.value(100)("");
        msg.sender.call("");
    }
}
"#;
        let u = parse_ok(src);
        let body = u.contracts[0].functions[0].body.as_ref().unwrap();
        let Stmt::Expr { expr: e0, .. } = &body[0] else { panic!() };
        assert!(e0.is_ether_transfer());
        assert!(!e0.is_low_level_invocation());
        let Stmt::LocalVar { init: Some(e1), .. } = &body[1] else { panic!() };
        assert!(e1.is_low_level_invocation());
        let Stmt::Expr { expr: e2, .. } = &body[2] else { panic!() };
        assert!(e2.is_low_level_invocation());
        let Stmt::Expr { expr: e3, .. } = &body[3] else { panic!() };
        assert!(e3.is_low_level_invocation());
    }

    #[test]
    fn ether_units_parse_as_calls_or_numbers() {
        // `1 ether` lexes as a number then an identifier; the expression
        // parser treats the pair as a number followed by a stray token, so
        // the whole statement must still terminate cleanly.
        let u = parse_ok("contract A { uint x = 2 + 3; }");
        let c = &u.contracts[0];
        assert!(c.state_vars[0].initializer.is_some());
    }

    #[test]
    fn for_loop_with_length_condition() {
        let src = r#"
contract A {
    address[] holders;
    function pay(uint amount) public {
        for (uint i = 0; i < holders.length; i++) {
            balances[holders[i]] += amount;
        }
    }
}
"#;
        let u = parse_ok(src);
        let body = u.contracts[0].functions[0].body.as_ref().unwrap();
        let Stmt::For { init, cond, update, .. } = &body[0] else { panic!() };
        assert!(init.is_some());
        let Some(Expr::Binary { op: "<", rhs, .. }) = cond else { panic!() };
        let Expr::Member { member, .. } = rhs.as_ref() else { panic!() };
        assert_eq!(member, "length");
        assert!(matches!(update, Some(Expr::Unary { op: "++", prefix: false, .. })));
    }

    #[test]
    fn tx_origin_and_builtins_recognised() {
        let src = r#"
contract A {
    function f() public view returns (bool) {
        require(tx.origin == msg.sender);
        uint t = block.timestamp;
        uint n = block.number;
        uint m = now;
        return t + n + m > 0;
    }
}
"#;
        let u = parse_ok(src);
        let body = u.contracts[0].functions[0].body.as_ref().unwrap();
        let mut tx_origin = 0;
        let mut timestamps = 0;
        let mut block_numbers = 0;
        for s in body {
            s.walk_exprs(&mut |e| {
                if e.is_tx_origin() {
                    tx_origin += 1;
                }
                if e.is_timestamp_read() {
                    timestamps += 1;
                }
                if e.is_block_number() {
                    block_numbers += 1;
                }
            });
        }
        assert_eq!(tx_origin, 1);
        assert_eq!(timestamps, 2);
        assert_eq!(block_numbers, 1);
    }

    #[test]
    fn spans_point_into_source() {
        let src = "contract A {\n    uint x;\n}\n";
        let u = parse_ok(src);
        let v = &u.contracts[0].state_vars[0];
        assert_eq!(v.span.line, 2);
        assert_eq!(v.span.column, 10);
    }

    #[test]
    fn garbage_never_panics() {
        for src in [
            "",
            "}",
            "contract",
            "contract A {",
            "contract A { function }",
            "pragma",
            "import ;",
            "contract A { uint; }",
            "contract A { function f() public { ( } }",
            "\u{feff}contract A {}",
        ] {
            let _ = parse_solidity(src, "t.sol");
        }
    }
}
