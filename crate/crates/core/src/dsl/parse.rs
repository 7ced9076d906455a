//! Recursive descent parser for the modelling language.
//!
//! A model file is one `system` block holding, in order: an optional goal,
//! actor declarations, contract/interface/library/struct/enum declarations,
//! and scenarios. On an error inside a declaration the parser records it and
//! skips ahead to the next declaration keyword, so one broken contract does
//! not hide problems in the rest of the file.

use crate::lex::{lex, Token, TokenKind, DSL_OPTIONS};
use crate::model::*;
use crate::pattern::PatternId;
use crate::span::{ParseError, SourceSpan};
use std::collections::BTreeSet;
use std::str::FromStr;

pub fn parse_model(text: &str, file: &str) -> Result<SystemModel, Vec<ParseError>> {
    let out = lex(text, file, &DSL_OPTIONS);
    if !out.errors.is_empty() {
        return Err(out.errors);
    }
    let mut p = Parser {
        tokens: out.tokens,
        pos: 0,
        errors: Vec::new(),
    };
    let model = p.parse_system();
    match (model, p.errors.is_empty()) {
        (Some(model), true) => Ok(model),
        (_, _) => Err(p.errors),
    }
}

const DECL_KEYWORDS: &[&str] = &[
    "actor",
    "contract",
    "interface",
    "library",
    "struct",
    "enum",
    "scenario",
];

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    errors: Vec<ParseError>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek2(&self) -> &Token {
        &self.tokens[(self.pos + 1).min(self.tokens.len() - 1)]
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

    fn error_here(&mut self, expected: &str) -> ParseError {
        let t = self.peek();
        let e = ParseError::new(t.span.clone(), expected, t.kind.describe());
        self.errors.push(e.clone());
        e
    }

    fn expect_punct(&mut self, p: &str) -> Result<Token, ()> {
        if self.peek().is_punct(p) {
            Ok(self.bump())
        } else {
            self.error_here(&format!("`{p}`"));
            Err(())
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

    fn expect_keyword(&mut self, word: &str) -> Result<Token, ()> {
        if self.peek().is_ident(word) {
            Ok(self.bump())
        } else {
            self.error_here(&format!("`{word}`"));
            Err(())
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

    fn expect_string(&mut self, what: &str) -> Result<String, ()> {
        match &self.peek().kind {
            TokenKind::Str(_) => {
                let t = self.bump();
                let TokenKind::Str(s) = t.kind else { unreachable!() };
                Ok(s)
            }
            _ => {
                self.error_here(what);
                Err(())
            }
        }
    }

    /// Skips to the next declaration keyword at the top level of the system
    /// block, balancing braces passed along the way.
    fn recover_to_next_decl(&mut self) {
        let mut depth = 0usize;
        while !self.at_eof() {
            let t = self.peek();
            match &t.kind {
                TokenKind::Punct("{") => {
                    depth += 1;
                    self.bump();
                }
                TokenKind::Punct("}") => {
                    if depth == 0 {
                        return;
                    }
                    depth -= 1;
                    self.bump();
                }
                TokenKind::Ident(w) if depth == 0 && DECL_KEYWORDS.contains(&w.as_str()) => {
                    return;
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn parse_system(&mut self) -> Option<SystemModel> {
        self.expect_keyword("system").ok()?;
        let (name, name_span) = self.expect_ident("the system name").ok()?;
        self.expect_punct("{").ok()?;

        let mut model = SystemModel {
            name,
            goal: None,
            actors: Vec::new(),
            decls: Vec::new(),
            scenarios: Vec::new(),
            span: name_span,
        };

        if self.eat_keyword("goal") {
            model.goal = self.expect_string("the goal text as a quoted string").ok();
        }

        // Sections must appear in order: actors, then declarations, then
        // scenarios.
        #[derive(PartialEq, PartialOrd)]
        enum Phase {
            Actors,
            Decls,
            Scenarios,
        }
        let mut phase = Phase::Actors;

        loop {
            if self.peek().is_punct("}") {
                self.bump();
                break;
            }
            if self.at_eof() {
                self.error_here("`}` closing the system block");
                break;
            }
            let word = match self.peek().ident() {
                Some(w) => w.to_string(),
                None => {
                    self.error_here("a declaration (actor, contract, interface, library, struct, enum or scenario)");
                    self.recover_to_next_decl();
                    continue;
                }
            };
            match word.as_str() {
                "actor" => {
                    if phase > Phase::Actors {
                        self.error_here("actors must come before contract declarations and scenarios");
                    }
                    if let Ok(actor) = self.parse_actor() {
                        model.actors.push(actor);
                    } else {
                        self.recover_to_next_decl();
                    }
                }
                "contract" | "interface" | "library" => {
                    if phase > Phase::Decls {
                        self.error_here("contract declarations must come before scenarios");
                    } else {
                        phase = Phase::Decls;
                    }
                    if let Ok(c) = self.parse_contractish(&word) {
                        model.decls.push(TopDecl::Contract(c));
                    } else {
                        self.recover_to_next_decl();
                    }
                }
                "struct" => {
                    if phase > Phase::Decls {
                        self.error_here("contract declarations must come before scenarios");
                    } else {
                        phase = Phase::Decls;
                    }
                    if let Ok(s) = self.parse_struct() {
                        model.decls.push(TopDecl::Struct(s));
                    } else {
                        self.recover_to_next_decl();
                    }
                }
                "enum" => {
                    if phase > Phase::Decls {
                        self.error_here("contract declarations must come before scenarios");
                    } else {
                        phase = Phase::Decls;
                    }
                    if let Ok(e) = self.parse_enum() {
                        model.decls.push(TopDecl::Enum(e));
                    } else {
                        self.recover_to_next_decl();
                    }
                }
                "scenario" => {
                    phase = Phase::Scenarios;
                    if let Ok(sc) = self.parse_scenario() {
                        model.scenarios.push(sc);
                    } else {
                        self.recover_to_next_decl();
                    }
                }
                _ => {
                    self.error_here("a declaration (actor, contract, interface, library, struct, enum or scenario)");
                    self.recover_to_next_decl();
                }
            }
        }

        if !self.at_eof() {
            self.error_here("end of input after the system block");
        }
        Some(model)
    }

    fn parse_actor(&mut self) -> Result<ActorDecl, ()> {
        self.expect_keyword("actor")?;
        let (name, span) = self.expect_ident("the actor name")?;
        self.expect_punct(":")?;
        let (kind_word, kind_span) = self.expect_ident("an actor kind")?;
        let kind = ActorKind::parse(&kind_word).ok_or_else(|| {
            self.errors.push(ParseError::new(
                kind_span,
                "one of person, system, device, contract, external_contract, oracle, account",
                format!("`{kind_word}`"),
            ));
        })?;
        Ok(ActorDecl { name, kind, span })
    }

    fn parse_contractish(&mut self, keyword: &str) -> Result<ContractDecl, ()> {
        self.expect_keyword(keyword)?;
        let stereotype = match keyword {
            "interface" => ContractStereotype::Interface,
            "library" => ContractStereotype::LibraryContract,
            _ => ContractStereotype::Contract,
        };
        let (name, span) = self.expect_ident("the contract name")?;

        let mut decl = ContractDecl {
            name,
            stereotype,
            parents: Vec::new(),
            state_vars: Vec::new(),
            events: Vec::new(),
            modifiers: Vec::new(),
            functions: Vec::new(),
            patterns: BTreeSet::new(),
            span,
        };

        if stereotype == ContractStereotype::Contract {
            if self.eat_keyword("is") {
                loop {
                    let (parent, _) = self.expect_ident("a parent contract name")?;
                    decl.parents.push(parent);
                    if !self.peek().is_punct(",") {
                        break;
                    }
                    self.bump();
                }
            }
            if self.peek().is_punct("@") {
                self.bump();
                self.expect_keyword("pattern")?;
                self.expect_punct("(")?;
                loop {
                    let (tag, tag_span) = self.expect_ident("a pattern tag")?;
                    match PatternId::from_str(&tag) {
                        Ok(p) => {
                            decl.patterns.insert(p);
                        }
                        Err(_) => self.errors.push(ParseError::new(
                            tag_span,
                            "a known pattern tag",
                            format!("`{tag}`"),
                        )),
                    }
                    if !self.peek().is_punct(",") {
                        break;
                    }
                    self.bump();
                }
                self.expect_punct(")")?;
            }
            self.expect_punct("{")?;
            while !self.peek().is_punct("}") {
                if self.at_eof() {
                    self.error_here("`}` closing the contract body");
                    return Err(());
                }
                self.parse_contract_section(&mut decl)?;
            }
            self.bump();
        } else {
            // Interfaces and libraries hold function signatures only.
            self.expect_punct("{")?;
            while !self.peek().is_punct("}") {
                if self.at_eof() {
                    self.error_here("`}` closing the body");
                    return Err(());
                }
                let f = self.parse_fnsig()?;
                decl.functions.push(f);
            }
            self.bump();
        }
        Ok(decl)
    }

    fn parse_contract_section(&mut self, decl: &mut ContractDecl) -> Result<(), ()> {
        let (word, word_span) = self.expect_ident("a section (state, events, modifiers or functions)")?;
        match word.as_str() {
            "state" => {
                self.expect_punct("{")?;
                while !self.peek().is_punct("}") {
                    if self.at_eof() {
                        self.error_here("`}` closing the state section");
                        return Err(());
                    }
                    let (name, span) = self.expect_ident("a state variable name")?;
                    self.expect_punct(":")?;
                    let ty = self.parse_type()?;
                    let visibility = self.eat_visibility().unwrap_or(Visibility::Internal);
                    decl.state_vars.push(StateVar {
                        name,
                        ty,
                        visibility,
                        span,
                    });
                }
                self.bump();
            }
            "events" => {
                self.expect_punct("{")?;
                while !self.peek().is_punct("}") {
                    if self.at_eof() {
                        self.error_here("`}` closing the events section");
                        return Err(());
                    }
                    let (name, span) = self.expect_ident("an event name")?;
                    self.expect_punct("(")?;
                    let params = self.parse_params()?;
                    self.expect_punct(")")?;
                    decl.events.push(EventDecl { name, params, span });
                }
                self.bump();
            }
            "modifiers" => {
                self.expect_punct("{")?;
                while !self.peek().is_punct("}") {
                    if self.at_eof() {
                        self.error_here("`}` closing the modifiers section");
                        return Err(());
                    }
                    let (name, span) = self.expect_ident("a modifier name")?;
                    decl.modifiers.push(ModifierDecl { name, span });
                    while self.peek().is_punct(";") {
                        self.bump();
                    }
                }
                self.bump();
            }
            "functions" => {
                self.expect_punct("{")?;
                while !self.peek().is_punct("}") {
                    if self.at_eof() {
                        self.error_here("`}` closing the functions section");
                        return Err(());
                    }
                    let f = self.parse_fnsig()?;
                    decl.functions.push(f);
                }
                self.bump();
            }
            other => {
                self.errors.push(ParseError::new(
                    word_span,
                    "one of the sections state, events, modifiers, functions",
                    format!("`{other}`"),
                ));
                return Err(());
            }
        }
        Ok(())
    }

    fn eat_visibility(&mut self) -> Option<Visibility> {
        let vis = self.peek().ident().and_then(Visibility::parse)?;
        self.bump();
        Some(vis)
    }

    fn eat_mutability(&mut self) -> Option<Mutability> {
        let m = match self.peek().ident()? {
            "payable" => Mutability::Payable,
            "view" => Mutability::View,
            "pure" => Mutability::Pure,
            _ => return None,
        };
        self.bump();
        Some(m)
    }

    fn parse_fnsig(&mut self) -> Result<FunctionSig, ()> {
        let (name, span) = self.expect_ident("a function name")?;
        self.expect_punct("(")?;
        let params = self.parse_params()?;
        self.expect_punct(")")?;
        let visibility = self.eat_visibility().unwrap_or(Visibility::Public);
        let mutability = self.eat_mutability().unwrap_or(Mutability::NonPayable);

        let mut uses = Vec::new();
        if self.eat_keyword("uses") {
            self.expect_punct("(")?;
            loop {
                let (m, _) = self.expect_ident("a modifier name")?;
                uses.push(m);
                if !self.peek().is_punct(",") {
                    break;
                }
                self.bump();
            }
            self.expect_punct(")")?;
        }

        let mut returns = Vec::new();
        if self.eat_keyword("returns") {
            self.expect_punct("(")?;
            loop {
                returns.push(self.parse_type()?);
                if !self.peek().is_punct(",") {
                    break;
                }
                self.bump();
            }
            self.expect_punct(")")?;
        }

        Ok(FunctionSig {
            name,
            params,
            returns,
            visibility,
            mutability,
            uses,
            span,
        })
    }

    fn parse_params(&mut self) -> Result<Vec<Param>, ()> {
        let mut params = Vec::new();
        if self.peek().is_punct(")") {
            return Ok(params);
        }
        loop {
            let (name, _) = self.expect_ident("a parameter name")?;
            self.expect_punct(":")?;
            let ty = self.parse_type()?;
            params.push(Param { name, ty });
            if !self.peek().is_punct(",") {
                break;
            }
            self.bump();
        }
        Ok(params)
    }

    fn parse_type(&mut self) -> Result<TypeName, ()> {
        let mut ty = if self.peek().is_ident("mapping") {
            self.bump();
            self.expect_punct("(")?;
            let key = self.parse_base_type()?;
            self.expect_punct("=>")?;
            let value = self.parse_type()?;
            self.expect_punct(")")?;
            TypeName::Mapping(Box::new(key), Box::new(value))
        } else {
            self.parse_base_type()?
        };
        while self.peek().is_punct("[") && self.peek2().is_punct("]") {
            self.bump();
            self.bump();
            ty = TypeName::Array(Box::new(ty));
        }
        Ok(ty)
    }

    fn parse_base_type(&mut self) -> Result<TypeName, ()> {
        let (word, _span) = self.expect_ident("a type")?;
        Ok(match ElementaryType::parse(&word) {
            Some(e) => TypeName::Elementary(e),
            None => TypeName::UserDefined(word),
        })
    }

    fn parse_struct(&mut self) -> Result<StructDecl, ()> {
        self.expect_keyword("struct")?;
        let (name, span) = self.expect_ident("the struct name")?;
        self.expect_punct("{")?;
        let mut fields = Vec::new();
        while !self.peek().is_punct("}") {
            if self.at_eof() {
                self.error_here("`}` closing the struct");
                return Err(());
            }
            let (field, _) = self.expect_ident("a field name")?;
            self.expect_punct(":")?;
            let ty = self.parse_type()?;
            fields.push(Param { name: field, ty });
        }
        self.bump();
        Ok(StructDecl { name, fields, span })
    }

    fn parse_enum(&mut self) -> Result<EnumDecl, ()> {
        self.expect_keyword("enum")?;
        let (name, span) = self.expect_ident("the enum name")?;
        self.expect_punct("{")?;
        let mut variants = Vec::new();
        loop {
            let (v, _) = self.expect_ident("an enum variant")?;
            variants.push(v);
            if !self.peek().is_punct(",") {
                break;
            }
            self.bump();
        }
        self.expect_punct("}")?;
        Ok(EnumDecl {
            name,
            variants,
            span,
        })
    }

    fn parse_scenario(&mut self) -> Result<Scenario, ()> {
        self.expect_keyword("scenario")?;
        let (name, span) = self.expect_ident("the scenario name")?;
        self.expect_punct("{")?;

        let mut sc = Scenario {
            name,
            participants: Vec::new(),
            messages: Vec::new(),
            span,
        };

        while self.peek().is_ident("participant") {
            self.bump();
            let (alias, pspan) = self.expect_ident("the participant alias")?;
            self.expect_punct(":")?;
            let (kind_word, kind_span) = self.expect_ident("a participant kind")?;
            let kind = if kind_word == "contract" {
                // `contract` may stand alone as an actor kind or be followed
                // by the declared contract's name. An identifier that starts
                // the next message (identifier then arrow) or the next
                // participant line is not a name.
                let next_is_name = matches!(self.peek().kind, TokenKind::Ident(_))
                    && !self.peek().is_ident("participant")
                    && !self.peek2().is_punct("->")
                    && !self.peek2().is_punct("-->");
                if next_is_name {
                    let (contract, _) = self.expect_ident("a contract name")?;
                    ParticipantKind::Declared(contract)
                } else {
                    ParticipantKind::Actor(ActorKind::Contract)
                }
            } else {
                match ActorKind::parse(&kind_word) {
                    Some(k) => ParticipantKind::Actor(k),
                    None => {
                        self.errors.push(ParseError::new(
                            kind_span,
                            "a participant kind or `contract <Name>`",
                            format!("`{kind_word}`"),
                        ));
                        return Err(());
                    }
                }
            };
            sc.participants.push(Participant {
                alias,
                kind,
                span: pspan,
            });
        }

        while !self.peek().is_punct("}") {
            if self.at_eof() {
                self.error_here("`}` closing the scenario");
                return Err(());
            }
            sc.messages.push(self.parse_message()?);
        }
        self.bump();
        Ok(sc)
    }

    fn parse_message(&mut self) -> Result<Message, ()> {
        let (from, span) = self.expect_ident("a participant alias starting a message")?;
        let return_arrow = if self.peek().is_punct("->") {
            self.bump();
            false
        } else if self.peek().is_punct("-->") {
            self.bump();
            true
        } else {
            self.error_here("`->` or `-->`");
            return Err(());
        };
        let (to, _) = self.expect_ident("the receiving participant alias")?;
        self.expect_punct(":")?;
        let label = self.expect_string("the message label as a quoted string")?;
        self.expect_punct("[")?;
        let (kind, kind_span) = self.parse_message_kind()?;
        self.expect_punct("]")?;

        if return_arrow && kind != MessageKind::EtherTransfer {
            self.errors.push(ParseError::new(
                kind_span,
                "`ethers` (the dashed arrow is reserved for ether returns)",
                format!("`{}`", kind.stereotype()),
            ));
            return Err(());
        }

        Ok(Message {
            from,
            to,
            label,
            kind,
            return_arrow,
            span,
        })
    }

    /// Message kinds may contain a hyphen (`trans-msg`), which the lexer
    /// splits; glue the pieces back together.
    fn parse_message_kind(&mut self) -> Result<(MessageKind, SourceSpan), ()> {
        let (mut word, span) = self.expect_ident("a message kind")?;
        while self.peek().is_punct("-") && matches!(self.peek2().kind, TokenKind::Ident(_)) {
            self.bump();
            let (part, _) = self.expect_ident("the rest of the message kind")?;
            word.push('-');
            word.push_str(&part);
        }
        match MessageKind::parse(&word) {
            Some(k) => Ok((k, span)),
            None => {
                self.errors.push(ParseError::new(
                    span,
                    "one of trans-msg, direct-msg, view, pure, fallback, ethers, create",
                    format!("`{word}`"),
                ));
                Err(())
            }
        }
    }
}
