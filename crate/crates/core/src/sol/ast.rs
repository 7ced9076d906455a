//! AST for the supported Solidity subset. Statements outside the subset are
//! kept as `Stmt::Opaque` placeholders so analyses degrade gracefully.

use crate::model::{Mutability, TypeName, Visibility};
use crate::span::SourceSpan;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceUnit {
    pub file: String,
    pub pragma: Option<PragmaDirective>,
    /// Raw text of pragmas other than the version pragma.
    pub other_pragmas: Vec<String>,
    /// Import paths as written, without resolution.
    pub imports: Vec<String>,
    pub contracts: Vec<ContractDef>,
    /// Inline rule suppressions: 1-based line number → rule ids that are
    /// allowed on that line (populated from `abcde:allow(...)` comments on
    /// the preceding line).
    pub suppressions: BTreeMap<u32, BTreeSet<String>>,
}

impl SourceUnit {
    pub fn contract(&self, name: &str) -> Option<&ContractDef> {
        self.contracts.iter().find(|c| c.name == name)
    }

    pub fn is_suppressed(&self, rule: &str, span: &SourceSpan) -> bool {
        self.suppressions
            .get(&span.line)
            .is_some_and(|rules| rules.contains(rule))
    }

    /// The contract plus every base reachable through parents declared in
    /// this unit; imported bases are invisible and skipped. Cycle-safe.
    pub fn parent_closure<'a>(&'a self, c: &'a ContractDef) -> Vec<&'a ContractDef> {
        let mut seen = BTreeSet::new();
        let mut queue = vec![c];
        let mut closure = Vec::new();
        while let Some(d) = queue.pop() {
            if !seen.insert(d.name.clone()) {
                continue;
            }
            closure.push(d);
            for p in &d.parents {
                if let Some(pd) = self.contract(p) {
                    queue.push(pd);
                }
            }
        }
        closure
    }

    /// Names of non-constant state variables visible in `c`, including
    /// those inherited from bases declared in this unit.
    pub fn state_var_names(&self, c: &ContractDef) -> BTreeSet<String> {
        self.parent_closure(c)
            .iter()
            .flat_map(|d| d.state_vars.iter())
            .filter(|v| !v.is_constant)
            .map(|v| v.name.clone())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PragmaDirective {
    pub raw: String,
    /// True iff the constraint pins exactly one version (`0.5.16` or
    /// `=0.5.16`).
    pub locked: bool,
    pub version: Option<(u32, u32, u32)>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContractKind {
    Contract,
    Interface,
    Library,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractDef {
    pub name: String,
    pub kind: ContractKind,
    pub parents: Vec<String>,
    pub state_vars: Vec<VarDecl>,
    pub functions: Vec<FuncDef>,
    pub modifiers: Vec<ModifierDef>,
    pub events: Vec<EventDef>,
    pub structs: Vec<StructDef>,
    pub enums: Vec<EnumDef>,
    pub usings: Vec<UsingDecl>,
    pub span: SourceSpan,
}

impl ContractDef {
    pub fn fallback(&self) -> Option<&FuncDef> {
        self.functions.iter().find(|f| f.is_fallback)
    }

    pub fn constructor(&self) -> Option<&FuncDef> {
        self.functions.iter().find(|f| f.is_constructor)
    }
}

/// `using Library for Type;` — `target` is `None` for `using L for *`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsingDecl {
    pub library: String,
    pub target: Option<TypeName>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub ty: TypeName,
    pub visibility: Visibility,
    pub is_constant: bool,
    pub initializer: Option<Expr>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataLocation {
    Memory,
    Storage,
    Calldata,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolParam {
    /// Empty for unnamed parameters and returns.
    pub name: String,
    pub ty: TypeName,
    pub location: Option<DataLocation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModifierInvocation {
    pub name: String,
    pub args: Vec<Expr>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuncDef {
    /// Empty for the fallback function and for constructors.
    pub name: String,
    pub params: Vec<SolParam>,
    pub returns: Vec<SolParam>,
    pub visibility: Visibility,
    pub mutability: Mutability,
    pub applied_modifiers: Vec<ModifierInvocation>,
    /// `None` for bodyless declarations (interfaces, abstract functions).
    pub body: Option<Vec<Stmt>>,
    pub is_constructor: bool,
    pub is_fallback: bool,
    pub span: SourceSpan,
}

impl FuncDef {
    pub fn display_name(&self) -> &str {
        if self.is_constructor {
            "constructor"
        } else if self.is_fallback {
            "fallback"
        } else {
            &self.name
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModifierDef {
    pub name: String,
    pub params: Vec<SolParam>,
    pub body: Vec<Stmt>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventParam {
    pub name: String,
    pub ty: TypeName,
    pub indexed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventDef {
    pub name: String,
    pub params: Vec<EventParam>,
    pub anonymous: bool,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructDef {
    pub name: String,
    pub fields: Vec<SolParam>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumDef {
    pub name: String,
    pub variants: Vec<String>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Expr {
        expr: Expr,
        span: SourceSpan,
    },
    LocalVar {
        ty: TypeName,
        location: Option<DataLocation>,
        name: String,
        init: Option<Expr>,
        span: SourceSpan,
    },
    If {
        cond: Expr,
        then_branch: Box<Stmt>,
        else_branch: Option<Box<Stmt>>,
        span: SourceSpan,
    },
    For {
        init: Option<Box<Stmt>>,
        cond: Option<Expr>,
        update: Option<Expr>,
        body: Box<Stmt>,
        span: SourceSpan,
    },
    While {
        cond: Expr,
        body: Box<Stmt>,
        span: SourceSpan,
    },
    Return {
        value: Option<Expr>,
        span: SourceSpan,
    },
    Delete {
        target: Expr,
        span: SourceSpan,
    },
    Block {
        stmts: Vec<Stmt>,
        span: SourceSpan,
    },
    Emit {
        event: Expr,
        span: SourceSpan,
    },
    /// A statement outside the supported subset, skipped as a balanced
    /// token sequence.
    Opaque {
        span: SourceSpan,
    },
}

impl Stmt {
    pub fn span(&self) -> &SourceSpan {
        match self {
            Stmt::Expr { span, .. }
            | Stmt::LocalVar { span, .. }
            | Stmt::If { span, .. }
            | Stmt::For { span, .. }
            | Stmt::While { span, .. }
            | Stmt::Return { span, .. }
            | Stmt::Delete { span, .. }
            | Stmt::Block { span, .. }
            | Stmt::Emit { span, .. }
            | Stmt::Opaque { span } => span,
        }
    }

    /// Depth-first walk over this statement and everything below it.
    pub fn walk(&self, f: &mut impl FnMut(&Stmt)) {
        f(self);
        match self {
            Stmt::If {
                then_branch,
                else_branch,
                ..
            } => {
                then_branch.walk(f);
                if let Some(e) = else_branch {
                    e.walk(f);
                }
            }
            Stmt::For { init, body, .. } => {
                if let Some(i) = init {
                    i.walk(f);
                }
                body.walk(f);
            }
            Stmt::While { body, .. } => body.walk(f),
            Stmt::Block { stmts, .. } => {
                for s in stmts {
                    s.walk(f);
                }
            }
            _ => {}
        }
    }

    /// Walks every expression contained in this statement subtree.
    pub fn walk_exprs(&self, f: &mut impl FnMut(&Expr)) {
        self.walk(&mut |s| match s {
            Stmt::Expr { expr, .. } => expr.walk(f),
            Stmt::LocalVar { init: Some(e), .. } => e.walk(f),
            Stmt::If { cond, .. } => cond.walk(f),
            Stmt::For { cond, update, .. } => {
                if let Some(c) = cond {
                    c.walk(f);
                }
                if let Some(u) = update {
                    u.walk(f);
                }
            }
            Stmt::While { cond, .. } => cond.walk(f),
            Stmt::Return { value: Some(e), .. } => e.walk(f),
            Stmt::Delete { target, .. } => target.walk(f),
            Stmt::Emit { event, .. } => event.walk(f),
            _ => {}
        });
    }
}

/// Walks a list of statements (a function body).
pub fn walk_stmts(stmts: &[Stmt], f: &mut impl FnMut(&Stmt)) {
    for s in stmts {
        s.walk(f);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Ident {
        name: String,
        span: SourceSpan,
    },
    Member {
        base: Box<Expr>,
        member: String,
        span: SourceSpan,
    },
    Index {
        base: Box<Expr>,
        index: Box<Expr>,
        span: SourceSpan,
    },
    Call {
        callee: Box<Expr>,
        args: Vec<Expr>,
        span: SourceSpan,
    },
    Binary {
        op: &'static str,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
        span: SourceSpan,
    },
    Unary {
        op: &'static str,
        prefix: bool,
        operand: Box<Expr>,
        span: SourceSpan,
    },
    Assign {
        op: &'static str,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
        span: SourceSpan,
    },
    Number {
        text: String,
        span: SourceSpan,
    },
    HexLit {
        text: String,
        span: SourceSpan,
    },
    StrLit {
        value: String,
        span: SourceSpan,
    },
    BoolLit {
        value: bool,
        span: SourceSpan,
    },
    Tuple {
        items: Vec<Expr>,
        span: SourceSpan,
    },
}

pub const COMPARISON_OPS: &[&str] = &["==", "!=", "<", "<=", ">", ">="];
pub const LOW_LEVEL_MEMBERS: &[&str] = &["call", "callcode", "delegatecall", "send"];

impl Expr {
    pub fn span(&self) -> &SourceSpan {
        match self {
            Expr::Ident { span, .. }
            | Expr::Member { span, .. }
            | Expr::Index { span, .. }
            | Expr::Call { span, .. }
            | Expr::Binary { span, .. }
            | Expr::Unary { span, .. }
            | Expr::Assign { span, .. }
            | Expr::Number { span, .. }
            | Expr::HexLit { span, .. }
            | Expr::StrLit { span, .. }
            | Expr::BoolLit { span, .. }
            | Expr::Tuple { span, .. } => span,
        }
    }

    pub fn walk(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Member { base, .. } => base.walk(f),
            Expr::Index { base, index, .. } => {
                base.walk(f);
                index.walk(f);
            }
            Expr::Call { callee, args, .. } => {
                callee.walk(f);
                for a in args {
                    a.walk(f);
                }
            }
            Expr::Binary { lhs, rhs, .. } | Expr::Assign { lhs, rhs, .. } => {
                lhs.walk(f);
                rhs.walk(f);
            }
            Expr::Unary { operand, .. } => operand.walk(f),
            Expr::Tuple { items, .. } => {
                for i in items {
                    i.walk(f);
                }
            }
            _ => {}
        }
    }

    pub fn as_ident(&self) -> Option<&str> {
        match self {
            Expr::Ident { name, .. } => Some(name),
            _ => None,
        }
    }

    /// Matches `base.member` where base is a plain identifier.
    pub fn as_ident_member(&self) -> Option<(&str, &str)> {
        match self {
            Expr::Member { base, member, .. } => base.as_ident().map(|b| (b, member.as_str())),
            _ => None,
        }
    }

    pub fn is_tx_origin(&self) -> bool {
        self.as_ident_member() == Some(("tx", "origin"))
    }

    pub fn is_msg_sender(&self) -> bool {
        self.as_ident_member() == Some(("msg", "sender"))
    }

    /// `block.timestamp` or the `now` alias.
    pub fn is_timestamp_read(&self) -> bool {
        self.as_ident_member() == Some(("block", "timestamp")) || self.as_ident() == Some("now")
    }

    pub fn is_block_number(&self) -> bool {
        self.as_ident_member() == Some(("block", "number"))
    }

    /// Name of the free-function head of a call, e.g. `require` in
    /// `require(x, "m")`.
    pub fn call_head(&self) -> Option<&str> {
        match self {
            Expr::Call { callee, .. } => callee.as_ident(),
            _ => None,
        }
    }

    /// True when the callee spine of this expression contains one of the
    /// low-level members (`call`, `callcode`, `delegatecall`, `send`), as in
    /// `addr.send(1)` or `addr.call.value(v)("")`.
    pub fn is_low_level_invocation(&self) -> bool {
        let Expr::Call { callee, .. } = self else {
            return false;
        };
        let mut spine: &Expr = callee;
        loop {
            match spine {
                Expr::Member { base, member, .. } => {
                    if LOW_LEVEL_MEMBERS.contains(&member.as_str()) {
                        return true;
                    }
                    spine = base;
                }
                Expr::Call { callee, .. } => spine = callee,
                Expr::Index { base, .. } => spine = base,
                _ => return false,
            }
        }
    }

    /// True for expressions that move ether: `x.transfer(v)`, `x.send(v)`
    /// and call chains carrying `.value(v)`. Token-style `transfer(to, v)`
    /// calls take two arguments and are not counted.
    pub fn is_ether_transfer(&self) -> bool {
        let Expr::Call { callee, args, .. } = self else {
            return false;
        };
        if let Expr::Member { member, .. } = callee.as_ref() {
            if (member == "transfer" || member == "send") && args.len() == 1 {
                return true;
            }
        }
        let mut spine: &Expr = callee;
        loop {
            match spine {
                Expr::Call { callee, .. } => {
                    if let Expr::Member { member, .. } = callee.as_ref() {
                        if member == "value" {
                            return true;
                        }
                    }
                    spine = callee;
                }
                Expr::Member { base, .. } => spine = base,
                _ => return false,
            }
        }
    }

    pub fn is_zero_number(&self) -> bool {
        match self {
            Expr::Number { text, .. } => text.chars().all(|c| c == '0') && !text.is_empty(),
            Expr::HexLit { text, .. } => text
                .strip_prefix("0x")
                .map(|d| !d.is_empty() && d.chars().all(|c| c == '0'))
                .unwrap_or(false),
            _ => false,
        }
    }

    /// Matches the explicit default values `0`, `false`, `address(0)`, `""`.
    pub fn is_default_value(&self) -> bool {
        match self {
            Expr::BoolLit { value, .. } => !*value,
            Expr::StrLit { value, .. } => value.is_empty(),
            Expr::Call { callee, args, .. } => {
                callee.as_ident() == Some("address")
                    && args.len() == 1
                    && args[0].is_zero_number()
            }
            _ => self.is_zero_number(),
        }
    }

    /// The identifier at the root of a member/index chain: `a` for
    /// `a.b[c].d`. `None` when the chain roots in a call or literal.
    pub fn root_ident(&self) -> Option<&str> {
        match self {
            Expr::Ident { name, .. } => Some(name),
            Expr::Member { base, .. } => base.root_ident(),
            Expr::Index { base, .. } => base.root_ident(),
            _ => None,
        }
    }
}
