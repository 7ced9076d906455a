//! Solidity subset: AST, parser and storage layout.

pub mod ast;
pub mod layout;
mod parse;

pub use ast::{
    ContractDef, ContractKind, DataLocation, EnumDef, EventDef, EventParam, Expr, FuncDef,
    ModifierDef, ModifierInvocation, PragmaDirective, SolParam, SourceUnit, Stmt, StructDef,
    UsingDecl, VarDecl,
};
pub use layout::{storage_layout, LayoutError, SlotEntry, StorageLayout, StorageSize};
pub use parse::parse_solidity;
