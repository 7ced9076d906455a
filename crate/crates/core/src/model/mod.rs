//! In-memory representation of a system model: actors, contracts, structs,
//! enums and interaction scenarios.

pub mod activation;
pub mod inherit;
pub mod validate;

pub use activation::{simulate_activations, ActivationReport, ReentrantCall};
pub use inherit::{effective_interface, linearize, EffectiveInterface, InheritError};
pub use validate::validate_model;

use crate::pattern::PatternId;
use crate::span::SourceSpan;
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SystemModel {
    pub name: String,
    pub goal: Option<String>,
    pub actors: Vec<ActorDecl>,
    /// Contracts, structs and enums in declaration order.
    pub decls: Vec<TopDecl>,
    pub scenarios: Vec<Scenario>,
    pub span: SourceSpan,
}

impl SystemModel {
    pub fn contracts(&self) -> impl Iterator<Item = &ContractDecl> {
        self.decls.iter().filter_map(|d| match d {
            TopDecl::Contract(c) => Some(c),
            _ => None,
        })
    }

    pub fn structs(&self) -> impl Iterator<Item = &StructDecl> {
        self.decls.iter().filter_map(|d| match d {
            TopDecl::Struct(s) => Some(s),
            _ => None,
        })
    }

    pub fn enums(&self) -> impl Iterator<Item = &EnumDecl> {
        self.decls.iter().filter_map(|d| match d {
            TopDecl::Enum(e) => Some(e),
            _ => None,
        })
    }

    pub fn contract(&self, name: &str) -> Option<&ContractDecl> {
        self.contracts().find(|c| c.name == name)
    }

    /// True when `name` refers to a declared contract, struct or enum.
    pub fn type_exists(&self, name: &str) -> bool {
        self.decls.iter().any(|d| d.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActorDecl {
    pub name: String,
    pub kind: ActorKind,
    pub span: SourceSpan,
}

/// Participant kinds that are not contracts declared by the model itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ActorKind {
    Person,
    System,
    Device,
    Contract,
    ExternalContract,
    Oracle,
    Account,
}

impl ActorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ActorKind::Person => "person",
            ActorKind::System => "system",
            ActorKind::Device => "device",
            ActorKind::Contract => "contract",
            ActorKind::ExternalContract => "external_contract",
            ActorKind::Oracle => "oracle",
            ActorKind::Account => "account",
        }
    }

    /// Stereotype label as it appears in sequence diagrams.
    pub fn stereotype(self) -> &'static str {
        match self {
            ActorKind::ExternalContract => "external contract",
            other => other.as_str(),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "person" => Some(ActorKind::Person),
            "system" => Some(ActorKind::System),
            "device" => Some(ActorKind::Device),
            "contract" => Some(ActorKind::Contract),
            "external_contract" => Some(ActorKind::ExternalContract),
            "oracle" => Some(ActorKind::Oracle),
            "account" => Some(ActorKind::Account),
            _ => None,
        }
    }

    /// Whether messages of call kinds may target this participant.
    pub fn is_contract_like(self) -> bool {
        matches!(
            self,
            ActorKind::Contract | ActorKind::ExternalContract | ActorKind::Oracle
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TopDecl {
    Contract(ContractDecl),
    Struct(StructDecl),
    Enum(EnumDecl),
}

impl TopDecl {
    pub fn name(&self) -> &str {
        match self {
            TopDecl::Contract(c) => &c.name,
            TopDecl::Struct(s) => &s.name,
            TopDecl::Enum(e) => &e.name,
        }
    }

    pub fn span(&self) -> &SourceSpan {
        match self {
            TopDecl::Contract(c) => &c.span,
            TopDecl::Struct(s) => &s.span,
            TopDecl::Enum(e) => &e.span,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContractStereotype {
    Contract,
    Interface,
    LibraryContract,
}

impl ContractStereotype {
    /// Stereotype label as it appears in class diagrams.
    pub fn label(self) -> &'static str {
        match self {
            ContractStereotype::Contract => "contract",
            ContractStereotype::Interface => "interface",
            ContractStereotype::LibraryContract => "library contract",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContractDecl {
    pub name: String,
    pub stereotype: ContractStereotype,
    /// Parent names in source order of the `is` clause.
    pub parents: Vec<String>,
    pub state_vars: Vec<StateVar>,
    pub events: Vec<EventDecl>,
    pub modifiers: Vec<ModifierDecl>,
    pub functions: Vec<FunctionSig>,
    pub patterns: BTreeSet<PatternId>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateVar {
    pub name: String,
    pub ty: TypeName,
    pub visibility: Visibility,
    pub span: SourceSpan,
}

impl StateVar {
    pub fn collection(&self) -> CollectionKind {
        self.ty.collection()
    }
}

/// Collection stereotype of a state variable, derived from its type so the
/// two can never disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CollectionKind {
    Scalar,
    Array,
    Mapping,
    MappingAddress,
    MappingUint,
}

impl CollectionKind {
    /// Stereotype label as it appears in class diagrams, `None` for scalars.
    pub fn label(self) -> Option<&'static str> {
        match self {
            CollectionKind::Scalar => None,
            CollectionKind::Array => Some("array"),
            CollectionKind::Mapping => Some("mapping"),
            CollectionKind::MappingAddress => Some("mapping [address]"),
            CollectionKind::MappingUint => Some("mapping [uint]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EventDecl {
    pub name: String,
    pub params: Vec<Param>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModifierDecl {
    pub name: String,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FunctionSig {
    pub name: String,
    pub params: Vec<Param>,
    pub returns: Vec<TypeName>,
    pub visibility: Visibility,
    pub mutability: Mutability,
    /// Modifier names this function applies, from the `uses (...)` clause.
    pub uses: Vec<String>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Param {
    pub name: String,
    pub ty: TypeName,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Visibility {
    Public,
    External,
    Internal,
    Private,
}

impl Visibility {
    pub fn as_str(self) -> &'static str {
        match self {
            Visibility::Public => "public",
            Visibility::External => "external",
            Visibility::Internal => "internal",
            Visibility::Private => "private",
        }
    }

    /// Compartment glyph used in class diagrams.
    pub fn glyph(self) -> char {
        match self {
            Visibility::Public | Visibility::External => '+',
            Visibility::Internal => '#',
            Visibility::Private => '-',
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "public" => Some(Visibility::Public),
            "external" => Some(Visibility::External),
            "internal" => Some(Visibility::Internal),
            "private" => Some(Visibility::Private),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutability {
    NonPayable,
    Payable,
    View,
    Pure,
}

impl Mutability {
    pub fn keyword(self) -> Option<&'static str> {
        match self {
            Mutability::NonPayable => None,
            Mutability::Payable => Some("payable"),
            Mutability::View => Some("view"),
            Mutability::Pure => Some("pure"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructDecl {
    pub name: String,
    pub fields: Vec<Param>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumDecl {
    pub name: String,
    pub variants: Vec<String>,
    pub span: SourceSpan,
}

/// Types as the model DSL knows them. The Solidity subset reuses this with
/// the addition of fixed-size arrays and `address payable`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TypeName {
    Elementary(ElementaryType),
    /// Reference to a contract, struct or enum. May be qualified with a dot
    /// (`Defs.Order`) in Solidity sources.
    UserDefined(String),
    /// Dynamically sized array `T[]`.
    Array(Box<TypeName>),
    /// Fixed-size array `T[n]`; Solidity sources only.
    FixedArray(Box<TypeName>, u64),
    Mapping(Box<TypeName>, Box<TypeName>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ElementaryType {
    /// `uintN`, N in 8..=256 step 8; `uint` normalises to 256.
    Uint(u16),
    Int(u16),
    Address,
    /// Solidity sources only.
    AddressPayable,
    Bool,
    /// `bytesN`, N in 1..=32.
    FixedBytes(u8),
    Bytes,
    String,
}

impl ElementaryType {
    pub fn parse(word: &str) -> Option<Self> {
        match word {
            "address" => return Some(ElementaryType::Address),
            "bool" => return Some(ElementaryType::Bool),
            "bytes" => return Some(ElementaryType::Bytes),
            "string" => return Some(ElementaryType::String),
            "uint" => return Some(ElementaryType::Uint(256)),
            "int" => return Some(ElementaryType::Int(256)),
            "byte" => return Some(ElementaryType::FixedBytes(1)),
            _ => {}
        }
        if let Some(n) = word.strip_prefix("uint").and_then(|n| n.parse::<u16>().ok()) {
            if n >= 8 && n <= 256 && n % 8 == 0 {
                return Some(ElementaryType::Uint(n));
            }
        }
        if let Some(n) = word.strip_prefix("int").and_then(|n| n.parse::<u16>().ok()) {
            if n >= 8 && n <= 256 && n % 8 == 0 {
                return Some(ElementaryType::Int(n));
            }
        }
        if let Some(n) = word.strip_prefix("bytes").and_then(|n| n.parse::<u8>().ok()) {
            if (1..=32).contains(&n) {
                return Some(ElementaryType::FixedBytes(n));
            }
        }
        None
    }
}

impl fmt::Display for ElementaryType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementaryType::Uint(n) => write!(f, "uint{n}"),
            ElementaryType::Int(n) => write!(f, "int{n}"),
            ElementaryType::Address => f.write_str("address"),
            ElementaryType::AddressPayable => f.write_str("address payable"),
            ElementaryType::Bool => f.write_str("bool"),
            ElementaryType::FixedBytes(n) => write!(f, "bytes{n}"),
            ElementaryType::Bytes => f.write_str("bytes"),
            ElementaryType::String => f.write_str("string"),
        }
    }
}

impl TypeName {
    pub fn collection(&self) -> CollectionKind {
        match self {
            TypeName::Array(_) | TypeName::FixedArray(..) => CollectionKind::Array,
            TypeName::Mapping(key, _) => match **key {
                TypeName::Elementary(ElementaryType::Address)
                | TypeName::Elementary(ElementaryType::AddressPayable) => {
                    CollectionKind::MappingAddress
                }
                TypeName::Elementary(ElementaryType::Uint(_)) => CollectionKind::MappingUint,
                _ => CollectionKind::Mapping,
            },
            _ => CollectionKind::Scalar,
        }
    }

    /// Name of the user-defined type at the base of this type, if any. For
    /// mappings this is the value side, matching how associations are drawn.
    pub fn user_base(&self) -> Option<&str> {
        match self {
            TypeName::UserDefined(n) => Some(n),
            TypeName::Array(inner) | TypeName::FixedArray(inner, _) => inner.user_base(),
            TypeName::Mapping(_, value) => value.user_base(),
            TypeName::Elementary(_) => None,
        }
    }
}

impl fmt::Display for TypeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeName::Elementary(e) => write!(f, "{e}"),
            TypeName::UserDefined(n) => f.write_str(n),
            TypeName::Array(inner) => write!(f, "{inner}[]"),
            TypeName::FixedArray(inner, n) => write!(f, "{inner}[{n}]"),
            TypeName::Mapping(k, v) => write!(f, "mapping({k} => {v})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub participants: Vec<Participant>,
    pub messages: Vec<Message>,
    pub span: SourceSpan,
}

impl Scenario {
    pub fn participant(&self, alias: &str) -> Option<&Participant> {
        self.participants.iter().find(|p| p.alias == alias)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Participant {
    pub alias: String,
    pub kind: ParticipantKind,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ParticipantKind {
    Actor(ActorKind),
    /// Instance of a contract declared in the model.
    Declared(String),
}

impl ParticipantKind {
    pub fn is_contract_like(&self) -> bool {
        match self {
            ParticipantKind::Actor(k) => k.is_contract_like(),
            ParticipantKind::Declared(_) => true,
        }
    }

    /// True for participants modelled as externally owned accounts, which
    /// can hold ether but cannot execute code.
    pub fn is_account(&self) -> bool {
        matches!(self, ParticipantKind::Actor(ActorKind::Account))
    }

    pub fn stereotype(&self) -> &str {
        match self {
            ParticipantKind::Actor(k) => k.stereotype(),
            ParticipantKind::Declared(_) => "contract",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageKind {
    /// Blockchain transaction submitted by a non-contract participant.
    TransMsg,
    /// Contract-to-contract call.
    DirectMsg,
    View,
    Pure,
    Fallback,
    EtherTransfer,
    Creation,
}

impl MessageKind {
    /// Stereotype label as it appears in sequence diagrams.
    pub fn stereotype(self) -> &'static str {
        match self {
            MessageKind::TransMsg => "trans-msg",
            MessageKind::DirectMsg => "direct-msg",
            MessageKind::View => "view",
            MessageKind::Pure => "pure",
            MessageKind::Fallback => "fallback",
            MessageKind::EtherTransfer => "ethers",
            MessageKind::Creation => "create",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "trans-msg" => Some(MessageKind::TransMsg),
            "direct-msg" => Some(MessageKind::DirectMsg),
            "view" => Some(MessageKind::View),
            "pure" => Some(MessageKind::Pure),
            "fallback" => Some(MessageKind::Fallback),
            "ethers" => Some(MessageKind::EtherTransfer),
            "create" => Some(MessageKind::Creation),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Message {
    pub from: String,
    pub to: String,
    pub label: String,
    pub kind: MessageKind,
    /// True when the message was written with the dashed arrow `-->`. Only
    /// ether transfers distinguish the two: a dashed ether arrow is a return
    /// of control alongside value, a solid one starts a new activation on
    /// the receiver (it may trigger the receiving contract's fallback).
    pub return_arrow: bool,
    pub span: SourceSpan,
}
