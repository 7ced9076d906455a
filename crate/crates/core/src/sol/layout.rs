//! Storage slot assignment following the Ethereum storage convention.
//!
//! Slots hold 32 bytes and are filled in declaration order, inherited
//! variables first (base-most contract first). A variable shares the
//! current slot when the remaining bytes suffice; mappings, dynamic arrays,
//! `bytes` and `string` reserve one full dedicated slot; structs and fixed
//! arrays start at a fresh slot and push the next variable to a fresh slot;
//! constants take no storage at all.

use super::ast::{ContractDef, SourceUnit, StructDef};
use crate::model::inherit::c3_linearize;
use crate::model::{ElementaryType, TypeName};
use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StorageLayout {
    pub contract: String,
    #[serde(rename = "slots")]
    pub entries: Vec<SlotEntry>,
    pub total_slots: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlotEntry {
    pub name: String,
    pub slot: u64,
    /// Byte offset within the slot, 0..=31.
    pub offset: u32,
    /// Bytes used by this entry in its first slot; aggregates that span
    /// multiple slots record 32 here and advance the cursor further.
    pub size: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LayoutError {
    UnknownType { contract: String, var: String, ty: String },
    BadHierarchy { contract: String, detail: String },
}

impl fmt::Display for LayoutError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LayoutError::UnknownType { contract, var, ty } => write!(
                f,
                "cannot lay out `{contract}.{var}`: unknown type `{ty}`"
            ),
            LayoutError::BadHierarchy { contract, detail } => {
                write!(f, "cannot lay out `{contract}`: {detail}")
            }
        }
    }
}

impl std::error::Error for LayoutError {}

/// How a type occupies storage: either packable bytes within a slot, or a
/// number of whole slots starting at a fresh one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StorageSize {
    /// Value types: can share a slot with neighbours.
    Packed { bytes: u32 },
    /// Mappings, dynamic arrays, `bytes`, `string`: one dedicated slot.
    DedicatedSlot,
    /// Structs and fixed arrays: fresh start, whole slots, fresh follow-up.
    WholeSlots { slots: u64 },
}

impl StorageSize {
    /// Bytes recorded for the layout entry.
    pub fn entry_bytes(self) -> u32 {
        match self {
            StorageSize::Packed { bytes } => bytes,
            StorageSize::DedicatedSlot => 32,
            StorageSize::WholeSlots { .. } => 32,
        }
    }
}

pub fn storage_layout(
    contract: &ContractDef,
    unit: &SourceUnit,
) -> Result<StorageLayout, LayoutError> {
    let parents_of = |name: &str| {
        unit.contracts
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.parents.clone())
    };
    let chain = c3_linearize(&contract.name, &parents_of).map_err(|e| LayoutError::BadHierarchy {
        contract: contract.name.clone(),
        detail: e.to_string(),
    })?;

    let mut cursor = Cursor::default();
    let mut entries = Vec::new();
    // Linearization lists the most derived contract first; storage is
    // assigned starting from the most base one.
    for owner in chain.iter().rev() {
        let def = unit
            .contracts
            .iter()
            .find(|c| c.name == *owner)
            .expect("linearization only names unit contracts");
        for var in &def.state_vars {
            if var.is_constant {
                continue;
            }
            let size = storage_size(&var.ty, def, unit).ok_or_else(|| LayoutError::UnknownType {
                contract: contract.name.clone(),
                var: var.name.clone(),
                ty: var.ty.to_string(),
            })?;
            let (slot, offset) = cursor.place(size);
            entries.push(SlotEntry {
                name: var.name.clone(),
                slot,
                offset,
                size: size.entry_bytes(),
            });
        }
    }

    Ok(StorageLayout {
        contract: contract.name.clone(),
        entries,
        total_slots: cursor.total_slots(),
    })
}

/// Slot/offset cursor implementing the packing rules.
#[derive(Debug, Default, Clone)]
pub struct Cursor {
    next_slot: u64,
    /// Bytes already used in the slot before `next_slot`, if it is still
    /// open for packing.
    open: Option<(u64, u32)>,
}

impl Cursor {
    pub fn place(&mut self, size: StorageSize) -> (u64, u32) {
        match size {
            StorageSize::Packed { bytes } => {
                if let Some((slot, used)) = self.open {
                    if used + bytes <= 32 {
                        self.open = Some((slot, used + bytes));
                        return (slot, used);
                    }
                }
                let slot = self.next_slot;
                self.next_slot += 1;
                self.open = if bytes < 32 { Some((slot, bytes)) } else { None };
                (slot, 0)
            }
            StorageSize::DedicatedSlot => {
                let slot = self.next_slot;
                self.next_slot += 1;
                self.open = None;
                (slot, 0)
            }
            StorageSize::WholeSlots { slots } => {
                let slot = self.next_slot;
                self.next_slot += slots.max(1);
                self.open = None;
                (slot, 0)
            }
        }
    }

    pub fn total_slots(&self) -> u64 {
        self.next_slot
    }
}

/// Storage footprint of a type, or None when a user-defined name cannot be
/// resolved within the unit.
pub fn storage_size(ty: &TypeName, scope: &ContractDef, unit: &SourceUnit) -> Option<StorageSize> {
    match ty {
        TypeName::Elementary(e) => Some(elementary_size(e)),
        TypeName::Mapping(_, _) => Some(StorageSize::DedicatedSlot),
        TypeName::Array(_) => Some(StorageSize::DedicatedSlot),
        TypeName::FixedArray(elem, n) => {
            let slots = fixed_array_slots(elem, *n, scope, unit)?;
            Some(StorageSize::WholeSlots { slots })
        }
        TypeName::UserDefined(name) => match resolve_user_type(name, scope, unit)? {
            ResolvedType::Struct(def, owner) => {
                let owner_def = unit.contracts.iter().find(|c| c.name == owner)?;
                Some(StorageSize::WholeSlots {
                    slots: struct_slots(def, owner_def, unit)?,
                })
            }
            ResolvedType::Enum(variants) => Some(StorageSize::Packed {
                bytes: enum_bytes(variants),
            }),
            ResolvedType::Contract => Some(StorageSize::Packed { bytes: 20 }),
        },
    }
}

fn elementary_size(e: &ElementaryType) -> StorageSize {
    match e {
        ElementaryType::Uint(bits) | ElementaryType::Int(bits) => StorageSize::Packed {
            bytes: u32::from(bits / 8),
        },
        ElementaryType::Address | ElementaryType::AddressPayable => {
            StorageSize::Packed { bytes: 20 }
        }
        ElementaryType::Bool => StorageSize::Packed { bytes: 1 },
        ElementaryType::FixedBytes(n) => StorageSize::Packed { bytes: u32::from(*n) },
        ElementaryType::Bytes | ElementaryType::String => StorageSize::DedicatedSlot,
    }
}

/// Smallest whole-byte width whose value range covers `count` members.
fn enum_bytes(count: usize) -> u32 {
    let mut bytes = 1u32;
    let mut capacity = 256u64;
    while (count as u64) > capacity {
        bytes += 1;
        capacity = capacity.saturating_mul(256);
    }
    bytes
}

fn fixed_array_slots(
    elem: &TypeName,
    n: u64,
    scope: &ContractDef,
    unit: &SourceUnit,
) -> Option<u64> {
    match storage_size(elem, scope, unit)? {
        StorageSize::Packed { bytes } => {
            let per_slot = (32 / bytes) as u64;
            Some(n.div_ceil(per_slot).max(1))
        }
        StorageSize::DedicatedSlot => Some(n.max(1)),
        StorageSize::WholeSlots { slots } => Some((n * slots).max(1)),
    }
}

/// A struct's slot count is the layout of its fields under the same rules.
fn struct_slots(def: &StructDef, scope: &ContractDef, unit: &SourceUnit) -> Option<u64> {
    let mut cursor = Cursor::default();
    for field in &def.fields {
        let size = storage_size(&field.ty, scope, unit)?;
        cursor.place(size);
    }
    Some(cursor.total_slots().max(1))
}

enum ResolvedType<'a> {
    Struct(&'a StructDef, String),
    Enum(usize),
    Contract,
}

/// Resolves a user-defined type name: qualified `Contract.Type` looks only
/// inside that contract; a bare name searches the declaring contract's
/// hierarchy first, then every contract in the unit, then contract names
/// themselves (address-sized references).
fn resolve_user_type<'a>(
    name: &str,
    scope: &'a ContractDef,
    unit: &'a SourceUnit,
) -> Option<ResolvedType<'a>> {
    if let Some((owner, inner)) = name.split_once('.') {
        let c = unit.contracts.iter().find(|c| c.name == owner)?;
        return lookup_in(c, inner);
    }

    let parents_of = |n: &str| {
        unit.contracts
            .iter()
            .find(|c| c.name == n)
            .map(|c| c.parents.clone())
    };
    if let Ok(chain) = c3_linearize(&scope.name, &parents_of) {
        for owner in &chain {
            if let Some(c) = unit.contracts.iter().find(|c| c.name == *owner) {
                if let Some(found) = lookup_in(c, name) {
                    return Some(found);
                }
            }
        }
    }
    for c in &unit.contracts {
        if let Some(found) = lookup_in(c, name) {
            return Some(found);
        }
    }
    if unit.contracts.iter().any(|c| c.name == name) {
        return Some(ResolvedType::Contract);
    }
    None
}

fn lookup_in<'a>(c: &'a ContractDef, name: &str) -> Option<ResolvedType<'a>> {
    if let Some(s) = c.structs.iter().find(|s| s.name == name) {
        return Some(ResolvedType::Struct(s, c.name.clone()));
    }
    if let Some(e) = c.enums.iter().find(|e| e.name == name) {
        return Some(ResolvedType::Enum(e.variants.len()));
    }
    None
}
