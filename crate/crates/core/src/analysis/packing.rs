//! Storage variable reordering: how many slots the declared order wastes
//! against a packed order.
//!
//! Only value types move; mappings, dynamic arrays, structs and fixed
//! arrays occupy their slots no matter where they are declared, so they
//! stay out of the reordering and contribute a fixed slot count. Value
//! types are packed first-fit decreasing into 32-byte bins, ties broken by
//! declaration order, which matches the exhaustive optimum for realistic
//! size mixes (the test suite checks this against a brute-force oracle).

use crate::model::inherit::c3_linearize;
use crate::sol::ast::{ContractDef, SourceUnit, VarDecl};
use crate::sol::layout::{storage_layout, storage_size, Cursor, LayoutError, StorageSize};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PackingSuggestion {
    pub contract: String,
    pub current_slots: u64,
    pub achievable_slots: u64,
    /// Proposed declaration order for the movable value-type variables.
    /// Variables excluded from reordering keep their own slots either way.
    pub suggested_order: Vec<String>,
}

impl PackingSuggestion {
    pub fn saves_slots(&self) -> bool {
        self.achievable_slots < self.current_slots
    }
}

pub fn suggest_packing(
    contract: &ContractDef,
    unit: &SourceUnit,
) -> Result<PackingSuggestion, LayoutError> {
    let current = storage_layout(contract, unit)?;

    // Flatten the variable sequence exactly as the layout does: base-most
    // contract first, constants skipped. Each variable keeps its owner as
    // the type resolution scope.
    let parents_of = |name: &str| unit.contract(name).map(|c| c.parents.clone());
    let chain = c3_linearize(&contract.name, &parents_of).map_err(|e| {
        LayoutError::BadHierarchy {
            contract: contract.name.clone(),
            detail: e.to_string(),
        }
    })?;

    let mut sized: Vec<(&VarDecl, StorageSize)> = Vec::new();
    for owner in chain.iter().rev() {
        let def = unit.contract(owner).expect("linearization names unit contracts");
        for var in def.state_vars.iter().filter(|v| !v.is_constant) {
            let size =
                storage_size(&var.ty, def, unit).ok_or_else(|| LayoutError::UnknownType {
                    contract: contract.name.clone(),
                    var: var.name.clone(),
                    ty: var.ty.to_string(),
                })?;
            sized.push((var, size));
        }
    }

    let mut movable: Vec<(usize, &VarDecl, u32)> = Vec::new();
    let mut fixed_slots = 0u64;
    for (idx, (var, size)) in sized.iter().enumerate() {
        match size {
            StorageSize::Packed { bytes } => movable.push((idx, var, *bytes)),
            StorageSize::DedicatedSlot => fixed_slots += 1,
            StorageSize::WholeSlots { slots } => fixed_slots += slots.max(&1),
        }
    }

    // First-fit decreasing; equal sizes stay in declaration order.
    let mut by_size = movable.clone();
    by_size.sort_by_key(|(idx, _, bytes)| (std::cmp::Reverse(*bytes), *idx));
    let mut bins: Vec<(u32, Vec<usize>)> = Vec::new();
    for (pos, (_, _, bytes)) in by_size.iter().enumerate() {
        match bins.iter_mut().find(|(used, _)| used + bytes <= 32) {
            Some((used, members)) => {
                *used += bytes;
                members.push(pos);
            }
            None => bins.push((*bytes, vec![pos])),
        }
    }

    let suggested_order: Vec<String> = bins
        .iter()
        .flat_map(|(_, members)| members.iter())
        .map(|&pos| by_size[pos].1.name.clone())
        .collect();

    // Replay the suggestion through the real placement rules; the movable
    // group goes first, everything else keeps its own slots after it.
    let mut cursor = Cursor::default();
    for (_, members) in &bins {
        for &pos in members {
            cursor.place(StorageSize::Packed { bytes: by_size[pos].2 });
        }
    }
    let achievable = cursor.total_slots() + fixed_slots;

    if achievable > current.total_slots {
        // The declared order already beats the heuristic; keep it.
        return Ok(PackingSuggestion {
            contract: contract.name.clone(),
            current_slots: current.total_slots,
            achievable_slots: current.total_slots,
            suggested_order: movable.iter().map(|(_, v, _)| v.name.clone()).collect(),
        });
    }

    Ok(PackingSuggestion {
        contract: contract.name.clone(),
        current_slots: current.total_slots,
        achievable_slots: achievable,
        suggested_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sol::parse_solidity;

    fn suggestion(src: &str, contract: &str) -> PackingSuggestion {
        let unit = parse_solidity(src, "t.sol").expect("fixture parses");
        let c = unit.contract(contract).unwrap();
        suggest_packing(c, &unit).expect("packing succeeds")
    }

    #[test]
    fn interleaved_small_vars_can_be_packed() {
        let s = suggestion("contract A { uint8 a; uint256 b; uint8 c; }", "A");
        assert_eq!(s.current_slots, 3);
        assert_eq!(s.achievable_slots, 2);
        assert_eq!(s.suggested_order, vec!["b", "a", "c"]);
        assert!(s.saves_slots());
    }

    #[test]
    fn already_packed_pair_stays_at_one_slot() {
        let s = suggestion("contract A { uint128 a; uint128 b; }", "A");
        assert_eq!(s.current_slots, 1);
        assert_eq!(s.achievable_slots, 1);
        assert_eq!(s.suggested_order, vec!["a", "b"]);
        assert!(!s.saves_slots());
    }

    #[test]
    fn empty_contract() {
        let s = suggestion("contract A {}", "A");
        assert_eq!(s.current_slots, 0);
        assert_eq!(s.achievable_slots, 0);
        assert!(s.suggested_order.is_empty());
    }

    #[test]
    fn dynamic_types_keep_their_slots() {
        let s = suggestion(
            "contract A { uint8 a; mapping(address => uint256) m; uint8 b; }",
            "A",
        );
        assert_eq!(s.current_slots, 3);
        assert_eq!(s.achievable_slots, 2);
        assert_eq!(s.suggested_order, vec!["a", "b"]);
    }

    #[test]
    fn inherited_variables_are_considered() {
        let src = r#"
contract Base { uint8 x; }
contract Leaf is Base { uint256 y; uint8 z; }
"#;
        let s = suggestion(src, "Leaf");
        assert_eq!(s.current_slots, 3);
        assert_eq!(s.achievable_slots, 2);
        assert_eq!(s.suggested_order, vec!["y", "x", "z"]);
    }

    #[test]
    fn tie_sizes_keep_declaration_order() {
        let s = suggestion(
            "contract A { uint64 d; uint64 c; uint128 b; uint128 a; }",
            "A",
        );
        // 16-byte pair first (b before a by declaration), then the 8-byte
        // pair, all in one slot plus the overflowing leftovers.
        assert_eq!(s.suggested_order, vec!["b", "a", "d", "c"]);
        assert_eq!(s.achievable_slots, 2);
    }

    #[test]
    fn unknown_type_propagates() {
        let unit = parse_solidity("contract A { Missing m; uint8 a; }", "t.sol").unwrap();
        let err = suggest_packing(&unit.contracts[0], &unit).unwrap_err();
        assert!(matches!(err, LayoutError::UnknownType { .. }));
    }

    /// Minimum slots over every permutation, with an independent packer:
    /// a plain running-total fill rather than the layout cursor.
    fn exhaustive_min_slots(sizes: &[u32]) -> u64 {
        fn fill(seq: &[u32]) -> u64 {
            let mut slots = 0u64;
            let mut used = 33u32;
            for &b in seq {
                if used + b > 32 {
                    slots += 1;
                    used = 0;
                }
                used += b;
            }
            slots
        }
        fn permute(rest: &mut Vec<u32>, acc: &mut Vec<u32>, best: &mut u64) {
            if rest.is_empty() {
                *best = (*best).min(fill(acc));
                return;
            }
            for i in 0..rest.len() {
                let v = rest.remove(i);
                acc.push(v);
                permute(rest, acc, best);
                acc.pop();
                rest.insert(i, v);
            }
        }
        let mut best = u64::MAX;
        permute(&mut sizes.to_vec(), &mut Vec::new(), &mut best);
        best
    }

    #[test]
    fn ffd_matches_exhaustive_optimum_on_solidity_size_mixes() {
        let cases: Vec<Vec<&str>> = vec![
            vec!["uint8", "uint256", "uint8"],
            vec!["uint128", "uint128", "uint128"],
            vec!["address", "bool", "address", "bool", "uint64"],
            vec!["uint32", "bytes4", "uint256", "address", "bool", "uint128"],
            vec!["bytes32", "uint8", "uint16", "uint32", "uint64", "uint128"],
            vec!["address", "address", "address", "uint96", "uint96"],
            vec!["bool", "bool", "bool", "bool", "bool", "bool", "bool", "bool"],
            vec!["uint248", "uint8", "uint240", "uint16", "uint224", "uint32"],
        ];
        for tys in cases {
            let decls: String = tys
                .iter()
                .enumerate()
                .map(|(i, t)| format!("{t} v{i}; "))
                .collect();
            let src = format!("contract A {{ {decls} }}");
            let s = suggestion(&src, "A");

            let sizes: Vec<u32> = tys
                .iter()
                .map(|t| match *t {
                    "address" => 20,
                    "bool" => 1,
                    t if t.starts_with("bytes") => t[5..].parse().unwrap(),
                    t => t[4..].parse::<u32>().unwrap() / 8,
                })
                .collect();
            assert_eq!(
                s.achievable_slots,
                exhaustive_min_slots(&sizes),
                "suboptimal packing for {tys:?}"
            );
        }
    }

    #[test]
    fn suggestion_replayed_through_layout_yields_achievable() {
        let src = "contract A { uint8 a; uint256 b; uint8 c; bytes4 d; address e; }";
        let s = suggestion(src, "A");
        let decls: String = {
            let unit = parse_solidity(src, "t.sol").unwrap();
            let c = unit.contract("A").unwrap();
            s.suggested_order
                .iter()
                .map(|n| {
                    let v = c.state_vars.iter().find(|v| &v.name == n).unwrap();
                    format!("{} {};", v.ty, v.name)
                })
                .collect()
        };
        let reordered = format!("contract A {{ {decls} }}");
        let unit = parse_solidity(&reordered, "t.sol").unwrap();
        let l = storage_layout(unit.contract("A").unwrap(), &unit).unwrap();
        assert_eq!(l.total_slots, s.achievable_slots);
    }
}
