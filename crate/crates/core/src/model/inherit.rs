//! C3 linearization of contract hierarchies and derivation of the interface
//! a contract exposes after inheritance is applied.
//!
//! Base contract order follows the Solidity convention: the parent list is
//! reversed before the C3 merge, so for `contract D is B, C` the most
//! derived lookup order is `[D, C, B, ...]`.

use super::{FunctionSig, SystemModel};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InheritError {
    UnknownContract { name: String },
    Cycle { name: String },
    /// The C3 merge has no valid order for this contract's bases.
    Inconsistent { name: String },
}

impl fmt::Display for InheritError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InheritError::UnknownContract { name } => {
                write!(f, "unknown contract `{name}` in inheritance hierarchy")
            }
            InheritError::Cycle { name } => {
                write!(f, "inheritance cycle through `{name}`")
            }
            InheritError::Inconsistent { name } => {
                write!(f, "no consistent base order exists for `{name}`")
            }
        }
    }
}

impl std::error::Error for InheritError {}

/// C3 linearization over an arbitrary parent lookup. `parents_of` returns
/// the declared parent list in source order, or `None` for unknown names.
pub fn c3_linearize<F>(start: &str, parents_of: &F) -> Result<Vec<String>, InheritError>
where
    F: Fn(&str) -> Option<Vec<String>>,
{
    let mut memo: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut visiting: BTreeSet<String> = BTreeSet::new();
    lin(start, parents_of, &mut memo, &mut visiting)
}

fn lin<F>(
    name: &str,
    parents_of: &F,
    memo: &mut BTreeMap<String, Vec<String>>,
    visiting: &mut BTreeSet<String>,
) -> Result<Vec<String>, InheritError>
where
    F: Fn(&str) -> Option<Vec<String>>,
{
    if let Some(done) = memo.get(name) {
        return Ok(done.clone());
    }
    if !visiting.insert(name.to_string()) {
        return Err(InheritError::Cycle {
            name: name.to_string(),
        });
    }
    let parents = parents_of(name).ok_or_else(|| InheritError::UnknownContract {
        name: name.to_string(),
    })?;

    let mut sequences: Vec<Vec<String>> = Vec::new();
    for parent in parents.iter().rev() {
        sequences.push(lin(parent, parents_of, memo, visiting)?);
    }
    sequences.push(parents.iter().rev().cloned().collect());

    let mut result = vec![name.to_string()];
    result.extend(merge(sequences).ok_or_else(|| InheritError::Inconsistent {
        name: name.to_string(),
    })?);

    visiting.remove(name);
    memo.insert(name.to_string(), result.clone());
    Ok(result)
}

fn merge(mut sequences: Vec<Vec<String>>) -> Option<Vec<String>> {
    let mut out = Vec::new();
    loop {
        sequences.retain(|s| !s.is_empty());
        if sequences.is_empty() {
            return Some(out);
        }
        let candidate = sequences
            .iter()
            .map(|s| s[0].clone())
            .find(|head| sequences.iter().all(|s| !s[1..].contains(head)))?;
        for s in &mut sequences {
            if s.first() == Some(&candidate) {
                s.remove(0);
            }
        }
        out.push(candidate);
    }
}

/// Linearizes a contract of the model, most derived first.
pub fn linearize(model: &SystemModel, contract: &str) -> Result<Vec<String>, InheritError> {
    let parents_of = |name: &str| model.contract(name).map(|c| c.parents.clone());
    c3_linearize(contract, &parents_of)
}

/// A function name reachable from two bases that are unrelated to each
/// other, so neither definition overrides the other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collision {
    pub function: String,
    /// The first unrelated pair of defining contracts, in linearization
    /// order.
    pub owners: (String, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectiveInterface {
    /// Known linearization, most derived first.
    pub linearization: Vec<String>,
    /// Visible functions with the contract whose definition wins. Ordered by
    /// the winning contract's position in the linearization, then by
    /// declaration order inside it.
    pub functions: Vec<(String, FunctionSig)>,
    pub collisions: Vec<Collision>,
}

/// Computes the interface a contract exposes once inheritance is resolved.
/// For each function name the defining contract earliest in the
/// linearization wins.
pub fn effective_interface(
    model: &SystemModel,
    contract: &str,
) -> Result<EffectiveInterface, InheritError> {
    let order = linearize(model, contract)?;
    let mut functions: Vec<(String, FunctionSig)> = Vec::new();
    let mut owners_by_name: BTreeMap<String, Vec<String>> = BTreeMap::new();

    for owner in &order {
        let decl = model.contract(owner).expect("linearized name resolves");
        for f in &decl.functions {
            owners_by_name
                .entry(f.name.clone())
                .or_default()
                .push(owner.clone());
            if !functions.iter().any(|(_, g)| g.name == f.name) {
                functions.push((owner.clone(), f.clone()));
            }
        }
    }

    let mut lins: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for name in &order {
        lins.insert(name.clone(), linearize(model, name)?);
    }
    let related = |a: &str, b: &str| lins[a].iter().any(|n| n == b) || lins[b].iter().any(|n| n == a);

    let mut collisions = Vec::new();
    for (name, owners) in &owners_by_name {
        'pairs: for i in 0..owners.len() {
            for j in i + 1..owners.len() {
                if !related(&owners[i], &owners[j]) {
                    collisions.push(Collision {
                        function: name.clone(),
                        owners: (owners[i].clone(), owners[j].clone()),
                    });
                    break 'pairs;
                }
            }
        }
    }

    Ok(EffectiveInterface {
        linearization: order,
        functions,
        collisions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph<'a>(
        edges: &'a [(&'a str, &'a [&'a str])],
    ) -> impl Fn(&str) -> Option<Vec<String>> + 'a {
        move |name: &str| {
            edges
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, ps)| ps.iter().map(|s| s.to_string()).collect())
        }
    }

    #[test]
    fn diamond_linearizes_right_to_left() {
        let parents = graph(&[
            ("A", &[]),
            ("B", &["A"]),
            ("C", &["A"]),
            ("D", &["B", "C"]),
        ]);
        let order = c3_linearize("D", &parents).unwrap();
        assert_eq!(order, vec!["D", "C", "B", "A"]);
    }

    #[test]
    fn single_chain() {
        let parents = graph(&[("A", &[]), ("B", &["A"]), ("C", &["B"])]);
        assert_eq!(c3_linearize("C", &parents).unwrap(), vec!["C", "B", "A"]);
    }

    #[test]
    fn cycle_is_detected() {
        let parents = graph(&[("A", &["B"]), ("B", &["A"])]);
        assert!(matches!(
            c3_linearize("A", &parents),
            Err(InheritError::Cycle { .. })
        ));
    }

    #[test]
    fn unknown_parent_is_reported() {
        let parents = graph(&[("A", &["Ghost"])]);
        assert!(matches!(
            c3_linearize("A", &parents),
            Err(InheritError::UnknownContract { name }) if name == "Ghost"
        ));
    }

    #[test]
    fn inconsistent_hierarchy_is_rejected() {
        // X before Y in one base, Y before X in the other.
        let parents = graph(&[
            ("X", &[]),
            ("Y", &[]),
            ("P", &["X", "Y"]),
            ("Q", &["Y", "X"]),
            ("Z", &["P", "Q"]),
        ]);
        assert!(matches!(
            c3_linearize("Z", &parents),
            Err(InheritError::Inconsistent { .. })
        ));
    }

    #[test]
    fn deeper_diamond_keeps_most_derived_first() {
        let parents = graph(&[
            ("Root", &[]),
            ("L1", &["Root"]),
            ("R1", &["Root"]),
            ("L2", &["L1"]),
            ("Top", &["L2", "R1"]),
        ]);
        let order = c3_linearize("Top", &parents).unwrap();
        assert_eq!(order, vec!["Top", "R1", "L2", "L1", "Root"]);
    }
}
