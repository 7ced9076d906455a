//! Plain-text class and sequence diagrams.
//!
//! Both renderers emit a line-oriented format written to `.adt` files
//! (UTF-8, LF line ends) rather than an image, so diagrams can be kept
//! under version control and compared byte for byte in tests. The shape is
//! deliberately close to the declarative UML text tools; adapting a block
//! to one of them is a mechanical substitution. Stereotypes appear as
//! `<<name>>`.
//!
//! Class diagram grammar, one block per declared type:
//!
//! ```text
//! class Name <<contract|interface|library contract|struct|enum>>
//!   name: type <<array|mapping|mapping [address]|mapping [uint]>>
//!   event Name(params) <<event>>
//!   --
//!   modifier name() <<modifier>>
//!   + name(params): returns
//! end
//! ```
//!
//! The `--` separator and visibility-glyph lines form the bottom
//! compartment and are omitted when it is empty, as struct and enum blocks
//! always do. After the blocks come inheritance edges (`Child --|> Parent`)
//! and one association edge per member whose type refers to a declared
//! type (`Owner --> Target : role <<stereotype>>`).
//!
//! Sequence diagram grammar: `participant alias <<kind>>` lines in
//! declaration order, then one line per message. Calls render as
//! `from -> to : label <<kind>>`, ether returns use the dashed arrow
//! `-->`, and creation draws the arrow into the new participant's box as
//! `from -> to ** : label` with no stereotype.

use std::fmt::Write;

use crate::model::{
    ContractDecl, EnumDecl, Message, MessageKind, Param, Scenario, StructDecl, SystemModel,
    TopDecl, TypeName,
};

/// Renders the class diagram of the whole model. Blocks follow declaration
/// order; all edges come after the last block, separated by a blank line.
pub fn class_diagram(model: &SystemModel) -> String {
    let mut out = String::new();
    for (i, decl) in model.decls.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match decl {
            TopDecl::Contract(c) => contract_block(&mut out, c),
            TopDecl::Struct(s) => struct_block(&mut out, s),
            TopDecl::Enum(e) => enum_block(&mut out, e),
        }
    }
    let edges = edge_lines(model);
    if !edges.is_empty() {
        if !model.decls.is_empty() {
            out.push('\n');
        }
        for edge in edges {
            out.push_str(&edge);
            out.push('\n');
        }
    }
    out
}

/// Renders one scenario as a sequence diagram: participants first, then
/// messages, nothing else.
pub fn sequence_diagram(scenario: &Scenario) -> String {
    let mut out = String::new();
    for p in &scenario.participants {
        let _ = writeln!(out, "participant {} <<{}>>", p.alias, p.kind.stereotype());
    }
    for m in &scenario.messages {
        out.push_str(&message_line(m));
        out.push('\n');
    }
    out
}

fn contract_block(out: &mut String, c: &ContractDecl) {
    let _ = writeln!(out, "class {} <<{}>>", c.name, c.stereotype.label());
    for v in &c.state_vars {
        member_line(out, &v.name, &v.ty);
    }
    for ev in &c.events {
        let _ = writeln!(out, "  event {}({}) <<event>>", ev.name, params(&ev.params));
    }
    if !c.modifiers.is_empty() || !c.functions.is_empty() {
        out.push_str("  --\n");
        for m in &c.modifiers {
            let _ = writeln!(out, "  modifier {}() <<modifier>>", m.name);
        }
        for f in &c.functions {
            let _ = write!(out, "  {} {}({})", f.visibility.glyph(), f.name, params(&f.params));
            match f.returns.as_slice() {
                [] => {}
                [one] => {
                    let _ = write!(out, ": {one}");
                }
                many => {
                    let types: Vec<String> = many.iter().map(|t| t.to_string()).collect();
                    let _ = write!(out, ": ({})", types.join(", "));
                }
            }
            out.push('\n');
        }
    }
    out.push_str("end\n");
}

fn struct_block(out: &mut String, s: &StructDecl) {
    let _ = writeln!(out, "class {} <<struct>>", s.name);
    for f in &s.fields {
        member_line(out, &f.name, &f.ty);
    }
    out.push_str("end\n");
}

fn enum_block(out: &mut String, e: &EnumDecl) {
    let _ = writeln!(out, "class {} <<enum>>", e.name);
    for v in &e.variants {
        let _ = writeln!(out, "  {v}");
    }
    out.push_str("end\n");
}

fn member_line(out: &mut String, name: &str, ty: &TypeName) {
    match ty.collection().label() {
        Some(label) => {
            let _ = writeln!(out, "  {name}: {ty} <<{label}>>");
        }
        None => {
            let _ = writeln!(out, "  {name}: {ty}");
        }
    }
}

/// Inheritance edges for every contract, then association edges for every
/// contract state variable and struct field whose type bottoms out in a
/// declared type. The member name becomes the association role.
fn edge_lines(model: &SystemModel) -> Vec<String> {
    let mut edges = Vec::new();
    for c in model.contracts() {
        for parent in &c.parents {
            edges.push(format!("{} --|> {parent}", c.name));
        }
    }
    for decl in &model.decls {
        let (owner, members): (&str, Vec<(&str, &TypeName)>) = match decl {
            TopDecl::Contract(c) => (
                &c.name,
                c.state_vars.iter().map(|v| (v.name.as_str(), &v.ty)).collect(),
            ),
            TopDecl::Struct(s) => (
                &s.name,
                s.fields.iter().map(|f| (f.name.as_str(), &f.ty)).collect(),
            ),
            TopDecl::Enum(_) => continue,
        };
        for (role, ty) in members {
            let Some(base) = ty.user_base() else { continue };
            if !model.type_exists(base) {
                continue;
            }
            match ty.collection().label() {
                Some(label) => edges.push(format!("{owner} --> {base} : {role} <<{label}>>")),
                None => edges.push(format!("{owner} --> {base} : {role}")),
            }
        }
    }
    edges
}

fn message_line(m: &Message) -> String {
    let arrow = if m.return_arrow { "-->" } else { "->" };
    if m.kind == MessageKind::Creation {
        return format!("{} {arrow} {} ** : {}", m.from, m.to, m.label);
    }
    format!(
        "{} {arrow} {} : {} <<{}>>",
        m.from,
        m.to,
        m.label,
        m.kind.stereotype()
    )
}

fn params(ps: &[Param]) -> String {
    ps.iter()
        .map(|p| format!("{}: {}", p.name, p.ty))
        .collect::<Vec<_>>()
        .join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{format_model, parse_model};

    fn model(src: &str) -> SystemModel {
        parse_model(src, "m.abcde").expect("fixture should parse")
    }

    #[test]
    fn empty_contract_is_two_lines() {
        let m = model("system S { contract C { } }");
        assert_eq!(class_diagram(&m), "class C <<contract>>\nend\n");
    }

    #[test]
    fn compartments_render_in_order() {
        let m = model(
            r#"
            system Market {
                contract Shop {
                    state {
                        owner: address private
                        listed: uint256[] internal
                        price: mapping(bytes32 => uint256) internal
                        balance: mapping(address => uint256) public
                        serial: mapping(uint256 => address) internal
                    }
                    events { Sold(item: bytes32, amount: uint256) }
                    modifiers { onlyOwner; }
                    functions {
                        buy(item: bytes32) public payable uses (onlyOwner)
                        lookup(item: bytes32) external view returns (uint256)
                        split() internal returns (uint256, address)
                        seed() private
                    }
                }
            }
            "#,
        );
        let expected = "\
class Shop <<contract>>
  owner: address
  listed: uint256[] <<array>>
  price: mapping(bytes32 => uint256) <<mapping>>
  balance: mapping(address => uint256) <<mapping [address]>>
  serial: mapping(uint256 => address) <<mapping [uint]>>
  event Sold(item: bytes32, amount: uint256) <<event>>
  --
  modifier onlyOwner() <<modifier>>
  + buy(item: bytes32)
  + lookup(item: bytes32): uint256
  # split(): (uint256, address)
  - seed()
end
";
        assert_eq!(class_diagram(&m), expected);
    }

    #[test]
    fn struct_and_enum_blocks_have_no_bottom_compartment() {
        let m = model(
            "system S { struct Order { maker: address amount: uint256 } enum Phase { Open, Closed } }",
        );
        let expected = "\
class Order <<struct>>
  maker: address
  amount: uint256
end

class Phase <<enum>>
  Open
  Closed
end
";
        let text = class_diagram(&m);
        assert_eq!(text, expected);
        assert!(!text.contains("--"));
    }

    #[test]
    fn interface_and_library_stereotypes() {
        let m = model(
            "system S { interface IToken { transfer(to: address) } library Math { add(a: uint256, b: uint256) internal pure returns (uint256) } }",
        );
        let text = class_diagram(&m);
        assert!(text.contains("class IToken <<interface>>"));
        assert!(text.contains("class Math <<library contract>>"));
    }

    #[test]
    fn inheritance_and_association_edges() {
        let m = model(
            r#"
            system S {
                contract Exchange is Ownable, Guard {
                    state { fills: mapping(bytes32 => Order) internal }
                }
                contract Ownable { }
                contract Guard { }
                struct Order { maker: address }
            }
            "#,
        );
        let text = class_diagram(&m);
        let tail: Vec<&str> = text.lines().rev().take(3).collect();
        assert_eq!(
            tail,
            vec![
                "Exchange --> Order : fills <<mapping>>",
                "Exchange --|> Guard",
                "Exchange --|> Ownable",
            ]
        );
    }

    #[test]
    fn scalar_reference_edge_has_no_stereotype() {
        let m = model(
            "system S { contract Vault { state { last: Order internal } } struct Order { maker: address } }",
        );
        let text = class_diagram(&m);
        assert!(text.contains("Vault --> Order : last\n"));
    }

    #[test]
    fn unknown_base_types_draw_no_edge() {
        let m = model("system S { contract C { state { t: IERC20 internal } } }");
        assert!(!class_diagram(&m).contains("-->"));
    }

    #[test]
    fn one_call_scenario_is_three_lines() {
        let m = model(
            r#"
            system S {
                actor taker : person
                contract Exchange { }
                scenario Fill {
                    participant t : person
                    participant ex : contract Exchange
                    t -> ex : "fillOrder(order)" [trans-msg]
                }
            }
            "#,
        );
        let expected = "\
participant t <<person>>
participant ex <<contract>>
t -> ex : fillOrder(order) <<trans-msg>>
";
        assert_eq!(sequence_diagram(&m.scenarios[0]), expected);
    }

    #[test]
    fn ether_return_uses_dashed_arrow() {
        let m = model(
            r#"
            system S {
                contract Bank { }
                scenario Payout {
                    participant u : person
                    participant b : contract Bank
                    u -> b : "withdraw()" [trans-msg]
                    b --> u : "1 ether" [ethers]
                }
            }
            "#,
        );
        let text = sequence_diagram(&m.scenarios[0]);
        assert!(text.contains("b --> u : 1 ether <<ethers>>"));
    }

    #[test]
    fn standalone_ether_transfer_keeps_solid_arrow() {
        let m = model(
            r#"
            system S {
                contract Bank { }
                scenario Fund {
                    participant u : person
                    participant b : contract Bank
                    u -> b : "2 ether" [ethers]
                }
            }
            "#,
        );
        assert!(sequence_diagram(&m.scenarios[0]).contains("u -> b : 2 ether <<ethers>>"));
    }

    #[test]
    fn creation_message_has_no_stereotype() {
        let m = model(
            r#"
            system S {
                contract Child { }
                scenario Deploy {
                    participant d : person
                    participant c : contract Child
                    d -> c : "create" [create]
                }
            }
            "#,
        );
        let text = sequence_diagram(&m.scenarios[0]);
        assert!(text.contains("d -> c ** : create\n"));
        let message = text.lines().last().unwrap();
        assert!(!message.contains("<<"));
    }

    #[test]
    fn empty_scenario_lists_participants_only() {
        let m = model(
            r#"
            system S {
                scenario Idle {
                    participant watcher : oracle
                    participant ledger : system
                }
            }
            "#,
        );
        let expected = "participant watcher <<oracle>>\nparticipant ledger <<system>>\n";
        assert_eq!(sequence_diagram(&m.scenarios[0]), expected);
    }

    /// Every stereotype the renderers can produce, and no other text,
    /// appears between guillemets.
    #[test]
    fn all_stereotypes_come_from_the_fixed_vocabulary() {
        let m = model(
            r#"
            system Everything {
                actor alice : person
                actor backend : system
                actor meter : device
                actor proxy : contract
                actor token : external_contract
                actor feed : oracle
                actor wallet : account

                contract Hub is Base @pattern(CEI) {
                    state {
                        items: uint256[] internal
                        names: mapping(bytes32 => bytes32) internal
                        held: mapping(address => uint256) internal
                        slots: mapping(uint256 => address) internal
                    }
                    events { Ping(from: address) }
                    modifiers { guarded; }
                    functions {
                        act() public
                        peek() public view returns (uint256)
                        calc(a: uint256) public pure returns (uint256)
                    }
                }
                contract Base { }
                interface IHub { act() }
                library Tools { clamp(x: uint256) internal pure returns (uint256) }
                struct Item { id: uint256 }
                enum Mode { On, Off }

                scenario Tour {
                    participant a : person
                    participant s : system
                    participant d : device
                    participant p : contract
                    participant x : external_contract
                    participant f : oracle
                    participant w : account
                    participant h : contract Hub
                    a -> h : "act()" [trans-msg]
                    h -> p : "relay()" [direct-msg]
                    h -> f : "peek()" [view]
                    h -> x : "calc(1)" [pure]
                    a -> x : "" [fallback]
                    h --> a : "1 ether" [ethers]
                    a -> h : "create" [create]
                }
            }
            "#,
        );
        let mut text = class_diagram(&m);
        for sc in &m.scenarios {
            text.push_str(&sequence_diagram(sc));
        }

        let allowed = [
            "contract",
            "interface",
            "library contract",
            "struct",
            "enum",
            "event",
            "modifier",
            "array",
            "mapping",
            "mapping [address]",
            "mapping [uint]",
            "person",
            "system",
            "device",
            "external contract",
            "oracle",
            "account",
            "trans-msg",
            "direct-msg",
            "view",
            "pure",
            "fallback",
            "ethers",
        ];
        let mut seen = std::collections::BTreeSet::new();
        for (start, _) in text.match_indices("<<") {
            let rest = &text[start + 2..];
            let end = rest.find(">>").expect("guillemets should be balanced");
            seen.insert(&rest[..end]);
        }
        for s in &seen {
            assert!(allowed.contains(s), "unexpected stereotype <<{s}>>");
        }
        for want in allowed {
            assert!(seen.contains(want), "stereotype <<{want}>> never rendered");
        }
    }

    #[test]
    fn diagrams_stable_under_model_reparse() {
        let src = r#"
            system S {
                actor u : person
                contract Exchange is Ownable {
                    state { filled: mapping(bytes32 => uint256) internal }
                    events { Fill(maker: address) }
                    modifiers { nonReentrant; }
                    functions { fillOrder(id: bytes32) public payable uses (nonReentrant) }
                }
                contract Ownable { }
                scenario Fill {
                    participant t : person
                    participant ex : contract Exchange
                    t -> ex : "fillOrder(id)" [trans-msg]
                    ex --> t : "refund" [ethers]
                }
            }
        "#;
        let m = model(src);
        let reparsed = parse_model(&format_model(&m), "m.abcde").expect("reformatted model parses");
        assert_eq!(class_diagram(&m), class_diagram(&reparsed));
        assert_eq!(
            sequence_diagram(&m.scenarios[0]),
            sequence_diagram(&reparsed.scenarios[0])
        );
    }
}
