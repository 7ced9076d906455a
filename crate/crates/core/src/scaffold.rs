//! Solidity skeleton generation from a validated model.
//!
//! Every contract becomes a compilable stub: the pragma is locked to one
//! compiler version, state variables and events are declared in full, and
//! modifiers and functions get placeholder bodies that fail closed. A
//! modifier stub guards with `require(false, "TODO")` before its `_`
//! placeholder; a function stub reverts with "not implemented". View and
//! pure stubs cannot revert usefully in tests, so they are emitted with
//! empty bodies instead and return their zero-initialised return slots,
//! which yields default values for every type including structs and
//! arrays.
//!
//! Structs and enums cannot live at file scope in Solidity 0.5, so they
//! are gathered into one generated `Defs` contract and referenced with
//! qualified names (`Defs.Order`). Contracts keep their modelled `is`
//! clause; the container is imported, never inherited, so it works for
//! interfaces and libraries too.

use std::collections::{BTreeMap, BTreeSet};

use crate::config::ScaffoldConfig;
use crate::model::{
    ContractDecl, ContractStereotype, ElementaryType, FunctionSig, Mutability, Param, SystemModel,
    TopDecl, TypeName, Visibility,
};

/// Renders the whole model as Solidity files, returned as path → source.
/// With `one_file_per_contract` each contract lands in `<Name>.sol` plus a
/// shared `Defs.sol` when the model declares structs or enums; otherwise
/// everything is emitted into `<SystemName>.sol`.
pub fn generate_solidity(model: &SystemModel, config: &ScaffoldConfig) -> BTreeMap<String, String> {
    let ctx = Ctx::new(model);
    let mut files = BTreeMap::new();

    if config.one_file_per_contract {
        if ctx.has_defs {
            let mut out = header(config, false);
            out.push('\n');
            out.push_str(&defs_block(model, &ctx));
            files.insert(format!("{}.sol", ctx.defs_name), out);
        }
        for c in model.contracts() {
            let mut out = header(config, needs_encoder_v2(c, model));
            let imports = imports_for(c, model, &ctx);
            if !imports.is_empty() {
                out.push('\n');
                for path in imports {
                    out.push_str(&format!("import \"./{path}.sol\";\n"));
                }
            }
            out.push('\n');
            out.push_str(&contract_block(c, model, &ctx));
            files.insert(format!("{}.sol", c.name), out);
        }
    } else {
        let any_v2 = model.contracts().any(|c| needs_encoder_v2(c, model));
        let mut out = header(config, any_v2);
        if ctx.has_defs {
            out.push('\n');
            out.push_str(&defs_block(model, &ctx));
        }
        for c in model.contracts() {
            out.push('\n');
            out.push_str(&contract_block(c, model, &ctx));
        }
        files.insert(format!("{}.sol", model.name), out);
    }
    files
}

/// Names the renderer needs to qualify or import: which user-defined
/// names are structs or enums (they live in the generated container) and
/// what that container is called.
struct Ctx {
    defs_name: String,
    has_defs: bool,
    defs_types: BTreeSet<String>,
}

impl Ctx {
    fn new(model: &SystemModel) -> Self {
        let mut defs_name = String::from("Defs");
        while model.type_exists(&defs_name) {
            defs_name.push('_');
        }
        let defs_types: BTreeSet<String> = model
            .structs()
            .map(|s| s.name.clone())
            .chain(model.enums().map(|e| e.name.clone()))
            .collect();
        Ctx {
            defs_name,
            has_defs: !defs_types.is_empty(),
            defs_types,
        }
    }

    /// Type name as written inside a generated contract: struct and enum
    /// references go through the container, everything else stays bare.
    fn qualify(&self, name: &str) -> String {
        if self.defs_types.contains(name) {
            format!("{}.{name}", self.defs_name)
        } else {
            name.to_string()
        }
    }
}

fn header(config: &ScaffoldConfig, encoder_v2: bool) -> String {
    let mut out = String::new();
    for line in config.license_header.lines() {
        if line.is_empty() {
            out.push_str("//\n");
        } else if line.starts_with("//") {
            out.push_str(line.trim_end());
            out.push('\n');
        } else {
            out.push_str(&format!("// {line}\n"));
        }
    }
    out.push_str(&format!("pragma solidity {};\n", config.solidity_version));
    if encoder_v2 {
        out.push_str("pragma experimental ABIEncoderV2;\n");
    }
    out
}

/// Files the contract's own file must import: declared parents first in
/// `is`-clause order, then other referenced contracts alphabetically, the
/// struct/enum container last.
fn imports_for(c: &ContractDecl, model: &SystemModel, ctx: &Ctx) -> Vec<String> {
    let mut imports = Vec::new();
    let mut seen = BTreeSet::new();
    for parent in &c.parents {
        if model.contract(parent).is_some() && seen.insert(parent.clone()) {
            imports.push(parent.clone());
        }
    }
    let referenced = referenced_names(c);
    for name in &referenced {
        if *name != c.name && model.contract(name).is_some() && seen.insert(name.clone()) {
            imports.push(name.clone());
        }
    }
    if referenced.iter().any(|n| ctx.defs_types.contains(n)) {
        imports.push(ctx.defs_name.clone());
    }
    imports
}

/// Every user-defined name mentioned in the contract's state variable,
/// event parameter, function parameter and return types.
fn referenced_names(c: &ContractDecl) -> BTreeSet<String> {
    let mut names = BTreeSet::new();
    let types = c
        .state_vars
        .iter()
        .map(|v| &v.ty)
        .chain(c.events.iter().flat_map(|e| e.params.iter().map(|p| &p.ty)))
        .chain(c.functions.iter().flat_map(|f| {
            f.params.iter().map(|p| &p.ty).chain(f.returns.iter())
        }));
    for ty in types {
        collect_user_names(ty, &mut names);
    }
    names
}

fn collect_user_names(ty: &TypeName, out: &mut BTreeSet<String>) {
    match ty {
        TypeName::Elementary(_) => {}
        TypeName::UserDefined(n) => {
            out.insert(n.clone());
        }
        TypeName::Array(inner) | TypeName::FixedArray(inner, _) => collect_user_names(inner, out),
        TypeName::Mapping(key, value) => {
            collect_user_names(key, out);
            collect_user_names(value, out);
        }
    }
}

/// Public and external functions that take or return a struct need the
/// experimental ABI encoder under 0.5.
fn needs_encoder_v2(c: &ContractDecl, model: &SystemModel) -> bool {
    let is_struct = |name: &str| model.structs().any(|s| s.name == name);
    c.functions
        .iter()
        .filter(|f| matches!(f.visibility, Visibility::Public | Visibility::External))
        .flat_map(|f| f.params.iter().map(|p| &p.ty).chain(f.returns.iter()))
        .any(|ty| {
            let mut names = BTreeSet::new();
            collect_user_names(ty, &mut names);
            names.iter().any(|n| is_struct(n))
        })
}

/// The contract holding every struct and enum, in declaration order.
fn defs_block(model: &SystemModel, ctx: &Ctx) -> String {
    let mut blocks = Vec::new();
    for decl in &model.decls {
        match decl {
            TopDecl::Struct(s) => {
                let fields: Vec<String> = s
                    .fields
                    .iter()
                    .map(|f| format!("        {} {};", bare_type(&f.ty), f.name))
                    .collect();
                blocks.push(format!(
                    "    struct {} {{\n{}\n    }}",
                    s.name,
                    fields.join("\n")
                ));
            }
            TopDecl::Enum(e) => {
                blocks.push(format!("    enum {} {{ {} }}", e.name, e.variants.join(", ")));
            }
            TopDecl::Contract(_) => {}
        }
    }
    format!("contract {} {{\n{}\n}}\n", ctx.defs_name, blocks.join("\n\n"))
}

/// Type rendering inside the container itself, where sibling structs and
/// enums are in scope unqualified.
fn bare_type(ty: &TypeName) -> String {
    ty.to_string()
}

fn contract_block(c: &ContractDecl, model: &SystemModel, ctx: &Ctx) -> String {
    let keyword = match c.stereotype {
        ContractStereotype::Contract => "contract",
        ContractStereotype::Interface => "interface",
        ContractStereotype::LibraryContract => "library",
    };
    let mut head = format!("{keyword} {}", c.name);
    if !c.parents.is_empty() {
        head.push_str(&format!(" is {}", c.parents.join(", ")));
    }

    let mut blocks: Vec<String> = Vec::new();
    if !c.state_vars.is_empty() {
        let vars: Vec<String> = c
            .state_vars
            .iter()
            .map(|v| {
                format!(
                    "    {} {} {};",
                    render_type(&v.ty, ctx),
                    v.visibility.as_str(),
                    v.name
                )
            })
            .collect();
        blocks.push(vars.join("\n"));
    }
    if !c.events.is_empty() {
        let events: Vec<String> = c
            .events
            .iter()
            .map(|e| {
                let params: Vec<String> = e
                    .params
                    .iter()
                    .map(|p| format!("{} {}", render_type(&p.ty, ctx), p.name))
                    .collect();
                format!("    event {}({});", e.name, params.join(", "))
            })
            .collect();
        blocks.push(events.join("\n"));
    }
    for m in &c.modifiers {
        blocks.push(format!(
            "    modifier {}() {{\n        require(false, \"TODO\");\n        _;\n    }}",
            m.name
        ));
    }
    for f in &c.functions {
        blocks.push(function_stub(f, c, model, ctx));
    }

    if blocks.is_empty() {
        format!("{head} {{\n}}\n")
    } else {
        format!("{head} {{\n{}\n}}\n", blocks.join("\n\n"))
    }
}

fn function_stub(f: &FunctionSig, c: &ContractDecl, model: &SystemModel, ctx: &Ctx) -> String {
    let in_interface = c.stereotype == ContractStereotype::Interface;
    // Interfaces under 0.5 accept external functions only.
    let visibility = if in_interface {
        Visibility::External
    } else {
        f.visibility
    };

    let params: Vec<String> = f
        .params
        .iter()
        .map(|p| render_param(p, visibility, model, ctx))
        .collect();
    let mut sig = format!(
        "    function {}({}) {}",
        f.name,
        params.join(", "),
        visibility.as_str()
    );
    if let Some(kw) = f.mutability.keyword() {
        sig.push(' ');
        sig.push_str(kw);
    }
    if !in_interface {
        for m in &f.uses {
            sig.push(' ');
            sig.push_str(m);
        }
    }
    if !f.returns.is_empty() {
        let returns: Vec<String> = f
            .returns
            .iter()
            .map(|ty| {
                let mut s = render_type(ty, ctx);
                if is_reference_type(ty, model) {
                    s.push_str(" memory");
                }
                s
            })
            .collect();
        sig.push_str(&format!(" returns ({})", returns.join(", ")));
    }

    if in_interface {
        sig.push(';');
    } else if matches!(f.mutability, Mutability::View | Mutability::Pure) {
        sig.push_str(" {\n    }");
    } else {
        sig.push_str(" {\n        revert(\"not implemented\");\n    }");
    }
    sig
}

fn render_param(p: &Param, visibility: Visibility, model: &SystemModel, ctx: &Ctx) -> String {
    let mut s = render_type(&p.ty, ctx);
    if is_reference_type(&p.ty, model) {
        s.push_str(if visibility == Visibility::External {
            " calldata"
        } else {
            " memory"
        });
    }
    s.push(' ');
    s.push_str(&p.name);
    s
}

fn render_type(ty: &TypeName, ctx: &Ctx) -> String {
    match ty {
        TypeName::Elementary(e) => e.to_string(),
        TypeName::UserDefined(n) => ctx.qualify(n),
        TypeName::Array(inner) => format!("{}[]", render_type(inner, ctx)),
        TypeName::FixedArray(inner, n) => format!("{}[{n}]", render_type(inner, ctx)),
        TypeName::Mapping(key, value) => format!(
            "mapping({} => {})",
            render_type(key, ctx),
            render_type(value, ctx)
        ),
    }
}

/// Types that need an explicit data location in 0.5 parameter and return
/// lists. Enums and contract references are value types; mappings cannot
/// appear there at all and are left untouched.
fn is_reference_type(ty: &TypeName, model: &SystemModel) -> bool {
    match ty {
        TypeName::Array(_) | TypeName::FixedArray(..) => true,
        TypeName::Elementary(ElementaryType::Bytes | ElementaryType::String) => true,
        TypeName::UserDefined(n) => model.structs().any(|s| s.name == *n),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::lint;
    use crate::config::LintConfig;
    use crate::diag::Severity;
    use crate::dsl::parse_model;
    use crate::sol::parse_solidity;

    fn model(src: &str) -> SystemModel {
        parse_model(src, "m.abcde").expect("fixture should parse")
    }

    fn generate(src: &str) -> BTreeMap<String, String> {
        generate_solidity(&model(src), &ScaffoldConfig::default())
    }

    #[test]
    fn empty_contract_renders_pragma_and_empty_body() {
        let files = generate("system S { contract C { } }");
        assert_eq!(
            files["C.sol"],
            "pragma solidity 0.5.16;\n\ncontract C {\n}\n"
        );
    }

    #[test]
    fn configured_version_is_locked_into_the_pragma() {
        let m = model("system S { contract C { } }");
        let config = ScaffoldConfig {
            solidity_version: "0.5.12".to_string(),
            ..ScaffoldConfig::default()
        };
        let files = generate_solidity(&m, &config);
        assert!(files["C.sol"].starts_with("pragma solidity 0.5.12;\n"));
    }

    #[test]
    fn license_header_lines_become_comments() {
        let m = model("system S { contract C { } }");
        let config = ScaffoldConfig {
            license_header: "SPDX-License-Identifier: MIT\nall rights waived".to_string(),
            ..ScaffoldConfig::default()
        };
        let files = generate_solidity(&m, &config);
        assert!(files["C.sol"].starts_with(
            "// SPDX-License-Identifier: MIT\n// all rights waived\npragma solidity"
        ));
    }

    #[test]
    fn mapping_stereotypes_expand_to_solidity_types() {
        let files = generate(
            r#"
            system S {
                contract Gate {
                    state {
                        authorized: mapping(address => bool) public
                        owners: mapping(uint256 => address) internal
                        tags: bytes32[] private
                    }
                }
            }
            "#,
        );
        let src = &files["Gate.sol"];
        assert!(src.contains("    mapping(address => bool) public authorized;\n"));
        assert!(src.contains("    mapping(uint256 => address) internal owners;\n"));
        assert!(src.contains("    bytes32[] private tags;\n"));
    }

    #[test]
    fn full_contract_matches_expected_layout() {
        let files = generate(
            r#"
            system S {
                contract Exchange is Ownable {
                    state { filled: mapping(bytes32 => uint256) internal }
                    events { Fill(maker: address, amount: uint256) }
                    modifiers { nonReentrant; }
                    functions {
                        fillOrder(id: bytes32) public payable uses (nonReentrant)
                        filledOf(id: bytes32) external view returns (uint256)
                    }
                }
                contract Ownable { }
            }
            "#,
        );
        let expected = r#"pragma solidity 0.5.16;

import "./Ownable.sol";

contract Exchange is Ownable {
    mapping(bytes32 => uint256) internal filled;

    event Fill(address maker, uint256 amount);

    modifier nonReentrant() {
        require(false, "TODO");
        _;
    }

    function fillOrder(bytes32 id) public payable nonReentrant {
        revert("not implemented");
    }

    function filledOf(bytes32 id) external view returns (uint256) {
    }
}
"#;
        assert_eq!(files["Exchange.sol"], expected);
    }

    #[test]
    fn structs_and_enums_land_in_a_shared_container() {
        let files = generate(
            r#"
            system S {
                contract Book {
                    state { orders: mapping(bytes32 => Order) internal }
                    functions { phase() public view returns (Phase) }
                }
                struct Order { maker: address amount: uint256 }
                enum Phase { Open, Closed }
            }
            "#,
        );
        let defs = &files["Defs.sol"];
        assert!(defs.contains("contract Defs {\n"));
        assert!(defs.contains("    struct Order {\n        address maker;\n        uint256 amount;\n    }"));
        assert!(defs.contains("    enum Phase { Open, Closed }"));

        let book = &files["Book.sol"];
        assert!(book.contains("import \"./Defs.sol\";\n"));
        assert!(book.contains("mapping(bytes32 => Defs.Order) internal orders;"));
        assert!(book.contains("returns (Defs.Phase)"));
    }

    #[test]
    fn struct_parameters_get_locations_and_the_encoder_pragma() {
        let files = generate(
            r#"
            system S {
                contract Taker {
                    functions {
                        fill(order: Order) public
                        quote(order: Order) external view returns (uint256)
                        keep(order: Order) internal
                    }
                }
                struct Order { maker: address }
            }
            "#,
        );
        let src = &files["Taker.sol"];
        assert!(src.contains("pragma experimental ABIEncoderV2;\n"));
        assert!(src.contains("function fill(Defs.Order memory order) public"));
        assert!(src.contains("function quote(Defs.Order calldata order) external view"));
        assert!(src.contains("function keep(Defs.Order memory order) internal"));
    }

    #[test]
    fn internal_only_struct_use_skips_the_encoder_pragma() {
        let files = generate(
            r#"
            system S {
                contract Keeper {
                    state { last: Order internal }
                    functions { keep(order: Order) internal }
                }
                struct Order { maker: address }
            }
            "#,
        );
        assert!(!files["Keeper.sol"].contains("ABIEncoderV2"));
    }

    #[test]
    fn interface_functions_are_external_and_bodyless() {
        let files = generate(
            "system S { interface IToken { transfer(to: address, amount: uint256) balanceOf(who: address) view returns (uint256) } }",
        );
        let src = &files["IToken.sol"];
        assert!(src.contains("    function transfer(address to, uint256 amount) external;\n"));
        assert!(src.contains("    function balanceOf(address who) external view returns (uint256);\n"));
        let unit = parse_solidity(src, "IToken.sol").expect("generated interface parses");
        let def = unit.contract("IToken").unwrap();
        assert!(def.functions.iter().all(|f| f.body.is_none()));
    }

    #[test]
    fn library_keyword_for_library_stereotype() {
        let files = generate(
            "system S { library Math { clamp(x: uint256) internal pure returns (uint256) } }",
        );
        assert!(files["Math.sol"].contains("library Math {\n"));
    }

    #[test]
    fn contract_typed_state_var_imports_the_contract() {
        let files = generate(
            r#"
            system S {
                contract Vault { state { token: IToken internal } }
                interface IToken { transfer(to: address, amount: uint256) }
            }
            "#,
        );
        let src = &files["Vault.sol"];
        assert!(src.contains("import \"./IToken.sol\";\n"));
        assert!(src.contains("    IToken internal token;\n"));
    }

    #[test]
    fn single_file_mode_bundles_everything() {
        let m = model(
            r#"
            system Market {
                contract Shop { state { orders: Order[] internal } }
                contract Till { }
                struct Order { maker: address }
            }
            "#,
        );
        let config = ScaffoldConfig {
            one_file_per_contract: false,
            ..ScaffoldConfig::default()
        };
        let files = generate_solidity(&m, &config);
        assert_eq!(files.len(), 1);
        let src = &files["Market.sol"];
        assert!(!src.contains("import"));
        let defs_at = src.find("contract Defs {").unwrap();
        let shop_at = src.find("contract Shop {").unwrap();
        assert!(defs_at < shop_at);
        assert!(src.contains("contract Till {\n}"));
        let unit = parse_solidity(src, "Market.sol").expect("bundle parses");
        assert_eq!(unit.contracts.len(), 3);
    }

    /// Re-parsing every generated file reconstructs each contract's member
    /// name sets and, per state variable, the same collection kind the
    /// model declared.
    #[test]
    fn generated_sources_round_trip_through_the_solidity_parser() {
        let m = model(
            r#"
            system Dex {
                contract Exchange is Ownable {
                    state {
                        filled: mapping(bytes32 => uint256) internal
                        authorized: mapping(address => bool) public
                        makers: mapping(uint256 => address) internal
                        history: bytes32[] private
                        count: uint256 internal
                    }
                    events { Fill(maker: address) Cancel(maker: address) }
                    modifiers { onlyOwner; nonReentrant; }
                    functions {
                        fillOrder(id: bytes32) public payable uses (nonReentrant)
                        cancelOrder(id: bytes32) public
                        filledOf(id: bytes32) external view returns (uint256)
                    }
                }
                contract Ownable {
                    state { owner: address internal }
                    modifiers { onlyOwner; }
                }
            }
            "#,
        );
        let files = generate_solidity(&m, &ScaffoldConfig::default());
        for c in m.contracts() {
            let src = &files[&format!("{}.sol", c.name)];
            let unit = parse_solidity(src, "gen.sol").expect("generated file parses");
            let def = unit.contract(&c.name).expect("contract present");

            let names = |it: &mut dyn Iterator<Item = String>| it.collect::<BTreeSet<_>>();
            assert_eq!(
                names(&mut def.state_vars.iter().map(|v| v.name.clone())),
                names(&mut c.state_vars.iter().map(|v| v.name.clone())),
            );
            assert_eq!(
                names(&mut def.functions.iter().map(|f| f.name.clone())),
                names(&mut c.functions.iter().map(|f| f.name.clone())),
            );
            assert_eq!(
                names(&mut def.events.iter().map(|e| e.name.clone())),
                names(&mut c.events.iter().map(|e| e.name.clone())),
            );
            assert_eq!(
                names(&mut def.modifiers.iter().map(|m| m.name.clone())),
                names(&mut c.modifiers.iter().map(|m| m.name.clone())),
            );
            for v in &c.state_vars {
                let parsed = def.state_vars.iter().find(|p| p.name == v.name).unwrap();
                assert_eq!(parsed.ty.collection(), v.collection(), "var {}", v.name);
            }
        }
    }

    /// Lint on the generated files reports nothing at error severity.
    #[test]
    fn scaffolds_pass_their_own_lint() {
        let m = model(
            r#"
            system Dex {
                contract Exchange is Ownable {
                    state { filled: mapping(bytes32 => uint256) internal }
                    events { Fill(maker: address) }
                    modifiers { nonReentrant; }
                    functions {
                        fillOrder(id: bytes32, amount: uint256) public payable uses (nonReentrant)
                        sweep() public
                    }
                }
                contract Ownable {
                    state { owner: address internal }
                    modifiers { onlyOwner; }
                }
                struct Order { maker: address }
            }
            "#,
        );
        let files = generate_solidity(&m, &ScaffoldConfig::default());
        for (path, src) in &files {
            let unit = parse_solidity(src, path).expect("generated file parses");
            let errors: Vec<_> = lint(&unit, &LintConfig::default())
                .into_iter()
                .filter(|d| d.severity == Severity::Error)
                .collect();
            assert!(errors.is_empty(), "{path}: {errors:?}");
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let src = r#"
            system Dex {
                contract Exchange {
                    state { filled: mapping(bytes32 => uint256) internal }
                    functions { fillOrder(id: bytes32) public }
                }
                struct Order { maker: address }
            }
        "#;
        let a = generate(src);
        let b = generate(src);
        assert_eq!(a, b);
    }

    #[test]
    fn container_name_steps_aside_for_user_types() {
        let files = generate(
            r#"
            system S {
                contract Defs { state { o: Order internal } }
                struct Order { maker: address }
            }
            "#,
        );
        assert!(files.contains_key("Defs_.sol"));
        assert!(files["Defs.sol"].contains("Defs_.Order internal o;"));
        assert!(files["Defs.sol"].contains("import \"./Defs_.sol\";"));
    }
}
