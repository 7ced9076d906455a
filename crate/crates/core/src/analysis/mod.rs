//! The three analysis passes: design checks over models, coding lints and
//! gas findings over Solidity sources.

pub mod design;
pub mod gas;
pub mod lint;
pub mod packing;

pub use design::check_design;
pub use gas::analyze_gas;
pub use lint::lint;
pub use packing::{suggest_packing, PackingSuggestion};
