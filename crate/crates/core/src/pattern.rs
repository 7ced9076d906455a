//! Security pattern tags that can be attached to contracts in the model and
//! that rules reference in their catalog entries.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// The fifteen security design patterns recognised by the toolchain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PatternId {
    /// Checks-effects-interactions ordering inside functions.
    Cei,
    /// Emergency stop: an owner can halt sensitive operations.
    Es,
    /// Speed bump: delay sensitive operations so users can react.
    Sb,
    /// Rate limit on value-moving operations per time window.
    Rl,
    /// Mutex guarding against nested (re-entrant) calls.
    Mu,
    /// Balance limit: cap the ether a contract will hold.
    Bl,
    /// Gas-cost-aware control flow (avoid unbounded work per call).
    Gc,
    /// Withdrawal (pull-payment) instead of pushing ether out.
    Wf,
    /// Access restriction via authorization checks.
    Au,
    /// Off-chain data fed through an oracle.
    Or,
    /// Randomness sourced so miners cannot bias it.
    Rn,
    /// Tolerance to timestamp manipulation.
    Tc,
    /// Explicit handling of transaction-ordering dependence.
    Te,
    /// Math guards against overflow and rounding issues.
    Mh,
    /// Proxy delegate for upgradeable deployments.
    Pd,
}

pub const ALL_PATTERNS: [PatternId; 15] = [
    PatternId::Cei,
    PatternId::Es,
    PatternId::Sb,
    PatternId::Rl,
    PatternId::Mu,
    PatternId::Bl,
    PatternId::Gc,
    PatternId::Wf,
    PatternId::Au,
    PatternId::Or,
    PatternId::Rn,
    PatternId::Tc,
    PatternId::Te,
    PatternId::Mh,
    PatternId::Pd,
];

impl PatternId {
    pub fn as_str(self) -> &'static str {
        match self {
            PatternId::Cei => "CEI",
            PatternId::Es => "ES",
            PatternId::Sb => "SB",
            PatternId::Rl => "RL",
            PatternId::Mu => "MU",
            PatternId::Bl => "BL",
            PatternId::Gc => "GC",
            PatternId::Wf => "WF",
            PatternId::Au => "AU",
            PatternId::Or => "OR",
            PatternId::Rn => "RN",
            PatternId::Tc => "TC",
            PatternId::Te => "TE",
            PatternId::Mh => "MH",
            PatternId::Pd => "PD",
        }
    }
}

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PatternId {
    type Err = UnknownPattern;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL_PATTERNS
            .iter()
            .copied()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| UnknownPattern(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownPattern(pub String);

impl fmt::Display for UnknownPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown pattern tag `{}`", self.0)
    }
}

impl std::error::Error for UnknownPattern {}
