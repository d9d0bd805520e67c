//! Deliberate faults used to check that the suites notice them.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::upset::{AffineRule, NatMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Mutation {
    /// The companion map sends `9q + 7` to `3q + 1` instead of `3q + 2`.
    CompanionResidue,
    /// The second component of a successor witness keeps elements of the
    /// first.
    KWithoutJ,
    /// Membership in the relation ignores companion matching.
    DropCondition2d,
}

impl Mutation {
    pub const ALL: [Mutation; 3] = [Mutation::CompanionResidue, Mutation::KWithoutJ, Mutation::DropCondition2d];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::CompanionResidue => "companion-residue",
            Mutation::KWithoutJ => "k-without-j",
            Mutation::DropCondition2d => "drop-condition-2d",
        }
    }

    /// The companion map as seen under this mutation.
    pub fn companion_map(this: Option<Mutation>) -> NatMap {
        if this != Some(Mutation::CompanionResidue) {
            return NatMap::companion();
        }
        NatMap::new(vec![
            AffineRule::new(0, 3, 9, 1),
            AffineRule::new(2, 3, 9, 7),
            AffineRule::new(1, 9, 3, 0),
            AffineRule::new(4, 9, 9, 4),
            AffineRule::new(7, 9, 3, 1),
        ])
        .expect("rules partition ℕ")
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mutation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Mutation::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| format!("unknown mutant `{s}`"))
    }
}
