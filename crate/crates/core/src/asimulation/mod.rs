//! The relation `Z` between the two infinite models, its witness
//! constructors, and a brute-force asimulation checker on finite models.

mod finite;
mod relation;
mod sample;
mod witness;

pub use finite::*;
pub use relation::{
    atomic_check, atomic_preservation, derived_biconditionals, parse_zpair, symmetric_components, z_check, z_member,
    z_member_with, AtomFailure, Condition, ZPair, ZPairError, ZPoint, ZViolation,
};
pub use sample::{probe_elements, random_zpair};
pub use witness::{
    back_candidate, back_element, back_element_with, back_exists_below, forth_candidate, forth_element,
    forth_element_with, succ_witness, succ_witness_with, Candidate, ConstructionFault,
};
