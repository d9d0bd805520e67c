//! Witness constructors for the world-extension, forth and back conditions.
//!
//! Each constructor computes the prescribed value and then checks it
//! against the definition; a failed check is returned as a
//! [`ConstructionFault`] carrying the offending candidate.

use std::fmt;

use serde::Serialize;

use super::relation::{pull_back, z_check, ZPair, ZPoint};
use crate::mutation::Mutation;
use crate::semantics::SymbolicModel;
use crate::upset::{companion, n0_set, three_n_or_three_n_plus_two, UpSet};
use crate::worlds::{three_n_plus_two, World};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Candidate {
    Element(u64),
    World(World),
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstructionFault {
    pub step: &'static str,
    pub kind: String,
    pub candidate: Candidate,
    pub detail: String,
}

impl ConstructionFault {
    fn new(step: &'static str, kind: impl Into<String>, candidate: Candidate, detail: impl Into<String>) -> Self {
        ConstructionFault { step, kind: kind.into(), candidate, detail: detail.into() }
    }

    /// Stable label used to group faults in reports.
    pub fn category(&self) -> String {
        format!("{}/{}", self.step, self.kind)
    }
}

impl fmt::Display for ConstructionFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.category(), self.detail)?;
        match &self.candidate {
            Candidate::Element(n) => write!(f, " (candidate {n})"),
            Candidate::World(w) => write!(f, " (candidate {w})"),
            Candidate::None => Ok(()),
        }
    }
}

fn three_n() -> UpSet {
    UpSet::from_residue(0, 3).expect("nonzero modulus")
}

fn precondition(step: &'static str, p: &ZPair, mutation: Option<Mutation>) -> Result<(), ConstructionFault> {
    z_check(p, mutation)
        .map_err(|v| ConstructionFault::new(step, "precondition", Candidate::None, format!("{v} for {p:?}")))
}

/// The world `w` of the world-extension condition for `p` and `v ⊒ u`.
pub fn succ_witness(p: &ZPair, v: &World) -> Result<World, ConstructionFault> {
    succ_witness_with(p, v, None)
}

pub fn succ_witness_with(p: &ZPair, v: &World, mutation: Option<Mutation>) -> Result<World, ConstructionFault> {
    const STEP: &str = "succ_witness";
    precondition(STEP, p, mutation)?;
    let (t, u) = (&p.left().world, &p.right().world);
    if !u.leq(v) || !SymbolicModel::new(p.right().side).contains(v) {
        return Err(ConstructionFault::new(STEP, "precondition", Candidate::World(v.clone()), "not a successor of the right world"));
    }
    let (d, e) = (&p.left().tuple, &p.right().tuple);
    let dset = UpSet::from_finite(d.iter().copied());
    let pre = |x: &UpSet| pull_back(d, e, x);
    let j = t.a().difference(&dset).union(&pre(v.a())).closure();
    let (k_base, l_base) = if t.b().is_empty() {
        (three_n_plus_two().cl_minus(), three_n_plus_two().clone())
    } else {
        (t.b().clone(), t.c().clone())
    };
    let k_raw = k_base.difference(&dset).union(&pre(v.b()));
    let k = if mutation == Some(Mutation::KWithoutJ) { k_raw } else { k_raw.difference(&j) };
    let l = l_base.difference(&dset).union(&pre(v.c())).difference(&j);
    let w = World::new(j, k, l)
        .map_err(|err| ConstructionFault::new(STEP, "claim1/quasi-partition", Candidate::None, err.to_string()))?;
    if !w.in_u() {
        return Err(ConstructionFault::new(STEP, "claim1/in-u", Candidate::World(w), "result is not in U"));
    }
    if !t.leq(&w) {
        return Err(ConstructionFault::new(STEP, "claim2/order", Candidate::World(w), "left world is not below the result"));
    }
    let v_point = ZPoint::new(p.right().side, v.clone(), e.clone());
    let w_point = ZPoint::new(p.left().side, w.clone(), d.clone());
    for (orientation, left, right) in [("claim3", &v_point, &w_point), ("converse", &w_point, &v_point)] {
        let pair = ZPair::new(left.clone(), right.clone())
            .map_err(|err| ConstructionFault::new(STEP, format!("{orientation}/typing"), Candidate::World(w.clone()), err.to_string()))?;
        if let Err(viol) = z_check(&pair, mutation) {
            return Err(ConstructionFault::new(
                STEP,
                format!("{orientation}/{}", viol.condition.label()),
                Candidate::World(w.clone()),
                viol.to_string(),
            ));
        }
    }
    Ok(w)
}

fn least_outside(set: &UpSet, avoid: &UpSet) -> Option<u64> {
    set.difference(avoid).least()
}

/// The subcase label and prescribed element for the forth condition,
/// before any check.
pub fn forth_candidate(p: &ZPair, f: u64) -> (&'static str, Option<u64>) {
    let (d, e) = (&p.left().tuple, &p.right().tuple);
    if let Some(l) = d.iter().position(|&x| x == f) {
        return ("case2", Some(e[l]));
    }
    if let Some(l) = d.iter().position(|&x| companion(x) == f) {
        return ("case3", Some(companion(e[l])));
    }
    let cl_e = UpSet::from_finite(e.iter().copied()).closure();
    if n0_set().member(f) {
        ("case1.1", least_outside(&n0_set(), &cl_e))
    } else if three_n_or_three_n_plus_two().member(f) {
        ("case1.2", least_outside(&three_n(), &cl_e))
    } else {
        ("case1.3", least_outside(&three_n().cl_minus(), &cl_e))
    }
}

/// The subcase label and prescribed element for the back condition.
pub fn back_candidate(p: &ZPair, g: u64) -> (&'static str, Option<u64>) {
    let (d, e) = (&p.left().tuple, &p.right().tuple);
    if let Some(l) = e.iter().position(|&x| x == g) {
        return ("case2", Some(d[l]));
    }
    if let Some(l) = e.iter().position(|&x| companion(x) == g) {
        return ("case3", Some(companion(d[l])));
    }
    let cl_d = UpSet::from_finite(d.iter().copied()).closure();
    let i_s = p.left().world.c().intersection(three_n_plus_two());
    if n0_set().member(g) {
        ("case1.1", least_outside(&n0_set(), &cl_d))
    } else if three_n_or_three_n_plus_two().member(g) {
        ("case1.2", least_outside(&i_s, &cl_d))
    } else {
        ("case1.3", least_outside(&i_s.cl_minus(), &cl_d))
    }
}

fn checked(
    step: &'static str,
    p: &ZPair,
    (case, value): (&'static str, Option<u64>),
    extend: impl Fn(u64) -> ZPair,
    mutation: Option<Mutation>,
) -> Result<u64, ConstructionFault> {
    precondition(step, p, mutation)?;
    let Some(x) = value else {
        return Err(ConstructionFault::new(step, format!("{case}/empty"), Candidate::None, "prescribed choice set is empty"));
    };
    match z_check(&extend(x), mutation) {
        Ok(()) => Ok(x),
        Err(v) => Err(ConstructionFault::new(step, format!("{case}/{}", v.condition.label()), Candidate::Element(x), v.to_string())),
    }
}

/// `g` with the pair extended by `(f, g)` still in the relation.
pub fn forth_element(p: &ZPair, f: u64) -> Result<u64, ConstructionFault> {
    forth_element_with(p, f, None)
}

pub fn forth_element_with(p: &ZPair, f: u64, mutation: Option<Mutation>) -> Result<u64, ConstructionFault> {
    checked("forth", p, forth_candidate(p, f), |g| p.extended(f, g), mutation)
}

/// `f` with the pair extended by `(f, g)` still in the relation.
pub fn back_element(p: &ZPair, g: u64) -> Result<u64, ConstructionFault> {
    back_element_with(p, g, None)
}

pub fn back_element_with(p: &ZPair, g: u64, mutation: Option<Mutation>) -> Result<u64, ConstructionFault> {
    checked("back", p, back_candidate(p, g), |f| p.extended(f, g), mutation)
}

/// Whether any `f` below `bound` extends the pair together with `g`.
pub fn back_exists_below(p: &ZPair, g: u64, bound: u64) -> Option<u64> {
    (0..bound).find(|&f| z_check(&p.extended(f, g), None).is_ok())
}
