//! Points, pairs, and membership in the relation `Z` between the two
//! infinite models.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::mutation::Mutation;
use crate::semantics::{Side, SymbolicModel};
use crate::text::{Cursor, SyntaxError};
use crate::upset::{companion, UpSet};
use crate::worlds::{parse_world_from, World, WorldError};

#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ZPoint {
    pub side: Side,
    pub world: World,
    pub tuple: Vec<u64>,
}

impl ZPoint {
    pub fn new(side: Side, world: World, tuple: Vec<u64>) -> Self {
        ZPoint { side, world, tuple }
    }

    pub fn extended(&self, x: u64) -> ZPoint {
        let mut tuple = self.tuple.clone();
        tuple.push(x);
        ZPoint { tuple, ..self.clone() }
    }
}

impl fmt::Debug for ZPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {:?}, {:?})", self.side.name(), self.world, self.tuple)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZPairError {
    #[error("both points lie in {0}")]
    SameSide(&'static str),
    #[error("tuple lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("{0} point's world is not a state of its model")]
    NotAState(&'static str),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

/// An oriented pair `⟨left⟩ Z ⟨right⟩` candidate.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ZPair {
    left: ZPoint,
    right: ZPoint,
}

impl ZPair {
    pub fn new(left: ZPoint, right: ZPoint) -> Result<Self, ZPairError> {
        if left.side == right.side {
            return Err(ZPairError::SameSide(left.side.name()));
        }
        if left.tuple.len() != right.tuple.len() {
            return Err(ZPairError::LengthMismatch(left.tuple.len(), right.tuple.len()));
        }
        if !SymbolicModel::new(left.side).contains(&left.world) {
            return Err(ZPairError::NotAState("left"));
        }
        if !SymbolicModel::new(right.side).contains(&right.world) {
            return Err(ZPairError::NotAState("right"));
        }
        Ok(ZPair { left, right })
    }

    pub fn left(&self) -> &ZPoint {
        &self.left
    }

    pub fn right(&self) -> &ZPoint {
        &self.right
    }

    pub fn len(&self) -> usize {
        self.left.tuple.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.tuple.is_empty()
    }

    pub fn swapped(&self) -> ZPair {
        ZPair { left: self.right.clone(), right: self.left.clone() }
    }

    /// Both tuples extended by one element; worlds unchanged.
    pub fn extended(&self, f: u64, g: u64) -> ZPair {
        ZPair { left: self.left.extended(f), right: self.right.extended(g) }
    }
}

impl fmt::Debug for ZPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} / {:?}", self.left, self.right)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Condition {
    Bijection,
    Residue,
    SelfCompanion,
    Companions,
    FirstComponent,
    SecondComponent,
}

impl Condition {
    pub fn label(self) -> &'static str {
        match self {
            Condition::Bijection => "2(a)",
            Condition::Residue => "2(b)",
            Condition::SelfCompanion => "2(c)",
            Condition::Companions => "2(d)",
            Condition::FirstComponent => "2(e)",
            Condition::SecondComponent => "2(f)",
        }
    }
}

/// The first failing condition, with the offending indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZViolation {
    pub condition: Condition,
    pub l: usize,
    pub m: Option<usize>,
}

impl fmt::Display for ZViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.m {
            Some(m) => write!(f, "condition {} fails at indices {}, {}", self.condition.label(), self.l, m),
            None => write!(f, "condition {} fails at index {}", self.condition.label(), self.l),
        }
    }
}

fn in_s(n: u64) -> bool {
    n % 3 != 1
}

fn in_n0(n: u64) -> bool {
    companion(n) == n
}

/// Checks conditions 2(a)–(f). World membership is part of [`ZPair::new`].
pub fn z_check(p: &ZPair, mutation: Option<Mutation>) -> Result<(), ZViolation> {
    let (d, e) = (&p.left.tuple, &p.right.tuple);
    let (t, u) = (&p.left.world, &p.right.world);
    let k = d.len();
    let fail = |condition, l, m| Err(ZViolation { condition, l, m });
    for l in 0..k {
        for m in 0..k {
            if (d[l] == d[m]) != (e[l] == e[m]) {
                return fail(Condition::Bijection, l, Some(m));
            }
        }
    }
    for l in 0..k {
        if in_s(d[l]) != in_s(e[l]) {
            return fail(Condition::Residue, l, None);
        }
        if in_n0(d[l]) != in_n0(e[l]) {
            return fail(Condition::SelfCompanion, l, None);
        }
    }
    if mutation != Some(Mutation::DropCondition2d) {
        for l in 0..k {
            for m in 0..k {
                if (d[l] == companion(d[m])) != (e[l] == companion(e[m])) {
                    return fail(Condition::Companions, l, Some(m));
                }
            }
        }
    }
    for l in 0..k {
        if t.a().member(d[l]) && !u.a().member(e[l]) {
            return fail(Condition::FirstComponent, l, None);
        }
        if t.b().member(d[l]) && !(u.a().member(e[l]) || u.b().member(e[l])) {
            return fail(Condition::SecondComponent, l, None);
        }
    }
    Ok(())
}

pub fn z_member(p: &ZPair) -> bool {
    z_check(p, None).is_ok()
}

pub fn z_member_with(p: &ZPair, mutation: Option<Mutation>) -> bool {
    z_check(p, mutation).is_ok()
}

/// An atom true at the left point whose image is false at the right point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AtomFailure {
    pub atom: &'static str,
    pub index: usize,
}

/// Every atom `P`, `Q`, `R` true of `dₗ` at the left world is true of `eₗ` at
/// the right world.
pub fn atomic_check(p: &ZPair) -> Result<(), AtomFailure> {
    let left = SymbolicModel::new(p.left.side).atom_extensions(&p.left.world).expect("checked at construction");
    let right = SymbolicModel::new(p.right.side).atom_extensions(&p.right.world).expect("checked at construction");
    for (l, (&d, &e)) in p.left.tuple.iter().zip(&p.right.tuple).enumerate() {
        for (name, x, y) in [("P", &left.p, &right.p), ("Q", &left.q, &right.q), ("R", &left.r, &right.r)] {
            if x.member(d) && !y.member(e) {
                return Err(AtomFailure { atom: name, index: l });
            }
        }
    }
    Ok(())
}

pub fn atomic_preservation(p: &ZPair) -> bool {
    atomic_check(p).is_ok()
}

/// The biconditionals that follow from conditions 2(b), 2(c): membership in
/// `Cl(3ℕ ∪ 3ℕ+2)` and in `Cl⁻(3ℕ ∪ 3ℕ+2)` agree at every index.
pub fn derived_biconditionals(p: &ZPair) -> bool {
    let s = crate::upset::three_n_or_three_n_plus_two();
    let (cl, clm) = (s.closure(), s.cl_minus());
    p.left.tuple.iter().zip(&p.right.tuple).all(|(&d, &e)| cl.member(d) == cl.member(e) && clm.member(d) == clm.member(e))
}

/// When both orientations are members: `dₗ ∈ A ⟺ eₗ ∈ D` and
/// `dₗ ∈ B ⟺ eₗ ∈ E`.
pub fn symmetric_components(p: &ZPair) -> bool {
    let (t, u) = (&p.left.world, &p.right.world);
    p.left.tuple.iter().zip(&p.right.tuple).all(|(&d, &e)| {
        t.a().member(d) == u.a().member(e) && t.b().member(d) == u.b().member(e)
    })
}

/// `{dₗ | eₗ ∈ x}`.
pub(crate) fn pull_back(d: &[u64], e: &[u64], x: &UpSet) -> UpSet {
    UpSet::from_finite(d.iter().zip(e).filter(|(_, &el)| x.member(el)).map(|(&dl, _)| dl))
}

/// `zpair { left = (m1, <world-spec>, [d...]); right = (m2, <world-spec>, [e...]) }`.
pub fn parse_zpair(src: &str) -> Result<ZPair, ZPairError> {
    let mut cur = Cursor::new(src)?;
    cur.expect_ident("zpair")?;
    cur.expect_punct("{")?;
    cur.expect_ident("left")?;
    cur.expect_punct("=")?;
    let left = parse_point(&mut cur)?;
    cur.expect_punct(";")?;
    cur.expect_ident("right")?;
    cur.expect_punct("=")?;
    let right = parse_point(&mut cur)?;
    cur.eat_punct(";");
    cur.expect_punct("}")?;
    cur.expect_end()?;
    ZPair::new(left, right)
}

fn parse_point(cur: &mut Cursor) -> Result<ZPoint, ZPairError> {
    cur.expect_punct("(")?;
    let side = if cur.eat_ident("m1") {
        Side::M1
    } else if cur.eat_ident("m2") {
        Side::M2
    } else {
        return Err(cur.error("expected `m1` or `m2`").into());
    };
    cur.expect_punct(",")?;
    let world = parse_world_from(cur)?;
    cur.expect_punct(",")?;
    cur.expect_punct("[")?;
    let mut tuple = Vec::new();
    while !cur.eat_punct("]") {
        tuple.push(cur.number()?);
        if !cur.eat_punct(",") {
            cur.expect_punct("]")?;
            break;
        }
    }
    cur.expect_punct(")")?;
    Ok(ZPoint::new(side, world, tuple))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worlds::{base_u, base_v};

    pub(crate) fn pair(lw: &World, d: &[u64], rw: &World, e: &[u64]) -> ZPair {
        let ls = if lw.in_u() { Side::M1 } else { Side::M2 };
        ZPair::new(ZPoint::new(ls, lw.clone(), d.to_vec()), ZPoint::new(ls.other(), rw.clone(), e.to_vec())).unwrap()
    }

    #[test]
    fn base_pair_with_empty_tuples() {
        assert!(z_member(&pair(base_v(), &[], base_u(), &[])));
    }

    #[test]
    fn companion_matched_pair() {
        let p = pair(base_v(), &[0, 1], base_u(), &[3, 10]);
        assert!(z_member(&p));
        assert!(atomic_preservation(&p));
    }

    #[test]
    fn companion_mismatch_fails_2d() {
        let p = pair(base_v(), &[0, 1], base_u(), &[3, 4]);
        let v = z_check(&p, None).unwrap_err();
        // 4 is a self-companion while 1 is not, so 2(c) is reached first
        assert_eq!(v.condition, Condition::SelfCompanion);
        let p = pair(base_v(), &[0, 1], base_u(), &[3, 19]);
        assert_eq!(z_check(&p, None).unwrap_err().condition, Condition::Companions);
        assert!(z_member_with(&p, Some(Mutation::DropCondition2d)));
    }

    #[test]
    fn typing_is_enforced() {
        let v = ZPoint::new(Side::M1, base_v().clone(), vec![]);
        assert_eq!(ZPair::new(v.clone(), v.clone()), Err(ZPairError::SameSide("m1")));
        let u = ZPoint::new(Side::M1, base_u().clone(), vec![]);
        assert_eq!(ZPair::new(u, ZPoint::new(Side::M2, base_v().clone(), vec![])), Err(ZPairError::NotAState("left")));
        let short = ZPoint::new(Side::M2, base_u().clone(), vec![1]);
        assert_eq!(ZPair::new(v, short), Err(ZPairError::LengthMismatch(0, 1)));
    }

    #[test]
    fn fixture_format() {
        let p = parse_zpair("zpair { left = (m1, v, [0, 1]); right = (m2, u, [3, 10]) }").unwrap();
        assert_eq!(p, pair(base_v(), &[0, 1], base_u(), &[3, 10]));
        let q = parse_zpair("zpair { left = (m2, uworld { c = res(2 mod 3) }, []); right = (m1, v, []) }").unwrap();
        assert_eq!(q.left().world, *base_v());
        assert!(parse_zpair("zpair { left = (m1, v, [0]); right = (m2, u, []) }").is_err());
    }
}
