//! Quasi-partition worlds, the base points `𝐯` and `𝐮`, the state set `U`,
//! the ordering `⊴`, and the basic facts about them.

use std::fmt;
use std::sync::OnceLock;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::text::{Cursor, SyntaxError};
use crate::upset::{n0_set, parse_upset, UpSet, UpSetSyntaxError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorldError {
    #[error("components {0} and {1} overlap (e.g. at {2})")]
    Overlap(&'static str, &'static str, u64),
    #[error("components do not cover ℕ (e.g. {0} is missing)")]
    NotCovering(u64),
    #[error("component {0} must be infinite")]
    Finite(&'static str),
    #[error("second component must be empty or infinite")]
    FiniteNonEmptyMiddle,
    #[error("third component must be an infinite subset of 3ℕ+2")]
    BadThird,
    #[error("world is not a state of W₂")]
    NotInW2,
    #[error("no world property with id {0} (expected 9..=15)")]
    UnknownProperty(u8),
    #[error(transparent)]
    Syntax(#[from] UpSetSyntaxError),
}

impl From<SyntaxError> for WorldError {
    fn from(e: SyntaxError) -> Self {
        WorldError::Syntax(e.into())
    }
}

/// A quasi-partition `(a, b, c)` of ℕ.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct World {
    a: UpSet,
    b: UpSet,
    c: UpSet,
}

impl World {
    /// Checks the quasi-partition constraints: pairwise disjoint, covering ℕ,
    /// first and third infinite, second empty or infinite.
    pub fn new(a: UpSet, b: UpSet, c: UpSet) -> Result<Self, WorldError> {
        for (x, y, nx, ny) in [(&a, &b, "a", "b"), (&a, &c, "a", "c"), (&b, &c, "b", "c")] {
            if let Some(n) = x.intersection(y).least() {
                return Err(WorldError::Overlap(nx, ny, n));
            }
        }
        if let Some(n) = a.union(&b).union(&c).complement().least() {
            return Err(WorldError::NotCovering(n));
        }
        if a.is_finite() {
            return Err(WorldError::Finite("a"));
        }
        if c.is_finite() {
            return Err(WorldError::Finite("c"));
        }
        if b.is_finite() && !b.is_empty() {
            return Err(WorldError::FiniteNonEmptyMiddle);
        }
        Ok(World { a, b, c })
    }

    pub fn a(&self) -> &UpSet {
        &self.a
    }

    pub fn b(&self) -> &UpSet {
        &self.b
    }

    pub fn c(&self) -> &UpSet {
        &self.c
    }

    /// The ordering `⊴`: first component grows, third shrinks.
    pub fn leq(&self, other: &World) -> bool {
        self.a.is_subset(&other.a) && other.c.is_subset(&self.c)
    }

    pub fn in_u(&self) -> bool {
        let v = base_v();
        v.leq(self) && self.a.is_closed() && self.b.is_subset(v.b())
    }

    pub fn in_w1(&self) -> bool {
        self.in_u()
    }

    pub fn in_w2(&self) -> bool {
        self == base_u() || self.in_u()
    }

    pub fn is_base_u(&self) -> bool {
        self == base_u()
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "world {{ a = {}; b = {}; c = {} }}", self.a, self.b, self.c)
    }
}

impl fmt::Debug for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self == base_v() {
            return write!(f, "𝐯");
        }
        if self == base_u() {
            return write!(f, "𝐮");
        }
        f.debug_struct("World").field("a", &self.a).field("b", &self.b).field("c", &self.c).finish()
    }
}

fn res(r: u64, m: u64) -> UpSet {
    UpSet::from_residue(r, m).expect("residue below modulus")
}

/// `3ℕ + 2`.
pub fn three_n_plus_two() -> &'static UpSet {
    static S: OnceLock<UpSet> = OnceLock::new();
    S.get_or_init(|| res(2, 3))
}

/// `𝐯 = (ℕ ∖ Cl(3ℕ+2), Cl⁻(3ℕ+2), 3ℕ+2)`.
pub fn base_v() -> &'static World {
    static V: OnceLock<World> = OnceLock::new();
    V.get_or_init(|| {
        let c = three_n_plus_two().clone();
        World::new(c.closure().complement(), c.cl_minus(), c).expect("𝐯 is a quasi-partition")
    })
}

/// `𝐮 = (𝐯₁, ∅, 𝐯₂ ∪ 𝐯₃)`.
pub fn base_u() -> &'static World {
    static U: OnceLock<World> = OnceLock::new();
    U.get_or_init(|| {
        let v = base_v();
        World::new(v.a().clone(), UpSet::empty(), v.b().union(v.c())).expect("𝐮 is a quasi-partition")
    })
}

/// The `U`-world with third component `c`: `(ℕ ∖ Cl(c), Cl⁻(c), c)`.
pub fn u_world_from_third(c: UpSet) -> Result<World, WorldError> {
    if c.is_finite() || !c.is_subset(three_n_plus_two()) {
        return Err(WorldError::BadThird);
    }
    World::new(c.closure().complement(), c.cl_minus(), c)
}

/// A random infinite proper subset of `3ℕ + 2` with infinite complement in it:
/// a union of some (not all) residues `≡ 2 (mod 3)` modulo `3k`, then up to
/// `size_budget` finite insertions and deletions.
pub fn random_third<R: Rng + ?Sized>(rng: &mut R, size_budget: usize) -> UpSet {
    let k = rng.gen_range(2..=6u64);
    let m = 3 * k;
    let full = (1u32 << k) - 1;
    let mask = rng.gen_range(1..full);
    let mut c = UpSet::empty();
    for i in 0..k {
        if mask & (1 << i) != 0 {
            c = c.union(&res(3 * i + 2, m));
        }
    }
    let bound = 3 * (20 + 4 * size_budget as u64);
    let edits = rng.gen_range(0..=size_budget);
    for _ in 0..edits {
        let n = 3 * rng.gen_range(0..bound / 3) + 2;
        c = if rng.gen_bool(0.5) { c.with(n) } else { c.without(n) };
    }
    c
}

/// Deterministic in `seed`; always in `U`.
pub fn random_u_world(seed: u64, size_budget: usize) -> World {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_u_world_with(&mut rng, size_budget)
}

pub fn random_u_world_with<R: Rng + ?Sized>(rng: &mut R, size_budget: usize) -> World {
    u_world_from_third(random_third(rng, size_budget)).expect("random third component is valid")
}

/// A random `⊴`-successor of a `W₂` state, itself a `W₂` state. Successors of
/// a `U`-world are `U`-worlds whose third component is a subset of its own;
/// every `U`-world is a successor of `𝐮`.
pub fn random_successor<R: Rng + ?Sized>(w: &World, rng: &mut R, size_budget: usize) -> World {
    if rng.gen_bool(0.1) {
        return w.clone();
    }
    if w.is_base_u() {
        return random_u_world_with(rng, size_budget);
    }
    let mut c = w.c().intersection(&random_third(rng, size_budget));
    if c.is_finite() {
        c = w.c().clone();
    }
    let drops = rng.gen_range(0..=size_budget.min(4));
    for _ in 0..drops {
        let i = rng.gen_range(0..8);
        if let Ok(n) = c.nth(i) {
            c = c.without(n);
        }
    }
    u_world_from_third(c).expect("subset of a valid third component")
}

pub const WORLD_PROPERTY_IDS: std::ops::RangeInclusive<u8> = 9..=15;

/// Evaluates world property `id` at `w ∈ W₂`. Items guarded by `w ∈ U`
/// evaluate the whole implication.
pub fn lemma2_check(id: u8, w: &World) -> Result<bool, WorldError> {
    if !WORLD_PROPERTY_IDS.contains(&id) {
        return Err(WorldError::UnknownProperty(id));
    }
    if !w.in_w2() {
        return Err(WorldError::NotInW2);
    }
    let (v, u) = (base_v(), base_u());
    let in_u = w.in_u();
    Ok(match id {
        9 => u.leq(v),
        10 => w.b().is_subset(v.b()),
        11 => {
            let lower = res(0, 3).closure().union(&n0_set());
            lower.is_subset(v.a()) && v.a() == u.a() && u.a().is_subset(w.a())
        }
        12 => !in_u || (w.c().is_infinite() && w.c().is_subset(three_n_plus_two())),
        13 => !in_u || res(1, 3).is_subset(&w.a().union(w.b())),
        14 => !in_u || *w.b() == w.c().cl_minus(),
        15 => !in_u || !w.b().is_disjoint(v.b()),
        _ => unreachable!(),
    })
}

/// `world { a = …; b = …; c = … }`, `uworld { c = … }`, `v` or `u`.
pub fn parse_world(src: &str) -> Result<World, WorldError> {
    let mut cur = Cursor::new(src)?;
    let w = parse_world_from(&mut cur)?;
    cur.expect_end()?;
    Ok(w)
}

pub(crate) fn parse_world_from(cur: &mut Cursor) -> Result<World, WorldError> {
    use crate::upset::syntax_expr;
    if cur.eat_ident("v") {
        return Ok(base_v().clone());
    }
    if cur.eat_ident("u") {
        return Ok(base_u().clone());
    }
    if cur.eat_ident("uworld") {
        cur.expect_punct("{")?;
        cur.expect_ident("c")?;
        cur.expect_punct("=")?;
        let c = syntax_expr(cur)?;
        cur.eat_punct(";");
        cur.expect_punct("}")?;
        return u_world_from_third(c);
    }
    if cur.eat_ident("world") {
        cur.expect_punct("{")?;
        let mut parts = Vec::new();
        for name in ["a", "b", "c"] {
            cur.expect_ident(name)?;
            cur.expect_punct("=")?;
            parts.push(syntax_expr(cur)?);
            if name != "c" {
                cur.expect_punct(";")?;
            }
        }
        cur.eat_punct(";");
        cur.expect_punct("}")?;
        let c = parts.pop().expect("three parts");
        let b = parts.pop().expect("three parts");
        let a = parts.pop().expect("three parts");
        return World::new(a, b, c);
    }
    Err(cur.error("expected `world`, `uworld`, `v` or `u`").into())
}

/// Convenience for tests and fixtures.
pub fn upset(src: &str) -> UpSet {
    parse_upset(src).unwrap_or_else(|e| panic!("bad set expression `{src}`: {e}"))
}
