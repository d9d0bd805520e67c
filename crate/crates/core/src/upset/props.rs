//! The eight basic facts about closures and companions as executable checks.
//!
//! Each property has a set-level form (exact, via set algebra) and a
//! pointwise form at a given `n` (via a supplied companion map, so a faulty
//! map can be plugged in and caught).

use thiserror::Error;

use super::{n0_set, three_n_or_three_n_plus_two, NatMap, UpSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("no closure property with id {0} (expected 1..=8)")]
pub struct UnknownProperty(pub u8);

pub const PROPERTY_IDS: std::ops::RangeInclusive<u8> = 1..=8;

/// Evaluates property `id` for the set `x` and the point `n`.
pub fn lemma1_check(id: u8, x: &UpSet, n: u64) -> Result<bool, UnknownProperty> {
    ClosureFacts::new(NatMap::companion()).check(id, x, n)
}

/// Property evaluator parametrised by the companion map used pointwise.
pub struct ClosureFacts {
    companion: NatMap,
    s: UpSet,
    cl_minus_s: UpSet,
    n0: UpSet,
}

impl ClosureFacts {
    pub fn new(companion: NatMap) -> Self {
        let s = three_n_or_three_n_plus_two();
        let cl_minus_s = s.cl_minus();
        ClosureFacts { companion, s, cl_minus_s, n0: n0_set() }
    }

    fn tilde(&self, n: u64) -> u64 {
        self.companion.apply(n)
    }

    /// `m ∈ Cl⁻(3ℕ ∪ 3ℕ+2)` computed from the supplied map.
    fn in_cl_minus_s(&self, m: u64) -> bool {
        let in_s = |k: u64| k % 3 != 1;
        !in_s(m) && in_s(self.tilde(m))
    }

    pub fn check(&self, id: u8, x: &UpSet, n: u64) -> Result<bool, UnknownProperty> {
        Ok(self.set_level(id, x)? && self.pointwise(id, x, n)?)
    }

    pub fn set_level(&self, id: u8, x: &UpSet) -> Result<bool, UnknownProperty> {
        Ok(match id {
            1 => self.n0 == self.s.closure().complement(),
            2 => self.n0.is_infinite(),
            3 => finiteness_agrees(x),
            4 => x.companion_image().companion_image() == *x,
            5 => self.cl_minus_s.companion_image() == self.s,
            6 => self.s.companion_image() == self.cl_minus_s,
            7 => x.intersection(&self.s).cl_minus().is_subset(&UpSet::from_residue(1, 3).expect("1 < 3")),
            8 => x.is_closed() == x.complement().is_closed(),
            other => return Err(UnknownProperty(other)),
        })
    }

    pub fn pointwise(&self, id: u8, x: &UpSet, n: u64) -> Result<bool, UnknownProperty> {
        let in_s = |k: u64| k % 3 != 1;
        Ok(match id {
            1 => (self.tilde(n) == n) == !(in_s(n) || in_s(self.tilde(n))),
            2 => {
                // witness chain 1, 4, 13, 40, …: from the second term on, every
                // term is a self-companion, and terms strictly increase
                let k = n.min(30);
                let term = chain_term(k + 1);
                self.tilde(term) == term && chain_term(k + 2) > term
            }
            3 => true,
            4 => self.tilde(self.tilde(n)) == n,
            5 => in_s(n) == self.in_cl_minus_s(self.tilde(n)),
            6 => in_s(self.tilde(n)) == self.in_cl_minus_s(n),
            7 => {
                let in_xs = |k: u64| x.member(k) && in_s(k);
                let in_cl_minus = !in_xs(n) && in_xs(self.tilde(n));
                !in_cl_minus || n % 3 == 1
            }
            8 => true,
            other => return Err(UnknownProperty(other)),
        })
    }
}

/// `n₀ = 1, n_{i+1} = 3nᵢ + 1`.
pub fn chain_term(i: u64) -> u64 {
    (0..i).fold(1, |n, _| 3 * n + 1)
}

/// The finiteness facts in the form they are used: `Cl(X)` is finite iff `X`
/// is, a finite `X` has finite `Cl⁻(X)`, and on subsets of `3ℕ ∪ (3ℕ + 2)`
/// `Cl⁻(X)` is finite iff `X` is.
///
/// The unrestricted three-way equivalence is false: a closed infinite `X` has
/// `Cl⁻(X) = ∅` (see [`literal_three_way_finiteness`]).
pub fn finiteness_agrees(x: &UpSet) -> bool {
    let cl_ok = x.closure().is_finite() == x.is_finite();
    let minus_ok = !x.is_finite() || x.cl_minus().is_finite();
    let restricted = x.intersection(&three_n_or_three_n_plus_two());
    let restricted_ok = restricted.cl_minus().is_finite() == restricted.is_finite();
    cl_ok && minus_ok && restricted_ok
}

/// `Cl(X) finite ⟺ Cl⁻(X) finite ⟺ X finite`, read literally.
pub fn literal_three_way_finiteness(x: &UpSet) -> bool {
    let a = x.closure().is_finite();
    let b = x.cl_minus().is_finite();
    let c = x.is_finite();
    a == b && b == c
}

/// `Cl⁻(X) ⊆ 3ℕ + 1` for arbitrary `X`, read literally. The checked form
/// restricts `X` to `3ℕ ∪ (3ℕ + 2)`, which covers every use; `X = {1}` has
/// `Cl⁻(X) = {0}`.
pub fn literal_cl_minus_bound(x: &UpSet) -> bool {
    x.cl_minus().is_subset(&UpSet::from_residue(1, 3).expect("1 < 3"))
}
