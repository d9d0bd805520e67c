//! γ, the relation it induces, closures and companions.
//!
//! Every R-component has at most two points, so one companion step already
//! reaches the closure: `Cl(X) = X ∪ {ñ | n ∈ X}`. The oracle tests certify
//! both this and the closed form of the companion map.

use std::sync::OnceLock;

use super::{NatMap, UpSet};

/// `3n + 1` on `3ℕ ∪ (3ℕ + 2)`, `n` on `3ℕ + 1`.
pub fn gamma(n: u64) -> u64 {
    if n % 3 == 1 {
        n
    } else {
        3 * n + 1
    }
}

/// The unique `ñ` with `Cl({n}) = {n, ñ}`.
pub fn companion(n: u64) -> u64 {
    match n % 9 {
        0 | 2 | 3 | 5 | 6 | 8 => 3 * n + 1,
        1 | 7 => (n - 1) / 3,
        _ => n,
    }
}

fn companion_map() -> &'static NatMap {
    static MAP: OnceLock<NatMap> = OnceLock::new();
    MAP.get_or_init(NatMap::companion)
}

fn gamma_map() -> &'static NatMap {
    static MAP: OnceLock<NatMap> = OnceLock::new();
    MAP.get_or_init(NatMap::gamma)
}

/// Self-companion numbers (`9ℕ + 4`).
pub fn n0_set() -> UpSet {
    companion_map().fixed_points()
}

/// `3ℕ ∪ (3ℕ + 2)`.
pub fn three_n_or_three_n_plus_two() -> UpSet {
    UpSet::from_residue(0, 3)
        .expect("0 < 3")
        .union(&UpSet::from_residue(2, 3).expect("2 < 3"))
}

impl UpSet {
    /// `{ñ | n ∈ self}`. The companion map is an involution, so this is also
    /// its preimage.
    pub fn companion_image(&self) -> UpSet {
        companion_map().preimage(self)
    }

    /// The least R-closed superset.
    pub fn closure(&self) -> UpSet {
        self.union(&self.companion_image())
    }

    /// `Cl(X) ∖ X`.
    pub fn cl_minus(&self) -> UpSet {
        self.companion_image().difference(self)
    }

    pub fn is_closed(&self) -> bool {
        self.companion_image().is_subset(self)
    }

    /// `{a | γ(a) ∈ self}`.
    pub fn gamma_preimage(&self) -> UpSet {
        gamma_map().preimage(self)
    }

    /// `{γ(a) | a ∈ self}`.
    pub fn gamma_image(&self) -> UpSet {
        gamma_map().image(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn res(r: u64, m: u64) -> UpSet {
        UpSet::from_residue(r, m).unwrap()
    }

    #[test]
    fn gamma_cases() {
        assert_eq!(gamma(0), 1);
        assert_eq!(gamma(4), 4);
        assert_eq!(gamma(2), 7);
    }

    #[test]
    fn companion_examples() {
        assert_eq!(companion(0), 1);
        assert_eq!(companion(1), 0);
        assert_eq!(companion(13), 13);
        assert_eq!(companion(7), 2);
        assert_eq!(companion(5), 16);
    }

    #[test]
    fn scalar_and_map_forms_agree() {
        let map = NatMap::companion();
        for n in 0..10_000 {
            assert_eq!(companion(n), map.apply(n));
            assert_eq!(gamma(n), NatMap::gamma().apply(n));
        }
    }

    #[test]
    fn closure_of_three_n_plus_two() {
        let c = res(2, 3).closure();
        assert_eq!(c, &res(2, 3) | &res(7, 9));
    }

    #[test]
    fn cl_minus_of_closed_pair_is_empty() {
        assert!(UpSet::from_finite([0, 1]).cl_minus().is_empty());
        assert_eq!(UpSet::from_finite([0, 5]).cl_minus(), UpSet::from_finite([1, 16]));
    }

    #[test]
    fn n0_membership() {
        let n0 = n0_set();
        assert!(n0.member(4));
        assert!(!n0.member(1));
        assert_eq!(n0, res(4, 9));
        assert_eq!(n0, three_n_or_three_n_plus_two().closure().complement());
    }

    #[test]
    fn gamma_image_is_three_n_plus_one() {
        assert_eq!(UpSet::naturals().gamma_image(), res(1, 3));
    }
}
