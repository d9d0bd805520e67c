//! Seeded random sets for the property suites.

use rand::Rng;

use super::UpSet;

const MODULI: [u64; 8] = [1, 2, 3, 4, 6, 9, 12, 18];

/// A union of residue classes edited by a few finite insertions and
/// deletions; sometimes closed, sometimes finite.
pub fn random_upset<R: Rng + ?Sized>(rng: &mut R, edits: usize) -> UpSet {
    let mut x = if rng.gen_bool(0.2) {
        UpSet::empty()
    } else {
        let m = MODULI[rng.gen_range(0..MODULI.len())];
        (0..m)
            .filter(|_| rng.gen_bool(0.5))
            .fold(UpSet::empty(), |acc, r| acc.union(&UpSet::from_residue(r, m).expect("r < m")))
    };
    for _ in 0..rng.gen_range(0..=edits) {
        let n = rng.gen_range(0..60);
        x = if rng.gen_bool(0.5) { x.with(n) } else { x.without(n) };
    }
    if rng.gen_bool(0.25) {
        x = x.closure();
    }
    x
}
