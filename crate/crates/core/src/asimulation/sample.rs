//! Seeded sampling of member pairs and of probe elements.

use rand::Rng;

use super::relation::{z_member, ZPair, ZPoint};
use crate::semantics::Side;
use crate::upset::{companion, UpSet};
use crate::worlds::{base_u, base_v, random_u_world_with, World};

const ELEMENT_BOUND: u64 = 64;

fn random_state<R: Rng + ?Sized>(side: Side, rng: &mut R) -> World {
    let roll = rng.gen_range(0..100);
    match side {
        Side::M2 if roll < 25 => base_u().clone(),
        _ if roll < 40 => base_v().clone(),
        _ => random_u_world_with(rng, 4),
    }
}

fn same_class(a: u64, b: u64) -> bool {
    (a % 3 != 1) == (b % 3 != 1) && (a % 9 == 4) == (b % 9 == 4)
}

/// A member pair with random orientation and a tuple of length at most
/// `max_len`. Tuples mix fresh elements with companion copies of earlier
/// positions; extensions that leave the relation are discarded, so the
/// result can be shorter than requested.
pub fn random_zpair<R: Rng + ?Sized>(rng: &mut R, max_len: usize) -> ZPair {
    let left_side = if rng.gen_bool(0.5) { Side::M1 } else { Side::M2 };
    let left = ZPoint::new(left_side, random_state(left_side, rng), Vec::new());
    let right = ZPoint::new(left_side.other(), random_state(left_side.other(), rng), Vec::new());
    let mut p = ZPair::new(left, right).expect("sampled states respect typing");
    let target = rng.gen_range(0..=max_len);
    let mut attempts = 0;
    while p.len() < target && attempts < 16 * (target + 1) {
        attempts += 1;
        let (d, e) = (&p.left().tuple, &p.right().tuple);
        let (f, g) = match rng.gen_range(0..10) {
            0..=2 if !d.is_empty() => {
                let m = rng.gen_range(0..d.len());
                (companion(d[m]), companion(e[m]))
            }
            3 if !d.is_empty() => {
                let m = rng.gen_range(0..d.len());
                (d[m], e[m])
            }
            _ => {
                let f = rng.gen_range(0..ELEMENT_BOUND);
                let g = rng.gen_range(0..ELEMENT_BOUND);
                if !same_class(f, g) {
                    continue;
                }
                (f, g)
            }
        };
        let q = p.extended(f, g);
        if z_member(&q) {
            p = q;
        }
    }
    p
}

/// Probe elements for the forth (or back) condition against `tuple`: its
/// entries, their companions, and fresh elements from each residue class.
pub fn probe_elements<R: Rng + ?Sized>(tuple: &[u64], rng: &mut R, count: usize) -> Vec<u64> {
    let closure = UpSet::from_finite(tuple.iter().copied()).closure();
    let mut out = Vec::with_capacity(count);
    let mut kind = 0;
    let mut guard = 0;
    while out.len() < count && guard < 64 * count {
        guard += 1;
        kind = (kind + 1) % 5;
        let x = match kind {
            0 | 1 if !tuple.is_empty() => {
                let x = tuple[rng.gen_range(0..tuple.len())];
                if kind == 0 {
                    x
                } else {
                    companion(x)
                }
            }
            0 | 1 => continue,
            // ℕ₀, 3ℕ ∪ 3ℕ+2, and the companions of the latter
            2 => 9 * rng.gen_range(0..8) + 4,
            3 => 3 * rng.gen_range(0..24) + [0, 2][rng.gen_range(0..2)],
            _ => 9 * rng.gen_range(0..8) + [1, 7][rng.gen_range(0..2)],
        };
        if kind >= 2 && closure.member(x) {
            continue;
        }
        out.push(x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_are_members_of_bounded_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut saw_u = [false; 2];
        let mut lengths = [0usize; 5];
        for _ in 0..300 {
            let p = random_zpair(&mut rng, 4);
            assert!(z_member(&p));
            assert!(p.len() <= 4);
            lengths[p.len()] += 1;
            saw_u[0] |= p.left().world.is_base_u();
            saw_u[1] |= p.right().world.is_base_u();
        }
        assert_eq!(saw_u, [true, true]);
        assert!(lengths.iter().all(|&c| c > 0), "{lengths:?}");
    }

    #[test]
    fn probes_cover_every_subcase() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let probes = probe_elements(&[2, 10], &mut rng, 10);
        assert_eq!(probes.len(), 10);
        assert!(probes.contains(&2) || probes.contains(&10));
        assert!(probes.iter().any(|&x| x % 9 == 4));
        assert!(probes.iter().any(|&x| x % 3 != 1 && x != 2));
        assert!(probes.iter().any(|&x| x % 9 == 1 || x % 9 == 7));
    }
}
