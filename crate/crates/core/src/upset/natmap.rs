use thiserror::Error;

use super::{lcm, UpSet, MAX_PERIOD};

/// One case of a piecewise-affine map: `modulus·q + residue ↦ slope·q + offset`.
///
/// Rules are written against the quotient `q` so that maps like `n ↦ (n − 1)/3`
/// on `n ≡ 1 (mod 9)` stay integral (`9q + 1 ↦ 3q`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AffineRule {
    pub residue: u64,
    pub modulus: u64,
    pub slope: u64,
    pub offset: u64,
}

impl AffineRule {
    pub const fn new(residue: u64, modulus: u64, slope: u64, offset: u64) -> Self {
        AffineRule { residue, modulus, slope, offset }
    }

    fn apply_quotient(&self, q: u64) -> u64 {
        self.slope * q + self.offset
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NatMapError {
    #[error("rule with zero modulus")]
    ZeroModulus,
    #[error("residue {0} is covered by no rule")]
    Uncovered(u64),
    #[error("residue {0} is covered by more than one rule")]
    Overlap(u64),
}

/// A total piecewise-affine map ℕ → ℕ whose rules partition ℕ by residue class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NatMap {
    rules: Vec<AffineRule>,
    modulus: u64,
}

impl NatMap {
    pub fn new(rules: Vec<AffineRule>) -> Result<Self, NatMapError> {
        if rules.iter().any(|r| r.modulus == 0) {
            return Err(NatMapError::ZeroModulus);
        }
        let modulus = rules.iter().fold(1usize, |acc, r| lcm(acc, r.modulus as usize)) as u64;
        for n in 0..modulus {
            match rules.iter().filter(|r| n % r.modulus == r.residue).count() {
                0 => return Err(NatMapError::Uncovered(n)),
                1 => {}
                _ => return Err(NatMapError::Overlap(n)),
            }
        }
        Ok(NatMap { rules, modulus })
    }

    /// `γ`: `3n + 1` on `3ℕ ∪ (3ℕ + 2)`, identity on `3ℕ + 1`.
    pub fn gamma() -> Self {
        NatMap::new(vec![
            AffineRule::new(0, 3, 9, 1),
            AffineRule::new(1, 3, 3, 1),
            AffineRule::new(2, 3, 9, 7),
        ])
        .expect("gamma rules partition ℕ")
    }

    /// The companion map, in the closed form certified against the brute-force
    /// closure oracle (see `oracle::derive_residue_map`).
    pub fn companion() -> Self {
        NatMap::new(vec![
            AffineRule::new(0, 3, 9, 1),
            AffineRule::new(2, 3, 9, 7),
            AffineRule::new(1, 9, 3, 0),
            AffineRule::new(4, 9, 9, 4),
            AffineRule::new(7, 9, 3, 2),
        ])
        .expect("companion rules partition ℕ")
    }

    pub fn rules(&self) -> &[AffineRule] {
        &self.rules
    }

    /// Least common modulus of the rules.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn rule_for(&self, n: u64) -> &AffineRule {
        self.rules
            .iter()
            .find(|r| n % r.modulus == r.residue)
            .expect("rules cover every residue")
    }

    pub fn apply(&self, n: u64) -> u64 {
        let rule = self.rule_for(n);
        rule.apply_quotient((n - rule.residue) / rule.modulus)
    }

    /// `{n | f(n) ∈ set}`.
    pub fn preimage(&self, set: &UpSet) -> UpSet {
        let t = set.threshold() as u64;
        let p = set.period();
        // Shifting n by modulus·p shifts every rule's image by a multiple of p.
        let period = (self.modulus as usize)
            .checked_mul(p)
            .filter(|&x| x <= MAX_PERIOD)
            .expect("preimage period exceeds the supported maximum");
        let threshold = self
            .rules
            .iter()
            .map(|r| {
                if r.slope == 0 || r.offset >= t {
                    0
                } else {
                    let q0 = (t - r.offset).div_ceil(r.slope);
                    r.modulus * q0 + r.residue
                }
            })
            .max()
            .unwrap_or(0);
        UpSet::tabulate(threshold as usize, period, |n| set.member(self.apply(n)))
    }

    /// `{n | f(n) = n}`.
    pub fn fixed_points(&self) -> UpSet {
        let mut out = UpSet::empty();
        for r in &self.rules {
            let (m, a) = (r.modulus as i128, r.slope as i128);
            let (res, b) = (r.residue as i128, r.offset as i128);
            // a·q + b = m·q + res
            if a == m {
                if b == res {
                    let class = UpSet::from_residue(r.residue, r.modulus).expect("rule residue < modulus");
                    out = out.union(&class);
                }
            } else if (b - res) % (m - a) == 0 {
                let q = (b - res) / (m - a);
                if q >= 0 {
                    out = out.with((m * q + res) as u64);
                }
            }
        }
        out
    }

    /// `{f(n) | n ∈ set}`.
    pub fn image(&self, set: &UpSet) -> UpSet {
        let t = set.threshold() as u64;
        let p = set.period() as u64;
        let mut out = UpSet::empty();
        for rule in &self.rules {
            // quotients q with modulus·q + residue ∈ set; periodic in q with period p
            // from q ≥ q0.
            let q0 = if t > rule.residue { (t - rule.residue).div_ceil(rule.modulus) } else { 0 };
            let in_class = |q: u64| set.member(rule.modulus * q + rule.residue);
            let part = if rule.slope == 0 {
                let hit = (0..q0 + p).any(in_class);
                if hit {
                    UpSet::singleton(rule.offset)
                } else {
                    UpSet::empty()
                }
            } else {
                let a = rule.slope;
                let b = rule.offset;
                let threshold = (a * q0 + b) as usize;
                let period = (a * p) as usize;
                UpSet::tabulate(threshold, period, |y| y >= b && (y - b) % a == 0 && in_class((y - b) / a))
            };
            out = out.union(&part);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        let g = NatMap::gamma();
        assert_eq!(g.apply(0), 1);
        assert_eq!(g.apply(4), 4);
        assert_eq!(g.apply(2), 7);
        assert_eq!(g.apply(5), 16);
    }

    #[test]
    fn rules_must_partition() {
        assert_eq!(
            NatMap::new(vec![AffineRule::new(0, 2, 1, 0)]),
            Err(NatMapError::Uncovered(1))
        );
        assert_eq!(
            NatMap::new(vec![
                AffineRule::new(0, 2, 1, 0),
                AffineRule::new(1, 2, 1, 1),
                AffineRule::new(0, 4, 1, 0),
            ]),
            Err(NatMapError::Overlap(0))
        );
    }

    #[test]
    fn preimage_and_image_agree_pointwise() {
        let g = NatMap::gamma();
        let s = &UpSet::from_residue(1, 9).unwrap() | &UpSet::from_finite([7, 40]);
        let pre = g.preimage(&s);
        for n in 0..3000 {
            assert_eq!(pre.member(n), s.member(g.apply(n)), "preimage at {n}");
        }
        let img = g.image(&s);
        let mut naive = vec![false; 10_000];
        for n in 0..3000u64 {
            if s.member(n) {
                naive[g.apply(n) as usize] = true;
            }
        }
        for y in 0..3000 {
            assert_eq!(img.member(y as u64), naive[y], "image at {y}");
        }
    }
}
