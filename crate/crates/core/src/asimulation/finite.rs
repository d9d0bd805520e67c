//! CD-asimulations between finite models, checked by exhaustion.
//!
//! Tuples are bounded by a length cap: the element-extension conditions
//! are only required below the cap. A formula of depth `d` over `V`
//! variables never needs tuples longer than `V + d - 1`, so that cap is
//! enough for transfer at depth `d`.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::formulas::{FormulaArena, Pred};
use crate::semantics::{ArenaTable, FiniteCDModel, Frame, Side};

/// A candidate pair between two finite models. `dir = M1` puts the left
/// point in the first model.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FinitePair {
    pub dir: Side,
    pub left_world: u8,
    pub right_world: u8,
    pub left: Vec<u8>,
    pub right: Vec<u8>,
}

impl FinitePair {
    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AsimulationViolation {
    pub condition: u8,
    pub pair: FinitePair,
}

/// Dense numbering of every typed pair up to the length cap.
struct PairSpace<'a> {
    models: [&'a FiniteCDModel; 2],
    cap: usize,
    /// `off[k]` is the first code of length `k`; `off[cap + 1]` is the total.
    off: Vec<usize>,
    world_pairs: usize,
}

impl<'a> PairSpace<'a> {
    fn new(m1: &'a FiniteCDModel, m2: &'a FiniteCDModel, cap: usize) -> Self {
        let base = m1.dom() * m2.dom();
        let mut off = vec![0];
        for k in 0..=cap {
            off.push(off[k] + base.pow(k as u32));
        }
        PairSpace { models: [m1, m2], cap, off, world_pairs: m1.worlds() * m2.worlds() }
    }

    fn model(&self, side: Side) -> &'a FiniteCDModel {
        match side {
            Side::M1 => self.models[0],
            Side::M2 => self.models[1],
        }
    }

    fn size(&self) -> usize {
        2 * self.world_pairs * self.off[self.cap + 1]
    }

    fn typed(&self, p: &FinitePair) -> bool {
        let (l, r) = (self.model(p.dir), self.model(p.dir.other()));
        p.left.len() == p.right.len()
            && p.len() <= self.cap
            && (p.left_world as usize) < l.worlds()
            && (p.right_world as usize) < r.worlds()
            && p.left.iter().all(|&x| (x as usize) < l.dom())
            && p.right.iter().all(|&x| (x as usize) < r.dom())
    }

    fn index(&self, p: &FinitePair) -> usize {
        let (l, r) = (self.model(p.dir), self.model(p.dir.other()));
        let dir = usize::from(p.dir == Side::M2);
        let worlds = dir * self.world_pairs + p.left_world as usize * r.worlds() + p.right_world as usize;
        let mut code = 0;
        for &x in p.left.iter().rev() {
            code = code * l.dom() + x as usize;
        }
        for &x in p.right.iter().rev() {
            code = code * r.dom() + x as usize;
        }
        worlds * self.off[self.cap + 1] + self.off[p.len()] + code
    }

    fn pair(&self, idx: usize) -> FinitePair {
        let total = self.off[self.cap + 1];
        let (mut worlds, rest) = (idx / total, idx % total);
        let dir = if worlds >= self.world_pairs { Side::M2 } else { Side::M1 };
        worlds %= self.world_pairs;
        let (l, r) = (self.model(dir), self.model(dir.other()));
        let k = self.off.iter().rposition(|&o| o <= rest).expect("offset 0 exists");
        let mut code = rest - self.off[k];
        let mut right = Vec::with_capacity(k);
        for _ in 0..k {
            right.push((code % r.dom()) as u8);
            code /= r.dom();
        }
        let mut left = Vec::with_capacity(k);
        for _ in 0..k {
            left.push((code % l.dom()) as u8);
            code /= l.dom();
        }
        FinitePair {
            dir,
            left_world: (worlds / r.worlds()) as u8,
            right_world: (worlds % r.worlds()) as u8,
            left,
            right,
        }
    }

    fn atomic(&self, p: &FinitePair) -> bool {
        let (l, r) = (self.model(p.dir), self.model(p.dir.other()));
        p.left.iter().zip(&p.right).all(|(&d, &e)| {
            Pred::ALL.into_iter().all(|pr| {
                l.atom(pr, d as usize) >> p.left_world & 1 == 0 || r.atom(pr, e as usize) >> p.right_world & 1 == 1
            })
        })
    }

    /// The first of conditions 3–5 that fails for `p` against `member`.
    fn failing_condition(&self, p: &FinitePair, member: &dyn Fn(&FinitePair) -> bool) -> Option<u8> {
        let (l, r) = (self.model(p.dir), self.model(p.dir.other()));
        for v in 0..r.worlds() {
            if !r.frame().leq(p.right_world as usize, v) {
                continue;
            }
            let found = (0..l.worlds()).filter(|&w| l.frame().leq(p.left_world as usize, w)).any(|w| {
                let back = FinitePair {
                    dir: p.dir.other(),
                    left_world: v as u8,
                    right_world: w as u8,
                    left: p.right.clone(),
                    right: p.left.clone(),
                };
                let forth = FinitePair { left_world: w as u8, right_world: v as u8, ..p.clone() };
                member(&back) && member(&forth)
            });
            if !found {
                return Some(3);
            }
        }
        if p.len() >= self.cap {
            return None;
        }
        let extend = |f: usize, g: usize| {
            let mut q = p.clone();
            q.left.push(f as u8);
            q.right.push(g as u8);
            q
        };
        if !(0..l.dom()).all(|f| (0..r.dom()).any(|g| member(&extend(f, g)))) {
            return Some(4);
        }
        if !(0..r.dom()).all(|g| (0..l.dom()).any(|f| member(&extend(f, g)))) {
            return Some(5);
        }
        None
    }
}

/// Checks conditions 1–5 for `z`, with element extension required below
/// `cap`.
pub fn is_asimulation_finite(
    m1: &FiniteCDModel,
    m2: &FiniteCDModel,
    z: &[FinitePair],
    cap: usize,
) -> Result<(), AsimulationViolation> {
    let space = PairSpace::new(m1, m2, cap);
    let fail = |condition, pair: &FinitePair| Err(AsimulationViolation { condition, pair: pair.clone() });
    for p in z {
        if !space.typed(p) {
            return fail(1, p);
        }
    }
    let set: HashSet<&FinitePair> = z.iter().collect();
    for p in z {
        if !space.atomic(p) {
            return fail(2, p);
        }
        if let Some(c) = space.failing_condition(p, &|q| set.contains(q)) {
            return fail(c, p);
        }
    }
    Ok(())
}

/// The largest relation satisfying conditions 1–5 under the cap.
pub fn greatest_asimulation(m1: &FiniteCDModel, m2: &FiniteCDModel, cap: usize) -> Vec<FinitePair> {
    let space = PairSpace::new(m1, m2, cap);
    let pairs: Vec<FinitePair> = (0..space.size()).map(|i| space.pair(i)).collect();
    let mut alive: Vec<bool> = pairs.iter().map(|p| space.atomic(p)).collect();
    loop {
        let mut changed = false;
        for (i, p) in pairs.iter().enumerate() {
            if !alive[i] {
                continue;
            }
            let snapshot = &alive;
            if space.failing_condition(p, &|q| snapshot[space.index(q)]).is_some() {
                alive[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    pairs.into_iter().zip(alive).filter(|(_, a)| *a).map(|(p, _)| p).collect()
}

/// Length cap used for transfer at a given depth over `vars` variables.
pub fn transfer_cap(vars: usize, depth: usize) -> usize {
    vars + depth.max(1) - 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferViolation {
    pub pair: FinitePair,
    pub formula: String,
    pub depth: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TransferReport {
    pub model_pairs: usize,
    pub relation_pairs: usize,
    pub pairs_checked: usize,
    pub formulas: usize,
    pub violation_count: usize,
    /// The first few violations.
    pub violations: Vec<TransferViolation>,
}

impl TransferReport {
    pub fn pass(&self) -> bool {
        self.violation_count == 0
    }

    fn merge(&mut self, other: TransferReport) {
        self.model_pairs += other.model_pairs;
        self.relation_pairs += other.relation_pairs;
        self.pairs_checked += other.pairs_checked;
        self.violation_count += other.violation_count;
        let room = 20usize.saturating_sub(self.violations.len());
        self.violations.extend(other.violations.into_iter().take(room));
    }
}

/// Forcing bitsets over all `s`-free formulas of a bounded depth.
pub struct TransferOracle {
    arena: FormulaArena,
    depth: usize,
    words: usize,
    /// `scope[k]`: formulas whose free variables are among the first `k`.
    scope: Vec<Vec<u64>>,
}

/// `bits[w][env]` is the set of arena formulas forced at `w` under `env`.
pub struct ModelBits {
    dom: usize,
    bits: Vec<Vec<Vec<u64>>>,
}

impl TransferOracle {
    /// Depth 0 is treated as depth 1: atoms only.
    pub fn new(depth: usize, vars: usize) -> Self {
        let depth = depth.max(1);
        let arena = FormulaArena::build(depth, vars, false);
        let words = arena.len().div_ceil(64);
        let scope = (0..=vars)
            .map(|k| {
                let mut v = vec![0u64; words];
                for id in 0..arena.len() {
                    if arena.free_mask(id) >> k == 0 {
                        v[id / 64] |= 1 << (id % 64);
                    }
                }
                v
            })
            .collect();
        TransferOracle { arena, depth, words, scope }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn vars(&self) -> usize {
        self.arena.vars()
    }

    pub fn formulas(&self) -> usize {
        self.arena.len()
    }

    pub fn cap(&self) -> usize {
        transfer_cap(self.vars(), self.depth)
    }

    pub fn model_bits(&self, m: &FiniteCDModel) -> ModelBits {
        let table = ArenaTable::new(&self.arena, m);
        let mut bits = vec![vec![vec![0u64; self.words]; table.envs()]; m.worlds()];
        for id in 0..self.arena.len() {
            for env in 0..table.envs() {
                let mask = table.get(id, env);
                for (w, per_world) in bits.iter_mut().enumerate() {
                    if mask >> w & 1 == 1 {
                        per_world[env][id / 64] |= 1 << (id % 64);
                    }
                }
            }
        }
        ModelBits { dom: m.dom(), bits }
    }

    fn forced<'b>(&self, mb: &'b ModelBits, world: u8, tuple: &[u8]) -> &'b [u64] {
        let env = tuple.iter().rev().fold(0, |acc, &x| acc * mb.dom + x as usize);
        &mb.bits[world as usize][env]
    }

    /// Checks forced-left ⇒ forced-right for every pair of `z` whose tuples
    /// fit the variable pool.
    pub fn check(&self, bits: [&ModelBits; 2], z: &[FinitePair]) -> TransferReport {
        let mut report = TransferReport { model_pairs: 1, relation_pairs: z.len(), formulas: self.formulas(), ..Default::default() };
        for p in z.iter().filter(|p| p.len() <= self.vars()) {
            report.pairs_checked += 1;
            let (lb, rb) = match p.dir {
                Side::M1 => (bits[0], bits[1]),
                Side::M2 => (bits[1], bits[0]),
            };
            let left = self.forced(lb, p.left_world, &p.left);
            let right = self.forced(rb, p.right_world, &p.right);
            let scope = &self.scope[p.len()];
            let first = (0..self.words).find_map(|i| {
                let bad = left[i] & !right[i] & scope[i];
                (bad != 0).then(|| i * 64 + bad.trailing_zeros() as usize)
            });
            if let Some(id) = first {
                report.violation_count += 1;
                if report.violations.len() < 20 {
                    let formula = self.arena.formula(id);
                    report.violations.push(TransferViolation { pair: p.clone(), depth: formula.depth(), formula: formula.to_string() });
                }
            }
        }
        report
    }
}

/// Transfer check for one relation between two models.
pub fn transfer_oracle(m1: &FiniteCDModel, m2: &FiniteCDModel, z: &[FinitePair], depth: usize) -> TransferReport {
    let oracle = TransferOracle::new(depth, 2);
    oracle.check([&oracle.model_bits(m1), &oracle.model_bits(m2)], z)
}

/// Seeded models with random labeled frames and persistent valuations;
/// `s` is empty since transfer only concerns `P`, `Q`, `R`.
pub fn fixture_family(seed: u64, count: usize, max_worlds: usize, max_dom: usize) -> Vec<FiniteCDModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frames: Vec<Vec<Frame>> = (1..=max_worlds).map(Frame::all).collect();
    (0..count)
        .map(|_| {
            let worlds = rng.gen_range(1..=max_worlds);
            let frame = frames[worlds - 1].choose(&mut rng).expect("every size has a frame").clone();
            let dom = rng.gen_range(1..=max_dom);
            let upsets = frame.upsets();
            let mut pick = || (0..dom).map(|_| *upsets.choose(&mut rng).expect("∅ is an upset")).collect::<Vec<u8>>();
            let (p, q, r) = (pick(), pick(), pick());
            FiniteCDModel::from_masks(frame, dom, &p, &q, &r, 0).expect("upsets are persistent")
        })
        .collect()
}

/// For every ordered pair of models: the greatest asimulation under the
/// transfer cap, checked against every formula up to `depth`.
pub fn transfer_sweep(models: &[FiniteCDModel], depth: usize) -> TransferReport {
    let oracle = TransferOracle::new(depth, 2);
    let bits: Vec<ModelBits> = models.iter().map(|m| oracle.model_bits(m)).collect();
    let mut report = TransferReport { formulas: oracle.formulas(), ..Default::default() };
    for (i, m1) in models.iter().enumerate() {
        for (j, m2) in models.iter().enumerate() {
            let z = greatest_asimulation(m1, m2, oracle.cap());
            report.merge(oracle.check([&bits[i], &bits[j]], &z));
        }
    }
    report
}
