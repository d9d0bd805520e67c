//! Exhaustive enumeration of small finite models and the implicit
//! definability check for `s`.
//!
//! Frames are all labelled preorders. Valuations are enumerated up to a
//! permutation of the domain: an element is described by its type, the
//! triple of up-sets where `P`, `Q`, `R` hold, and a valuation is a multiset
//! of types. Permuting the domain yields an isomorphic model, so nothing
//! observable is lost.

use std::sync::OnceLock;

use serde::Serialize;

use super::eval::Compiled;
use super::finite::{FiniteCDModel, Frame, MAX_DOM};
use crate::formulas::{theory_t, Pred};

/// Nondecreasing index sequences of length `k` below `n`.
struct Multisets {
    n: usize,
    cur: Vec<usize>,
    done: bool,
}

impl Multisets {
    fn new(n: usize, k: usize) -> Self {
        Multisets { n, cur: vec![0; k], done: n == 0 && k > 0 }
    }
}

impl Iterator for Multisets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let k = self.cur.len();
        match (0..k).rev().find(|&i| self.cur[i] + 1 < self.n) {
            Some(i) => {
                let v = self.cur[i] + 1;
                for x in &mut self.cur[i..] {
                    *x = v;
                }
            }
            None => self.done = true,
        }
        Some(out)
    }
}

/// Element types of a frame: `(P, Q, R)` up-set triples.
fn element_types(frame: &Frame) -> Vec<[u8; 3]> {
    let ups = frame.upsets();
    let mut out = Vec::with_capacity(ups.len().pow(3));
    for &p in &ups {
        for &q in &ups {
            for &r in &ups {
                out.push([p, q, r]);
            }
        }
    }
    out
}

fn assemble(frame: Frame, types: &[[u8; 3]], pick: &[usize], s: u8) -> FiniteCDModel {
    let mut atoms = [[0u8; MAX_DOM]; 3];
    for (e, &t) in pick.iter().enumerate() {
        for k in 0..3 {
            atoms[k][e] = types[t][k];
        }
    }
    FiniteCDModel::from_parts(frame, pick.len(), atoms, s)
}

/// Every model with `1..=max_worlds` worlds and domain `1..=max_dom`, up to
/// domain permutation. Order: worlds, frame, domain size, valuation, `s`.
pub fn enumerate_models(max_worlds: usize, max_dom: usize) -> impl Iterator<Item = FiniteCDModel> {
    assert!(max_worlds <= 4 && max_dom <= MAX_DOM, "enumeration bounds too large");
    (1..=max_worlds).flat_map(Frame::all).flat_map(move |frame| {
        let types = std::rc::Rc::new(element_types(&frame));
        let ups = std::rc::Rc::new(frame.upsets());
        (1..=max_dom).flat_map(move |k| {
            let types = types.clone();
            let ups = ups.clone();
            Multisets::new(types.len(), k).flat_map(move |pick| {
                let types = types.clone();
                let ups = ups.clone();
                (0..ups.len()).map(move |i| assemble(frame, &types, &pick, ups[i]))
            })
        })
    })
}

struct CompiledAxiom {
    program: Compiled,
    mentions_s: bool,
}

/// The axioms of `T`, smallest first.
fn compiled_theory() -> &'static [CompiledAxiom] {
    static T: OnceLock<Vec<CompiledAxiom>> = OnceLock::new();
    T.get_or_init(|| {
        let mut out: Vec<CompiledAxiom> = theory_t()
            .axioms()
            .iter()
            .map(|a| CompiledAxiom { program: Compiled::new(a, &[]).expect("closed"), mentions_s: a.mentions_s() })
            .collect();
        out.sort_by_key(|a| a.program.len());
        out
    })
}

fn holds_everywhere(a: &CompiledAxiom, m: &FiniteCDModel) -> bool {
    a.program.forcing_set(m, &[]) == m.frame().all_mask()
}

/// Every axiom of `T` is forced at every world.
pub fn models_t(m: &FiniteCDModel) -> bool {
    compiled_theory().iter().all(|a| holds_everywhere(a, m))
}

/// Worlds where some element satisfies `P` but not `Q`.
pub fn p_minus_q_worlds(m: &FiniteCDModel) -> u8 {
    (0..m.dom()).fold(0, |acc, e| acc | (m.atom(Pred::P, e) & !m.atom(Pred::Q, e))) & m.frame().all_mask()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum DefinabilityViolation {
    /// `s` at a world disagrees with `P ∖ Q ≠ ∅` there.
    Biconditional { model: String, world: usize },
    /// Two models of `T` differ only in `s`.
    Twins { first: String, second: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DefinabilityReport {
    pub models: u64,
    pub models_of_t: u64,
    pub valuations: u64,
    /// Total number of violations; only the first few are listed.
    pub violation_count: u64,
    pub violations: Vec<DefinabilityViolation>,
}

impl DefinabilityReport {
    pub fn pass(&self) -> bool {
        self.violation_count == 0
    }
}

const MAX_LISTED: usize = 20;

/// Over every enumerated model of `T`: `s` holds at a world iff some element
/// is in `P ∖ Q` there; and no frame, domain and `P`/`Q`/`R` valuation admits
/// two values of `s`.
pub fn implicit_definability_suite(max_worlds: usize, max_dom: usize) -> DefinabilityReport {
    let mut report =
        DefinabilityReport { models: 0, models_of_t: 0, valuations: 0, violation_count: 0, violations: Vec::new() };
    let push = |report: &mut DefinabilityReport, v| {
        report.violation_count += 1;
        if report.violations.len() < MAX_LISTED {
            report.violations.push(v);
        }
    };
    let theory = compiled_theory();
    for n in 1..=max_worlds {
        for frame in Frame::all(n) {
            let types = element_types(&frame);
            let ups = frame.upsets();
            for k in 1..=max_dom {
                for pick in Multisets::new(types.len(), k) {
                    report.valuations += 1;
                    report.models += ups.len() as u64;
                    // axioms without s are decided once per valuation
                    let probe = assemble(frame, &types, &pick, 0);
                    if !theory.iter().filter(|a| !a.mentions_s).all(|a| holds_everywhere(a, &probe)) {
                        continue;
                    }
                    let mut found: Option<FiniteCDModel> = None;
                    for &s in &ups {
                        let m = assemble(frame, &types, &pick, s);
                        if !theory.iter().filter(|a| a.mentions_s).all(|a| holds_everywhere(a, &m)) {
                            continue;
                        }
                        report.models_of_t += 1;
                        let witness = p_minus_q_worlds(&m);
                        if witness != m.s_mask() {
                            let world = (0..n).find(|w| (witness ^ m.s_mask()) >> w & 1 == 1).expect("differs");
                            push(&mut report, DefinabilityViolation::Biconditional { model: m.to_string(), world });
                        }
                        match found {
                            Some(first) => push(
                                &mut report,
                                DefinabilityViolation::Twins { first: first.to_string(), second: m.to_string() },
                            ),
                            None => found = Some(m),
                        }
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::super::eval::forcing_set;
    use super::super::finite::parse_model;
    use super::*;
    use crate::formulas::{enumerate_formulas, pool_var, Formula, FormulaArena};

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn multiset_counts() {
        assert_eq!(Multisets::new(5, 3).count() as u64, binomial(7, 3));
        assert_eq!(Multisets::new(1, 2).count(), 1);
        assert_eq!(Multisets::new(4, 0).count(), 1);
    }

    #[test]
    fn one_world_one_element_count() {
        // each of P, Q, R, s is either empty or the single world
        assert_eq!(enumerate_models(1, 1).count(), 16);
        // two elements: 8 types, C(9, 2) multisets, 2 values of s
        assert_eq!(enumerate_models(1, 2).count(), 16 + 72);
    }

    #[test]
    fn enumeration_respects_persistence() {
        for m in enumerate_models(2, 2) {
            let f = m.frame();
            assert!(f.is_upset(m.s_mask()));
            for p in Pred::ALL {
                assert!((0..m.dom()).all(|e| f.is_upset(m.atom(p, e))));
            }
        }
    }

    #[test]
    fn theory_examples() {
        let m = parse_model("model { worlds=1; dom=1; P[0]={0}; s={0} }").unwrap();
        assert!(models_t(&m));
        assert!(!models_t(&m.with_s(0).unwrap()));
        // P(0) at world 0 while no world has Q(0) or s
        let bad = parse_model("model { worlds=2; order={(0,1)}; dom=1; P[0]={0}; P[1]={0}; R[0]={0}; R[1]={0} }").unwrap();
        assert!(!models_t(&bad));
    }

    #[test]
    fn empty_p_forces_s_false() {
        for m in enumerate_models(2, 2) {
            let no_p = (0..m.dom()).all(|e| m.atom(Pred::P, e) == 0);
            if no_p && models_t(&m) {
                assert_eq!(m.s_mask(), 0, "{m}");
            }
        }
    }

    #[test]
    fn small_definability_suite_passes() {
        let r = implicit_definability_suite(2, 2);
        assert!(r.pass(), "{:?}", r.violations);
        assert!(r.models_of_t > 0);
    }

    #[test]
    fn persistence_over_depth_three_formulas() {
        let arena = FormulaArena::build(3, 1, true);
        let formulas: Vec<_> = (0..arena.len()).map(|i| arena.formula(i)).collect();
        for m in enumerate_models(2, 1).step_by(3) {
            for f in &formulas {
                let x = forcing_set(&m, f, &[(&pool_var(0), 0)]).unwrap();
                assert!(m.frame().is_upset(x), "{f} in {m}");
            }
        }
    }

    #[test]
    fn constant_domain_axiom_instances() {
        // ∀x(φ ∨ ψ(x)) → (φ ∨ ∀x ψ(x)) with x not free in φ
        let phis: Vec<Formula> = enumerate_formulas(2, 1, true).map(|f| rename_free_x(&f)).collect();
        let psis: Vec<Formula> = enumerate_formulas(2, 1, true).step_by(3).collect();
        let models: Vec<_> = enumerate_models(2, 2).step_by(11).collect();
        for phi in &phis {
            for psi in &psis {
                let lhs = Formula::forall("x", Formula::or(phi.clone(), psi.clone()));
                let rhs = Formula::or(phi.clone(), Formula::forall("x", psi.clone()));
                let ax = Formula::imp(lhs, rhs);
                for m in &models {
                    for e in 0..m.dom() as u8 {
                        let all = m.frame().all_mask();
                        assert_eq!(forcing_set(m, &ax, &[("y", e)]).unwrap(), all, "{ax} in {m}");
                    }
                }
            }
        }
    }

    /// Replaces free `x` by `y`.
    fn rename_free_x(f: &Formula) -> Formula {
        match f {
            Formula::Atom(p, v) if v == "x" => Formula::atom(*p, "y"),
            Formula::And(a, b) => Formula::and(rename_free_x(a), rename_free_x(b)),
            Formula::Or(a, b) => Formula::or(rename_free_x(a), rename_free_x(b)),
            Formula::Imp(a, b) => Formula::imp(rename_free_x(a), rename_free_x(b)),
            Formula::Forall(v, _) | Formula::Exists(v, _) if v == "x" => f.clone(),
            Formula::Forall(v, a) => Formula::forall(v, rename_free_x(a)),
            Formula::Exists(v, a) => Formula::exists(v, rename_free_x(a)),
            other => other.clone(),
        }
    }
}
