//! The two infinite models over quasi-partition worlds, and certificate
//! checks that they satisfy `T`.
//!
//! Forcing over these models quantifies over uncountably many successors,
//! so satisfaction is checked through certificates: exact set identities at
//! the world plus the same identities at sampled successors.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::upset::{gamma, UpSet};
use crate::worlds::{base_u, base_v, random_successor, three_n_plus_two, World};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    M1,
    M2,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::M1 => Side::M2,
            Side::M2 => Side::M1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::M1 => "m1",
            Side::M2 => "m2",
        }
    }
}

/// `m1` has states `U` and base point `𝐯`; `m2` has states `U ∪ {𝐮}` and
/// base point `𝐮`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SymbolicModel {
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("world is not a state of {0}")]
    NotAState(&'static str),
    #[error("no axiom with id {0} (expected 1..=3)")]
    UnknownAxiom(u8),
    #[error("sampled world is not a successor")]
    NotASuccessor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AtomExtensions {
    pub p: UpSet,
    pub q: UpSet,
    pub r: UpSet,
    pub s: bool,
}

impl SymbolicModel {
    pub const M1: SymbolicModel = SymbolicModel { side: Side::M1 };
    pub const M2: SymbolicModel = SymbolicModel { side: Side::M2 };

    pub fn new(side: Side) -> Self {
        SymbolicModel { side }
    }

    pub fn contains(&self, w: &World) -> bool {
        match self.side {
            Side::M1 => w.in_w1(),
            Side::M2 => w.in_w2(),
        }
    }

    pub fn base(&self) -> &'static World {
        match self.side {
            Side::M1 => base_v(),
            Side::M2 => base_u(),
        }
    }

    /// `P ↦ w₁ ∪ w₂`, `Q ↦ w₁`, `R ↦ γ⁻¹(w₁)`, `s ↦ w ∈ U`.
    pub fn atom_extensions(&self, w: &World) -> Result<AtomExtensions, SemanticsError> {
        if !self.contains(w) {
            return Err(SemanticsError::NotAState(self.side.name()));
        }
        Ok(AtomExtensions {
            p: w.a().union(w.b()),
            q: w.a().clone(),
            r: w.a().gamma_preimage(),
            s: w.in_u(),
        })
    }
}

/// `⊴`-successors of a state of `m2`, always including the world itself.
pub fn sample_successors(w: &World, seed: u64, count: usize) -> Vec<World> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![w.clone()];
    while out.len() < count.max(1) {
        out.push(random_successor(w, &mut rng, 4));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fact {
    pub name: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub axiom: u8,
    pub facts: Vec<Fact>,
    /// Named witnesses produced along the way.
    pub witnesses: Vec<(String, u64)>,
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn pass(&self) -> bool {
        self.facts.iter().all(|f| f.holds)
    }

    fn fact(&mut self, name: impl Into<String>, holds: bool) {
        self.facts.push(Fact { name: name.into(), holds });
    }

    pub fn failures(&self) -> impl Iterator<Item = &Fact> {
        self.facts.iter().filter(|f| !f.holds)
    }
}

/// Witness for `¬∀x R(x)` at a state: some `n` with `γ(n) ∉ w₁`, taken as
/// the least `γ`-preimage of the least element of `w₂` (of `𝐯₂` at `𝐮`).
pub fn e2_witness(w: &World) -> Option<u64> {
    let source = if w.b().is_empty() { base_v().b() } else { w.b() };
    let m = source.least()?;
    UpSet::singleton(m).gamma_preimage().least()
}

/// Checks the certificate for axiom `axiom` (1..=3) at `w ∈ W₂` against the
/// given successors (each must satisfy `w ⊴ w'`; `w` itself is added).
pub fn cert_lsat(w: &World, axiom: u8, successors: &[World]) -> Result<Certificate, SemanticsError> {
    let m2 = SymbolicModel::M2;
    if !m2.contains(w) {
        return Err(SemanticsError::NotAState("m2"));
    }
    if !(1..=3).contains(&axiom) {
        return Err(SemanticsError::UnknownAxiom(axiom));
    }
    let mut states = vec![w.clone()];
    for s in successors {
        if !w.leq(s) || !m2.contains(s) {
            return Err(SemanticsError::NotASuccessor);
        }
        if s != w {
            states.push(s.clone());
        }
    }
    let mut cert = Certificate { axiom, facts: Vec::new(), witnesses: Vec::new(), notes: Vec::new() };
    let gamma_image = UpSet::naturals().gamma_image();
    match axiom {
        1 => {
            cert.fact("γ(ℕ) ∩ (3ℕ+2) = ∅", gamma_image.is_disjoint(three_n_plus_two()));
            for (i, st) in states.iter().enumerate() {
                let ext = m2.atom_extensions(st)?;
                // y = γ(x) witnesses the existential wherever s holds
                if ext.s {
                    cert.fact(format!("state {i}: γ(ℕ) ⊆ P-extension"), gamma_image.is_subset(&ext.p));
                }
                cert.fact(format!("state {i}: γ⁻¹(Q-extension) = R-extension"), ext.q.gamma_preimage() == ext.r);
            }
            if !w.in_u() {
                cert.notes.push("s fails at this state; the axiom is checked at its U-successors".into());
            }
        }
        2 => {
            for (i, st) in states.iter().enumerate() {
                match e2_witness(st) {
                    Some(n) => {
                        cert.witnesses.push((format!("state {i}"), n));
                        cert.fact(format!("state {i}: γ({n}) = {} ∉ first component", gamma(n)), !st.a().member(gamma(n)));
                        let r = m2.atom_extensions(st)?.r;
                        cert.fact(format!("state {i}: {n} ∉ R-extension"), !r.member(n));
                    }
                    None => cert.fact(format!("state {i}: witness exists"), false),
                }
            }
            if let Some(n) = e2_witness(w) {
                let shared = states.iter().all(|st| !st.a().member(gamma(n)));
                if !shared {
                    cert.notes.push(format!("the witness {n} chosen at the root does not serve every successor"));
                }
            }
        }
        _ => {
            for (i, st) in states.iter().enumerate() {
                let ext = m2.atom_extensions(st)?;
                if ext.s {
                    cert.fact(format!("state {i}: s holds"), true);
                } else {
                    cert.fact(format!("state {i}: P-extension ⊆ Q-extension"), ext.p.is_subset(&ext.q));
                }
            }
        }
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worlds::{random_u_world, u_world_from_third};

    fn res(r: u64, m: u64) -> UpSet {
        UpSet::from_residue(r, m).unwrap()
    }

    #[test]
    fn extensions_at_base_points() {
        let e = SymbolicModel::M2.atom_extensions(base_u()).unwrap();
        assert_eq!(e.p, *base_v().a());
        assert_eq!(e.q, *base_v().a());
        assert!(!e.s);
        let e = SymbolicModel::M1.atom_extensions(base_v()).unwrap();
        assert!(e.s);
        assert!(e.r.member(0) && !e.r.member(2));
        assert!(SymbolicModel::M1.atom_extensions(base_u()).is_err());
    }

    #[test]
    fn e3_at_u() {
        let c = cert_lsat(base_u(), 3, &[]).unwrap();
        assert!(c.pass());
        assert_eq!(c.facts[0].name, "state 0: P-extension ⊆ Q-extension");
    }

    #[test]
    fn e2_witness_at_v_is_two() {
        assert_eq!(e2_witness(base_v()), Some(2));
        assert_eq!(e2_witness(base_u()), Some(2));
        let c = cert_lsat(base_v(), 2, &[]).unwrap();
        assert!(c.pass());
        assert_eq!(c.witnesses, vec![("state 0".to_string(), 2)]);
    }

    #[test]
    fn root_witness_can_be_absorbed_by_a_successor() {
        let succ = u_world_from_third(res(2, 3).without(2)).unwrap();
        assert!(succ.a().member(7));
        let c = cert_lsat(base_v(), 2, &[succ]).unwrap();
        assert!(c.pass());
        assert_eq!(c.notes.len(), 1);
    }

    #[test]
    fn e1_identity_on_sampled_worlds() {
        for seed in 0..20 {
            let w = random_u_world(seed, 5);
            let c = cert_lsat(&w, 1, &sample_successors(&w, seed, 5)).unwrap();
            assert!(c.pass(), "{:?}", c.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn non_successors_are_rejected() {
        assert_eq!(cert_lsat(base_v(), 1, &[base_u().clone()]), Err(SemanticsError::NotASuccessor));
        assert_eq!(cert_lsat(base_v(), 4, &[]), Err(SemanticsError::UnknownAxiom(4)));
    }
}
