//! Finite constant-domain Kripke models as bitmasks.
//!
//! Worlds and domain elements are indices below 8. A set of worlds is a `u8`
//! mask; each atom `P(e)` is stored as the mask of worlds forcing it.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::formulas::Pred;
use crate::text::{Cursor, SyntaxError};

pub const MAX_WORLDS: usize = 8;
pub const MAX_DOM: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("world count must be in 1..={MAX_WORLDS}, got {0}")]
    WorldCount(usize),
    #[error("domain size must be in 1..={MAX_DOM}, got {0}")]
    DomainSize(usize),
    #[error("world {0} out of range")]
    WorldRange(usize),
    #[error("element {0} out of range")]
    ElementRange(usize),
    #[error("order is not transitive: {0} ≤ {1} ≤ {2} but not {0} ≤ {2}")]
    NotTransitive(usize, usize, usize),
    #[error("{pred}({element}) holds at world {from} but not at its successor {to}")]
    NotPersistent { pred: String, element: usize, from: usize, to: usize },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

/// A finite preorder; `up[w]` is the mask of worlds `≥ w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Frame {
    worlds: u8,
    up: [u8; MAX_WORLDS],
}

impl Frame {
    /// Reflexive pairs are added; transitivity is checked.
    pub fn new(worlds: usize, pairs: &[(usize, usize)]) -> Result<Self, ModelError> {
        if worlds == 0 || worlds > MAX_WORLDS {
            return Err(ModelError::WorldCount(worlds));
        }
        let mut up = [0u8; MAX_WORLDS];
        for (w, m) in up.iter_mut().enumerate().take(worlds) {
            *m = 1 << w;
        }
        for &(i, j) in pairs {
            for x in [i, j] {
                if x >= worlds {
                    return Err(ModelError::WorldRange(x));
                }
            }
            up[i] |= 1 << j;
        }
        for i in 0..worlds {
            for j in 0..worlds {
                if up[i] & (1 << j) == 0 {
                    continue;
                }
                for k in 0..worlds {
                    if up[j] & (1 << k) != 0 && up[i] & (1 << k) == 0 {
                        return Err(ModelError::NotTransitive(i, j, k));
                    }
                }
            }
        }
        Ok(Frame { worlds: worlds as u8, up })
    }

    /// Every labelled preorder on `worlds` points.
    pub fn all(worlds: usize) -> Vec<Frame> {
        let n = worlds;
        let off: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
        (0u32..1 << off.len())
            .filter_map(|bits| {
                let pairs: Vec<_> = off.iter().enumerate().filter(|(b, _)| bits >> b & 1 == 1).map(|(_, p)| *p).collect();
                Frame::new(n, &pairs).ok()
            })
            .collect()
    }

    pub fn worlds(&self) -> usize {
        self.worlds as usize
    }

    pub fn all_mask(&self) -> u8 {
        ((1u16 << self.worlds) - 1) as u8
    }

    pub fn up(&self, w: usize) -> u8 {
        self.up[w]
    }

    pub fn leq(&self, v: usize, w: usize) -> bool {
        self.up[v] & (1 << w) != 0
    }

    pub fn is_upset(&self, x: u8) -> bool {
        (0..self.worlds()).all(|w| x & (1 << w) == 0 || self.up[w] & !x == 0)
    }

    /// All upward-closed world sets, ascending as integers.
    pub fn upsets(&self) -> Vec<u8> {
        (0..=self.all_mask()).filter(|&x| self.is_upset(x)).collect()
    }

    /// `{w | every successor of w is in x}`.
    #[inline]
    pub fn box_of(&self, x: u8) -> u8 {
        let mut out = 0;
        for w in 0..self.worlds as usize {
            if self.up[w] & !x == 0 {
                out |= 1 << w;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FiniteCDModel {
    frame: Frame,
    dom: u8,
    /// `atoms[pred][e]`: worlds where `pred(e)` holds.
    atoms: [[u8; MAX_DOM]; 3],
    s: u8,
}

fn pred_index(p: Pred) -> usize {
    match p {
        Pred::P => 0,
        Pred::Q => 1,
        Pred::R => 2,
    }
}

impl FiniteCDModel {
    /// Valuations as per-element world masks; each must be upward closed.
    pub fn from_masks(frame: Frame, dom: usize, p: &[u8], q: &[u8], r: &[u8], s: u8) -> Result<Self, ModelError> {
        if dom == 0 || dom > MAX_DOM {
            return Err(ModelError::DomainSize(dom));
        }
        let mut atoms = [[0u8; MAX_DOM]; 3];
        for (k, masks) in [p, q, r].into_iter().enumerate() {
            for e in 0..dom {
                atoms[k][e] = masks.get(e).copied().unwrap_or(0) & frame.all_mask();
            }
        }
        let m = FiniteCDModel { frame, dom: dom as u8, atoms, s: s & frame.all_mask() };
        m.check_persistence()?;
        Ok(m)
    }

    /// Unchecked constructor for enumeration, where persistence holds by
    /// construction.
    pub(crate) fn from_parts(frame: Frame, dom: usize, atoms: [[u8; MAX_DOM]; 3], s: u8) -> Self {
        FiniteCDModel { frame, dom: dom as u8, atoms, s }
    }

    fn check_persistence(&self) -> Result<(), ModelError> {
        let f = &self.frame;
        for (k, name) in ["P", "Q", "R", "s"].iter().enumerate() {
            let elems = if k == 3 { 1 } else { self.dom() };
            for e in 0..elems {
                let x = if k == 3 { self.s } else { self.atoms[k][e] };
                for from in 0..f.worlds() {
                    if x & (1 << from) == 0 {
                        continue;
                    }
                    if let Some(to) = (0..f.worlds()).find(|&to| f.leq(from, to) && x & (1 << to) == 0) {
                        return Err(ModelError::NotPersistent { pred: name.to_string(), element: e, from, to });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn worlds(&self) -> usize {
        self.frame.worlds()
    }

    pub fn dom(&self) -> usize {
        self.dom as usize
    }

    /// Worlds where `pred(e)` holds.
    #[inline]
    pub fn atom(&self, p: Pred, e: usize) -> u8 {
        self.atoms[pred_index(p)][e]
    }

    pub fn s_mask(&self) -> u8 {
        self.s
    }

    /// Elements `e` with `pred(e)` at `w`, as a domain mask.
    pub fn extension(&self, p: Pred, w: usize) -> u8 {
        (0..self.dom()).filter(|&e| self.atom(p, e) & (1 << w) != 0).fold(0, |m, e| m | 1 << e)
    }

    pub fn with_s(&self, s: u8) -> Result<Self, ModelError> {
        let m = FiniteCDModel { s: s & self.frame.all_mask(), ..*self };
        m.check_persistence()?;
        Ok(m)
    }
}

impl fmt::Display for FiniteCDModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.worlds();
        let pairs: Vec<String> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && self.frame.leq(i, j))
            .map(|(i, j)| format!("({i},{j})"))
            .collect();
        write!(f, "model {{ worlds={n}; order={{{}}}; dom={}", pairs.join(","), self.dom)?;
        let set = |mask: u8, len: usize| {
            (0..len).filter(|i| mask & (1 << i) != 0).map(|i| i.to_string()).collect::<Vec<_>>().join(",")
        };
        for p in Pred::ALL {
            for w in 0..n {
                let ext = self.extension(p, w);
                if ext != 0 {
                    write!(f, "; {p:?}[{w}]={{{}}}", set(ext, self.dom()))?;
                }
            }
        }
        write!(f, "; s={{{}}} }}", set(self.s, n))
    }
}

/// `model { worlds=n; order={(i,j),...}; dom=k; P[i]={...}; Q[i]={...}; R[i]={...}; s={i,...} }`.
/// Missing valuation entries are empty; reflexive order pairs are implied.
pub fn parse_model(src: &str) -> Result<FiniteCDModel, ModelError> {
    let mut cur = Cursor::new(src)?;
    let m = parse_model_from(&mut cur)?;
    cur.expect_end()?;
    Ok(m)
}

pub(crate) fn parse_model_from(cur: &mut Cursor) -> Result<FiniteCDModel, ModelError> {
    cur.expect_ident("model")?;
    cur.expect_punct("{")?;
    let mut worlds = None;
    let mut dom = None;
    let mut pairs = Vec::new();
    let mut per_world: Vec<(usize, usize, Vec<u64>, usize)> = Vec::new();
    let mut s_worlds = Vec::new();
    loop {
        if cur.eat_punct("}") {
            break;
        }
        let pos = cur.pos();
        let key = cur.ident()?;
        match key.as_str() {
            "worlds" | "dom" => {
                cur.expect_punct("=")?;
                let n = cur.number()? as usize;
                if key == "worlds" {
                    worlds = Some(n);
                } else {
                    dom = Some(n);
                }
            }
            "order" => {
                cur.expect_punct("=")?;
                cur.expect_punct("{")?;
                while !cur.eat_punct("}") {
                    cur.expect_punct("(")?;
                    let i = cur.number()? as usize;
                    cur.expect_punct(",")?;
                    let j = cur.number()? as usize;
                    cur.expect_punct(")")?;
                    pairs.push((i, j));
                    if !cur.eat_punct(",") {
                        cur.expect_punct("}")?;
                        break;
                    }
                }
            }
            "P" | "Q" | "R" => {
                cur.expect_punct("[")?;
                let w = cur.number()? as usize;
                cur.expect_punct("]")?;
                cur.expect_punct("=")?;
                let k = ["P", "Q", "R"].iter().position(|p| *p == key).expect("matched");
                per_world.push((k, w, cur.number_set()?, pos));
            }
            "s" => {
                cur.expect_punct("=")?;
                s_worlds = cur.number_set()?;
            }
            other => return Err(SyntaxError::new(pos, format!("unknown model field `{other}`")).into()),
        }
        if !cur.eat_punct(";") {
            cur.expect_punct("}")?;
            break;
        }
    }
    let worlds = worlds.ok_or_else(|| cur.error("missing `worlds`"))?;
    let dom = dom.ok_or_else(|| cur.error("missing `dom`"))?;
    let frame = Frame::new(worlds, &pairs)?;
    if dom == 0 || dom > MAX_DOM {
        return Err(ModelError::DomainSize(dom));
    }
    let mut masks = [[0u8; MAX_DOM]; 3];
    for (k, w, elems, _) in per_world {
        if w >= worlds {
            return Err(ModelError::WorldRange(w));
        }
        for e in elems {
            let e = e as usize;
            if e >= dom {
                return Err(ModelError::ElementRange(e));
            }
            masks[k][e] |= 1 << w;
        }
    }
    let mut s = 0u8;
    for w in s_worlds {
        let w = w as usize;
        if w >= worlds {
            return Err(ModelError::WorldRange(w));
        }
        s |= 1 << w;
    }
    FiniteCDModel::from_masks(frame, dom, &masks[0][..dom], &masks[1][..dom], &masks[2][..dom], s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labelled_preorder_counts() {
        let counts: Vec<usize> = (1..=4).map(|n| Frame::all(n).len()).collect();
        assert_eq!(counts, vec![1, 4, 29, 355]);
    }

    #[test]
    fn upsets_of_a_chain() {
        let f = Frame::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(f.upsets(), vec![0b000, 0b100, 0b110, 0b111]);
        assert_eq!(f.box_of(0b110), 0b110);
        assert_eq!(f.box_of(0b101), 0b100);
    }

    #[test]
    fn transitivity_is_checked() {
        assert_eq!(Frame::new(3, &[(0, 1), (1, 2)]), Err(ModelError::NotTransitive(0, 1, 2)));
    }

    #[test]
    fn persistence_is_checked() {
        let f = Frame::new(2, &[(0, 1)]).unwrap();
        let e = FiniteCDModel::from_masks(f, 1, &[0b01], &[0], &[0], 0).unwrap_err();
        assert!(matches!(e, ModelError::NotPersistent { from: 0, to: 1, .. }));
        assert!(FiniteCDModel::from_masks(f, 1, &[0b10], &[0], &[0], 0b11).is_ok());
    }

    #[test]
    fn text_format_round_trips() {
        let src = "model { worlds=2; order={(0,1)}; dom=2; P[0]={0}; P[1]={0,1}; Q[1]={1}; s={1} }";
        let m = parse_model(src).unwrap();
        assert_eq!(m.atom(Pred::P, 0), 0b11);
        assert_eq!(m.atom(Pred::P, 1), 0b10);
        assert_eq!(m.extension(Pred::Q, 1), 0b10);
        assert_eq!(parse_model(&m.to_string()).unwrap(), m);
        assert!(parse_model("model { worlds=1; dom=1; P[0]={3} }").is_err());
        assert!(parse_model("model { worlds=1; dom=1; T[0]={0} }").is_err());
    }
}
