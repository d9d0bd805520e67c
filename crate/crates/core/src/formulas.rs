//! First-order intuitionistic formulas over unary `P`, `Q`, `R` and the
//! proposition `s`: AST, parser, printer, the theory `T`, and exhaustive
//! bounded enumeration.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::text::{Cursor, SyntaxError, Tok};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Pred {
    P,
    Q,
    R,
}

impl Pred {
    pub const ALL: [Pred; 3] = [Pred::P, Pred::Q, Pred::R];

    fn name(self) -> &'static str {
        match self {
            Pred::P => "P",
            Pred::Q => "Q",
            Pred::R => "R",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum Formula {
    Atom(Pred, String),
    S,
    Bottom,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn atom(p: Pred, var: &str) -> Formula {
        Formula::Atom(p, var.to_string())
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn not(a: Formula) -> Formula {
        Formula::imp(a, Formula::Bottom)
    }

    /// Conjunction of both implications.
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::imp(a.clone(), b.clone()), Formula::imp(b, a))
    }

    pub fn forall(var: &str, body: Formula) -> Formula {
        Formula::Forall(var.to_string(), Box::new(body))
    }

    pub fn exists(var: &str, body: Formula) -> Formula {
        Formula::Exists(var.to_string(), Box::new(body))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(_, v) => {
                if !bound.contains(&v.as_str()) {
                    out.insert(v.clone());
                }
            }
            Formula::S | Formula::Bottom => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                bound.push(v);
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn mentions_s(&self) -> bool {
        match self {
            Formula::S => true,
            Formula::Atom(..) | Formula::Bottom => false,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => a.mentions_s() || b.mentions_s(),
            Formula::Forall(_, a) | Formula::Exists(_, a) => a.mentions_s(),
        }
    }

    /// Atoms have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(..) | Formula::S | Formula::Bottom => 1,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => 1 + a.depth().max(b.depth()),
            Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.depth(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Imp(_, b) if **b == Formula::Bottom => 4,
            Formula::Imp(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Forall(..) | Formula::Exists(..) => 4,
            _ => 5,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Formula::Atom(p, v) => write!(f, "{}({v})", p.name()),
            Formula::S => write!(f, "s"),
            Formula::Bottom => write!(f, "_|_"),
            Formula::And(a, b) => {
                a.write_at(f, 3)?;
                write!(f, " & ")?;
                b.write_at(f, 4)
            }
            Formula::Or(a, b) => {
                a.write_at(f, 2)?;
                write!(f, " | ")?;
                b.write_at(f, 3)
            }
            Formula::Imp(a, b) if **b == Formula::Bottom => {
                write!(f, "~")?;
                a.write_at(f, 4)
            }
            Formula::Imp(a, b) => {
                a.write_at(f, 2)?;
                write!(f, " -> ")?;
                b.write_at(f, 1)
            }
            Formula::Forall(v, a) => {
                write!(f, "forall {v}. ")?;
                a.write_at(f, 4)
            }
            Formula::Exists(v, a) => {
                write!(f, "exists {v}. ")?;
                a.write_at(f, 4)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("unbound variable `{var}` at offset {pos}")]
    Unbound { var: String, pos: usize },
}

const RESERVED: &[&str] = &["P", "Q", "R", "s", "forall", "exists"];

struct Parser<'a> {
    cur: &'a mut Cursor,
    scope: Vec<String>,
    first_free: Option<(String, usize)>,
}

impl Parser<'_> {
    fn iff(&mut self) -> Result<Formula, SyntaxError> {
        let a = self.imp()?;
        if self.cur.eat_punct("<->") {
            let b = self.imp()?;
            return Ok(Formula::iff(a, b));
        }
        Ok(a)
    }

    fn imp(&mut self) -> Result<Formula, SyntaxError> {
        let a = self.or()?;
        if self.cur.eat_punct("->") {
            let b = self.imp()?;
            return Ok(Formula::imp(a, b));
        }
        Ok(a)
    }

    fn or(&mut self) -> Result<Formula, SyntaxError> {
        let mut acc = self.and()?;
        while self.cur.eat_punct("|") {
            acc = Formula::or(acc, self.and()?);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Formula, SyntaxError> {
        let mut acc = self.unary()?;
        while self.cur.eat_punct("&") {
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn variable(&mut self) -> Result<String, SyntaxError> {
        let pos = self.cur.pos();
        let name = self.cur.ident()?;
        if RESERVED.contains(&name.as_str()) {
            return Err(SyntaxError::new(pos, format!("`{name}` cannot be used as a variable")));
        }
        Ok(name)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        if self.cur.eat_punct("~") {
            return Ok(Formula::not(self.unary()?));
        }
        for (kw, is_all) in [("forall", true), ("exists", false)] {
            if self.cur.eat_ident(kw) {
                let v = self.variable()?;
                self.cur.expect_punct(".")?;
                self.scope.push(v.clone());
                let body = self.unary()?;
                self.scope.pop();
                let body = Box::new(body);
                return Ok(if is_all { Formula::Forall(v, body) } else { Formula::Exists(v, body) });
            }
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, SyntaxError> {
        if self.cur.eat_punct("(") {
            let f = self.iff()?;
            self.cur.expect_punct(")")?;
            return Ok(f);
        }
        if self.cur.eat_punct("_|_") {
            return Ok(Formula::Bottom);
        }
        if self.cur.eat_ident("s") {
            return Ok(Formula::S);
        }
        for p in Pred::ALL {
            if self.cur.eat_ident(p.name()) {
                self.cur.expect_punct("(")?;
                let pos = self.cur.pos();
                let v = self.variable()?;
                self.cur.expect_punct(")")?;
                if !self.scope.contains(&v) && self.first_free.is_none() {
                    self.first_free = Some((v.clone(), pos));
                }
                return Ok(Formula::Atom(p, v));
            }
        }
        let found = self.cur.peek().map_or("end of input".to_string(), Tok::to_string);
        Err(self.cur.error(format!("expected a formula, found {found}")))
    }
}

/// Parses a formula; free variables are allowed.
pub fn parse_formula(src: &str) -> Result<Formula, FormulaError> {
    Ok(parse_with_free(src)?.0)
}

/// Parses a formula that must be closed.
pub fn parse_sentence(src: &str) -> Result<Formula, FormulaError> {
    let (f, free) = parse_with_free(src)?;
    match free {
        Some((var, pos)) => Err(FormulaError::Unbound { var, pos }),
        None => Ok(f),
    }
}

fn parse_with_free(src: &str) -> Result<(Formula, Option<(String, usize)>), FormulaError> {
    let mut cur = Cursor::new(src)?;
    let mut p = Parser { cur: &mut cur, scope: Vec::new(), first_free: None };
    let f = p.iff()?;
    let free = p.first_free.take();
    cur.expect_end()?;
    Ok((f, free))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Theory {
    axioms: Vec<Formula>,
}

impl Theory {
    pub fn new(axioms: Vec<Formula>) -> Result<Self, FormulaError> {
        for a in &axioms {
            if let Some(var) = a.free_vars().into_iter().next() {
                return Err(FormulaError::Unbound { var, pos: 0 });
            }
        }
        Ok(Theory { axioms })
    }

    pub fn axioms(&self) -> &[Formula] {
        &self.axioms
    }

    pub fn conjunction(&self) -> Formula {
        let mut it = self.axioms.iter().cloned();
        let first = it.next().unwrap_or_else(|| Formula::not(Formula::Bottom));
        it.fold(first, Formula::and)
    }
}

pub const AXIOM_SOURCES: [&str; 3] = [
    "forall x. (s -> exists y. (P(y) & (Q(y) -> R(x))))",
    "~(forall x. R(x))",
    "forall x. (P(x) -> (Q(x) | s))",
];

pub fn theory_t() -> Theory {
    let axioms = AXIOM_SOURCES.iter().map(|s| parse_sentence(s).expect("axiom parses")).collect();
    Theory::new(axioms).expect("axioms are sentences")
}

/// Variable names used by enumeration, in pool order.
pub fn pool_var(i: usize) -> String {
    const NAMES: [&str; 4] = ["x", "y", "z", "w"];
    NAMES.get(i).map_or_else(|| format!("x{i}"), |s| s.to_string())
}

/// A node of the enumeration arena; children are earlier node ids and
/// variables are pool indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    Atom(Pred, u8),
    S,
    Bottom,
    And(u32, u32),
    Or(u32, u32),
    Imp(u32, u32),
    Forall(u8, u32),
    Exists(u8, u32),
}

/// Every formula up to a depth over a variable pool, shared as a DAG.
/// Node ids are ordered by depth; within a depth, by constructor then
/// children.
pub struct FormulaArena {
    nodes: Vec<Node>,
    layer_ends: Vec<usize>,
    vars: usize,
    free: Vec<u32>,
}

impl FormulaArena {
    pub fn build(max_depth: usize, max_vars: usize, include_s: bool) -> Self {
        assert!(max_vars <= 32, "variable pool too large");
        let mut nodes = Vec::new();
        let mut layer_ends = Vec::new();
        if max_depth >= 1 {
            nodes.push(Node::Bottom);
            if include_s {
                nodes.push(Node::S);
            }
            for v in 0..max_vars as u8 {
                for p in Pred::ALL {
                    nodes.push(Node::Atom(p, v));
                }
            }
            layer_ends.push(nodes.len());
        }
        // A new node at depth d has a child of depth exactly d − 1, i.e. an
        // id in older..prev.
        for d in 2..=max_depth {
            let prev = layer_ends[d - 2];
            let older = if d >= 3 { layer_ends[d - 3] } else { 0 };
            for ctor in 0..3 {
                for a in 0..prev {
                    for b in 0..prev {
                        if a < older && b < older {
                            continue;
                        }
                        let (a, b) = (a as u32, b as u32);
                        nodes.push(match ctor {
                            0 => Node::And(a, b),
                            1 => Node::Or(a, b),
                            _ => Node::Imp(a, b),
                        });
                    }
                }
            }
            for all in [true, false] {
                for v in 0..max_vars as u8 {
                    for a in older..prev {
                        let a = a as u32;
                        nodes.push(if all { Node::Forall(v, a) } else { Node::Exists(v, a) });
                    }
                }
            }
            layer_ends.push(nodes.len());
        }
        let mut free = Vec::with_capacity(nodes.len());
        for n in &nodes {
            let mask = match *n {
                Node::Atom(_, v) => 1u32 << v,
                Node::S | Node::Bottom => 0,
                Node::And(a, b) | Node::Or(a, b) | Node::Imp(a, b) => free[a as usize] | free[b as usize],
                Node::Forall(v, a) | Node::Exists(v, a) => free[a as usize] & !(1u32 << v),
            };
            free.push(mask);
        }
        FormulaArena { nodes, layer_ends, vars: max_vars, free }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    /// Number of formulas of depth at most `d`.
    pub fn count_up_to(&self, d: usize) -> usize {
        if d == 0 {
            0
        } else {
            self.layer_ends[d.min(self.layer_ends.len()) - 1]
        }
    }

    /// Bit `i` set when pool variable `i` occurs free in node `id`.
    pub fn free_mask(&self, id: usize) -> u32 {
        self.free[id]
    }

    pub fn formula(&self, id: usize) -> Formula {
        match self.nodes[id] {
            Node::Atom(p, v) => Formula::Atom(p, pool_var(v as usize)),
            Node::S => Formula::S,
            Node::Bottom => Formula::Bottom,
            Node::And(a, b) => Formula::and(self.formula(a as usize), self.formula(b as usize)),
            Node::Or(a, b) => Formula::or(self.formula(a as usize), self.formula(b as usize)),
            Node::Imp(a, b) => Formula::imp(self.formula(a as usize), self.formula(b as usize)),
            Node::Forall(v, a) => Formula::forall(&pool_var(v as usize), self.formula(a as usize)),
            Node::Exists(v, a) => Formula::exists(&pool_var(v as usize), self.formula(a as usize)),
        }
    }
}

/// All formulas of depth at most `max_depth` over the first `max_vars` pool
/// variables, each exactly once, in arena order.
pub fn enumerate_formulas(max_depth: usize, max_vars: usize, include_s: bool) -> impl Iterator<Item = Formula> {
    let arena = FormulaArena::build(max_depth, max_vars, include_s);
    (0..arena.len()).map(move |i| arena.formula(i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn parses_axiom_one() {
        let f = parse_sentence(AXIOM_SOURCES[0]).unwrap();
        let expected = Formula::forall(
            "x",
            Formula::imp(
                Formula::S,
                Formula::exists(
                    "y",
                    Formula::and(
                        Formula::atom(Pred::P, "y"),
                        Formula::imp(Formula::atom(Pred::Q, "y"), Formula::atom(Pred::R, "x")),
                    ),
                ),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn negation_is_sugar() {
        let f = parse_sentence("~(forall x. R(x))").unwrap();
        assert_eq!(f, Formula::imp(Formula::forall("x", Formula::atom(Pred::R, "x")), Formula::Bottom));
        assert_eq!(theory_t().axioms()[1], f);
    }

    #[test]
    fn free_variables() {
        let f = parse_formula("P(x)").unwrap();
        assert_eq!(f, Formula::atom(Pred::P, "x"));
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec!["x".to_string()]);
        let g = parse_formula("forall x. P(x) & Q(y)").unwrap();
        assert_eq!(g.free_vars().len(), 1);
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse_formula("P(x) & Q(x) | R(x) -> s -> _|_").unwrap();
        let pq = Formula::and(Formula::atom(Pred::P, "x"), Formula::atom(Pred::Q, "x"));
        let lhs = Formula::or(pq, Formula::atom(Pred::R, "x"));
        let rhs = Formula::imp(Formula::S, Formula::Bottom);
        assert_eq!(f, Formula::imp(lhs, rhs));
        // quantifier bodies stop at binary connectives
        let g = parse_formula("forall x. P(x) & Q(x)").unwrap();
        assert!(matches!(g, Formula::And(..)));
    }

    #[test]
    fn iff_expands() {
        let f = parse_formula("P(x) <-> Q(x)").unwrap();
        let (p, q) = (Formula::atom(Pred::P, "x"), Formula::atom(Pred::Q, "x"));
        assert_eq!(f, Formula::iff(p, q));
    }

    #[test]
    fn errors() {
        let e = parse_sentence("forall x. P(y)").unwrap_err();
        assert_eq!(e, FormulaError::Unbound { var: "y".into(), pos: 12 });
        let e = parse_formula("P(x) &").unwrap_err();
        assert!(matches!(e, FormulaError::Syntax(SyntaxError { pos: 6, .. })));
        assert!(parse_formula("forall s. P(s)").is_err());
        assert!(parse_formula("P(x) <-> Q(x) <-> R(x)").is_err());
    }

    #[test]
    fn theory_shape() {
        let t = theory_t();
        assert_eq!(t.axioms().len(), 3);
        assert!(t.axioms().iter().all(Formula::is_sentence));
        assert_eq!(t.axioms()[2].to_string(), "forall x. (P(x) -> Q(x) | s)");
    }

    #[test]
    fn printer_examples() {
        let f = parse_formula("~~P(x) & (Q(x) & R(x))").unwrap();
        assert_eq!(f.to_string(), "~~P(x) & (Q(x) & R(x))");
        let g = parse_formula("(P(x) -> Q(x)) -> R(x)").unwrap();
        assert_eq!(g.to_string(), "(P(x) -> Q(x)) -> R(x)");
    }

    fn recurrence(depth: usize, vars: usize, s: bool) -> usize {
        let atoms = 3 * vars + 1 + s as usize;
        (1..depth).fold(atoms, |n, _| atoms + 3 * n * n + 2 * vars * n)
    }

    /// Independent generator: recursive construction deduplicated by hashing.
    fn generate(depth: usize, vars: usize, s: bool) -> HashSet<Formula> {
        let mut atoms: HashSet<Formula> = HashSet::new();
        atoms.insert(Formula::Bottom);
        if s {
            atoms.insert(Formula::S);
        }
        for v in 0..vars {
            for p in Pred::ALL {
                atoms.insert(Formula::atom(p, &pool_var(v)));
            }
        }
        let mut level = atoms.clone();
        for _ in 1..depth {
            let mut next = atoms.clone();
            for a in &level {
                for b in &level {
                    next.insert(Formula::and(a.clone(), b.clone()));
                    next.insert(Formula::or(a.clone(), b.clone()));
                    next.insert(Formula::imp(a.clone(), b.clone()));
                }
                for v in 0..vars {
                    next.insert(Formula::forall(&pool_var(v), a.clone()));
                    next.insert(Formula::exists(&pool_var(v), a.clone()));
                }
            }
            level = next;
        }
        level
    }

    #[test]
    fn enumeration_counts_match_recurrence_and_independent_generator() {
        for (d, v, s) in [(1, 1, false), (2, 1, false), (3, 1, false), (2, 2, true), (2, 2, false), (3, 2, false)] {
            let arena = FormulaArena::build(d, v, s);
            assert_eq!(arena.len(), recurrence(d, v, s), "depth {d} vars {v} s {s}");
            if arena.len() < 20_000 {
                let listed: Vec<Formula> = (0..arena.len()).map(|i| arena.formula(i)).collect();
                let set: HashSet<Formula> = listed.iter().cloned().collect();
                assert_eq!(set.len(), listed.len(), "duplicates");
                assert_eq!(set, generate(d, v, s));
            }
        }
        assert_eq!(recurrence(3, 1, false), 10_924);
    }

    #[test]
    fn enumeration_examples() {
        let atoms: Vec<Formula> = enumerate_formulas(1, 1, false).collect();
        assert_eq!(atoms.len(), 4);
        assert!(atoms.contains(&Formula::atom(Pred::P, "x")) && atoms.contains(&Formula::Bottom));
        let target = Formula::imp(Formula::atom(Pred::Q, "x"), Formula::atom(Pred::R, "x"));
        assert!(enumerate_formulas(2, 1, false).any(|f| f == target));
        assert!(!enumerate_formulas(3, 2, false).any(|f| f.mentions_s()));
    }

    #[test]
    fn arena_free_masks_agree_with_ast() {
        let arena = FormulaArena::build(3, 2, true);
        for id in (0..arena.len()).step_by(97) {
            let f = arena.formula(id);
            let mask = f.free_vars().iter().fold(0u32, |m, v| m | 1 << ["x", "y"].iter().position(|n| n == v).unwrap());
            assert_eq!(arena.free_mask(id), mask);
            assert!(f.depth() <= 3);
        }
    }

    #[test]
    fn print_parse_round_trip_on_enumeration() {
        for f in enumerate_formulas(3, 1, true) {
            let printed = f.to_string();
            assert_eq!(parse_formula(&printed).unwrap(), f, "{printed}");
        }
    }
}
