//! Forcing on finite models.
//!
//! A formula evaluates to the mask of worlds forcing it. Local connectives
//! are bitwise; implication and `∀` take the box `{w | ↑w ⊆ X}`.

use thiserror::Error;

use super::finite::FiniteCDModel;
use crate::formulas::{Formula, FormulaArena, Node, Pred};

const MAX_SLOTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is not assigned")]
    Unbound(String),
    #[error("element {0} is outside the domain")]
    ElementRange(usize),
    #[error("world {0} is outside the model")]
    WorldRange(usize),
    #[error("formula needs more than {MAX_SLOTS} variable slots")]
    TooManyVariables,
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Atom(Pred, u8),
    S,
    Bottom,
    And(u32, u32),
    Or(u32, u32),
    Imp(u32, u32),
    Forall(u8, u32),
    Exists(u8, u32),
}

/// A formula with variables resolved to slots. The first slots hold the
/// parameters, in the order given at compile time.
#[derive(Debug, Clone)]
pub struct Compiled {
    ops: Vec<Op>,
    params: usize,
}

impl Compiled {
    pub fn new(f: &Formula, params: &[&str]) -> Result<Self, EvalError> {
        if params.len() > MAX_SLOTS {
            return Err(EvalError::TooManyVariables);
        }
        let mut scope: Vec<String> = params.iter().map(|s| s.to_string()).collect();
        let mut ops = Vec::new();
        compile(f, &mut scope, &mut ops)?;
        Ok(Compiled { ops, params: params.len() })
    }

    pub fn params(&self) -> usize {
        self.params
    }

    /// Number of compiled nodes.
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Worlds forcing the formula under the parameter assignment `args`.
    pub fn forcing_set(&self, m: &FiniteCDModel, args: &[u8]) -> u8 {
        let mut env = [0u8; MAX_SLOTS];
        env[..args.len()].copy_from_slice(args);
        self.eval(m, self.ops.len() - 1, &mut env)
    }

    fn eval(&self, m: &FiniteCDModel, id: usize, env: &mut [u8; MAX_SLOTS]) -> u8 {
        let frame = m.frame();
        match self.ops[id] {
            Op::Atom(p, slot) => m.atom(p, env[slot as usize] as usize),
            Op::S => m.s_mask(),
            Op::Bottom => 0,
            Op::And(a, b) => {
                let x = self.eval(m, a as usize, env);
                if x == 0 {
                    return 0;
                }
                x & self.eval(m, b as usize, env)
            }
            Op::Or(a, b) => self.eval(m, a as usize, env) | self.eval(m, b as usize, env),
            Op::Imp(a, b) => {
                let x = self.eval(m, a as usize, env);
                let y = self.eval(m, b as usize, env);
                frame.box_of(!x | y)
            }
            Op::Forall(slot, a) => {
                let mut acc = frame.all_mask();
                for e in 0..m.dom() as u8 {
                    env[slot as usize] = e;
                    acc &= self.eval(m, a as usize, env);
                    if acc == 0 {
                        break;
                    }
                }
                frame.box_of(acc)
            }
            Op::Exists(slot, a) => {
                let mut acc = 0;
                for e in 0..m.dom() as u8 {
                    env[slot as usize] = e;
                    acc |= self.eval(m, a as usize, env);
                }
                acc
            }
        }
    }
}

fn compile(f: &Formula, scope: &mut Vec<String>, ops: &mut Vec<Op>) -> Result<u32, EvalError> {
    let lookup = |scope: &Vec<String>, v: &str| {
        scope.iter().rposition(|s| s == v).map(|i| i as u8).ok_or_else(|| EvalError::Unbound(v.to_string()))
    };
    let op = match f {
        Formula::Atom(p, v) => Op::Atom(*p, lookup(scope, v)?),
        Formula::S => Op::S,
        Formula::Bottom => Op::Bottom,
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            let x = compile(a, scope, ops)?;
            let y = compile(b, scope, ops)?;
            match f {
                Formula::And(..) => Op::And(x, y),
                Formula::Or(..) => Op::Or(x, y),
                _ => Op::Imp(x, y),
            }
        }
        Formula::Forall(v, a) | Formula::Exists(v, a) => {
            if scope.len() >= MAX_SLOTS {
                return Err(EvalError::TooManyVariables);
            }
            let slot = scope.len() as u8;
            scope.push(v.clone());
            let x = compile(a, scope, ops);
            scope.pop();
            let x = x?;
            if matches!(f, Formula::Forall(..)) {
                Op::Forall(slot, x)
            } else {
                Op::Exists(slot, x)
            }
        }
    };
    ops.push(op);
    Ok((ops.len() - 1) as u32)
}

/// Whether `w` forces `f` under `env` (variable name, element).
pub fn forces(m: &FiniteCDModel, w: usize, f: &Formula, env: &[(&str, u8)]) -> Result<bool, EvalError> {
    if w >= m.worlds() {
        return Err(EvalError::WorldRange(w));
    }
    Ok(forcing_set(m, f, env)? & (1 << w) != 0)
}

pub fn forcing_set(m: &FiniteCDModel, f: &Formula, env: &[(&str, u8)]) -> Result<u8, EvalError> {
    for &(_, e) in env {
        if e as usize >= m.dom() {
            return Err(EvalError::ElementRange(e as usize));
        }
    }
    let names: Vec<&str> = env.iter().map(|(n, _)| *n).collect();
    let args: Vec<u8> = env.iter().map(|(_, e)| *e).collect();
    Ok(Compiled::new(f, &names)?.forcing_set(m, &args))
}

/// Forcing sets of every arena node under every assignment of the pool
/// variables. Assignment `(a₀, a₁, …)` has index `Σ aᵢ·domⁱ`.
pub struct ArenaTable {
    envs: usize,
    table: Vec<u8>,
}

impl ArenaTable {
    pub fn new(arena: &FormulaArena, m: &FiniteCDModel) -> Self {
        let dom = m.dom();
        let vars = arena.vars();
        let envs = dom.pow(vars as u32);
        let frame = m.frame();
        let mut table = vec![0u8; arena.len() * envs];
        let mut digits = [0usize; 32];
        let stride = |v: usize| dom.pow(v as u32);
        for (id, node) in arena.nodes().iter().enumerate() {
            for env in 0..envs {
                let mut rest = env;
                for d in digits.iter_mut().take(vars) {
                    *d = rest % dom;
                    rest /= dom;
                }
                let at = |child: u32, env: usize| table[child as usize * envs + env];
                let value = match *node {
                    Node::Atom(p, v) => m.atom(p, digits[v as usize]),
                    Node::S => m.s_mask(),
                    Node::Bottom => 0,
                    Node::And(a, b) => at(a, env) & at(b, env),
                    Node::Or(a, b) => at(a, env) | at(b, env),
                    Node::Imp(a, b) => frame.box_of(!at(a, env) | at(b, env)),
                    Node::Forall(v, a) | Node::Exists(v, a) => {
                        let base = env - digits[v as usize] * stride(v as usize);
                        let forall = matches!(node, Node::Forall(..));
                        let mut acc = if forall { frame.all_mask() } else { 0 };
                        for e in 0..dom {
                            let x = at(a, base + e * stride(v as usize));
                            acc = if forall { acc & x } else { acc | x };
                        }
                        if forall {
                            frame.box_of(acc)
                        } else {
                            acc
                        }
                    }
                };
                table[id * envs + env] = value;
            }
        }
        ArenaTable { envs, table }
    }

    pub fn envs(&self) -> usize {
        self.envs
    }

    pub fn get(&self, id: usize, env: usize) -> u8 {
        self.table[id * self.envs + env]
    }
}

#[cfg(test)]
mod tests {
    use super::super::finite::{parse_model, Frame};
    use super::*;
    use crate::formulas::{enumerate_formulas, parse_formula, pool_var, theory_t};

    /// Pointwise clause-by-clause forcing, independent of the mask evaluator.
    fn naive(m: &FiniteCDModel, w: usize, f: &Formula, env: &mut Vec<(String, usize)>) -> bool {
        let succ = |w: usize| (0..m.worlds()).filter(move |&v| m.frame().leq(w, v));
        let val = |env: &Vec<(String, usize)>, v: &str| env.iter().rev().find(|(n, _)| n == v).unwrap().1;
        match f {
            Formula::Atom(p, v) => m.atom(*p, val(env, v)) & (1 << w) != 0,
            Formula::S => m.s_mask() & (1 << w) != 0,
            Formula::Bottom => false,
            Formula::And(a, b) => naive(m, w, a, env) && naive(m, w, b, env),
            Formula::Or(a, b) => naive(m, w, a, env) || naive(m, w, b, env),
            Formula::Imp(a, b) => succ(w).all(|v| !naive(m, v, a, env) || naive(m, v, b, env)),
            Formula::Forall(x, a) => succ(w).all(|v| {
                (0..m.dom()).all(|e| {
                    env.push((x.clone(), e));
                    let r = naive(m, v, a, env);
                    env.pop();
                    r
                })
            }),
            Formula::Exists(x, a) => (0..m.dom()).any(|e| {
                env.push((x.clone(), e));
                let r = naive(m, w, a, env);
                env.pop();
                r
            }),
        }
    }

    fn sample_models() -> Vec<FiniteCDModel> {
        vec![
            parse_model("model { worlds=1; dom=1; P[0]={0}; s={0} }").unwrap(),
            parse_model("model { worlds=2; order={(0,1)}; dom=2; P[0]={0}; P[1]={0,1}; Q[1]={0}; R[1]={1}; s={1} }")
                .unwrap(),
            parse_model(
                "model { worlds=3; order={(0,1),(0,2)}; dom=2; P[0]={0,1}; P[1]={0,1}; P[2]={0,1}; \
                 Q[1]={0}; Q[2]={1}; R[1]={1}; R[2]={0}; s={0,1,2} }",
            )
            .unwrap(),
        ]
    }

    #[test]
    fn single_world_theory_examples() {
        let m = parse_model("model { worlds=1; dom=1; P[0]={0}; s={0} }").unwrap();
        assert!(forces(&m, 0, &theory_t().conjunction(), &[]).unwrap());
        let m2 = m.with_s(0).unwrap();
        assert!(!forces(&m2, 0, &theory_t().axioms()[2], &[]).unwrap());
        let exfalso = parse_formula("_|_ -> P(x)").unwrap();
        assert!(forces(&m2, 0, &exfalso, &[("x", 0)]).unwrap());
    }

    #[test]
    fn unbound_variable_is_reported() {
        let m = sample_models()[0];
        let f = parse_formula("P(x)").unwrap();
        assert_eq!(forces(&m, 0, &f, &[]), Err(EvalError::Unbound("x".into())));
    }

    #[test]
    fn mask_evaluator_agrees_with_pointwise_clauses() {
        let formulas: Vec<Formula> = enumerate_formulas(3, 1, true).step_by(7).collect();
        for m in sample_models() {
            for f in &formulas {
                for e in 0..m.dom() {
                    let got = forcing_set(&m, f, &[("x", e as u8)]).unwrap();
                    for w in 0..m.worlds() {
                        let want = naive(&m, w, f, &mut vec![("x".to_string(), e)]);
                        assert_eq!(got & (1 << w) != 0, want, "{f} at {w} with x={e} in {m}");
                    }
                }
            }
        }
    }

    #[test]
    fn arena_table_agrees_with_compiled_evaluation() {
        let arena = FormulaArena::build(3, 2, true);
        for m in sample_models() {
            let table = ArenaTable::new(&arena, &m);
            for id in (0..arena.len()).step_by(131) {
                let f = arena.formula(id);
                let c = Compiled::new(&f, &[&pool_var(0), &pool_var(1)]).unwrap();
                for env in 0..table.envs() {
                    let args = [(env % m.dom()) as u8, (env / m.dom()) as u8];
                    assert_eq!(table.get(id, env), c.forcing_set(&m, &args), "{f}");
                }
            }
        }
    }

    #[test]
    fn cd_axiom_holds_on_a_branching_model() {
        let f = Frame::new(3, &[(0, 1), (0, 2)]).unwrap();
        let m = FiniteCDModel::from_masks(f, 2, &[0b010, 0b100], &[0b110, 0], &[0, 0b111], 0).unwrap();
        let ax = parse_formula("forall x. (P(y) | Q(x)) -> P(y) | forall x. Q(x)").unwrap();
        for e in 0..2 {
            assert_eq!(forcing_set(&m, &ax, &[("y", e)]).unwrap(), 0b111);
        }
    }
}
