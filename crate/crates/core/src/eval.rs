//! Call-by-value evaluation of closed System T terms under a step budget.
//!
//! One step is one β-reduction, one recursor unfolding (which includes
//! feeding the step functional its two arguments) or one constant unfolding.
//! Numerals are machine integers, so `S` costs nothing.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::library;
use crate::term::{Term, Var};
use crate::types::FiniteType;

pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Clone, Debug)]
pub enum Value {
    Nat(u64),
    Closure {
        param: Var,
        body: Arc<Term>,
        env: Env,
    },
    Seq {
        elem: FiniteType,
        items: Arc<Vec<Value>>,
    },
    /// A recursor `R_ρ` waiting for the rest of its three arguments.
    Rec {
        ty: FiniteType,
        args: Vec<Value>,
    },
}

/// Persistent evaluation environment.
#[derive(Clone, Debug, Default)]
pub struct Env(Option<Arc<(String, Value, Env)>>);

impl Env {
    pub fn empty() -> Self {
        Env(None)
    }

    pub fn bind(&self, name: String, v: Value) -> Env {
        Env(Some(Arc::new((name, v, self.clone()))))
    }

    pub fn lookup(&self, name: &str) -> Option<&Value> {
        let mut cur = self;
        while let Some(node) = &cur.0 {
            if node.0 == name {
                return Some(&node.1);
            }
            cur = &node.2;
        }
        None
    }
}

impl Value {
    pub fn as_nat(&self) -> Option<u64> {
        match self {
            Value::Nat(n) => Some(*n),
            _ => None,
        }
    }

    /// Structural equality on first-order data. Function values compare by
    /// their syntax, which is enough to witness determinism.
    pub fn structurally_equal(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Nat(a), Value::Nat(b)) => a == b,
            (Value::Seq { elem: e1, items: a }, Value::Seq { elem: e2, items: b }) => {
                e1 == e2
                    && a.len() == b.len()
                    && a.iter().zip(b.iter()).all(|(x, y)| x.structurally_equal(y))
            }
            (
                Value::Closure {
                    param: p1,
                    body: b1,
                    ..
                },
                Value::Closure {
                    param: p2,
                    body: b2,
                    ..
                },
            ) => p1 == p2 && b1 == b2,
            (Value::Rec { ty: t1, args: a1 }, Value::Rec { ty: t2, args: a2 }) => {
                t1 == t2
                    && a1.len() == a2.len()
                    && a1.iter().zip(a2).all(|(x, y)| x.structurally_equal(y))
            }
            _ => false,
        }
    }

    /// Shallow inhabitation check: naturals for `0`, sequences for `σ*`
    /// (elements checked recursively), closures or recursors for arrows.
    pub fn inhabits(&self, ty: &FiniteType) -> bool {
        match (self, ty) {
            (Value::Nat(_), FiniteType::Nat) => true,
            (Value::Seq { elem, items }, FiniteType::Seq(e)) => {
                **e == *elem && items.iter().all(|v| v.inhabits(e))
            }
            (Value::Closure { param, .. }, FiniteType::Arrow(d, _)) => param.ty == **d,
            (Value::Rec { .. }, FiniteType::Arrow(..)) => true,
            _ => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Nat(n) => write!(f, "{n}"),
            Value::Seq { elem, items } => {
                if items.is_empty() {
                    return write!(f, "<>[{elem}]");
                }
                write!(f, "<")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ">")
            }
            Value::Closure { param, body, .. } => {
                write!(f, "<closure \\{}:{}. {}>", param.name, param.ty, body)
            }
            Value::Rec { ty, args } => write!(f, "<rec[{ty}] applied to {}>", args.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("out of fuel after {0} steps")]
    OutOfFuel(u64),
    #[error("evaluation got stuck: {0}")]
    IllTyped(String),
    #[error("constant `{0}` has no executable definition")]
    Opaque(String),
}

/// The canonical inhabitant used for out-of-range indexing.
pub fn default_value(ty: &FiniteType) -> Value {
    match ty {
        FiniteType::Nat => Value::Nat(0),
        FiniteType::Seq(e) => Value::Seq {
            elem: (**e).clone(),
            items: Arc::new(Vec::new()),
        },
        FiniteType::Arrow(d, c) => Value::Closure {
            param: Var::new("_", (**d).clone()),
            body: Arc::new(default_term(c)),
            env: Env::empty(),
        },
    }
}

/// A closed term denoting [`default_value`].
pub fn default_term(ty: &FiniteType) -> Term {
    match ty {
        FiniteType::Nat => Term::Zero,
        FiniteType::Seq(e) => Term::SeqEmpty((**e).clone()),
        FiniteType::Arrow(d, c) => Term::lam(Var::new("_", (**d).clone()), default_term(c)),
    }
}

pub fn evaluate(t: &Term, fuel: u64) -> Result<Value, EvalError> {
    Evaluator::new(fuel).eval(t, &Env::empty())
}

pub struct Evaluator {
    budget: u64,
    steps: u64,
}

impl Evaluator {
    pub fn new(budget: u64) -> Self {
        Evaluator { budget, steps: 0 }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn tick(&mut self) -> Result<(), EvalError> {
        self.steps += 1;
        if self.steps > self.budget {
            Err(EvalError::OutOfFuel(self.budget))
        } else {
            Ok(())
        }
    }

    pub fn eval(&mut self, t: &Term, env: &Env) -> Result<Value, EvalError> {
        match t {
            Term::Var(v) => env
                .lookup(&v.name)
                .cloned()
                .ok_or_else(|| EvalError::IllTyped(format!("free variable `{}`", v.name))),
            Term::Const(c) => {
                let def = library::definition(&c.name)
                    .ok_or_else(|| EvalError::Opaque(c.name.clone()))?;
                self.tick()?;
                self.eval(def, &Env::empty())
            }
            Term::Zero => Ok(Value::Nat(0)),
            Term::NumLit(n) => Ok(Value::Nat(*n)),
            Term::Succ(a) => match self.eval(a, env)? {
                Value::Nat(n) => Ok(Value::Nat(n + 1)),
                other => Err(stuck("successor of", &other)),
            },
            Term::Rec(ty) => Ok(Value::Rec {
                ty: ty.clone(),
                args: Vec::new(),
            }),
            Term::Lam(x, body) => Ok(Value::Closure {
                param: x.clone(),
                body: Arc::new((**body).clone()),
                env: env.clone(),
            }),
            Term::App(f, a) => {
                let fv = self.eval(f, env)?;
                let av = self.eval(a, env)?;
                self.apply(fv, av)
            }
            Term::SeqEmpty(elem) => Ok(Value::Seq {
                elem: elem.clone(),
                items: Arc::new(Vec::new()),
            }),
            Term::SeqAppend(s, x) => {
                let sv = self.eval(s, env)?;
                let xv = self.eval(x, env)?;
                match sv {
                    Value::Seq { elem, items } => {
                        let mut items = (*items).clone();
                        items.push(xv);
                        Ok(Value::Seq {
                            elem,
                            items: Arc::new(items),
                        })
                    }
                    other => Err(stuck("append to", &other)),
                }
            }
            Term::SeqLen(s) => match self.eval(s, env)? {
                Value::Seq { items, .. } => Ok(Value::Nat(items.len() as u64)),
                other => Err(stuck("length of", &other)),
            },
            Term::SeqIdx(s, i) => {
                let sv = self.eval(s, env)?;
                let iv = self.eval(i, env)?;
                match (sv, iv) {
                    (Value::Seq { elem, items }, Value::Nat(i)) => Ok(items
                        .get(i as usize)
                        .cloned()
                        .unwrap_or_else(|| default_value(&elem))),
                    (other, _) => Err(stuck("index into", &other)),
                }
            }
        }
    }

    pub fn apply(&mut self, f: Value, a: Value) -> Result<Value, EvalError> {
        match f {
            Value::Closure { param, body, env } => {
                self.tick()?;
                let env = env.bind(param.name, a);
                self.eval(&body, &env)
            }
            Value::Rec { ty, mut args } => {
                args.push(a);
                if args.len() < 3 {
                    return Ok(Value::Rec { ty, args });
                }
                let n = args[2]
                    .as_nat()
                    .ok_or_else(|| stuck("recursion on", &args[2]))?;
                let step = args[1].clone();
                let mut acc = args[0].clone();
                for k in 0..n {
                    self.tick()?;
                    let partial = self.apply_free(&step, Value::Nat(k))?;
                    acc = self.apply_free(&partial, acc)?;
                }
                Ok(acc)
            }
            other => Err(stuck("application of", &other)),
        }
    }

    // Application that does not itself consume a step; used for the step
    // functional inside a recursor unfolding.
    fn apply_free(&mut self, f: &Value, a: Value) -> Result<Value, EvalError> {
        match f {
            Value::Closure { param, body, env } => {
                let env = env.bind(param.name.clone(), a);
                self.eval(body, &env)
            }
            other => self.apply(other.clone(), a),
        }
    }
}

fn stuck(what: &str, v: &Value) -> EvalError {
    EvalError::IllTyped(format!("{what} {v}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        assert_eq!(default_value(&FiniteType::Nat).as_nat(), Some(0));
        match default_value(&FiniteType::seq(FiniteType::Nat)) {
            Value::Seq { elem, items } => {
                assert_eq!(elem, FiniteType::Nat);
                assert!(items.is_empty());
            }
            v => panic!("{v}"),
        }
        let k = default_value(&FiniteType::one());
        let mut ev = Evaluator::new(10);
        assert_eq!(ev.apply(k, Value::Nat(17)).unwrap().as_nat(), Some(0));
    }

    #[test]
    fn out_of_range_index_is_default() {
        let s = Term::seq_lit(FiniteType::Nat, [Term::num(4)]);
        let v = evaluate(&Term::idx(s, Term::num(5)), 100).unwrap();
        assert_eq!(v.as_nat(), Some(0));
    }

    #[test]
    fn numerals_and_successors_agree() {
        let mut t = Term::Zero;
        for _ in 0..5 {
            t = Term::succ(t);
        }
        let a = evaluate(&t, 10).unwrap();
        let b = evaluate(&Term::NumLit(5), 10).unwrap();
        assert!(a.structurally_equal(&b));
    }

    #[test]
    fn fuel_is_enforced() {
        // rec[0] 0 (\k. \p. S p) 50 needs 50 unfoldings
        let step = Term::lam(
            Var::nat("k"),
            Term::lam(Var::nat("p"), Term::succ(Term::var("p", FiniteType::Nat))),
        );
        let t = Term::apps(
            Term::Rec(FiniteType::Nat),
            [Term::Zero, step, Term::num(50)],
        );
        assert!(matches!(evaluate(&t, 49), Err(EvalError::OutOfFuel(49))));
        assert_eq!(evaluate(&t, 50).unwrap().as_nat(), Some(50));
    }

    #[test]
    fn stuck_terms_report_ill_typed() {
        let t = Term::app(Term::Zero, Term::Zero);
        assert!(matches!(evaluate(&t, 10), Err(EvalError::IllTyped(_))));
    }
}
