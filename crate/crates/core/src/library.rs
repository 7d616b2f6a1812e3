//! Built-in arithmetic constants, each defined by a closed System T term.
//!
//! The definitions are written in the concrete syntax and parsed on first
//! use. Later constants may refer to earlier ones by name.

use std::collections::HashMap;
use std::sync::LazyLock;

use crate::syntax::{parse_term, parse_type, Signature};
use crate::term::{Const, Term};
use crate::types::FiniteType;

const SOURCES: &[(&str, &str, &str)] = &[
    ("pred", "0 -> 0", r"\n:0. rec[0] 0 (\k:0. \p:0. k) n"),
    (
        "minus",
        "0 -> 0 -> 0",
        r"\m:0. \n:0. rec[0] m (\k:0. \p:0. pred p) n",
    ),
    (
        "add",
        "0 -> 0 -> 0",
        r"\m:0. \n:0. rec[0] m (\k:0. \p:0. S p) n",
    ),
    (
        "mul",
        "0 -> 0 -> 0",
        r"\m:0. \n:0. rec[0] 0 (\k:0. \p:0. add p m) n",
    ),
    ("max", "0 -> 0 -> 0", r"\m:0. \n:0. add n (minus m n)"),
    (
        "maxseq",
        "0* -> 0",
        r"\s:0*. rec[0] 0 (\k:0. \p:0. max p (s!k)) (len(s))",
    ),
];

struct Entry {
    ty: FiniteType,
    def: Term,
}

static TYPES: LazyLock<HashMap<&'static str, FiniteType>> = LazyLock::new(|| {
    SOURCES
        .iter()
        .map(|(name, ty, _)| (*name, parse_type(ty).expect("library type")))
        .collect()
});

static DEFS: LazyLock<HashMap<&'static str, Entry>> = LazyLock::new(|| {
    SOURCES
        .iter()
        .map(|(name, ty, src)| {
            let def = parse_term(src, &Signature::new())
                .unwrap_or_else(|e| panic!("library definition of {name}: {e}"));
            let ty = parse_type(ty).expect("library type");
            (*name, Entry { ty, def })
        })
        .collect()
});

/// Names of all library constants in definition order.
pub fn names() -> impl Iterator<Item = &'static str> {
    SOURCES.iter().map(|(n, _, _)| *n)
}

pub fn lookup(name: &str) -> Option<FiniteType> {
    TYPES.get(name).cloned()
}

pub fn definition(name: &str) -> Option<&'static Term> {
    DEFS.get(name).map(|e| &e.def)
}

/// The constant as a term. Panics on an unknown name, which is a bug.
pub fn term(name: &str) -> Term {
    let ty = lookup(name).unwrap_or_else(|| panic!("no library constant `{name}`"));
    Term::Const(Const {
        name: name.to_string(),
        ty,
    })
}

/// Checks every definition against its declared type.
pub fn self_check() -> Result<(), String> {
    for name in names() {
        let e = &DEFS[name];
        let got = crate::term::type_check(&e.def, &Default::default())
            .map_err(|err| format!("{name}: {err}"))?;
        if got != e.ty {
            return Err(format!("{name}: declared {}, defined at {got}", e.ty));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::evaluate;

    fn run(name: &str, args: &[u64]) -> u64 {
        let t = Term::apps(term(name), args.iter().map(|&a| Term::num(a)));
        evaluate(&t, 1_000_000).unwrap().as_nat().unwrap()
    }

    #[test]
    fn definitions_typecheck() {
        self_check().unwrap();
    }

    #[test]
    fn arithmetic_small_cases() {
        assert_eq!(run("pred", &[0]), 0);
        assert_eq!(run("pred", &[7]), 6);
        assert_eq!(run("minus", &[3, 5]), 0);
        assert_eq!(run("minus", &[9, 4]), 5);
        assert_eq!(run("add", &[12, 30]), 42);
        assert_eq!(run("mul", &[6, 7]), 42);
        assert_eq!(run("mul", &[0, 9]), 0);
        assert_eq!(run("max", &[3, 8]), 8);
        assert_eq!(run("max", &[8, 3]), 8);
    }

    #[test]
    fn maxseq_of_literals() {
        let s = Term::seq_lit(FiniteType::Nat, [3, 9, 2].map(Term::num));
        let v = evaluate(&Term::app(term("maxseq"), s), 100_000).unwrap();
        assert_eq!(v.as_nat(), Some(9));
        let e = Term::SeqEmpty(FiniteType::Nat);
        let v = evaluate(&Term::app(term("maxseq"), e), 100).unwrap();
        assert_eq!(v.as_nat(), Some(0));
    }
}
