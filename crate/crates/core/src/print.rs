//! Concrete-syntax printing. Output parses back to an alpha-equal tree.

use crate::formula::Formula;
use crate::term::Term;

// term precedence levels
const LAM: u8 = 0;
const APP: u8 = 1;
const IDX: u8 = 2;
const ATOM: u8 = 3;

/// Prints a term. With `succ_kw` the successor is written `succ`, which is
/// needed when some variable is itself called `S`.
pub fn term_to_string(t: &Term, succ_kw: bool) -> String {
    let succ_kw = succ_kw || names_s(t);
    let mut out = String::new();
    term(t, LAM, succ_kw, &mut out);
    out
}

fn names_s(t: &Term) -> bool {
    let mut names = Vec::new();
    t.all_names(&mut names);
    names.iter().any(|n| n == "S")
}

fn term(t: &Term, prec: u8, kw: bool, out: &mut String) {
    let level = match t {
        Term::Lam(..) => LAM,
        Term::App(..) | Term::Succ(..) => APP,
        Term::SeqIdx(..) => IDX,
        _ => ATOM,
    };
    let paren = level < prec;
    if paren {
        out.push('(');
    }
    match t {
        Term::Var(v) => out.push_str(&v.name),
        Term::Const(c) => out.push_str(&c.name),
        Term::Zero => out.push('0'),
        Term::NumLit(n) => out.push_str(&n.to_string()),
        Term::Rec(ty) => out.push_str(&format!("rec[{ty}]")),
        Term::SeqEmpty(ty) => out.push_str(&format!("<>[{ty}]")),
        Term::SeqAppend(s, x) => {
            out.push_str("append(");
            term(s, LAM, kw, out);
            out.push_str(", ");
            term(x, LAM, kw, out);
            out.push(')');
        }
        Term::SeqLen(s) => {
            out.push_str("len(");
            term(s, LAM, kw, out);
            out.push(')');
        }
        Term::Succ(a) => {
            out.push_str(if kw { "succ " } else { "S " });
            term(a, IDX, kw, out);
        }
        Term::App(f, a) => {
            term(f, APP, kw, out);
            out.push(' ');
            term(a, IDX, kw, out);
        }
        Term::SeqIdx(s, i) => {
            term(s, IDX, kw, out);
            out.push('!');
            term(i, ATOM, kw, out);
        }
        Term::Lam(x, b) => {
            out.push_str(&format!("\\{}:{}. ", x.name, x.ty));
            term(b, LAM, kw, out);
        }
    }
    if paren {
        out.push(')');
    }
}

// formula precedence levels
const QUANT: u8 = 0;
const IMPL: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

pub fn formula_to_string(f: &Formula) -> String {
    let kw = f.all_names().iter().any(|n| n == "S");
    let mut out = String::new();
    formula(f, QUANT, kw, &mut out);
    out
}

fn tm(t: &Term, kw: bool, out: &mut String) {
    term(t, APP, kw, out);
}

enum Bind<'a> {
    Plain(&'a crate::term::Var),
    In(&'a crate::term::Var, &'a Term),
    Le(&'a crate::term::Var, &'a Term),
}

#[derive(PartialEq, Clone, Copy)]
enum Kind {
    Forall,
    Exists,
    ForallSt,
    ExistsSt,
}

fn kind_word(k: Kind) -> &'static str {
    match k {
        Kind::Forall => "forall",
        Kind::Exists => "exists",
        Kind::ForallSt => "forall^st",
        Kind::ExistsSt => "exists^st",
    }
}

/// One binder of a quantifier node, with the remaining body.
fn view(f: &Formula) -> Option<(Kind, Bind<'_>, &Formula)> {
    if let Some((w, s, body)) = f.as_forall_in() {
        return Some((Kind::Forall, Bind::In(w, s), body));
    }
    if let Some((w, s, body)) = f.as_exists_in() {
        return Some((Kind::Exists, Bind::In(w, s), body));
    }
    match f {
        Formula::Forall(x, b) => Some((Kind::Forall, Bind::Plain(x), b)),
        Formula::Exists(x, b) => Some((Kind::Exists, Bind::Plain(x), b)),
        Formula::ForallSt(x, b) => Some((Kind::ForallSt, Bind::Plain(x), b)),
        Formula::ExistsSt(x, b) => Some((Kind::ExistsSt, Bind::Plain(x), b)),
        Formula::BForall(x, t, b) => Some((Kind::Forall, Bind::Le(x, t), b)),
        Formula::BExists(x, t, b) => Some((Kind::Exists, Bind::Le(x, t), b)),
        _ => None,
    }
}

fn formula(f: &Formula, prec: u8, kw: bool, out: &mut String) {
    if let Some((kind, first, mut body)) = view(f) {
        let paren = prec > QUANT;
        if paren {
            out.push('(');
        }
        out.push_str(kind_word(kind));
        out.push(' ');
        binder(&first, kw, out);
        while let Some((k2, b2, rest)) = view(body) {
            if k2 != kind {
                break;
            }
            out.push_str(", ");
            binder(&b2, kw, out);
            body = rest;
        }
        out.push_str(". ");
        formula(body, QUANT, kw, out);
        if paren {
            out.push(')');
        }
        return;
    }
    let level = match f {
        Formula::Implies(..) => IMPL,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => UNARY,
    };
    let paren = level < prec;
    if paren {
        out.push('(');
    }
    match f {
        Formula::Implies(a, b) => {
            formula(a, OR, kw, out);
            out.push_str(" -> ");
            formula(b, QUANT, kw, out);
        }
        Formula::Or(a, b) => {
            formula(a, OR, kw, out);
            out.push_str(" \\/ ");
            formula(b, AND, kw, out);
        }
        Formula::And(a, b) => {
            formula(a, AND, kw, out);
            out.push_str(" /\\ ");
            formula(b, UNARY, kw, out);
        }
        Formula::Not(a) => {
            if let Formula::AtomEq0(x, y) = &**a {
                if a.as_le().is_none() && !a.is_top() {
                    tm(x, kw, out);
                    out.push_str(" != ");
                    tm(y, kw, out);
                    if paren {
                        out.push(')');
                    }
                    return;
                }
                if a.is_top() {
                    out.push_str("false");
                    if paren {
                        out.push(')');
                    }
                    return;
                }
            }
            out.push('~');
            formula(a, UNARY + 1, kw, out);
        }
        Formula::AtomEq0(x, y) => {
            if let Some((a, b)) = f.as_le() {
                tm(a, kw, out);
                out.push_str(" <= ");
                tm(b, kw, out);
            } else if f.is_top() {
                out.push_str("true");
            } else {
                tm(x, kw, out);
                out.push_str(" = ");
                tm(y, kw, out);
            }
        }
        Formula::St(ty, t) => {
            out.push_str("st(");
            term(t, LAM, kw, out);
            out.push_str(&format!(" : {ty})"));
        }
        Formula::MemSeq(x, s) => {
            tm(x, kw, out);
            out.push_str(" in ");
            tm(s, kw, out);
        }
        _ => unreachable!("quantifiers handled above"),
    }
    if paren {
        out.push(')');
    }
}

fn binder(b: &Bind<'_>, kw: bool, out: &mut String) {
    match b {
        Bind::Plain(x) => out.push_str(&format!("{}:{}", x.name, x.ty)),
        Bind::In(x, s) => {
            out.push_str(&format!("{}:{} in ", x.name, x.ty));
            tm(s, kw, out);
        }
        Bind::Le(x, t) => {
            out.push_str(&format!("{} <= ", x.name));
            tm(t, kw, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::alpha_equal;
    use crate::syntax::{parse_formula, parse_term, Signature};
    use crate::types::FiniteType;

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.declare_var("f", FiniteType::one());
        s.declare_var("g", FiniteType::arrow(FiniteType::one(), FiniteType::one()));
        s.declare_var("i", FiniteType::Nat);
        s.declare_var("s", FiniteType::seq(FiniteType::Nat));
        s
    }

    fn roundtrip(src: &str) {
        let f = parse_formula(src, &sig()).unwrap();
        let printed = formula_to_string(&f);
        let g = parse_formula(&printed, &sig()).unwrap_or_else(|e| panic!("{printed}: {e}"));
        assert!(alpha_equal(&f, &g), "{src} printed as {printed}");
    }

    #[test]
    fn printed_formulas_parse_back() {
        for src in [
            "(exists n:0. f n = 0) -> exists m <= i. f m = 0",
            "forall^st x:0. exists^st y:0. x <= y",
            "~(f 0 = 0) \\/ (f 1 = 0 /\\ f 2 != 0)",
            "(f 0 = 0 -> f 1 = 0) -> f 2 = 0",
            "f 0 = 0 \\/ (f 1 = 0 \\/ f 2 = 0)",
            "(forall x:0. f x = 0) /\\ f 1 = 0",
            "forall w:0 in s, v:0 in s. w <= v",
            "exists w:0 in s. st(w : 0)",
            "~~(f 0 = 0)",
            "true /\\ false",
            "~(f 0 <= 1)",
            "g f 0 = (\\x:0. S x) 3",
            "forall S:1. S (succ 0) = 0",
            "s!i = len(append(s, 3))",
            "~(forall x:0. f x = 0)",
        ] {
            roundtrip(src);
        }
    }

    #[test]
    fn term_printing() {
        let s = Signature::new();
        for (src, want) in [
            (r"\x:0. S x", r"\x:0. S x"),
            (
                "rec[0] 0 (\\k:0. \\p:0. S p) 4",
                "rec[0] 0 (\\k:0. \\p:0. S p) 4",
            ),
            ("(S (S 0))", "S (S 0)"),
            ("append(<>[0], 2)!0", "append(<>[0], 2)!0"),
        ] {
            let t = parse_term(src, &s).unwrap();
            assert_eq!(term_to_string(&t, false), want);
        }
    }
}
