//! Named formulas and terms in `.nsf` files.
//!
//! A file is a sequence of directives, each starting at column 0:
//!
//! ```text
//! # comment
//! var f : 1
//! const bar : 1 -> 0 -> 0
//! formula name := <formula>
//! nf name := <formula that must be a fixed point of the translation>
//! term name := <term>
//! ```
//!
//! A body runs until the next directive, so it may span several lines.
//! Declarations apply to everything below them.

use std::fmt;

use thiserror::Error;

use crate::formula::Formula;
use crate::syntax::{parse_formula, parse_term, parse_type, ParseError, Signature};
use crate::term::{type_check, Term};
use crate::types::FiniteType;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("{file}: {source}")]
    Parse {
        file: String,
        line: usize,
        #[source]
        source: ParseError,
    },
    #[error("{file}:{line}: {msg}")]
    Directive {
        file: String,
        line: usize,
        msg: String,
    },
    #[error("{file}: `{name}` is defined twice")]
    Duplicate { file: String, name: String },
    #[error("{file}: no entry named `{name}`")]
    UnknownName { file: String, name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    Formula,
    NormalForm,
    Term,
}

impl fmt::Display for EntryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntryKind::Formula => "formula",
            EntryKind::NormalForm => "nf",
            EntryKind::Term => "term",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Formula(Formula),
    Term(Term, FiniteType),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub name: String,
    pub kind: EntryKind,
    pub line: usize,
    pub source: String,
    pub item: Item,
    /// The declarations in force at this entry.
    pub sig: Signature,
}

impl Entry {
    pub fn formula(&self) -> Option<&Formula> {
        match &self.item {
            Item::Formula(f) => Some(f),
            Item::Term(..) => None,
        }
    }

    pub fn term(&self) -> Option<(&Term, &FiniteType)> {
        match &self.item {
            Item::Term(t, ty) => Some((t, ty)),
            Item::Formula(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusFile {
    pub name: String,
    pub entries: Vec<Entry>,
    /// All declarations of the file.
    pub sig: Signature,
}

impl CorpusFile {
    pub fn get(&self, name: &str) -> Result<&Entry, CorpusError> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| CorpusError::UnknownName {
                file: self.name.clone(),
                name: name.to_string(),
            })
    }

    pub fn normal_forms(&self) -> impl Iterator<Item = &Entry> {
        self.entries
            .iter()
            .filter(|e| e.kind == EntryKind::NormalForm)
    }
}

const DIRECTIVES: [&str; 5] = ["var", "const", "formula", "nf", "term"];

fn directive_of(line: &str) -> Option<&'static str> {
    let word = line.split_whitespace().next()?;
    if line.starts_with(char::is_whitespace) {
        return None;
    }
    DIRECTIVES.iter().copied().find(|d| *d == word)
}

fn shift(err: ParseError, offset: usize) -> ParseError {
    match err {
        ParseError::Syntax {
            line,
            col,
            expected,
            found,
        } => ParseError::Syntax {
            line: line + offset,
            col,
            expected,
            found,
        },
        ParseError::TypeAnnotationMissing { name, line, col } => {
            ParseError::TypeAnnotationMissing {
                name,
                line: line + offset,
                col,
            }
        }
        other => other,
    }
}

/// Parses and typechecks a whole file.
pub fn parse_file(file: &str, src: &str) -> Result<CorpusFile, CorpusError> {
    // Group lines into directive blocks.
    let mut blocks: Vec<(usize, &'static str, String)> = Vec::new();
    for (i, line) in src.lines().enumerate() {
        match directive_of(line) {
            Some(d) => blocks.push((i + 1, d, line[d.len()..].to_string())),
            None => {
                let trimmed = line.trim();
                if let Some(last) = blocks.last_mut() {
                    last.2.push('\n');
                    last.2.push_str(line);
                } else if !trimmed.is_empty() && !trimmed.starts_with('#') {
                    return Err(CorpusError::Directive {
                        file: file.to_string(),
                        line: i + 1,
                        msg: format!(
                            "expected one of {}, found `{trimmed}`",
                            DIRECTIVES.join(", ")
                        ),
                    });
                }
            }
        }
    }

    let mut sig = Signature::new();
    let mut entries: Vec<Entry> = Vec::new();
    for (line, directive, rest) in blocks {
        let bad = |msg: String| CorpusError::Directive {
            file: file.to_string(),
            line,
            msg,
        };
        let parse_err = |e: ParseError| CorpusError::Parse {
            file: file.to_string(),
            line,
            source: shift(e, line - 1),
        };
        match directive {
            "var" | "const" => {
                let (name, ty) = rest
                    .split_once(':')
                    .ok_or_else(|| bad(format!("{directive} needs `name : type`")))?;
                let name = name.trim();
                if name.is_empty() || name.contains(char::is_whitespace) {
                    return Err(bad(format!("bad name `{name}`")));
                }
                let ty = parse_type(strip_comment(ty).trim()).map_err(parse_err)?;
                if directive == "var" {
                    sig.declare_var(name, ty);
                } else {
                    sig.declare_const(name, ty);
                }
            }
            _ => {
                let (name, body) = rest
                    .split_once(":=")
                    .ok_or_else(|| bad(format!("{directive} needs `name := body`")))?;
                let name = name.trim().to_string();
                if entries.iter().any(|e| e.name == name) {
                    return Err(CorpusError::Duplicate {
                        file: file.to_string(),
                        name,
                    });
                }
                let item = if directive == "term" {
                    let t = parse_term(body, &sig).map_err(parse_err)?;
                    let ty = type_check(&t, &sig.context())
                        .map_err(|e| parse_err(ParseError::Type(e)))?;
                    Item::Term(t, ty)
                } else {
                    Item::Formula(parse_formula(body, &sig).map_err(parse_err)?)
                };
                entries.push(Entry {
                    name,
                    kind: match directive {
                        "formula" => EntryKind::Formula,
                        "nf" => EntryKind::NormalForm,
                        _ => EntryKind::Term,
                    },
                    line,
                    source: body.trim().to_string(),
                    item,
                    sig: sig.clone(),
                });
            }
        }
    }
    Ok(CorpusFile {
        name: file.to_string(),
        entries,
        sig,
    })
}

fn strip_comment(s: &str) -> &str {
    s.split('#').next().unwrap_or("")
}

/// The shipped corpus, as `(file name, contents)`.
pub const BUILTIN: &[(&str, &str)] = &[
    ("uwkl.nsf", include_str!("../corpus/uwkl.nsf")),
    ("uwkl_plus.nsf", include_str!("../corpus/uwkl_plus.nsf")),
    ("mu.nsf", include_str!("../corpus/mu.nsf")),
    ("pi01_trans.nsf", include_str!("../corpus/pi01_trans.nsf")),
    ("ufan.nsf", include_str!("../corpus/ufan.nsf")),
    ("udro.nsf", include_str!("../corpus/udro.nsf")),
    ("kral.nsf", include_str!("../corpus/kral.nsf")),
    ("kral2.nsf", include_str!("../corpus/kral2.nsf")),
    ("her_uwkl.nsf", include_str!("../corpus/her_uwkl.nsf")),
    ("axioms.nsf", include_str!("../corpus/axioms.nsf")),
    ("arith.nsf", include_str!("../corpus/arith.nsf")),
];

pub fn builtin(name: &str) -> Option<&'static str> {
    let name = name.strip_suffix(".nsf").unwrap_or(name);
    BUILTIN
        .iter()
        .find(|(f, _)| f.strip_suffix(".nsf") == Some(name))
        .map(|(_, src)| *src)
}

pub fn load_builtin() -> Result<Vec<CorpusFile>, CorpusError> {
    BUILTIN.iter().map(|(f, src)| parse_file(f, src)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directives_and_multiline_bodies() {
        let src = "# demo\nvar f : 1\nconst c : 0 -> 0\nformula a :=\n  forall n:0.\n    f (c n) = 0\nnf b := forall^st x:0. f x = 0\nterm t := \\x:0. c x\n";
        let file = parse_file("demo.nsf", src).unwrap();
        assert_eq!(file.entries.len(), 3);
        assert_eq!(file.get("a").unwrap().line, 4);
        assert_eq!(file.get("b").unwrap().kind, EntryKind::NormalForm);
        let (_, ty) = file.get("t").unwrap().term().unwrap();
        assert_eq!(*ty, FiniteType::one());
        assert_eq!(file.normal_forms().count(), 1);
        assert!(matches!(
            file.get("zz"),
            Err(CorpusError::UnknownName { .. })
        ));
    }

    #[test]
    fn errors_carry_locations() {
        let err = parse_file("x.nsf", "var f : 1\nformula a :=\n  f n = 0\n").unwrap_err();
        match err {
            CorpusError::Parse { line, source, .. } => {
                assert_eq!(line, 2);
                assert!(
                    matches!(source, ParseError::TypeAnnotationMissing { ref name, line: 3, .. } if name == "n")
                );
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_file("x.nsf", "bogus line\n"),
            Err(CorpusError::Directive { line: 1, .. })
        ));
        assert!(matches!(
            parse_file("x.nsf", "formula a := 0 = 0\nformula a := 0 = 0\n"),
            Err(CorpusError::Duplicate { .. })
        ));
        assert_eq!(parse_file("x.nsf", "").unwrap().entries.len(), 0);
    }

    #[test]
    fn builtin_corpus_parses() {
        let files = load_builtin().unwrap();
        assert_eq!(files.len(), BUILTIN.len());
        let nfs: usize = files.iter().map(|f| f.normal_forms().count()).sum();
        assert!(nfs >= 10, "{nfs}");
        assert!(builtin("pi01_trans").is_some());
    }
}
