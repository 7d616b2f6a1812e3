//! The `nsf` command line. Every command returns its text and JSON output
//! together with an exit code, so the binary stays a thin shell.

use std::fmt::Write as _;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::cases::{self, demo, demo_names, CaseError, MAX_DEPTH};
use crate::corpus::{
    builtin, load_builtin, parse_file, CorpusError, CorpusFile, Entry, EntryKind, Item,
};
use crate::eval::{Env, EvalError, Evaluator, DEFAULT_FUEL};
use crate::formula::Formula;
use crate::herbrand::{
    collapse_witnesses, conjuncts, extraction_obligation, herbrandise_pointwise,
    implication_to_normal_form, HerbrandError, Obligation, Partition,
};
use crate::sst::{
    fixed_point_check, read_normal_form, simplify, translate, NormalForm, RewriteTrace, SstError,
};
use crate::syntax::{parse_term, ParseError, Signature};
use crate::term::type_check;

pub const FUEL_VAR: &str = "NSF_FUEL";

#[derive(Debug, Parser)]
#[command(
    name = "nsf",
    version,
    about = "Normal forms, translation and extraction obligations for nonstandard arithmetic"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and typecheck every entry of the given files.
    Check {
        #[arg(required = true)]
        files: Vec<String>,
    },
    /// Translate a named formula to its normal form and simplify it.
    Translate {
        file: String,
        name: String,
        #[arg(long)]
        trace: bool,
    },
    /// Simplify a named formula that is already a normal form.
    Simplify {
        file: String,
        name: String,
        #[arg(long)]
        trace: bool,
    },
    /// Combine two normal forms into an implication and derive its
    /// extraction obligations. Use `-` for an empty antecedent.
    Herbrandize {
        file: String,
        ante: String,
        cons: String,
        /// Also emit the pointwise form with index and output holes.
        #[arg(long)]
        pointwise: bool,
        /// Antecedent components per slot, e.g. `T|U,S,k`. Defaults to
        /// grouping by the antecedent conjunct that first mentions them.
        #[arg(long)]
        partition: Option<String>,
        /// The consequent component replaced by the output hole.
        #[arg(long)]
        output: Option<String>,
    },
    /// Print the extraction obligation of a named formula.
    Obligation {
        file: String,
        name: String,
        /// Collapse this component's sequence hole to a single bound.
        #[arg(long)]
        collapse: Option<String>,
    },
    /// Evaluate closed terms: every `term` entry of a corpus file, or a
    /// file holding a single term.
    Eval {
        file: String,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        fuel: Option<u64>,
    },
    /// Run a case-study suite.
    Demo {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(demo_names()))]
        name: String,
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u64).range(0..=MAX_DEPTH as u64))]
        depth: u64,
    },
    /// Check the shipped corpus: every entry parses and every normal form
    /// is a fixed point of the translation.
    Corpus {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Sst(#[from] SstError),
    #[error(transparent)]
    Herbrand(#[from] HerbrandError),
    #[error(transparent)]
    Case(#[from] CaseError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        2
    }
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub json: Json,
    /// 0 ok, 1 violation.
    pub code: u8,
}

impl Output {
    fn ok(text: String, json: Json) -> Self {
        Output {
            text,
            json,
            code: 0,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => {
                serde_json::to_string_pretty(&self.json).expect("json values serialise") + "\n"
            }
        }
    }
}

/// Runs a parsed command line. The fuel default is read from `NSF_FUEL`.
pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let env_fuel = std::env::var(FUEL_VAR).ok();
    run_with_env(cli, env_fuel.as_deref())
}

pub fn run_with_env(cli: &Cli, env_fuel: Option<&str>) -> Result<Output, CliError> {
    match &cli.command {
        Command::Check { files } => Ok(cmd_check(files)),
        Command::Translate { file, name, trace } => cmd_translate(file, name, *trace),
        Command::Simplify { file, name, trace } => cmd_simplify(file, name, *trace),
        Command::Herbrandize {
            file,
            ante,
            cons,
            pointwise,
            partition,
            output,
        } => cmd_herbrandize(
            file,
            ante,
            cons,
            *pointwise,
            partition.as_deref(),
            output.as_deref(),
        ),
        Command::Obligation {
            file,
            name,
            collapse,
        } => cmd_obligation(file, name, collapse.as_deref()),
        Command::Eval { file, fuel } => {
            let fuel = match (fuel, env_fuel) {
                (Some(f), _) => *f,
                (None, Some(s)) => s
                    .trim()
                    .parse::<u64>()
                    .ok()
                    .filter(|f| *f >= 1)
                    .ok_or_else(|| {
                        CliError::Usage(format!("{FUEL_VAR}={s} is not a positive integer"))
                    })?,
                (None, None) => DEFAULT_FUEL,
            };
            cmd_eval(file, fuel)
        }
        Command::Demo { name, depth } => cmd_demo(name, *depth as usize),
        Command::Corpus { .. } => cmd_corpus(),
    }
}

/// The format actually used: `corpus --json` implies JSON.
pub fn effective_format(cli: &Cli) -> Format {
    match cli.command {
        Command::Corpus { json: true } => Format::Json,
        _ => cli.format,
    }
}

// Loading ------------------------------------------------------------------

/// A file on disk, else a shipped corpus file of that name.
fn read_source(file: &str) -> Result<(String, String), CliError> {
    let path = Path::new(file);
    if path.exists() {
        let src = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: file.to_string(),
            source,
        })?;
        return Ok((file.to_string(), src));
    }
    match builtin(file) {
        Some(src) => {
            let name = file.strip_suffix(".nsf").unwrap_or(file);
            Ok((format!("{name}.nsf"), src.to_string()))
        }
        None => Err(CliError::Usage(format!(
            "{file}: no such file or builtin corpus"
        ))),
    }
}

pub fn load(file: &str) -> Result<CorpusFile, CliError> {
    let (name, src) = read_source(file)?;
    Ok(parse_file(&name, &src)?)
}

fn formula_entry<'a>(
    file: &'a CorpusFile,
    name: &str,
) -> Result<(&'a Entry, &'a Formula), CliError> {
    let entry = file.get(name)?;
    let f = entry
        .formula()
        .ok_or_else(|| CliError::Usage(format!("`{name}` is a term, not a formula")))?;
    Ok((entry, f))
}

/// Reads the formula as a normal form when it is one, else translates it.
fn normal_form_of(f: &Formula) -> Result<NormalForm, CliError> {
    match read_normal_form(f) {
        Ok(nf) => Ok(nf),
        Err(SstError::NotANormalForm(_)) => {
            let (nf, _) = translate(f)?;
            Ok(simplify(&nf)?.0)
        }
        Err(e) => Err(e.into()),
    }
}

fn write_trace(out: &mut String, trace: &RewriteTrace) {
    for step in &trace.steps {
        let _ = writeln!(
            out,
            "[{}] {}\n    => {}",
            step.rule, step.before, step.after
        );
    }
}

// Commands -----------------------------------------------------------------

pub fn cmd_check(files: &[String]) -> Output {
    let mut text = String::new();
    let mut reports = Vec::new();
    let mut code = 0;
    for file in files {
        let result = read_source(file).and_then(|(name, src)| Ok(parse_file(&name, &src)?));
        match result {
            Ok(parsed) => {
                let n = parsed.entries.len();
                if n == 0 {
                    let _ = writeln!(text, "warning: {file}: no entries");
                } else {
                    let _ = writeln!(text, "{file}: {n} entries ok");
                }
                reports.push(json!({"file": file, "entries": n, "ok": true}));
            }
            Err(e) => {
                code = 1;
                let _ = writeln!(text, "error: {e}");
                reports.push(json!({"file": file, "ok": false, "diagnostic": e.to_string()}));
            }
        }
    }
    Output {
        text,
        json: json!({"files": reports, "ok": code == 0}),
        code,
    }
}

fn normal_form_output(name: &str, nf: &NormalForm, trace: Option<&RewriteTrace>) -> Output {
    let mut text = format!("{nf}\n");
    let mut j = json!({"name": name, "rendering": nf.to_string(), "normal_form": nf});
    if let Some(trace) = trace {
        write_trace(&mut text, trace);
        j["trace"] = json!(trace);
    }
    Output::ok(text, j)
}

pub fn cmd_translate(file: &str, name: &str, trace: bool) -> Result<Output, CliError> {
    let corpus = load(file)?;
    let (_, f) = formula_entry(&corpus, name)?;
    let (nf, mut steps) = translate(f)?;
    let (nf, more) = simplify(&nf)?;
    steps.extend(more);
    Ok(normal_form_output(name, &nf, trace.then_some(&steps)))
}

pub fn cmd_simplify(file: &str, name: &str, trace: bool) -> Result<Output, CliError> {
    let corpus = load(file)?;
    let (_, f) = formula_entry(&corpus, name)?;
    let (nf, steps) = simplify(&read_normal_form(f)?)?;
    Ok(normal_form_output(name, &nf, trace.then_some(&steps)))
}

/// Slots from `T|U,S,k`.
fn parse_partition(text: &str) -> Vec<Vec<String>> {
    text.split('|')
        .map(|slot| {
            slot.split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect()
        })
        .collect()
}

/// One slot per antecedent conjunct, holding the components it mentions
/// first; components no conjunct mentions get a slot each.
fn default_slots(ante: &NormalForm) -> Vec<Vec<String>> {
    let names: Vec<&str> = ante.univ.vars().iter().map(|v| v.name.as_str()).collect();
    let mut taken = vec![false; names.len()];
    let mut slots = Vec::new();
    for c in conjuncts(&ante.matrix) {
        let mut slot = Vec::new();
        for (i, n) in names.iter().enumerate() {
            if !taken[i] && c.mentions(n) {
                taken[i] = true;
                slot.push(n.to_string());
            }
        }
        if !slot.is_empty() {
            slots.push(slot);
        }
    }
    for (i, n) in names.iter().enumerate() {
        if !taken[i] {
            slots.push(vec![n.to_string()]);
        }
    }
    slots
}

fn collapse_all(ob: &Obligation) -> Result<Obligation, HerbrandError> {
    let mut cur = ob.clone();
    for out in ob.outputs.vars() {
        cur = collapse_witnesses(&cur, &out.name)?;
    }
    Ok(cur)
}

pub fn cmd_herbrandize(
    file: &str,
    ante: &str,
    cons: &str,
    pointwise: bool,
    partition: Option<&str>,
    output: Option<&str>,
) -> Result<Output, CliError> {
    let corpus = load(file)?;
    let a = if ante == "-" {
        NormalForm::internal(Formula::top())?
    } else {
        normal_form_of(formula_entry(&corpus, ante)?.1)?
    };
    let b = normal_form_of(formula_entry(&corpus, cons)?.1)?;
    let c_form = implication_to_normal_form(&a, &b, true)?;
    let d_form = implication_to_normal_form(&a, &b, false)?;
    let ob = extraction_obligation(&c_form, "t");

    let mut text = String::new();
    let _ = writeln!(text, "C-form: {c_form}");
    let _ = writeln!(text, "D-form: {d_form}");
    let _ = writeln!(text, "obligation: {}", ob.to_formula());
    let mut j = json!({
        "c_form": c_form.to_string(),
        "d_form": d_form.to_string(),
        "obligation": ob.to_formula().to_string(),
    });
    if !ob.outputs.is_empty() {
        match collapse_all(&ob) {
            Ok(s) => {
                let _ = writeln!(text, "s-form: {}", s.to_formula());
                for c in &s.collapses {
                    let _ = writeln!(
                        text,
                        "  {} := {}  ({})",
                        c.hole, c.definition, c.justification
                    );
                }
                j["s_form"] = json!(s.to_formula().to_string());
                j["collapses"] = json!(s.collapses);
            }
            Err(e) => {
                let _ = writeln!(text, "s-form: not available: {e}");
                j["s_form"] = Json::Null;
            }
        }
    }
    if pointwise {
        let slots = match partition {
            Some(text) => parse_partition(text),
            None => default_slots(&a),
        };
        let out = match output {
            Some(o) => Some(o.to_string()),
            None => match b.exist.vars() {
                [] => None,
                [single] => Some(single.name.clone()),
                _ => {
                    return Err(CliError::Usage(
                        "the consequent has several components; choose one with --output".into(),
                    ))
                }
            },
        };
        let part = Partition::new(slots, out.as_deref());
        let her = herbrandise_pointwise(&d_form, &part)?;
        let _ = writeln!(text, "HER: {her}");
        j["her"] = json!(her.to_string());
        j["partition"] = json!({"slots": part.slots, "output": part.output});
    }
    Ok(Output::ok(text, j))
}

pub fn cmd_obligation(file: &str, name: &str, collapse: Option<&str>) -> Result<Output, CliError> {
    let corpus = load(file)?;
    let nf = normal_form_of(formula_entry(&corpus, name)?.1)?;
    let ob = extraction_obligation(&nf, "t");
    let mut text = format!("{}\n", ob.to_formula());
    let mut j = json!({"name": name, "obligation": ob.to_formula().to_string(), "holes": ob.holes});
    let Some(comp) = collapse else {
        return Ok(Output::ok(text, j));
    };
    match collapse_witnesses(&ob, comp) {
        Ok(c) => {
            let _ = writeln!(text, "collapsed: {}", c.to_formula());
            for col in &c.collapses {
                let _ = writeln!(
                    text,
                    "  {} := {}  ({})",
                    col.hole, col.definition, col.justification
                );
            }
            j["collapsed"] = json!(c.to_formula().to_string());
            j["collapses"] = json!(c.collapses);
            Ok(Output::ok(text, j))
        }
        Err(e @ HerbrandError::NotMonotone { .. }) => {
            let _ = writeln!(text, "cannot collapse: {e}");
            j["error"] = json!(e.to_string());
            Ok(Output {
                text,
                json: j,
                code: 1,
            })
        }
        Err(e) => Err(e.into()),
    }
}

pub fn cmd_eval(file: &str, fuel: u64) -> Result<Output, CliError> {
    let (name, src) = read_source(file)?;
    let terms: Vec<(String, crate::term::Term, crate::types::FiniteType)> =
        match parse_file(&name, &src) {
            Ok(corpus) if corpus.entries.iter().any(|e| e.kind == EntryKind::Term) => corpus
                .entries
                .into_iter()
                .filter_map(|e| match e.item {
                    Item::Term(t, ty) => Some((e.name, t, ty)),
                    Item::Formula(_) => None,
                })
                .collect(),
            parsed => {
                let sig = Signature::new();
                match parse_term(&src, &sig) {
                    Ok(t) => {
                        let ty = type_check(&t, &sig.context()).map_err(ParseError::Type)?;
                        vec![(name.clone(), t, ty)]
                    }
                    // Report the corpus error when the file looked like one.
                    Err(e) => return Err(parsed.err().map(CliError::from).unwrap_or(e.into())),
                }
            }
        };
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut code = 0;
    for (name, t, ty) in terms {
        let mut ev = Evaluator::new(fuel);
        match ev.eval(&t, &Env::empty()) {
            Ok(v) => {
                let _ = writeln!(text, "{name} : {ty} = {v}  ({} steps)", ev.steps());
                rows.push(json!({"name": name, "type": ty.to_string(), "value": v.to_string(), "steps": ev.steps()}));
            }
            Err(e) => {
                code = 1;
                let _ = writeln!(text, "{name} : {ty} failed: {e}");
                let kind = match e {
                    EvalError::OutOfFuel(_) => "out-of-fuel",
                    EvalError::IllTyped(_) => "stuck",
                    EvalError::Opaque(_) => "opaque",
                };
                rows.push(json!({"name": name, "type": ty.to_string(), "error": kind, "message": e.to_string()}));
            }
        }
    }
    Ok(Output {
        text,
        json: json!({"fuel": fuel, "results": rows}),
        code,
    })
}

pub fn cmd_demo(name: &str, depth: usize) -> Result<Output, CliError> {
    let reports: Vec<cases::Report> = demo(name, depth)?;
    let mut text = String::new();
    for r in &reports {
        let _ = writeln!(text, "{r}");
    }
    let code = u8::from(!reports.iter().all(cases::Report::passed));
    Ok(Output {
        text,
        json: json!(reports),
        code,
    })
}

pub fn cmd_corpus() -> Result<Output, CliError> {
    let files = load_builtin()?;
    let mut text = String::new();
    let mut rows = Vec::new();
    let (mut fixed, mut failed) = (0, 0);
    for file in &files {
        for e in &file.entries {
            let status = match (&e.kind, &e.item) {
                (EntryKind::NormalForm, Item::Formula(f)) => match fixed_point_check(f) {
                    Ok(true) => {
                        fixed += 1;
                        "fixed point".to_string()
                    }
                    Ok(false) => {
                        failed += 1;
                        "NOT a fixed point".to_string()
                    }
                    Err(err) => {
                        failed += 1;
                        format!("error: {err}")
                    }
                },
                (_, Item::Term(_, ty)) => format!("term : {ty}"),
                _ => "formula".to_string(),
            };
            let _ = writeln!(text, "{}::{} {status}", file.name, e.name);
            rows.push(json!({"file": file.name, "name": e.name, "kind": e.kind.to_string(), "status": status}));
        }
    }
    let _ = writeln!(
        text,
        "{fixed} normal forms are fixed points, {failed} failed"
    );
    Ok(Output {
        text,
        json: json!({"entries": rows, "fixed_points": fixed, "failed": failed}),
        code: u8::from(failed > 0),
    })
}
